//! Seeded randomness for the verification batteries.
//!
//! ChaCha8 keyed from a user seed: deterministic across platforms, which
//! the report-determinism contract relies on.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use num_bigint::BigInt;

use crate::padic::PadicApprox;

pub type Prng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Prng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream for a named sub-battery.
pub fn substream(seed: u64, tag: u64) -> Prng {
    ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9e3779b97f4a7c15))
}

/// Uniform integer in [lo, hi].
pub fn int_in(rng: &mut Prng, lo: i64, hi: i64) -> i64 {
    rng.gen_range(lo..=hi)
}

/// Random integral p-adic element with |value| < p^digits, at precision n.
pub fn padic_integral(rng: &mut Prng, p: u64, digits: u32, n: i64) -> PadicApprox {
    let bound = BigInt::from(p).pow(digits);
    let mut acc = BigInt::from(0);
    // rejection-free: build from digits
    for _ in 0..digits {
        acc = acc * p + BigInt::from(rng.gen_range(0..p));
    }
    debug_assert!(acc < bound);
    if rng.gen_bool(0.5) {
        acc = -acc;
    }
    PadicApprox::from_bigint(p, &acc, n)
}

/// Random p-adic unit at precision n.
pub fn padic_unit(rng: &mut Prng, p: u64, digits: u32, n: i64) -> PadicApprox {
    loop {
        let c = padic_integral(rng, p, digits, n);
        if c.valuation() == Some(0) {
            return c;
        }
    }
}
