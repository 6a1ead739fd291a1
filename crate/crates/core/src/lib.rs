//! Exact arithmetic on one- and two-dimensional local fields of
//! characteristic zero: relative residue maps on continuous differential
//! forms, the sum-zero reciprocity law over O_K[[T]] and presented finite
//! extensions, and codifferent/different computations with an explicit
//! membership test for the dualizing module of an affine hypersurface.
//!
//! The crate is `no_std`-compatible (alloc required); all IO, file formats
//! and the CLI live in the companion `twolocal` crate.
//!
//! Layer map:
//! - [`padic`], [`finite`], [`fields`]: base fields (Q_p, towers, residue
//!   fields) with ball-arithmetic precision tracking.
//! - [`series`]: Laurent series, K{{t}} truncations with the dual
//!   (p-adic + exponent-window) precision contract, Weierstrass
//!   division/preparation, expansions at Weierstrass primes.
//! - [`residues`]: residue maps on two-dimensional local fields and their
//!   functoriality/compatibility checks.
//! - [`reciprocity`]: height-one primes of O_K[[T]], per-prime residues and
//!   the reciprocity ledger, including presented extensions A = B[x]/(F).
//! - [`dualizing`]: Jacobians, differents, trace-integrality oracles and
//!   membership in the explicit dualizing module.
//! - [`battery`]: the self-test batteries driven by both the acceptance
//!   suite and the CLI.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod battery;
pub mod coeff;
pub mod dualizing;
pub mod err;
pub mod fields;
pub mod finite;
pub mod padic;
pub mod polyquot;
pub mod prng;
pub mod reciprocity;
pub mod residues;
pub mod series;

pub use coeff::Coeff;
pub use err::{Error, Result};

#[cfg(test)]
mod concurrency_contract {
    // All values are immutable after construction; batch checks may run
    // samples in parallel with no coordination.
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::padic::PadicApprox>();
        assert_send_sync::<crate::fields::LocalFieldElement>();
        assert_send_sync::<crate::finite::FFElt>();
        assert_send_sync::<crate::residues::MxSeries>();
        assert_send_sync::<crate::residues::EqSeries>();
        assert_send_sync::<crate::reciprocity::FormOverB>();
        assert_send_sync::<crate::reciprocity::ResidueLedger>();
        assert_send_sync::<crate::dualizing::SurfacePresentation>();
    }
}
