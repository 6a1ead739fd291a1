//! The coefficient-ring interface shared by series, quotient algebras and
//! linear algebra helpers.
//!
//! Everything downstream (Laurent series, K{{t}} truncations, etale
//! algebras, B[x]/(F) arithmetic) is generic over this trait, so the same
//! residue and trace machinery runs over Q_p, finite extensions, finite
//! fields and truncated power series alike.

use core::fmt::Debug;

use num_rational::Rational64;

use crate::err::Result;
use crate::padic::PadicApprox;

/// A huge rational used where a precision bound is morally infinite.
pub fn prec_inf() -> Rational64 {
    Rational64::new(crate::padic::PREC_EXACT, 1)
}

pub trait Coeff: Clone + Debug {
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; errors when the element is not certifiably a
    /// unit at the working precision.
    fn inv(&self) -> Result<Self>;
    /// Zero carrying the same ambient context (prime, field descriptor,
    /// precision) as `self`.
    fn zero_like(&self) -> Self;
    /// One carrying the same ambient context as `self`.
    fn one_like(&self) -> Self;
    /// Multiplication by a small exact integer (used by derivatives).
    fn mul_i64(&self, k: i64) -> Self;
    fn is_zero_to_prec(&self) -> bool;
    /// Apparent valuation in nu_K units (`None` when indistinguishable from
    /// zero at the working precision).
    fn vord(&self) -> Option<Rational64>;
    /// Certified absolute precision in nu_K units: the value is known modulo
    /// terms of valuation >= this bound.
    fn prec_bound(&self) -> Rational64;
    /// Lower the certified precision to `cap` (no-op when already lower).
    fn cap_prec(&self, cap: Rational64) -> Self;
    /// Certified `nu >= r`.
    fn val_at_least(&self, r: Rational64) -> bool;
}

impl Coeff for PadicApprox {
    fn add(&self, rhs: &Self) -> Self {
        PadicApprox::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        PadicApprox::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        PadicApprox::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        PadicApprox::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        PadicApprox::inv(self)
    }
    fn zero_like(&self) -> Self {
        PadicApprox::zero_to(self.prime(), self.precision())
    }
    fn one_like(&self) -> Self {
        PadicApprox::one(self.prime(), self.precision().max(1))
    }
    fn mul_i64(&self, k: i64) -> Self {
        PadicApprox::mul_i64(self, k)
    }
    fn is_zero_to_prec(&self) -> bool {
        PadicApprox::is_zero_to_prec(self)
    }
    fn vord(&self) -> Option<Rational64> {
        self.valuation().map(|v| Rational64::new(v, 1))
    }
    fn prec_bound(&self) -> Rational64 {
        Rational64::new(self.precision(), 1)
    }
    fn cap_prec(&self, cap: Rational64) -> Self {
        // absolute precision is integral for base-field elements
        PadicApprox::cap_prec(self, cap.floor().to_integer())
    }
    fn val_at_least(&self, r: Rational64) -> bool {
        PadicApprox::val_at_least(self, r.ceil().to_integer())
    }
}
