//! Elements of Q_p known to finite absolute precision.
//!
//! A nonzero value is stored as `u * p^v + O(p^N)` where `u` is a unit
//! modulo `p^(N-v)`; a value whose digits all vanish is stored as `O(p^N)`
//! ("zero to precision N") and is ordered below every nonzero valuation
//! smaller than `N`. Valuations are normalised so that `nu(p) = 1`.
//!
//! Precision propagation follows the standard ball-arithmetic rules:
//! `N(a+b) = min(Na, Nb)` and `N(a*b) = min(Na + v(b), Nb + v(a))`.

use alloc::format;
use alloc::string::String;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::err::{Error, Result};

/// Precision used for values that are known exactly (e.g. integer literals
/// before any approximate operation touches them). Large enough to dominate
/// every working precision, small enough that sums of a few of them do not
/// overflow `i64`.
pub const PREC_EXACT: i64 = 1 << 40;

#[derive(Clone, PartialEq, Eq)]
pub struct PadicApprox {
    p: u64,
    /// `None` <=> zero to precision `prec`; `Some((v, u))` <=> `u*p^v + O(p^prec)`
    /// with `0 < u < p^(prec-v)` and `p` not dividing `u`.
    repr: Option<(i64, BigUint)>,
    prec: i64,
}

fn ppow(p: u64, k: i64) -> BigUint {
    debug_assert!(k >= 0);
    BigUint::from(p).pow(k.clamp(0, 1 << 20) as u32)
}

/// p-adic valuation of a nonzero natural number.
fn vp_nat(p: u64, z: &BigUint) -> (i64, BigUint) {
    let pb = BigUint::from(p);
    let mut v = 0i64;
    let mut z = z.clone();
    loop {
        let (q, r) = z.div_rem(&pb);
        if r.is_zero() {
            z = q;
            v += 1;
        } else {
            return (v, z);
        }
    }
}

/// Inverse of `u` modulo `m` by extended Euclid; `u` must be coprime to `m`.
fn modinv(u: &BigUint, m: &BigUint) -> BigUint {
    let a = BigInt::from_biguint(Sign::Plus, u.clone());
    let mb = BigInt::from_biguint(Sign::Plus, m.clone());
    let eg = a.extended_gcd(&mb);
    debug_assert!(eg.gcd.is_one(), "modinv of non-unit");
    let mut x = eg.x % &mb;
    if x.is_negative() {
        x += &mb;
    }
    x.to_biguint().expect("non-negative")
}

impl PadicApprox {
    pub fn zero_to(p: u64, prec: i64) -> Self {
        PadicApprox { p, repr: None, prec: prec.min(PREC_EXACT) }
    }

    /// `z + O(p^prec)`.
    pub fn from_bigint(p: u64, z: &BigInt, prec: i64) -> Self {
        let prec = prec.min(PREC_EXACT);
        let modulus = ppow(p, prec.max(0));
        let mut r = z.mod_floor(&BigInt::from_biguint(Sign::Plus, modulus));
        if r.is_negative() {
            // unreachable with mod_floor, kept for clarity
            r = -r;
        }
        let rn = r.to_biguint().expect("non-negative");
        if rn.is_zero() || prec <= 0 {
            return Self::zero_to(p, prec);
        }
        let (v, u) = vp_nat(p, &rn);
        if v >= prec {
            return Self::zero_to(p, prec);
        }
        let u = u % ppow(p, prec - v);
        PadicApprox { p, repr: Some((v, u)), prec }
    }

    pub fn from_i64(p: u64, z: i64, prec: i64) -> Self {
        Self::from_bigint(p, &BigInt::from(z), prec)
    }

    pub fn one(p: u64, prec: i64) -> Self {
        Self::from_i64(p, 1, prec)
    }

    /// `u * p^v + O(p^prec)`; `u` need not be reduced but must be a p-unit.
    pub fn from_unit_pow(p: u64, v: i64, u: &BigUint, prec: i64) -> Result<Self> {
        if (u % BigUint::from(p)).is_zero() {
            return Err(Error::Shape(format!("unit part divisible by {p}")));
        }
        if v >= prec {
            return Ok(Self::zero_to(p, prec));
        }
        let u = u % ppow(p, prec - v);
        Ok(PadicApprox { p, repr: Some((v, u)), prec })
    }

    /// `num/den + O(p^prec)` for any nonzero `den`.
    pub fn from_ratio(p: u64, num: &BigInt, den: &BigInt, prec: i64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::PrecisionLoss("rational with zero denominator".into()));
        }
        let (sd, dn) = (den.sign(), den.magnitude().clone());
        let (vd, ud) = vp_nat(p, &dn);
        let mut a = Self::from_bigint(p, num, prec + vd + 1);
        if sd == Sign::Minus {
            a = a.neg();
        }
        let rel = match a.repr {
            None => a.prec - vd,
            Some((v, _)) => a.prec - v,
        };
        let minv = modinv(&ud, &ppow(p, rel.max(1)));
        let b = match &a.repr {
            None => return Ok(Self::zero_to(p, a.prec - vd)),
            Some((v, u)) => {
                let nv = v - vd;
                let np = a.prec - 2 * vd;
                let nu = (u * &minv) % ppow(p, np - nv);
                PadicApprox { p, repr: Some((nv, nu)), prec: np }
            }
        };
        Ok(b.cap_prec(prec))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn is_zero_to_prec(&self) -> bool {
        self.repr.is_none()
    }

    /// `None` when the value is zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        self.repr.as_ref().map(|(v, _)| *v)
    }

    /// Certified `nu(x) >= r`. For a zero-to-precision value this holds
    /// exactly when the precision reaches `r`.
    pub fn val_at_least(&self, r: i64) -> bool {
        match &self.repr {
            None => self.prec >= r,
            Some((v, _)) => *v >= r,
        }
    }

    /// Certified `nu(x) < r` (the value is provably nonzero with small
    /// valuation). Distinct from `!val_at_least(r)`, which may merely mean
    /// "undecidable".
    pub fn val_certified_below(&self, r: i64) -> bool {
        match &self.repr {
            None => false,
            Some((v, _)) => *v < r,
        }
    }

    pub fn unit_part(&self) -> Option<&BigUint> {
        self.repr.as_ref().map(|(_, u)| u)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let p = self.p;
        match (&self.repr, &rhs.repr) {
            (None, None) => Self::zero_to(p, self.prec.min(rhs.prec)),
            (None, Some(_)) => rhs.cap_prec(self.prec),
            (Some(_), None) => self.cap_prec(rhs.prec),
            (Some((va, ua)), Some((vb, ub))) => {
                let n = self.prec.min(rhs.prec);
                let v = (*va).min(*vb);
                if v >= n {
                    return Self::zero_to(p, n);
                }
                let m = ppow(p, n - v);
                let za = (ua * ppow(p, va - v)) % &m;
                let zb = (ub * ppow(p, vb - v)) % &m;
                let z = (za + zb) % &m;
                if z.is_zero() {
                    return Self::zero_to(p, n);
                }
                let (w, u) = vp_nat(p, &z);
                if v + w >= n {
                    return Self::zero_to(p, n);
                }
                let u = u % ppow(p, n - v - w);
                PadicApprox { p, repr: Some((v + w, u)), prec: n }
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            None => self.clone(),
            Some((v, u)) => {
                let m = ppow(self.p, self.prec - v);
                let nu = (&m - (u % &m)) % &m;
                debug_assert!(!nu.is_zero());
                PadicApprox { p: self.p, repr: Some((*v, nu)), prec: self.prec }
            }
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let p = self.p;
        match (&self.repr, &rhs.repr) {
            (None, None) => Self::zero_to(p, (self.prec + rhs.prec).min(PREC_EXACT)),
            (None, Some((vb, _))) => Self::zero_to(p, (self.prec + vb).min(PREC_EXACT)),
            (Some((va, _)), None) => Self::zero_to(p, (rhs.prec + va).min(PREC_EXACT)),
            (Some((va, ua)), Some((vb, ub))) => {
                let n = (self.prec + vb).min(rhs.prec + va).min(PREC_EXACT);
                let v = va + vb;
                if v >= n {
                    return Self::zero_to(p, n);
                }
                let u = (ua * ub) % ppow(p, n - v);
                PadicApprox { p, repr: Some((v, u)), prec: n }
            }
        }
    }

    /// Multiply by an exact integer; the integer has infinite precision so
    /// only `self`'s relative precision limits the result.
    pub fn mul_exact_int(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero_to(self.p, PREC_EXACT);
        }
        if c.is_one() {
            return self.clone();
        }
        let (vc, uc) = vp_nat(self.p, c.magnitude());
        let sign = c.sign();
        match &self.repr {
            None => Self::zero_to(self.p, (self.prec + vc).min(PREC_EXACT)),
            Some((v, u)) => {
                let n = (self.prec + vc).min(PREC_EXACT);
                let nv = v + vc;
                let m = ppow(self.p, n - nv);
                let mut nu = (u * (uc % &m)) % &m;
                if sign == Sign::Minus {
                    nu = (&m - nu) % &m;
                }
                debug_assert!(!nu.is_zero());
                PadicApprox { p: self.p, repr: Some((nv, nu)), prec: n }
            }
        }
    }

    pub fn mul_i64(&self, c: i64) -> Self {
        self.mul_exact_int(&BigInt::from(c))
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            None => Err(Error::PrecisionLoss(format!(
                "inverting a value indistinguishable from zero at precision O({}^{})",
                self.p, self.prec
            ))),
            Some((v, u)) => {
                let rel = self.prec - v;
                let m = ppow(self.p, rel);
                let iu = modinv(u, &m);
                Ok(PadicApprox { p: self.p, repr: Some((-v, iu)), prec: rel - v })
            }
        }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow_i64(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow_i64(-k);
        }
        let mut acc = Self::one(self.p, PREC_EXACT);
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Multiply by `p^k` exactly.
    pub fn shift_p(&self, k: i64) -> Self {
        match &self.repr {
            None => Self::zero_to(self.p, (self.prec + k).min(PREC_EXACT)),
            Some((v, u)) => PadicApprox {
                p: self.p,
                repr: Some((v + k, u.clone())),
                prec: (self.prec + k).min(PREC_EXACT),
            },
        }
    }

    /// Lower the absolute precision to `n` (no-op if already lower).
    pub fn cap_prec(&self, n: i64) -> Self {
        if n >= self.prec {
            return self.clone();
        }
        match &self.repr {
            None => Self::zero_to(self.p, n),
            Some((v, u)) => {
                if *v >= n {
                    Self::zero_to(self.p, n)
                } else {
                    let u = u % ppow(self.p, n - v);
                    debug_assert!(!u.is_zero());
                    PadicApprox { p: self.p, repr: Some((*v, u)), prec: n }
                }
            }
        }
    }

    /// Image in the residue field F_p; requires `nu >= 0`.
    pub fn residue_digit(&self) -> Result<u64> {
        match &self.repr {
            None => {
                if self.prec >= 1 {
                    Ok(0)
                } else {
                    Err(Error::PrecisionLoss("no certified digit to reduce".into()))
                }
            }
            Some((v, u)) => {
                if *v < 0 {
                    Err(Error::NotIntegral(format!("valuation {v} < 0")))
                } else if *v >= 1 {
                    Ok(0)
                } else {
                    let d = u % BigUint::from(self.p);
                    Ok(d.to_u64_digits().first().copied().unwrap_or(0))
                }
            }
        }
    }

    /// Canonical representative modulo `p^min(k, prec)`; requires `nu >= 0`.
    pub fn lift_mod(&self, k: i64) -> Result<BigUint> {
        let k = k.min(self.prec);
        match &self.repr {
            None => Ok(BigUint::zero()),
            Some((v, u)) => {
                if *v < 0 {
                    return Err(Error::NotIntegral(format!("valuation {v} < 0")));
                }
                if *v >= k {
                    return Ok(BigUint::zero());
                }
                Ok((u * ppow(self.p, *v)) % ppow(self.p, k))
            }
        }
    }

    /// Whether `self - rhs` vanishes to the smaller of the two precisions.
    pub fn eq_to_min_prec(&self, rhs: &Self) -> bool {
        self.sub(rhs).is_zero_to_prec()
    }

    /// Canonical short rendering with a balanced unit representative,
    /// e.g. `3*5^2 + O(5^16)` or `-1 + O(5^16)`.
    pub fn render(&self) -> String {
        match &self.repr {
            None => format!("O({}^{})", self.p, self.prec),
            Some((v, u)) => {
                let m = ppow(self.p, self.prec - v);
                let unit = if u * 2u8 > m {
                    format!("-{}", &m - u)
                } else {
                    format!("{u}")
                };
                if *v == 0 {
                    format!("{} + O({}^{})", unit, self.p, self.prec)
                } else {
                    format!("{}*{}^{} + O({}^{})", unit, self.p, v, self.p, self.prec)
                }
            }
        }
    }
}

impl fmt::Debug for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(p: u64, z: i64, n: i64) -> PadicApprox {
        PadicApprox::from_i64(p, z, n)
    }

    #[test]
    fn geometric_series_inverse() {
        // (1-p)^{-1} = 1 + p + p^2 + ... truncated at N
        for p in [2u64, 3, 5] {
            let n = 12;
            let inv = int(p, 1 - p as i64, n).inv().unwrap();
            let mut acc = BigInt::zero();
            let mut pk = BigInt::one();
            for _ in 0..n {
                acc += &pk;
                pk *= p;
            }
            assert!(inv.eq_to_min_prec(&PadicApprox::from_bigint(p, &acc, n)));
        }
    }

    #[test]
    fn add_preserves_valuation_floor() {
        let p = 7u64;
        let a = int(p, 7 * 3, 10);
        let b = int(p, 7 * 11, 10);
        let s = a.add(&b);
        assert!(s.val_at_least(1));
        assert_eq!(s.valuation(), Some(2)); // 21 + 77 = 98 = 2 * 7^2
        let s2 = a.add(&int(p, 7 * 12, 10));
        assert_eq!(s2.valuation(), Some(1));
    }

    #[test]
    fn division_against_extended_euclid_oracle() {
        // p=5, N=6: 2/3 computed independently by extended Euclid mod 5^6.
        let p = 5u64;
        let n = 6;
        let m = 15625u64; // 5^6
        // oracle: x with 3x = 1 mod 5^6 by brute scan (independent route)
        let mut inv3 = 0u64;
        for x in 0..m {
            if (3 * x) % m == 1 {
                inv3 = x;
                break;
            }
        }
        assert_eq!(inv3, 10417);
        let expect = (2 * inv3) % m;
        let q = int(p, 2, n).div(&int(p, 3, n)).unwrap();
        assert_eq!(q.lift_mod(n).unwrap(), BigUint::from(expect));
        // multiply back
        assert!(q.mul(&int(p, 3, n)).eq_to_min_prec(&int(p, 2, n)));
    }

    #[test]
    fn precision_rules() {
        let p = 5u64;
        let a = int(p, 2, 8);
        let b = int(p, 5, 6); // v=1, N=6
        let prod = a.mul(&b);
        // N = min(8+1, 6+0) = 6
        assert_eq!(prod.precision(), 6);
        assert_eq!(prod.valuation(), Some(1));
        let s = a.add(&b);
        assert_eq!(s.precision(), 6);
    }

    #[test]
    fn zero_to_precision_semantics() {
        let p = 3u64;
        let z = int(p, 9, 2); // 9 = 3^2 >= precision => zero to precision
        assert!(z.is_zero_to_prec());
        assert!(z.val_at_least(2));
        assert!(!z.val_at_least(3));
        assert!(int(p, 1, 8).div(&z).is_err());
    }

    #[test]
    fn negative_valuation_and_ratio() {
        let p = 5u64;
        let half_fifth = PadicApprox::from_ratio(p, &BigInt::from(2), &BigInt::from(5), 6).unwrap();
        assert_eq!(half_fifth.valuation(), Some(-1));
        let back = half_fifth.mul(&int(p, 5, 10));
        assert!(back.eq_to_min_prec(&int(p, 2, 5)));
    }

    #[test]
    fn ring_identities_randomised() {
        // associativity/distributivity on a few hundred random triples
        let p = 3u64;
        let n = 10;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..300 {
            let a = int(p, (next() % 100000) as i64 - 50000, n);
            let b = int(p, (next() % 100000) as i64 - 50000, n);
            let c = int(p, (next() % 100000) as i64 - 50000, n);
            let l = a.add(&b).add(&c);
            let r = a.add(&b.add(&c));
            assert!(l.eq_to_min_prec(&r));
            let l2 = a.mul(&b.add(&c));
            let r2 = a.mul(&b).add(&a.mul(&c));
            assert!(l2.eq_to_min_prec(&r2));
            // v(ab) = v(a)+v(b)
            if let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) {
                if let Some(vab) = a.mul(&b).valuation() {
                    assert_eq!(vab, va + vb);
                }
            }
        }
    }
}
