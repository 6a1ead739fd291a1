//! Small finite fields F_{p^f} for residue-field computations.
//!
//! Arithmetic is exact (coordinates mod p in a fixed polynomial basis);
//! these live on the residue-field side of the reduction diagrams, so no
//! precision bookkeeping is needed.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Rational64;

use crate::coeff::{prec_inf, Coeff};
use crate::err::{Error, Result};

#[derive(Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    /// Monic modulus over F_p, little-endian, degree = f. For f = 1 this is
    /// `[0, 1]` (the polynomial x) and elements are plain digits.
    modulus: Vec<u64>,
}

impl FiniteField {
    pub fn prime_field(p: u64) -> Arc<Self> {
        Arc::new(FiniteField { p, modulus: vec![0, 1] })
    }

    /// F_p[x]/(modulus); the modulus must be monic and irreducible mod p.
    pub fn extension(p: u64, modulus: Vec<u64>) -> Result<Arc<Self>> {
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::Shape("finite field modulus must be monic of degree >= 1".into()));
        }
        if modulus.len() > 5 {
            return Err(Error::Shape(
                "irreducibility is brute-force checked for degree <= 4 only".into(),
            ));
        }
        if modulus.len() > 2 && !poly_irreducible_mod_p(p, &modulus) {
            return Err(Error::Shape(format!(
                "modulus is reducible modulo {p}; not a field"
            )));
        }
        Ok(Arc::new(FiniteField { p, modulus }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.degree() as u32)
    }

    pub fn elt(self: &Arc<Self>, coords: Vec<u64>) -> FFElt {
        let f = self.degree();
        let mut c: Vec<u64> = coords.into_iter().map(|x| x % self.p).collect();
        c.resize(f, 0);
        FFElt { field: self.clone(), coords: c }
    }

    pub fn zero(self: &Arc<Self>) -> FFElt {
        self.elt(vec![])
    }

    pub fn one(self: &Arc<Self>) -> FFElt {
        self.elt(vec![1])
    }

    pub fn generator(self: &Arc<Self>) -> FFElt {
        self.elt(vec![0, 1])
    }
}

/// Brute-force irreducibility over F_p for degree <= 4: no roots, and for
/// degree 4 additionally no monic quadratic factor.
pub fn poly_irreducible_mod_p(p: u64, poly: &[u64]) -> bool {
    let d = poly.len() - 1;
    if d == 1 {
        return true;
    }
    let eval = |x: u64| -> u64 {
        let mut acc = 0u64;
        for &c in poly.iter().rev() {
            acc = (acc * x + c) % p;
        }
        acc
    };
    for x in 0..p {
        if eval(x) == 0 {
            return false;
        }
    }
    if d <= 3 {
        return true;
    }
    if d == 4 {
        // try all monic quadratics x^2 + ax + b
        for a in 0..p {
            'b: for b in 0..p {
                // divide poly by x^2 + ax + b over F_p, check zero remainder
                let mut rem: Vec<u64> = poly.to_vec();
                for i in (2..=d).rev() {
                    let lead = rem[i] % p;
                    if lead == 0 {
                        continue;
                    }
                    rem[i] = 0;
                    rem[i - 1] = (rem[i - 1] + p * p - (lead * a) % p) % p;
                    rem[i - 2] = (rem[i - 2] + p * p - (lead * b) % p) % p;
                }
                for c in rem.iter().take(2) {
                    if c % p != 0 {
                        continue 'b;
                    }
                }
                return false;
            }
        }
        return true;
    }
    // larger degrees are outside the supported tower shapes
    false
}

#[derive(Clone, PartialEq, Eq)]
pub struct FFElt {
    field: Arc<FiniteField>,
    coords: Vec<u64>,
}

impl FFElt {
    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn reduce(field: &Arc<FiniteField>, mut poly: Vec<u64>) -> FFElt {
        let p = field.p;
        let f = field.degree();
        for i in (f..poly.len()).rev() {
            let lead = poly[i] % p;
            poly[i] = 0;
            if lead == 0 {
                continue;
            }
            for j in 0..f {
                let m = field.modulus[j] % p;
                poly[i - f + j] = (poly[i - f + j] + p * p - (lead * m) % p) % p;
            }
        }
        poly.truncate(f);
        FFElt { field: field.clone(), coords: poly.iter().map(|c| c % p).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.field.p;
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| (a + b) % p)
            .collect();
        FFElt { field: self.field.clone(), coords }
    }

    pub fn neg(&self) -> Self {
        let p = self.field.p;
        let coords = self.coords.iter().map(|a| (p - a % p) % p).collect();
        FFElt { field: self.field.clone(), coords }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.field.p;
        let f = self.field.degree();
        let mut prod = vec![0u64; 2 * f];
        for (i, a) in self.coords.iter().enumerate() {
            for (j, b) in rhs.coords.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        Self::reduce(&self.field, prod)
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::PrecisionLoss("inverse of zero in finite field".into()));
        }
        // q - 2 exponent; fields here are tiny
        Ok(self.pow(self.field.order() - 2))
    }

    pub fn frobenius(&self) -> Self {
        self.pow(self.field.p)
    }

    pub fn render(&self) -> String {
        format!("{:?}", self.coords)
    }
}

impl fmt::Debug for FFElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ff{:?}", self.coords)
    }
}

impl Coeff for FFElt {
    fn add(&self, rhs: &Self) -> Self {
        FFElt::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        FFElt::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        FFElt::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        FFElt::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        FFElt::inv(self)
    }
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
    }
    fn mul_i64(&self, k: i64) -> Self {
        let p = self.field.p as i64;
        let k = ((k % p) + p) % p;
        let scalar = self.field.elt(vec![k as u64]);
        FFElt::mul(self, &scalar)
    }
    fn is_zero_to_prec(&self) -> bool {
        self.is_zero()
    }
    fn vord(&self) -> Option<Rational64> {
        if self.is_zero() {
            None
        } else {
            Some(Rational64::new(0, 1))
        }
    }
    fn prec_bound(&self) -> Rational64 {
        prec_inf()
    }
    fn cap_prec(&self, _cap: Rational64) -> Self {
        self.clone()
    }
    fn val_at_least(&self, r: Rational64) -> bool {
        self.is_zero() || r <= Rational64::new(0, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_field_axioms() {
        let f4 = FiniteField::extension(2, vec![1, 1, 1]).unwrap();
        let x = f4.generator();
        // x^2 = x + 1, x^3 = 1
        assert_eq!(x.mul(&x), f4.elt(vec![1, 1]));
        assert_eq!(x.pow(3), f4.one());
        assert_eq!(x.inv().unwrap().mul(&x), f4.one());
    }

    #[test]
    fn frobenius_is_additive_and_multiplicative() {
        let f25 = FiniteField::extension(5, vec![2, 0, 1]).unwrap(); // x^2+2 irreducible mod 5
        for a0 in 0..5 {
            for a1 in 0..5 {
                let a = f25.elt(vec![a0, a1]);
                let b = f25.elt(vec![a1, (a0 + 3) % 5]);
                assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
                assert_eq!(a.mul(&b).frobenius(), a.frobenius().mul(&b.frobenius()));
            }
        }
    }

    #[test]
    fn irreducibility_brute_force() {
        assert!(poly_irreducible_mod_p(2, &[1, 1, 1])); // x^2+x+1
        assert!(!poly_irreducible_mod_p(2, &[1, 0, 1])); // x^2+1 = (x+1)^2
        assert!(poly_irreducible_mod_p(5, &[2, 0, 1])); // x^2+2
        assert!(!poly_irreducible_mod_p(5, &[4, 0, 1])); // x^2+4 = (x+1)(x+4)
        // x^4 + x + 1 irreducible over F_2; x^4 + x^2 + 1 = (x^2+x+1)^2
        assert!(poly_irreducible_mod_p(2, &[1, 1, 0, 0, 1]));
        assert!(!poly_irreducible_mod_p(2, &[1, 0, 1, 0, 1]));
    }
}
