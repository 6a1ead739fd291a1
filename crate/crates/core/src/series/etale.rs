//! The etale algebra K[x]/(h) attached to a Weierstrass polynomial, and the
//! expansion of g/h^r at the place of h.
//!
//! Irreducibility of h is never required: traces over the algebra equal the
//! sums of traces over the irreducible factors, which is exactly what the
//! aggregated residue needs. Separability enters only through the
//! invertibility of h'(theta) at the working precision.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Rational64;

use crate::coeff::Coeff;
use crate::err::{Error, Result};
use crate::polyquot;
use crate::series::laurent::LaurentSeries;

#[derive(Debug)]
pub struct EtaleAlgebra<C: Coeff> {
    /// Monic with integral coefficients, little-endian, length d+1.
    h: Vec<C>,
    /// Valuation lower bound for the generator: 1/d for a Weierstrass
    /// polynomial of degree d (Newton polygon bound).
    gen_val_floor: Rational64,
}

impl<C: Coeff> EtaleAlgebra<C> {
    pub fn new(h: Vec<C>) -> Result<Arc<Self>> {
        if h.len() < 2 {
            return Err(Error::Shape("etale algebra needs a modulus of degree >= 1".into()));
        }
        let lead = h.last().unwrap();
        if !lead.sub(&lead.one_like()).is_zero_to_prec() {
            return Err(Error::Shape("etale algebra modulus must be monic".into()));
        }
        let d = (h.len() - 1) as i64;
        // roots of a monic integral polynomial with integral coefficients
        // have valuation >= 0; if all non-leading coefficients are in the
        // maximal ideal (Weierstrass shape), roots have valuation >= 1/d
        let weier = h[..h.len() - 1]
            .iter()
            .all(|c| c.val_at_least(Rational64::new(1, 1)));
        let gen_val_floor = if weier {
            Rational64::new(1, d)
        } else {
            Rational64::new(0, 1)
        };
        Ok(Arc::new(EtaleAlgebra { h, gen_val_floor }))
    }

    pub fn degree(&self) -> usize {
        self.h.len() - 1
    }

    pub fn modulus(&self) -> &[C] {
        &self.h
    }

    pub fn elt(self: &Arc<Self>, mut coords: Vec<C>) -> EtaleElt<C> {
        let d = self.degree();
        let zero = self.h[0].zero_like();
        while coords.len() < d {
            coords.push(zero.clone());
        }
        coords.truncate(d);
        EtaleElt { alg: self.clone(), coords }
    }

    pub fn from_scalar(self: &Arc<Self>, c: C) -> EtaleElt<C> {
        self.elt(vec![c])
    }

    pub fn zero(self: &Arc<Self>) -> EtaleElt<C> {
        self.elt(vec![])
    }

    pub fn one(self: &Arc<Self>) -> EtaleElt<C> {
        self.from_scalar(self.h[0].one_like())
    }

    /// The class of x (a shared root of h "to precision").
    pub fn theta(self: &Arc<Self>) -> EtaleElt<C> {
        let zero = self.h[0].zero_like();
        let coords = polyquot::poly_rem_monic(vec![zero.clone(), zero.one_like()], &self.h);
        EtaleElt { alg: self.clone(), coords }
    }

    fn basis_val(&self, i: usize) -> Rational64 {
        self.gen_val_floor * Rational64::new(i as i64, 1)
    }
}

#[derive(Clone)]
pub struct EtaleElt<C: Coeff> {
    alg: Arc<EtaleAlgebra<C>>,
    coords: Vec<C>,
}

impl<C: Coeff> EtaleElt<C> {
    pub fn algebra(&self) -> &Arc<EtaleAlgebra<C>> {
        &self.alg
    }

    pub fn coords(&self) -> &[C] {
        &self.coords
    }

    /// Trace of the multiplication matrix down to the coefficient ring.
    pub fn trace(&self) -> C {
        polyquot::trace_in_quotient(&self.coords, &self.alg.h)
    }
}

impl<C: Coeff> fmt::Debug for EtaleElt<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "et{:?}", self.coords)
    }
}

impl<C: Coeff> Coeff for EtaleElt<C> {
    fn add(&self, rhs: &Self) -> Self {
        EtaleElt {
            alg: self.alg.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        EtaleElt {
            alg: self.alg.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let coords = polyquot::poly_mulmod(&self.coords, &rhs.coords, &self.alg.h);
        EtaleElt { alg: self.alg.clone(), coords }
    }
    fn neg(&self) -> Self {
        EtaleElt { alg: self.alg.clone(), coords: self.coords.iter().map(|c| c.neg()).collect() }
    }
    fn inv(&self) -> Result<Self> {
        let d = self.alg.degree();
        if d == 1 {
            return Ok(EtaleElt { alg: self.alg.clone(), coords: vec![self.coords[0].inv()?] });
        }
        let mat = polyquot::mult_matrix(&self.coords, &self.alg.h);
        let mut rhs = vec![self.coords[0].zero_like(); d];
        rhs[0] = self.coords[0].one_like();
        let sol = polyquot::gauss_solve(mat, rhs).map_err(|_| {
            Error::InseparableToPrecision(
                "element is not invertible in the etale algebra at this precision".into(),
            )
        })?;
        Ok(EtaleElt { alg: self.alg.clone(), coords: sol })
    }
    fn zero_like(&self) -> Self {
        self.alg.zero()
    }
    fn one_like(&self) -> Self {
        self.alg.one()
    }
    fn mul_i64(&self, k: i64) -> Self {
        EtaleElt {
            alg: self.alg.clone(),
            coords: self.coords.iter().map(|c| c.mul_i64(k)).collect(),
        }
    }
    fn is_zero_to_prec(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero_to_prec())
    }
    fn vord(&self) -> Option<Rational64> {
        // Gauss-style lower estimate; used for pivoting and floors only
        self.coords
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.vord().map(|v| v + self.alg.basis_val(i)))
            .min()
    }
    fn prec_bound(&self) -> Rational64 {
        self.coords
            .iter()
            .enumerate()
            .map(|(i, c)| c.prec_bound() + self.alg.basis_val(i))
            .min()
            .unwrap_or_else(crate::coeff::prec_inf)
    }
    fn cap_prec(&self, cap: Rational64) -> Self {
        EtaleElt {
            alg: self.alg.clone(),
            coords: self
                .coords
                .iter()
                .enumerate()
                .map(|(i, c)| c.cap_prec(cap - self.alg.basis_val(i)))
                .collect(),
        }
    }
    fn val_at_least(&self, r: Rational64) -> bool {
        self.coords
            .iter()
            .enumerate()
            .all(|(i, c)| c.val_at_least(r - self.alg.basis_val(i)))
    }
}

/// The u-expansion (u = t - theta) of g(t) / h(t)^r in the etale algebra
/// K[x]/(h), up to order `m`.
///
/// Substitutes t = theta + u, writes h(theta + u) = u W(u) with
/// W(0) = h'(theta) invertible, and returns g(theta+u) W(u)^{-r} u^{-r}.
/// When `g` is a truncation to exponents <= H, the omitted integral terms
/// contribute valuation >= (H + 1 - j) * val(theta) to the u^j coefficient,
/// which caps the certified precision accordingly.
pub fn expand_at_root<C: Coeff>(
    g: &[C],
    g_exact: bool,
    h: &[C],
    r: u32,
    m: i64,
) -> Result<LaurentSeries<EtaleElt<C>>> {
    let alg = EtaleAlgebra::new(h.to_vec())?;
    let theta = alg.theta();
    let d = alg.degree() as i64;
    // h(theta + u) via Taylor shift; constant term is exactly zero in the
    // quotient, linear term is h'(theta)
    let h_emb: Vec<EtaleElt<C>> = h.iter().map(|c| alg.from_scalar(c.clone())).collect();
    let mut h_shift = polyquot::taylor_shift(&h_emb, &theta);
    let c0 = h_shift.remove(0);
    if !c0.is_zero_to_prec() {
        return Err(Error::Disagreement(
            "h(theta) did not vanish in the quotient algebra".into(),
        ));
    }
    h_shift[0].inv().map_err(|_| {
        Error::InseparableToPrecision(format!(
            "h'(theta) is not invertible at the working precision (degree {d} modulus)"
        ))
    })?;
    // W(u)^{-1} as a power series in u, then raise to r
    let w_series = LaurentSeries::from_pairs(
        &alg.zero(),
        h_shift.into_iter().enumerate().map(|(j, c)| (j as i64, c)),
    );
    let w_inv = w_series.invert_unit(m + r as i64)?;
    let mut w_inv_r = LaurentSeries::constant(alg.one());
    for _ in 0..r {
        w_inv_r = w_inv_r.mul(&w_inv);
    }
    // g(theta + u)
    let g_emb: Vec<EtaleElt<C>> = g.iter().map(|c| alg.from_scalar(c.clone())).collect();
    let g_shift = if g_emb.is_empty() {
        vec![]
    } else {
        polyquot::taylor_shift(&g_emb, &theta)
    };
    let mut g_series = LaurentSeries::from_pairs(
        &alg.zero(),
        g_shift.into_iter().enumerate().map(|(j, c)| (j as i64, c)),
    );
    if !g_exact {
        // truncated g: unknown integral terms above degree H contribute
        // theta^(H+1-j) u^j; cap certified precision per coefficient
        let h_top = g.len() as i64 - 1;
        let theta_val = Rational64::new(1, d);
        g_series = LaurentSeries::from_pairs(
            &alg.zero(),
            g_series.iter().map(|(j, c)| {
                let cap = theta_val * Rational64::new((h_top + 1 - *j).max(0), 1);
                (*j, c.cap_prec(cap))
            }),
        );
    }
    let out = g_series.mul(&w_inv_r).shift(-(r as i64));
    let h = out_hi(out.hi(), m);
    Ok(out.with_hi(h))
}

fn out_hi(cur: Option<i64>, m: i64) -> Option<i64> {
    Some(cur.map_or(m, |h| h.min(m)))
}
