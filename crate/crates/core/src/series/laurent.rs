//! Laurent series with finite principal part over an arbitrary coefficient
//! ring: the element model for equal-characteristic two-dimensional local
//! fields k_F((t)) and for expansions in etale algebras.
//!
//! A series is exact below its lowest stored exponent (finitely many
//! negative terms, stored in full). Above, `hi = None` means every higher
//! coefficient is exactly zero; `hi = Some(h)` means coefficients above `h`
//! are untracked, and window bookkeeping follows
//! `hi(a*b) = min(hi_a + lo_b, hi_b + lo_a)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::coeff::Coeff;
use crate::err::{Error, Result};

#[derive(Clone)]
pub struct LaurentSeries<C: Coeff> {
    coeffs: BTreeMap<i64, C>,
    hi: Option<i64>,
    /// Zero of the coefficient ring, carried so empty/absent coefficients
    /// keep their ambient context.
    zero: C,
}

impl<C: Coeff> LaurentSeries<C> {
    pub fn zero_exact(template: &C) -> Self {
        LaurentSeries { coeffs: BTreeMap::new(), hi: None, zero: template.zero_like() }
    }

    pub fn from_pairs(template: &C, pairs: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, c) in pairs {
            coeffs.insert(i, c);
        }
        LaurentSeries { coeffs, hi: None, zero: template.zero_like() }
    }

    pub fn monomial(c: C, exp: i64) -> Self {
        let zero = c.zero_like();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(exp, c);
        LaurentSeries { coeffs, hi: None, zero }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0)
    }

    pub fn with_hi(mut self, hi: Option<i64>) -> Self {
        self.hi = hi;
        self.drop_above_hi();
        self
    }

    fn drop_above_hi(&mut self) {
        if let Some(h) = self.hi {
            let above: Vec<i64> = self.coeffs.range((h + 1)..).map(|(k, _)| *k).collect();
            for k in above {
                self.coeffs.remove(&k);
            }
        }
    }

    pub fn hi(&self) -> Option<i64> {
        self.hi
    }

    pub fn template(&self) -> &C {
        &self.zero
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &C)> {
        self.coeffs.iter()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_stored_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Lowest exponent that could carry a nonzero coefficient.
    fn lo_bound(&self) -> Option<i64> {
        match self.min_exp() {
            Some(m) => Some(m),
            None => self.hi.map(|h| h + 1),
        }
    }

    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero_to_prec())
    }

    /// Stored-or-exact-zero coefficient (errors when the exponent lies
    /// above the tracked window).
    pub fn coeff(&self, i: i64) -> Result<C> {
        if let Some(c) = self.coeffs.get(&i) {
            return Ok(c.clone());
        }
        match self.hi {
            Some(h) if i > h => Err(Error::WindowExhausted(format!(
                "coefficient at exponent {i} lies above the tracked window (top marker {h})"
            ))),
            _ => Ok(self.zero.clone()),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let hi = opt_min(self.hi, rhs.hi);
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            if hi.map_or(true, |h| *k <= h) {
                coeffs.insert(*k, c.clone());
            }
        }
        for (k, c) in &rhs.coeffs {
            if hi.map_or(true, |h| *k <= h) {
                match coeffs.remove(k) {
                    None => {
                        coeffs.insert(*k, c.clone());
                    }
                    Some(prev) => {
                        coeffs.insert(*k, prev.add(c));
                    }
                }
            }
        }
        LaurentSeries { coeffs, hi, zero: self.zero.clone() }
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.neg())).collect(),
            hi: self.hi,
            zero: self.zero.clone(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let hi = match (self.hi, self.lo_bound(), rhs.hi, rhs.lo_bound()) {
            (None, _, None, _) => None,
            (Some(ha), _, None, _) => rhs.lo_bound().map(|lb| ha + lb),
            (None, _, Some(hb), _) => self.lo_bound().map(|la| hb + la),
            (Some(ha), _, Some(hb), _) => {
                opt_min(rhs.lo_bound().map(|lb| ha + lb), self.lo_bound().map(|la| hb + la))
            }
        };
        let mut coeffs: BTreeMap<i64, C> = BTreeMap::new();
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &rhs.coeffs {
                let k = ka + kb;
                if hi.map_or(false, |h| k > h) {
                    continue;
                }
                let prod = ca.mul(cb);
                match coeffs.remove(&k) {
                    None => {
                        coeffs.insert(k, prod);
                    }
                    Some(prev) => {
                        coeffs.insert(k, prev.add(&prod));
                    }
                }
            }
        }
        LaurentSeries { coeffs, hi, zero: self.zero.clone() }
    }

    pub fn scalar_mul(&self, c: &C) -> Self {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(k, a)| (*k, a.mul(c))).collect(),
            hi: self.hi,
            zero: self.zero.clone(),
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, a)| (*e, a.mul_i64(k))).collect(),
            hi: self.hi,
            zero: self.zero.clone(),
        }
    }

    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, a)| (*e + k, a.clone())).collect(),
            hi: self.hi.map(|h| h + k),
            zero: self.zero.clone(),
        }
    }

    /// d/dt: sum i a_i t^(i-1).
    pub fn derivative(&self) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, c) in &self.coeffs {
            if *i == 0 {
                continue;
            }
            coeffs.insert(*i - 1, c.mul_i64(*i));
        }
        LaurentSeries { coeffs, hi: self.hi.map(|h| h - 1), zero: self.zero.clone() }
    }

    /// Inverse of a series whose lowest-order stored coefficient is a unit;
    /// the result is computed for exponents up to `want_hi`.
    pub fn invert_unit(&self, want_hi: i64) -> Result<Self> {
        let m = self.min_exp().ok_or_else(|| {
            Error::PrecisionLoss("inverting a series with no stored coefficients".into())
        })?;
        let lead = self.coeffs.get(&m).expect("min_exp exists");
        let lead_inv = lead.inv().map_err(|_| {
            Error::PrecisionLoss(
                "leading coefficient is zero to precision; cannot invert series".into(),
            )
        })?;
        // single-term series invert exactly
        if self.coeffs.len() == 1 && self.hi.is_none() {
            return Ok(Self::monomial(lead_inv, -m));
        }
        let len_limit = match self.hi {
            None => want_hi + m, // terms c_0 .. c_(want_hi + m)
            Some(h) => (want_hi + m).min(h - m),
        };
        if len_limit < 0 {
            return Err(Error::WindowExhausted(
                "window too small to certify any inverse coefficient".into(),
            ));
        }
        // b = self shifted so that it starts at exponent 0
        let mut cs: Vec<C> = Vec::with_capacity(len_limit as usize + 1);
        cs.push(lead_inv.clone());
        for k in 1..=len_limit {
            // c_k = -lead_inv * sum_{j=1..k} a_{m+j} c_{k-j}
            let mut acc = self.zero.clone();
            for j in 1..=k {
                if let Some(aj) = self.coeffs.get(&(m + j)) {
                    acc = acc.add(&aj.mul(&cs[(k - j) as usize]));
                }
            }
            cs.push(lead_inv.mul(&acc).neg());
        }
        let mut coeffs = BTreeMap::new();
        for (k, c) in cs.into_iter().enumerate() {
            coeffs.insert(-m + k as i64, c);
        }
        let hi = Some(-m + len_limit);
        Ok(LaurentSeries { coeffs, hi, zero: self.zero.clone() })
    }

    /// Compose `self` (a Laurent series in T) with `param` (a series in t
    /// of order >= 1 with invertible linear coefficient), producing a series
    /// in t tracked up to exponent `want_hi`.
    pub fn compose(&self, param: &Self, want_hi: i64) -> Result<Self> {
        let ord = param.min_exp().ok_or_else(|| {
            Error::NotAParameter("parameter change must be a nonzero series".into())
        })?;
        if ord < 1 {
            return Err(Error::NotAParameter(format!(
                "parameter change must have t-order >= 1 (got {ord})"
            )));
        }
        if param
            .coeffs
            .get(&1)
            .map_or(true, |c| c.inv().is_err())
        {
            return Err(Error::NotAParameter(
                "linear coefficient of the new parameter must be a unit".into(),
            ));
        }
        let (lo, hi_stored) = match (self.min_exp(), self.max_stored_exp()) {
            (Some(l), Some(h)) => (l, h),
            _ => return Ok(Self::zero_exact(&self.zero).with_hi(self.hi)),
        };
        // Horner from the top: acc = sum_{j >= lo} f_j T^(j - lo)
        let mut acc = LaurentSeries::constant(self.coeff(hi_stored)?);
        let mut j = hi_stored;
        while j > lo {
            j -= 1;
            acc = acc.mul(param).with_hi(clamp_hi(acc.hi, want_hi + ord));
            acc = acc.add(&LaurentSeries::constant(self.coeff(j)?));
        }
        let mut out = if lo >= 0 {
            let mut powed = acc;
            for _ in 0..lo {
                powed = powed.mul(param).with_hi(clamp_hi(powed.hi, want_hi));
            }
            powed
        } else {
            let pinv = param.invert_unit(want_hi + 2 * (-lo))?;
            let mut powed = acc;
            for _ in 0..(-lo) {
                powed = powed.mul(&pinv).with_hi(clamp_hi(powed.hi, want_hi));
            }
            powed
        };
        // untracked coefficients of a truncated f land at t-order > hi(f)
        if let Some(hf) = self.hi {
            let h = clamp_hi(out.hi, hf);
            out = out.with_hi(h);
        }
        let h = clamp_hi(out.hi, want_hi);
        Ok(out.with_hi(h))
    }

    pub fn map_coeffs<D: Coeff>(&self, zero: D, f: impl Fn(&C) -> Result<D>) -> Result<LaurentSeries<D>> {
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            coeffs.insert(*k, f(c)?);
        }
        Ok(LaurentSeries { coeffs, hi: self.hi, zero })
    }

    pub fn render(&self, var: &str) -> alloc::string::String {
        use alloc::string::ToString;
        if self.coeffs.is_empty() {
            return match self.hi {
                None => "0".to_string(),
                Some(h) => format!("O({var}^{})", h + 1),
            };
        }
        let mut s = alloc::string::String::new();
        for (k, c) in &self.coeffs {
            if !s.is_empty() {
                s.push_str(" + ");
            }
            s.push_str(&format!("({c:?})*{var}^{k}"));
        }
        if let Some(h) = self.hi {
            s.push_str(&format!(" + O({var}^{})", h + 1));
        }
        s
    }
}

fn opt_min(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn clamp_hi(cur: Option<i64>, want: i64) -> Option<i64> {
    Some(cur.map_or(want, |h| h.min(want)))
}

impl<C: Coeff> fmt::Debug for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("t"))
    }
}
