//! Truncations of elements of K{{t}}: doubly-infinite series
//! sum a_i t^i with inf nu(a_i) > -infinity and a_i -> 0 as i -> -infinity.
//!
//! The finite representation carries a dual precision contract:
//! - stored coefficients on a window, each with its own certified p-adic
//!   precision;
//! - a *tail bound*: every omitted coefficient below the stored window has
//!   valuation >= tail (`None` means exactly zero below);
//! - a *top bound*: every omitted coefficient above the stored window has
//!   valuation >= top (`None` means exactly zero above).
//!
//! Multiplication is the convergent double series of the field operation;
//! unknown regions contribute terms of valuation at least
//! (bound of the unknown side) + (global floor of the other factor), which
//! caps the certified precision of every output coefficient. A coefficient
//! whose cap drops below one digit is *window-exhausted* and is refused
//! rather than silently returned.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Rational64;

use crate::coeff::{prec_inf, Coeff};
use crate::err::{Error, Result};

#[derive(Clone)]
pub struct MixedSeries<C: Coeff> {
    coeffs: BTreeMap<i64, C>,
    tail: Option<Rational64>,
    top: Option<Rational64>,
    zero: C,
}

fn opt_min_q(a: Option<Rational64>, b: Option<Rational64>) -> Option<Rational64> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn opt_add(a: Option<Rational64>, b: Rational64) -> Option<Rational64> {
    a.map(|x| x + b)
}

/// Valuation lower bound witnessed by a stored coefficient: its exact
/// valuation when provably nonzero, otherwise its precision bound.
fn coeff_val_floor<C: Coeff>(c: &C) -> Rational64 {
    c.vord().unwrap_or_else(|| c.prec_bound())
}

/// Range-minimum structure over the valuation floors of a series, for
/// position-aware precision caps in products.
struct RegionBounds {
    keys: Vec<i64>,
    /// prefix[i] = min floor over keys[0..=i]
    prefix: Vec<Rational64>,
    /// suffix[i] = min floor over keys[i..]
    suffix: Vec<Rational64>,
    tail: Option<Rational64>,
    top: Option<Rational64>,
}

impl RegionBounds {
    fn of<C: Coeff>(s: &MixedSeries<C>) -> Self {
        let keys: Vec<i64> = s.coeffs.keys().copied().collect();
        let floors: Vec<Rational64> = s.coeffs.values().map(coeff_val_floor).collect();
        let mut prefix = floors.clone();
        for i in 1..prefix.len() {
            prefix[i] = prefix[i].min(prefix[i - 1]);
        }
        let mut suffix = floors;
        for i in (0..suffix.len().saturating_sub(1)).rev() {
            suffix[i] = suffix[i].min(suffix[i + 1]);
        }
        RegionBounds { keys, prefix, suffix, tail: s.tail, top: s.top }
    }

    /// Lower bound for the valuation over exponents <= j0, or `None` when
    /// the series is exactly zero there.
    fn bound_below(&self, j0: i64) -> Option<Rational64> {
        let mut b = self.tail;
        let cnt = self.keys.partition_point(|&k| k <= j0);
        if cnt > 0 {
            b = opt_min_q(b, Some(self.prefix[cnt - 1]));
        }
        if self.keys.last().map_or(true, |&mx| j0 > mx) {
            b = opt_min_q(b, self.top);
        }
        b
    }

    /// Lower bound for the valuation over exponents >= j0, or `None` when
    /// the series is exactly zero there.
    fn bound_above(&self, j0: i64) -> Option<Rational64> {
        let mut b = self.top;
        let start = self.keys.partition_point(|&k| k < j0);
        if start < self.keys.len() {
            b = opt_min_q(b, Some(self.suffix[start]));
        }
        if self.keys.first().map_or(true, |&mn| j0 < mn) {
            b = opt_min_q(b, self.tail);
        }
        b
    }

    fn min_exp(&self) -> Option<i64> {
        self.keys.first().copied()
    }

    fn max_exp(&self) -> Option<i64> {
        self.keys.last().copied()
    }
}

/// Bound on the unknown-region contribution to output exponent `i` of a
/// product: each unknown region of one factor pairs with the complementary
/// exponent range of the other.
fn unknown_contribution_bound(
    i: i64,
    a: &RegionBounds,
    b: &RegionBounds,
) -> Option<Rational64> {
    let mut cap: Option<Rational64> = None;
    let mut fold = |x: Option<Rational64>| {
        if let Some(v) = x {
            cap = opt_min_q(cap, Some(v));
        }
    };
    // a-tail region (r < min_a) meets b at indices > i - min_a
    if let (Some(ta), Some(mn)) = (a.tail, a.min_exp()) {
        if let Some(vb) = b.bound_above(i - mn + 1) {
            fold(Some(ta + vb));
        }
    } else if a.tail.is_some() {
        // no stored support: tail covers everything
        if let Some(vb) = b.bound_above(i64::MIN + 1) {
            fold(Some(a.tail.unwrap() + vb));
        }
    }
    // a-top region (r > max_a) meets b at indices < i - max_a
    if let (Some(ta), Some(mx)) = (a.top, a.max_exp()) {
        if let Some(vb) = b.bound_below(i - mx - 1) {
            fold(Some(ta + vb));
        }
    } else if a.top.is_some() {
        if let Some(vb) = b.bound_below(i64::MAX - 1) {
            fold(Some(a.top.unwrap() + vb));
        }
    }
    if let (Some(tb), Some(mn)) = (b.tail, b.min_exp()) {
        if let Some(va) = a.bound_above(i - mn + 1) {
            fold(Some(tb + va));
        }
    } else if b.tail.is_some() {
        if let Some(va) = a.bound_above(i64::MIN + 1) {
            fold(Some(b.tail.unwrap() + va));
        }
    }
    if let (Some(tb), Some(mx)) = (b.top, b.max_exp()) {
        if let Some(va) = a.bound_below(i - mx - 1) {
            fold(Some(tb + va));
        }
    } else if b.top.is_some() {
        if let Some(va) = a.bound_below(i64::MAX - 1) {
            fold(Some(b.top.unwrap() + va));
        }
    }
    cap
}

impl<C: Coeff> MixedSeries<C> {
    /// Exact series: zero outside the stored support.
    pub fn exact(template: &C, pairs: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, c) in pairs {
            coeffs.insert(i, c);
        }
        MixedSeries { coeffs, tail: None, top: None, zero: template.zero_like() }
    }

    pub fn zero_exact(template: &C) -> Self {
        Self::exact(template, core::iter::empty())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: C, exp: i64) -> Self {
        let zero = c.zero_like();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(exp, c);
        MixedSeries { coeffs, tail: None, top: None, zero }
    }

    /// Truncation with explicit unknown-region bounds.
    pub fn bounded(
        template: &C,
        pairs: impl IntoIterator<Item = (i64, C)>,
        tail: Option<Rational64>,
        top: Option<Rational64>,
    ) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, c) in pairs {
            coeffs.insert(i, c);
        }
        MixedSeries { coeffs, tail, top, zero: template.zero_like() }
    }

    pub fn tail(&self) -> Option<Rational64> {
        self.tail
    }

    pub fn top(&self) -> Option<Rational64> {
        self.top
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

    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero_to_prec())
    }

    /// Whether every coefficient (tracked or not) is exactly described by
    /// the stored window.
    pub fn is_exact(&self) -> bool {
        self.tail.is_none() && self.top.is_none()
    }

    /// Global certified valuation floor over all exponents.
    pub fn floor(&self) -> Rational64 {
        let mut f = prec_inf();
        for c in self.coeffs.values() {
            f = f.min(coeff_val_floor(c));
        }
        if let Some(t) = self.tail {
            f = f.min(t);
        }
        if let Some(t) = self.top {
            f = f.min(t);
        }
        f
    }

    /// Coefficient with certification. Omitted exponents in the unknown
    /// regions yield a zero known to the region bound, but a bound below
    /// one digit is refused as window-exhausted.
    pub fn coeff_checked(&self, i: i64) -> Result<C> {
        if let Some(c) = self.coeffs.get(&i) {
            return Ok(c.clone());
        }
        let region = match (self.min_exp(), self.max_stored_exp()) {
            (Some(lo), Some(hi)) => {
                if i < lo {
                    Some(self.tail)
                } else if i > hi {
                    Some(self.top)
                } else {
                    None // inside the stored window: exactly zero
                }
            }
            _ => Some(opt_min_q(self.tail, self.top)),
        };
        match region {
            None => Ok(self.zero.clone()),
            Some(None) => Ok(self.zero.clone()),
            Some(Some(bound)) => {
                if bound < Rational64::new(1, 1) {
                    Err(Error::WindowExhausted(format!(
                        "coefficient at exponent {i} certified only to valuation >= {bound}; enlarge the window or raise precision"
                    )))
                } else {
                    Ok(self.zero.cap_prec(bound))
                }
            }
        }
    }

    /// Like `coeff_checked` but never fails: returns the capped zero even
    /// when the bound is weak (used internally by ring operations).
    fn side_coeff(&self, i: i64) -> C {
        if let Some(c) = self.coeffs.get(&i) {
            return c.clone();
        }
        let bound = match (self.min_exp(), self.max_stored_exp()) {
            (Some(lo), Some(hi)) => {
                if i < lo {
                    self.tail
                } else if i > hi {
                    self.top
                } else {
                    None
                }
            }
            _ => opt_min_q(self.tail, self.top),
        };
        match bound {
            None => self.zero.clone(),
            Some(b) => self.zero.cap_prec(b),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut coeffs: BTreeMap<i64, C> = BTreeMap::new();
        for k in self.coeffs.keys().chain(rhs.coeffs.keys()) {
            if coeffs.contains_key(k) {
                continue;
            }
            coeffs.insert(*k, self.side_coeff(*k).add(&rhs.side_coeff(*k)));
        }
        MixedSeries {
            coeffs,
            tail: opt_min_q(self.tail, rhs.tail),
            top: opt_min_q(self.top, rhs.top),
            zero: self.zero.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        MixedSeries {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.neg())).collect(),
            tail: self.tail,
            top: self.top,
            zero: self.zero.clone(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let fa = self.floor();
        let fb = rhs.floor();
        let tail = opt_min_q(opt_add(self.tail, fb), opt_add(rhs.tail, fa));
        let top = opt_min_q(opt_add(self.top, fb), opt_add(rhs.top, fa));
        let (mut coeffs, base) = match (
            self.min_exp(),
            self.max_stored_exp(),
            rhs.min_exp(),
            rhs.max_stored_exp(),
        ) {
            (Some(la), Some(ha), Some(lb), Some(hb)) => {
                // dense convolution over the output window
                let lo = la + lb;
                let len = (ha + hb - lo + 1) as usize;
                let mut acc: Vec<Option<C>> = vec![None; len];
                for (ka, ca) in &self.coeffs {
                    for (kb, cb) in &rhs.coeffs {
                        let idx = (ka + kb - lo) as usize;
                        let prod = ca.mul(cb);
                        acc[idx] = Some(match acc[idx].take() {
                            None => prod,
                            Some(prev) => prev.add(&prod),
                        });
                    }
                }
                (acc, lo)
            }
            _ => (Vec::new(), 0),
        };
        // Unknown-region contributions cap each output coefficient, but
        // only where an unknown region of one factor can actually pair
        // with a possibly-nonzero range of the other. Products of exact
        // series need no caps at all.
        let exact = self.is_exact() && rhs.is_exact();
        let bounds = if exact {
            None
        } else {
            Some((RegionBounds::of(self), RegionBounds::of(rhs)))
        };
        let mut out: BTreeMap<i64, C> = BTreeMap::new();
        for (idx, slot) in coeffs.iter_mut().enumerate() {
            if let Some(c) = slot.take() {
                let i = base + idx as i64;
                let c = match &bounds {
                    Some((ba, bb)) => match unknown_contribution_bound(i, ba, bb) {
                        Some(cq) => c.cap_prec(cq),
                        None => c,
                    },
                    None => c,
                };
                out.insert(i, c);
            }
        }
        MixedSeries { coeffs: out, tail, top, zero: self.zero.clone() }
    }

    pub fn scalar_mul(&self, c: &C) -> Self {
        self.mul(&Self::constant(c.clone()))
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        MixedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.mul_i64(k))).collect(),
            tail: self.tail,
            top: self.top,
            zero: self.zero.clone(),
        }
    }

    pub fn shift_t(&self, k: i64) -> Self {
        MixedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e + k, c.clone())).collect(),
            tail: self.tail,
            top: self.top,
            zero: self.zero.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, c) in &self.coeffs {
            if *i == 0 {
                continue;
            }
            coeffs.insert(*i - 1, c.mul_i64(*i));
        }
        MixedSeries { coeffs, tail: self.tail, top: self.top, zero: self.zero.clone() }
    }

    pub fn pow(&self, r: u32) -> Self {
        let mut acc = Self::constant(self.zero.one_like());
        for _ in 0..r {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drop stored coefficients outside [lo, hi], folding their witnessed
    /// valuations into the corresponding unknown-region bounds.
    pub fn truncate_window(&self, lo: i64, hi: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        let mut tail = self.tail;
        let mut top = self.top;
        for (k, c) in &self.coeffs {
            if *k < lo {
                tail = opt_min_q(tail, Some(coeff_val_floor(c)));
            } else if *k > hi {
                top = opt_min_q(top, Some(coeff_val_floor(c)));
            } else {
                coeffs.insert(*k, c.clone());
            }
        }
        MixedSeries { coeffs, tail, top, zero: self.zero.clone() }
    }

    pub fn truncate_below(&self, lo: i64) -> Self {
        self.truncate_window(lo, i64::MAX)
    }

    /// Cap certified p-adic knowledge everywhere at `bound` (stored
    /// precisions and both region bounds), after truncating a convergent
    /// sum whose omitted terms have valuation >= `bound`.
    pub fn cap_all(&self, bound: Rational64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| (*k, c.cap_prec(bound)))
            .collect();
        MixedSeries {
            coeffs,
            tail: Some(opt_min_q(self.tail, Some(bound)).expect("bounded")),
            top: Some(opt_min_q(self.top, Some(bound)).expect("bounded")),
            zero: self.zero.clone(),
        }
    }

    /// Certified `nu(f) >= r` where nu is the K{{t}} valuation
    /// inf_i nu_K(a_i).
    pub fn val_at_least(&self, r: Rational64) -> bool {
        let stored_ok = self.coeffs.values().all(|c| c.val_at_least(r));
        let tail_ok = self.tail.map_or(true, |t| t >= r);
        let top_ok = self.top.map_or(true, |t| t >= r);
        stored_ok && tail_ok && top_ok
    }

    pub fn is_integral(&self) -> bool {
        self.val_at_least(Rational64::new(0, 1))
    }

    /// The t-order of the reduction in the residue-field Laurent series:
    /// the smallest exponent whose coefficient is a unit. Requires
    /// everything below to be certified of valuation >= 1.
    pub fn reduction_order(&self) -> Result<i64> {
        if self.tail.map_or(false, |t| t < Rational64::new(1, 1)) {
            return Err(Error::PrecisionLoss(
                "tail bound below 1: reduction not determined by the stored window".into(),
            ));
        }
        for (k, c) in &self.coeffs {
            match c.vord() {
                Some(v) if v == Rational64::new(0, 1) => return Ok(*k),
                _ => {
                    if !c.val_at_least(Rational64::new(1, 1)) {
                        return Err(Error::PrecisionLoss(format!(
                            "coefficient at exponent {k} is neither a certified unit nor certified of valuation >= 1"
                        )));
                    }
                }
            }
        }
        Err(Error::PrecisionLoss(
            "no unit coefficient in the stored window; reduction order not visible".into(),
        ))
    }

    /// Inverse of a unit (nu = 0 with unit leading reduced coefficient).
    ///
    /// Splits t^(-m) f = b_+ + b_- with b_+ an invertible power series and
    /// nu(b_-) >= 1 supported on negative exponents, inverts b_+ by the
    /// power-series recursion, and sums the geometric series in
    /// x = b_+^{-1} b_-, which converges one p-digit per term. `prec`
    /// bounds the number of geometric terms; `lo_window` bounds how far
    /// down exponents are tracked.
    pub fn invert(&self, prec: i64, lo_window: i64) -> Result<Self> {
        let hi_window = lo_window.checked_neg().unwrap_or(i64::MAX).max(
            self.max_stored_exp().unwrap_or(0) + prec,
        );
        self.invert_windowed(prec, lo_window, hi_window)
    }

    /// Like `invert`, with an explicit top truncation for the tracked
    /// window; stored values folded away land in the top bound, which the
    /// position-aware product caps keep out of in-window coefficients.
    pub fn invert_windowed(&self, prec: i64, lo_window: i64, hi_window: i64) -> Result<Self> {
        if !self.val_at_least(Rational64::new(0, 1)) {
            return Err(Error::PrecisionLoss(
                "invert requires an integral series with unit reduction; factor out powers of p and t first"
                    .into(),
            ));
        }
        let m = self.reduction_order()?;
        let shifted = self.shift_t(-m);
        let mut plus = BTreeMap::new();
        let mut minus = BTreeMap::new();
        for (k, c) in &shifted.coeffs {
            if *k >= 0 {
                plus.insert(*k, c.clone());
            } else {
                minus.insert(*k, c.clone());
            }
        }
        let b_plus = MixedSeries {
            coeffs: plus,
            tail: None,
            top: shifted.top,
            zero: self.zero.clone(),
        };
        let has_minus = !minus.is_empty() || shifted.tail.is_some();
        // the minus part is complete above its stored support and certified
        // of valuation >= 1 throughout
        let b_minus = MixedSeries {
            coeffs: minus,
            tail: shifted.tail,
            top: None,
            zero: self.zero.clone(),
        };
        // compute enough inverse coefficients that the unknown top region
        // cannot reach back into the tracked window through the geometric
        // tail terms
        let hi_budget = match shifted.top {
            Some(_) => shifted.max_stored_exp().unwrap_or(0),
            None => shifted
                .max_stored_exp()
                .unwrap_or(0)
                .max(prec)
                .max(lo_window.checked_neg().unwrap_or(0)),
        };
        let p_inv = b_plus.ps_invert(hi_budget)?;
        if !has_minus {
            return Ok(p_inv.shift_t(-m));
        }
        let x = p_inv.mul(&b_minus).truncate_window(lo_window, hi_window);
        let mut acc = Self::constant(self.zero.one_like());
        let mut power = Self::constant(self.zero.one_like());
        let neg_x = x.neg();
        for _ in 1..=prec.max(0) {
            power = power.mul(&neg_x).truncate_window(lo_window, hi_window);
            if power.is_zero_to_prec() && power.floor() >= Rational64::new(prec, 1) {
                break;
            }
            acc = acc.add(&power);
        }
        let geo = acc.cap_all(Rational64::new(prec, 1));
        Ok(geo
            .mul(&p_inv)
            .shift_t(-m)
            .truncate_window(lo_window, hi_window))
    }

    /// Power-series inversion (unit constant term, no negative exponents).
    /// Integrality of the input guarantees an integral inverse, so the
    /// untracked coefficients above the computed budget carry a top bound
    /// of zero rather than nothing.
    fn ps_invert(&self, want_hi: i64) -> Result<Self> {
        debug_assert!(self.min_exp().map_or(true, |m| m >= 0));
        let lead = self
            .coeffs
            .get(&0)
            .ok_or_else(|| Error::PrecisionLoss("power series with no constant term".into()))?;
        let lead_inv = lead.inv()?;
        if self.coeffs.len() == 1 && self.is_exact() {
            return Ok(Self::constant(lead_inv));
        }
        let limit = want_hi.max(0);
        let mut cs: Vec<C> = Vec::with_capacity(limit as usize + 1);
        cs.push(lead_inv.clone());
        for k in 1..=limit {
            let mut acc = self.zero.clone();
            for j in 1..=k {
                let aj = self.side_coeff(j);
                acc = acc.add(&aj.mul(&cs[(k - j) as usize]));
            }
            cs.push(lead_inv.mul(&acc).neg());
        }
        let mut coeffs = BTreeMap::new();
        for (k, c) in cs.into_iter().enumerate() {
            coeffs.insert(k as i64, c);
        }
        Ok(MixedSeries {
            coeffs,
            tail: None,
            top: Some(Rational64::new(0, 1)),
            zero: self.zero.clone(),
        })
    }

    /// Compose with a first local parameter: `self` is a series in T, and
    /// `param` expresses T as a series in t (reduction order one). Returns
    /// the expansion in t.
    pub fn compose(&self, param: &Self, prec: i64, lo_window: i64, hi_window: i64) -> Result<Self> {
        let ord = param.reduction_order().map_err(|_| {
            Error::NotAParameter(
                "new parameter must have a certified unit linear coefficient".into(),
            )
        })?;
        if ord != 1 {
            return Err(Error::NotAParameter(format!(
                "first local parameter must reduce to a uniformiser (reduction order 1, got {ord})"
            )));
        }
        let (lo, hi_stored) = match (self.min_exp(), self.max_stored_exp()) {
            (Some(l), Some(h)) => (l, h),
            _ => return Ok(Self::zero_exact(&self.zero)),
        };
        let clamp =
            |s: MixedSeries<C>| -> MixedSeries<C> { s.truncate_window(lo_window, hi_window) };
        let mut acc = Self::constant(self.coeff_checked(hi_stored)?);
        let mut j = hi_stored;
        while j > lo {
            j -= 1;
            acc = clamp(acc.mul(param));
            acc = acc.add(&Self::constant(self.coeff_checked(j)?));
        }
        let out = if lo >= 0 {
            let mut powed = acc;
            for _ in 0..lo {
                powed = clamp(powed.mul(param));
            }
            powed
        } else {
            let pinv = param.invert(prec, lo_window + 2 * lo)?;
            let mut powed = acc;
            for _ in 0..(-lo) {
                powed = clamp(powed.mul(&pinv));
            }
            powed
        };
        Ok(out)
    }

    pub fn map_coeffs<D: Coeff>(
        &self,
        zero: D,
        f: impl Fn(&C) -> Result<D>,
    ) -> Result<MixedSeries<D>> {
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            coeffs.insert(*k, f(c)?);
        }
        Ok(MixedSeries { coeffs, tail: self.tail, top: self.top, zero })
    }

    pub fn render(&self, var: &str) -> alloc::string::String {
        use alloc::string::ToString;
        let mut s = alloc::string::String::new();
        if self.coeffs.is_empty() {
            s.push_str("0");
        }
        for (k, c) in &self.coeffs {
            if !s.is_empty() {
                s.push_str(" + ");
            }
            s.push_str(&format!("({c:?})*{var}^{k}"));
        }
        if let Some(t) = self.tail {
            s.push_str(&format!(" [tail nu>={t}]"));
        }
        if let Some(t) = self.top {
            s.push_str(&format!(" [top nu>={t}]"));
        }
        s.to_string()
    }
}

impl<C: Coeff> fmt::Debug for MixedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("t"))
    }
}

/// Truncated power series over O_K form the ring B = O_K[[t]] used by the
/// Weierstrass and surface machinery; they are plain `MixedSeries` with
/// non-negative support, and implement `Coeff` so B itself can serve as a
/// coefficient ring (for A = B[x]/(F)).
impl<C: Coeff> Coeff for MixedSeries<C> {
    fn add(&self, rhs: &Self) -> Self {
        MixedSeries::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        MixedSeries::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        MixedSeries::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        MixedSeries::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        let prec = self
            .iter()
            .map(|(_, c)| c.prec_bound())
            .min()
            .unwrap_or_else(prec_inf)
            .ceil()
            .to_integer()
            .clamp(8, 256);
        let lo = self.min_exp().unwrap_or(0) - prec;
        self.invert(prec, lo)
    }
    fn zero_like(&self) -> Self {
        Self::zero_exact(&self.zero)
    }
    fn one_like(&self) -> Self {
        Self::constant(self.zero.one_like())
    }
    fn mul_i64(&self, k: i64) -> Self {
        MixedSeries::mul_i64(self, k)
    }
    fn is_zero_to_prec(&self) -> bool {
        MixedSeries::is_zero_to_prec(self)
    }
    fn vord(&self) -> Option<Rational64> {
        self.coeffs.values().filter_map(|c| c.vord()).min()
    }
    fn prec_bound(&self) -> Rational64 {
        let stored = self
            .coeffs
            .values()
            .map(|c| c.prec_bound())
            .min()
            .unwrap_or_else(prec_inf);
        stored
            .min(self.tail.unwrap_or_else(prec_inf))
            .min(self.top.unwrap_or_else(prec_inf))
    }
    fn cap_prec(&self, cap: Rational64) -> Self {
        self.cap_all(cap)
    }
    fn val_at_least(&self, r: Rational64) -> bool {
        MixedSeries::val_at_least(self, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicApprox;

    const N: i64 = 16;

    fn q(z: i64) -> PadicApprox {
        PadicApprox::from_i64(5, z, N)
    }

    fn series(pairs: &[(i64, i64)]) -> MixedSeries<PadicApprox> {
        MixedSeries::exact(&q(0), pairs.iter().map(|(e, c)| (*e, q(*c))))
    }

    #[test]
    fn t_times_t_inverse_is_exactly_one() {
        let t = series(&[(1, 1)]);
        let tinv = t.invert(N, -64).unwrap();
        let one = t.mul(&tinv);
        assert!(one.coeff_checked(0).unwrap().eq_to_min_prec(&q(1)));
        assert!(one.is_exact());
    }

    #[test]
    fn field_valuation_examples() {
        // nu(p t^-3 + t^2) = 0
        let s = series(&[(-3, 5), (2, 1)]);
        assert!(s.val_at_least(Rational64::new(0, 1)));
        assert!(!s.val_at_least(Rational64::new(1, 1)));
        assert_eq!(s.reduction_order().unwrap(), 2);
    }

    #[test]
    fn telescoping_inverse() {
        // (sum_{i>=0} p^i t^-i) * (1 - p t^-1) = 1 to precision 6
        let p = 5i64;
        let mut pairs = Vec::new();
        let mut c = 1i64;
        for i in 0..6 {
            pairs.push((-i, q(c)));
            c *= p;
        }
        let a = MixedSeries::bounded(&q(0), pairs, Some(Rational64::new(6, 1)), None);
        let b = series(&[(0, 1), (-1, -5)]);
        let prod = a.mul(&b);
        let c0 = prod.coeff_checked(0).unwrap();
        assert!(c0.sub(&q(1)).is_zero_to_prec());
        for k in -5..0 {
            assert!(prod.coeff_checked(k).unwrap().is_zero_to_prec());
        }
        // the unknown tail of `a` cannot reach exponent 0, because the
        // other factor is exactly zero above t^0: full precision survives
        assert_eq!(c0.precision(), N);
    }

    #[test]
    fn inversion_of_unit_with_negative_part() {
        // u = 1 + p t^-1: inverse satisfies u * u^{-1} = 1 to precision
        let u = series(&[(0, 1), (-1, 5)]);
        let inv = u.invert(N, -40).unwrap();
        let prod = u.mul(&inv);
        let c0 = prod.coeff_checked(0).unwrap();
        assert!(c0.sub(&q(1)).is_zero_to_prec());
        assert!(c0.precision() >= N - 1);
        for k in [-3i64, -2, -1] {
            assert!(prod.coeff_checked(k).unwrap().is_zero_to_prec());
        }
    }

    #[test]
    fn convergent_sums_preserve_window_knowledge() {
        // adding a term with a weak top bound but high valuation floor must
        // not destroy certified knowledge of high exponents
        let base = series(&[(0, 1), (3, 2)]);
        let tiny = MixedSeries::bounded(
            &q(0),
            [(-1i64, q(125))],
            Some(Rational64::new(3, 1)),
            Some(Rational64::new(3, 1)),
        );
        let sum = base.add(&tiny);
        let c3 = sum.coeff_checked(3).unwrap();
        assert!(c3.sub(&q(2)).is_zero_to_prec());
        assert_eq!(c3.precision(), 3);
    }

    #[test]
    fn mixed_mul_commutative_and_associative() {
        let a = series(&[(-2, 5), (0, 2), (3, 1)]);
        let b = series(&[(-1, 10), (1, 3)]);
        let c = series(&[(0, 1), (2, 5)]);
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        for k in -4..=5 {
            assert!(ab
                .coeff_checked(k)
                .unwrap()
                .eq_to_min_prec(&ba.coeff_checked(k).unwrap()));
        }
        let l = a.mul(&b).mul(&c);
        let r = a.mul(&b.mul(&c));
        for k in -4..=6 {
            assert!(l
                .coeff_checked(k)
                .unwrap()
                .eq_to_min_prec(&r.coeff_checked(k).unwrap()));
        }
    }

    #[test]
    fn derivative_and_shift() {
        let s = series(&[(-1, 3), (2, 4)]);
        let d = s.derivative();
        assert!(d.coeff_checked(-2).unwrap().eq_to_min_prec(&q(-3)));
        assert!(d.coeff_checked(1).unwrap().eq_to_min_prec(&q(8)));
    }

    #[test]
    fn window_exhaustion_is_an_error_not_a_silent_zero() {
        let s = MixedSeries::bounded(
            &q(0),
            [(0i64, q(1))],
            Some(Rational64::new(0, 1)),
            None,
        );
        assert!(matches!(s.coeff_checked(-3), Err(Error::WindowExhausted(_))));
    }
}
