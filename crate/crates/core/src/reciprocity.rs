//! Height-one primes of B = O_K[[T]], per-prime residues of forms over
//! Frac B, and the sum-zero reciprocity verification, including presented
//! finite extensions A = B[x]/(F) via trace.
//!
//! The height-one primes are the constant prime (pi_K) and the primes
//! generated by Weierstrass polynomials. At a Weierstrass prime h the
//! completion is k_y((u)) with u = t - theta; the residue is computed over
//! the etale algebra K[x]/(h) and traced to K, which aggregates the
//! per-prime residues over all primes dividing h without ever factoring h.
//! At the constant prime the completion is K{{t}}; 1/h^r is expanded there
//! by flipping its expansion at infinity, and the residue carries the
//! mixed-characteristic -1 twist.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_rational::Rational64;

use crate::coeff::Coeff;
use crate::err::{Error, Result};
use crate::fields::LocalFieldDesc;
use crate::polyquot;
use crate::prng::{int_in, Prng};
use crate::residues::{KElt, MxSeries, Params};
use crate::series::{expand_at_root, flip_expand, is_weierstrass, weierstrass_divide, EtaleElt, MixedSeries};

/// A monic polynomial over O_K whose non-leading coefficients lie in the
/// maximal ideal: a generator of a non-constant height-one prime.
#[derive(Debug, Clone)]
pub struct WeierstrassPoly {
    coeffs: Vec<KElt>,
}

impl WeierstrassPoly {
    pub fn new(coeffs: Vec<KElt>) -> Result<Self> {
        if coeffs.len() < 2 || coeffs.len() > 5 {
            return Err(Error::Shape(
                "weierstrass polynomials are supported up to degree 4".into(),
            ));
        }
        if !is_weierstrass(&coeffs) {
            return Err(Error::Shape(
                "prime generator must be monic with non-leading coefficients of valuation >= 1"
                    .into(),
            ));
        }
        Ok(WeierstrassPoly { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[KElt] {
        &self.coeffs
    }

    /// Deterministic ordering key: degree, then coefficient lifts.
    fn sort_key(&self) -> (usize, Vec<BigUint>) {
        let lifts = self
            .coeffs
            .iter()
            .map(|c| {
                c.coords()
                    .iter()
                    .map(|a| a.lift_mod(a.precision().min(48)).unwrap_or_default())
                    .fold(BigUint::default(), |acc, x| acc * 1000003u64 + x)
            })
            .collect();
        (self.degree(), lifts)
    }

    /// Structural equality of the defining data at the stored precision.
    pub fn same_as(&self, other: &Self) -> bool {
        self.degree() == other.degree()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.sub(b).is_zero_to_prec())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if !s.is_empty() {
                s.push_str(" + ");
            }
            s.push_str(&format!("({c:?})t^{i}"));
        }
        s
    }
}

/// A height-one prime of O_K[[T]].
#[derive(Debug, Clone)]
pub enum PrimeSite {
    /// The prime generated by pi_K; completion K{{t}}.
    Constant,
    /// The prime(s) dividing a Weierstrass polynomial; completion(s)
    /// aggregated through the etale algebra K[x]/(h).
    Weierstrass(WeierstrassPoly),
}

impl PrimeSite {
    pub fn render(&self) -> String {
        match self {
            PrimeSite::Constant => "(pi_K)".into(),
            PrimeSite::Weierstrass(h) => format!("({})", h.render()),
        }
    }
}

/// One term pi_K^n * g / h^r of a differential form g', always relative to
/// dT; `pole: None` encodes r = 0 (h = 1).
#[derive(Debug, Clone)]
pub struct FormTerm {
    pub pi_exp: i64,
    /// Power series over O_K on a window [0, H].
    pub numerator: MxSeries,
    pub pole: Option<(WeierstrassPoly, u32)>,
}

/// A differential form over Frac B presented as a finite sum of terms
/// pi^n g/h^r dT.
#[derive(Debug, Clone)]
pub struct FormOverB {
    pub terms: Vec<FormTerm>,
}

impl FormOverB {
    pub fn new(terms: Vec<FormTerm>) -> Result<Self> {
        for t in &terms {
            if t.numerator.min_exp().map_or(false, |m| m < 0) {
                return Err(Error::Shape("term numerators must be power series".into()));
            }
            if let Some((_, r)) = &t.pole {
                if *r == 0 {
                    return Err(Error::Shape("pole order 0 must be encoded as pole: None".into()));
                }
            }
        }
        Ok(FormOverB { terms })
    }

    /// d(h)/h for a Weierstrass polynomial: the logarithmic-derivative form.
    pub fn d_log(h: &WeierstrassPoly) -> Self {
        let template = h.coeffs[0].zero_like();
        let deriv = polyquot::poly_derivative(&h.coeffs);
        let numerator = MixedSeries::exact(
            &template,
            deriv.into_iter().enumerate().map(|(i, c)| (i as i64, c)),
        );
        FormOverB {
            terms: vec![FormTerm { pi_exp: 0, numerator, pole: Some((h.clone(), 1)) }],
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        FormOverB { terms }
    }
}

/// The distinct Weierstrass sites appearing with a pole, plus the constant
/// prime. Residues vanish identically at every other prime.
pub fn relevant_primes(form: &FormOverB) -> Vec<PrimeSite> {
    let mut sites: Vec<WeierstrassPoly> = Vec::new();
    for t in &form.terms {
        if let Some((h, _)) = &t.pole {
            if !sites.iter().any(|s| s.same_as(h)) {
                sites.push(h.clone());
            }
        }
    }
    sites.sort_by_key(|h| h.sort_key());
    let mut out = vec![PrimeSite::Constant];
    out.extend(sites.into_iter().map(PrimeSite::Weierstrass));
    out
}

fn dense_numerator(term: &FormTerm, pi: &KElt) -> Result<(Vec<KElt>, bool)> {
    let top = term.numerator.max_stored_exp().unwrap_or(0);
    let scale = pi.pow_i64(term.pi_exp)?;

    let mut g = Vec::with_capacity(top as usize + 1);
    for i in 0..=top {
        g.push(term.numerator.coeff_checked(i)?.mul(&scale));
    }
    Ok((g, term.numerator.is_exact()))
}

/// Residue of a form at a Weierstrass site: the u^{-1} coefficient of the
/// expansion in K[x]/(h)((u)), and its trace RRes down to K. Terms with a
/// coprime (or absent) pole are regular at the site and contribute exactly
/// zero; coprimality is verified by inverting their denominators at theta.
pub fn rres_at_weierstrass(
    form: &FormOverB,
    site: &WeierstrassPoly,
    params: &Params,
) -> Result<(EtaleElt<KElt>, KElt)> {
    let field = site.coeffs[0].field().clone();
    // the uniformiser is exact; carry enough digits that pi^n scaling does
    // not limit the certified output precision
    let max_n = form.terms.iter().map(|t| t.pi_exp.abs()).max().unwrap_or(0);
    let pi = field.uniformizer(params.prec + 2 * max_n + 8);
    let alg = crate::series::EtaleAlgebra::new(site.coeffs.clone())?;
    let theta = alg.theta();
    let mut res = alg.zero();
    for term in &form.terms {
        match &term.pole {
            Some((h, r)) if h.same_as(site) => {
                let (g, g_exact) = dense_numerator(term, &pi)?;
                if g.is_empty() {
                    continue;
                }
                let expansion = expand_at_root(&g, g_exact, &site.coeffs, *r, 0)?;
                res = res.add(&expansion.coeff(-1)?);
            }
            Some((h, _)) => {
                // regular at this site if the denominators are coprime;
                // verify and contribute exactly zero
                let h_emb: Vec<EtaleElt<KElt>> =
                    h.coeffs.iter().map(|c| alg.from_scalar(c.clone())).collect();
                let at_theta = polyquot::poly_eval(&h_emb, &theta);
                at_theta.inv().map_err(|_| {
                    Error::Presentation(format!(
                        "denominators {} and {} share a factor to precision; present the form with coprime poles",
                        h.render(),
                        site.render()
                    ))
                })?;
            }
            None => {}
        }
    }
    let rres = res.trace();
    Ok((res, rres))
}

/// Residue of a form at the constant prime (pi_K): flip every pole into
/// K{{t}}, multiply by the numerator, and take the twisted t^{-1}
/// coefficient. The coefficient field there is K itself, so RRes = res.
pub fn rres_at_constant(form: &FormOverB, params: &Params) -> Result<KElt> {
    let template = match form.terms.first() {
        Some(t) => t.numerator.template().clone(),
        None => {
            return Err(Error::Shape("empty form".into()));
        }
    };
    let field = template.field().clone();
    let max_n = form.terms.iter().map(|t| t.pi_exp.abs()).max().unwrap_or(0);
    let pi = field.uniformizer(params.prec + 2 * max_n + 8);
    let mut total = template.zero_like();
    for term in &form.terms {
        let series = match &term.pole {
            None => term.numerator.clone(),
            Some((h, r)) => {
                let flip = flip_expand(&h.coeffs, *r, params.prec, params.lo)
                    .map_err(|e| match e {
                        Error::WindowExhausted(m) => Error::WindowExhausted(format!(
                            "term with pole {} at order {}: {m}",
                            h.render(),
                            r
                        )),
                        other => other,
                    })?;
                term.numerator.mul(&flip)
            }
        };
        let scale = pi.pow_i64(term.pi_exp)?;
        let c = series.coeff_checked(-1).map_err(|e| match e {
            Error::WindowExhausted(m) => Error::WindowExhausted(format!(
                "constant-prime residue of a term with pole {:?}: {m}",
                term.pole.as_ref().map(|(h, r)| format!("{}^{r}", h.render()))
            )),
            other => other,
        })?;
        total = total.add(&c.mul(&scale));
    }
    Ok(total.neg())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LedgerEntry {
    pub site: PrimeSite,
    /// The coefficient field/algebra k_y at the site.
    pub coeff_field: String,
    /// Residue in the coefficient algebra at the site, rendered.
    pub res_rendered: String,
    /// Trace of the residue down to K.
    pub rres: KElt,
    pub certified_prec: Rational64,
}

#[derive(Debug, Clone)]
pub struct ResidueLedger {
    pub entries: Vec<LedgerEntry>,
    pub total: KElt,
    pub threshold: i64,
    pub verdict: Verdict,
}

impl ResidueLedger {
    /// The verdict is always recomputed from the total.
    fn conclude(entries: Vec<LedgerEntry>, total: KElt, threshold: i64) -> Self {
        let verdict = vanishing_verdict(&total, threshold);
        ResidueLedger { entries, total, threshold, verdict }
    }
}

/// PASS when nu(total) >= threshold is certified, FAIL when the total is
/// provably nonzero below it, INCONCLUSIVE when the precision cannot tell.
pub fn vanishing_verdict(total: &KElt, threshold: i64) -> Verdict {
    let t = Rational64::new(threshold, 1);
    if Coeff::val_at_least(total, t) {
        Verdict::Pass
    } else if total.is_zero_to_prec() {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

/// Draw a random Weierstrass polynomial coprime to the given sites, for the
/// irrelevant-prime spot check.
pub fn random_irrelevant_prime(
    field: &Arc<LocalFieldDesc>,
    avoid: &[WeierstrassPoly],
    rng: &mut Prng,
    prec: i64,
) -> Result<WeierstrassPoly> {
    let p = field.p() as i64;
    'outer: for _ in 0..64 {
        let deg = int_in(rng, 1, 3) as usize;
        let mut coeffs = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            let digits = int_in(rng, 0, p.pow(2) - 1);
            coeffs.push(field.from_i64(p * digits, prec));
        }
        // constant term must be a nonzero multiple of p for a bona fide prime
        if coeffs[0].is_zero_to_prec() {
            coeffs[0] = field.from_i64(p, prec);
        }
        coeffs.push(field.one(prec));
        let cand = WeierstrassPoly::new(coeffs)?;
        // coprimality against the avoided sites
        let alg = crate::series::EtaleAlgebra::new(cand.coeffs.clone())?;
        let theta = alg.theta();
        for h in avoid {
            let h_emb: Vec<EtaleElt<KElt>> =
                h.coeffs.iter().map(|c| alg.from_scalar(c.clone())).collect();
            if polyquot::poly_eval(&h_emb, &theta).inv().is_err() {
                continue 'outer;
            }
        }
        return Ok(cand);
    }
    Err(Error::PrecisionLoss(
        "could not draw an irrelevant prime coprime to the form's poles".into(),
    ))
}

/// Verify the reciprocity sum for a form over B: the ledger lists the
/// residue at the constant prime, at each pole site, and at one randomly
/// chosen irrelevant Weierstrass prime (whose residue is verified zero).
/// The verdict certifies nu(sum) >= threshold.
pub fn reciprocity_check(form: &FormOverB, params: &Params) -> Result<ResidueLedger> {
    let template = form
        .terms
        .first()
        .map(|t| t.numerator.template().clone())
        .ok_or_else(|| Error::Shape("empty form".into()))?;
    let field = template.field().clone();
    let sites = relevant_primes(form);
    let mut entries = Vec::new();
    let mut total = template.zero_like();
    for site in &sites {
        let entry = match site {
            PrimeSite::Constant => {
                let rres = rres_at_constant(form, params)?;
                LedgerEntry {
                    site: site.clone(),
                    coeff_field: "K".into(),
                    res_rendered: format!("{rres:?} (twisted)"),
                    certified_prec: Coeff::prec_bound(&rres),
                    rres,
                }
            }
            PrimeSite::Weierstrass(h) => {
                let (res, rres) = rres_at_weierstrass(form, h, params)?;
                LedgerEntry {
                    site: site.clone(),
                    coeff_field: format!("K[x]/({})", h.render()),
                    res_rendered: format!("{res:?}"),
                    certified_prec: Coeff::prec_bound(&rres),
                    rres,
                }
            }
        };
        total = total.add(&entry.rres);
        entries.push(entry);
    }
    // spot-check one irrelevant prime: residues there vanish identically
    let avoid: Vec<WeierstrassPoly> = sites
        .iter()
        .filter_map(|s| match s {
            PrimeSite::Weierstrass(h) => Some(h.clone()),
            PrimeSite::Constant => None,
        })
        .collect();
    let mut rng = crate::prng::substream(params.seed, 0x72656369);
    let spot = random_irrelevant_prime(&field, &avoid, &mut rng, params.prec)?;
    let (res, rres) = rres_at_weierstrass(form, &spot, params)?;
    if !rres.is_zero_to_prec() {
        return Err(Error::Disagreement(format!(
            "residue at the irrelevant prime {} is nonzero",
            spot.render()
        )));
    }
    entries.push(LedgerEntry {
        site: PrimeSite::Weierstrass(spot.clone()),
        coeff_field: format!("K[x]/({})", spot.render()),
        res_rendered: format!("{res:?} (irrelevant spot check)"),
        certified_prec: Coeff::prec_bound(&rres),
        rres,
    });
    Ok(ResidueLedger::conclude(entries, total, params.threshold))
}

/// A = B[x]/(F) presented by a monic polynomial with power-series
/// coefficients; separability is certified by a nonzero discriminant.
#[derive(Debug, Clone)]
pub struct ExtensionOverB {
    f_coeffs: Vec<MxSeries>,
}

impl ExtensionOverB {
    pub fn new(f_coeffs: Vec<MxSeries>) -> Result<Self> {
        let n = f_coeffs.len() - 1;
        if n < 1 {
            return Err(Error::Shape("extension polynomial must have degree >= 1".into()));
        }
        let lead = f_coeffs.last().unwrap();
        let one = lead.one_like();
        if !lead.sub(&one).is_zero_to_prec() {
            return Err(Error::Shape("extension polynomial must be monic".into()));
        }
        for c in &f_coeffs {
            if c.min_exp().map_or(false, |m| m < 0) {
                return Err(Error::Shape("extension coefficients must be power series".into()));
            }
        }
        let ext = ExtensionOverB { f_coeffs };
        let disc = ext.discriminant_norm();
        if disc.is_zero_to_prec() {
            return Err(Error::InseparableToPrecision(
                "discriminant of the extension polynomial vanishes to precision".into(),
            ));
        }
        Ok(ext)
    }

    pub fn degree(&self) -> usize {
        self.f_coeffs.len() - 1
    }

    pub fn f_coeffs(&self) -> &[MxSeries] {
        &self.f_coeffs
    }

    /// Norm of F'(x) in B[x]/(F): equal to the discriminant up to sign.
    pub fn discriminant_norm(&self) -> MxSeries {
        let deriv = polyquot::poly_derivative(&self.f_coeffs);
        let reduced = polyquot::poly_rem_monic(deriv, &self.f_coeffs);
        let mat = polyquot::mult_matrix(&reduced, &self.f_coeffs);
        polyquot::det_cofactor(&mat)
    }

    /// Power sums Tr(x^i) in B for i = 0..deg-1, via multiplication-matrix
    /// traces.
    pub fn power_sums(&self) -> Vec<MxSeries> {
        let n = self.degree();
        let template = self.f_coeffs[0].zero_like();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut xi = vec![template.clone(); n];
            if i < n {
                xi[i] = template.one_like();
            }
            out.push(polyquot::trace_in_quotient(&xi, &self.f_coeffs));
        }
        out
    }
}

/// Trace a form over Frac A, given as a polynomial-in-x coefficient vector
/// of term lists, to a form over B: Tr(sum_i c_i x^i) = sum_i c_i Tr(x^i)
/// with Tr(x^i) in B computed once from the presentation.
pub fn trace_form_over_b(omega: &[FormOverB], ext: &ExtensionOverB) -> Result<FormOverB> {
    if omega.len() > ext.degree() {
        return Err(Error::Presentation(format!(
            "coefficient vector of length {} over an extension of degree {}",
            omega.len(),
            ext.degree()
        )));
    }
    let sums = ext.power_sums();
    let mut terms = Vec::new();
    for (i, ci) in omega.iter().enumerate() {
        for term in &ci.terms {
            let numerator = term.numerator.mul(&sums[i]);
            terms.push(FormTerm {
                pi_exp: term.pi_exp,
                numerator,
                pole: term.pole.clone(),
            });
        }
    }
    FormOverB::new(terms)
}

/// Reciprocity for a form over Frac A through the B-side identity: the sum
/// of RRes over B-primes of the traced form equals the sum over A-primes,
/// so its vanishing certifies the extension reciprocity law.
pub fn reciprocity_check_extension(
    omega: &[FormOverB],
    ext: &ExtensionOverB,
    params: &Params,
) -> Result<ResidueLedger> {
    let traced = trace_form_over_b(omega, ext)?;
    if traced.terms.is_empty() {
        return Err(Error::Shape("traced form is empty".into()));
    }
    reciprocity_check(&traced, params)
}

/// Division of g by h^r inside B, used by the partial-fraction invariance
/// tests: replacing g by g + q h^r must not change the residue at h.
pub fn shift_numerator_by_multiple(
    term: &FormTerm,
    q_poly: &[KElt],
) -> Result<FormTerm> {
    let (h, r) = term
        .pole
        .as_ref()
        .ok_or_else(|| Error::Shape("term has no pole".into()))?;
    let template = term.numerator.template().clone();
    let mut hr = MixedSeries::constant(template.one_like());
    for _ in 0..*r {
        hr = hr.mul(&crate::series::poly_to_series(&h.coeffs, &template));
    }
    let q = MixedSeries::exact(
        &template,
        q_poly.iter().enumerate().map(|(i, c)| (i as i64, c.clone())),
    );
    Ok(FormTerm {
        pi_exp: term.pi_exp,
        numerator: term.numerator.add(&q.mul(&hr)),
        pole: term.pole.clone(),
    })
}

/// Check that a remainder-free division certificate holds: used by tests
/// that reduce x^2-type numerators through the extension polynomial.
pub fn divide_exactly(f: &MxSeries, h: &WeierstrassPoly, prec: i64) -> Result<MxSeries> {
    let (q, r) = weierstrass_divide(f, &h.coeffs, prec)?;
    for c in &r {
        if !c.is_zero_to_prec() {
            return Err(Error::Disagreement("division was not exact".into()));
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: i64 = 16;

    fn qp() -> Arc<LocalFieldDesc> {
        LocalFieldDesc::qp(5)
    }

    fn kelt(z: i64) -> KElt {
        qp().from_i64(z, N)
    }

    fn series(pairs: &[(i64, i64)]) -> MxSeries {
        MixedSeries::exact(&kelt(0), pairs.iter().map(|(e, c)| (*e, kelt(*c))))
    }

    fn wpoly(coeffs: &[i64]) -> WeierstrassPoly {
        WeierstrassPoly::new(coeffs.iter().map(|c| kelt(*c)).collect()).unwrap()
    }

    fn simple_form(num: &[(i64, i64)], pole: Option<(&[i64], u32)>) -> FormOverB {
        FormOverB::new(vec![FormTerm {
            pi_exp: 0,
            numerator: series(num),
            pole: pole.map(|(h, r)| (wpoly(h), r)),
        }])
        .unwrap()
    }

    #[test]
    fn relevant_primes_reads_off_terms() {
        let f = simple_form(&[(0, 1)], None);
        assert_eq!(relevant_primes(&f).len(), 1);
        let f = simple_form(&[(0, 1)], Some((&[-5, 1], 1)));
        let sites = relevant_primes(&f);
        assert_eq!(sites.len(), 2);
        let f = f.add(&simple_form(&[(0, 1)], Some((&[-5, 0, 1], 1))));
        assert_eq!(relevant_primes(&f).len(), 3);
    }

    #[test]
    fn worked_ledger_dt_over_t_minus_p() {
        // omega = dT/(t-p): entries (+1, -1), total 0, PASS
        let params = Params::default();
        let form = simple_form(&[(0, 1)], Some((&[-5, 1], 1)));
        let ledger = reciprocity_check(&form, &params).unwrap();
        assert_eq!(ledger.verdict, Verdict::Pass);
        assert!(ledger.total.is_zero_to_prec());
        // constant entry -1, weierstrass entry +1
        let c = &ledger.entries[0];
        assert!(matches!(c.site, PrimeSite::Constant));
        assert!(c.rres.sub(&kelt(-1)).is_zero_to_prec());
        let w = &ledger.entries[1];
        assert!(matches!(w.site, PrimeSite::Weierstrass(_)));
        assert!(w.rres.sub(&kelt(1)).is_zero_to_prec());
    }

    #[test]
    fn worked_ledger_dlog_quadratic() {
        // omega = d(h)/h with h = t^2 - p: entries (+2, -2), total 0
        let params = Params::default();
        let h = wpoly(&[-5, 0, 1]);
        let form = FormOverB::d_log(&h);
        let ledger = reciprocity_check(&form, &params).unwrap();
        assert_eq!(ledger.verdict, Verdict::Pass);
        let c = &ledger.entries[0];
        assert!(c.rres.sub(&kelt(-2)).is_zero_to_prec());
        let w = &ledger.entries[1];
        assert!(w.rres.sub(&kelt(2)).is_zero_to_prec());
        // the per-site residue in K[theta] is 1
        let (res, _) = rres_at_weierstrass(&form, &h, &params).unwrap();
        let one = res.one_like();
        assert!(res.sub(&one).is_zero_to_prec());
    }

    #[test]
    fn exact_form_has_all_zero_ledger() {
        // omega = dg for a polynomial g: all entries 0
        let params = Params::default();
        // g = t^3 + p t: dg = (3t^2 + p) dT
        let form = simple_form(&[(0, 5), (2, 3)], None);
        let ledger = reciprocity_check(&form, &params).unwrap();
        assert_eq!(ledger.verdict, Verdict::Pass);
        for e in &ledger.entries {
            assert!(e.rres.is_zero_to_prec());
        }
    }

    #[test]
    fn pure_double_pole_has_zero_site_residue() {
        // omega = dT/(t-p)^2: residue at (t-p) is 0; constant side too
        let params = Params::default();
        let form = simple_form(&[(0, 1)], Some((&[-5, 1], 2)));
        let ledger = reciprocity_check(&form, &params).unwrap();
        assert_eq!(ledger.verdict, Verdict::Pass);
        let w = &ledger.entries[1];
        assert!(w.rres.is_zero_to_prec());
        assert!(ledger.total.is_zero_to_prec());
    }

    #[test]
    fn negative_pi_powers_and_mixed_terms() {
        // omega = (p^{-2} t^2 / (t^2 - p)) dT plus a polynomial part
        let params = Params::default();
        let mut form = simple_form(&[(2, 1)], Some((&[-5, 0, 1], 1)));
        form.terms[0].pi_exp = -2;
        let form = form.add(&simple_form(&[(0, 3), (4, 2)], None));
        let ledger = reciprocity_check(&form, &params).unwrap();
        assert_eq!(ledger.verdict, Verdict::Pass, "{:?}", ledger.total);
    }

    #[test]
    fn partial_fraction_consistency() {
        // rres at h of g/h^r is invariant under g -> g + q h^r
        let params = Params::default();
        let h = wpoly(&[-5, 5, 1]);
        let form = simple_form(&[(0, 2), (1, 7), (3, 1)], Some((&[-5, 5, 1], 2)));
        let (_, before) = rres_at_weierstrass(&form, &h, &params).unwrap();
        let shifted = FormOverB::new(vec![shift_numerator_by_multiple(
            &form.terms[0],
            &[kelt(3), kelt(-2), kelt(1)],
        )
        .unwrap()])
        .unwrap();
        let (_, after) = rres_at_weierstrass(&shifted, &h, &params).unwrap();
        assert!(before.sub(&after).is_zero_to_prec());
    }

    #[test]
    fn bilinearity_of_ledgers() {
        let params = Params::default();
        let f1 = simple_form(&[(0, 1), (1, 5)], Some((&[-5, 1], 1)));
        let f2 = simple_form(&[(0, 2)], Some((&[-5, 0, 1], 2)));
        let both = f1.add(&f2);
        let l1 = reciprocity_check(&f1, &params).unwrap();
        let l2 = reciprocity_check(&f2, &params).unwrap();
        let lb = reciprocity_check(&both, &params).unwrap();
        let sum = l1.total.add(&l2.total);
        assert!(lb.total.sub(&sum).is_zero_to_prec());
        assert_eq!(lb.verdict, Verdict::Pass);
    }

    #[test]
    fn extension_reciprocity_worked_examples() {
        let params = Params::default();
        // A = B[x]/(x^2 - (t^3 + p t + p))
        let ext = ExtensionOverB::new(vec![
            series(&[(0, -5), (1, -5), (3, -1)]),
            series(&[]),
            series(&[(0, 1)]),
        ])
        .unwrap();
        // omega = x dT/(t-p): Tr(x) = 0, ledger identically zero
        let zero_form = FormOverB::new(vec![]).unwrap();
        let odd = vec![
            zero_form.clone(),
            simple_form(&[(0, 1)], Some((&[-5, 1], 1))),
        ];
        let traced = trace_form_over_b(&odd, &ext).unwrap();
        for t in &traced.terms {
            assert!(t.numerator.is_zero_to_prec());
        }
        // omega = x^2 dT/(t-p) = (t^3+pt+p) dT/(t-p): trace = 2(t^3+pt+p)/(t-p)
        let even = vec![
            simple_form(&[(0, 1)], Some((&[-5, 1], 1))),
            zero_form,
        ];
        // x^2 = t^3+pt+p in A, so the coefficient of x^0 is that series
        let even: Vec<FormOverB> = {
            let mut e = even;
            e[0].terms[0].numerator = series(&[(0, 5), (1, 5), (3, 1)]);
            e
        };
        let ledger = reciprocity_check_extension(&even, &ext, &params).unwrap();
        assert_eq!(ledger.verdict, Verdict::Pass, "total {:?}", ledger.total);
        // and the traced numerator equals 2(t^3+pt+p) as expected
        let traced = trace_form_over_b(&even, &ext).unwrap();
        let want = series(&[(0, 10), (1, 10), (3, 2)]);
        assert!(traced.terms[0].numerator.sub(&want).is_zero_to_prec());
    }

    #[test]
    fn trivial_extension_matches_base() {
        let params = Params::default();
        // A = B[x]/(x - 1): traces are the identity
        let ext = ExtensionOverB::new(vec![series(&[(0, -1)]), series(&[(0, 1)])]).unwrap();
        let base_form = simple_form(&[(0, 1)], Some((&[-5, 1], 1)));
        let ledger_ext =
            reciprocity_check_extension(&[base_form.clone()], &ext, &params).unwrap();
        let ledger_base = reciprocity_check(&base_form, &params).unwrap();
        assert_eq!(ledger_ext.verdict, Verdict::Pass);
        assert!(ledger_ext.total.sub(&ledger_base.total).is_zero_to_prec());
    }

    #[test]
    fn non_coprime_poles_are_rejected() {
        let params = Params::default();
        // two terms with h and h^2-shape sharing the factor t - p
        let f = simple_form(&[(0, 1)], Some((&[-5, 1], 1)))
            .add(&simple_form(&[(0, 1)], Some((&[25, -10, 1], 1))));
        let err = reciprocity_check(&f, &params);
        assert!(matches!(err, Err(Error::Presentation(_)) | Err(Error::InseparableToPrecision(_))));
    }
}

#[cfg(test)]
mod edge_tests {
    use super::*;
    use crate::series::MixedSeries;

    const N: i64 = 16;

    fn qp() -> Arc<LocalFieldDesc> {
        LocalFieldDesc::qp(3)
    }

    fn kelt(z: i64) -> KElt {
        qp().from_i64(z, 40)
    }

    fn series(pairs: &[(i64, i64)]) -> MxSeries {
        MixedSeries::exact(&kelt(0), pairs.iter().map(|(e, c)| (*e, kelt(*c))))
    }

    #[test]
    fn degree_four_pole_at_default_window() {
        let params = Params::default();
        // h = t^4 + 3t^2 + 6 at p = 3, pole order 2
        let h = WeierstrassPoly::new(vec![kelt(6), kelt(0), kelt(3), kelt(0), kelt(1)]).unwrap();
        let form = FormOverB::new(vec![FormTerm {
            pi_exp: 0,
            numerator: series(&[(0, 2), (3, 1)]),
            pole: Some((h, 2)),
        }])
        .unwrap();
        let ledger = reciprocity_check(&form, &params).unwrap();
        assert_eq!(ledger.verdict, Verdict::Pass, "total {:?}", ledger.total);
        let _ = N;
    }

    #[test]
    fn repeated_site_terms_are_aggregated() {
        let params = Params::default();
        let h = || WeierstrassPoly::new(vec![kelt(-3), kelt(1)]).unwrap();
        // 1/(t-p) + t/(t-p)^2 presented as two terms at the same site
        let form = FormOverB::new(vec![
            FormTerm { pi_exp: 0, numerator: series(&[(0, 1)]), pole: Some((h(), 1)) },
            FormTerm { pi_exp: 0, numerator: series(&[(1, 1)]), pole: Some((h(), 2)) },
        ])
        .unwrap();
        let sites = relevant_primes(&form);
        assert_eq!(sites.len(), 2, "constant prime plus one aggregated site");
        let ledger = reciprocity_check(&form, &params).unwrap();
        assert_eq!(ledger.verdict, Verdict::Pass);
        // residue of t/(t-p)^2 at t-p is 1 (u-expansion of (theta+u)/u^2),
        // plus 1 from the simple pole
        let w = &ledger.entries[1];
        assert!(w.rres.sub(&kelt(2)).is_zero_to_prec());
    }

    #[test]
    fn cubic_extension_reciprocity() {
        let params = Params::default();
        // A = B[x]/(x^3 + p x - (t^2 + p))
        let ext = ExtensionOverB::new(vec![
            series(&[(0, -3), (2, -1)]),
            series(&[(0, 3)]),
            series(&[]),
            series(&[(0, 1)]),
        ])
        .unwrap();
        let omega = vec![
            FormOverB::new(vec![FormTerm {
                pi_exp: 0,
                numerator: series(&[(0, 1), (1, 2)]),
                pole: Some((WeierstrassPoly::new(vec![kelt(-3), kelt(1)]).unwrap(), 1)),
            }])
            .unwrap(),
            FormOverB::new(vec![FormTerm {
                pi_exp: -1,
                numerator: series(&[(0, 3), (2, 3)]),
                pole: Some((WeierstrassPoly::new(vec![kelt(3), kelt(3), kelt(1)]).unwrap(), 2)),
            }])
            .unwrap(),
            FormOverB::new(vec![FormTerm {
                pi_exp: 0,
                numerator: series(&[(4, 1)]),
                pole: None,
            }])
            .unwrap(),
        ];
        let ledger = reciprocity_check_extension(&omega, &ext, &params).unwrap();
        assert_eq!(ledger.verdict, Verdict::Pass, "total {:?}", ledger.total);
    }
}
