//! Codifferents, differents and Jacobians for monogenic extensions, and the
//! membership test for the explicit dualizing module of an affine
//! hypersurface A = B[x]/(F) over B = O_K[[t]].
//!
//! Two independent routes are always kept: the 1x1 Jacobian J = g'(alpha)
//! on one side, and the brute-force trace-integrality oracle for the
//! codifferent {x : Tr(xA) <= B} on the other. The two must agree exactly;
//! a disagreement is a hard error, never reconciled.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::Rational64;

use crate::coeff::Coeff;
use crate::err::{Error, Result};
use crate::fields::{LocalFieldDesc, StepKind};
use crate::polyquot;
use crate::reciprocity::{ExtensionOverB, Verdict};
use crate::residues::{KElt, MxSeries, Params};
use crate::series::{weierstrass_divide, weierstrass_prepare, MixedSeries};

/// O_F = O_M[x]/(g) for a one-dimensional complete base M (Q_p or an
/// unramified extension), with g Eisenstein or unramified-irreducible. The
/// power basis then generates the maximal order, so trace integrality over
/// the basis decides codifferent membership.
#[derive(Debug)]
pub struct CdvrExtension {
    base: Arc<LocalFieldDesc>,
    ext: Arc<LocalFieldDesc>,
    /// g embedded into the extension field, little-endian.
    g_ext: Vec<KElt>,
    kind: StepKind,
    prec: i64,
}

impl CdvrExtension {
    /// Build from integer coefficient vectors over the base (each entry a
    /// coordinate vector in the base power basis).
    pub fn new(
        base: &Arc<LocalFieldDesc>,
        g: Vec<Vec<BigInt>>,
        kind: StepKind,
        prec: i64,
    ) -> Result<Self> {
        let ext = match kind {
            StepKind::Eisenstein => LocalFieldDesc::eisenstein_over(base, g.clone())?,
            StepKind::Unramified => {
                if base.degree() != 1 {
                    return Err(Error::Presentation(
                        "unramified steps are supported over Q_p only (tower shape)".into(),
                    ));
                }
                let flat: Vec<BigInt> = g
                    .iter()
                    .map(|c| c.first().cloned().unwrap_or_default())
                    .collect();
                LocalFieldDesc::unramified(base.p(), flat)?
            }
        };
        let g_ext: Vec<KElt> = g
            .iter()
            .map(|c| {
                let coords: Vec<crate::padic::PadicApprox> = c
                    .iter()
                    .map(|z| crate::padic::PadicApprox::from_bigint(base.p(), z, prec))
                    .collect();
                ext.elt(coords)
            })
            .collect();
        Ok(CdvrExtension { base: base.clone(), ext, g_ext, kind, prec })
    }

    pub fn ext_field(&self) -> &Arc<LocalFieldDesc> {
        &self.ext
    }

    pub fn base_field(&self) -> &Arc<LocalFieldDesc> {
        &self.base
    }

    pub fn kind(&self) -> StepKind {
        self.kind
    }

    /// Ramification index of the step.
    pub fn step_e(&self) -> i64 {
        match self.kind {
            StepKind::Eisenstein => (self.g_ext.len() - 1) as i64,
            StepKind::Unramified => 1,
        }
    }

    fn alpha(&self) -> KElt {
        self.ext.generator(self.prec)
    }

    /// Uniformiser of F.
    pub fn pi_f(&self) -> KElt {
        self.ext.uniformizer(self.prec)
    }

    /// The O_M-basis alpha^j of O_F.
    pub fn step_basis(&self) -> Vec<KElt> {
        let deg = self.g_ext.len() - 1;
        (0..deg)
            .map(|j| self.alpha().pow_i64(j as i64).expect("non-negative power"))
            .collect()
    }

    /// Trace down one step, landing in the base.
    pub fn trace_to_base(&self, a: &KElt) -> Result<KElt> {
        a.trace_step()
    }

    /// J = g'(alpha) with its integer-normalised valuation v_F(J).
    pub fn jacobian_generator(&self) -> Result<(KElt, i64)> {
        let deriv = polyquot::poly_derivative(&self.g_ext);
        let j = polyquot::poly_eval(&deriv, &self.alpha());
        match j.valuation() {
            None => Err(Error::InseparableToPrecision(
                "g'(alpha) is zero to the working precision".into(),
            )),
            Some(v) => {
                let vf = v * Rational64::new(self.ext.e() as i64, 1);
                if !vf.is_integer() {
                    return Err(Error::Disagreement(format!(
                        "Jacobian valuation {vf} is not an integer in v_F units"
                    )));
                }
                Ok((j, vf.to_integer()))
            }
        }
    }
}

/// Verdict for one trace sample; `Undecided` is never silently collapsed
/// into PASS or FAIL.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceVerdict {
    Integral,
    NotIntegral,
    Undecided,
}

fn integrality_of(tr: &KElt) -> TraceVerdict {
    if Coeff::val_at_least(tr, Rational64::new(0, 1)) {
        TraceVerdict::Integral
    } else if tr.is_zero_to_prec() {
        TraceVerdict::Undecided
    } else {
        TraceVerdict::NotIntegral
    }
}

#[derive(Debug, Clone)]
pub struct OracleSample {
    pub label: String,
    pub verdict: TraceVerdict,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub samples: Vec<OracleSample>,
    pub verdict: TraceVerdict,
}

/// Brute-force membership of phi in the codifferent: Tr(phi * b) must be
/// integral for b over the O_M-basis of O_F. O_M-linearity of the trace
/// discharges the "for all of O_F" quantifier on this finite set.
pub fn trace_integrality_oracle(ext: &CdvrExtension, phi: &KElt) -> Result<OracleReport> {
    let mut samples = Vec::new();
    let mut verdict = TraceVerdict::Integral;
    for (j, b) in ext.step_basis().iter().enumerate() {
        let tr = ext.trace_to_base(&phi.mul(b))?;
        let v = integrality_of(&tr);
        samples.push(OracleSample { label: format!("Tr(phi * alpha^{j}) = {tr:?}"), verdict: v });
        verdict = match (verdict, v) {
            (_, TraceVerdict::NotIntegral) | (TraceVerdict::NotIntegral, _) => {
                TraceVerdict::NotIntegral
            }
            (TraceVerdict::Undecided, _) | (_, TraceVerdict::Undecided) => TraceVerdict::Undecided,
            _ => TraceVerdict::Integral,
        };
    }
    Ok(OracleReport { samples, verdict })
}

#[derive(Debug, Clone)]
pub struct DifferentReport {
    pub d_jacobian: i64,
    pub d_oracle: i64,
    pub transcript: Vec<String>,
}

/// d = v_F(g'(alpha)), cross-checked against the sharp trace-integrality
/// exponent: the largest d' with Tr(pi_F^{-d'} O_F) integral. Disagreement
/// is a hard error.
pub fn different_valuation(ext: &CdvrExtension) -> Result<DifferentReport> {
    let (_, d_jac) = ext.jacobian_generator()?;
    let pi = ext.pi_f();
    let mut transcript = Vec::new();
    let mut sharp: Option<i64> = None;
    for d in 0..=(d_jac + 2) {
        let phi = pi.pow_i64(-d)?;
        let rep = trace_integrality_oracle(ext, &phi)?;
        transcript.push(format!("d' = {d}: {:?}", rep.verdict));
        match rep.verdict {
            TraceVerdict::Integral => sharp = Some(d),
            TraceVerdict::NotIntegral => break,
            TraceVerdict::Undecided => {
                return Err(Error::Undecided(format!(
                    "trace integrality at exponent {d} undecidable at precision {}",
                    ext.prec
                )))
            }
        }
    }
    let d_oracle = sharp.ok_or_else(|| {
        Error::Disagreement("even Tr(O_F) failed integrality; broken presentation".into())
    })?;
    if d_oracle != d_jac {
        return Err(Error::Disagreement(format!(
            "Jacobian valuation {d_jac} but oracle sharp exponent {d_oracle}"
        )));
    }
    Ok(DifferentReport { d_jacobian: d_jac, d_oracle, transcript })
}

#[derive(Debug, Clone)]
pub struct FloorSample {
    pub i: i64,
    pub expected: i64,
    pub observed: i64,
}

#[derive(Debug, Clone)]
pub struct FloorReport {
    pub samples: Vec<FloorSample>,
    pub all_ok: bool,
}

/// Check Tr(pi_L^i g'(pi_L)^{-1} O_L) = pi_M^floor(i/e) O_M over a range of
/// exponents i (Eisenstein shape, so pi_L = alpha).
pub fn floor_formula_check(ext: &CdvrExtension, i_lo: i64, i_hi: i64) -> Result<FloorReport> {
    if ext.kind != StepKind::Eisenstein {
        return Err(Error::Shape("floor formula requires an Eisenstein step".into()));
    }
    let e = ext.step_e();
    let (j, _) = ext.jacobian_generator()?;
    let j_inv = j.inv()?;
    let alpha = ext.alpha();
    let mut samples = Vec::new();
    let mut all_ok = true;
    for i in i_lo..=i_hi {
        let lead = alpha.pow_i64(i)?.mul(&j_inv);
        // minimal base valuation over the traced basis multiples
        let mut min_v: Option<Rational64> = None;
        for b in ext.step_basis() {
            let tr = ext.trace_to_base(&lead.mul(&b))?;
            if let Some(v) = Coeff::vord(&tr) {
                min_v = Some(match min_v {
                    None => v,
                    Some(m) => m.min(v),
                });
            }
        }
        let expected = i.div_euclid(e);
        let observed = match min_v {
            Some(v) if v.is_integer() => v.to_integer(),
            _ => {
                return Err(Error::Undecided(format!(
                    "floor formula at i = {i}: no certified nonzero trace"
                )))
            }
        };
        if observed != expected {
            all_ok = false;
        }
        samples.push(FloorSample { i, expected, observed });
    }
    Ok(FloorReport { samples, all_ok })
}

/// The hypersurface A = B[x]/(F) with caller assertions recorded; reuses
/// the separability-checked presentation from the reciprocity layer.
#[derive(Debug, Clone)]
pub struct SurfacePresentation {
    pub ext: ExtensionOverB,
    pub assert_normal: bool,
    pub assert_flat: bool,
}

impl SurfacePresentation {
    pub fn new(f_coeffs: Vec<MxSeries>) -> Result<Self> {
        Ok(SurfacePresentation {
            ext: ExtensionOverB::new(f_coeffs)?,
            assert_normal: true,
            assert_flat: true,
        })
    }

    pub fn degree(&self) -> usize {
        self.ext.degree()
    }

    /// J = F'(x) mod F as an element of A.
    pub fn jacobian(&self) -> Vec<MxSeries> {
        let deriv = polyquot::poly_derivative(self.ext.f_coeffs());
        polyquot::poly_rem_monic(deriv, self.ext.f_coeffs())
    }

    pub fn one(&self) -> Vec<MxSeries> {
        let template = self.ext.f_coeffs()[0].zero_like();
        let mut v = vec![template.clone(); self.degree()];
        v[0] = template.one_like();
        v
    }

    pub fn x_elt(&self) -> Vec<MxSeries> {
        let template = self.ext.f_coeffs()[0].zero_like();
        let mut v = vec![template.clone(); self.degree()];
        if self.degree() > 1 {
            v[1] = template.one_like();
        } else {
            // degree-one presentations identify x with the root
            v[0] = self.ext.f_coeffs()[0].neg();
        }
        v
    }

    pub fn mul_a(&self, a: &[MxSeries], b: &[MxSeries]) -> Vec<MxSeries> {
        polyquot::poly_mulmod(a, b, self.ext.f_coeffs())
    }
}

/// An element of Frac A in cleared form: numerator in A over a declared
/// denominator in A.
#[derive(Debug, Clone)]
pub struct AFraction {
    pub num: Vec<MxSeries>,
    pub den: Vec<MxSeries>,
}

/// Membership verdict for one spanning sample, with the worst certified
/// margin (digits to spare before the verdict would flip).
#[derive(Debug, Clone)]
pub struct MembershipSample {
    pub label: String,
    pub verdict: TraceVerdict,
}

#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub samples: Vec<MembershipSample>,
    pub verdict: TraceVerdict,
    pub worst_margin: Option<Rational64>,
}

/// Decide whether q = tau / det lies in B: prepare det = pi^m u H and
/// check that H divides tau exactly with the quotient divisible by pi^m.
fn in_b_after_division(
    tau: &MxSeries,
    det_val: i64,
    det_unit_inv: &MxSeries,
    det_weier: &[KElt],
    prec: i64,
) -> Result<(TraceVerdict, Rational64)> {
    // tau / H: remainder must vanish
    let (quo, rem) = if det_weier.len() > 1 {
        weierstrass_divide(tau, det_weier, prec)?
    } else {
        (tau.clone(), vec![])
    };
    for c in &rem {
        match c.vord() {
            Some(_) => {
                // provably nonzero remainder: tau/det is not in B
                return Ok((TraceVerdict::NotIntegral, Rational64::new(0, 1)));
            }
            None => {
                if c.prec_bound() <= Rational64::new(0, 1) {
                    return Ok((TraceVerdict::Undecided, Rational64::new(0, 1)));
                }
            }
        }
    }
    let scaled = quo.mul(det_unit_inv);
    // need nu(every coefficient) >= det_val
    let need = Rational64::new(det_val, 1);
    if scaled.val_at_least(need) {
        // margin: how many digits below the requirement the certified
        // bounds still reach
        let margin = scaled.floor() - need;
        Ok((TraceVerdict::Integral, margin))
    } else {
        // distinguish certified failure from precision shortfall
        let mut undecided = false;
        for (_, c) in scaled.iter() {
            match c.vord() {
                Some(v) if v < need => return Ok((TraceVerdict::NotIntegral, need - v)),
                Some(_) => {}
                None => {
                    if c.prec_bound() < need {
                        undecided = true;
                    }
                }
            }
        }
        if undecided {
            Ok((TraceVerdict::Undecided, Rational64::new(0, 1)))
        } else {
            // tail/top bounds below the requirement
            Ok((TraceVerdict::Undecided, Rational64::new(0, 1)))
        }
    }
}

/// Test omega = phi dT for membership in W_{A/O_K}: for g over the spanning
/// set x^i t^k (i < deg, k <= sample_bound), Tr(g phi) must lie in B.
/// B-linearity of the trace makes this finite set decisive.
pub fn w_membership(
    surface: &SurfacePresentation,
    phi: &AFraction,
    sample_bound: i64,
    params: &Params,
) -> Result<MembershipReport> {
    let n = surface.degree();
    let f = surface.ext.f_coeffs();
    let template = f[0].zero_like();
    // den^{-1} = adj(M_den) e0 / det
    let mden = polyquot::mult_matrix(&phi.den, f);
    let det = polyquot::det_cofactor(&mden);
    if det.is_zero_to_prec() {
        return Err(Error::PrecisionLoss(
            "denominator is a zero divisor to precision".into(),
        ));
    }
    let adj = polyquot::adjugate(&mden);
    let mut e0 = vec![template.clone(); n];
    e0[0] = template.one_like();
    let den_inv_scaled = polyquot::mat_vec(&adj, &e0);
    // psi = num * (det * den^{-1}) in A
    let psi = surface.mul_a(&phi.num, &den_inv_scaled);
    // det = pi^m u H
    let det_val_q = det
        .iter()
        .filter_map(|(_, c)| c.vord())
        .min()
        .ok_or_else(|| Error::PrecisionLoss("determinant vanishes to precision".into()))?;
    if !det_val_q.is_integer() {
        return Err(Error::Presentation(
            "determinant valuation is fractional; base field must be unramified here".into(),
        ));
    }
    let det_val = det_val_q.to_integer();
    if !det.val_at_least(det_val_q) {
        return Err(Error::PrecisionLoss(
            "determinant valuation not certified by the window".into(),
        ));
    }
    let field = template.template().field().clone();
    let pi_inv = field.uniformizer(params.prec).pow_i64(-det_val * field.e() as i64)?;
    let det0 = det.scalar_mul(&pi_inv);
    let (det_unit, det_weier) = if det0.reduction_order().map_or(false, |d| d == 0) {
        // unit series: no Weierstrass part
        (det0.clone(), vec![template.template().one_like()])
    } else {
        weierstrass_prepare(&det0, params.prec)?
    };
    let det_unit_inv = det_unit.invert(params.prec, 0)?;
    let mut samples = Vec::new();
    let mut verdict = TraceVerdict::Integral;
    let mut worst: Option<Rational64> = None;
    for i in 0..n {
        let mut xi = vec![template.clone(); n];
        xi[i] = template.one_like();
        let gpsi = surface.mul_a(&xi, &psi);
        let tau = polyquot::trace_in_quotient(&gpsi, f);
        for k in 0..=sample_bound.max(0) {
            let tau_k = tau.shift_t(k);
            let (v, margin) =
                in_b_after_division(&tau_k, det_val, &det_unit_inv, &det_weier, params.prec)?;
            samples.push(MembershipSample {
                label: format!("g = x^{i} t^{k}"),
                verdict: v,
            });
            if v == TraceVerdict::Integral {
                worst = Some(match worst {
                    None => margin,
                    Some(w) => w.min(margin),
                });
            }
            verdict = match (verdict, v) {
                (_, TraceVerdict::NotIntegral) | (TraceVerdict::NotIntegral, _) => {
                    TraceVerdict::NotIntegral
                }
                (TraceVerdict::Undecided, _) | (_, TraceVerdict::Undecided) => {
                    TraceVerdict::Undecided
                }
                _ => TraceVerdict::Integral,
            };
        }
    }
    Ok(MembershipReport { samples, verdict, worst_margin: worst })
}

#[derive(Debug, Clone)]
pub struct CodifferentCert {
    pub jacobian_rendered: String,
    pub members: Vec<(String, TraceVerdict)>,
    pub boundary: Vec<(String, TraceVerdict)>,
    pub verdict: Verdict,
}

/// Verify W_{A/O_K} = J^{-1} A dT on random members and auto-generated
/// boundary elements: members a J^{-1} dT must pass, boundary elements
/// a J^{-1} d^{-1} dT (d a non-unit: pi or a Weierstrass factor of the
/// discriminant) must fail. Any undecided sample makes the whole report
/// inconclusive.
pub fn verify_w_equals_codifferent(
    surface: &SurfacePresentation,
    trials: u32,
    sample_bound: i64,
    params: &Params,
) -> Result<CodifferentCert> {
    let n = surface.degree();
    let template = surface.ext.f_coeffs()[0].zero_like();
    let field = template.template().field().clone();
    let jac = surface.jacobian();
    let mut rng = crate::prng::substream(params.seed, 0x4a414342);
    let mut members = Vec::new();
    let mut all_members_pass = true;
    let mut any_undecided = false;
    for trial in 0..trials {
        // random integral a in A with small windows
        let mut a: Vec<MxSeries> = Vec::with_capacity(n);
        for _ in 0..n {
            let w = crate::prng::int_in(&mut rng, 0, 3);
            let mut pairs = Vec::new();
            for e in 0..=w {
                let c = crate::prng::padic_integral(&mut rng, field.p(), 3, params.prec);
                pairs.push((e, field.from_base(c)));
            }
            a.push(MixedSeries::exact(&template.template().clone(), pairs));
        }
        let phi = AFraction { num: a, den: jac.clone() };
        let rep = w_membership(surface, &phi, sample_bound, params)?;
        if rep.verdict == TraceVerdict::Undecided {
            any_undecided = true;
        }
        if rep.verdict != TraceVerdict::Integral {
            all_members_pass = false;
        }
        members.push((format!("trial {trial}: a J^-1"), rep.verdict));
    }
    // boundary denominators: pi, and the Weierstrass part of disc(F)
    let mut boundary = Vec::new();
    let mut all_boundary_fail = true;
    let mut boundary_dens: Vec<(String, Vec<MxSeries>)> = Vec::new();
    {
        let pi_elt = field.uniformizer(params.prec);
        let pi_a = {
            let mut v = vec![template.clone(); n];
            v[0] = MixedSeries::constant(pi_elt);
            v
        };
        boundary_dens.push(("pi".into(), surface.mul_a(&jac, &pi_a)));
        // Weierstrass factor of the discriminant, when present
        let disc = surface.ext.discriminant_norm();
        if let Some(v) = disc.iter().filter_map(|(_, c)| c.vord()).min() {
            if v.is_integer() {
                let pi_inv = field
                    .uniformizer(params.prec)
                    .pow_i64(-v.to_integer() * field.e() as i64)?;
                let disc0 = disc.scalar_mul(&pi_inv);
                if disc0.reduction_order().map_or(false, |d| d > 0) {
                    if let Ok((_, hw)) = weierstrass_prepare(&disc0, params.prec) {
                        let mut hv = vec![template.clone(); n];
                        hv[0] = crate::series::poly_to_series(&hw, template.template());
                        boundary_dens
                            .push(("weierstrass factor of disc(F)".into(), surface.mul_a(&jac, &hv)));
                    }
                }
            }
        }
    }
    for (label, den) in boundary_dens {
        let phi = AFraction { num: surface.one(), den };
        let rep = w_membership(surface, &phi, sample_bound, params)?;
        if rep.verdict == TraceVerdict::Undecided {
            any_undecided = true;
        }
        if rep.verdict != TraceVerdict::NotIntegral {
            all_boundary_fail = false;
        }
        boundary.push((format!("J^-1 {label}^-1"), rep.verdict));
    }
    let verdict = if any_undecided {
        Verdict::Inconclusive
    } else if all_members_pass && all_boundary_fail {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CodifferentCert {
        jacobian_rendered: format!("{jac:?}"),
        members,
        boundary,
        verdict,
    })
}

/// O_F = O_M[x]/(f) over the two-dimensional base O_M = O_{K{{t}}},
/// presented by integral mixed-series coefficients. Covers the imperfect
/// residue field cases that the classical different formula misses.
#[derive(Debug, Clone)]
pub struct Cdvr2D {
    f_coeffs: Vec<MxSeries>,
    /// Ramification index of F over M (n for Eisenstein shape, 1 for
    /// unramified-type shapes like x^2 - t).
    rel_e: i64,
}

impl Cdvr2D {
    pub fn new(f_coeffs: Vec<MxSeries>, rel_e: i64) -> Result<Self> {
        let n = f_coeffs.len() - 1;
        if n < 1 {
            return Err(Error::Shape("extension must have degree >= 1".into()));
        }
        let lead = f_coeffs.last().unwrap();
        if !lead.sub(&lead.one_like()).is_zero_to_prec() {
            return Err(Error::Shape("extension polynomial must be monic".into()));
        }
        if rel_e != 1 && rel_e != n as i64 {
            return Err(Error::Presentation(
                "only totally ramified or unramified-type shapes are supported".into(),
            ));
        }
        Ok(Cdvr2D { f_coeffs, rel_e })
    }

    pub fn degree(&self) -> usize {
        self.f_coeffs.len() - 1
    }

    fn template(&self) -> MxSeries {
        self.f_coeffs[0].zero_like()
    }

    /// Jacobian valuation v_F(J) = e * nu_M(Nm J) / n.
    pub fn jacobian_valuation(&self, params: &Params) -> Result<i64> {
        let deriv = polyquot::poly_derivative(&self.f_coeffs);
        let j = polyquot::poly_rem_monic(deriv, &self.f_coeffs);
        let mat = polyquot::mult_matrix(&j, &self.f_coeffs);
        let norm = polyquot::det_cofactor(&mat);
        let v = norm
            .iter()
            .filter_map(|(_, c)| c.vord())
            .min()
            .ok_or_else(|| {
                Error::InseparableToPrecision("Nm(f'(x)) vanishes to precision".into())
            })?;
        if !norm.val_at_least(v) {
            return Err(Error::PrecisionLoss(format!(
                "norm valuation {v} not certified at precision {}",
                params.prec
            )));
        }
        // nu_M(Nm J) = n/e * v_F(J), so v_F(J) = e * nu_M(Nm J) / n
        let out = v * Rational64::new(self.rel_e, self.degree() as i64);
        if !out.is_integer() {
            return Err(Error::Disagreement(format!(
                "Jacobian valuation {out} is not an integer in v_F units"
            )));
        }
        Ok(out.to_integer())
    }

    /// pi_F^{-1} as an element of Frac A over a cleared denominator in M.
    fn pi_f_inverse(&self, params: &Params) -> Result<(Vec<MxSeries>, MxSeries)> {
        let template = self.template();
        let n = self.degree();
        if self.rel_e == 1 {
            // pi_F = pi_K: numerator 1, denominator pi
            let field = template.template().field().clone();
            let pi = MixedSeries::constant(field.uniformizer(params.prec));
            let mut one = vec![template.clone(); n];
            one[0] = template.one_like();
            return Ok((one, pi));
        }
        // pi_F = x: from f(x) = 0, x * (x^{n-1} + f_{n-1} x^{n-2} + ... + f_1)
        // = -f_0, so x^{-1} = -(that)/f_0
        let mut num = vec![template.clone(); n];
        for j in 1..=n {
            // coefficient of x^{j-1} is f_j (with f_n = 1)
            num[j - 1] = self.f_coeffs[j].neg();
        }
        Ok((num, self.f_coeffs[0].clone()))
    }

    /// Sharp trace-integrality exponent cross-checked against the Jacobian
    /// valuation.
    pub fn different_valuation(&self, params: &Params) -> Result<DifferentReport> {
        let d_jac = self.jacobian_valuation(params)?;
        let n = self.degree();
        let template = self.template();
        let (pinv_num, pinv_den) = self.pi_f_inverse(params)?;
        let mut transcript = Vec::new();
        let mut sharp: Option<i64> = None;
        for d in 0..=(d_jac + 2) {
            // phi = pi_F^{-d} = pinv_num^d / pinv_den^d
            let mut num = vec![template.clone(); n];
            num[0] = template.one_like();
            for _ in 0..d {
                num = polyquot::poly_mulmod(&num, &pinv_num, &self.f_coeffs);
            }
            let mut den = template.one_like();
            for _ in 0..d {
                den = den.mul(&pinv_den);
            }
            let den_inv = mx_invert_general(&den, params)?;
            let mut verdict = TraceVerdict::Integral;
            for i in 0..n {
                let mut xi = vec![template.clone(); n];
                xi[i] = template.one_like();
                let prod = polyquot::poly_mulmod(&xi, &num, &self.f_coeffs);
                let tr = polyquot::trace_in_quotient(&prod, &self.f_coeffs).mul(&den_inv);
                let v = if tr.val_at_least(Rational64::new(0, 1)) {
                    TraceVerdict::Integral
                } else if tr.iter().any(|(_, c)| c.vord().map_or(false, |v| v < Rational64::new(0, 1))) {
                    TraceVerdict::NotIntegral
                } else {
                    TraceVerdict::Undecided
                };
                verdict = match (verdict, v) {
                    (_, TraceVerdict::NotIntegral) | (TraceVerdict::NotIntegral, _) => {
                        TraceVerdict::NotIntegral
                    }
                    (TraceVerdict::Undecided, _) | (_, TraceVerdict::Undecided) => {
                        TraceVerdict::Undecided
                    }
                    _ => TraceVerdict::Integral,
                };
            }
            transcript.push(format!("d' = {d}: {verdict:?}"));
            match verdict {
                TraceVerdict::Integral => sharp = Some(d),
                TraceVerdict::NotIntegral => break,
                TraceVerdict::Undecided => {
                    return Err(Error::Undecided(format!(
                        "trace integrality at exponent {d} undecidable"
                    )))
                }
            }
        }
        let d_oracle = sharp.ok_or_else(|| {
            Error::Disagreement("even Tr(O_F) failed integrality; broken presentation".into())
        })?;
        if d_oracle != d_jac {
            return Err(Error::Disagreement(format!(
                "Jacobian valuation {d_jac} but oracle sharp exponent {d_oracle}"
            )));
        }
        Ok(DifferentReport { d_jacobian: d_jac, d_oracle, transcript })
    }
}

/// Inverse of a nonzero mixed series of any valuation: factor out the
/// uniformiser power, invert the unit part.
fn mx_invert_general(a: &MxSeries, params: &Params) -> Result<MxSeries> {
    let v = a
        .iter()
        .filter_map(|(_, c)| c.vord())
        .min()
        .ok_or_else(|| Error::PrecisionLoss("inverting a series with no certified nonzero coefficient".into()))?;
    if !a.val_at_least(v) {
        return Err(Error::PrecisionLoss(
            "series valuation not certified by the window".into(),
        ));
    }
    let field = a.template().field().clone();
    let scale = (v * Rational64::new(field.e() as i64, 1)).to_integer();
    let pi_neg = field.uniformizer(params.prec).pow_i64(-scale)?;
    let unit = a.scalar_mul(&pi_neg);
    let inv = unit.invert(params.prec, params.lo)?;
    Ok(inv.scalar_mul(&pi_neg))
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: i64 = 16;

    fn params() -> Params {
        Params::default()
    }

    fn eis_sqrt_p(p: u64) -> CdvrExtension {
        CdvrExtension::new(
            &LocalFieldDesc::qp(p),
            vec![
                vec![BigInt::from(-(p as i64))],
                vec![BigInt::from(0)],
                vec![BigInt::from(1)],
            ],
            StepKind::Eisenstein,
            N,
        )
        .unwrap()
    }

    #[test]
    fn jacobian_examples() {
        // g = x^2 - p (p odd): J = 2 alpha, v_F = 1
        let ext = eis_sqrt_p(5);
        let (_, v) = ext.jacobian_generator().unwrap();
        assert_eq!(v, 1);
        // g = x^2 - 2 over Q_2: J = 2 alpha, v_F = 3
        let ext2 = eis_sqrt_p(2);
        let (_, v) = ext2.jacobian_generator().unwrap();
        assert_eq!(v, 3);
        // unramified quadratic: v_F(J) = 0 (p odd)
        let unram = CdvrExtension::new(
            &LocalFieldDesc::qp(5),
            vec![vec![BigInt::from(2)], vec![BigInt::from(0)], vec![BigInt::from(1)]],
            StepKind::Unramified,
            N,
        )
        .unwrap();
        let (_, v) = unram.jacobian_generator().unwrap();
        assert_eq!(v, 0);
    }

    #[test]
    fn oracle_examples_sqrt_p() {
        let ext = eis_sqrt_p(5);
        let alpha_inv = ext.pi_f().pow_i64(-1).unwrap();
        // Tr(alpha^{-1}) = 0, Tr(alpha^{-1} alpha) = 2: PASS
        let rep = trace_integrality_oracle(&ext, &alpha_inv).unwrap();
        assert_eq!(rep.verdict, TraceVerdict::Integral);
        // phi = p^{-1} = alpha^{-2}: Tr(p^{-1}) = 2/p: FAIL
        let rep = trace_integrality_oracle(&ext, &alpha_inv.mul(&alpha_inv)).unwrap();
        assert_eq!(rep.verdict, TraceVerdict::NotIntegral);
        // phi = 1 always passes
        let one = ext.ext_field().one(N);
        let rep = trace_integrality_oracle(&ext, &one).unwrap();
        assert_eq!(rep.verdict, TraceVerdict::Integral);
    }

    #[test]
    fn different_valuation_battery_samples() {
        // x^2 - p, p odd: d = 1
        let rep = different_valuation(&eis_sqrt_p(5)).unwrap();
        assert_eq!(rep.d_jacobian, 1);
        // x^2 - 2 over Q_2: d = 3
        let rep = different_valuation(&eis_sqrt_p(2)).unwrap();
        assert_eq!(rep.d_jacobian, 3);
        // unramified quadratic over Q_2 (x^2 + x + 1): d = 0
        let unram = CdvrExtension::new(
            &LocalFieldDesc::qp(2),
            vec![vec![BigInt::from(1)], vec![BigInt::from(1)], vec![BigInt::from(1)]],
            StepKind::Unramified,
            N,
        )
        .unwrap();
        let rep = different_valuation(&unram).unwrap();
        assert_eq!(rep.d_jacobian, 0);
    }

    #[test]
    fn floor_formula_on_sqrt_p() {
        let ext = eis_sqrt_p(5);
        let rep = floor_formula_check(&ext, -4, 4).unwrap();
        assert!(rep.all_ok, "{:?}", rep.samples);
        // spot examples from the contract
        for s in &rep.samples {
            assert_eq!(s.observed, s.i.div_euclid(2));
        }
    }

    fn surface_xx_cubic(p: u64) -> SurfacePresentation {
        let qp = LocalFieldDesc::qp(p);
        let kelt = |z: i64| qp.from_i64(z, N);
        let series = |pairs: &[(i64, i64)]| -> MxSeries {
            MixedSeries::exact(&kelt(0), pairs.iter().map(|(e, c)| (*e, kelt(*c))))
        };
        let pi = p as i64;
        SurfacePresentation::new(vec![
            series(&[(0, -pi), (1, -pi), (3, -1)]),
            series(&[]),
            series(&[(0, 1)]),
        ])
        .unwrap()
    }

    #[test]
    fn w_membership_worked_examples() {
        // surface x^2 = t^3 + p t + p (p = 5), phi = 1/x: PASS
        let s = surface_xx_cubic(5);
        let phi = AFraction { num: s.one(), den: s.x_elt() };
        let rep = w_membership(&s, &phi, 4, &params()).unwrap();
        assert_eq!(rep.verdict, TraceVerdict::Integral, "{:?}", rep.samples);
        // phi = 1/x^2 = 1/(t^3 + pt + p): FAIL (denominator a non-unit cubic)
        let x2 = s.mul_a(&s.x_elt(), &s.x_elt());
        let phi = AFraction { num: s.one(), den: x2 };
        let rep = w_membership(&s, &phi, 4, &params()).unwrap();
        assert_eq!(rep.verdict, TraceVerdict::NotIntegral);
        // phi = 1 trivially passes
        let phi = AFraction { num: s.one(), den: s.one() };
        let rep = w_membership(&s, &phi, 4, &params()).unwrap();
        assert_eq!(rep.verdict, TraceVerdict::Integral);
    }

    #[test]
    fn codifferent_certificate_on_the_cubic_surface() {
        let s = surface_xx_cubic(5);
        let cert = verify_w_equals_codifferent(&s, 6, 3, &params()).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass, "{cert:?}");
    }

    #[test]
    fn trivial_surface_w_is_b_dt() {
        // A = B[x]/(x - 1): J = 1, members pass, 1/p fails
        let qp = LocalFieldDesc::qp(5);
        let kelt = |z: i64| qp.from_i64(z, N);
        let series = |pairs: &[(i64, i64)]| -> MxSeries {
            MixedSeries::exact(&kelt(0), pairs.iter().map(|(e, c)| (*e, kelt(*c))))
        };
        let s = SurfacePresentation::new(vec![series(&[(0, -1)]), series(&[(0, 1)])]).unwrap();
        let cert = verify_w_equals_codifferent(&s, 4, 3, &params()).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass, "{cert:?}");
    }

    #[test]
    fn unramified_type_surface() {
        // x^2 - u with u = 1 + t (a unit of B), p = 5: J = 2x a unit,
        // W = A dT
        let qp = LocalFieldDesc::qp(5);
        let kelt = |z: i64| qp.from_i64(z, N);
        let series = |pairs: &[(i64, i64)]| -> MxSeries {
            MixedSeries::exact(&kelt(0), pairs.iter().map(|(e, c)| (*e, kelt(*c))))
        };
        let s = SurfacePresentation::new(vec![
            series(&[(0, -1), (1, -1)]),
            series(&[]),
            series(&[(0, 1)]),
        ])
        .unwrap();
        let cert = verify_w_equals_codifferent(&s, 4, 3, &params()).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass, "{cert:?}");
    }

    #[test]
    fn two_dimensional_base_differents() {
        let qp = LocalFieldDesc::qp(5);
        let kelt = |z: i64| qp.from_i64(z, N);
        let series = |pairs: &[(i64, i64)]| -> MxSeries {
            MixedSeries::exact(&kelt(0), pairs.iter().map(|(e, c)| (*e, kelt(*c))))
        };
        // x^2 - p t over O_{Q_5{{t}}}: Eisenstein, tame: d = 1
        let ext = Cdvr2D::new(
            vec![series(&[(1, -5)]), series(&[]), series(&[(0, 1)])],
            2,
        )
        .unwrap();
        let rep = ext.different_valuation(&params()).unwrap();
        assert_eq!(rep.d_jacobian, 1);

        // x^2 - t over O_{Q_2{{t}}}: unramified-type with inseparable
        // residue extension; the classical perfect-residue-field reading
        // would give 0, the Jacobian formula gives d = 1
        let q2 = LocalFieldDesc::qp(2);
        let kelt2 = |z: i64| q2.from_i64(z, N);
        let series2 = |pairs: &[(i64, i64)]| -> MxSeries {
            MixedSeries::exact(&kelt2(0), pairs.iter().map(|(e, c)| (*e, kelt2(*c))))
        };
        let ext = Cdvr2D::new(
            vec![series2(&[(1, -1)]), series2(&[]), series2(&[(0, 1)])],
            1,
        )
        .unwrap();
        let rep = ext.different_valuation(&params()).unwrap();
        assert_eq!(rep.d_jacobian, 1);
    }
}
