//! The verification batteries behind `selftest` and the acceptance suite.
//!
//! Each battery pins its tolerances in code: nothing here is calibrated at
//! run time. Randomised instances are drawn from a seeded ChaCha stream so
//! reports are bit-stable for a fixed seed.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::Rational64;

use crate::coeff::Coeff;
use crate::err::Result;
use crate::fields::{LocalFieldDesc, StepKind};
use crate::prng::{int_in, padic_integral, padic_unit, substream, Prng};
use crate::reciprocity::{
    reciprocity_check, reciprocity_check_extension, ExtensionOverB, FormOverB, FormTerm,
    Verdict, WeierstrassPoly,
};
use crate::residues::{
    change_parameter_equal, change_parameter_mixed, functoriality_check, reduce_and_compare,
    residue_equal_char, residue_mixed_standard, EqSeries, ExtShape, Form, KElt, MxSeries, Params,
};
use crate::series::{LaurentSeries, MixedSeries};

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub cases_run: u32,
    pub cases_passed: u32,
    pub pass: bool,
    pub failures: Vec<String>,
}

impl CriterionReport {
    fn new(id: u32, name: &str) -> Self {
        CriterionReport {
            id,
            name: name.into(),
            cases_run: 0,
            cases_passed: 0,
            pass: true,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases_run += 1;
        if ok {
            self.cases_passed += 1;
        } else {
            self.pass = false;
            if self.failures.len() < 8 {
                self.failures.push(describe());
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub criteria: Vec<CriterionReport>,
    pub all_pass: bool,
}

const BATTERY_PRIMES: [u64; 3] = [2, 3, 5];

fn kelt(field: &Arc<LocalFieldDesc>, z: i64, prec: i64) -> KElt {
    field.from_i64(z, prec)
}

/// Sampled inputs are exact small integers; they are carried with digit
/// headroom so downstream inversions cannot push certified output precision
/// below the stated thresholds.
fn gen_prec(params: &Params) -> i64 {
    2 * params.prec + 8
}

fn random_kelt_integral(field: &Arc<LocalFieldDesc>, rng: &mut Prng, prec: i64) -> KElt {
    let n = field.degree();
    let coords = (0..n)
        .map(|_| padic_integral(rng, field.p(), 3, prec))
        .collect();
    field.elt(coords)
}

fn random_laurent(
    field: &Arc<LocalFieldDesc>,
    rng: &mut Prng,
    lo: i64,
    hi: i64,
    prec: i64,
) -> EqSeries {
    let zero = field.zero(prec);
    let mut pairs = Vec::new();
    for e in lo..=hi {
        if int_in(rng, 0, 2) > 0 {
            pairs.push((e, random_kelt_integral(field, rng, prec)));
        }
    }
    if pairs.is_empty() {
        pairs.push((lo, field.one(prec)));
    }
    LaurentSeries::from_pairs(&zero, pairs)
}

fn random_mixed(
    field: &Arc<LocalFieldDesc>,
    rng: &mut Prng,
    lo: i64,
    hi: i64,
    prec: i64,
) -> MxSeries {
    let zero = field.zero(prec);
    let mut pairs = Vec::new();
    for e in lo..=hi {
        if int_in(rng, 0, 2) > 0 {
            pairs.push((e, random_kelt_integral(field, rng, prec)));
        }
    }
    if pairs.is_empty() {
        pairs.push((lo, field.one(prec)));
    }
    MixedSeries::exact(&zero, pairs)
}

/// An admissible equal-characteristic parameter change: order one, unit
/// linear coefficient, polynomial support.
fn random_equal_parameter(
    field: &Arc<LocalFieldDesc>,
    rng: &mut Prng,
    prec: i64,
) -> EqSeries {
    let zero = field.zero(prec);
    let mut pairs = vec![(1i64, field.from_base(padic_unit(rng, field.p(), 3, prec)))];
    for e in 2..=5 {
        if int_in(rng, 0, 1) == 1 {
            pairs.push((e, random_kelt_integral(field, rng, prec)));
        }
    }
    LaurentSeries::from_pairs(&zero, pairs)
}

/// A first local parameter of K{{t}}: unit linear coefficient, valuation
/// >= 1 at exponents <= 0, integral above.
fn random_mixed_parameter(
    field: &Arc<LocalFieldDesc>,
    rng: &mut Prng,
    prec: i64,
) -> MxSeries {
    let p = field.p() as i64;
    let zero = field.zero(prec);
    let mut pairs = vec![(1i64, field.from_base(padic_unit(rng, field.p(), 3, prec)))];
    for e in -3..=0 {
        if int_in(rng, 0, 1) == 1 {
            pairs.push((e, random_kelt_integral(field, rng, prec).mul_i64(p)));
        }
    }
    for e in 2..=5 {
        if int_in(rng, 0, 1) == 1 {
            pairs.push((e, random_kelt_integral(field, rng, prec)));
        }
    }
    MixedSeries::exact(&zero, pairs)
}

fn random_weierstrass(
    field: &Arc<LocalFieldDesc>,
    rng: &mut Prng,
    max_deg: i64,
    prec: i64,
) -> WeierstrassPoly {
    let p = field.p() as i64;
    loop {
        let deg = int_in(rng, 1, max_deg) as usize;
        let mut coeffs = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            coeffs.push(kelt(field, p * int_in(rng, 0, p * p - 1), prec));
        }
        if coeffs[0].is_zero_to_prec() {
            coeffs[0] = kelt(field, p, prec);
        }
        coeffs.push(field.one(prec));
        let h = WeierstrassPoly::new(coeffs).expect("generated shape is Weierstrass");
        // resample nearly-inseparable draws: they are legitimate inputs but
        // demand precision beyond the battery budget
        let deriv = crate::polyquot::poly_derivative(h.coeffs());
        let reduced = crate::polyquot::poly_rem_monic(deriv, h.coeffs());
        let mat = crate::polyquot::mult_matrix(&reduced, h.coeffs());
        let disc = crate::polyquot::det_cofactor(&mat);
        match Coeff::vord(&disc) {
            Some(v) if v <= Rational64::new(6, 1) => return h,
            _ => continue,
        }
    }
}

/// Criterion 1: residue base identities, exact, both characteristics.
pub fn battery_residue_identities(params: &Params) -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(1, "residue base identities");
    for p in BATTERY_PRIMES {
        let field = LocalFieldDesc::qp(p);
        let zero = field.zero(params.prec);
        for j in -5..=5 {
            let eq = LaurentSeries::from_pairs(&zero, [(j, field.one(params.prec))]);
            let re = residue_equal_char(&eq)?;
            let expect = if j == -1 { 1 } else { 0 };
            rep.record(
                re.sub(&kelt(&field, expect, params.prec)).is_zero_to_prec(),
                || format!("equal char p={p} j={j}: got {re:?}"),
            );
            let mx = MixedSeries::exact(&zero, [(j, field.one(params.prec))]);
            let rm = residue_mixed_standard(&mx)?;
            rep.record(
                rm.sub(&kelt(&field, -expect, params.prec)).is_zero_to_prec(),
                || format!("mixed p={p} j={j}: got {rm:?}"),
            );
        }
    }
    Ok(rep)
}

/// Criterion 2: parameter invariance under 100 random admissible changes
/// per characteristic and prime; equal characteristic exact, mixed to
/// valuation >= prec - 2.
pub fn battery_parameter_invariance(params: &Params) -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(2, "parameter invariance");
    let need = Rational64::new(params.prec - 2, 1);
    for p in BATTERY_PRIMES {
        let field = LocalFieldDesc::qp(p);
        let mut rng = substream(params.seed, 0x70617231 ^ p);
        for case in 0..100 {
            // equal characteristic
            let f = random_laurent(&field, &mut rng, -4, 4, gen_prec(params));
            let t_new = random_equal_parameter(&field, &mut rng, gen_prec(params));
            let direct = residue_equal_char(&f)?;
            let rewritten = change_parameter_equal(&f, &t_new, 24)?;
            let indirect = residue_equal_char(&rewritten)?;
            rep.record(direct.sub(&indirect).is_zero_to_prec(), || {
                format!("equal p={p} case {case}: {direct:?} vs {indirect:?}")
            });
            // mixed characteristic
            let f = random_mixed(&field, &mut rng, -4, 4, gen_prec(params));
            let t_new = random_mixed_parameter(&field, &mut rng, gen_prec(params));
            let direct = residue_mixed_standard(&f)?;
            let rewritten = change_parameter_mixed(&f, &t_new, params)?;
            let indirect = residue_mixed_standard(&rewritten)?;
            let diff = direct.sub(&indirect);
            rep.record(Coeff::val_at_least(&diff, need), || {
                format!("mixed p={p} case {case}: {direct:?} vs {indirect:?}")
            });
        }
    }
    Ok(rep)
}

fn unram_poly(p: u64, deg: usize) -> Vec<BigInt> {
    // fixed irreducible-mod-p polynomials for the battery towers
    let c: &[i64] = match (p, deg) {
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (3, 2) => &[1, 0, 1],
        (3, 3) => &[1, 2, 0, 1],
        (5, 2) => &[2, 0, 1],
        (5, 3) => &[1, 1, 0, 1],
        _ => panic!("battery tower outside the supported table"),
    };
    c.iter().map(|&z| BigInt::from(z)).collect()
}

/// Criterion 3: functoriality diagrams for unramified degree 2-3, tame
/// e = 2-3 (both characteristics), and the Eisenstein constant-field
/// extension of degree 2 in mixed characteristic; 50 random forms each.
pub fn battery_functoriality(params: &Params) -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(3, "functoriality of residues");
    let need = params.prec - 2;
    for p in BATTERY_PRIMES {
        let base = LocalFieldDesc::qp(p);
        let mut rng = substream(params.seed, 0x66756e63 ^ p);
        // unramified constant extensions, both characteristics
        for deg in [2usize, 3] {
            let kext = LocalFieldDesc::unramified(p, unram_poly(p, deg))?;
            let samples: Vec<Form> = (0..50)
                .map(|_| Form::Equal(random_laurent(&kext, &mut rng, -5, 5, params.prec)))
                .collect();
            let r = functoriality_check(&ExtShape::EqualConstant, &samples, need)?;
            rep.record(r.all_ok, || format!("equal unram deg {deg} p={p}: {r:?}"));
            let samples: Vec<Form> = (0..50)
                .map(|_| Form::Mixed(random_mixed(&kext, &mut rng, -5, 5, params.prec)))
                .collect();
            let r = functoriality_check(&ExtShape::MixedConstant, &samples, need)?;
            rep.record(r.all_ok, || format!("mixed unram deg {deg} p={p}: {r:?}"));
        }
        // tame totally ramified, equal characteristic
        for e in [2u32, 3] {
            let samples: Vec<Form> = (0..50)
                .map(|_| Form::Equal(random_laurent(&base, &mut rng, -5, 5, params.prec)))
                .collect();
            let r = functoriality_check(&ExtShape::EqualTame { e }, &samples, need)?;
            rep.record(r.all_ok, || format!("equal tame e={e} p={p}: {r:?}"));
        }
        // tame in mixed characteristic
        for e in [2u32, 3] {
            let samples: Vec<Form> = (0..50)
                .map(|_| Form::Mixed(random_mixed(&base, &mut rng, -5, 5, params.prec)))
                .collect();
            let r = functoriality_check(&ExtShape::MixedTame { e }, &samples, need)?;
            rep.record(r.all_ok, || format!("mixed tame e={e} p={p}: {r:?}"));
        }
        // Eisenstein constant-field extension of degree 2: x^2 - p
        {
            let zero = base.zero(params.prec);
            let min_poly = vec![
                MixedSeries::constant(kelt(&base, -(p as i64), params.prec)),
                MixedSeries::zero_exact(&zero),
                MixedSeries::constant(base.one(params.prec)),
            ];
            let samples: Vec<Form> = (0..50)
                .map(|_| {
                    Form::MixedVec(vec![
                        random_mixed(&base, &mut rng, -4, 3, params.prec),
                        random_mixed(&base, &mut rng, -4, 3, params.prec),
                    ])
                })
                .collect();
            let r = functoriality_check(&ExtShape::MixedPoly { min_poly }, &samples, need)?;
            rep.record(r.all_ok, || format!("mixed eisenstein deg 2 p={p}: {r:?}"));
        }
    }
    Ok(rep)
}

fn random_form(
    field: &Arc<LocalFieldDesc>,
    rng: &mut Prng,
    params: &Params,
) -> Result<FormOverB> {
    let n_terms = int_in(rng, 1, 3);
    let mut terms = Vec::new();
    for _ in 0..n_terms {
        let has_pole = int_in(rng, 0, 3) > 0;
        let pole = if has_pole {
            let h = random_weierstrass(field, rng, 3, gen_prec(params));
            let r = int_in(rng, 1, 3) as u32;
            Some((h, r))
        } else {
            None
        };
        let numerator = random_mixed(field, rng, 0, 5, gen_prec(params));
        let pi_exp = int_in(rng, -2, 2);
        terms.push(FormTerm { pi_exp, numerator, pole });
    }
    FormOverB::new(terms)
}

/// Criterion 4: reciprocity over O_K[[T]]: the two worked ledgers, then
/// 200 randomised forms with total valuation >= prec - 3.
pub fn battery_reciprocity(params: &Params) -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(4, "reciprocity over O_K[[T]]");
    // worked ledgers at every battery prime
    for p in BATTERY_PRIMES {
        let field = LocalFieldDesc::qp(p);
        let zero = field.zero(params.prec);
        let h_lin = WeierstrassPoly::new(vec![
            kelt(&field, -(p as i64), params.prec),
            field.one(params.prec),
        ])?;
        let form = FormOverB::new(vec![FormTerm {
            pi_exp: 0,
            numerator: MixedSeries::constant(field.one(params.prec)),
            pole: Some((h_lin, 1)),
        }])?;
        let ledger = reciprocity_check(&form, params)?;
        let e0 = &ledger.entries[0].rres;
        let e1 = &ledger.entries[1].rres;
        rep.record(
            ledger.verdict == Verdict::Pass
                && e0.sub(&kelt(&field, -1, params.prec)).is_zero_to_prec()
                && e1.sub(&kelt(&field, 1, params.prec)).is_zero_to_prec(),
            || format!("worked ledger dT/(t-p) p={p}: {ledger:?}"),
        );
        let h_quad = WeierstrassPoly::new(vec![
            kelt(&field, -(p as i64), params.prec),
            zero.clone(),
            field.one(params.prec),
        ])?;
        let ledger = reciprocity_check(&FormOverB::d_log(&h_quad), params)?;
        let e0 = &ledger.entries[0].rres;
        let e1 = &ledger.entries[1].rres;
        rep.record(
            ledger.verdict == Verdict::Pass
                && e0.sub(&kelt(&field, -2, params.prec)).is_zero_to_prec()
                && e1.sub(&kelt(&field, 2, params.prec)).is_zero_to_prec(),
            || format!("worked ledger d(h)/h p={p}: {ledger:?}"),
        );
    }
    // randomised battery: ~67 per prime
    for p in BATTERY_PRIMES {
        let field = LocalFieldDesc::qp(p);
        let mut rng = substream(params.seed, 0x72656370 ^ p);
        let count = if p == 5 { 66 } else { 67 };
        for case in 0..count {
            let form = random_form(&field, &mut rng, params)?;
            let sub = Params { seed: params.seed ^ (case as u64), ..*params };
            match reciprocity_check(&form, &sub) {
                Ok(ledger) => rep.record(ledger.verdict == Verdict::Pass, || {
                    format!("p={p} case {case}: total {:?}", ledger.total)
                }),
                Err(e) => rep.record(false, || format!("p={p} case {case}: error {e}")),
            }
        }
    }
    Ok(rep)
}

fn fixed_extensions(params: &Params) -> Result<Vec<(Arc<LocalFieldDesc>, ExtensionOverB)>> {
    let mut out = Vec::new();
    for (p, coeffs) in [
        (5u64, vec![(0i64, -5i64), (1, -5), (3, -1)]),
        (3, vec![(0, -3), (1, -3), (3, -1)]),
        (5, vec![(0, -5), (2, -1)]),
    ] {
        let field = LocalFieldDesc::qp(p);
        let gp = gen_prec(params);
        let zero = field.zero(gp);
        let f0 = MixedSeries::exact(
            &zero,
            coeffs.iter().map(|(e, c)| (*e, kelt(&field, *c, gp))),
        );
        let ext = ExtensionOverB::new(vec![
            f0,
            MixedSeries::zero_exact(&zero),
            MixedSeries::constant(field.one(gp)),
        ])?;
        out.push((field, ext));
    }
    Ok(out)
}

/// Criterion 5: extension reciprocity on 20 randomised forms over each of
/// three fixed hypersurface extensions.
pub fn battery_extension_reciprocity(params: &Params) -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(5, "extension reciprocity");
    for (idx, (field, ext)) in fixed_extensions(params)?.into_iter().enumerate() {
        let mut rng = substream(params.seed, 0x65787431 ^ idx as u64);
        for case in 0..20 {
            let c0 = random_form(&field, &mut rng, params)?;
            let c1 = random_form(&field, &mut rng, params)?;
            let omega = [c0, c1];
            let sub = Params { seed: params.seed ^ ((case as u64) << 8), ..*params };
            match reciprocity_check_extension(&omega, &ext, &sub) {
                Ok(ledger) => rep.record(ledger.verdict == Verdict::Pass, || {
                    format!("ext {idx} case {case}: total {:?}", ledger.total)
                }),
                Err(e) => rep.record(false, || format!("ext {idx} case {case}: error {e}")),
            }
        }
    }
    Ok(rep)
}

/// Criterion 6: different = Jacobian on the 12-member battery, with the
/// floor formula on every Eisenstein member.
pub fn battery_different(params: &Params) -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(6, "different = Jacobian");
    use crate::dualizing::{different_valuation, floor_formula_check, CdvrExtension};
    for p in BATTERY_PRIMES {
        let qp = LocalFieldDesc::qp(p);
        // Eisenstein degree 2 and 3: x^2 - p, x^3 - p
        for deg in [2usize, 3] {
            let mut g = vec![vec![BigInt::from(-(p as i64))]];
            for _ in 1..deg {
                g.push(vec![BigInt::from(0)]);
            }
            g.push(vec![BigInt::from(1)]);
            let ext = CdvrExtension::new(&qp, g, StepKind::Eisenstein, params.prec)?;
            match different_valuation(&ext) {
                Ok(dr) => {
                    let e = deg as i64;
                    // tame law: p not dividing e forces d = e - 1
                    let tame_ok = if e % (p as i64) != 0 { dr.d_jacobian == e - 1 } else { true };
                    rep.record(dr.d_jacobian == dr.d_oracle && tame_ok, || {
                        format!("eisenstein x^{deg}-{p}: {dr:?}")
                    });
                    let floor = floor_formula_check(&ext, -2 * e, 2 * e)?;
                    rep.record(floor.all_ok, || format!("floor x^{deg}-{p}: {floor:?}"));
                }
                Err(e) => rep.record(false, || format!("eisenstein x^{deg}-{p}: {e}")),
            }
        }
        // unramified degree 2 and 3: d = 0
        for deg in [2usize, 3] {
            let g = unram_poly(p, deg).into_iter().map(|z| vec![z]).collect();
            let ext = CdvrExtension::new(&qp, g, StepKind::Unramified, params.prec)?;
            match different_valuation(&ext) {
                Ok(dr) => rep.record(dr.d_jacobian == 0 && dr.d_oracle == 0, || {
                    format!("unramified deg {deg} p={p}: {dr:?}")
                }),
                Err(e) => rep.record(false, || format!("unramified deg {deg} p={p}: {e}")),
            }
        }
    }
    // the named spot values
    {
        let q5 = LocalFieldDesc::qp(5);
        let ext = CdvrExtension::new(
            &q5,
            vec![vec![BigInt::from(-5)], vec![BigInt::from(0)], vec![BigInt::from(1)]],
            StepKind::Eisenstein,
            params.prec,
        )?;
        let dr = different_valuation(&ext)?;
        rep.record(dr.d_jacobian == 1, || format!("x^2-5: d = {}", dr.d_jacobian));
        let q2 = LocalFieldDesc::qp(2);
        let ext = CdvrExtension::new(
            &q2,
            vec![vec![BigInt::from(-2)], vec![BigInt::from(0)], vec![BigInt::from(1)]],
            StepKind::Eisenstein,
            params.prec,
        )?;
        let dr = different_valuation(&ext)?;
        rep.record(dr.d_jacobian == 3, || format!("x^2-2 over Q_2: d = {}", dr.d_jacobian));
    }
    Ok(rep)
}

/// Criterion 7: W = codifferent * dT on the cubic surfaces at p = 3, 5,
/// plus the trivial surface sanity check.
pub fn battery_dualizing(params: &Params) -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(7, "explicit dualizing module");
    use crate::dualizing::{verify_w_equals_codifferent, SurfacePresentation};
    for p in [3u64, 5] {
        let field = LocalFieldDesc::qp(p);
        let zero = field.zero(params.prec);
        let pi = p as i64;
        let f0 = MixedSeries::exact(
            &zero,
            [(0i64, kelt(&field, -pi, params.prec)),
             (1, kelt(&field, -pi, params.prec)),
             (3, kelt(&field, -1, params.prec))],
        );
        let surface = SurfacePresentation::new(vec![
            f0,
            MixedSeries::zero_exact(&zero),
            MixedSeries::constant(field.one(params.prec)),
        ])?;
        let cert = verify_w_equals_codifferent(&surface, 20, 4, params)?;
        rep.record(cert.verdict == Verdict::Pass, || {
            format!("surface x^2 = t^3 + {p}t + {p}: {cert:?}")
        });
    }
    // trivial surface: A = B, W = B dT
    {
        let field = LocalFieldDesc::qp(5);
        let surface = SurfacePresentation::new(vec![
            MixedSeries::constant(kelt(&field, -1, params.prec)),
            MixedSeries::constant(field.one(params.prec)),
        ])?;
        let cert = verify_w_equals_codifferent(&surface, 6, 4, params)?;
        rep.record(cert.verdict == Verdict::Pass, || format!("trivial surface: {cert:?}"));
    }
    Ok(rep)
}

/// Criterion 8: residue-field compatibility on 50 integral forms over
/// standard mixed fields, exact up to the recorded global sign.
pub fn battery_residue_field_compat(params: &Params) -> Result<CriterionReport> {
    let mut rep = CriterionReport::new(8, "residue-field compatibility");
    let mut count = 0u64;
    'outer: for p in BATTERY_PRIMES {
        // standard fields over Q_p and over an unramified quadratic
        let fields = [
            LocalFieldDesc::qp(p),
            LocalFieldDesc::unramified(p, unram_poly(p, 2))?,
        ];
        let mut rng = substream(params.seed, 0x72666331 ^ p);
        for case in 0..17 {
            let field = &fields[(case % 3 == 2) as usize];
            let f = random_mixed(field, &mut rng, -5, 5, params.prec);
            let r = reduce_and_compare(&f)?;
            rep.record(r.residue_integral && r.matches && r.sign == -1, || {
                format!("p={p} case {case}: {r:?}")
            });
            count += 1;
            if count >= 50 {
                break 'outer;
            }
        }
    }
    Ok(rep)
}

/// Run every battery; `params.seed` controls all randomised draws.
pub fn run_selftest(params: &Params) -> Result<SelftestReport> {
    let criteria = vec![
        battery_residue_identities(params)?,
        battery_parameter_invariance(params)?,
        battery_functoriality(params)?,
        battery_reciprocity(params)?,
        battery_extension_reciprocity(params)?,
        battery_different(params)?,
        battery_dualizing(params)?,
        battery_residue_field_compat(params)?,
    ];
    let all_pass = criteria.iter().all(|c| c.pass);
    Ok(SelftestReport { criteria, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    // The full batteries run in the acceptance suite; here we smoke-test
    // the cheap ones so `cargo test` stays fast.
    #[test]
    fn criterion_1_smoke() {
        let rep = battery_residue_identities(&Params::default()).unwrap();
        assert!(rep.pass, "{:?}", rep.failures);
        assert_eq!(rep.cases_run, 66);
    }

    #[test]
    fn criterion_8_smoke() {
        let rep = battery_residue_field_compat(&Params::default()).unwrap();
        assert!(rep.pass, "{:?}", rep.failures);
        assert_eq!(rep.cases_run, 50);
    }
}
