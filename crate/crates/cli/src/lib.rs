//! Problem files, reports and dispatch for the `twolocal` command-line
//! front end.
//!
//! Problem files are strict JSON: unknown keys are rejected, and every
//! number is a decimal-integer string or an `a/b` rational string, never a
//! float. Reports serialize with a stable field order; for a fixed file,
//! flags and seed the JSON output is byte-identical except for the final
//! `timing_ms` field.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::json;

use twolocal_core::dualizing::{
    different_valuation, floor_formula_check, verify_w_equals_codifferent, w_membership,
    AFraction, CdvrExtension, SurfacePresentation, TraceVerdict,
};
use twolocal_core::fields::{LocalFieldDesc, StepKind};
use twolocal_core::padic::PadicApprox;
use twolocal_core::reciprocity::{
    reciprocity_check, reciprocity_check_extension, ExtensionOverB, FormOverB, FormTerm,
    ResidueLedger, Verdict, WeierstrassPoly,
};
use twolocal_core::residues::{
    change_parameter_equal, change_parameter_mixed, functoriality_check, reduce_and_compare,
    residue_equal_char, residue_mixed_ext, residue_mixed_standard, EqSeries, ExtShape, Form,
    KElt, MxSeries, Params,
};
use twolocal_core::series::{LaurentSeries, MixedSeries};
use twolocal_core::{battery, Coeff, Error};

pub const TOOL: &str = concat!("twolocal ", env!("CARGO_PKG_VERSION"));

/// Exit codes: verdicts map to 0/1/2, usage errors to 64, file/data errors
/// to 65.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
/// File parse/validation problems share the usage-error space.
pub const EXIT_DATA: i32 = 64;

#[derive(Debug, Deserialize, Serialize, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct OptionsStanza {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prec: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[i64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct FieldDescSpec {
    pub prime: u64,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unramified: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eisenstein: Option<Vec<Vec<String>>>,
}

pub type SeriesLit = Vec<(i64, String)>;

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct ResidueStanza {
    pub base: FieldDescSpec,
    /// "equal" or "mixed"
    pub char: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<SeriesLit>,
    /// Coefficient vector over a presented extension M[x]/(f).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form_vector: Option<Vec<SeriesLit>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ext_poly: Option<Vec<SeriesLit>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_parameter: Option<SeriesLit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare_residue_field: Option<bool>,
}

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ext_field: Option<FieldDescSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_poly: Option<Vec<SeriesLit>>,
}

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct FunctStanza {
    pub base: FieldDescSpec,
    pub shape: ShapeSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forms: Option<Vec<SeriesLit>>,
}

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct PoleSpec {
    pub poly: Vec<String>,
    pub order: u32,
}

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_exp: Option<i64>,
    pub numerator: SeriesLit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole: Option<PoleSpec>,
}

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct ReciprocityStanza {
    pub base: FieldDescSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermSpec>>,
    /// Monic extension polynomial F, as series coefficients low to high.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<Vec<SeriesLit>>,
    /// Coefficient vector (in x) of term lists for the extension case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<Vec<TermSpec>>>,
}

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct DifferentStanza {
    pub base: FieldDescSpec,
    /// Coefficients of g, each a coordinate vector over the base.
    pub poly: Vec<Vec<String>>,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor_range: Option<[i64; 2]>,
}

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub num: Vec<SeriesLit>,
    pub den: Vec<SeriesLit>,
}

#[derive(Debug, Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct DualizingStanza {
    pub base: FieldDescSpec,
    pub surface: Vec<SeriesLit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
}

#[derive(Debug, Deserialize, Serialize, Clone, Default)]
#[serde(deny_unknown_fields)]
pub struct SelftestStanza {
    /// Restrict to a subset of criteria (1..=8).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only: Option<Vec<u32>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub kind: String,
    #[serde(default)]
    pub options: OptionsStanza,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue: Option<ResidueStanza>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functoriality: Option<FunctStanza>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reciprocity: Option<ReciprocityStanza>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub different: Option<DifferentStanza>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dualizing: Option<DualizingStanza>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selftest: Option<SelftestStanza>,
}

/// Flag overrides from the command line.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub prec: Option<i64>,
    pub window: Option<(i64, i64)>,
    pub threshold: Option<i64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ResolvedOptions {
    pub prec: i64,
    pub window: [i64; 2],
    pub threshold: i64,
    pub seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub kind: String,
    pub options: ResolvedOptions,
    pub inputs: serde_json::Value,
    pub results: serde_json::Value,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing_ms: u128,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.verdict.as_str() {
            "PASS" => EXIT_PASS,
            "FAIL" => EXIT_FAIL,
            _ => EXIT_INCONCLUSIVE,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("{} — {}\n", self.tool, self.kind));
        s.push_str(&format!(
            "options: prec={} window=[{},{}] threshold={} seed={}\n",
            self.options.prec,
            self.options.window[0],
            self.options.window[1],
            self.options.threshold,
            self.options.seed
        ));
        if let Some(e) = &self.error {
            s.push_str(&format!("error: {e}\n"));
        }
        s.push_str(&render_value("results", &self.results, 0));
        s.push_str(&format!("verdict: {}\n", self.verdict));
        s.push_str(&format!("timing: {} ms\n", self.timing_ms));
        s
    }
}

fn render_value(key: &str, v: &serde_json::Value, depth: usize) -> String {
    let pad = "  ".repeat(depth);
    match v {
        serde_json::Value::Object(m) => {
            let mut s = format!("{pad}{key}:\n");
            for (k, val) in m {
                s.push_str(&render_value(k, val, depth + 1));
            }
            s
        }
        serde_json::Value::Array(a) => {
            let mut s = format!("{pad}{key}:\n");
            for (i, val) in a.iter().enumerate() {
                s.push_str(&render_value(&format!("[{i}]"), val, depth + 1));
            }
            s
        }
        other => format!("{pad}{key}: {other}\n"),
    }
}

/// A data-level problem with the input file (exit 65).
#[derive(Debug)]
pub struct DataError(pub String);

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for DataError {}

type CliResult<T> = Result<T, DataError>;

pub fn parse_problem(text: &str) -> CliResult<ProblemFile> {
    let pf: ProblemFile =
        serde_json::from_str(text).map_err(|e| DataError(format!("problem file: {e}")))?;
    if pf.version != 1 {
        return Err(DataError(format!("unsupported version {}", pf.version)));
    }
    let stanzas = [
        pf.residue.is_some(),
        pf.functoriality.is_some(),
        pf.reciprocity.is_some(),
        pf.different.is_some(),
        pf.dualizing.is_some(),
        pf.selftest.is_some(),
    ];
    if stanzas.iter().filter(|b| **b).count() != 1 {
        return Err(DataError("exactly one stanza is required".into()));
    }
    let matches_kind = match pf.kind.as_str() {
        "residue" => pf.residue.is_some(),
        "functoriality" => pf.functoriality.is_some(),
        "reciprocity" => pf.reciprocity.is_some(),
        "different" => pf.different.is_some(),
        "dualizing" => pf.dualizing.is_some(),
        "selftest" => pf.selftest.is_some(),
        other => return Err(DataError(format!("unknown kind `{other}`"))),
    };
    if !matches_kind {
        return Err(DataError(format!(
            "kind `{}` does not match the provided stanza",
            pf.kind
        )));
    }
    Ok(pf)
}

pub fn resolve_params(
    opts: &OptionsStanza,
    over: &Overrides,
) -> CliResult<(Params, ResolvedOptions)> {
    let prec = over.prec.or(opts.prec).unwrap_or(16);
    if !(4..=256).contains(&prec) {
        return Err(DataError(format!("prec {prec} outside the supported range 4..=256")));
    }
    let window = over
        .window
        .map(|(a, b)| [a, b])
        .or(opts.window)
        .unwrap_or([-64, 64]);
    if window[0] >= 0 || window[1] <= 0 || window[0] < -4096 || window[1] > 4096 {
        return Err(DataError(format!(
            "window [{},{}] must straddle 0 and stay within +-4096",
            window[0], window[1]
        )));
    }
    let threshold = over.threshold.or(opts.threshold).unwrap_or(prec - 3);
    let seed = over.seed.or(opts.seed).unwrap_or(0);
    let params = Params { prec, lo: window[0], hi: window[1], threshold, seed };
    let resolved = ResolvedOptions { prec, window, threshold, seed };
    Ok((params, resolved))
}

/// Literal coefficients are exact; carry them with digit headroom so that
/// the certified output precision is limited by the computation, not the
/// encoding.
fn literal_prec(params: &Params) -> i64 {
    2 * params.prec + 8
}

fn parse_coeff(field: &Arc<LocalFieldDesc>, s: &str, prec: i64) -> CliResult<PadicApprox> {
    let p = field.p();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a
            .trim()
            .parse()
            .map_err(|_| DataError(format!("bad rational numerator `{a}`")))?;
        let den: BigInt = b
            .trim()
            .parse()
            .map_err(|_| DataError(format!("bad rational denominator `{b}`")))?;
        PadicApprox::from_ratio(p, &num, &den, prec)
            .map_err(|e| DataError(format!("literal `{s}`: {e}")))
    } else {
        let z: BigInt = s
            .trim()
            .parse()
            .map_err(|_| DataError(format!("bad integer literal `{s}`")))?;
        Ok(PadicApprox::from_bigint(p, &z, prec))
    }
}

fn parse_kelt(field: &Arc<LocalFieldDesc>, s: &str, prec: i64) -> CliResult<KElt> {
    Ok(field.from_base(parse_coeff(field, s, prec)?))
}

pub fn build_field(spec: &FieldDescSpec) -> CliResult<Arc<LocalFieldDesc>> {
    let p = spec.prime;
    if !primal(p) {
        return Err(DataError(format!("prime {p} is not prime")));
    }
    let ints = |v: &Vec<String>| -> CliResult<Vec<BigInt>> {
        v.iter()
            .map(|s| s.parse().map_err(|_| DataError(format!("bad integer `{s}`"))))
            .collect()
    };
    match spec.kind.as_str() {
        "trivial" => Ok(LocalFieldDesc::qp(p)),
        "unramified" => {
            let poly = spec
                .poly
                .as_ref()
                .ok_or_else(|| DataError("unramified field needs `poly`".into()))?;
            LocalFieldDesc::unramified(p, ints(poly)?).map_err(|e| DataError(format!("field: {e}")))
        }
        "eisenstein" => {
            let poly = spec
                .poly
                .as_ref()
                .ok_or_else(|| DataError("eisenstein field needs `poly`".into()))?;
            LocalFieldDesc::eisenstein(p, ints(poly)?).map_err(|e| DataError(format!("field: {e}")))
        }
        "tower" => {
            let u = spec
                .unramified
                .as_ref()
                .ok_or_else(|| DataError("tower needs `unramified`".into()))?;
            let e = spec
                .eisenstein
                .as_ref()
                .ok_or_else(|| DataError("tower needs `eisenstein`".into()))?;
            let base = LocalFieldDesc::unramified(p, ints(u)?)
                .map_err(|er| DataError(format!("field: {er}")))?;
            let coeffs: CliResult<Vec<Vec<BigInt>>> = e.iter().map(ints).collect();
            LocalFieldDesc::eisenstein_over(&base, coeffs?)
                .map_err(|er| DataError(format!("field: {er}")))
        }
        other => Err(DataError(format!("unknown field kind `{other}`"))),
    }
}

fn primal(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn build_eq_series(field: &Arc<LocalFieldDesc>, lit: &SeriesLit, prec: i64) -> CliResult<EqSeries> {
    let zero = field.zero(prec);
    let mut pairs = Vec::new();
    for (e, s) in lit {
        pairs.push((*e, parse_kelt(field, s, prec)?));
    }
    Ok(LaurentSeries::from_pairs(&zero, pairs))
}

fn build_mx_series(field: &Arc<LocalFieldDesc>, lit: &SeriesLit, prec: i64) -> CliResult<MxSeries> {
    let zero = field.zero(prec);
    let mut pairs = Vec::new();
    for (e, s) in lit {
        pairs.push((*e, parse_kelt(field, s, prec)?));
    }
    Ok(MixedSeries::exact(&zero, pairs))
}

fn render_kelt(v: &KElt) -> String {
    format!("{v:?}")
}

fn error_verdict(e: &Error) -> &'static str {
    match e {
        Error::PrecisionLoss(_) | Error::WindowExhausted(_) | Error::Undecided(_) => {
            "INCONCLUSIVE"
        }
        Error::Disagreement(_) => "FAIL",
        _ => "ERROR",
    }
}

fn ledger_json(ledger: &ResidueLedger) -> serde_json::Value {
    json!({
        "entries": ledger.entries.iter().map(|e| json!({
            "site": e.site.render(),
            "coeff_field": e.coeff_field,
            "residue": e.res_rendered,
            "rres": render_kelt(&e.rres),
            "certified_prec": e.certified_prec.to_string(),
        })).collect::<Vec<_>>(),
        "total": render_kelt(&ledger.total),
        "threshold": ledger.threshold,
        "verdict": ledger.verdict.as_str(),
    })
}

pub fn run_problem(pf: &ProblemFile, over: &Overrides) -> CliResult<Report> {
    let (params, resolved) = resolve_params(&pf.options, over)?;
    let started = std::time::Instant::now();
    let (results, verdict, error) = match pf.kind.as_str() {
        "residue" => run_residue(pf.residue.as_ref().unwrap(), &params)?,
        "functoriality" => run_functoriality(pf.functoriality.as_ref().unwrap(), &params)?,
        "reciprocity" => run_reciprocity(pf.reciprocity.as_ref().unwrap(), &params)?,
        "different" => run_different(pf.different.as_ref().unwrap(), &params)?,
        "dualizing" => run_dualizing(pf.dualizing.as_ref().unwrap(), &params)?,
        "selftest" => run_selftest_stanza(pf.selftest.as_ref().unwrap(), &params)?,
        _ => unreachable!("validated in parse_problem"),
    };
    Ok(Report {
        tool: TOOL.into(),
        kind: pf.kind.clone(),
        options: resolved,
        inputs: serde_json::to_value(pf).expect("echo"),
        results,
        verdict: verdict.into(),
        error,
        timing_ms: started.elapsed().as_millis(),
    })
}

type RunOut = (serde_json::Value, &'static str, Option<String>);

fn soft_error(e: Error) -> CliResult<RunOut> {
    let v = error_verdict(&e);
    if v == "ERROR" {
        Err(DataError(format!("{e}")))
    } else {
        Ok((json!({}), v, Some(format!("{e}"))))
    }
}

fn run_residue(st: &ResidueStanza, params: &Params) -> CliResult<RunOut> {
    let field = build_field(&st.base)?;
    let prec = literal_prec(params);
    let computed: Result<(KElt, serde_json::Value), Error> = (|| {
        match (st.char.as_str(), &st.ext_poly) {
            ("equal", None) => {
                let lit = st
                    .form
                    .as_ref()
                    .ok_or_else(|| Error::Presentation("equal-char residue needs `form`".into()))?;
                let mut f =
                    build_eq_series(&field, lit, prec).map_err(|e| Error::Presentation(e.0))?;
                if let Some(npar) = &st.new_parameter {
                    let t_new = build_eq_series(&field, npar, prec)
                        .map_err(|e| Error::Presentation(e.0))?;
                    f = change_parameter_equal(&f, &t_new, params.hi)?;
                }
                let r = residue_equal_char(&f)?;
                Ok((r, json!({"route": "equal characteristic"})))
            }
            ("mixed", None) => {
                let lit = st
                    .form
                    .as_ref()
                    .ok_or_else(|| Error::Presentation("mixed residue needs `form`".into()))?;
                let mut f =
                    build_mx_series(&field, lit, prec).map_err(|e| Error::Presentation(e.0))?;
                if let Some(npar) = &st.new_parameter {
                    let t_new = build_mx_series(&field, npar, prec)
                        .map_err(|e| Error::Presentation(e.0))?;
                    f = change_parameter_mixed(&f, &t_new, params)?;
                }
                if st.compare_residue_field.unwrap_or(false) {
                    let rep = reduce_and_compare(&f)?;
                    let r = rep.residue.clone();
                    return Ok((
                        r,
                        json!({
                            "route": "mixed standard with residue-field comparison",
                            "residue_integral": rep.residue_integral,
                            "reduced_residue": rep.reduced_residue.render(),
                            "residue_field_residue": rep.residue_field_residue.render(),
                            "global_sign": rep.sign,
                            "matches": rep.matches,
                        }),
                    ));
                }
                let r = residue_mixed_standard(&f)?;
                Ok((r, json!({"route": "mixed standard"})))
            }
            ("mixed", Some(ext_lit)) => {
                let vec_lit = st.form_vector.as_ref().ok_or_else(|| {
                    Error::Presentation("extension residue needs `form_vector`".into())
                })?;
                let min_poly: Result<Vec<MxSeries>, Error> = ext_lit
                    .iter()
                    .map(|l| build_mx_series(&field, l, prec).map_err(|e| Error::Presentation(e.0)))
                    .collect();
                let coeffs: Result<Vec<MxSeries>, Error> = vec_lit
                    .iter()
                    .map(|l| build_mx_series(&field, l, prec).map_err(|e| Error::Presentation(e.0)))
                    .collect();
                let r = residue_mixed_ext(&coeffs?, &min_poly?)?;
                Ok((r, json!({"route": "mixed via presentation trace"})))
            }
            (other, _) => Err(Error::Presentation(format!(
                "char must be `equal` or `mixed` (got `{other}`)"
            ))),
        }
    })();
    match computed {
        Ok((r, extra)) => {
            let mut results = extra;
            results["residue"] = json!(render_kelt(&r));
            results["certified_prec"] = json!(Coeff::prec_bound(&r).to_string());
            let ok = Coeff::prec_bound(&r) >= num_rational::Rational64::new(1, 1);
            let verdict = if !ok {
                "INCONCLUSIVE"
            } else if results
                .get("matches")
                .map_or(true, |m| m.as_bool().unwrap_or(true))
            {
                "PASS"
            } else {
                "FAIL"
            };
            Ok((results, verdict, None))
        }
        Err(e) => soft_error(e),
    }
}

fn build_shape(st: &FunctStanza, field: &Arc<LocalFieldDesc>, prec: i64) -> CliResult<ExtShape> {
    match st.shape.kind.as_str() {
        "equal_constant" => Ok(ExtShape::EqualConstant),
        "mixed_constant" => Ok(ExtShape::MixedConstant),
        "equal_tame" => Ok(ExtShape::EqualTame {
            e: st.shape.e.ok_or_else(|| DataError("tame shape needs `e`".into()))?,
        }),
        "mixed_tame" => Ok(ExtShape::MixedTame {
            e: st.shape.e.ok_or_else(|| DataError("tame shape needs `e`".into()))?,
        }),
        "mixed_poly" => {
            let lits = st
                .shape
                .min_poly
                .as_ref()
                .ok_or_else(|| DataError("mixed_poly shape needs `min_poly`".into()))?;
            let min_poly: CliResult<Vec<MxSeries>> =
                lits.iter().map(|l| build_mx_series(field, l, prec)).collect();
            Ok(ExtShape::MixedPoly { min_poly: min_poly? })
        }
        other => Err(DataError(format!("unknown shape `{other}`"))),
    }
}

fn run_functoriality(st: &FunctStanza, params: &Params) -> CliResult<RunOut> {
    let prec = literal_prec(params);
    // for constant extensions the sample forms live over the extension field
    let coeff_field = match (st.shape.kind.as_str(), &st.shape.ext_field) {
        ("equal_constant" | "mixed_constant", Some(spec)) => build_field(spec)?,
        ("equal_constant" | "mixed_constant", None) => {
            return Err(DataError("constant shape needs `ext_field`".into()))
        }
        _ => build_field(&st.base)?,
    };
    let shape = build_shape(st, &build_field(&st.base)?, prec)?;
    let equal_char = matches!(shape, ExtShape::EqualConstant | ExtShape::EqualTame { .. });
    let mut forms = Vec::new();
    if let Some(lits) = &st.forms {
        for l in lits {
            forms.push(if equal_char {
                Form::Equal(build_eq_series(&coeff_field, l, prec)?)
            } else {
                Form::Mixed(build_mx_series(&coeff_field, l, prec)?)
            });
        }
    } else {
        let n = st.samples.unwrap_or(50);
        let mut rng = twolocal_core::prng::substream(params.seed, 0x636c6931);
        for _ in 0..n {
            forms.push(random_form_for_shape(&shape, &coeff_field, &mut rng, prec));
        }
    }
    match functoriality_check(&shape, &forms, params.prec - 2) {
        Ok(rep) => {
            let results = json!({
                "shape": rep.shape,
                "required_val": rep.required_val,
                "samples": rep.samples.iter().map(|s| json!({
                    "lhs": render_kelt(&s.lhs),
                    "rhs": render_kelt(&s.rhs),
                    "ok": s.ok,
                })).collect::<Vec<_>>(),
                "all_ok": rep.all_ok,
            });
            let verdict = if rep.all_ok { "PASS" } else { "FAIL" };
            Ok((results, verdict, None))
        }
        Err(e) => soft_error(e),
    }
}

fn random_form_for_shape(
    shape: &ExtShape,
    field: &Arc<LocalFieldDesc>,
    rng: &mut twolocal_core::prng::Prng,
    prec: i64,
) -> Form {
    let zero = field.zero(prec);
    let n = field.degree();
    let mut pairs = Vec::new();
    for e in -5..=5 {
        if twolocal_core::prng::int_in(rng, 0, 2) > 0 {
            let coords = (0..n)
                .map(|_| twolocal_core::prng::padic_integral(rng, field.p(), 3, prec))
                .collect();
            pairs.push((e, field.elt(coords)));
        }
    }
    match shape {
        ExtShape::EqualConstant | ExtShape::EqualTame { .. } | ExtShape::Identity => {
            Form::Equal(LaurentSeries::from_pairs(&zero, pairs))
        }
        ExtShape::MixedConstant | ExtShape::MixedTame { .. } => {
            Form::Mixed(MixedSeries::exact(&zero, pairs))
        }
        ExtShape::MixedPoly { min_poly } => {
            let deg = min_poly.len() - 1;
            let mut coeffs = Vec::new();
            for _ in 0..deg {
                let mut ps = Vec::new();
                for e in -4..=3 {
                    if twolocal_core::prng::int_in(rng, 0, 2) > 0 {
                        ps.push((
                            e,
                            field.from_base(twolocal_core::prng::padic_integral(
                                rng,
                                field.p(),
                                3,
                                prec,
                            )),
                        ));
                    }
                }
                coeffs.push(MixedSeries::exact(&zero, ps));
            }
            Form::MixedVec(coeffs)
        }
    }
}

fn build_terms(
    field: &Arc<LocalFieldDesc>,
    specs: &[TermSpec],
    prec: i64,
) -> CliResult<Vec<FormTerm>> {
    let mut out = Vec::new();
    for t in specs {
        let numerator = build_mx_series(field, &t.numerator, prec)?;
        let pole = match &t.pole {
            None => None,
            Some(ps) => {
                let coeffs: CliResult<Vec<KElt>> =
                    ps.poly.iter().map(|s| parse_kelt(field, s, prec)).collect();
                let h =
                    WeierstrassPoly::new(coeffs?).map_err(|e| DataError(format!("pole: {e}")))?;
                Some((h, ps.order))
            }
        };
        out.push(FormTerm { pi_exp: t.pi_exp.unwrap_or(0), numerator, pole });
    }
    Ok(out)
}

fn run_reciprocity(st: &ReciprocityStanza, params: &Params) -> CliResult<RunOut> {
    let field = build_field(&st.base)?;
    let prec = literal_prec(params);
    // validate the stanza shape and build the exact inputs up front: those
    // failures are data errors (exit 65), not precision verdicts
    enum Built {
        Base(FormOverB),
        Ext(ExtensionOverB, Vec<FormOverB>),
    }
    let built = match (&st.terms, &st.extension, &st.omega) {
        (Some(terms), None, None) => {
            let form = FormOverB::new(build_terms(&field, terms, prec)?)
                .map_err(|e| DataError(format!("form: {e}")))?;
            Built::Base(form)
        }
        (None, Some(ext_lits), Some(omega_lits)) => {
            let coeffs: CliResult<Vec<MxSeries>> = ext_lits
                .iter()
                .map(|l| build_mx_series(&field, l, prec))
                .collect();
            let ext = ExtensionOverB::new(coeffs?)
                .map_err(|e| DataError(format!("extension: {e}")))?;
            let mut omega = Vec::new();
            for specs in omega_lits {
                omega.push(
                    FormOverB::new(build_terms(&field, specs, prec)?)
                        .map_err(|e| DataError(format!("omega: {e}")))?,
                );
            }
            Built::Ext(ext, omega)
        }
        _ => {
            return Err(DataError(
                "provide either `terms`, or both `extension` and `omega`".into(),
            ))
        }
    };
    let attempt: Result<ResidueLedger, Error> = match built {
        Built::Base(form) => reciprocity_check(&form, params),
        Built::Ext(ext, omega) => reciprocity_check_extension(&omega, &ext, params),
    };
    match attempt {
        Ok(ledger) => Ok((ledger_json(&ledger), ledger.verdict.as_str(), None)),
        Err(e) => soft_error(e),
    }
}

fn run_different(st: &DifferentStanza, params: &Params) -> CliResult<RunOut> {
    let base = build_field(&st.base)?;
    let kind = match st.kind.as_str() {
        "eisenstein" => StepKind::Eisenstein,
        "unramified" => StepKind::Unramified,
        other => return Err(DataError(format!("unknown extension kind `{other}`"))),
    };
    let coeffs: CliResult<Vec<Vec<BigInt>>> = st
        .poly
        .iter()
        .map(|v| {
            v.iter()
                .map(|s| s.parse().map_err(|_| DataError(format!("bad integer `{s}`"))))
                .collect()
        })
        .collect();
    let ext = CdvrExtension::new(&base, coeffs?, kind, literal_prec(params))
        .map_err(|e| DataError(format!("extension: {e}")))?;
    let attempt: Result<serde_json::Value, Error> = (|| {
        let rep = different_valuation(&ext)?;
        let mut results = json!({
            "d_jacobian": rep.d_jacobian,
            "d_oracle": rep.d_oracle,
            "oracle_transcript": rep.transcript,
        });
        if kind == StepKind::Eisenstein {
            let e = ext.step_e();
            let range = st.floor_range.unwrap_or([-2 * e, 2 * e]);
            let floor = floor_formula_check(&ext, range[0], range[1])?;
            results["floor_formula"] = json!({
                "all_ok": floor.all_ok,
                "samples": floor.samples.iter().map(|s| json!({
                    "i": s.i, "expected": s.expected, "observed": s.observed,
                })).collect::<Vec<_>>(),
            });
        }
        Ok(results)
    })();
    match attempt {
        Ok(results) => {
            let floor_ok = results
                .get("floor_formula")
                .map_or(true, |f| f["all_ok"].as_bool().unwrap_or(false));
            let verdict = if floor_ok { "PASS" } else { "FAIL" };
            Ok((results, verdict, None))
        }
        Err(e) => soft_error(e),
    }
}

fn trace_verdict_str(v: TraceVerdict) -> &'static str {
    match v {
        TraceVerdict::Integral => "PASS",
        TraceVerdict::NotIntegral => "FAIL",
        TraceVerdict::Undecided => "UNDECIDED",
    }
}

fn run_dualizing(st: &DualizingStanza, params: &Params) -> CliResult<RunOut> {
    let field = build_field(&st.base)?;
    let prec = literal_prec(params);
    let surf_coeffs: CliResult<Vec<MxSeries>> = st
        .surface
        .iter()
        .map(|l| build_mx_series(&field, l, prec))
        .collect();
    let surface =
        SurfacePresentation::new(surf_coeffs?).map_err(|e| DataError(format!("surface: {e}")))?;
    let sample_bound = st.sample_bound.unwrap_or(4);
    let attempt: Result<(serde_json::Value, &'static str), Error> = (|| match &st.phi {
        Some(phi) => {
            let num: Result<Vec<MxSeries>, Error> = phi
                .num
                .iter()
                .map(|l| build_mx_series(&field, l, prec).map_err(|e| Error::Presentation(e.0)))
                .collect();
            let den: Result<Vec<MxSeries>, Error> = phi
                .den
                .iter()
                .map(|l| build_mx_series(&field, l, prec).map_err(|e| Error::Presentation(e.0)))
                .collect();
            let frac = AFraction { num: num?, den: den? };
            let rep = w_membership(&surface, &frac, sample_bound, params)?;
            let results = json!({
                "mode": "membership",
                "samples": rep.samples.iter().map(|s| json!({
                    "g": s.label, "verdict": trace_verdict_str(s.verdict),
                })).collect::<Vec<_>>(),
                "worst_margin": rep.worst_margin.map(|m| m.to_string()),
                "membership": trace_verdict_str(rep.verdict),
            });
            let verdict = match rep.verdict {
                TraceVerdict::Integral => "PASS",
                TraceVerdict::NotIntegral => "FAIL",
                TraceVerdict::Undecided => "INCONCLUSIVE",
            };
            Ok((results, verdict))
        }
        None => {
            let trials = st.trials.unwrap_or(20);
            let cert = verify_w_equals_codifferent(&surface, trials, sample_bound, params)?;
            let results = json!({
                "mode": "codifferent certificate",
                "jacobian": cert.jacobian_rendered,
                "members": cert.members.iter().map(|(l, v)| json!({
                    "element": l, "verdict": trace_verdict_str(*v),
                })).collect::<Vec<_>>(),
                "boundary": cert.boundary.iter().map(|(l, v)| json!({
                    "element": l, "verdict": trace_verdict_str(*v),
                })).collect::<Vec<_>>(),
            });
            let verdict = match cert.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Inconclusive => "INCONCLUSIVE",
            };
            Ok((results, verdict))
        }
    })();
    match attempt {
        Ok((results, verdict)) => Ok((results, verdict, None)),
        Err(e) => soft_error(e),
    }
}

fn run_selftest_stanza(st: &SelftestStanza, params: &Params) -> CliResult<RunOut> {
    let runners: Vec<(u32, fn(&Params) -> twolocal_core::Result<battery::CriterionReport>)> = vec![
        (1, battery::battery_residue_identities),
        (2, battery::battery_parameter_invariance),
        (3, battery::battery_functoriality),
        (4, battery::battery_reciprocity),
        (5, battery::battery_extension_reciprocity),
        (6, battery::battery_different),
        (7, battery::battery_dualizing),
        (8, battery::battery_residue_field_compat),
    ];
    let wanted: Vec<u32> = st.only.clone().unwrap_or_else(|| (1..=8).collect());
    let mut criteria = Vec::new();
    let mut all = true;
    for (id, f) in runners {
        if !wanted.contains(&id) {
            continue;
        }
        match f(params) {
            Ok(rep) => {
                all &= rep.pass;
                criteria.push(json!({
                    "criterion": rep.id,
                    "name": rep.name,
                    "cases": format!("{}/{}", rep.cases_passed, rep.cases_run),
                    "pass": rep.pass,
                    "failures": rep.failures,
                }));
            }
            Err(e) => {
                all = false;
                criteria.push(json!({
                    "criterion": id,
                    "pass": false,
                    "error": format!("{e}"),
                }));
            }
        }
    }
    let results = json!({ "criteria": criteria });
    Ok((results, if all { "PASS" } else { "FAIL" }, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_parsing_rejects_unknown_keys() {
        let text = r#"{"version":1,"kind":"selftest","selftest":{},"bogus":3}"#;
        assert!(parse_problem(text).is_err());
        let text = r#"{"version":1,"kind":"selftest","selftest":{"only":[1],"extra":true}}"#;
        assert!(parse_problem(text).is_err());
    }

    #[test]
    fn stanza_and_kind_must_match() {
        let text = r#"{"version":1,"kind":"residue","selftest":{}}"#;
        assert!(parse_problem(text).is_err());
    }

    #[test]
    fn rational_literals() {
        let f = LocalFieldDesc::qp(5);
        let c = parse_coeff(&f, "1/2", 8).unwrap();
        let two = PadicApprox::from_i64(5, 2, 8);
        assert!(c.mul(&two).eq_to_min_prec(&PadicApprox::one(5, 8)));
        assert!(parse_coeff(&f, "x", 8).is_err());
        assert!(parse_coeff(&f, "1/0", 8).is_err());
    }

    #[test]
    fn report_serialization_round_trips() {
        let text = r#"{
            "version": 1,
            "kind": "residue",
            "options": {"prec": 8},
            "residue": {
                "base": {"prime": 3, "kind": "trivial"},
                "char": "equal",
                "form": [[-1, "2"]]
            }
        }"#;
        let pf = parse_problem(text).unwrap();
        let rep = run_problem(&pf, &Overrides::default()).unwrap();
        let json = rep.to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&rep).unwrap());
    }

    #[test]
    fn residue_problem_end_to_end() {
        let text = r#"{
            "version": 1,
            "kind": "residue",
            "options": {"prec": 12},
            "residue": {
                "base": {"prime": 5, "kind": "trivial"},
                "char": "mixed",
                "form": [[-1, "1"]]
            }
        }"#;
        let pf = parse_problem(text).unwrap();
        let rep = run_problem(&pf, &Overrides::default()).unwrap();
        assert_eq!(rep.verdict, "PASS");
        // residue of t^{-1} dt in mixed characteristic is -1
        let r = rep.results["residue"].as_str().unwrap();
        assert!(r.contains("O(5^"), "{r}");
    }
}
