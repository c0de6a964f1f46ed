//! Job configuration, check orchestration and report assembly.
//!
//! Configs are JSON. Rationals are `"p/q"` strings (plain integers are also
//! accepted) and field elements are triples `[c0, c1, c2]` meaning
//! `c0 + c1·β + c2·β²`.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::cubicfield::{validate_unit, CubicField, EmbeddingData, FieldElement, RootChoice, UnitData};
use crate::ellgamma::{eisenstein_quotient, GammaValue, LambdaSelection, SmoothedContext, SmoothedFrames};
use crate::error::{Error, Result};
use crate::ideallat::{is_admissible, AdmissiblePoint, IdealLattice};
use crate::numeric::{bits_to_digits, log_abs_sq, parse_float, ten_pow_neg, BigComplex, TailBudget};
use crate::report::{CheckReport, Environment, Record, Report, Status};
use crate::verify::{
    normalized_power, orbit_check, recognize_field_poly, recognize_integer_poly, recognize_orbit_poly, smoothed_properties,
    stark_relation_check, CandidatePoly, Normalization, OrbitSpec,
};
use crate::zetakl::{cone_point_estimate, cone_radius_for, zeta_deriv_via_cone_series};

/// Env var overriding the default working precision.
pub const DIGITS_ENV: &str = "CUBIC_GAMMA_DIGITS";
const DEFAULT_DIGITS: u32 = 60;

/// Bundled example configurations, by name.
pub const FIXTURES: &[(&str, &str)] = &[
    ("intro", include_str!("../fixtures/intro.json")),
    ("dasgupta", include_str!("../fixtures/dasgupta.json")),
    ("x3m3", include_str!("../fixtures/x3m3.json")),
    ("x3m3_norm2", include_str!("../fixtures/x3m3_norm2.json")),
    ("x3m2", include_str!("../fixtures/x3m2.json")),
    ("x3mx1", include_str!("../fixtures/x3mx1.json")),
];

pub fn fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatLit {
    Int(i64),
    Str(String),
}

impl RatLit {
    pub fn parse(&self) -> Result<Rational> {
        match self {
            RatLit::Int(n) => Ok(Rational::from(*n)),
            RatLit::Str(s) => s.trim().parse::<Rational>().map_err(|e| Error::Parse(format!("bad rational '{s}': {e}"))),
        }
    }
}

pub type ElementLit = [RatLit; 3];

pub fn parse_element(e: &ElementLit) -> Result<FieldElement> {
    Ok(FieldElement::new([e[0].parse()?, e[1].parse()?, e[2].parse()?]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootChoiceSpec {
    PositiveImaginary,
    NegativeImaginary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// `[c2, c1, c0]` for `x³ + c2·x² + c1·x + c0`.
    pub min_poly: [i64; 3],
    pub complex_root: RootChoiceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral_basis: Option<[ElementLit; 3]>,
}

/// `(generators)^power`; no generators means `𝒪_K`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealSpec {
    #[serde(default)]
    pub generators: Vec<ElementLit>,
    #[serde(default = "one_i64")]
    pub power: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSpec {
    pub element: ElementLit,
    #[serde(default = "one_i64")]
    pub power: i64,
}

fn one_i64() -> i64 {
    1
}

fn one_u32() -> u32 {
    1
}

fn default_max_terms() -> u64 {
    2_000_000_000
}

fn default_k_max() -> u64 {
    100_000
}

fn default_candidates() -> usize {
    12
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Gamma,
    Poly,
    Orbit,
    Klf,
    ConeOracle,
    Stark,
    Eisenstein,
    Properties,
}

const ORDER: [CheckKind; 8] = [
    CheckKind::Gamma,
    CheckKind::Poly,
    CheckKind::Orbit,
    CheckKind::Klf,
    CheckKind::ConeOracle,
    CheckKind::Stark,
    CheckKind::Eisenstein,
    CheckKind::Properties,
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexLit {
    pub re: String,
    pub im: String,
}

impl ComplexLit {
    pub fn parse(&self, digits: u32) -> Result<BigComplex> {
        Ok(BigComplex::new(parse_float(&self.re, digits)?, parse_float(&self.im, digits)?, digits))
    }

    /// `10^{-d}` for the fewest decimals printed in either part.
    pub fn printed_tolerance(&self) -> Float {
        let dec = |s: &str| s.split('.').nth(1).map_or(0, |t| t.chars().take_while(|c| c.is_ascii_digit()).count());
        ten_pow_neg(dec(&self.re).min(dec(&self.im)) as i64, 64)
    }
}

fn tolerance_or(t: &Option<String>, default: Float) -> Result<Float> {
    match t {
        Some(s) => parse_float(s, 30),
        None => Ok(default),
    }
}

/// A printed value for the entry `index` of `b_list` (or its inverse).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueRef {
    pub index: usize,
    pub value: ComplexLit,
    #[serde(default)]
    pub invert: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecognizeKind {
    Integer,
    Field,
    /// Coefficients from the symmetric functions of all `b_list` values.
    Orbit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecognizeSpec {
    pub kind: RecognizeKind,
    pub degree: usize,
    pub height: u32,
    #[serde(default)]
    pub index: usize,
}

/// Candidate polynomial for `value^power` (up to sign when flagged).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyRef {
    pub coeffs: Vec<ElementLit>,
    #[serde(default = "one_u32")]
    pub power: u32,
    #[serde(default)]
    pub up_to_sign: bool,
    #[serde(default)]
    pub unit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recognize: Option<RecognizeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
}

impl PolyRef {
    pub fn candidate(&self) -> Result<CandidatePoly> {
        CandidatePoly::new(self.coeffs.iter().map(parse_element).collect::<Result<_>>()?)
    }

    pub fn normalization(&self) -> Normalization {
        Normalization { power: self.power, up_to_sign: self.up_to_sign }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitRef {
    pub inverse_pairs: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
}

/// `ζ′_𝔣(𝔟^j, 0)` for `j` modulo the order of `𝔟`, with `[𝔞] = [𝔟]^{a_class}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KlfRef {
    pub zeta: Vec<String>,
    pub a_class: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeRef {
    pub indices: Vec<usize>,
    /// Digits of the k-series and of the outside-cone tail.
    pub digits: u32,
    /// Cap on `k`; each k-series also stops once its tail is below `10^{-digits}`.
    #[serde(default = "default_k_max")]
    pub k_max: u64,
    pub target: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarkRef {
    pub poly: Vec<ElementLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_hint: Option<ComplexLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<ComplexLit>,
    pub e_f: u32,
    #[serde(default)]
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
}

/// `[Γ(z−v,A,A′)/Γ(−v,A,A′)]^N / [Γ(Nz−Nv,NA,NA′)/Γ(−Nv,NA,NA′)]` at field points.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EisensteinRef {
    pub z: ElementLit,
    pub v: ElementLit,
    pub a: ElementLit,
    pub a_prime: ElementLit,
    pub n: u32,
    pub expected: ComplexLit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    /// Entry of `b_list` whose value squared should equal the quotient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square_of: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square_tolerance: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertiesRef {
    #[serde(default = "default_candidates")]
    pub lambda_count: usize,
    /// Target digits of the property evaluations; defaults to the job precision.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_digits: Option<u32>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<ValueRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<PolyRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub klf: Option<KlfRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stark: Option<StarkRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eisenstein: Option<EisensteinRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub properties: Option<PropertiesRef>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub field: FieldSpec,
    pub f: IdealSpec,
    #[serde(default = "default_b_list")]
    pub b_list: Vec<IdealSpec>,
    pub a: IdealSpec,
    pub epsilon: UnitSpec,
    /// Admits `N(𝔞) = 2` and 𝔞 not coprime to 6.
    #[serde(default)]
    pub relaxed_smoothing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_digits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard_digits: Option<u32>,
    #[serde(default = "default_max_terms")]
    pub max_terms: u64,
    #[serde(default = "default_candidates")]
    pub lambda_candidates: usize,
    /// Fixed admissible λ (same for every `b_list` entry); otherwise the
    /// cheapest of `lambda_candidates`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<ElementLit>,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub reference: Reference,
}

fn default_b_list() -> Vec<IdealSpec> {
    vec![IdealSpec { generators: Vec::new(), power: 0, label: Some("O_K".into()) }]
}

/// Command-line overrides applied on load.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub digits: Option<u32>,
    pub guard: Option<u32>,
    pub max_terms: Option<u64>,
    pub timing: bool,
}

/// A validated job.
#[derive(Clone, Debug)]
pub struct Job {
    pub config: JobConfig,
    pub field: CubicField,
    pub emb: EmbeddingData,
    pub budget: TailBudget,
    pub f: IdealLattice,
    pub a: IdealLattice,
    pub eps: UnitData,
    pub contexts: Vec<SmoothedContext>,
    pub labels: Vec<String>,
    pub timing: bool,
}

fn ideal(field: &CubicField, spec: &IdealSpec, what: &str) -> Result<IdealLattice> {
    let order = IdealLattice::order(field);
    let base = if spec.generators.is_empty() {
        order.clone()
    } else {
        let gens: Vec<FieldElement> = spec.generators.iter().map(parse_element).collect::<Result<_>>()?;
        IdealLattice::from_generators(field, &gens).map_err(|e| Error::Config(format!("{what}: {e}")))?
    };
    let mut out = order;
    let step = if spec.power < 0 { IdealLattice::inverse(field, &base)? } else { base };
    for _ in 0..spec.power.unsigned_abs() {
        out = IdealLattice::product(field, &out, &step);
    }
    if !out.is_integral(field) {
        return Err(Error::Config(format!("{what} is not an integral ideal")));
    }
    Ok(out)
}

fn label(spec: &IdealSpec, i: usize) -> String {
    spec.label.clone().unwrap_or_else(|| format!("b{i}^{}", spec.power))
}

pub fn default_digits() -> u32 {
    std::env::var(DIGITS_ENV).ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_DIGITS)
}

pub fn load_config(path: &Path) -> Result<JobConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<JobConfig> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn required(present: bool, check: CheckKind, what: &str) -> Result<()> {
    if present {
        Ok(())
    } else {
        Err(Error::Config(format!("check {check:?} needs reference.{what}")))
    }
}

/// Builds every lattice, unit and context eagerly so that invalid input
/// fails before any evaluation.
pub fn validate(config: JobConfig, ov: &Overrides) -> Result<Job> {
    let mut config = config;
    if let Some(d) = ov.digits {
        config.precision_digits = Some(d);
    }
    if let Some(g) = ov.guard {
        config.guard_digits = Some(g);
    }
    if let Some(m) = ov.max_terms {
        config.max_terms = m;
    }
    let digits = config.precision_digits.unwrap_or_else(default_digits);
    if digits < BigComplex::MIN_DIGITS {
        return Err(Error::Config(format!("precision_digits must be at least {}", BigComplex::MIN_DIGITS)));
    }
    let guard = config.guard_digits.unwrap_or(25);
    let budget = TailBudget::new(digits, guard, config.max_terms)?;
    config.precision_digits = Some(digits);
    config.guard_digits = Some(guard);

    let choice = match config.field.complex_root {
        RootChoiceSpec::PositiveImaginary => RootChoice::PositiveImaginary,
        RootChoiceSpec::NegativeImaginary => RootChoice::NegativeImaginary,
    };
    let [c2, c1, c0] = config.field.min_poly;
    let field = match &config.field.integral_basis {
        None => CubicField::new(c2, c1, c0, choice)?,
        Some(b) => CubicField::with_basis(
            [Integer::from(c2), Integer::from(c1), Integer::from(c0)],
            choice,
            [parse_element(&b[0])?, parse_element(&b[1])?, parse_element(&b[2])?],
        )?,
    };
    let emb = field.embedding(budget.working_digits() + 10)?;
    let f = ideal(&field, &config.f, "f")?;
    let a = ideal(&field, &config.a, "a")?;
    let e = field.pow(&parse_element(&config.epsilon.element)?, config.epsilon.power)?;
    let eps = validate_unit(&field, &e, &f, &emb).map_err(|err| Error::Config(format!("epsilon: {err}")))?;
    if config.b_list.is_empty() {
        return Err(Error::Config("b_list is empty".into()));
    }
    let mut contexts = Vec::new();
    let mut labels = Vec::new();
    for (i, spec) in config.b_list.iter().enumerate() {
        let b = ideal(&field, spec, "b")?;
        let ctx = SmoothedContext::new(&field, &f, &b, &a, &eps, &emb, config.relaxed_smoothing)
            .map_err(|err| Error::Config(format!("b_list[{i}]: {err}")))?;
        if let Some(l) = &config.lambda {
            let p = AdmissiblePoint::new(parse_element(l)?, ctx.q.clone());
            if !is_admissible(&field, &ctx.l, &a, &p)? {
                return Err(Error::Config(format!("lambda is not admissible for b_list[{i}]")));
            }
        }
        contexts.push(ctx);
        labels.push(label(spec, i));
    }

    let r = &config.reference;
    let n = config.b_list.len();
    for &c in &config.checks {
        match c {
            CheckKind::Gamma => {}
            CheckKind::Poly => required(r.poly.is_some(), c, "poly")?,
            CheckKind::Orbit => required(r.orbit.is_some(), c, "orbit")?,
            CheckKind::Klf => required(r.klf.is_some(), c, "klf")?,
            CheckKind::ConeOracle => required(r.cone.is_some(), c, "cone")?,
            CheckKind::Stark => required(r.stark.is_some(), c, "stark")?,
            CheckKind::Eisenstein => required(r.eisenstein.is_some(), c, "eisenstein")?,
            CheckKind::Properties => required(r.properties.is_some(), c, "properties")?,
        }
    }
    let mut indices: Vec<usize> = r.values.iter().map(|v| v.index).collect();
    if let Some(o) = &r.orbit {
        indices.extend(o.inverse_pairs.iter().flat_map(|&(i, j)| [i, j]));
    }
    if let Some(c) = &r.cone {
        indices.extend(&c.indices);
    }
    if let Some(s) = &r.stark {
        indices.push(s.index);
    }
    if let Some(i) = r.eisenstein.as_ref().and_then(|e| e.square_of) {
        indices.push(i);
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::Config(format!("reference index {bad} outside b_list")));
    }
    if let Some(p) = &r.poly {
        let cand = p.candidate()?;
        if p.unit && !cand.is_unit_shape(&field) {
            return Err(Error::Config("reference.poly is flagged as a unit but is not monic with unit constant term".into()));
        }
    }
    if let Some(k) = &r.klf {
        if k.zeta.is_empty() {
            return Err(Error::Config("reference.klf.zeta is empty".into()));
        }
    }
    Ok(Job { config, field, emb, budget, f, a, eps, contexts, labels, timing: ov.timing })
}

pub fn load_job(path: &Path, ov: &Overrides) -> Result<Job> {
    validate(load_config(path)?, ov)
}

/// One computed smoothed value per `b_list` entry.
#[derive(Clone, Debug)]
pub struct Computed {
    pub frames: SmoothedFrames,
    pub value: GammaValue,
}

impl Job {
    pub fn digits(&self) -> u32 {
        self.budget.target_digits
    }

    fn frames_for(&self, i: usize) -> Result<SmoothedFrames> {
        let ctx = &self.contexts[i];
        match &self.config.lambda {
            Some(l) => ctx.frames(&AdmissiblePoint::new(parse_element(l)?, ctx.q.clone())),
            None => ctx.select(LambdaSelection::Cheapest(self.config.lambda_candidates), self.digits()),
        }
    }

    /// Smoothed values for every `b_list` entry, in parallel.
    pub fn compute_values(&self) -> Result<Vec<Computed>> {
        (0..self.contexts.len())
            .into_par_iter()
            .map(|i| {
                let frames = self.frames_for(i)?;
                let value = self.contexts[i].value(&frames, &self.budget)?;
                Ok(Computed { frames, value })
            })
            .collect()
    }
}

/// Relative error bound of a value from its log-error bound.
fn value_error(v: &GammaValue) -> Float {
    let t = Float::with_val(64, &v.tail_bound * 2u32);
    let wd = ten_pow_neg(bits_to_digits(v.value.prec_bits()) as i64 - 5, 64);
    Float::with_val(64, t + wd)
}

fn achieved_digits(values: &[Computed], cap: u32) -> u32 {
    let mut out = cap;
    for c in values {
        let e = value_error(&c.value).to_f64();
        let d = if e <= 0.0 { cap } else { (-e.log10()).floor().max(0.0) as u32 };
        out = out.min(d);
    }
    out
}

fn dist(a: &BigComplex, b: &BigComplex) -> Float {
    (a - b).abs()
}

// printed digits are compared per component
fn component_dist(a: &BigComplex, b: &BigComplex) -> Float {
    let d = a - b;
    let (re, im) = (d.re.abs(), d.im.abs());
    if re > im {
        re
    } else {
        im
    }
}

struct RunState<'a> {
    job: &'a Job,
    values: Option<Vec<Computed>>,
    shown: usize,
}

impl RunState<'_> {
    fn show(&self, z: &BigComplex) -> String {
        z.to_string_digits(self.shown)
    }

    fn values(&self) -> &[Computed] {
        self.values.as_deref().unwrap_or(&[])
    }

    fn gamma(&mut self) -> CheckReport {
        let job = self.job;
        let values = match job.compute_values() {
            Ok(v) => v,
            Err(e) => return CheckReport::failed("gamma", format!("evaluation failed: {e}")),
        };
        self.shown = achieved_digits(&values, job.digits()).max(1) as usize;
        let tol = ten_pow_neg(job.digits() as i64, 64);
        let mut records = Vec::new();
        for (i, c) in values.iter().enumerate() {
            let err = value_error(&c.value);
            let mut r =
                Record::new(format!("value[{}]", job.labels[i]), vec![c.value.value.to_string_digits(self.shown)], None, &err, &tol);
            if c.value.saturated {
                r = r.indeterminate();
            }
            records.push(r);
        }
        for vr in &job.config.reference.values {
            let c = &values[vr.index];
            let v = if vr.invert { c.value.value.recip() } else { c.value.value.clone() };
            let reference = match vr.value.parse(job.digits()) {
                Ok(r) => r,
                Err(e) => return CheckReport::failed("gamma", e.to_string()),
            };
            let tol = match tolerance_or(&vr.tolerance, vr.value.printed_tolerance()) {
                Ok(t) => t,
                Err(e) => return CheckReport::failed("gamma", e.to_string()),
            };
            let name = format!("{}value[{}]", if vr.invert { "inverse " } else { "" }, job.labels[vr.index]);
            records.push(Record::new(
                name,
                vec![v.to_string_digits(self.shown.min(20))],
                Some(format!(
                    "{} {} {}i",
                    vr.value.re,
                    if vr.value.im.starts_with('-') { "-" } else { "+" },
                    vr.value.im.trim_start_matches('-')
                )),
                &component_dist(&v, &reference),
                &tol,
            ));
        }
        self.values = Some(values);
        CheckReport::new("gamma", records)
    }

    fn poly(&self) -> Result<CheckReport> {
        let job = self.job;
        let p = job.config.reference.poly.as_ref().expect("validated");
        let cand = p.candidate()?;
        let tol = tolerance_or(&p.tolerance, ten_pow_neg(job.digits() as i64 - 10, 64))?;
        let norm = p.normalization();
        let mut records = Vec::new();
        for (i, c) in self.values().iter().enumerate() {
            let x = normalized_power(&c.value.value, norm.power, false);
            let mut r = cand.eval(&x, &job.emb).abs();
            if norm.up_to_sign {
                let r2 = cand.eval(&-&x, &job.emb).abs();
                if r2 < r {
                    r = r2;
                }
            }
            let power = if norm.power == 1 { String::new() } else { format!("^{}", norm.power) };
            records.push(Record::new(format!("residual[{}]{power}", job.labels[i]), vec![self.show(&x)], Some(cand.display()), &r, &tol));
        }
        let flag = |ok: bool| Float::with_val(64, if ok { 0 } else { 1 });
        let half = Float::with_val(64, 0.5);
        if p.unit {
            records.push(Record::new("unit_shape", vec![cand.display()], None, &flag(cand.is_unit_shape(&job.field)), &half));
        }
        if let Some(rs) = &p.recognize {
            let c = self.values().get(rs.index).ok_or_else(|| Error::Config("recognize.index outside b_list".into()))?;
            let d = job.digits();
            let x = normalized_power(&c.value.value, norm.power, norm.up_to_sign).with_digits(d);
            let got = match rs.kind {
                RecognizeKind::Integer => recognize_integer_poly(&x, rs.degree, rs.height)?,
                RecognizeKind::Field => recognize_field_poly(&x, &job.emb, rs.degree, rs.height)?,
                RecognizeKind::Orbit => {
                    let xs: Vec<BigComplex> = self
                        .values()
                        .iter()
                        .map(|c| normalized_power(&c.value.value, norm.power, norm.up_to_sign).with_digits(d))
                        .collect();
                    recognize_orbit_poly(&xs, &job.emb, rs.height)
                }
            };
            let matches = got.as_ref().is_some_and(|g| same_up_to_sign(g, &cand, norm.up_to_sign));
            let shown = got.as_ref().map_or_else(|| "none".to_string(), |g| g.display());
            records.push(Record::new(
                format!("recognized[{}]", job.labels[rs.index]),
                vec![shown],
                Some(cand.display()),
                &flag(matches),
                &half,
            ));
        }
        Ok(CheckReport::new("poly", records))
    }

    fn orbit(&self) -> Result<CheckReport> {
        let job = self.job;
        let o = job.config.reference.orbit.as_ref().expect("validated");
        let tol = tolerance_or(&o.tolerance, ten_pow_neg(job.digits() as i64 - 10, 64))?;
        let vals: Vec<BigComplex> = self.values().iter().map(|c| c.value.value.clone()).collect();
        let spec = OrbitSpec { classes: job.labels.clone(), inverse_pairing: o.inverse_pairs.clone() };
        let poly = match &job.config.reference.poly {
            Some(p) if p.power == 1 && !p.up_to_sign => Some(p.candidate()?),
            _ => None,
        };
        orbit_check(&vals, &spec, &tol, poly.as_ref().map(|p| (p, &job.emb)))
    }

    fn klf(&self) -> Result<CheckReport> {
        let job = self.job;
        let k = job.config.reference.klf.as_ref().expect("validated");
        let tol = tolerance_or(&k.tolerance, ten_pow_neg(job.digits() as i64 - 10, 64))?;
        let zeta: Vec<Float> = k.zeta.iter().map(|s| parse_float(s, job.digits() + 10)).collect::<Result<_>>()?;
        let m = zeta.len() as i64;
        let mut records = Vec::new();
        for (i, c) in self.values().iter().enumerate() {
            let kk = job.config.b_list[i].power;
            let n = Float::with_val(64, job.contexts[i].n_u32());
            let j = (kk + k.a_class as i64).rem_euclid(m) as usize;
            let expected = Float::with_val(zeta[0].prec(), &zeta[j] - &n * &zeta[kk.rem_euclid(m) as usize]);
            let got = log_abs_sq(&c.value.value)?;
            let err = Float::with_val(64, &got - &expected).abs();
            records.push(Record::new(
                format!("log|value[{}]|^2", job.labels[i]),
                vec![got.to_string_radix(10, Some(self.shown.min(40)))],
                Some(expected.to_string_radix(10, Some(k.zeta[0].len().min(40)))),
                &err,
                &tol,
            ));
        }
        Ok(CheckReport::new("klf", records))
    }

    fn cone_oracle(&self) -> Result<CheckReport> {
        let job = self.job;
        let c = job.config.reference.cone.as_ref().expect("validated");
        let target = parse_float(&c.target, 30)?;
        let mut records = Vec::new();
        for &i in &c.indices {
            let ctx = &job.contexts[i];
            let n = ctx.n_u32() as u64;
            // the λ with the fewest cone points; ζ′ does not depend on it
            let mut best: Option<(f64, SmoothedFrames)> = None;
            for p in ctx.candidates(job.config.lambda_candidates)? {
                let fr = ctx.frames(&p)?;
                let est = cone_point_estimate(&fr.frame_l, n, c.digits);
                if best.as_ref().is_none_or(|(b, _)| est < *b) {
                    best = Some((est, fr));
                }
            }
            let (_, fr) = best.ok_or_else(|| Error::Domain("no admissible point".into()))?;
            let radius = cone_radius_for(&fr.frame_l, n, c.digits);
            let cone = zeta_deriv_via_cone_series(&fr.frame_l, &fr.frame_al, &fr.point, &job.emb, c.k_max, radius, c.digits)?;
            let g = &self.values()[i].value;
            let via_gamma = log_abs_sq(&g.value)?;
            let g_err = value_error(g);
            let diff = Float::with_val(64, &via_gamma - &cone.value).abs();
            let bound = Float::with_val(64, &g_err + &cone.est_error);
            let lbl = &job.labels[i];
            records.push(Record::new(
                format!("cone_vs_gamma[{lbl}]"),
                vec![cone.value.to_string_radix(10, Some(c.digits as usize)), format!("radius {radius}")],
                Some(via_gamma.to_string_radix(10, Some(c.digits as usize))),
                &diff,
                &bound,
            ));
            records.push(Record::new(format!("cone_error_bound[{lbl}]"), vec![crate::report::short_float(&bound)], None, &bound, &target));
        }
        Ok(CheckReport::new("cone_oracle", records))
    }

    fn stark(&self) -> Result<CheckReport> {
        let job = self.job;
        let s = job.config.reference.stark.as_ref().expect("validated");
        let poly = CandidatePoly::new(s.poly.iter().map(parse_element).collect::<Result<_>>()?)?;
        let tol = tolerance_or(&s.tolerance, ten_pow_neg(job.digits() as i64 - 10, 64))?;
        let d = job.digits();
        let hint = s.root_hint.as_ref().map(|h| h.parse(d)).transpose()?;
        let partner = s.partner.as_ref().map(|h| h.parse(d)).transpose()?;
        let c = &self.values()[s.index];
        let g = c.value.value.with_digits(d);
        let n_a = job.contexts[s.index].n_u32();
        let (rep, _) = stark_relation_check(&g, &poly, hint.as_ref(), s.e_f, n_a, partner.as_ref(), &job.emb, &tol)?;
        Ok(rep)
    }

    fn eisenstein(&self) -> Result<CheckReport> {
        let job = self.job;
        let e = job.config.reference.eisenstein.as_ref().expect("validated");
        let d = job.budget.working_digits();
        let emb = |x: &ElementLit| -> Result<BigComplex> { Ok(job.emb.embed_complex(&parse_element(x)?).with_digits(d)) };
        let q = eisenstein_quotient(&emb(&e.z)?, &emb(&e.v)?, &emb(&e.a)?, &emb(&e.a_prime)?, e.n, &job.budget)?;
        let expected = e.expected.parse(job.digits())?;
        let tol = tolerance_or(&e.tolerance, e.expected.printed_tolerance())?;
        let mut records = vec![Record::new(
            "quotient",
            vec![q.value.to_string_digits(20)],
            Some(format!("{} + {}i", e.expected.re, e.expected.im)),
            &component_dist(&q.value, &expected),
            &tol,
        )];
        if let Some(i) = e.square_of {
            if let Some(c) = self.values().get(i) {
                let sq = c.value.value.sqr();
                let tol = tolerance_or(&e.square_tolerance, ten_pow_neg(job.digits() as i64 - 10, 64))?;
                records.push(Record::new(
                    format!("quotient = value[{}]^2", job.labels[i]),
                    vec![q.value.to_string_digits(self.shown.min(30))],
                    Some(sq.to_string_digits(self.shown.min(30))),
                    &dist(&q.value, &sq),
                    &tol,
                ));
            }
        }
        Ok(CheckReport::new("eisenstein", records))
    }

    fn properties(&self) -> Result<CheckReport> {
        let job = self.job;
        let p = job.config.reference.properties.as_ref().expect("validated");
        let budget = match p.target_digits {
            Some(t) => TailBudget::new(t, job.budget.guard_digits, job.budget.max_terms)?,
            None => job.budget.clone(),
        };
        let norm = job.config.reference.poly.as_ref().map(|p| p.normalization()).unwrap_or_default();
        let mut records = Vec::new();
        let mut notes = Vec::new();
        let rep = smoothed_properties(&job.contexts[0], &budget, p.lambda_count, norm)?;
        records.extend(rep.records);
        notes.extend(rep.notes);
        let mut out = CheckReport::new("properties", records);
        for n in notes {
            out = out.with_note(n);
        }
        Ok(out)
    }
}

fn same_up_to_sign(a: &CandidatePoly, b: &CandidatePoly, up_to_sign: bool) -> bool {
    if a == b {
        return true;
    }
    if !up_to_sign {
        return false;
    }
    // p(−x) up to an overall sign
    let d = b.degree();
    let flipped: Vec<FieldElement> = b.coeffs.iter().enumerate().map(|(i, c)| if (d - i) % 2 == 1 { c.neg() } else { c.clone() }).collect();
    let f = CandidatePoly { coeffs: flipped };
    let neg = CandidatePoly { coeffs: f.coeffs.iter().map(|c| c.neg()).collect() };
    *a == f || *a == neg
}

/// Runs the requested checks in dependency order. Checks that need the
/// computed values are skipped with a failure note if `gamma` failed.
pub fn run(job: &Job) -> Report {
    let start = Instant::now();
    let wanted = |k: CheckKind| job.config.checks.contains(&k);
    let needs_values = job.config.checks.iter().any(|&k| !matches!(k, CheckKind::Eisenstein | CheckKind::Properties))
        || job.config.reference.eisenstein.as_ref().is_some_and(|e| e.square_of.is_some() && wanted(CheckKind::Eisenstein));
    let mut st = RunState { job, values: None, shown: job.digits() as usize };
    let mut checks = Vec::new();
    let mut gamma_ok = true;
    if needs_values {
        let rep = st.gamma();
        gamma_ok = st.values.is_some();
        if wanted(CheckKind::Gamma) || !gamma_ok {
            checks.push(rep);
        }
    }
    for kind in ORDER.iter().copied().filter(|&k| k != CheckKind::Gamma && wanted(k)) {
        let name = serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let uses_values = !matches!(kind, CheckKind::Eisenstein | CheckKind::Properties);
        if uses_values && !gamma_ok {
            checks.push(CheckReport::failed(name, "skipped: gamma values unavailable"));
            continue;
        }
        let res = match kind {
            CheckKind::Poly => st.poly(),
            CheckKind::Orbit => st.orbit(),
            CheckKind::Klf => st.klf(),
            CheckKind::ConeOracle => st.cone_oracle(),
            CheckKind::Stark => st.stark(),
            CheckKind::Eisenstein => st.eisenstein(),
            CheckKind::Properties => st.properties(),
            CheckKind::Gamma => unreachable!(),
        };
        checks.push(res.unwrap_or_else(|e| CheckReport::failed(name, e.to_string())));
    }
    let vals = st.values();
    let mut max_tail = Float::with_val(64, 0);
    for c in vals {
        if c.value.tail_bound > max_tail {
            max_tail = Float::with_val(64, &c.value.tail_bound);
        }
    }
    let environment = Environment {
        precision_digits: job.digits(),
        guard_digits: job.budget.guard_digits,
        achieved_digits: if vals.is_empty() { job.digits() } else { achieved_digits(vals, job.digits()) },
        factors_used: vals.iter().map(|c| c.value.factors_used).sum::<u64>().to_string(),
        max_tail_bound: crate::report::short_float(&max_tail),
        saturated: vals.iter().any(|c| c.value.saturated),
        wall_time_ms: job.timing.then(|| start.elapsed().as_millis().to_string()),
    };
    if environment.saturated {
        // a truncated product cannot certify a failure either
        for c in checks.iter_mut().filter(|c| !matches!(c.name.as_str(), "eisenstein" | "properties")) {
            let records: Vec<Record> = c.records.drain(..).map(Record::indeterminate).collect();
            let notes = std::mem::take(&mut c.notes);
            let mut fresh = CheckReport::new(c.name.clone(), records);
            if !notes.is_empty() && c.status == Status::Fail {
                fresh.status = Status::Fail;
            }
            fresh.notes = notes;
            *c = fresh;
        }
    }
    
    Report::new(job.config.name.clone(), checks, environment)
}

/// Smoothed values only, as a report with one record per `b_list` entry.
pub fn run_gamma(job: &Job) -> Report {
    let mut j = job.clone();
    j.config.checks = vec![CheckKind::Gamma];
    run(&j)
}

/// Recognition of the `index`-th value (raised to `power`).
pub fn recognize(job: &Job, index: usize, power: u32, kind: RecognizeKind, degree: usize, height: u32) -> Result<Option<CandidatePoly>> {
    let ctx = job.contexts.get(index).ok_or_else(|| Error::Config("index outside b_list".into()))?;
    let frames = job.frames_for(index)?;
    let v = ctx.value(&frames, &job.budget)?;
    let x = v.value.powi(power as i64).with_digits(job.digits());
    match kind {
        RecognizeKind::Integer => recognize_integer_poly(&x, degree, height),
        RecognizeKind::Field => recognize_field_poly(&x, &job.emb, degree, height),
        RecognizeKind::Orbit => {
            let xs: Vec<BigComplex> =
                job.compute_values()?.iter().map(|c| c.value.value.powi(power as i64).with_digits(job.digits())).collect();
            Ok(recognize_orbit_poly(&xs, &job.emb, height))
        }
    }
}

/// Property suite of a job: forces the `properties` check alone.
pub fn selftest(job: &Job) -> Report {
    let mut j = job.clone();
    j.config.checks = vec![CheckKind::Properties];
    if j.config.reference.properties.is_none() {
        j.config.reference.properties = Some(PropertiesRef { lambda_count: default_candidates(), target_digits: None });
    }
    run(&j)
}

/// Process exit code of a report.
pub fn exit_code(report: &Report) -> i32 {
    match report.status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Indeterminate => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        r#"{
          "name": "minimal",
          "field": {"min_poly": [0, 0, -7], "complex_root": "negative_imaginary"},
          "f": {"generators": [[3, 0, 0], [-1, 1, 0]]},
          "a": {"generators": [[5, 0, 0], [-3, 1, 0]]},
          "epsilon": {"element": [2, -1, 0]},
          "precision_digits": 30,
          "checks": ["gamma"]
        }"#
        .to_string()
    }

    #[test]
    fn minimal_config_loads() {
        let job = validate(parse_config(&minimal()).unwrap(), &Overrides::default()).unwrap();
        assert_eq!(job.contexts.len(), 1);
        assert_eq!(job.contexts[0].n_u32(), 5);
    }

    #[test]
    fn rejects_norm_nine_and_norm_minus_one() {
        let bad_a = minimal().replace(r#"[[5, 0, 0], [-3, 1, 0]]"#, r#"[[3, 0, 0]]"#);
        let e = validate(parse_config(&bad_a).unwrap(), &Overrides::default()).unwrap_err();
        assert!(matches!(e, Error::Config(_)), "{e}");
        // 2 − β has norm 1; its negative has norm −1
        let bad_eps = minimal().replace(r#"[2, -1, 0]"#, r#"[-2, 1, 0]"#);
        let e = validate(parse_config(&bad_eps).unwrap(), &Overrides::default()).unwrap_err();
        assert!(e.to_string().contains("epsilon"), "{e}");
        let typo = minimal().replace("\"checks\"", "\"chekcs\"");
        assert!(parse_config(&typo).is_err());
        let missing = minimal().replace(r#"["gamma"]"#, r#"["stark"]"#);
        assert!(validate(parse_config(&missing).unwrap(), &Overrides::default()).is_err());
        let low = minimal().replace("\"precision_digits\": 30", "\"precision_digits\": 20");
        assert!(validate(parse_config(&low).unwrap(), &Overrides::default()).is_err());
    }

    #[test]
    fn empty_checks_pass() {
        let cfg = minimal().replace(r#"["gamma"]"#, "[]");
        let job = validate(parse_config(&cfg).unwrap(), &Overrides::default()).unwrap();
        let rep = run(&job);
        assert!(rep.checks.is_empty());
        assert_eq!(rep.status, Status::Pass);
    }

    #[test]
    fn fixtures_parse_and_validate() {
        for (name, text) in FIXTURES {
            let cfg = parse_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            validate(cfg, &Overrides { digits: Some(30), ..Default::default() }).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn rational_literals() {
        assert_eq!(RatLit::Str("-2/15".into()).parse().unwrap(), Rational::from((-2, 15)));
        assert_eq!(RatLit::Int(4).parse().unwrap(), 4);
        assert!(RatLit::Str("1/0".into()).parse().is_err());
        let c = ComplexLit { re: "-4.024029545".into(), im: "-41.85595177".into() };
        assert_eq!(c.printed_tolerance(), ten_pow_neg(8, 64));
    }
}
