//! Arithmetic checks on computed values: polynomial residuals, integer-relation
//! recognition, Galois-orbit pairings and the Stark relation.

use rug::{Float, Integer, Rational};

use crate::cubicfield::{CubicField, EmbeddingData, FieldElement};
use crate::ellgamma::{gamma_basic, theta0, SmoothedContext, SmoothedFrames};
use crate::error::{Error, Result};
use crate::ideallat::AdmissiblePoint;
use crate::linalg::lll_reduce;
use crate::numeric::{digits_to_bits, exp2pii, ten_pow_neg, BigComplex, TailBudget};
use crate::report::{CheckReport, Record};
use crate::zetakl::boundary_lemma_check;

/// Polynomial with coefficients in K, highest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidatePoly {
    pub coeffs: Vec<FieldElement>,
}

impl CandidatePoly {
    /// Leading zero coefficients are dropped.
    pub fn new(coeffs: Vec<FieldElement>) -> Result<Self> {
        let start = coeffs.iter().position(|c| !c.is_zero()).ok_or_else(|| Error::Config("zero polynomial".into()))?;
        Ok(CandidatePoly { coeffs: coeffs[start..].to_vec() })
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| FieldElement::from_ints(c, 0, 0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs[0] == FieldElement::one()
    }

    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    /// Monic with constant term of norm ±1.
    pub fn is_unit_shape(&self, field: &CubicField) -> bool {
        let n = field.norm(self.coeffs.last().expect("nonempty"));
        self.is_monic() && (n == 1 || n == -1)
    }

    pub fn is_integral_over_z(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_rational().is_some_and(|r| *r.denom() == 1))
    }

    fn embedded(&self, emb: &EmbeddingData, digits: u32) -> Vec<BigComplex> {
        self.coeffs.iter().map(|c| emb.embed_complex(c).with_digits(digits)).collect()
    }

    /// Horner evaluation with σ_C-embedded coefficients.
    pub fn eval(&self, z: &BigComplex, emb: &EmbeddingData) -> BigComplex {
        horner(&self.embedded(emb, z.prec_digits()), z)
    }

    /// All complex roots at `digits`, by Aberth iteration then Newton polishing.
    pub fn roots(&self, emb: &EmbeddingData, digits: u32) -> Result<Vec<BigComplex>> {
        if emb.work_digits() < digits + 10 {
            return Err(Error::Numerical(format!("embedding at {} digits cannot give roots to {digits}", emb.work_digits())));
        }
        roots_of(&self.embedded(emb, digits + 10), digits)
    }

    /// Newton refinement of an approximate root.
    pub fn refine_root(&self, hint: &BigComplex, emb: &EmbeddingData, digits: u32) -> Result<BigComplex> {
        let cs = self.embedded(emb, digits + 10);
        polish(&cs, &hint.with_digits(digits + 10), digits).ok_or_else(|| Error::Numerical("root refinement did not converge".into()))
    }

    /// Human-readable form in the variable `x` over β.
    pub fn display(&self) -> String {
        let n = self.degree();
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = n - i;
            let mono = match e {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{e}"),
            };
            let cs = element_string(c);
            let term = if mono.is_empty() {
                cs
            } else if cs == "1" {
                mono
            } else if cs == "-1" {
                format!("-{mono}")
            } else if c.as_rational().is_some() {
                format!("{cs}{mono}")
            } else {
                format!("({cs}){mono}")
            };
            parts.push(term);
        }
        let mut s = parts.join(" + ");
        s = s.replace("+ -", "- ");
        s
    }
}

/// `c0 + c1·β + c2·β²` printed compactly.
pub fn element_string(e: &FieldElement) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in e.coords.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let mono = ["", "β", "β^2"][i];
        let cs = c.to_string();
        parts.push(match (mono, cs.as_str()) {
            ("", _) => cs,
            (_, "1") => mono.to_string(),
            (_, "-1") => format!("-{mono}"),
            _ => format!("{cs}{mono}"),
        });
    }
    if parts.is_empty() {
        return "0".into();
    }
    parts.join(" + ").replace("+ -", "- ")
}

fn horner(cs: &[BigComplex], z: &BigComplex) -> BigComplex {
    let mut acc = cs[0].clone();
    for c in &cs[1..] {
        acc = &(&acc * z) + c;
    }
    acc
}

fn horner_with_deriv(cs: &[BigComplex], z: &BigComplex) -> (BigComplex, BigComplex) {
    let d = z.prec_digits();
    let mut p = cs[0].clone();
    let mut dp = BigComplex::zero(d);
    for c in &cs[1..] {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + c;
    }
    (p, dp)
}

/// Newton from `z` at doubling precision until the step is below `10^{-digits}`.
fn polish(cs: &[BigComplex], z: &BigComplex, digits: u32) -> Option<BigComplex> {
    let full = cs[0].prec_digits();
    let mut z = z.clone();
    let tol = ten_pow_neg(digits as i64 + 2, digits_to_bits(full));
    let mut stalls = 0;
    for _ in 0..200 {
        let (p, dp) = horner_with_deriv(cs, &z);
        if dp.is_zero() {
            return None;
        }
        let step = &p / &dp;
        z = &z - &step;
        let scale = Float::with_val(64, z.abs().max(&Float::with_val(64, 1)));
        let rel = Float::with_val(64, step.abs() / &scale);
        if rel < tol || step.is_zero() {
            return Some(z);
        }
        if rel > 1e3 {
            stalls += 1;
            if stalls > 20 {
                return None;
            }
        }
    }
    None
}

/// Aberth–Ehrlich at moderate precision, then Newton per root at `digits`.
pub fn roots_of(cs: &[BigComplex], digits: u32) -> Result<Vec<BigComplex>> {
    let n = cs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let d0 = 40u32.max(BigComplex::MIN_DIGITS);
    let lc = cs[0].with_digits(d0);
    let monic: Vec<BigComplex> = cs.iter().map(|c| &c.with_digits(d0) / &lc).collect();
    // Fujiwara bound for the initial circle
    let mut radius = 0f64;
    for (k, c) in monic.iter().enumerate().skip(1) {
        let a = c.abs().to_f64();
        let mut r = a.powf(1.0 / k as f64);
        if k == n {
            r = (a / 2.0).powf(1.0 / k as f64);
        }
        radius = radius.max(2.0 * r);
    }
    let radius = radius.max(1e-3);
    let mut z: Vec<BigComplex> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            BigComplex::from_f64(radius * ang.cos(), radius * ang.sin(), d0)
        })
        .collect();
    let tol = ten_pow_neg(d0 as i64 - 8, digits_to_bits(d0));
    let mut converged = false;
    for _ in 0..2000 {
        let mut max_step = Float::with_val(64, 0);
        for i in 0..n {
            let (p, dp) = horner_with_deriv(&monic, &z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = &p / &dp;
            let mut s = BigComplex::zero(d0);
            for (j, zj) in z.iter().enumerate() {
                if i != j {
                    s = &s + &(&z[i] - zj).recip();
                }
            }
            let one = BigComplex::one(d0);
            let denom = &one - &(&ratio * &s);
            let w = &ratio / &denom;
            let rel = Float::with_val(64, w.abs() / Float::with_val(64, z[i].abs().max(&Float::with_val(64, 1))));
            if rel > max_step {
                max_step = rel;
            }
            z[i] = &z[i] - &w;
        }
        if max_step < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical("Aberth iteration did not converge".into()));
    }
    z.iter()
        .map(|r| polish(cs, &r.with_digits(cs[0].prec_digits()), digits).ok_or_else(|| Error::Numerical("root polishing failed".into())))
        .collect()
}

/// `|p(z)|` with coefficients embedded by σ_C.
pub fn poly_residual(p: &CandidatePoly, z: &BigComplex, emb: &EmbeddingData) -> Float {
    p.eval(z, emb).abs()
}

fn round_scaled(x: &Float, scale: &Float) -> Integer {
    let y = Float::with_val(x.prec().max(scale.prec()), x * scale);
    y.to_integer().expect("finite")
}

/// Integer relation among the complex numbers `xs` (two real equations each
/// scaled by `10^height_digits`), as the LLL-shortest coefficient vector.
fn integer_relation(xs: &[BigComplex], height_digits: u32) -> Vec<Integer> {
    let n = xs.len();
    let bits = xs.iter().map(|x| x.prec_bits()).max().unwrap_or(64).max(digits_to_bits(height_digits + 10));
    let scale = Float::with_val(bits, 10).pow_ref_u(height_digits);
    let mut rows: Vec<Vec<Integer>> = Vec::with_capacity(n);
    for (i, x) in xs.iter().enumerate() {
        let mut row = vec![Integer::new(); n + 2];
        row[i] = Integer::from(1);
        row[n] = round_scaled(&x.re, &scale);
        row[n + 1] = round_scaled(&x.im, &scale);
        rows.push(row);
    }
    lll_reduce(&mut rows, 99, 100);
    rows[0][..n].to_vec()
}

trait PowU {
    fn pow_ref_u(self, e: u32) -> Float;
}

impl PowU for Float {
    fn pow_ref_u(self, e: u32) -> Float {
        let p = self.prec();
        Float::with_val(p, rug::ops::Pow::pow(&self, e))
    }
}

fn check_precision(z: &BigComplex, max_degree: usize, height_digits: u32) -> Result<()> {
    let need = 2 * (max_degree as u32 + 1) * height_digits;
    if z.prec_digits() < need {
        return Err(Error::Numerical(format!(
            "recognition needs {need} digits of z (degree {max_degree}, height {height_digits}), have {}",
            z.prec_digits()
        )));
    }
    Ok(())
}

/// Integer polynomial of degree ≤ `max_degree` vanishing at `z`, found by LLL
/// on `(e_i | C·Re zⁱ | C·Im zⁱ)` with `C = 10^height_digits`; `None` unless
/// its residual is below `10^{-height_digits/2}`.
pub fn recognize_integer_poly(z: &BigComplex, max_degree: usize, height_digits: u32) -> Result<Option<CandidatePoly>> {
    check_precision(z, max_degree, height_digits)?;
    let d = z.prec_digits();
    let mut pw = vec![BigComplex::one(d)];
    for i in 1..=max_degree {
        pw.push(&pw[i - 1] * z);
    }
    let rel = integer_relation(&pw, height_digits);
    let coeffs: Vec<FieldElement> = rel.iter().rev().map(|c| FieldElement::from_rational(Rational::from(c.clone()))).collect();
    finish_recognition(coeffs, z, height_digits, |p, z| {
        let cs: Vec<BigComplex> = p.coeffs.iter().map(|c| BigComplex::from_rational(&c.as_rational().expect("rational"), d)).collect();
        horner(&cs, z).abs()
    })
}

/// Polynomial over ℤ[β] of degree ≤ `max_degree` vanishing at `z`, from an
/// integer relation among the `3(max_degree+1)` numbers `σ_C(β)^j zⁱ`.
pub fn recognize_field_poly(z: &BigComplex, emb: &EmbeddingData, max_degree: usize, height_digits: u32) -> Result<Option<CandidatePoly>> {
    check_precision(z, max_degree, height_digits)?;
    let d = z.prec_digits();
    let beta = emb.embed_complex(&FieldElement::from_ints(0, 1, 0)).with_digits(d);
    let bj = [BigComplex::one(d), beta.clone(), &beta * &beta];
    let mut zi = vec![BigComplex::one(d)];
    for i in 1..=max_degree {
        zi.push(&zi[i - 1] * z);
    }
    let mut xs = Vec::new();
    for zp in &zi {
        for b in &bj {
            xs.push(zp * b);
        }
    }
    let rel = integer_relation(&xs, height_digits);
    let mut coeffs = Vec::new();
    for i in (0..=max_degree).rev() {
        let c = [rel[3 * i].clone(), rel[3 * i + 1].clone(), rel[3 * i + 2].clone()];
        coeffs.push(FieldElement::new(c.map(Rational::from)));
    }
    finish_recognition(coeffs, z, height_digits, |p, z| p.eval(z, emb).abs())
}

fn finish_recognition(
    mut coeffs: Vec<FieldElement>,
    z: &BigComplex,
    height_digits: u32,
    residual: impl Fn(&CandidatePoly, &BigComplex) -> Float,
) -> Result<Option<CandidatePoly>> {
    if coeffs.iter().all(|c| c.is_zero()) {
        return Ok(None);
    }
    // leading coefficient positive in its first nonzero coordinate
    let lead = coeffs.iter().find(|c| !c.is_zero()).expect("nonzero");
    let first = lead.coords.iter().find(|c| **c != 0).expect("nonzero");
    if *first < 0 {
        coeffs = coeffs.iter().map(|c| c.neg()).collect();
    }
    let p = CandidatePoly::new(coeffs)?;
    if p.degree() == 0 {
        return Ok(None);
    }
    let r = residual(&p, z);
    let bound = ten_pow_neg((height_digits / 2) as i64, 64);
    Ok(if r < bound { Some(p) } else { None })
}

/// Coefficients of `∏ (x − vᵢ)`, highest first.
pub fn poly_from_roots(values: &[BigComplex]) -> Vec<BigComplex> {
    let d = values.iter().map(|v| v.prec_digits()).max().unwrap_or(BigComplex::MIN_DIGITS);
    let mut cs = vec![BigComplex::one(d)];
    for v in values {
        let mut next = vec![BigComplex::zero(d); cs.len() + 1];
        for (i, c) in cs.iter().enumerate() {
            next[i] = &next[i] + c;
            next[i + 1] = &next[i + 1] - &(c * v);
        }
        cs = next;
    }
    cs
}

/// Recognizes a complex number as `m₀ + m₁β + m₂β²` over ℚ from an integer
/// relation among `(1, β, β², c)`.
pub fn recognize_element(c: &BigComplex, emb: &EmbeddingData, height_digits: u32) -> Option<FieldElement> {
    let d = c.prec_digits();
    let beta = emb.embed_complex(&FieldElement::from_ints(0, 1, 0)).with_digits(d);
    let xs = [BigComplex::one(d), beta.clone(), &beta * &beta, c.clone()];
    let rel = integer_relation(&xs, height_digits);
    if rel[3] == 0 {
        return None;
    }
    let den = Rational::from(-rel[3].clone());
    let e = FieldElement::new([0, 1, 2].map(|i| Rational::from(&rel[i] / &den)));
    let err = (&emb.embed_complex(&e).with_digits(d) - c).abs();
    (err < ten_pow_neg((height_digits / 2) as i64, 64)).then_some(e)
}

/// The polynomial over K whose roots are a full Galois orbit of values,
/// recognized coefficient by coefficient.
pub fn recognize_orbit_poly(values: &[BigComplex], emb: &EmbeddingData, height_digits: u32) -> Option<CandidatePoly> {
    let cs = poly_from_roots(values);
    let coeffs: Option<Vec<FieldElement>> = cs.iter().map(|c| recognize_element(c, emb, height_digits)).collect();
    CandidatePoly::new(coeffs?).ok()
}

/// Classes `𝔟⁰ … 𝔟^{m−1}` (by label) and index pairs expected to multiply to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSpec {
    pub classes: Vec<String>,
    pub inverse_pairing: Vec<(usize, usize)>,
}

/// Inverse pairings `|vᵢ·vⱼ − 1|` and, given a candidate, the matching of the
/// values with its root multiset.
pub fn orbit_check(
    values: &[BigComplex],
    spec: &OrbitSpec,
    tol: &Float,
    candidate: Option<(&CandidatePoly, &EmbeddingData)>,
) -> Result<CheckReport> {
    let mut records = Vec::new();
    for &(i, j) in &spec.inverse_pairing {
        let (vi, vj) = (values.get(i), values.get(j));
        let (Some(vi), Some(vj)) = (vi, vj) else {
            return Err(Error::Config(format!("orbit pair ({i}, {j}) out of range")));
        };
        let prod = vi * vj;
        let err = (&prod - &BigComplex::one(prod.prec_digits())).abs();
        let name = format!("{}*{}", label(spec, i), label(spec, j));
        records.push(Record::new(name, vec![prod.to_string_digits(20)], Some("1".into()), &err, tol));
    }
    if let Some((p, emb)) = candidate {
        let digits = values.iter().map(|v| v.prec_digits()).min().unwrap_or(BigComplex::MIN_DIGITS);
        if p.degree() == values.len() {
            let roots = p.roots(emb, digits.saturating_sub(10).max(BigComplex::MIN_DIGITS))?;
            let mut used = vec![false; roots.len()];
            let mut worst = Float::with_val(64, 0);
            for v in values {
                let (k, dist) = roots
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| !used[*k])
                    .map(|(k, r)| (k, (r - v).abs()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
                    .expect("enough roots");
                used[k] = true;
                if dist > worst {
                    worst = Float::with_val(64, dist);
                }
            }
            records.push(Record::new("root_multiset", vec![format!("{} values", values.len())], Some(p.display()), &worst, tol));
        } else {
            let mut worst = Float::with_val(64, 0);
            for v in values {
                let r = poly_residual(p, v, emb);
                if r > worst {
                    worst = Float::with_val(64, r);
                }
            }
            records.push(Record::new("roots_of_candidate", vec![format!("{} values", values.len())], Some(p.display()), &worst, tol));
        }
    }
    Ok(CheckReport::new("orbit", records))
}

fn label(spec: &OrbitSpec, i: usize) -> String {
    spec.classes.get(i).cloned().unwrap_or_else(|| format!("#{i}"))
}

/// The Stark relation `u^{N(𝔞)} / σ_𝔞(u) = 𝚪^{e_𝔣}`.
#[derive(Clone, Debug)]
pub struct StarkOutcome {
    pub u: BigComplex,
    pub partner: BigComplex,
    pub lhs: BigComplex,
    pub rhs: BigComplex,
    /// Larger of the absolute and relative residuals.
    pub residual: Float,
}

/// Checks the relation for a given `u` (refined from `stark_root_hint`) and
/// partner `σ_𝔞(u)`; with no partner given, the root of `stark_poly` that
/// best satisfies the relation is taken, and with no hint every root is tried as `u`.
#[allow(clippy::too_many_arguments)]
pub fn stark_relation_check(
    gamma_value: &BigComplex,
    stark_poly: &CandidatePoly,
    stark_root_hint: Option<&BigComplex>,
    e_f: u32,
    n_a: u32,
    sigma_a_partner: Option<&BigComplex>,
    emb: &EmbeddingData,
    tol: &Float,
) -> Result<(CheckReport, StarkOutcome)> {
    let digits = gamma_value.prec_digits();
    let rhs = gamma_value.powi(e_f as i64);
    let roots = stark_poly.roots(emb, digits)?;
    let us: Vec<BigComplex> = match stark_root_hint {
        Some(h) => {
            let h = h.with_digits(digits);
            let nearest = roots
                .iter()
                .min_by(|a, b| (*a - &h).abs().partial_cmp(&(*b - &h).abs()).expect("finite"))
                .ok_or_else(|| Error::Numerical("polynomial has no roots".into()))?;
            let dist = (nearest - &h).abs();
            let scale = Float::with_val(64, h.abs().max(&Float::with_val(64, 1)));
            if Float::with_val(64, dist / scale) > 1e-2 {
                return Err(Error::Numerical("root hint is not close to a root".into()));
            }
            vec![nearest.clone()]
        }
        None => roots.clone(),
    };
    let partners: Vec<BigComplex> = match sigma_a_partner {
        Some(p) => vec![p.with_digits(digits)],
        None => roots.clone(),
    };
    let mut best: Option<StarkOutcome> = None;
    for u in &us {
        let un = u.powi(n_a as i64);
        for p in &partners {
            if p.is_zero() {
                continue;
            }
            let lhs = &un / p;
            let abs_err = (&lhs - &rhs).abs();
            let rel_err = Float::with_val(abs_err.prec(), &abs_err / rhs.abs());
            let residual = if rel_err > abs_err { rel_err } else { abs_err };
            if best.as_ref().is_none_or(|b| residual < b.residual) {
                best = Some(StarkOutcome { u: u.clone(), partner: p.clone(), lhs, rhs: rhs.clone(), residual });
            }
        }
    }
    let out = best.ok_or_else(|| Error::Numerical("no usable root pair".into()))?;
    let rec = Record::new(
        format!("u^{n_a}/sigma_a(u) = Gamma^{e_f}"),
        vec![out.lhs.to_string_digits(20), out.u.to_string_digits(20), out.partner.to_string_digits(20)],
        Some(out.rhs.to_string_digits(20)),
        &out.residual,
        tol,
    );
    Ok((CheckReport::new("stark", vec![rec]), out))
}

/// `|a − b| / max(1, |b|)`.
pub fn rel_dist(a: &BigComplex, b: &BigComplex) -> Float {
    let d = (a - b).abs();
    let s = b.abs();
    if s > 1 {
        Float::with_val(d.prec(), d / s)
    } else {
        d
    }
}

/// `v^power`, optionally normalized to `Re ≥ 0` when only defined up to sign.
pub fn normalized_power(v: &BigComplex, power: u32, up_to_sign: bool) -> BigComplex {
    let p = v.powi(power as i64);
    if up_to_sign && (p.re < 0 || (p.re == 0 && p.im < 0)) {
        -p
    } else {
        p
    }
}

fn identity_record(name: &str, lhs: &BigComplex, rhs: &BigComplex, tol: &Float) -> Record {
    Record::new(name, vec![lhs.to_string_digits(20)], Some(rhs.to_string_digits(20)), &rel_dist(lhs, rhs), tol)
}

/// Functional equations of θ₀ and Γ at `(z, τ, σ)` with `Im τ, Im σ > 0`
/// and `0 < Im z < Im(τ + σ)`.
pub fn function_identities(z: &BigComplex, tau: &BigComplex, sigma: &BigComplex, budget: &TailBudget) -> Result<Vec<Record>> {
    let tol = ten_pow_neg(budget.target_digits as i64, 64);
    let d = budget.working_digits();
    let (z, tau, sigma) = (z.with_digits(d), tau.with_digits(d), sigma.with_digits(d));
    let g = |z: &BigComplex, t: &BigComplex, s: &BigComplex| gamma_basic(z, t, s, budget).map(|v| v.value);
    let th = |z: &BigComplex, t: &BigComplex| theta0(z, t, budget).map(|v| v.value);
    let one = BigComplex::one(d);
    let gz = g(&z, &tau, &sigma)?;
    let mut out = Vec::new();

    let refl = &gz * &g(&(&(&tau + &sigma) - &z), &tau, &sigma)?;
    out.push(identity_record("reflection", &refl, &one, &tol));

    let lhs = g(&(&z + &tau), &tau, &sigma)?;
    out.push(identity_record("gamma_shift_tau", &lhs, &(&th(&z, &sigma)? * &gz), &tol));
    let lhs = g(&(&z + &sigma), &tau, &sigma)?;
    out.push(identity_record("gamma_shift_sigma", &lhs, &(&th(&z, &tau)? * &gz), &tol));

    let tz = th(&z, &tau)?;
    out.push(identity_record("theta_shift_one", &th(&(&z + &one), &tau)?, &tz, &tol));
    let rhs = -&(&exp2pii(&-&z) * &tz);
    out.push(identity_record("theta_shift_tau", &th(&(&z + &tau), &tau)?, &rhs, &tol));

    let conj = g(&-&z.conj(), &-&tau.conj(), &-&sigma.conj())?;
    out.push(identity_record("conjugation", &conj, &gz.conj(), &tol));

    for n in [3u32, 5, 7] {
        let nn = BigComplex::from_f64(n as f64, 0.0, d);
        let mut prod = BigComplex::one(d);
        for j in 0..n {
            let shift = BigComplex::from_rational(&Rational::from((j, n)), d);
            prod = &prod * &g(&(&z + &shift), &tau, &sigma)?;
        }
        let rhs = g(&(&nn * &z), &(&nn * &tau), &(&nn * &sigma))?;
        out.push(identity_record(&format!("distribution_n{n}"), &prod, &rhs, &tol));
    }
    Ok(out)
}

/// How smoothed values are compared across admissible points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Normalization {
    pub power: u32,
    pub up_to_sign: bool,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization { power: 1, up_to_sign: false }
    }
}

/// Identities of the smoothed value for one context: independence of the
/// admissible point, `λ ↦ ελ` invariance, the value at `−h`, the boundary
/// ratio, and the basic functional equations at the frame's `(−τ, σ)`.
pub fn smoothed_properties(ctx: &SmoothedContext, budget: &TailBudget, lambda_count: usize, norm: Normalization) -> Result<CheckReport> {
    let tol = ten_pow_neg(budget.target_digits as i64, 64);
    let d = budget.working_digits();
    let n = ctx.n_u32();
    let cands = ctx.candidates(lambda_count.max(2))?;
    let mut frames: Vec<SmoothedFrames> = cands.iter().map(|p| ctx.frames(p)).collect::<Result<_>>()?;
    frames.sort_by(|a, b| a.cost(d, n).total_cmp(&b.cost(d, n)));
    if frames.len() < 2 {
        return Err(Error::Domain("need two admissible points".into()));
    }
    let mut records = Vec::new();
    let mut notes = Vec::new();
    let v1 = ctx.value(&frames[0], budget)?;
    let v2 = ctx.value(&frames[1], budget)?;
    let n1 = normalized_power(&v1.value, norm.power, norm.up_to_sign);
    let n2 = normalized_power(&v2.value, norm.power, norm.up_to_sign);
    records.push(identity_record("h_independence", &n2, &n1, &tol));

    let p = &frames[0].point;
    let moved = AdmissiblePoint::new(ctx.field.mul(&ctx.eps.epsilon, &p.lambda), p.q.clone());
    let fm = ctx.frames(&moved)?;
    let vm = normalized_power(&ctx.value(&fm, budget)?.value, norm.power, norm.up_to_sign);
    records.push(identity_record("epsilon_lambda_invariance", &vm, &n1, &tol));

    let one = BigComplex::one(d);
    let gcd6 = Integer::from(ctx.n.gcd_ref(&Integer::from(6))) == 1;
    if ctx.is_relaxed() {
        notes.push("value at -h not checked: smoothing ideal outside the root-of-unity range".to_string());
    } else {
        let vneg = ctx.smoothed_at(&frames[0], &-&frames[0].w, budget)?;
        let zeta = &v1.value * &vneg.value;
        records.push(identity_record("minus_h_cube", &zeta.powi(3), &one, &tol));
        if gcd6 {
            records.push(identity_record("minus_h", &zeta, &one, &tol));
        }
    }

    let ratio = boundary_lemma_check(&frames[0].frame_l, p, n, budget)?;
    let abs = BigComplex::from_real(ratio.abs(), d);
    records.push(identity_record("boundary_abs", &abs, &one, &tol));
    if gcd6 {
        records.push(identity_record("boundary_ratio", &ratio, &one, &tol));
    }

    let fr = &frames[0].frame_l;
    let (t, s) = (-&fr.tau, fr.sigma.clone());
    let sum = &t + &s;
    let z = &BigComplex::from_f64(0.3137, 0.0, d) + &sum.scale(&Float::with_val(64, 0.37));
    records.extend(function_identities(&z, &t, &s, budget)?);

    let mut rep = CheckReport::new("properties", records);
    for note in notes {
        rep = rep.with_note(note);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubicfield::RootChoice;

    #[test]
    fn golden_ratio_recognized() {
        let d = 50;
        let bits = digits_to_bits(d);
        let phi = Float::with_val(bits, Float::with_val(bits, 5).sqrt() + 1u32) / 2u32;
        let z = BigComplex::from_real(phi, d);
        let p = recognize_integer_poly(&z, 4, 5).unwrap().unwrap();
        assert_eq!(p, CandidatePoly::from_integers(&[1, -1, -1]).unwrap());
    }

    #[test]
    fn noise_not_recognized() {
        let d = 60;
        let z = BigComplex::new(
            crate::numeric::parse_float("0.3183098861837906715377675267450287240689192914809128974953", d).unwrap(),
            crate::numeric::parse_float("0.5772156649015328606065120900824024310421593359399235988057", d).unwrap(),
            d,
        );
        assert!(recognize_integer_poly(&z, 2, 10).unwrap().is_none());
        assert!(recognize_integer_poly(&z, 6, 10).is_err());
    }

    #[test]
    fn roots_and_residuals() {
        let k = CubicField::new(0, 0, -7, RootChoice::NegativeImaginary).unwrap();
        let emb = k.embedding(80).unwrap();
        let q = CandidatePoly::new(vec![
            FieldElement::from_ints(1, 0, 0),
            FieldElement::from_ints(2, -14, 6),
            FieldElement::from_ints(2, -6, 4),
            FieldElement::from_ints(-103, -152, 106),
            FieldElement::from_ints(2, -6, 4),
            FieldElement::from_ints(2, -14, 6),
            FieldElement::from_ints(1, 0, 0),
        ])
        .unwrap();
        assert!(q.is_palindromic() && q.is_unit_shape(&k));
        let roots = q.roots(&emb, 50).unwrap();
        assert_eq!(roots.len(), 6);
        for r in &roots {
            assert!(poly_residual(&q, r, &emb) < 1e-45);
        }
        // palindromic: inverses are roots
        for r in &roots {
            assert!(poly_residual(&q, &r.recip(), &emb) < 1e-40);
        }
        let target = BigComplex::from_f64(-4.024029545, -41.85595177, 50);
        assert!(roots.iter().any(|r| (r - &target).abs() < 1e-8));
        let back = recognize_orbit_poly(&roots, &emb, 30).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn field_recognition_small() {
        let k = CubicField::new(0, 0, -7, RootChoice::NegativeImaginary).unwrap();
        let emb = k.embedding(80).unwrap();
        // x² − βx + 1
        let p = CandidatePoly::new(vec![FieldElement::one(), FieldElement::from_ints(0, -1, 0), FieldElement::one()]).unwrap();
        let r = p.roots(&emb, 60).unwrap();
        let got = recognize_field_poly(&r[0], &emb, 2, 10).unwrap().unwrap();
        assert_eq!(got, p);
        let third = BigComplex::from_rational(&Rational::from((1, 3)), 60);
        let got = recognize_field_poly(&third, &emb, 1, 10).unwrap().unwrap();
        assert_eq!(got.degree(), 1);
        assert_eq!(got.display(), "3x - 1");
    }
}
