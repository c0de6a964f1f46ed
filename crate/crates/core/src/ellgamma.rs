//! θ₀, the elliptic gamma function Γ(z, τ, σ) with its domain extension, the
//! lattice gamma Γ_{a,b}, the smoothed value 𝚪_{𝔞,h}(L) and the Eisenstein
//! quotient of quotients.

use rayon::prelude::*;
use rug::{Float, Integer, Rational};

use crate::conegeom::{build_frame, solve_lemma22, FormPair, GammaFrame, OrientedLattice};
use crate::cubicfield::{CubicField, EmbeddingData, FieldElement, UnitData};
use crate::error::{Error, Result};
use crate::ideallat::{coprime, AdmissiblePoint, AdmissibleSearch, IdealLattice};
use crate::numeric::{digits_to_bits, exp2pii, ten_pow_neg, BigComplex, TailBudget};

/// A computed product value with its truncation record.
#[derive(Clone, Debug)]
pub struct GammaValue {
    pub value: BigComplex,
    /// Sum of principal logs of the partial products.
    pub log_value: BigComplex,
    pub factors_used: u64,
    pub tail_bound: Float,
    pub saturated: bool,
}

impl GammaValue {
    fn exact(value: BigComplex) -> Self {
        let d = value.prec_digits();
        let log_value = if value.is_zero() { BigComplex::zero(d) } else { value.ln() };
        GammaValue { value, log_value, factors_used: 0, tail_bound: Float::new(64), saturated: false }
    }

    pub fn one(digits: u32) -> Self {
        Self::exact(BigComplex::one(digits))
    }

    pub fn recip(&self) -> GammaValue {
        GammaValue {
            value: self.value.recip(),
            log_value: -&self.log_value,
            factors_used: self.factors_used,
            tail_bound: self.tail_bound.clone(),
            saturated: self.saturated,
        }
    }

    pub fn mul(&self, o: &GammaValue) -> GammaValue {
        GammaValue {
            value: &self.value * &o.value,
            log_value: &self.log_value + &o.log_value,
            factors_used: self.factors_used + o.factors_used,
            tail_bound: Float::with_val(self.tail_bound.prec().max(64), &self.tail_bound + &o.tail_bound),
            saturated: self.saturated || o.saturated,
        }
    }

    pub fn div(&self, o: &GammaValue) -> GammaValue {
        self.mul(&o.recip())
    }

    pub fn powi(&self, n: i64) -> GammaValue {
        let d = self.log_value.prec_digits();
        let nn = BigComplex::from_f64(n as f64, 0.0, d);
        let tb = Float::with_val(self.tail_bound.prec().max(64), &self.tail_bound * (n.unsigned_abs() as f64));
        GammaValue {
            value: self.value.powi(n),
            log_value: &self.log_value * &nn,
            factors_used: self.factors_used,
            tail_bound: tb,
            saturated: self.saturated,
        }
    }
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn ln_abs_e(z_im: &Float) -> f64 {
    // ln |e(z)| = -2π Im z
    -TWO_PI * z_im.to_f64()
}

/// Least `m ≥ 0` with `exp(ln_scale + m ln_q) / (1 - q) < eps`, as f64 logs.
fn terms_needed(ln_scale: f64, ln_q: f64, ln_eps: f64) -> f64 {
    let ln_den = (-(ln_q.exp())).ln_1p();
    let m = (ln_eps + ln_den - ln_scale) / ln_q;
    m.ceil().max(0.0) + 1.0
}

fn v_im(tau: &BigComplex, z: &BigComplex) -> Float {
    Float::with_val(tau.im.prec(), &tau.im - &z.im)
}

fn at(z: &BigComplex, digits: u32) -> BigComplex {
    z.with_digits(digits)
}

fn near_pole_tol(budget: &TailBudget, bits: u32) -> Float {
    ten_pow_neg((budget.target_digits / 2).max(1) as i64, bits)
}

/// `θ₀(z, τ) = ∏_{n≥0} (1 − e(nτ + z))(1 − e((n+1)τ − z))`.
pub fn theta0(z: &BigComplex, tau: &BigComplex, budget: &TailBudget) -> Result<GammaValue> {
    if tau.im <= 0 {
        return Err(Error::Domain("theta0 needs Im(tau) > 0".into()));
    }
    let d = budget.working_digits();
    let bits = digits_to_bits(d);
    let (z, tau) = (at(z, d), at(tau, d));
    let ln_q = ln_abs_e(&tau.im);
    let u = exp2pii(&z);
    let v = exp2pii(&(&tau - &z));
    let ln_scale = ln_abs_e(&z.im).max(ln_abs_e(&v_im(&tau, &z))) + std::f64::consts::LN_2;
    let ln_eps = -(budget.total_digits() as f64) * std::f64::consts::LN_10;
    let need = terms_needed(ln_scale, ln_q, ln_eps);
    let (m, saturated) = if need > budget.max_terms as f64 { (budget.max_terms, true) } else { (need as u64, false) };
    let q = exp2pii(&tau);
    let one = BigComplex::one(d);
    let mut x = u;
    let mut y = v;
    let mut acc = BigComplex::one(d);
    let mut logs = BigComplex::zero(d);
    let tol = near_pole_tol(budget, bits);
    let (mut t1, mut t2) = (Float::new(bits), Float::new(bits));
    for n in 0..m {
        let f1 = &one - &x;
        let f2 = &one - &y;
        if f1.abs() < tol || f2.abs() < tol {
            return Ok(GammaValue {
                value: BigComplex::zero(d),
                log_value: BigComplex::zero(d),
                factors_used: 2 * n + 2,
                tail_bound: Float::new(64),
                saturated: false,
            });
        }
        acc.mul_assign_ref(&f1, &mut t1, &mut t2);
        acc.mul_assign_ref(&f2, &mut t1, &mut t2);
        if n % 64 == 63 {
            logs = &logs + &acc.ln();
            acc = BigComplex::one(d);
        }
        x.mul_assign_ref(&q, &mut t1, &mut t2);
        y.mul_assign_ref(&q, &mut t1, &mut t2);
    }
    logs = &logs + &acc.ln();
    let tail = (ln_scale + (m as f64) * ln_q - (-(ln_q.exp())).ln_1p()).exp();
    Ok(GammaValue { value: logs.exp(), log_value: logs, factors_used: 2 * m, tail_bound: Float::with_val(64, tail), saturated })
}

/// Row-wise product plan for `Γ(z, τ, σ)`, `Im τ, Im σ > 0`.
struct Plan {
    rows: Vec<u64>,
    tail: f64,
    saturated: bool,
}

fn plan(ln_m: f64, ln_qt: f64, ln_qs: f64, budget: &TailBudget) -> Plan {
    let ln_eps = -(budget.total_digits() as f64) * std::f64::consts::LN_10;
    let ln_den_s = (-(ln_qs.exp())).ln_1p();
    let ln_den_t = (-(ln_qt.exp())).ln_1p();
    // rows beyond J contribute below eps/2
    let need_j = ((ln_eps - std::f64::consts::LN_2 + ln_den_s + ln_den_t - ln_m) / ln_qt).ceil().max(0.0);
    let mut saturated = false;
    let j_rows = if need_j > budget.max_terms as f64 {
        saturated = true;
        budget.max_terms
    } else {
        need_j as u64
    };
    let ln_row_eps = ln_eps - std::f64::consts::LN_2 - ((j_rows.max(1)) as f64).ln();
    let mut rows = Vec::with_capacity(j_rows as usize);
    let mut tail = (ln_m + (j_rows as f64) * ln_qt - ln_den_s - ln_den_t).exp();
    for j in 0..j_rows {
        let ln_row = ln_m + (j as f64) * ln_qt;
        let k = ((ln_row_eps + ln_den_s - ln_row) / ln_qs).ceil().max(1.0);
        let k = if k > budget.max_terms as f64 {
            saturated = true;
            budget.max_terms
        } else {
            k as u64
        };
        tail += (ln_row + (k as f64) * ln_qs - ln_den_s).exp();
        rows.push(k);
    }
    Plan { rows, tail, saturated }
}

/// `Γ(z, τ, σ) = ∏_{j,k≥0} (1 − e((j+1)τ + (k+1)σ − z)) / (1 − e(jτ + kσ + z))`.
pub fn gamma_basic(z: &BigComplex, tau: &BigComplex, sigma: &BigComplex, budget: &TailBudget) -> Result<GammaValue> {
    if tau.im <= 0 || sigma.im <= 0 {
        return Err(Error::Domain("gamma_basic needs Im(tau) > 0 and Im(sigma) > 0".into()));
    }
    let d = budget.working_digits();
    let bits = digits_to_bits(d);
    let (mut z, tau, sigma) = (at(z, d), at(tau, d), at(sigma, d));
    // Γ is 1-periodic in z
    let shift = z.re.clone().floor();
    z.re -= &shift;
    let ln_qt = ln_abs_e(&tau.im);
    let ln_qs = ln_abs_e(&sigma.im);
    let ln_u = ln_abs_e(&z.im);
    let vz = &(&tau + &sigma) - &z;
    let ln_v = ln_abs_e(&vz.im);
    let ln_m = ln_u.max(ln_v) + std::f64::consts::LN_2;
    let p = plan(ln_m, ln_qt, ln_qs, budget);

    let qt = exp2pii(&tau);
    let qs = exp2pii(&sigma);
    let u = exp2pii(&z);
    let v = exp2pii(&vz);
    // row starts qt^j·u and qt^j·v
    let mut starts = Vec::with_capacity(p.rows.len());
    let (mut a, mut b) = (u, v);
    let (mut t1, mut t2) = (Float::new(bits), Float::new(bits));
    for _ in 0..p.rows.len() {
        starts.push((a.clone(), b.clone()));
        a.mul_assign_ref(&qt, &mut t1, &mut t2);
        b.mul_assign_ref(&qt, &mut t1, &mut t2);
    }
    let tol = near_pole_tol(budget, bits);
    let rows: Vec<Result<(BigComplex, BigComplex)>> = starts
        .par_iter()
        .zip(p.rows.par_iter())
        .enumerate()
        .map(|(j, ((a0, b0), &k_max))| {
            let one = BigComplex::one(d);
            let (mut t1, mut t2) = (Float::new(bits), Float::new(bits));
            let mut x = a0.clone();
            let mut y = b0.clone();
            let mut num = BigComplex::one(d);
            let mut den = BigComplex::one(d);
            let ln_row = ln_u + (j as f64) * ln_qt;
            for k in 0..k_max {
                let fd = &one - &x;
                let ln_x = ln_row + (k as f64) * ln_qs;
                if ln_x.abs() < 1.0 && fd.abs() < tol {
                    return Err(Error::NearPole(format!("(j, k) = ({j}, {k})")));
                }
                den.mul_assign_ref(&fd, &mut t1, &mut t2);
                let fnum = &one - &y;
                num.mul_assign_ref(&fnum, &mut t1, &mut t2);
                x.mul_assign_ref(&qs, &mut t1, &mut t2);
                y.mul_assign_ref(&qs, &mut t1, &mut t2);
            }
            let r = &num / &den;
            Ok((r.clone(), r.ln()))
        })
        .collect();
    let mut value = BigComplex::one(d);
    let mut log_value = BigComplex::zero(d);
    let mut factors = 0u64;
    for (r, k) in rows.into_iter().zip(&p.rows) {
        let (rv, rl) = r?;
        value.mul_assign_ref(&rv, &mut t1, &mut t2);
        log_value = &log_value + &rl;
        factors += 2 * k;
    }
    Ok(GammaValue { value, log_value, factors_used: factors, tail_bound: Float::with_val(64, p.tail), saturated: p.saturated })
}

/// Γ on `Im τ ≠ 0, Im σ ≠ 0` via `Γ(z,τ,σ) = 1/Γ(z−τ,−τ,σ) = 1/Γ(z−σ,τ,−σ)`.
pub fn gamma_extended(z: &BigComplex, tau: &BigComplex, sigma: &BigComplex, budget: &TailBudget) -> Result<GammaValue> {
    if tau.im == 0 || sigma.im == 0 {
        return Err(Error::Domain("gamma_extended needs non-real tau and sigma".into()));
    }
    match (tau.im > 0, sigma.im > 0) {
        (true, true) => gamma_basic(z, tau, sigma, budget),
        (false, true) => Ok(gamma_basic(&(z - tau), &-tau, sigma, budget)?.recip()),
        (true, false) => Ok(gamma_basic(&(z - sigma), tau, &-sigma, budget)?.recip()),
        (false, false) => gamma_basic(&(&(z - tau) - sigma), &-tau, &-sigma, budget),
    }
}

/// `Γ_{a,b}(w, x; L) = ∏_{δ∈F} Γ((w + δ(x))/γ(x), τ, σ)`.
pub fn gamma_lattice(frame: &GammaFrame, w: &BigComplex, emb: &EmbeddingData, budget: &TailBudget) -> Result<GammaValue> {
    let d = budget.working_digits();
    let xg = at(&frame.x_gamma, d);
    let mut acc = GammaValue::one(d);
    for delta in &frame.f_reps {
        let xd = at(&emb.embed_complex(delta), d);
        let z = &(&at(w, d) + &xd) / &xg;
        acc = acc.mul(&gamma_extended(&z, &frame.tau, &frame.sigma, budget)?);
    }
    Ok(acc)
}

/// `θ₀(z, t)^N / θ₀(Nz, Nt)` for `Im t > 0`.
pub fn theta0_smoothed(z: &BigComplex, t: &BigComplex, n: u32, budget: &TailBudget) -> Result<GammaValue> {
    if n == 1 {
        return Ok(GammaValue::one(budget.working_digits()));
    }
    let d = budget.working_digits();
    let nn = BigComplex::from_f64(n as f64, 0.0, d);
    let top = theta0(z, t, budget)?.powi(n as i64);
    let bottom = theta0(&(&nn * z), &(&nn * t), budget)?;
    if bottom.value.is_zero() {
        return Err(Error::NearPole("theta0(Nz, Nt) vanishes".into()));
    }
    Ok(top.div(&bottom))
}

/// `[Γ(z−v,A,A′)/Γ(−v,A,A′)]^N / [Γ(Nz−Nv,NA,NA′)/Γ(−Nv,NA,NA′)]`.
pub fn eisenstein_quotient(
    z: &BigComplex,
    v: &BigComplex,
    a: &BigComplex,
    ap: &BigComplex,
    n: u32,
    budget: &TailBudget,
) -> Result<GammaValue> {
    let d = budget.working_digits();
    let nn = BigComplex::from_f64(n as f64, 0.0, d);
    let zmv = z - v;
    let g1 = gamma_extended(&zmv, a, ap, budget)?;
    let g2 = gamma_extended(&-v, a, ap, budget)?;
    let (na, nap) = (&nn * a, &nn * ap);
    let g3 = gamma_extended(&(&nn * &zmv), &na, &nap, budget)?;
    let g4 = gamma_extended(&-(&nn * v), &na, &nap, budget)?;
    Ok(g1.div(&g2).powi(n as i64).div(&g3.div(&g4)))
}

/// How the admissible point is picked when none is supplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaSelection {
    /// First admissible point in enumeration order.
    First,
    /// Cheapest product among the first `n` in enumeration order.
    Cheapest(usize),
}

/// Everything fixed by `(K, 𝔣, 𝔟, 𝔞, ε)` before an admissible point is chosen.
#[derive(Clone, Debug)]
pub struct SmoothedContext {
    pub field: CubicField,
    pub emb: EmbeddingData,
    pub eps: UnitData,
    pub l: IdealLattice,
    pub al: IdealLattice,
    pub a_ideal: IdealLattice,
    pub q: Integer,
    pub n: Integer,
    pub ol: OrientedLattice,
    pub oal: OrientedLattice,
    relaxed: bool,
}

/// Frames for `L` and `𝔞⁻¹L` sharing one pair of forms.
#[derive(Clone, Debug)]
pub struct SmoothedFrames {
    pub point: AdmissiblePoint,
    pub forms: FormPair,
    pub frame_l: GammaFrame,
    pub frame_al: GammaFrame,
    /// `h(x) = σ_C(λ/q)`.
    pub w: BigComplex,
}

impl SmoothedFrames {
    pub fn cost(&self, digits: u32, n: u32) -> f64 {
        // Γ(·; L) is raised to the N-th power after a single evaluation
        let _ = n;
        self.frame_l.cost(digits) + self.frame_al.cost(digits)
    }
}

impl SmoothedContext {
    /// Validates the arithmetic conditions and prepares the lattices.
    /// `relaxed` admits `N(𝔞) = 2` and skips the coprimality checks on 𝔞.
    pub fn new(
        field: &CubicField,
        f: &IdealLattice,
        b: &IdealLattice,
        a_ideal: &IdealLattice,
        eps: &UnitData,
        emb: &EmbeddingData,
        relaxed: bool,
    ) -> Result<Self> {
        if !f.is_integral(field) || !b.is_integral(field) || !a_ideal.is_integral(field) {
            return Err(Error::Config("f, b and a must be integral ideals".into()));
        }
        if !coprime(field, f, b) {
            return Err(Error::Config("(f, b) != 1".into()));
        }
        let q = f.smallest_rational();
        let q = q.numer().clone();
        let l = IdealLattice::product(field, f, &IdealLattice::inverse(field, b)?);
        let n_rat = a_ideal.norm(field);
        let n = n_rat.numer().clone();
        if !relaxed {
            crate::ideallat::check_smoothing_ideal(field, a_ideal, &q)?;
            let nf = f.norm(field);
            if Integer::from(n.gcd_ref(nf.numer())) != 1 {
                return Err(Error::Config("a must be coprime to N(f)".into()));
            }
        }
        let al = IdealLattice::product(field, &IdealLattice::inverse(field, a_ideal)?, &l);
        let ol = OrientedLattice::new(&l, emb)?;
        let oal = OrientedLattice::new(&al, emb)?;
        Ok(SmoothedContext {
            field: field.clone(),
            emb: emb.clone(),
            eps: eps.clone(),
            l,
            al,
            a_ideal: a_ideal.clone(),
            q,
            n,
            ol,
            oal,
            relaxed,
        })
    }

    pub fn candidates(&self, count: usize) -> Result<Vec<AdmissiblePoint>> {
        Ok(AdmissibleSearch::new(&self.field, &self.l, &self.a_ideal, &self.q, self.relaxed)?.candidates(count))
    }

    pub fn frames(&self, point: &AdmissiblePoint) -> Result<SmoothedFrames> {
        let forms = solve_lemma22(&self.field, point, &self.eps, &self.ol, &self.emb)?;
        let frame_l = build_frame(&forms, &self.ol, &self.emb)?;
        let frame_al = build_frame(&forms, &self.oal, &self.emb)?;
        let w = self.emb.embed_complex(&point.h);
        Ok(SmoothedFrames { point: point.clone(), forms, frame_l, frame_al, w })
    }

    pub fn select(&self, how: LambdaSelection, digits: u32) -> Result<SmoothedFrames> {
        match how {
            LambdaSelection::First => self.frames(&self.candidates(1)?[0]),
            LambdaSelection::Cheapest(count) => {
                let mut best: Option<(f64, SmoothedFrames)> = None;
                for p in self.candidates(count.max(1))? {
                    let fr = self.frames(&p)?;
                    let c = fr.cost(digits, self.n.to_u32().unwrap_or(u32::MAX));
                    if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
                        best = Some((c, fr));
                    }
                }
                Ok(best.unwrap().1)
            }
        }
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    pub fn n_u32(&self) -> u32 {
        self.n.to_u32().expect("N(a) fits in u32")
    }

    /// `Γ_{a,b}(w, x; 𝔞⁻¹L) / Γ_{a,b}(w, x; L)^{N(𝔞)}`.
    pub fn smoothed_at(&self, frames: &SmoothedFrames, w: &BigComplex, budget: &TailBudget) -> Result<GammaValue> {
        let g_al = gamma_lattice(&frames.frame_al, w, &self.emb, budget)?;
        let g_l = gamma_lattice(&frames.frame_l, w, &self.emb, budget)?;
        Ok(g_al.div(&g_l.powi(self.n_u32() as i64)))
    }

    pub fn value(&self, frames: &SmoothedFrames, budget: &TailBudget) -> Result<GammaValue> {
        self.smoothed_at(frames, &frames.w, budget)
    }
}

/// `𝚪_{𝔞,h}(L)` for `L = 𝔣𝔟⁻¹` at the given admissible point.
#[allow(clippy::too_many_arguments)]
pub fn gamma_smoothed_value(
    field: &CubicField,
    f: &IdealLattice,
    b: &IdealLattice,
    a_ideal: &IdealLattice,
    eps: &UnitData,
    h: &AdmissiblePoint,
    emb: &EmbeddingData,
    budget: &TailBudget,
) -> Result<GammaValue> {
    let ctx = SmoothedContext::new(field, f, b, a_ideal, eps, emb, false)?;
    if !crate::ideallat::is_admissible(field, &ctx.l, a_ideal, h)? {
        return Err(Error::Config("h is not admissible for L".into()));
    }
    let frames = ctx.frames(h)?;
    ctx.value(&frames, budget)
}

/// Rational number as a complex value at `digits`.
pub fn rational_c(r: &Rational, digits: u32) -> BigComplex {
    BigComplex::from_rational(r, digits)
}

/// Complex embedding of a field element at `digits`.
pub fn embed_c(emb: &EmbeddingData, e: &FieldElement, digits: u32) -> BigComplex {
    emb.embed_complex(e).with_digits(digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, 60)
    }

    fn budget() -> TailBudget {
        TailBudget::new(30, 20, 100_000).unwrap()
    }

    fn close(a: &BigComplex, b: &BigComplex, digits: i64) -> bool {
        let bits = a.prec_bits().max(b.prec_bits());
        a.dist(b) < ten_pow_neg(digits, bits) * Float::with_val(bits, 1 + b.abs())
    }

    #[test]
    fn theta_quasi_periodicity() {
        let b = budget();
        let z = c(0.3, 0.1);
        let tau = c(0.2, 0.5);
        let t0 = theta0(&z, &tau, &b).unwrap();
        let t1 = theta0(&(&z + &c(1.0, 0.0)), &tau, &b).unwrap();
        assert!(close(&t0.value, &t1.value, 28));
        let lhs = theta0(&(&z + &tau), &tau, &b).unwrap().value;
        let rhs = -(&exp2pii(&-&z) * &t0.value);
        assert!(close(&lhs, &rhs, 28));
        let half = theta0(&c(0.5, 0.0), &c(0.0, 1.0), &b).unwrap().value;
        assert!(half.re > 0 && half.im.clone().abs() < ten_pow_neg(40, 200));
    }

    #[test]
    fn gamma_functional_equations() {
        let b = budget();
        let z = c(0.21, 0.07);
        let tau = c(0.1, 0.6);
        let sigma = c(-0.2, 0.4);
        let g = gamma_basic(&z, &tau, &sigma, &b).unwrap().value;
        let g1 = gamma_basic(&(&z + &c(1.0, 0.0)), &tau, &sigma, &b).unwrap().value;
        assert!(close(&g, &g1, 28));
        let gt = gamma_basic(&(&z + &tau), &tau, &sigma, &b).unwrap().value;
        let th = theta0(&z, &sigma, &b).unwrap().value;
        assert!(close(&gt, &(&th * &g), 28));
        let gs = gamma_basic(&(&z + &sigma), &tau, &sigma, &b).unwrap().value;
        let tht = theta0(&z, &tau, &b).unwrap().value;
        assert!(close(&gs, &(&tht * &g), 28));
        let refl = gamma_basic(&(&(&tau + &sigma) - &z), &tau, &sigma, &b).unwrap().value;
        assert!(close(&(&g * &refl), &BigComplex::one(60), 28));
    }

    #[test]
    fn extension_rules() {
        let b = budget();
        let z = c(0.3, -0.05);
        let tau = c(0.15, -0.4);
        let sigma = c(0.05, 0.7);
        let g = gamma_extended(&z, &tau, &sigma, &b).unwrap().value;
        let other = gamma_extended(&(&z - &tau), &-&tau, &sigma, &b).unwrap().value;
        assert!(close(&(&g * &other), &BigComplex::one(60), 28));
        // conjugation: Γ(−z̄, −τ̄, −σ̄) = conj Γ(z, τ, σ)
        let gc = gamma_extended(&-&z.conj(), &-&tau.conj(), &-&sigma.conj(), &b).unwrap().value;
        assert!(close(&gc, &g.conj(), 28));
        assert!(gamma_extended(&z, &c(0.3, 0.0), &sigma, &b).is_err());
    }

    #[test]
    fn near_pole_detected() {
        let b = budget();
        let tau = c(0.1, 0.6);
        let sigma = c(-0.2, 0.4);
        let e = gamma_basic(&BigComplex::zero(60), &tau, &sigma, &b).unwrap_err();
        assert!(matches!(e, Error::NearPole(_)));
    }

    #[test]
    fn log_value_matches_value() {
        let b = budget();
        let g = gamma_basic(&c(0.31, 0.02), &c(0.1, 0.3), &c(0.4, 0.2), &b).unwrap();
        assert!(close(&g.log_value.exp(), &g.value, 40));
        assert!(!g.saturated);
        assert!(g.tail_bound < 1e-49);
    }

    #[test]
    fn saturation_is_reported() {
        let b = TailBudget::new(30, 20, 50).unwrap();
        let g = gamma_basic(&c(0.31, 0.02), &c(0.1, 0.01), &c(0.4, 0.2), &b).unwrap();
        assert!(g.saturated);
        assert!(g.tail_bound > 1e-49);
    }

    #[test]
    fn smoothed_theta_trivial_and_product_identity() {
        let b = budget();
        let z = c(0.17, 0.03);
        let t = c(0.05, 0.8);
        let one = theta0_smoothed(&z, &t, 1, &b).unwrap().value;
        assert_eq!(one, BigComplex::one(b.working_digits()));
        // θ₀(Nz, Nt) = ∏_j θ₀(z + j/N, t)
        let n = 5u32;
        let nn = c(n as f64, 0.0);
        let lhs = theta0(&(&nn * &z), &(&nn * &t), &b).unwrap().value;
        let mut rhs = BigComplex::one(60);
        for j in 0..n {
            let shift = BigComplex::from_rational(&Rational::from((j, n)), 60);
            rhs = &rhs * &theta0(&(&z + &shift), &t, &b).unwrap().value;
        }
        assert!(close(&lhs, &rhs, 27));
    }
}
