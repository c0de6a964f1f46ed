//! The zeta side of the limit formula: ζ′_{𝔣,𝔞}(𝔟,0) from log|𝚪|², from the
//! truncated I₊₋ + I₋₊ cone series, and the θ₀^{(N)} boundary ratio.

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::conegeom::GammaFrame;
use crate::cubicfield::EmbeddingData;
use crate::ellgamma::{theta0_smoothed, SmoothedContext, SmoothedFrames};
use crate::error::{Error, Result};
use crate::ideallat::AdmissiblePoint;
use crate::linalg::{hnf_rows2, idot, TwoFormSolver};
use crate::numeric::{digits_to_bits, exp2pii, log_abs_sq, ten_pow_neg, BigComplex, TailBudget};

/// Above this many cone points the enumeration is refused.
pub const MAX_CONE_POINTS: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaMethod {
    ViaGamma,
    ViaConeSeries,
}

#[derive(Clone, Debug)]
pub struct ZetaResult {
    pub value: Float,
    pub method: ZetaMethod,
    pub k_max: u64,
    pub cone_radius: u64,
    pub est_error: Float,
}

/// `log|𝚪_{𝔞,h}(L)|²` at the frames' admissible point.
pub fn zeta_deriv_via_gamma(ctx: &SmoothedContext, frames: &SmoothedFrames, budget: &TailBudget) -> Result<ZetaResult> {
    let g = ctx.value(frames, budget)?;
    let value = log_abs_sq(&g.value)?;
    let est_error = Float::with_val(64, &g.tail_bound * 2u32);
    Ok(ZetaResult { value, method: ZetaMethod::ViaGamma, k_max: 0, cone_radius: 0, est_error })
}

/// `z₀ = h/γ`, rational because `h ∈ ℚγ`.
pub fn base_point(frame: &GammaFrame, h: &AdmissiblePoint) -> Result<Rational> {
    let hc = frame.lattice.coords_q(&h.h);
    let gc = frame.lattice.coords_q(&frame.gamma);
    let i = (0..3).find(|&i| gc[i] != 0).expect("γ ≠ 0");
    let z0 = Rational::from(&hc[i] / &gc[i]);
    for j in 0..3 {
        if Rational::from(&gc[j] * &z0) != hc[j] {
            return Err(Error::Domain("h is not a rational multiple of γ".into()));
        }
    }
    Ok(z0)
}

/// One image point `(a(w), b(w))` with its χ weight and `w(x)/γ(x)`.
struct ConePoint {
    chi: f64,
    z: BigComplex,
}

/// Per-cone sums `(C̄₊₋ part, C̄₋₊ part, error bound)` of the k-series at base point `z0`.
pub struct ConeSums {
    pub plus_minus: Float,
    pub minus_plus: Float,
    pub est_error: Float,
    pub points: usize,
}

/// Direct double summation of `(3/√π)(I₊₋(h) + I₋₊(h))`: over image points
/// `(a(w), b(w))` of the closed cones with `max(|a|,|b|) ≤ cone_radius` and
/// over `k ≤ k_max` with `N ∤ k`, each `w` contributing
/// `−χ(w)·(2N/k)·Re e(∓k(h + w)(x)/γ(x))`.
/// The `k` sum of a point stops early once its tail is below its share of `10^{-digits}`.
pub fn zeta_deriv_via_cone_series(
    frame_l: &GammaFrame,
    frame_al: &GammaFrame,
    h: &AdmissiblePoint,
    emb: &EmbeddingData,
    k_max: u64,
    cone_radius: u64,
    digits: u32,
) -> Result<ZetaResult> {
    if frame_l.forms.a != frame_al.forms.a || frame_l.forms.b != frame_al.forms.b {
        return Err(Error::Domain("frames do not share forms".into()));
    }
    let index = frame_l.lattice.lattice.covolume() / frame_al.lattice.lattice.covolume();
    if *index.denom() != 1 || *index.numer() < 1 {
        return Err(Error::Domain("a⁻¹L does not contain L".into()));
    }
    let n = index.numer().to_u64().ok_or_else(|| Error::Domain("index too large".into()))?;
    let z0 = base_point(frame_l, h)?;
    let s = cone_sums(frame_l, n, &z0, emb, k_max, cone_radius, digits)?;
    Ok(ZetaResult {
        value: Float::with_val(s.plus_minus.prec(), &s.plus_minus + &s.minus_plus),
        method: ZetaMethod::ViaConeSeries,
        k_max,
        cone_radius,
        est_error: s.est_error,
    })
}

/// Fraction θ of the decay spent on the outside-tail geometric sums.
const TAIL_THETA: f64 = 0.2;

/// Heights of one step along α and along β: `(|Im τ|, Im σ)`.
fn wall_steps(frame: &GammaFrame) -> (f64, f64) {
    (frame.tau.im.to_f64().abs(), frame.sigma.im.to_f64())
}

/// Log of a bound on all cone points of height above `y`:
/// `2 cones · |F| · 2N/(1 − e^{−2πy}) · e^{−2π(1−θ)y} / ((1 − e^{−2πθu})(1 − e^{−2πθv}))`.
fn outside_bound(f_count: f64, n: f64, u: f64, v: f64, y: f64) -> f64 {
    let tp = 2.0 * std::f64::consts::PI;
    let den = (-(-tp * y).exp()).ln_1p() + (-(-tp * TAIL_THETA * u).exp()).ln_1p() + (-(-tp * TAIL_THETA * v).exp()).ln_1p();
    (4.0 * f_count * n).ln() - tp * (1.0 - TAIL_THETA) * y - den
}

/// Sums over the cone points `w` of `L/ℤγ` with `|Im(w(x)/γ(x))| ≤ cone_radius·min(|Im τ|, Im σ)`.
/// Points of C̄₊₋ are `f + iα − jβ` (i, j ≥ 0) over the image-lattice
/// representatives `f` with `0 ≤ a(f) < a(α)`, `−b(β) < b(f) ≤ 0`; C̄₋₊ is its negative.
pub fn cone_sums(
    frame_l: &GammaFrame,
    n: u64,
    z0: &Rational,
    emb: &EmbeddingData,
    k_max: u64,
    cone_radius: u64,
    digits: u32,
) -> Result<ConeSums> {
    let d = (digits + 10).max(BigComplex::MIN_DIGITS);
    let bits = digits_to_bits(d);

    // image lattice of (a, b) and lifts of its basis
    let a = frame_l.form_a.coords.clone();
    let b = frame_l.form_b.coords.clone();
    let rows: Vec<(Integer, Integer)> = (0..3).map(|i| (a[i].clone(), b[i].clone())).collect();
    let ((p, r), t) = hnf_rows2(&rows).ok_or_else(|| Error::Domain("forms are linearly dependent".into()))?;
    let solver = TwoFormSolver::new(&a, &b).ok_or_else(|| Error::Domain("forms are linearly dependent".into()))?;
    let lift = |x: &Integer, y: &Integer| -> Result<BigComplex> {
        let c = solver.solve(x, y).ok_or_else(|| Error::Orientation("image point not liftable".into()))?;
        debug_assert!(idot(&a, &c) == *x && idot(&b, &c) == *y);
        let e = frame_l.lattice.element(&c);
        Ok((&emb.embed_complex(&e) / &frame_l.x_gamma).with_digits(d))
    };
    let zeta1 = lift(&p, &r)?;
    let zeta2 = lift(&Integer::new(), &t)?;

    let too_large = || Error::Domain("image lattice too large".into());
    let (p64, r64, t64) = (p.to_i64().ok_or_else(too_large)?, r.to_i64().ok_or_else(too_large)?, t.to_i64().ok_or_else(too_large)?);
    let aa_step = frame_l.alpha_a.to_i64().ok_or_else(too_large)?;
    let bb_step = frame_l.beta_b.to_i64().ok_or_else(too_large)?;
    let f_count = (aa_step / p64) * (bb_step / t64);
    let (u, v) = wall_steps(frame_l);
    let y_max = cone_radius as f64 * u.min(v);
    let approx_points = f_count as f64 * (y_max / u + 1.0) * (y_max / v + 1.0);
    if approx_points > MAX_CONE_POINTS as f64 {
        return Err(Error::Domain(format!("cone enumeration overflow: about {approx_points:.0} points, lower the radius")));
    }
    let (ca, cb) = (u / aa_step as f64, v / bb_step as f64);

    let z0c = BigComplex::from_rational(z0, d);
    let mut points: Vec<ConePoint> = Vec::new();
    for m1f in 0..aa_step / p64 {
        // −b(β) < b(f) ≤ 0
        let lo = (-bb_step + 1 - m1f * r64 + t64 - 1).div_euclid(t64);
        let hi = (-m1f * r64).div_euclid(t64);
        for m2f in lo..=hi {
            let fa = m1f * p64;
            let fb = m1f * r64 + m2f * t64;
            for i in 0i64.. {
                let aa = fa + i * aa_step;
                if ca * aa as f64 + cb * (-fb) as f64 > y_max + 1e-9 {
                    break;
                }
                for j in 0i64.. {
                    let bb = fb - j * bb_step;
                    if ca * aa as f64 + cb * (-bb) as f64 > y_max + 1e-9 {
                        break;
                    }
                    let chi = (aa.signum() - bb.signum()) as f64 / 2.0;
                    if chi == 0.0 {
                        continue;
                    }
                    // (A, B) = m1 (p, r) + m2 (0, t)
                    let m1 = aa / p64;
                    let m2 = (bb - m1 * r64) / t64;
                    let m1c = BigComplex::from_f64(m1 as f64, 0.0, d);
                    let m2c = BigComplex::from_f64(m2 as f64, 0.0, d);
                    let w = &(&m1c * &zeta1) + &(&m2c * &zeta2);
                    points.push(ConePoint { chi, z: &z0c + &w });
                    points.push(ConePoint { chi: -chi, z: &z0c - &w });
                }
            }
        }
    }

    // per-point share of the 10^{-digits} budget
    let eps = Float::with_val(bits, ten_pow_neg(digits as i64, bits) / (points.len() as f64 + 1.0));
    let nf = n as f64;
    let partial: Vec<(Float, Float)> = points
        .par_iter()
        .map(|cp| {
            // C̄₊₋ (χ > 0) uses e(−kz), C̄₋₊ (χ < 0) uses e(kz); both decay
            let arg = if cp.chi > 0.0 { -&cp.z } else { cp.z.clone() };
            let q = exp2pii(&arg);
            let qa = q.abs();
            let one_minus = Float::with_val(bits, 1 - &qa);
            let mut sum = Float::with_val(bits, 0);
            let mut qk = q.clone();
            let (mut t1, mut t2) = (Float::new(bits), Float::new(bits));
            let mut qabs_k = qa.clone();
            let mut k = 1u64;
            let tail = loop {
                if k > k_max {
                    // Σ_{j≥k} (2N/j)|q|^j ≤ 2N|q|^k / (k(1 − |q|))
                    break Float::with_val(bits, &qabs_k * (2.0 * nf / k as f64)) / &one_minus;
                }
                if !k.is_multiple_of(n) {
                    sum -= Float::with_val(bits, &qk.re * (2.0 * nf)) / (k as f64);
                }
                let rest = Float::with_val(bits, &qabs_k * (2.0 * nf / (k + 1) as f64)) * &qa / &one_minus;
                if rest < eps {
                    break rest;
                }
                qk.mul_assign_ref(&q, &mut t1, &mut t2);
                qabs_k *= &qa;
                k += 1;
            };
            (Float::with_val(bits, &sum * cp.chi), tail * cp.chi.abs())
        })
        .collect();
    let mut plus_minus = Float::with_val(bits, 0);
    let mut minus_plus = Float::with_val(bits, 0);
    let mut err = Float::with_val(bits, 0);
    for (cp, (s, e)) in points.iter().zip(&partial) {
        if cp.chi > 0.0 {
            plus_minus += s;
        } else {
            minus_plus += s;
        }
        err += e;
    }
    err += outside_bound(f_count as f64, nf, u, v, y_max).exp() * 1.01;
    // rounding slack
    err += Float::with_val(bits, ten_pow_neg(d as i64 - 2, bits) * (points.len() as f64 + 1.0));
    Ok(ConeSums { plus_minus, minus_plus, est_error: Float::with_val(64, &err), points: points.len() })
}

/// Smallest radius whose outside-cone tail bound is below `10^{-digits}`.
pub fn cone_radius_for(frame: &GammaFrame, n: u64, digits: u32) -> u64 {
    let (u, v) = wall_steps(frame);
    let step = u.min(v);
    let f_count = frame.f_reps.len() as f64;
    let target = -(digits as f64) * std::f64::consts::LN_10;
    let mut r = 1u64;
    while outside_bound(f_count, n as f64, u, v, r as f64 * step) > target {
        r += 1;
    }
    r
}

/// Approximate number of cone points enumerated at `cone_radius_for(frame, n, digits)`.
pub fn cone_point_estimate(frame: &GammaFrame, n: u64, digits: u32) -> f64 {
    let (u, v) = wall_steps(frame);
    let y = cone_radius_for(frame, n, digits) as f64 * u.min(v);
    frame.f_reps.len() as f64 * (y / u + 1.0) * (y / v + 1.0)
}

/// The θ₀^{(N)} boundary ratio `θ₀^{(N)}(z₀, σ) / θ₀^{(N)}(z₀, −τ)`.
pub fn boundary_lemma_check(frame: &GammaFrame, h: &AdmissiblePoint, n: u32, budget: &TailBudget) -> Result<BigComplex> {
    let d = budget.working_digits();
    let z0 = BigComplex::from_rational(&base_point(frame, h)?, d);
    let s = frame.sigma.with_digits(d);
    let mt = -&frame.tau.with_digits(d);
    let num = theta0_smoothed(&z0, &s, n, budget)?;
    let den = theta0_smoothed(&z0, &mt, n, budget)?;
    Ok(&num.value / &den.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubicfield::{validate_unit, CubicField, FieldElement, RootChoice};
    use crate::ellgamma::LambdaSelection;
    use crate::ideallat::IdealLattice;

    fn el(a: i64, b: i64, c: i64) -> FieldElement {
        FieldElement::from_ints(a, b, c)
    }

    fn intro(bpow: usize) -> (SmoothedContext, SmoothedFrames) {
        let k = CubicField::new(0, 0, -7, RootChoice::NegativeImaginary).unwrap();
        let emb = k.embedding(80).unwrap();
        let f = IdealLattice::from_generators(&k, &[el(3, 0, 0), el(-1, 1, 0)]).unwrap();
        let b1 = IdealLattice::from_generators(&k, &[el(2, 0, 0), el(-1, 1, 0)]).unwrap();
        let mut b = IdealLattice::order(&k);
        for _ in 0..bpow {
            b = IdealLattice::product(&k, &b, &b1);
        }
        let a = IdealLattice::from_generators(&k, &[el(5, 0, 0), el(-3, 1, 0)]).unwrap();
        let eps = validate_unit(&k, &el(2, -1, 0), &f, &emb).unwrap();
        let ctx = SmoothedContext::new(&k, &f, &b, &a, &eps, &emb, false).unwrap();
        let fr = ctx.select(LambdaSelection::Cheapest(12), 30).unwrap();
        (ctx, fr)
    }

    #[test]
    fn k_max_zero_is_empty() {
        let (ctx, fr) = intro(0);
        let r = zeta_deriv_via_cone_series(&fr.frame_l, &fr.frame_al, &fr.point, &ctx.emb, 0, 3, 20).unwrap();
        assert!(r.value.is_zero());
        assert!(r.est_error > 0);
    }

    #[test]
    fn chi_antisymmetry() {
        let (ctx, fr) = intro(0);
        let z0 = base_point(&fr.frame_l, &fr.point).unwrap();
        let s = cone_sums(&fr.frame_l, 5, &z0, &ctx.emb, 40, 12, 30).unwrap();
        let t = cone_sums(&fr.frame_l, 5, &Rational::from(-&z0), &ctx.emb, 40, 12, 30).unwrap();
        let d1 = Float::with_val(100, &s.plus_minus + &t.minus_plus);
        let d2 = Float::with_val(100, &s.minus_plus + &t.plus_minus);
        assert!(d1.clone().abs() < 1e-25 && d2.clone().abs() < 1e-25, "{d1} {d2}");
        assert!(s.points == t.points);
    }

    #[test]
    fn boundary_ratio_is_one() {
        let (_, fr) = intro(0);
        let budget = TailBudget::new(40, 20, 1_000_000).unwrap();
        let r = boundary_lemma_check(&fr.frame_l, &fr.point, 5, &budget).unwrap();
        assert!(r.dist(&BigComplex::one(60)) < 1e-38, "{}", r.to_string_digits(20));
        let r = boundary_lemma_check(&fr.frame_l, &fr.point, 1, &budget).unwrap();
        assert!(r.dist(&BigComplex::one(60)) < 1e-38);
    }
}
