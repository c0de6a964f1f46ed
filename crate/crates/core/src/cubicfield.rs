//! Exact arithmetic in a complex cubic field `K = Q(β)` and its two
//! archimedean embeddings.

use std::fmt;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideallat::IdealLattice;
use crate::linalg::{qdet3, qinv3, qmatvec, QMat3, QVec3};
use crate::numeric::{digits_to_bits, ten_pow_neg, BigComplex};

/// Element of `K` in power-basis coordinates `c0 + c1 β + c2 β²`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub coords: QVec3,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.coords[0], self.coords[1], self.coords[2])
    }
}

impl FieldElement {
    pub fn new(coords: QVec3) -> Self {
        FieldElement { coords }
    }

    pub fn from_ints(c0: i64, c1: i64, c2: i64) -> Self {
        FieldElement { coords: [Rational::from(c0), Rational::from(c1), Rational::from(c2)] }
    }

    pub fn from_rational(r: Rational) -> Self {
        FieldElement { coords: [r, Rational::new(), Rational::new()] }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0)
    }

    pub fn add(&self, o: &FieldElement) -> FieldElement {
        FieldElement { coords: std::array::from_fn(|i| Rational::from(&self.coords[i] + &o.coords[i])) }
    }

    pub fn sub(&self, o: &FieldElement) -> FieldElement {
        FieldElement { coords: std::array::from_fn(|i| Rational::from(&self.coords[i] - &o.coords[i])) }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { coords: std::array::from_fn(|i| Rational::from(-&self.coords[i])) }
    }

    pub fn scale(&self, s: &Rational) -> FieldElement {
        FieldElement { coords: std::array::from_fn(|i| Rational::from(&self.coords[i] * s)) }
    }

    /// Rational number if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coords[1] == 0 && self.coords[2] == 0 {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    pub fn is_integral_coords(&self) -> bool {
        self.coords.iter().all(|c| *c.denom() == 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootChoice {
    PositiveImaginary,
    NegativeImaginary,
}

/// `K = Q[x]/(x³ + c2 x² + c1 x + c0)` with a chosen complex embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicField {
    /// `[c2, c1, c0]`
    pub min_poly: [Integer; 3],
    pub complex_root_choice: RootChoice,
    pub integral_basis: [FieldElement; 3],
    /// Discriminant of the order spanned by `integral_basis`.
    pub disc: Integer,
}

impl CubicField {
    pub fn new(c2: i64, c1: i64, c0: i64, choice: RootChoice) -> Result<Self> {
        Self::with_basis(
            [Integer::from(c2), Integer::from(c1), Integer::from(c0)],
            choice,
            [FieldElement::from_ints(1, 0, 0), FieldElement::from_ints(0, 1, 0), FieldElement::from_ints(0, 0, 1)],
        )
    }

    pub fn with_basis(min_poly: [Integer; 3], choice: RootChoice, basis: [FieldElement; 3]) -> Result<Self> {
        let poly_disc = poly_discriminant(&min_poly);
        if poly_disc >= 0 {
            return Err(Error::Config(format!("minimal polynomial must have negative discriminant (one real root), got {poly_disc}")));
        }
        if has_rational_root(&min_poly) {
            return Err(Error::Config("minimal polynomial is reducible over Q".into()));
        }
        let mut field = CubicField { min_poly, complex_root_choice: choice, integral_basis: basis, disc: Integer::new() };
        let m: QMat3 = std::array::from_fn(|i| std::array::from_fn(|j| field.integral_basis[j].coords[i].clone()));
        let det = qdet3(&m);
        if det == 0 {
            return Err(Error::Config("integral basis has rank below three".into()));
        }
        // basis must span a ring containing 1
        let order_coords = |e: &FieldElement| qmatvec(&qinv3(&m), &e.coords);
        let in_order = |e: &FieldElement| order_coords(e).iter().all(|c| *c.denom() == 1);
        if !in_order(&FieldElement::one()) {
            return Err(Error::Config("integral basis does not contain 1".into()));
        }
        for i in 0..3 {
            for j in i..3 {
                let p = field.mul(&field.integral_basis[i], &field.integral_basis[j]);
                if !in_order(&p) {
                    return Err(Error::Config("integral basis is not closed under multiplication".into()));
                }
            }
        }
        let d = Rational::from(&det * &det) * Rational::from(poly_disc);
        field.disc = d.numer().clone();
        if *d.denom() != 1 {
            return Err(Error::Config("order discriminant is not an integer".into()));
        }
        Ok(field)
    }

    pub fn beta(&self) -> FieldElement {
        FieldElement::from_ints(0, 1, 0)
    }

    /// `e * β^k` reduction rule: β³ = -(c2 β² + c1 β + c0).
    fn times_beta(&self, e: &QVec3) -> QVec3 {
        let top = &e[2];
        [
            (-Rational::from(top * &self.min_poly[2])),
            (&e[0] - Rational::from(top * &self.min_poly[1])),
            (&e[1] - Rational::from(top * &self.min_poly[0])),
        ]
    }

    /// Matrix of multiplication by `e` on the power basis (columns are
    /// `e·β^j`).
    pub fn mul_matrix(&self, e: &FieldElement) -> QMat3 {
        let c0 = e.coords.clone();
        let c1 = self.times_beta(&c0);
        let c2 = self.times_beta(&c1);
        let cols = [c0, c1, c2];
        std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { coords: qmatvec(&self.mul_matrix(a), &b.coords) }
    }

    pub fn norm(&self, e: &FieldElement) -> Rational {
        qdet3(&self.mul_matrix(e))
    }

    pub fn trace(&self, e: &FieldElement) -> Rational {
        let m = self.mul_matrix(e);
        Rational::from(&m[0][0] + &m[1][1]) + &m[2][2]
    }

    pub fn inv(&self, e: &FieldElement) -> Result<FieldElement> {
        if e.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let m = self.mul_matrix(e);
        let one = FieldElement::one();
        Ok(FieldElement { coords: qmatvec(&qinv3(&m), &one.coords) })
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, e: &FieldElement, n: i64) -> Result<FieldElement> {
        let mut base = if n < 0 { self.inv(e)? } else { e.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = FieldElement::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Order-basis coordinates of `e`.
    pub fn order_coords(&self, e: &FieldElement) -> QVec3 {
        let m: QMat3 = std::array::from_fn(|i| std::array::from_fn(|j| self.integral_basis[j].coords[i].clone()));
        qmatvec(&qinv3(&m), &e.coords)
    }

    pub fn poly_f64(&self) -> [f64; 3] {
        [self.min_poly[0].to_f64(), self.min_poly[1].to_f64(), self.min_poly[2].to_f64()]
    }

    /// High-precision embeddings at `prec_digits` (plus internal guard).
    pub fn embedding(&self, prec_digits: u32) -> Result<EmbeddingData> {
        EmbeddingData::new(self, prec_digits)
    }
}

fn poly_discriminant(p: &[Integer; 3]) -> Integer {
    // x³ + a x² + b x + c
    let (a, b, c) = (&p[0], &p[1], &p[2]);
    let a2 = Integer::from(a * a);
    let b2 = Integer::from(b * b);
    let t1 = Integer::from(&a2 * &b2);
    let t2 = Integer::from(&b2 * b) * 4;
    let t3 = Integer::from(&a2 * a) * c * 4;
    let t4 = Integer::from(c * c) * 27;
    let t5 = Integer::from(a * b) * c * 18;
    t1 - t2 - t3 - t4 + t5
}

fn has_rational_root(p: &[Integer; 3]) -> bool {
    // monic: rational roots are integer divisors of c0
    let c0 = p[2].clone().abs();
    let eval = |x: &Integer| {
        let mut v = Integer::from(1);
        for c in p {
            v = v * x + c;
        }
        v
    };
    if c0 == 0 {
        return true;
    }
    // bounded search: any root r divides c0
    let lim = c0.to_u64().unwrap_or(u64::MAX);
    if lim > 10_000_000 {
        // fall back to candidate divisors via trial division up to sqrt
        let mut d = Integer::from(1);
        while Integer::from(&d * &d) <= c0 {
            if c0.is_divisible(&d) {
                let e = Integer::from(&c0 / &d);
                for r in [d.clone(), -d.clone(), e.clone(), -e] {
                    if eval(&r) == 0 {
                        return true;
                    }
                }
            }
            d += 1;
        }
        return false;
    }
    for d in 1..=lim {
        if lim.is_multiple_of(d) {
            for r in [Integer::from(d), -Integer::from(d)] {
                if eval(&r) == 0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Real and chosen complex embedding of `β`, with cached powers.
#[derive(Clone, Debug)]
pub struct EmbeddingData {
    pub sigma_r: Float,
    pub sigma_c: BigComplex,
    pub prec_digits: u32,
    powers_r: [Float; 3],
    powers_c: [BigComplex; 3],
}

const EMBED_GUARD: u32 = 10;

impl EmbeddingData {
    pub fn new(field: &CubicField, prec_digits: u32) -> Result<Self> {
        let prec_digits = prec_digits.max(BigComplex::MIN_DIGITS);
        let work = prec_digits + EMBED_GUARD;
        let bits = digits_to_bits(work);
        let [c2, c1, c0] = field.poly_f64();
        let seeds = cubic_roots_f64(c2, c1, c0);
        // deterministic seed order: by sign of Im, then Re
        let real_seed = seeds.iter().min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap()).unwrap().0;
        let cplx_seed = seeds
            .iter()
            .filter(|s| match field.complex_root_choice {
                RootChoice::PositiveImaginary => s.1 > 0.0,
                RootChoice::NegativeImaginary => s.1 < 0.0,
            })
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .copied()
            .ok_or_else(|| Error::Numerical("no complex root found".into()))?;

        let coeffs: [Float; 3] = std::array::from_fn(|i| Float::with_val(bits, &field.min_poly[i]));
        let eps = ten_pow_neg(work as i64, bits);

        // real Newton with precision doubling
        let mut x = Float::with_val(53, real_seed);
        let mut p = 53u32;
        loop {
            p = (p * 2).min(bits);
            x.set_prec(p);
            for _ in 0..2 {
                let (f, df) = eval_real(&coeffs, &x, p);
                x -= Float::with_val(p, &f / &df);
            }
            if p == bits {
                let (f, _) = eval_real(&coeffs, &x, p);
                if f.clone().abs() < eps {
                    break;
                }
                let (f, df) = eval_real(&coeffs, &x, p);
                x -= Float::with_val(p, &f / &df);
                let (f, _) = eval_real(&coeffs, &x, p);
                if f.abs() >= eps {
                    return Err(Error::Numerical("real root refinement did not converge".into()));
                }
                break;
            }
        }

        let cdig = |d: u32| d.max(BigComplex::MIN_DIGITS);
        let mut z = BigComplex::from_f64(cplx_seed.0, cplx_seed.1, cdig(16));
        let mut d = 16u32;
        loop {
            d = (d * 2).min(work);
            z = z.with_digits(cdig(d));
            for _ in 0..2 {
                let (f, df) = eval_complex(&field.min_poly, &z);
                z = &z - &(&f / &df);
            }
            if d == work {
                let (f, df) = eval_complex(&field.min_poly, &z);
                z = &z - &(&f / &df);
                let (f, _) = eval_complex(&field.min_poly, &z);
                if f.abs() >= eps {
                    return Err(Error::Numerical("complex root refinement did not converge".into()));
                }
                break;
            }
        }
        if z.im == 0 {
            return Err(Error::Numerical("complex embedding has zero imaginary part".into()));
        }
        let one_r = Float::with_val(bits, 1);
        let powers_r = [one_r.clone(), x.clone(), Float::with_val(bits, &x * &x)];
        let one_c = BigComplex::one(work);
        let z2 = z.sqr();
        let powers_c = [one_c, z.clone(), z2];
        let _ = coeffs;
        Ok(EmbeddingData { sigma_r: x, sigma_c: z, prec_digits, powers_r, powers_c })
    }

    pub fn work_digits(&self) -> u32 {
        self.prec_digits + EMBED_GUARD
    }

    pub fn work_bits(&self) -> u32 {
        digits_to_bits(self.work_digits())
    }

    pub fn embed_real(&self, e: &FieldElement) -> Float {
        let bits = self.work_bits();
        let mut s = Float::new(bits);
        for i in 0..3 {
            if e.coords[i] != 0 {
                s += Float::with_val(bits, &self.powers_r[i] * &e.coords[i]);
            }
        }
        s
    }

    pub fn embed_complex(&self, e: &FieldElement) -> BigComplex {
        let bits = self.work_bits();
        let mut re = Float::new(bits);
        let mut im = Float::new(bits);
        for i in 0..3 {
            if e.coords[i] != 0 {
                re += Float::with_val(bits, &self.powers_c[i].re * &e.coords[i]);
                im += Float::with_val(bits, &self.powers_c[i].im * &e.coords[i]);
            }
        }
        BigComplex::new(re, im, self.work_digits())
    }
}

/// `(σ_R(e), σ_C(e))`.
pub fn embed(e: &FieldElement, emb: &EmbeddingData) -> (Float, BigComplex) {
    (emb.embed_real(e), emb.embed_complex(e))
}

/// Determinant of the rows `(σ_R(v), Re σ_C(v), Im σ_C(v))`.
pub fn orientation_det(v1: &FieldElement, v2: &FieldElement, v3: &FieldElement, emb: &EmbeddingData) -> Float {
    let bits = emb.work_bits();
    let rows: Vec<[Float; 3]> = [v1, v2, v3]
        .iter()
        .map(|v| {
            let (r, c) = embed(v, emb);
            [r, c.re, c.im]
        })
        .collect();
    let t = |i: usize, j: usize, k: usize, l: usize| Float::with_val(bits, &rows[i][j] * &rows[k][l]);
    let c0 = Float::with_val(bits, t(1, 1, 2, 2) - t(1, 2, 2, 1));
    let c1 = Float::with_val(bits, t(1, 0, 2, 2) - t(1, 2, 2, 0));
    let c2 = Float::with_val(bits, t(1, 0, 2, 1) - t(1, 1, 2, 0));
    Float::with_val(bits, &rows[0][0] * &c0) - Float::with_val(bits, &rows[0][1] * &c1) + Float::with_val(bits, &rows[0][2] * &c2)
}

fn eval_real(c: &[Float; 3], x: &Float, p: u32) -> (Float, Float) {
    let mut f = Float::with_val(p, 1);
    let mut df = Float::with_val(p, 0);
    for ci in c {
        df = Float::with_val(p, &df * x) + &f;
        f = Float::with_val(p, &f * x) + ci;
    }
    (f, df)
}

fn eval_complex(c: &[Integer; 3], z: &BigComplex) -> (BigComplex, BigComplex) {
    let d = z.prec_digits();
    let mut f = BigComplex::one(d);
    let mut df = BigComplex::zero(d);
    for ci in c {
        df = &(&df * z) + &f;
        f = &(&f * z) + &BigComplex::from_rational(&Rational::from(ci), d);
    }
    (f, df)
}

/// Roots of `x³ + a x² + b x + c` in double precision (Durand–Kerner).
fn cubic_roots_f64(a: f64, b: f64, c: f64) -> [(f64, f64); 3] {
    type C = (f64, f64);
    let mul = |x: C, y: C| (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0);
    let sub = |x: C, y: C| (x.0 - y.0, x.1 - y.1);
    let div = |x: C, y: C| {
        let d = y.0 * y.0 + y.1 * y.1;
        ((x.0 * y.0 + x.1 * y.1) / d, (x.1 * y.0 - x.0 * y.1) / d)
    };
    let f = |z: C| {
        let mut v = (1.0, 0.0);
        for k in [a, b, c] {
            v = mul(v, z);
            v.0 += k;
        }
        v
    };
    let scale = 1.0 + a.abs().max(b.abs()).max(c.abs());
    let seed = (0.4 * scale, 0.9 * scale);
    let mut r = [(1.0, 0.0), seed, mul(seed, seed)];
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut den = (1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den = mul(den, sub(r[i], r[j]));
                }
            }
            let step = div(f(r[i]), den);
            r[i] = sub(r[i], step);
            delta = delta.max(step.0.abs() + step.1.abs());
        }
        if delta < 1e-15 * scale {
            break;
        }
    }
    r
}

/// Validated generator of the totally positive units congruent to 1 mod 𝔣.
#[derive(Clone, Debug)]
pub struct UnitData {
    pub epsilon: FieldElement,
    pub epsilon_r: Float,
    pub epsilon_c: BigComplex,
}

pub fn validate_unit(field: &CubicField, u: &FieldElement, f_lattice: &IdealLattice, emb: &EmbeddingData) -> Result<UnitData> {
    let n = field.norm(u);
    if n != 1 && n != -1 {
        return Err(Error::Config(format!("not a unit (norm {n})")));
    }
    let integral = field.order_coords(u).iter().all(|c| *c.denom() == 1);
    if !integral {
        return Err(Error::Config("not a unit (not integral)".into()));
    }
    if !f_lattice.member(&u.sub(&FieldElement::one())) {
        return Err(Error::Config("not congruent to 1 mod f".into()));
    }
    let ur = emb.embed_real(u);
    if ur < 0 {
        return Err(Error::Config("not totally positive at real place".into()));
    }
    if ur == 1 || *u == FieldElement::one() {
        return Err(Error::Config("degenerate unit".into()));
    }
    if n != 1 {
        return Err(Error::Config("unit of norm -1 with positive real embedding is impossible".into()));
    }
    let eps = if ur > 1 { field.inv(u)? } else { u.clone() };
    let (er, ec) = embed(&eps, emb);
    let bits = emb.work_bits();
    let check = Float::with_val(bits, &er * &ec.norm_sq()) - 1u32;
    if check.abs() > ten_pow_neg(emb.prec_digits as i64, bits) {
        return Err(Error::Numerical("unit norm identity fails numerically".into()));
    }
    Ok(UnitData { epsilon: eps, epsilon_r: er, epsilon_c: ec })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(x: &Float, v: f64, tol: f64) -> bool {
        (x.to_f64() - v).abs() < tol
    }

    #[test]
    fn embeddings_of_cube_root_seven() {
        let k = CubicField::new(0, 0, -7, RootChoice::NegativeImaginary).unwrap();
        let emb = k.embedding(50).unwrap();
        let (r, c) = embed(&k.beta(), &emb);
        assert!(approx(&r, 1.91293118, 1e-8));
        assert!(approx(&c.re, -0.95646559, 1e-8));
        assert!(approx(&c.im, -1.65664700, 1e-8));
        let (r1, c1) = embed(&FieldElement::one(), &emb);
        assert_eq!(r1, 1);
        assert_eq!(c1.re, 1);
        assert_eq!(c1.im, 0);
    }

    #[test]
    fn dasgupta_real_root() {
        let k = CubicField::new(-1, 5, 1, RootChoice::PositiveImaginary).unwrap();
        let emb = k.embedding(40).unwrap();
        let (r, _) = embed(&FieldElement::from_ints(2, -1, 0), &emb);
        assert!(approx(&r, 2.19128244006, 1e-10));
        let d = orientation_det(&FieldElement::one(), &k.beta(), &FieldElement::from_ints(0, 0, 1), &emb);
        assert!(d > 0);
    }

    #[test]
    fn norms() {
        let k = CubicField::new(0, 0, -7, RootChoice::NegativeImaginary).unwrap();
        assert_eq!(k.norm(&FieldElement::one()), 1);
        assert_eq!(k.norm(&FieldElement::from_ints(2, -1, 0)), 1);
        let k3 = CubicField::new(0, 0, -3, RootChoice::PositiveImaginary).unwrap();
        assert_eq!(k3.norm(&FieldElement::from_ints(-2, 0, 1)), 1);
    }

    #[test]
    fn orientation_antisymmetry() {
        let k = CubicField::new(-1, 5, 1, RootChoice::PositiveImaginary).unwrap();
        let emb = k.embedding(40).unwrap();
        let a = FieldElement::from_ints(1, 2, 0);
        let b = FieldElement::from_ints(0, 1, 3);
        let c = a.add(&b);
        let d0 = orientation_det(&a, &b, &c, &emb);
        assert!(d0.abs() < ten_pow_neg(40, 200));
        let e = FieldElement::from_ints(0, 0, 1);
        let d1 = orientation_det(&a, &b, &e, &emb);
        let d2 = orientation_det(&b, &a, &e, &emb);
        assert!(Float::with_val(200, &d1 + &d2).abs() < ten_pow_neg(40, 200));
    }

    #[test]
    fn rejects_bad_polys() {
        assert!(CubicField::new(0, 0, -8, RootChoice::PositiveImaginary).is_err());
        assert!(CubicField::new(0, -7, 6, RootChoice::PositiveImaginary).is_err());
    }

    #[test]
    fn unit_validation() {
        let k = CubicField::new(0, 0, -7, RootChoice::NegativeImaginary).unwrap();
        let emb = k.embedding(40).unwrap();
        let f = IdealLattice::from_generators(&k, &[FieldElement::from_ints(3, 0, 0), FieldElement::from_ints(-1, 1, 0)]).unwrap();
        let u = validate_unit(&k, &FieldElement::from_ints(2, -1, 0), &f, &emb).unwrap();
        assert!(approx(&u.epsilon_r, 0.08706881, 1e-8));
        assert!(validate_unit(&k, &FieldElement::one(), &f, &emb).is_err());

        let k2 = CubicField::new(0, 0, -2, RootChoice::PositiveImaginary).unwrap();
        let emb2 = k2.embedding(40).unwrap();
        let f2 = IdealLattice::from_generators(&k2, &[FieldElement::from_ints(3, 0, 0)]).unwrap();
        let bm1 = FieldElement::from_ints(-1, 1, 0);
        let e = validate_unit(&k2, &bm1, &f2, &emb2).unwrap_err();
        assert!(e.to_string().contains("not congruent"));
        let cube = k2.pow(&bm1, 3).unwrap();
        assert!(validate_unit(&k2, &cube, &f2, &emb2).is_ok());
    }

    fn elem() -> impl Strategy<Value = FieldElement> {
        (-20i64..20, -20i64..20, -20i64..20, 1i64..6)
            .prop_map(|(a, b, c, d)| FieldElement::new([Rational::from((a, d)), Rational::from((b, d)), Rational::from(c)]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn norm_is_multiplicative(a in elem(), b in elem()) {
            let k = CubicField::new(-1, 5, 1, RootChoice::PositiveImaginary).unwrap();
            let lhs = k.norm(&k.mul(&a, &b));
            let rhs = k.norm(&a) * k.norm(&b);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn embedding_is_ring_hom(a in elem(), b in elem()) {
            let k = CubicField::new(0, 0, -7, RootChoice::NegativeImaginary).unwrap();
            let emb = k.embedding(40).unwrap();
            let (ra, ca) = embed(&a, &emb);
            let (rb, cb) = embed(&b, &emb);
            let (rab, cab) = embed(&k.mul(&a, &b), &emb);
            let tol = ten_pow_neg(35, 200) * Float::with_val(200, 1 + ca.abs() * cb.abs());
            prop_assert!(Float::with_val(200, &rab - Float::with_val(200, &ra * &rb)).abs() < tol);
            prop_assert!((&cab - &(&ca * &cb)).abs() < tol);
        }

        #[test]
        fn norm_matches_embeddings(a in elem()) {
            let k = CubicField::new(0, 0, -3, RootChoice::PositiveImaginary).unwrap();
            let emb = k.embedding(40).unwrap();
            prop_assume!(!a.is_zero());
            let (r, c) = embed(&a, &emb);
            let n = Float::with_val(200, &r * &c.norm_sq());
            let exact = Float::with_val(200, &k.norm(&a));
            let tol = ten_pow_neg(35, 200) * Float::with_val(200, 1 + exact.clone().abs());
            prop_assert!(Float::with_val(200, &n - &exact).abs() < tol);
        }

        #[test]
        fn inverse_roundtrip(a in elem()) {
            let k = CubicField::new(0, -1, 1, RootChoice::PositiveImaginary).unwrap();
            prop_assume!(!a.is_zero());
            let inv = k.inv(&a).unwrap();
            prop_assert_eq!(k.mul(&a, &inv), FieldElement::one());
        }
    }
}
