//! Geometric frame of a pair of dual forms: the kernel line γ, wall vectors
//! α and β, the finite set F, cone membership and the `U_a` sign test.

use rug::ops::RemRounding;
use rug::{Float, Integer, Rational};

use crate::cubicfield::{orientation_det, CubicField, EmbeddingData, FieldElement, UnitData};
use crate::error::{Error, Result};
use crate::ideallat::{AdmissiblePoint, IdealLattice};
use crate::linalg::{
    gcd3, hnf_rows2, icomb, icross, idot, ineg, primitive, primitive_q, qcross, qinv3, qtranspose, unimodular_completion, IVec3, QMat3,
    QVec3, TwoFormSolver,
};
use crate::numeric::{ten_pow_neg, BigComplex};

/// A ℚ-linear form on `K`, written in power-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functional(pub QVec3);

impl Functional {
    pub fn eval(&self, e: &FieldElement) -> Rational {
        crate::linalg::qdot(&self.0, &e.coords)
    }

    pub fn neg(&self) -> Functional {
        Functional(std::array::from_fn(|i| Rational::from(-&self.0[i])))
    }

    /// `(u·f)(v) = f(u⁻¹ v)`.
    pub fn translate(&self, field: &CubicField, u: &FieldElement) -> Result<Functional> {
        let m = field.mul_matrix(&field.inv(u)?);
        let mt = qtranspose(&m);
        Ok(Functional(crate::linalg::qmatvec(&mt, &self.0)))
    }
}

/// A lattice with a positively oriented ℤ-basis.
#[derive(Clone, Debug)]
pub struct OrientedLattice {
    pub lattice: IdealLattice,
    pub basis: [FieldElement; 3],
    bmat: QMat3,
    binv: QMat3,
}

impl OrientedLattice {
    /// The HNF basis, with the first vector negated if needed.
    pub fn new(l: &IdealLattice, emb: &EmbeddingData) -> Result<Self> {
        let mut basis = l.basis();
        let d = orientation_det(&basis[0], &basis[1], &basis[2], emb);
        if d.is_zero() {
            return Err(Error::DegenerateOrientation);
        }
        if d < 0 {
            basis[0] = basis[0].neg();
        }
        Ok(Self::from_parts(l.clone(), basis))
    }

    /// An explicit basis; must span `l` and be positively oriented.
    pub fn with_basis(l: &IdealLattice, basis: [FieldElement; 3], emb: &EmbeddingData) -> Result<Self> {
        let span = IdealLattice::from_span(&basis)?;
        if span != *l {
            return Err(Error::Domain("basis does not span the lattice".into()));
        }
        if orientation_det(&basis[0], &basis[1], &basis[2], emb) <= 0 {
            return Err(Error::Domain("basis is not positively oriented".into()));
        }
        Ok(Self::from_parts(l.clone(), basis))
    }

    fn from_parts(lattice: IdealLattice, basis: [FieldElement; 3]) -> Self {
        let bmat: QMat3 = std::array::from_fn(|i| basis[i].coords.clone());
        let binv = qinv3(&bmat);
        OrientedLattice { lattice, basis, bmat, binv }
    }

    pub fn coords_q(&self, e: &FieldElement) -> QVec3 {
        std::array::from_fn(|i| {
            let mut s = Rational::new();
            for k in 0..3 {
                s += Rational::from(&e.coords[k] * &self.binv[k][i]);
            }
            s
        })
    }

    pub fn coords(&self, e: &FieldElement) -> Option<IVec3> {
        crate::linalg::q_to_i(&self.coords_q(e))
    }

    pub fn element(&self, c: &IVec3) -> FieldElement {
        FieldElement::new(std::array::from_fn(|i| {
            let mut s = Rational::new();
            for j in 0..3 {
                s += Rational::from(&self.bmat[j][i] * &c[j]);
            }
            s
        }))
    }

    /// Coordinates of a functional in the dual basis (integral iff it maps
    /// the lattice into ℤ).
    pub fn form_coords(&self, f: &Functional) -> Option<IVec3> {
        let v: QVec3 = std::array::from_fn(|j| f.eval(&self.basis[j]));
        crate::linalg::q_to_i(&v)
    }

    pub fn functional(&self, a: &IVec3) -> Functional {
        Functional(std::array::from_fn(|i| {
            let mut s = Rational::new();
            for j in 0..3 {
                s += Rational::from(&self.binv[i][j] * &a[j]);
            }
            s
        }))
    }
}

/// An element of the dual lattice Λ in dual-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualForm {
    pub coords: IVec3,
    pub primitive: bool,
}

impl DualForm {
    pub fn new(coords: IVec3) -> Self {
        let primitive = gcd3(&coords) == 1;
        DualForm { coords, primitive }
    }
}

/// `form(v)`; an integer whenever `v` lies in the lattice.
pub fn pair(form: &DualForm, v: &FieldElement, l: &OrientedLattice) -> Rational {
    let c = l.coords_q(v);
    let mut s = Rational::new();
    for i in 0..3 {
        s += Rational::from(&c[i] * &form.coords[i]);
    }
    s
}

/// Positively oriented ℤ-basis `(λ, μ)` of `ker(a) ∩ L` in lattice coordinates.
pub fn oriented_kernel_basis(a: &IVec3) -> (IVec3, IVec3) {
    let (_, u) = unimodular_completion(a);
    let (l, m) = (u[1].clone(), u[2].clone());
    // det(λ, μ, δ) = (λ × μ)·δ must be positive when a(δ) > 0
    if idot(&icross(&l, &m), a) < 0 {
        (m, l)
    } else {
        (l, m)
    }
}

/// Sign of `Im(λ(x)·conj(μ(x)))` for an oriented basis of `H(form)`.
pub fn u_a_test(form: &DualForm, emb: &EmbeddingData, l: &OrientedLattice) -> Result<bool> {
    if !form.primitive {
        return Err(Error::Domain("form must be primitive".into()));
    }
    let (lam, mu) = oriented_kernel_basis(&form.coords);
    let xl = emb.embed_complex(&l.element(&lam));
    let xm = emb.embed_complex(&l.element(&mu));
    let im = (&xl * &xm.conj()).im;
    let bits = im.prec();
    let tol = ten_pow_neg(emb.prec_digits as i64 - 10, bits) * Float::with_val(bits, Float::with_val(bits, xl.abs() * xm.abs()) + 1u32);
    if Float::with_val(bits, im.abs_ref()) < tol {
        return Err(Error::DegenerateOrientation);
    }
    Ok(im > 0)
}

/// The pair of forms `(a, b = εa)` attached to an admissible point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormPair {
    pub a: Functional,
    pub b: Functional,
}

/// The unique primitive `a` vanishing on `λ` and `ε⁻¹λ` with `x ∈ U_a`,
/// together with `b = εa`. Returned as functionals so that the same pair can
/// frame both `L` and `𝔞⁻¹L`.
pub fn solve_lemma22(
    field: &CubicField,
    lambda: &AdmissiblePoint,
    eps: &UnitData,
    l: &OrientedLattice,
    emb: &EmbeddingData,
) -> Result<FormPair> {
    let einv = field.inv(&eps.epsilon)?;
    let l1 = l.coords_q(&lambda.lambda);
    let l2 = l.coords_q(&field.mul(&einv, &lambda.lambda));
    let c = qcross(&l1, &l2);
    if c.iter().all(|x| *x == 0) {
        return Err(Error::Config("ε has a rational eigenvalue".into()));
    }
    let a = primitive_q(&c);
    let mut form = DualForm::new(a);
    let mut emb_try = emb.clone();
    let mut passes = None;
    for _ in 0..=3 {
        match u_a_test(&form, &emb_try, l) {
            Ok(p) => {
                passes = Some(p);
                break;
            }
            Err(Error::DegenerateOrientation) => {
                emb_try = field.embedding(emb_try.prec_digits * 2)?;
            }
            Err(e) => return Err(e),
        }
    }
    let passes = passes.ok_or(Error::DegenerateOrientation)?;
    if !passes {
        form = DualForm::new(ineg(&form.coords));
    }
    let ra = l.functional(&form.coords);
    let rb = ra.translate(field, &eps.epsilon)?;
    Ok(FormPair { a: ra, b: rb })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeClass {
    PlusMinus,
    MinusPlus,
    BoundaryA,
    BoundaryB,
    Neither,
}

/// Everything needed to evaluate `Γ_{a,b}(·, x; L)`.
#[derive(Clone, Debug)]
pub struct GammaFrame {
    pub lattice: OrientedLattice,
    pub forms: FormPair,
    pub form_a: DualForm,
    pub form_b: DualForm,
    pub s: Integer,
    pub gamma: FieldElement,
    pub alpha: FieldElement,
    pub beta: FieldElement,
    /// `α(a)` and `β(b)`.
    pub alpha_a: Integer,
    pub beta_b: Integer,
    pub f_reps: Vec<FieldElement>,
    pub x_gamma: BigComplex,
    pub tau: BigComplex,
    pub sigma: BigComplex,
}

/// Element `v` of `ker(g) ∩ ℤ³` with `f(v) = gcd` of `f` on that kernel.
fn wall_vector(g: &IVec3, f: &IVec3) -> (IVec3, Integer) {
    let (_, u) = unimodular_completion(g);
    let fu = idot(f, &u[1]);
    let fv = idot(f, &u[2]);
    let (d, x, y) = crate::linalg::egcd(&fu, &fv);
    (icomb(&x, &u[1], &y, &u[2]), d)
}

pub fn build_frame(forms: &FormPair, l: &OrientedLattice, emb: &EmbeddingData) -> Result<GammaFrame> {
    let a = l.form_coords(&forms.a).ok_or_else(|| Error::Domain("form a is not integral on L".into()))?;
    let b = l.form_coords(&forms.b).ok_or_else(|| Error::Domain("form b is not integral on L".into()))?;
    let form_a = DualForm::new(a.clone());
    let form_b = DualForm::new(b.clone());
    if !form_a.primitive || !form_b.primitive {
        return Err(Error::Domain("forms must be primitive on L".into()));
    }
    let c = icross(&a, &b);
    if crate::linalg::is_zero(&c) {
        return Err(Error::Domain("forms are linearly dependent".into()));
    }
    let s = gcd3(&c);
    let g = primitive(&c);
    let (al, alpha_a) = wall_vector(&b, &a);
    let (be, beta_b) = wall_vector(&a, &b);

    // image of (a, b): L → ℤ²
    let rows: Vec<(Integer, Integer)> = (0..3).map(|i| (a[i].clone(), b[i].clone())).collect();
    let ((p, r), t) = hnf_rows2(&rows).ok_or_else(|| Error::Domain("forms are linearly dependent".into()))?;
    let count = &t / Integer::from(r.gcd_ref(&t));
    if Integer::from(&p * &count) != alpha_a || t != beta_b {
        return Err(Error::Orientation("image lattice disagrees with wall vectors".into()));
    }
    let count = count.to_usize().ok_or_else(|| Error::Domain("F too large".into()))?;
    let solver = TwoFormSolver::new(&a, &b).ok_or_else(|| Error::Domain("forms are linearly dependent".into()))?;
    let mut f_reps = Vec::with_capacity(count);
    for m in 0..count {
        let x = Integer::from(&p * m);
        let y = Integer::from(&r * m).rem_euc(&t);
        let lift = solver.solve(&x, &y).ok_or_else(|| Error::Orientation("F point not liftable".into()))?;
        f_reps.push(l.element(&lift));
    }

    let gamma = l.element(&g);
    let alpha = l.element(&al);
    let beta = l.element(&be);
    let x_gamma = emb.embed_complex(&gamma);
    let tau = &emb.embed_complex(&alpha) / &x_gamma;
    let sigma = &emb.embed_complex(&beta) / &x_gamma;
    if tau.im >= 0 || sigma.im <= 0 {
        return Err(Error::Orientation(format!("Im tau = {}, Im sigma = {}", tau.im.to_f64(), sigma.im.to_f64())));
    }
    Ok(GammaFrame {
        lattice: l.clone(),
        forms: forms.clone(),
        form_a,
        form_b,
        s,
        gamma,
        alpha,
        beta,
        alpha_a,
        beta_b,
        f_reps,
        x_gamma,
        tau,
        sigma,
    })
}

impl GammaFrame {
    pub fn a_of(&self, v: &FieldElement) -> Rational {
        self.forms.a.eval(v)
    }

    pub fn b_of(&self, v: &FieldElement) -> Rational {
        self.forms.b.eval(v)
    }

    /// Rough cost of a product evaluation at `digits` digits: `|F|·J·K`.
    pub fn cost(&self, digits: u32) -> f64 {
        cost_estimate(self.f_reps.len(), &self.tau, &self.sigma, digits)
    }
}

pub fn cost_estimate(f_len: usize, tau: &BigComplex, sigma: &BigComplex, digits: u32) -> f64 {
    let terms = |im: f64| (digits as f64 * std::f64::consts::LN_10 / (2.0 * std::f64::consts::PI * im.abs())).ceil() + 1.0;
    f_len as f64 * terms(tau.im.to_f64()) * terms(sigma.im.to_f64())
}

pub fn cone_membership(frame: &GammaFrame, delta: &FieldElement) -> ConeClass {
    let da = frame.a_of(delta);
    let db = frame.b_of(delta);
    match (da.cmp0(), db.cmp0()) {
        (std::cmp::Ordering::Equal, std::cmp::Ordering::Equal) => ConeClass::Neither,
        (std::cmp::Ordering::Equal, _) => ConeClass::BoundaryA,
        (_, std::cmp::Ordering::Equal) => ConeClass::BoundaryB,
        (std::cmp::Ordering::Greater, std::cmp::Ordering::Less) => ConeClass::PlusMinus,
        (std::cmp::Ordering::Less, std::cmp::Ordering::Greater) => ConeClass::MinusPlus,
        _ => ConeClass::Neither,
    }
}

/// `χ(δ) = (sgn a(δ) − sgn b(δ)) / 2`.
pub fn chi(frame: &GammaFrame, delta: &FieldElement) -> Rational {
    let sa = frame.a_of(delta).cmp0() as i32;
    let sb = frame.b_of(delta).cmp0() as i32;
    Rational::from((sa - sb, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubicfield::{validate_unit, RootChoice};
    use crate::ideallat::AdmissibleSearch;
    use crate::linalg::ivec;

    fn el(a: i64, b: i64, c: i64) -> FieldElement {
        FieldElement::from_ints(a, b, c)
    }

    struct Setup {
        k: CubicField,
        emb: EmbeddingData,
        eps: UnitData,
        l: IdealLattice,
        a_ideal: IdealLattice,
        cands: Vec<AdmissiblePoint>,
    }

    fn intro() -> Setup {
        let k = CubicField::new(0, 0, -7, RootChoice::NegativeImaginary).unwrap();
        let emb = k.embedding(60).unwrap();
        let f = IdealLattice::from_generators(&k, &[el(3, 0, 0), el(-1, 1, 0)]).unwrap();
        let eps = validate_unit(&k, &el(2, -1, 0), &f, &emb).unwrap();
        let a_ideal = IdealLattice::from_generators(&k, &[el(5, 0, 0), el(-3, 1, 0)]).unwrap();
        let cands = AdmissibleSearch::new(&k, &f, &a_ideal, &Integer::from(3), false).unwrap().candidates(8);
        Setup { k, emb, eps, l: f, a_ideal, cands }
    }

    #[test]
    fn lemma22_properties() {
        let s = intro();
        let ol = OrientedLattice::new(&s.l, &s.emb).unwrap();
        for p in &s.cands {
            let fp = solve_lemma22(&s.k, p, &s.eps, &ol, &s.emb).unwrap();
            let a = DualForm::new(ol.form_coords(&fp.a).unwrap());
            assert!(a.primitive);
            assert_eq!(pair(&a, &p.lambda, &ol), 0);
            let b = DualForm::new(ol.form_coords(&fp.b).unwrap());
            assert_eq!(pair(&b, &p.lambda, &ol), 0);
            assert!(u_a_test(&a, &s.emb, &ol).unwrap());
            assert!(!u_a_test(&DualForm::new(ineg(&a.coords)), &s.emb, &ol).unwrap());
            // rescaling λ by a positive rational changes nothing
            let scaled = AdmissiblePoint::new(p.lambda.scale(&Rational::from((7, 2))), p.q.clone());
            assert_eq!(solve_lemma22(&s.k, &scaled, &s.eps, &ol, &s.emb).unwrap(), fp);
            // a_{ελ} = ε a_λ
            let moved = AdmissiblePoint::new(s.k.mul(&s.eps.epsilon, &p.lambda), p.q.clone());
            let fm = solve_lemma22(&s.k, &moved, &s.eps, &ol, &s.emb).unwrap();
            assert_eq!(fm.a, fp.b);
        }
    }

    #[test]
    fn frame_invariants() {
        let s = intro();
        let ol = OrientedLattice::new(&s.l, &s.emb).unwrap();
        let a_inv = IdealLattice::inverse(&s.k, &s.a_ideal).unwrap();
        let al = IdealLattice::product(&s.k, &a_inv, &s.l);
        let oal = OrientedLattice::new(&al, &s.emb).unwrap();
        for p in &s.cands {
            let fp = solve_lemma22(&s.k, p, &s.eps, &ol, &s.emb).unwrap();
            for lat in [&ol, &oal] {
                let fr = build_frame(&fp, lat, &s.emb).unwrap();
                assert!(fr.s >= 1);
                assert_eq!(fr.a_of(&fr.gamma), 0);
                assert_eq!(fr.b_of(&fr.gamma), 0);
                assert!(fr.a_of(&fr.alpha) > 0 && fr.b_of(&fr.alpha) == 0);
                assert!(fr.b_of(&fr.beta) > 0 && fr.a_of(&fr.beta) == 0);
                assert!(fr.tau.im < 0 && fr.sigma.im > 0);
                assert!(fr.f_reps[0].is_zero());
                for d in &fr.f_reps {
                    let (x, y) = (fr.a_of(d), fr.b_of(d));
                    assert!(x >= 0 && x < fr.alpha_a && y >= 0 && y < fr.beta_b);
                }
                // pairwise inequivalent mod Zγ: distinct (a, b) images
                let mut imgs: Vec<(Rational, Rational)> = fr.f_reps.iter().map(|d| (fr.a_of(d), fr.b_of(d))).collect();
                imgs.sort();
                imgs.dedup();
                assert_eq!(imgs.len(), fr.f_reps.len());
                // det(a, b, c) = s·c(γ) for dual vectors c
                let gc = lat.coords(&fr.gamma).unwrap();
                for c in [ivec(1, 0, 0), ivec(2, -1, 3), ivec(0, 5, -2)] {
                    let det = idot(&icross(&fr.form_a.coords, &fr.form_b.coords), &c);
                    assert_eq!(det, (&fr.s * idot(&gc, &c)));
                }
            }
        }
    }

    #[test]
    fn f_count_matches_brute_force() {
        let s = intro();
        let ol = OrientedLattice::new(&s.l, &s.emb).unwrap();
        let fp = solve_lemma22(&s.k, &s.cands[0], &s.eps, &ol, &s.emb).unwrap();
        let fr = build_frame(&fp, &ol, &s.emb).unwrap();
        let a = &fr.form_a.coords;
        let b = &fr.form_b.coords;
        let mut seen = std::collections::BTreeSet::new();
        let r = 12i64;
        for i in -r..=r {
            for j in -r..=r {
                for k in -r..=r {
                    let c = ivec(i, j, k);
                    let (x, y) = (idot(a, &c), idot(b, &c));
                    if x >= 0 && x < fr.alpha_a && y >= 0 && y < fr.beta_b {
                        seen.insert((x, y));
                    }
                }
            }
        }
        assert_eq!(seen.len(), fr.f_reps.len());
    }

    #[test]
    fn cone_classes() {
        let s = intro();
        let ol = OrientedLattice::new(&s.l, &s.emb).unwrap();
        let fp = solve_lemma22(&s.k, &s.cands[0], &s.eps, &ol, &s.emb).unwrap();
        let fr = build_frame(&fp, &ol, &s.emb).unwrap();
        assert_eq!(cone_membership(&fr, &fr.gamma), ConeClass::Neither);
        assert_eq!(cone_membership(&fr, &fr.alpha), ConeClass::BoundaryB);
        assert_eq!(cone_membership(&fr, &fr.beta), ConeClass::BoundaryA);
        let d = fr.alpha.sub(&fr.beta);
        assert_eq!(cone_membership(&fr, &d), ConeClass::PlusMinus);
        assert_eq!(cone_membership(&fr, &d.neg()), ConeClass::MinusPlus);
        assert_eq!(chi(&fr, &d), 1);
        assert_eq!(chi(&fr, &d.neg()), -1);
        assert_eq!(chi(&fr, &fr.alpha), Rational::from((1, 2)));
    }
}
