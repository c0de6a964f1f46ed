//! Rank-three lattices in `K` (fractional ideals) with exact HNF arithmetic,
//! and the search for admissible evaluation points.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::ops::RemRounding;
use rug::{Integer, Rational};

use crate::cubicfield::{CubicField, FieldElement};
use crate::error::{Error, Result};
use crate::linalg::{hnf_rows, idet3, invariant_factors, lll_reduce, qinv3, qtranspose, IMat3, IVec3, QMat3};

/// A ℤ-lattice of rank three in `K`, stored as `rows / denom` where `rows`
/// is the row-style HNF of integer power-basis coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IdealLattice {
    rows: [IVec3; 3],
    denom: Integer,
    pub label: Option<String>,
}

impl fmt::Debug for IdealLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(1/{} ·", self.denom)?;
        for r in &self.rows {
            write!(f, " [{}, {}, {}]", r[0], r[1], r[2])?;
        }
        write!(f, ")")
    }
}

fn lcm_denoms<'a>(it: impl Iterator<Item = &'a Rational>) -> Integer {
    let mut d = Integer::from(1);
    for x in it {
        d.lcm_mut(x.denom());
    }
    d
}

impl IdealLattice {
    /// ℤ-span of the given elements (rank three required).
    pub fn from_span(elems: &[FieldElement]) -> Result<Self> {
        let d = lcm_denoms(elems.iter().flat_map(|e| e.coords.iter()));
        let ints: Vec<IVec3> = elems
            .iter()
            .map(|e| {
                std::array::from_fn(|i| {
                    let c = &e.coords[i];
                    c.numer() * Integer::from(&d / c.denom())
                })
            })
            .collect();
        let rows = hnf_rows(&ints).ok_or_else(|| Error::Domain("lattice generators have rank below three".into()))?;
        Ok(Self::normalized(rows, d))
    }

    fn normalized(rows: [IVec3; 3], denom: Integer) -> Self {
        let mut g = denom.clone();
        for r in &rows {
            for x in r {
                g.gcd_mut(x);
            }
        }
        if g == 1 {
            return IdealLattice { rows, denom, label: None };
        }
        let rows = std::array::from_fn(|i| std::array::from_fn(|j| Integer::from(&rows[i][j] / &g)));
        IdealLattice { rows, denom: denom / g, label: None }
    }

    /// HNF of the span of `{g·ω}` over generators `g` and the order basis `ω`.
    pub fn from_generators(field: &CubicField, gens: &[FieldElement]) -> Result<Self> {
        if gens.is_empty() || gens.iter().all(|g| g.is_zero()) {
            return Err(Error::Config("ideal needs at least one nonzero generator".into()));
        }
        let prods: Vec<FieldElement> = gens.iter().flat_map(|g| field.integral_basis.iter().map(move |w| field.mul(g, w))).collect();
        Self::from_span(&prods)
    }

    pub fn order(field: &CubicField) -> Self {
        Self::from_span(&field.integral_basis).expect("integral basis has full rank")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn denom(&self) -> &Integer {
        &self.denom
    }

    pub fn hnf_rows(&self) -> &[IVec3; 3] {
        &self.rows
    }

    /// HNF basis as field elements.
    pub fn basis(&self) -> [FieldElement; 3] {
        std::array::from_fn(|i| FieldElement::new(std::array::from_fn(|j| Rational::from((self.rows[i][j].clone(), self.denom.clone())))))
    }

    /// Rows = basis vectors in power coordinates.
    pub fn basis_matrix(&self) -> QMat3 {
        std::array::from_fn(|i| std::array::from_fn(|j| Rational::from((self.rows[i][j].clone(), self.denom.clone()))))
    }

    /// Covolume relative to the power basis.
    pub fn covolume(&self) -> Rational {
        let d = self.denom.clone().pow(3);
        Rational::from((idet3(&self.rows).abs(), d))
    }

    /// Index-norm relative to the order of `field`.
    pub fn norm(&self, field: &CubicField) -> Rational {
        self.covolume() / IdealLattice::order(field).covolume()
    }

    /// Coordinates of `e` in the HNF basis (rational in general).
    pub fn coords_q(&self, e: &FieldElement) -> [Rational; 3] {
        // solve c · B = e with B upper triangular
        let b = self.basis_matrix();
        let mut c: [Rational; 3] = std::array::from_fn(|_| Rational::new());
        for j in 0..3 {
            let mut s = e.coords[j].clone();
            for (i, ci) in c.iter().enumerate().take(j) {
                s -= Rational::from(ci * &b[i][j]);
            }
            c[j] = s / &b[j][j];
        }
        c
    }

    pub fn coords(&self, e: &FieldElement) -> Option<IVec3> {
        let c = self.coords_q(e);
        if c.iter().all(|x| *x.denom() == 1) {
            Some(std::array::from_fn(|i| c[i].numer().clone()))
        } else {
            None
        }
    }

    pub fn member(&self, e: &FieldElement) -> bool {
        self.coords(e).is_some()
    }

    pub fn contains(&self, other: &IdealLattice) -> bool {
        other.basis().iter().all(|b| self.member(b))
    }

    pub fn element(&self, c: &IVec3) -> FieldElement {
        let b = self.basis();
        let mut acc = FieldElement::zero();
        for i in 0..3 {
            acc = acc.add(&b[i].scale(&Rational::from(&c[i])));
        }
        acc
    }

    pub fn sum(&self, o: &IdealLattice) -> IdealLattice {
        let mut v: Vec<FieldElement> = self.basis().to_vec();
        v.extend(o.basis());
        Self::from_span(&v).expect("sum of full-rank lattices")
    }

    pub fn product(field: &CubicField, a: &IdealLattice, b: &IdealLattice) -> IdealLattice {
        let ab = a.basis();
        let bb = b.basis();
        let prods: Vec<FieldElement> = ab.iter().flat_map(|x| bb.iter().map(move |y| field.mul(x, y))).collect();
        Self::from_span(&prods).expect("product of full-rank lattices")
    }

    pub fn scale(&self, r: &Rational) -> IdealLattice {
        assert!(*r != 0, "scaling by zero");
        let b: Vec<FieldElement> = self.basis().iter().map(|e| e.scale(r)).collect();
        Self::from_span(&b).unwrap()
    }

    /// `e·L` for a nonzero element `e`.
    pub fn mul_element(&self, field: &CubicField, e: &FieldElement) -> IdealLattice {
        assert!(!e.is_zero(), "multiplying lattice by zero");
        let b: Vec<FieldElement> = self.basis().iter().map(|x| field.mul(e, x)).collect();
        Self::from_span(&b).unwrap()
    }

    /// Dual lattice under the standard pairing on power coordinates.
    pub fn dual(&self) -> IdealLattice {
        let inv_t = qtranspose(&qinv3(&self.basis_matrix()));
        let elems: Vec<FieldElement> = inv_t.iter().map(|r| FieldElement::new(r.clone())).collect();
        Self::from_span(&elems).unwrap()
    }

    pub fn intersect(&self, o: &IdealLattice) -> IdealLattice {
        self.dual().sum(&o.dual()).dual()
    }

    /// `{x ∈ K : x·B ⊆ O}`, checked to satisfy `B·B⁻¹ = O`.
    pub fn inverse(field: &CubicField, b: &IdealLattice) -> Result<IdealLattice> {
        let order = IdealLattice::order(field);
        let mut acc: Option<IdealLattice> = None;
        for bi in b.basis() {
            if bi.is_zero() {
                continue;
            }
            let inv = field.inv(&bi)?;
            let l = order.mul_element(field, &inv);
            acc = Some(match acc {
                None => l,
                Some(a) => a.intersect(&l),
            });
        }
        let inv = acc.ok_or_else(|| Error::Domain("inverse of zero lattice".into()))?;
        if IdealLattice::product(field, b, &inv) != order {
            return Err(Error::NotInvertible);
        }
        Ok(inv)
    }

    /// Positive generator of `L ∩ Q·1`.
    pub fn smallest_rational(&self) -> Rational {
        // r·e1 = c·B  ⇔  c = r·(first row of B⁻¹)
        let inv = qinv3(&self.basis_matrix());
        let v = &inv[0];
        let d = lcm_denoms(v.iter());
        let mut g = Integer::new();
        for x in v {
            g.gcd_mut(&(x.numer() * Integer::from(&d / x.denom())));
        }
        Rational::from((d, g))
    }

    /// Integer invariant factors of `self / sub` (requires `sub ⊆ self`).
    pub fn quotient_invariants(&self, sub: &IdealLattice) -> Result<[Integer; 3]> {
        let sb = sub.basis();
        let mut rows = Vec::with_capacity(3);
        for b in &sb {
            rows.push(self.coords(b).ok_or_else(|| Error::Domain("not a sublattice".into()))?);
        }
        let m: IMat3 = [rows[0].clone(), rows[1].clone(), rows[2].clone()];
        Ok(invariant_factors(&m))
    }

    pub fn is_integral(&self, field: &CubicField) -> bool {
        IdealLattice::order(field).contains(self)
    }
}

/// `A + B = O`.
pub fn coprime(field: &CubicField, a: &IdealLattice, b: &IdealLattice) -> bool {
    a.sum(b) == IdealLattice::order(field)
}

/// The admissible point `h = λ/q`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissiblePoint {
    pub lambda: FieldElement,
    pub q: Integer,
    pub h: FieldElement,
}

impl AdmissiblePoint {
    pub fn new(lambda: FieldElement, q: Integer) -> Self {
        let h = lambda.scale(&Rational::from((Integer::from(1), q.clone())));
        AdmissiblePoint { lambda, q, h }
    }
}

fn is_prime(n: &Integer) -> bool {
    n.is_probably_prime(40) != rug::integer::IsPrime::No
}

/// Checks the arithmetic conditions on `𝔞` relative to `q` and returns `N(𝔞)`.
pub fn check_smoothing_ideal(field: &CubicField, a_ideal: &IdealLattice, q: &Integer) -> Result<Integer> {
    let n = a_ideal.norm(field);
    if *n.denom() != 1 || !a_ideal.is_integral(field) {
        return Err(Error::Config("smoothing ideal must be integral".into()));
    }
    let n = n.numer().clone();
    if n == 2 || !is_prime(&n) {
        return Err(Error::Config(format!("N(a) must be an odd prime, got {n}")));
    }
    if q.is_divisible(&n) {
        return Err(Error::Config(format!("N(a) = {n} must be coprime to q = {q}")));
    }
    Ok(n)
}

/// Total order on candidates: max-abs power coordinate, then lexicographic.
fn candidate_cmp(a: &FieldElement, b: &FieldElement) -> Ordering {
    let key = |e: &FieldElement| e.coords.iter().map(|c| c.clone().abs()).max().unwrap();
    key(a).cmp(&key(b)).then_with(|| a.coords.cmp(&b.coords))
}

/// Admissible λ in enumeration order. `relaxed_norm` admits even prime
/// norms (used for experiments with `N(𝔞) = 2`).
pub struct AdmissibleSearch {
    lambda0: FieldElement,
    /// LLL-reduced basis of `q·N·𝔞⁻¹L`.
    step: [FieldElement; 3],
    step_inv: QMat3,
    nl: IdealLattice,
    q: Integer,
}

impl AdmissibleSearch {
    pub fn new(field: &CubicField, l: &IdealLattice, a_ideal: &IdealLattice, q: &Integer, relaxed_norm: bool) -> Result<Self> {
        let n = if relaxed_norm {
            let n = a_ideal.norm(field);
            if *n.denom() != 1 || !is_prime(n.numer()) || q.is_divisible(n.numer()) {
                return Err(Error::Config("N(a) must be a prime coprime to q".into()));
            }
            n.numer().clone()
        } else {
            check_smoothing_ideal(field, a_ideal, q)?
        };
        let a_inv = IdealLattice::inverse(field, a_ideal)?;
        let m = IdealLattice::product(field, &a_inv, l).scale(&Rational::from(&n));
        let qe = FieldElement::from_rational(Rational::from(q));
        let e = l.coords(&qe).ok_or_else(|| Error::Config("q is not in L".into()))?;
        // T: rows = basis of M in L-coordinates
        let mb = m.basis();
        let t: IMat3 = std::array::from_fn(|i| l.coords(&mb[i]).expect("M ⊆ L"));
        let det = idet3(&t);
        let adj = adjugate(&t);
        let det_inv = det.clone().invert(q).map_err(|_| Error::Config("[L : N a⁻¹ L] is not coprime to q".into()))?;
        // x ≡ e·T⁻¹ (mod q)
        let x: IVec3 = std::array::from_fn(|j| {
            let mut s = Integer::new();
            for i in 0..3 {
                s += Integer::from(&e[i] * &adj[i][j]);
            }
            (s * &det_inv).rem_euc(q)
        });
        let lambda0 = m.element(&x);
        debug_assert!(l.member(&lambda0.sub(&qe).scale(&Rational::from((Integer::from(1), q.clone())))));

        // LLL on qM in power coordinates
        let qm = m.scale(&Rational::from(q));
        let d = qm.denom().clone();
        let mut rows: Vec<Vec<Integer>> = qm.hnf_rows().iter().map(|r| r.to_vec()).collect();
        lll_reduce(&mut rows, 99, 100);
        let step: [FieldElement; 3] =
            std::array::from_fn(|i| FieldElement::new(std::array::from_fn(|j| Rational::from((rows[i][j].clone(), d.clone())))));
        let sm: QMat3 = std::array::from_fn(|i| step[i].coords.clone());
        let step_inv = qinv3(&sm);
        let nl = l.scale(&Rational::from(&n));
        Ok(AdmissibleSearch { lambda0, step, step_inv, nl, q: q.clone() })
    }

    /// The first `count` admissible λ in enumeration order.
    pub fn candidates(&self, count: usize) -> Vec<AdmissiblePoint> {
        let max_abs = |e: &FieldElement| e.coords.iter().map(|c| c.clone().abs()).max().unwrap();
        // bound on coefficient k_i for |λ|_∞ ≤ r: |k_i| ≤ Σ_j |inv[j][i]| (r + |λ0|_∞)
        let col_l1: Vec<Rational> =
            (0..3).map(|i| (0..3).map(|j| self.step_inv[j][i].clone().abs()).fold(Rational::new(), |a, b| a + b)).collect();
        let l0 = max_abs(&self.lambda0);
        let mut r = Rational::from(1) + &l0;
        loop {
            let bound: Vec<i64> =
                col_l1.iter().map(|c| (c * Rational::from(&r + &l0)).floor().numer().to_i64().unwrap_or(i64::MAX)).collect();
            let total: i128 = bound.iter().map(|b| 2 * *b as i128 + 1).product();
            assert!(total < 50_000_000, "admissible enumeration box too large");
            let mut found: Vec<FieldElement> = Vec::new();
            for k0 in -bound[0]..=bound[0] {
                for k1 in -bound[1]..=bound[1] {
                    for k2 in -bound[2]..=bound[2] {
                        let mut lam = self.lambda0.clone();
                        for (k, s) in [k0, k1, k2].iter().zip(&self.step) {
                            if *k != 0 {
                                lam = lam.add(&s.scale(&Rational::from(*k)));
                            }
                        }
                        if max_abs(&lam) <= r && !self.nl.member(&lam) {
                            found.push(lam);
                        }
                    }
                }
            }
            if found.len() >= count {
                found.sort_by(candidate_cmp);
                found.truncate(count);
                return found.into_iter().map(|l| AdmissiblePoint::new(l, self.q.clone())).collect();
            }
            r *= 2;
        }
    }
}

fn adjugate(m: &IMat3) -> IMat3 {
    let others = |i: usize| match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (r0, r1) = others(j);
            let (c0, c1) = others(i);
            let mut c = Integer::from(&m[r0][c0] * &m[r1][c1]) - Integer::from(&m[r0][c1] * &m[r1][c0]);
            if (i + j) % 2 == 1 {
                c = -c;
            }
            c
        })
    })
}

/// First admissible λ in enumeration order.
pub fn find_admissible(field: &CubicField, l: &IdealLattice, a_ideal: &IdealLattice, q: &Integer) -> Result<AdmissiblePoint> {
    let s = AdmissibleSearch::new(field, l, a_ideal, q, false)?;
    Ok(s.candidates(1).remove(0))
}

/// Checks the defining conditions of an admissible point for `L`, `𝔞`.
pub fn is_admissible(field: &CubicField, l: &IdealLattice, a_ideal: &IdealLattice, p: &AdmissiblePoint) -> Result<bool> {
    let n = a_ideal.norm(field);
    let n = Rational::from(n.numer());
    let a_inv = IdealLattice::inverse(field, a_ideal)?;
    let m = IdealLattice::product(field, &a_inv, l).scale(&n);
    let q = Rational::from(&p.q);
    let diff = p.lambda.sub(&FieldElement::from_rational(q.clone()));
    Ok(m.member(&p.lambda) && l.scale(&q).member(&diff) && !l.scale(&n).member(&p.lambda))
}
