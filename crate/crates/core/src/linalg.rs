//! Small exact linear algebra over ℤ and ℚ in dimension three.

use rug::ops::RemRounding;
use rug::{Integer, Rational};

pub type IVec3 = [Integer; 3];
pub type QVec3 = [Rational; 3];
/// Row-major 3×3 matrix.
pub type QMat3 = [[Rational; 3]; 3];
pub type IMat3 = [[Integer; 3]; 3];

pub fn ivec(a: i64, b: i64, c: i64) -> IVec3 {
    [Integer::from(a), Integer::from(b), Integer::from(c)]
}

pub fn qzero() -> QVec3 {
    [Rational::new(), Rational::new(), Rational::new()]
}

pub fn to_q(v: &IVec3) -> QVec3 {
    [Rational::from(&v[0]), Rational::from(&v[1]), Rational::from(&v[2])]
}

pub fn idot(a: &IVec3, b: &IVec3) -> Integer {
    Integer::from(&a[0] * &b[0]) + Integer::from(&a[1] * &b[1]) + Integer::from(&a[2] * &b[2])
}

pub fn qdot(a: &QVec3, b: &QVec3) -> Rational {
    Rational::from(&a[0] * &b[0]) + Rational::from(&a[1] * &b[1]) + Rational::from(&a[2] * &b[2])
}

pub fn icross(a: &IVec3, b: &IVec3) -> IVec3 {
    [
        Integer::from(&a[1] * &b[2]) - Integer::from(&a[2] * &b[1]),
        Integer::from(&a[2] * &b[0]) - Integer::from(&a[0] * &b[2]),
        Integer::from(&a[0] * &b[1]) - Integer::from(&a[1] * &b[0]),
    ]
}

pub fn qcross(a: &QVec3, b: &QVec3) -> QVec3 {
    [
        Rational::from(&a[1] * &b[2]) - Rational::from(&a[2] * &b[1]),
        Rational::from(&a[2] * &b[0]) - Rational::from(&a[0] * &b[2]),
        Rational::from(&a[0] * &b[1]) - Rational::from(&a[1] * &b[0]),
    ]
}

pub fn iadd(a: &IVec3, b: &IVec3) -> IVec3 {
    [Integer::from(&a[0] + &b[0]), Integer::from(&a[1] + &b[1]), Integer::from(&a[2] + &b[2])]
}

pub fn iscale(a: &IVec3, s: &Integer) -> IVec3 {
    [Integer::from(&a[0] * s), Integer::from(&a[1] * s), Integer::from(&a[2] * s)]
}

/// `x*u + y*v`
pub fn icomb(x: &Integer, u: &IVec3, y: &Integer, v: &IVec3) -> IVec3 {
    [
        Integer::from(x * &u[0]) + Integer::from(y * &v[0]),
        Integer::from(x * &u[1]) + Integer::from(y * &v[1]),
        Integer::from(x * &u[2]) + Integer::from(y * &v[2]),
    ]
}

pub fn ineg(a: &IVec3) -> IVec3 {
    [Integer::from(-&a[0]), Integer::from(-&a[1]), Integer::from(-&a[2])]
}

pub fn is_zero(a: &IVec3) -> bool {
    a.iter().all(|x| *x == 0)
}

pub fn gcd3(a: &IVec3) -> Integer {
    let g = a[0].clone().gcd(&a[1]);
    g.gcd(&a[2])
}

/// Primitive part of a nonzero integer vector (sign kept).
pub fn primitive(a: &IVec3) -> IVec3 {
    let g = gcd3(a);
    assert!(g != 0, "primitive part of zero vector");
    [Integer::from(&a[0] / &g), Integer::from(&a[1] / &g), Integer::from(&a[2] / &g)]
}

/// Clears denominators: returns the primitive integer vector on the same ray.
pub fn primitive_q(a: &QVec3) -> IVec3 {
    let mut d = Integer::from(1);
    for x in a {
        d.lcm_mut(x.denom());
    }
    let v = [
        (a[0].numer() * Integer::from(&d / a[0].denom())),
        (a[1].numer() * Integer::from(&d / a[1].denom())),
        (a[2].numer() * Integer::from(&d / a[2].denom())),
    ];
    primitive(&v)
}

/// Extended gcd: `(g, x, y)` with `x*a + y*b = g >= 0`.
pub fn egcd(a: &Integer, b: &Integer) -> (Integer, Integer, Integer) {
    let (g, x, y) = a.clone().gcd_cofactors(b.clone(), Integer::new());
    (g, x, y)
}

pub fn qdet3(m: &QMat3) -> Rational {
    let t = |i: usize, j: usize, k: usize, l: usize| Rational::from(&m[i][j] * &m[k][l]);
    let c0 = t(1, 1, 2, 2) - t(1, 2, 2, 1);
    let c1 = t(1, 0, 2, 2) - t(1, 2, 2, 0);
    let c2 = t(1, 0, 2, 1) - t(1, 1, 2, 0);
    Rational::from(&m[0][0] * &c0) - Rational::from(&m[0][1] * &c1) + Rational::from(&m[0][2] * &c2)
}

pub fn idet3(m: &IMat3) -> Integer {
    let t = |i: usize, j: usize, k: usize, l: usize| Integer::from(&m[i][j] * &m[k][l]);
    let c0 = t(1, 1, 2, 2) - t(1, 2, 2, 1);
    let c1 = t(1, 0, 2, 2) - t(1, 2, 2, 0);
    let c2 = t(1, 0, 2, 1) - t(1, 1, 2, 0);
    Integer::from(&m[0][0] * &c0) - Integer::from(&m[0][1] * &c1) + Integer::from(&m[0][2] * &c2)
}

pub fn qtranspose(m: &QMat3) -> QMat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone()))
}

/// Inverse of a nonsingular rational 3×3 matrix via the adjugate.
pub fn qinv3(m: &QMat3) -> QMat3 {
    let d = qdet3(m);
    assert!(d != 0, "singular matrix");
    let minor =
        |r0: usize, r1: usize, c0: usize, c1: usize| Rational::from(&m[r0][c0] * &m[r1][c1]) - Rational::from(&m[r0][c1] * &m[r1][c0]);
    let others = |i: usize| match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            // inverse[i][j] = cofactor[j][i] / det
            let (r0, r1) = others(j);
            let (c0, c1) = others(i);
            let mut c = minor(r0, r1, c0, c1);
            if (i + j) % 2 == 1 {
                c = -c;
            }
            c / &d
        })
    })
}

pub fn qmatvec(m: &QMat3, v: &QVec3) -> QVec3 {
    std::array::from_fn(|i| Rational::from(&m[i][0] * &v[0]) + Rational::from(&m[i][1] * &v[1]) + Rational::from(&m[i][2] * &v[2]))
}

pub fn qmatmul(a: &QMat3, b: &QMat3) -> QMat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            Rational::from(&a[i][0] * &b[0][j]) + Rational::from(&a[i][1] * &b[1][j]) + Rational::from(&a[i][2] * &b[2][j])
        })
    })
}

pub fn is_integral(v: &QVec3) -> bool {
    v.iter().all(|x| *x.denom() == 1)
}

pub fn q_to_i(v: &QVec3) -> Option<IVec3> {
    if is_integral(v) {
        Some([v[0].numer().clone(), v[1].numer().clone(), v[2].numer().clone()])
    } else {
        None
    }
}

/// Row-style Hermite normal form of the ℤ-span of `rows`: three rows, upper
/// triangular, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`. `None` if the span has rank below three.
pub fn hnf_rows(rows: &[IVec3]) -> Option<[IVec3; 3]> {
    let mut a: Vec<IVec3> = rows.iter().filter(|r| !is_zero(r)).cloned().collect();
    let mut out: Vec<IVec3> = Vec::with_capacity(3);
    for col in 0..3 {
        let p = a.iter().position(|r| r[col] != 0)?;
        let mut piv = a.swap_remove(p);
        for r in a.iter_mut() {
            if r[col] == 0 {
                continue;
            }
            let (g, x, y) = egcd(&piv[col], &r[col]);
            let pa = Integer::from(&piv[col] / &g);
            let ra = Integer::from(&r[col] / &g);
            let new_piv = icomb(&x, &piv, &y, r);
            let new_r = icomb(&pa, r, &Integer::from(-&ra), &piv);
            piv = new_piv;
            *r = new_r;
        }
        a.retain(|r| !is_zero(r));
        if piv[col] < 0 {
            piv = ineg(&piv);
        }
        out.push(piv);
    }
    for i in 0..3 {
        for k in 0..i {
            let q = out[k][i].clone().div_rem_floor(out[i][i].clone()).0;
            if q != 0 {
                let oi = out[i].clone();
                out[k] = icomb(&Integer::from(1), &out[k], &(-q), &oi);
            }
        }
    }
    Some([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// Two-dimensional version for rows in ℤ²: returns `((p, r), t)` with the
/// span equal to `ℤ(p, r) + ℤ(0, t)`, `p, t > 0`, `0 <= r < t`.
pub fn hnf_rows2(rows: &[(Integer, Integer)]) -> Option<((Integer, Integer), Integer)> {
    let mut a: Vec<(Integer, Integer)> = rows.iter().filter(|r| r.0 != 0 || r.1 != 0).cloned().collect();
    let p = a.iter().position(|r| r.0 != 0)?;
    let mut piv = a.swap_remove(p);
    for r in a.iter_mut() {
        if r.0 == 0 {
            continue;
        }
        let (g, x, y) = egcd(&piv.0, &r.0);
        let pa = Integer::from(&piv.0 / &g);
        let ra = Integer::from(&r.0 / &g);
        let np = (Integer::from(&x * &piv.0) + Integer::from(&y * &r.0), Integer::from(&x * &piv.1) + Integer::from(&y * &r.1));
        let nr = (Integer::from(&pa * &r.0) - Integer::from(&ra * &piv.0), Integer::from(&pa * &r.1) - Integer::from(&ra * &piv.1));
        piv = np;
        *r = nr;
    }
    let mut t = Integer::new();
    for r in &a {
        debug_assert!(r.0 == 0);
        t.gcd_mut(&r.1);
    }
    if t == 0 {
        return None;
    }
    if piv.0 < 0 {
        piv = (-piv.0, -piv.1);
    }
    let r = piv.1.clone().rem_euc(&t);
    Some(((piv.0, r), t))
}

/// Unimodular `U` (columns) with `a·U = (g, 0, 0)`, `g = gcd(a) > 0`.
/// Columns 1 and 2 of `U` then form a ℤ-basis of `ker a ∩ ℤ³`.
pub fn unimodular_completion(a: &IVec3) -> (Integer, [IVec3; 3]) {
    let mut row = a.clone();
    // columns of U
    let mut u: [IVec3; 3] = [ivec(1, 0, 0), ivec(0, 1, 0), ivec(0, 0, 1)];
    for j in 1..3 {
        if row[j] == 0 {
            continue;
        }
        let (g, x, y) = egcd(&row[0], &row[j]);
        let p = Integer::from(&row[0] / &g);
        let q = Integer::from(&row[j] / &g);
        let c0 = icomb(&x, &u[0], &y, &u[j]);
        let cj = icomb(&p, &u[j], &Integer::from(-&q), &u[0]);
        u[0] = c0;
        u[j] = cj;
        row[0] = g;
        row[j] = Integer::new();
    }
    if row[0] < 0 {
        row[0] = -row[0].clone();
        u[0] = ineg(&u[0]);
    }
    (row[0].clone(), u)
}

/// Solver for `a·c = x, b·c = y` over ℤ³ for a fixed rank-two pair of forms.
#[derive(Clone, Debug)]
pub struct TwoFormSolver {
    h11: Integer,
    h21: Integer,
    h22: Integer,
    u: [IVec3; 3],
}

impl TwoFormSolver {
    pub fn new(a: &IVec3, b: &IVec3) -> Option<Self> {
        let (h11, u) = unimodular_completion(a);
        if h11 == 0 {
            return None;
        }
        // b in the new coordinates
        let bu: Vec<Integer> = u.iter().map(|c| idot(b, c)).collect();
        let (g, x, y) = egcd(&bu[1], &bu[2]);
        if g == 0 {
            return None;
        }
        let p = Integer::from(&bu[1] / &g);
        let q = Integer::from(&bu[2] / &g);
        let c1 = icomb(&x, &u[1], &y, &u[2]);
        let c2 = icomb(&p, &u[2], &Integer::from(-&q), &u[1]);
        Some(TwoFormSolver { h11, h21: bu[0].clone(), h22: g, u: [u[0].clone(), c1, c2] })
    }

    /// Some integer solution, or `None` if `(x, y)` is not in the image.
    pub fn solve(&self, x: &Integer, y: &Integer) -> Option<IVec3> {
        if !x.is_divisible(&self.h11) {
            return None;
        }
        let y1 = Integer::from(x / &self.h11);
        let rem = y - Integer::from(&self.h21 * &y1);
        if !rem.is_divisible(&self.h22) {
            return None;
        }
        let y2 = Integer::from(&rem / &self.h22);
        Some(icomb(&y1, &self.u[0], &y2, &self.u[1]))
    }

    /// Generator of the common kernel line.
    pub fn kernel(&self) -> &IVec3 {
        &self.u[2]
    }
}

/// Invariant factors `d1 | d2 | d3` of an integer 3×3 matrix via
/// determinantal divisors.
pub fn invariant_factors(m: &IMat3) -> [Integer; 3] {
    let mut g1 = Integer::new();
    for row in m {
        for x in row {
            g1.gcd_mut(x);
        }
    }
    let mut g2 = Integer::new();
    for r in [(0, 1), (0, 2), (1, 2)] {
        for c in [(0, 1), (0, 2), (1, 2)] {
            let minor = Integer::from(&m[r.0][c.0] * &m[r.1][c.1]) - Integer::from(&m[r.0][c.1] * &m[r.1][c.0]);
            g2.gcd_mut(&minor);
        }
    }
    let g3 = idet3(m).abs();
    let d1 = g1.clone();
    let d2 = if g1 == 0 { Integer::new() } else { Integer::from(&g2 / &g1) };
    let d3 = if g2 == 0 { Integer::new() } else { Integer::from(&g3 / &g2) };
    [d1, d2, d3]
}

/// Exact integral LLL reduction (δ = num/den) of the rows of `b`, in place.
/// Rows must be linearly independent.
pub fn lll_reduce(b: &mut [Vec<Integer>], delta_num: i64, delta_den: i64) {
    let n = b.len();
    if n <= 1 {
        return;
    }
    let dot = |x: &[Integer], y: &[Integer]| -> Integer {
        let mut s = Integer::new();
        for (p, q) in x.iter().zip(y) {
            s += Integer::from(p * q);
        }
        s
    };
    // d[i] = product of |b*_j|^2 for j < i, scaled; lambda[i][j] integers
    let mut d = vec![Integer::new(); n + 1];
    let mut lam = vec![vec![Integer::new(); n]; n];
    d[0] = Integer::from(1);
    for i in 0..n {
        for j in 0..=i {
            let mut u = dot(&b[i], &b[j]);
            for k in 0..j {
                u = Integer::from(&d[k + 1] * &u) - Integer::from(&lam[i][k] * &lam[j][k]);
                u /= &d[k];
            }
            if j < i {
                lam[i][j] = u;
            } else {
                assert!(u != 0, "LLL input rows are dependent");
                d[i + 1] = u;
            }
        }
    }
    let red = |b: &mut [Vec<Integer>], lam: &mut Vec<Vec<Integer>>, d: &Vec<Integer>, k: usize, l: usize| {
        let two = Integer::from(2 * &lam[k][l]);
        if two.clone().abs() > d[l + 1] {
            // q = round(lam/d)
            let q = Integer::from(2 * &lam[k][l] + &d[l + 1]).div_rem_floor(Integer::from(2 * &d[l + 1])).0;
            let bl = b[l].clone();
            for (x, y) in b[k].iter_mut().zip(&bl) {
                *x -= Integer::from(&q * y);
            }
            lam[k][l] -= Integer::from(&q * &d[l + 1]);
            for i in 0..l {
                let t = Integer::from(&q * &lam[l][i]);
                lam[k][i] -= t;
            }
        }
    };
    let mut k = 1;
    while k < n {
        red(b, &mut lam, &d, k, k - 1);
        // Lovász: den*d[k+1]*d[k-1] >= (num*d[k]^2 - den*lam^2)
        let lhs = Integer::from(&d[k + 1] * &d[k - 1]) * delta_den;
        let rhs = Integer::from(&d[k] * &d[k]) * delta_num - Integer::from(&lam[k][k - 1] * &lam[k][k - 1]) * delta_den;
        if lhs < rhs {
            b.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = lam[k][j].clone();
                lam[k][j] = lam[k - 1][j].clone();
                lam[k - 1][j] = t;
            }
            let lm = lam[k][k - 1].clone();
            let nb = (Integer::from(&d[k - 1] * &d[k + 1]) + Integer::from(&lm * &lm)) / &d[k];
            for i in k + 1..n {
                let t = lam[i][k].clone();
                let new_k = (Integer::from(&d[k + 1] * &lam[i][k - 1]) - Integer::from(&lm * &t)) / &d[k];
                let new_km1 = (Integer::from(&nb * &t) + Integer::from(&lm * &new_k)) / &d[k + 1];
                lam[i][k] = new_k;
                lam[i][k - 1] = new_km1;
            }
            d[k] = nb;
            if k > 1 {
                k -= 1;
            }
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                red(b, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_is_canonical() {
        let rows = vec![ivec(3, 0, 0), ivec(1, 1, 0), ivec(0, 1, 1), ivec(6, 2, 2)];
        let h = hnf_rows(&rows).unwrap();
        let mut shuffled = rows.clone();
        shuffled.reverse();
        shuffled.push(ivec(4, 1, 0));
        assert_eq!(hnf_rows(&shuffled).unwrap(), h);
        assert_eq!(h[0][0], 1);
        assert_eq!(idet3(&h).abs(), 3);
        assert!(hnf_rows(&[ivec(1, 2, 3), ivec(2, 4, 6)]).is_none());
    }

    #[test]
    fn completion_and_kernel() {
        let a = ivec(6, 10, 15);
        let (g, u) = unimodular_completion(&a);
        assert_eq!(g, 1);
        assert_eq!(idot(&a, &u[0]), 1);
        assert_eq!(idot(&a, &u[1]), 0);
        assert_eq!(idot(&a, &u[2]), 0);
        let m: IMat3 = std::array::from_fn(|i| std::array::from_fn(|j| u[j][i].clone()));
        assert_eq!(idet3(&m).abs(), 1);
    }

    #[test]
    fn two_form_solver() {
        let a = ivec(4, 6, 1);
        let b = ivec(2, -3, 5);
        let s = TwoFormSolver::new(&a, &b).unwrap();
        for x in -5..5 {
            for y in -5..5 {
                if let Some(c) = s.solve(&Integer::from(x), &Integer::from(y)) {
                    assert_eq!(idot(&a, &c), x);
                    assert_eq!(idot(&b, &c), y);
                }
            }
        }
        assert_eq!(idot(&a, s.kernel()), 0);
        assert_eq!(idot(&b, s.kernel()), 0);
        assert_eq!(gcd3(s.kernel()), 1);
    }

    #[test]
    fn inverse_and_factors() {
        let m: QMat3 = [
            [Rational::from(2), Rational::from(1), Rational::from(0)],
            [Rational::from(0), Rational::from(3), Rational::from(1)],
            [Rational::from(1), Rational::from(0), Rational::from(5)],
        ];
        let inv = qinv3(&m);
        let id = qmatmul(&m, &inv);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(id[i][j], Rational::from((i == j) as i32));
            }
        }
        let t: IMat3 = [ivec(2, 0, 0), ivec(0, 6, 0), ivec(0, 0, 15)];
        assert_eq!(invariant_factors(&t), [Integer::from(1), Integer::from(6), Integer::from(30)]);
    }

    #[test]
    fn lll_small() {
        let mut b = vec![
            vec![Integer::from(1), Integer::from(1), Integer::from(1)],
            vec![Integer::from(-1), Integer::from(0), Integer::from(2)],
            vec![Integer::from(3), Integer::from(5), Integer::from(6)],
        ];
        lll_reduce(&mut b, 99, 100);
        let m: IMat3 = std::array::from_fn(|i| std::array::from_fn(|j| b[i][j].clone()));
        assert_eq!(idet3(&m).abs(), 3);
        let norms: Vec<Integer> = b.iter().map(|r| r.iter().map(|x| Integer::from(x * x)).sum()).collect();
        assert!(norms[0] <= 3);
    }
}
