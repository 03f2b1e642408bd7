//! Integer lattice algorithms: diagonal normal forms, linear congruences,
//! lattice bases from generators, LLL reduction and short-vector search.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{common_denominator, q, to_f64, QMatrix, QVector, Rational};

type IMat = Vec<Vec<BigInt>>;

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Unimodular `p`, `q_` and diagonal `d` with `p · a · q_ = d`.
///
/// The diagonal entries are not normalized into a divisibility chain; only
/// diagonality is needed for solving congruences.
struct Diagonalization {
    p: IMat,
    d: IMat,
    q: IMat,
}

fn diagonalize(a: &IMat, rows: usize, cols: usize) -> Diagonalization {
    let mut d = a.clone();
    let mut p = identity(rows);
    let mut qm = identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // Pivot: smallest nonzero magnitude in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !d[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Diagonalization { p, d, q: qm };
            };
            d.swap(t, pi);
            p.swap(t, pi);
            for row in d.iter_mut() {
                row.swap(t, pj);
            }
            for row in qm.iter_mut() {
                row.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let f = d[i][t].div_floor(&d[t][t]);
                for j in 0..cols {
                    let v = &d[t][j] * &f;
                    d[i][j] -= v;
                }
                for j in 0..rows {
                    let v = &p[t][j] * &f;
                    p[i][j] -= v;
                }
                if !d[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let f = d[t][j].div_floor(&d[t][t]);
                for i in 0..rows {
                    let v = &d[i][t] * &f;
                    d[i][j] -= v;
                }
                for i in 0..cols {
                    let v = &qm[i][t] * &f;
                    qm[i][j] -= v;
                }
                if !d[t][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
    }
    Diagonalization { p, d, q: qm }
}

fn to_int_matrix(a: &QMatrix) -> Option<IMat> {
    if !a.is_integral() {
        return None;
    }
    Some((0..a.rows()).map(|i| (0..a.cols()).map(|j| a[(i, j)].to_integer()).collect()).collect())
}

/// Finds a rational `x` with `a · x ≡ b (mod Z^m)`, where `a` is an integer
/// `m × n` matrix. Returns `None` when the system has no solution.
pub fn solve_congruence(a: &QMatrix, b: &QVector) -> Option<QVector> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(m, b.dim());
    let ai = to_int_matrix(a).expect("congruence matrix must be integral");
    let Diagonalization { p, d, q: qm } = diagonalize(&ai, m, n);

    // c = P b
    let c: Vec<Rational> = (0..m)
        .map(|i| (0..m).fold(Rational::zero(), |acc, j| acc + Rational::from_integer(p[i][j].clone()) * &b[j]))
        .collect();
    let mut y = vec![Rational::zero(); n];
    for i in 0..m {
        let di = if i < n { d[i][i].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !c[i].is_integer() {
                return None;
            }
        } else {
            y[i] = &c[i] / Rational::from_integer(di);
        }
    }
    let x: Vec<Rational> = (0..n)
        .map(|i| (0..n).fold(Rational::zero(), |acc, j| acc + Rational::from_integer(qm[i][j].clone()) * &y[j]))
        .collect();
    Some(QVector::new(x))
}

/// Basis (as matrix columns) of the lattice generated by rational vectors
/// in `Q^n`. The generators must span `Q^n`.
pub fn lattice_basis(generators: &[QVector], n: usize) -> Option<QMatrix> {
    let den = common_denominator(generators.iter().flat_map(|g| g.iter()));
    let den_q = Rational::from_integer(den.clone());
    let mut rows: IMat = generators
        .iter()
        .map(|g| g.iter().map(|x| (x * &den_q).to_integer()).collect())
        .collect();

    // Row-style Hermite reduction.
    let mut basis: IMat = Vec::new();
    for col in 0..n {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| rows[r][col].abs()).unwrap();
            for &r in &nz {
                if r == piv {
                    continue;
                }
                let f = rows[r][col].div_floor(&rows[piv][col]);
                for c in 0..n {
                    let v = &rows[piv][c] * &f;
                    rows[r][c] -= v;
                }
            }
        }
        let Some(idx) = rows.iter().position(|r| !r[col].is_zero()) else {
            return None;
        };
        let mut row = rows.swap_remove(idx);
        if row[col].is_negative() {
            row.iter_mut().for_each(|x| *x = -x.clone());
        }
        basis.push(row);
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    let cols: Vec<QVector> = basis
        .into_iter()
        .map(|r| QVector::new(r.into_iter().map(|x| Rational::new(x, den.clone())).collect()))
        .collect();
    Some(QMatrix::from_columns(&cols))
}

/// LLL-reduces the columns of `basis` with respect to the inner product
/// `⟨u, v⟩ = uᵀ gram v` (`δ = 3/4`), exactly.
pub fn lll_reduce(basis: &QMatrix, gram: &QMatrix) -> QMatrix {
    let n = basis.cols();
    let mut b: Vec<QVector> = (0..n).map(|j| basis.column(j)).collect();
    let ip = |u: &QVector, v: &QVector| gram.bilinear(u, v);
    let delta = Rational::new(BigInt::from(3), BigInt::from(4));

    let gso = |b: &[QVector]| -> (Vec<QVector>, Vec<Vec<Rational>>, Vec<Rational>) {
        let mut bs: Vec<QVector> = Vec::with_capacity(b.len());
        let mut mu = vec![vec![Rational::zero(); b.len()]; b.len()];
        let mut norms = Vec::with_capacity(b.len());
        for i in 0..b.len() {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = ip(&b[i], &bs[j]) / &norms[j];
                v = &v - &bs[j].scale(&mu[i][j]);
            }
            norms.push(ip(&v, &v));
            bs.push(v);
        }
        (bs, mu, norms)
    };

    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (_, mu, _) = gso(&b);
            let r = mu[k][j].round();
            if !r.is_zero() {
                b[k] = &b[k] - &b[j].scale(&r);
            }
        }
        let (_, mu, norms) = gso(&b);
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    QMatrix::from_columns(&b)
}

/// All integer vectors `k` with `(k - center)ᵀ gram (k - center) ≤ r2`.
///
/// The search box uses `|w_i|² ≤ r2 · (gram⁻¹)_ii` (Cauchy–Schwarz in the
/// dual norm), widened by one unit; every candidate is then checked exactly.
pub fn integer_points_in_ellipsoid(gram: &QMatrix, center: &QVector, r2: &Rational) -> Vec<QVector> {
    let n = gram.rows();
    if r2.is_negative() {
        return Vec::new();
    }
    let ginv = gram.inverse().expect("gram matrix must be invertible");
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let s = (to_f64(&(r2 * &ginv[(i, i)]))).max(0.0).sqrt();
            let c = to_f64(&center[i]);
            ((c - s).floor() as i64 - 1, (c + s).ceil() as i64 + 1)
        })
        .collect();
    let fgram = gram.to_nalgebra();
    let fcenter = center.to_f64();
    let fr2 = to_f64(r2);
    let slack = 1e-9 * (1.0 + fr2) + 1e-9 * fgram.amax() * (1.0 + fcenter.iter().fold(0.0f64, |m, c| m.max(c.abs()))).powi(2);
    let mut out = Vec::new();
    let mut cur = vec![0i64; ranges.len()];
    let mut visit = |k: &[i64]| {
        let w: Vec<f64> = k.iter().zip(&fcenter).map(|(a, c)| *a as f64 - c).collect();
        let fq: f64 = (0..n).map(|i| (0..n).map(|j| w[i] * fgram[(i, j)] * w[j]).sum::<f64>()).sum();
        if fq > fr2 + slack {
            return;
        }
        let v = QVector::from_ints(k);
        if gram.quad(&(&v - center)) <= *r2 {
            out.push(v);
        }
    };
    fn rec(i: usize, ranges: &[(i64, i64)], cur: &mut Vec<i64>, visit: &mut dyn FnMut(&[i64])) {
        if i == ranges.len() {
            visit(cur);
            return;
        }
        for v in ranges[i].0..=ranges[i].1 {
            cur[i] = v;
            rec(i + 1, ranges, cur, visit);
        }
    }
    rec(0, &ranges, &mut cur, &mut visit);
    out
}

/// Integer vectors of exact squared norm `norm` under `gram`.
pub fn vectors_of_norm(gram: &QMatrix, norm: &Rational) -> Vec<QVector> {
    let zero = QVector::zeros(gram.rows());
    integer_points_in_ellipsoid(gram, &zero, norm)
        .into_iter()
        .filter(|v| gram.quad(v) == *norm)
        .collect()
}

/// All integer matrices `U` with `Uᵀ · to · U = from`.
///
/// Such `U` are automatically unimodular when `det from = det to`; for
/// different determinants the result is empty. Column `j` of `U` must have
/// squared norm `from_jj` under `to`, so the search is a backtracking over
/// short vectors with the off-diagonal Gram products as constraints.
pub fn lattice_isometries(from: &QMatrix, to: &QMatrix) -> Vec<QMatrix> {
    let n = from.rows();
    assert_eq!(n, to.rows());
    if from.det() != to.det() {
        return Vec::new();
    }
    let candidates: Vec<Vec<QVector>> = (0..n).map(|j| vectors_of_norm(to, &from[(j, j)])).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<QVector> = Vec::with_capacity(n);
    fn rec(
        j: usize,
        candidates: &[Vec<QVector>],
        chosen: &mut Vec<QVector>,
        out: &mut Vec<QMatrix>,
        from: &QMatrix,
        to: &QMatrix,
    ) {
        if j == candidates.len() {
            let u = QMatrix::from_columns(chosen);
            if u.det().abs() == Rational::one() {
                out.push(u);
            }
            return;
        }
        for c in &candidates[j] {
            if chosen.iter().enumerate().all(|(i, u)| to.bilinear(u, c) == from[(i, j)]) {
                chosen.push(c.clone());
                rec(j + 1, candidates, chosen, out, from, to);
                chosen.pop();
            }
        }
    }
    rec(0, &candidates, &mut chosen, &mut out, from, to);
    out.sort();
    out
}

pub fn is_unimodular(m: &QMatrix) -> bool {
    m.is_square() && m.is_integral() && m.det().abs() == Rational::one()
}

/// Whether the column bases `a` and `b` span the same lattice.
pub fn same_lattice(a: &QMatrix, b: &QMatrix) -> bool {
    match a.inverse() {
        Some(ainv) => is_unimodular(&(&ainv * b)),
        None => false,
    }
}

/// Gram matrix of a basis: `Bᵀ G B`.
pub fn basis_gram(gram: &QMatrix, basis: &QMatrix) -> QMatrix {
    &(&basis.transpose() * gram) * basis
}

/// Index `[sup : sub]` of lattices given by column bases, if `sub ⊆ sup`.
pub fn sublattice_index(sub: &QMatrix, sup: &QMatrix) -> Option<BigInt> {
    let t = &sup.inverse()? * sub;
    if !t.is_integral() {
        return None;
    }
    Some(t.det().abs().to_integer())
}

pub fn int_vector(v: &[i64]) -> QVector {
    QVector::new(v.iter().map(|&x| q(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn congruence_with_half_translation_has_no_solution() {
        // (M - 1) c ≡ -v with M = diag(-1, 1), v = (0, 1/2): second row 0 ≡ -1/2.
        let a = QMatrix::from_int_rows(&[vec![-2, 0], vec![0, 0]]);
        let b = QVector::from_fracs(&[(0, 1), (-1, 2)]);
        assert!(solve_congruence(&a, &b).is_none());
    }

    #[test]
    fn congruence_solution_satisfies_system() {
        let a = QMatrix::from_int_rows(&[vec![2, 1], vec![0, 3], vec![1, 1]]);
        let b = QVector::from_fracs(&[(1, 2), (1, 2), (5, 6)]);
        let x = solve_congruence(&a, &b).unwrap();
        let r = &a.mul_vec(&x) - &b;
        assert!(r.is_integral());
    }

    #[test]
    fn basis_of_half_lattice() {
        let gens = vec![int_vector(&[1, 0]), int_vector(&[0, 1]), QVector::from_fracs(&[(1, 2), (0, 1)]), QVector::from_fracs(&[(0, 1), (1, 2)])];
        let b = lattice_basis(&gens, 2).unwrap();
        assert_eq!(b.det().abs(), qf(1, 4));
        assert!(same_lattice(&b, &QMatrix::identity(2).scale(&qf(1, 2))));
    }

    #[test]
    fn square_lattice_has_eight_isometries() {
        let g = QMatrix::identity(2);
        assert_eq!(lattice_isometries(&g, &g).len(), 8);
        let hex = QMatrix::from_rows(vec![vec![q(1), qf(-1, 2)], vec![qf(-1, 2), q(1)]]);
        assert_eq!(lattice_isometries(&hex, &hex).len(), 12);
        let quarter = g.scale(&qf(1, 4));
        assert!(lattice_isometries(&g, &quarter).is_empty());
    }

    #[test]
    fn ellipsoid_enumeration_matches_brute_force() {
        let g = QMatrix::identity(2);
        let pts = integer_points_in_ellipsoid(&g, &QVector::zeros(2), &q(2));
        assert_eq!(pts.len(), 9);
    }

    #[test]
    fn lll_shortens_skewed_basis() {
        let b = QMatrix::from_int_rows(&[vec![1, 5], vec![0, 1]]);
        let g = QMatrix::identity(2);
        let r = lll_reduce(&b, &g);
        assert!(same_lattice(&r, &b));
        assert_eq!(g.quad(&r.column(1)), q(1));
    }
}
