//! Exact rational scalars, vectors and small dense matrices.
//!
//! Everything in the group and polytope layers is computed over
//! [`Rational`] (arbitrary precision), so equality tests are exact.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den` as a rational.
pub fn qf(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"-p/q"` or a plain integer string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() || t.contains('.') || t.contains('e') || t.contains('E') {
        return Err(Error::Parse(format!("not a rational literal: {s:?}")));
    }
    let r = Rational::from_str(t).map_err(|_| Error::Parse(format!("not a rational literal: {s:?}")))?;
    if let Some((_, den)) = t.split_once('/') {
        if den.trim().parse::<BigInt>().map(|d| d.is_zero()).unwrap_or(true) {
            return Err(Error::Parse(format!("zero or malformed denominator: {s:?}")));
        }
    }
    Ok(r)
}

/// Canonical text form: `"n"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: go through the ratio of scaled parts.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Closest rational with denominator `den` at or below `x`.
pub fn rational_below(x: f64, den: i64) -> Rational {
    let n = (x * den as f64).floor();
    Rational::new(BigInt::from(n as i128), BigInt::from(den))
}

/// Floor of a nonnegative rational square root, as an upper bound helper:
/// returns an integer `k` with `k >= sqrt(r)`.
pub fn sqrt_ceil_bound(r: &Rational) -> i64 {
    let f = to_f64(r).max(0.0).sqrt();
    let mut k = f.ceil() as i64 + 1;
    // Guard against float error: grow until k^2 >= r exactly.
    while q(k) * q(k) < *r {
        k += 1;
    }
    k
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QVector(Vec<Rational>);

/// Points of `E^n` in frame coordinates.
pub type Point = QVector;

impl QVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        QVector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        QVector(vec![Rational::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        QVector(v.iter().map(|&x| q(x)).collect())
    }

    pub fn from_fracs(v: &[(i64, i64)]) -> Self {
        QVector(v.iter().map(|&(n, d)| qf(n, d)).collect())
    }

    pub fn from_bigints(v: &[BigInt]) -> Self {
        QVector(v.iter().map(|x| Rational::from_integer(x.clone())).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn dot(&self, other: &QVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, s: &Rational) -> QVector {
        QVector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    /// Componentwise floor.
    pub fn floor(&self) -> QVector {
        QVector(self.0.iter().map(|x| x.floor()).collect())
    }

    /// Componentwise reduction into `[0, 1)`.
    pub fn frac(&self) -> QVector {
        QVector(self.0.iter().map(frac).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn to_nalgebra(&self) -> DVector<f64> {
        DVector::from_vec(self.to_f64())
    }
}

impl From<Vec<Rational>> for QVector {
    fn from(v: Vec<Rational>) -> Self {
        QVector(v)
    }
}

impl Index<usize> for QVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for QVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl Add for &QVector {
    type Output = QVector;
    fn add(self, rhs: &QVector) -> QVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        QVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &QVector {
    type Output = QVector;
    fn sub(self, rhs: &QVector) -> QVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        QVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &QVector {
    type Output = QVector;
    fn neg(self) -> QVector {
        QVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[QVector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, QVector::dim);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..r {
                m[(i, j)] = col[i].clone();
            }
        }
        m
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> QVector {
        QVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> QVector {
        QVector((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).into_inner()).collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &QVector) -> QVector {
        assert_eq!(self.cols, v.dim(), "dimension mismatch in matrix-vector product");
        QVector(
            (0..self.rows)
                .map(|i| {
                    (0..self.cols).fold(Rational::zero(), |acc, j| acc + &self[(i, j)] * &v[j])
                })
                .collect(),
        )
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: &QVector, v: &QVector) -> Rational {
        u.dot(&self.mul_vec(v))
    }

    /// `vᵀ M v`.
    pub fn quad(&self, v: &QVector) -> Rational {
        self.bilinear(v, v)
    }

    pub fn scale(&self, s: &Rational) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self[(i, j)].is_one() } else { self[(i, j)].is_zero() })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    /// Determinant by fraction-free elimination over the rationals.
    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det *= &pivot;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &pivot;
                for c in col..n {
                    let v = &a[(col, c)] * &f;
                    a[(r, c)] -= v;
                }
            }
        }
        det
    }

    /// Leading principal minors, top-left 1x1 up to the full matrix.
    pub fn leading_minors(&self) -> Vec<Rational> {
        (1..=self.rows).map(|k| self.submatrix(0..k, 0..k).det()).collect()
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> QMatrix {
        QMatrix::from_rows(rows.map(|i| cols.clone().map(|j| self[(i, j)].clone()).collect()).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(p, row);
            let inv = self[(row, col)].recip();
            for c in col..self.cols {
                let v = &self[(row, c)] * &inv;
                self[(row, c)] = v;
            }
            for r in 0..self.rows {
                if r != row && !self[(r, col)].is_zero() {
                    let f = self[(r, col)].clone();
                    for c in col..self.cols {
                        let v = &self[(row, c)] * &f;
                        self[(r, c)] -= v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right null space.
    pub fn kernel(&self) -> Vec<QVector> {
        let mut r = self.clone();
        let pivots = r.rref();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![Rational::zero(); self.cols];
                v[free] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, free)].clone();
                }
                QVector::new(v)
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(aug.submatrix(0..n, n..2 * n))
    }

    /// Unique solution of `self · x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &QVector) -> Option<QVector> {
        assert_eq!(self.rows, b.dim());
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(aug.column(n))
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(&self[(i, j)]))
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * &rhs[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = (0..self.cols).map(|j| format_rational(&self[(i, j)])).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Sign of a rational as -1, 0, 1.
pub fn sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), qf(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), q(-7));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!(format_rational(&qf(-2, 4)), "-1/2");
        assert_eq!(format_rational(&q(5)), "5");
    }

    #[test]
    fn inverse_and_det() {
        let m = QMatrix::from_int_rows(&[vec![2, 1], vec![7, 4]]);
        assert_eq!(m.det(), q(1));
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        let singular = QMatrix::from_int_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.rank(), 1);
    }

    #[test]
    fn solve_rational_system() {
        let m = QMatrix::from_int_rows(&[vec![1, 1], vec![1, -1]]);
        let x = m.solve(&QVector::from_ints(&[3, 1])).unwrap();
        assert_eq!(x, QVector::from_ints(&[2, 1]));
    }

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(&qf(-1, 3)), qf(2, 3));
        assert_eq!(frac(&q(4)), q(0));
    }
}
