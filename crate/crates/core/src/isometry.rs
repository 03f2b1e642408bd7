//! Euclidean frames, exact isometries and the metric `d_O` on `Isom(E^n)`.
//!
//! Points and maps are expressed in the coordinates of a [`Frame`], whose
//! rational Gram matrix fixes the inner product. Group arithmetic is exact;
//! only distances, operator norms and square roots of orthogonal maps are
//! evaluated in floating point, through the frame's Cholesky embedding.

use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Point, QMatrix, QVector, Rational};

/// Tolerance for the Cholesky embedding check.
pub const EMBED_TOL: f64 = 1e-12;
/// Absolute accuracy promised by floating point metric evaluations.
pub const METRIC_TOL: f64 = 1e-9;

/// Coordinates of `E^n` with inner product `⟨u, v⟩ = uᵀ G v`.
#[derive(Clone, Debug)]
pub struct Frame {
    gram: QMatrix,
    /// Upper-triangular `C` with `CᵀC = G`; maps frame coordinates to Cartesian ones.
    embed: DMatrix<f64>,
    embed_inv: DMatrix<f64>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for Frame {}

impl Frame {
    pub fn new(gram: QMatrix) -> Result<Self> {
        if !gram.is_square() || gram.rows() == 0 {
            return Err(Error::InvalidGram("gram matrix must be square and nonempty".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::InvalidGram("gram matrix is not symmetric".into()));
        }
        if let Some(k) = gram.leading_minors().iter().position(|m| !m.is_positive()) {
            return Err(Error::InvalidGram(format!("leading principal minor {} is not positive", k + 1)));
        }
        let g = gram.to_nalgebra();
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidGram("floating Cholesky factorization failed".into()))?;
        let embed = chol.l().transpose();
        let err = (&embed.transpose() * &embed - &g).amax();
        if err > EMBED_TOL * (1.0 + g.amax()) {
            return Err(Error::InvalidGram(format!("embedding residual {err:e} too large")));
        }
        let embed_inv = embed
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidGram("embedding is singular".into()))?;
        Ok(Frame { gram, embed, embed_inv })
    }

    /// Orthonormal coordinates, `G = 1`.
    pub fn standard(n: usize) -> Self {
        Frame::new(QMatrix::identity(n)).expect("identity gram is valid")
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    pub fn embed(&self) -> &DMatrix<f64> {
        &self.embed
    }

    pub fn inner(&self, u: &QVector, v: &QVector) -> Rational {
        self.gram.bilinear(u, v)
    }

    pub fn sq_norm(&self, v: &QVector) -> Rational {
        self.gram.quad(v)
    }

    pub fn sq_dist(&self, a: &Point, b: &Point) -> Rational {
        self.sq_norm(&(a - b))
    }

    pub fn norm(&self, v: &QVector) -> f64 {
        to_f64(&self.sq_norm(v)).max(0.0).sqrt()
    }

    pub fn cartesian(&self, v: &QVector) -> DVector<f64> {
        &self.embed * v.to_nalgebra()
    }

    /// Cartesian matrix `C L C⁻¹` of a linear map given in frame coordinates.
    pub fn cartesian_linear(&self, l: &QMatrix) -> DMatrix<f64> {
        &self.embed * l.to_nalgebra() * &self.embed_inv
    }

    /// Frame matrix `C⁻¹ A C` of a Cartesian linear map.
    pub fn frame_linear(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        &self.embed_inv * a * &self.embed
    }

    /// `Lᵀ G L = G`, exactly.
    pub fn is_gram_orthogonal(&self, l: &QMatrix) -> bool {
        l.rows() == self.dim() && l.is_square() && &(&l.transpose() * &self.gram) * l == self.gram
    }

    /// Verifies that an affine map is an isometry of this frame.
    pub fn check_isometry(&self, iso: &Isometry) -> Result<()> {
        if iso.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: iso.dim() });
        }
        if !self.is_gram_orthogonal(&iso.linear) {
            return Err(Error::NotAnIsometry(format!("linear part {} is not Gram-orthogonal", iso.linear)));
        }
        Ok(())
    }
}

/// Affine map `x ↦ L x + t` in frame coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Isometry {
    linear: QMatrix,
    translation: QVector,
}

impl Isometry {
    /// Builds the map after checking Gram-orthogonality in `frame`.
    pub fn new(frame: &Frame, linear: QMatrix, translation: QVector) -> Result<Self> {
        let iso = Self::from_parts(linear, translation);
        frame.check_isometry(&iso)?;
        Ok(iso)
    }

    /// Builds the map without an orthogonality check.
    pub fn from_parts(linear: QMatrix, translation: QVector) -> Self {
        assert!(linear.is_square() && linear.rows() == translation.dim(), "inconsistent isometry parts");
        Isometry { linear, translation }
    }

    pub fn identity(n: usize) -> Self {
        Isometry { linear: QMatrix::identity(n), translation: QVector::zeros(n) }
    }

    pub fn translation_by(v: QVector) -> Self {
        Isometry { linear: QMatrix::identity(v.dim()), translation: v }
    }

    pub fn linear_map(l: QMatrix) -> Self {
        let n = l.rows();
        Isometry { linear: l, translation: QVector::zeros(n) }
    }

    /// Linear map `L` applied about `center`: `x ↦ L (x - c) + c`.
    pub fn about_point(l: QMatrix, center: &Point) -> Self {
        let t = center - &l.mul_vec(center);
        Isometry { linear: l, translation: t }
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn linear(&self) -> &QMatrix {
        &self.linear
    }

    pub fn translation(&self) -> &QVector {
        &self.translation
    }

    pub fn into_parts(self) -> (QMatrix, QVector) {
        (self.linear, self.translation)
    }

    pub fn apply(&self, x: &Point) -> Point {
        &self.linear.mul_vec(x) + &self.translation
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_identity() && self.translation.is_zero()
    }

    pub fn is_translation(&self) -> bool {
        self.linear.is_identity()
    }

    pub fn det(&self) -> Rational {
        self.linear.det()
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, other: &Isometry) -> Isometry {
        Isometry {
            linear: &self.linear * &other.linear,
            translation: &self.linear.mul_vec(&other.translation) + &self.translation,
        }
    }

    pub fn inverse(&self) -> Isometry {
        let inv = self.linear.inverse().expect("isometry linear part is invertible");
        let t = -&inv.mul_vec(&self.translation);
        Isometry { linear: inv, translation: t }
    }

    /// `self · g · self⁻¹`.
    pub fn conjugate(&self, g: &Isometry) -> Isometry {
        &(self * g) * &self.inverse()
    }

    /// Unique factorization `τ_O · α_O` with `α_O` fixing `origin`.
    pub fn decompose(&self, origin: &Point) -> IsoDecomposition {
        IsoDecomposition {
            origin: origin.clone(),
            trans_part: &self.apply(origin) - origin,
            ortho_part: self.linear.clone(),
        }
    }
}

impl Mul for &Isometry {
    type Output = Isometry;

    /// Composition; panics on dimension mismatch (see [`Isometry::compose`]).
    fn mul(self, rhs: &Isometry) -> Isometry {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in isometry product");
        self.compose_unchecked(rhs)
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.linear, self.translation)
    }
}

/// `φ = τ_O · α_O`: a translation after an orthogonal map about `origin`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoDecomposition {
    pub origin: Point,
    /// Vector of `τ_O`, equal to `φ(O) - O`.
    pub trans_part: QVector,
    /// Matrix of `α_O` on `E^n_O` (frame coordinates relative to `O`).
    pub ortho_part: QMatrix,
}

impl IsoDecomposition {
    pub fn translation(&self) -> Isometry {
        Isometry::translation_by(self.trans_part.clone())
    }

    pub fn orthogonal(&self) -> Isometry {
        Isometry::about_point(self.ortho_part.clone(), &self.origin)
    }

    pub fn recompose(&self) -> Isometry {
        &self.translation() * &self.orthogonal()
    }
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    let ata = m.transpose() * m;
    let eig = SymmetricEigen::new(ata);
    eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max).max(0.0).sqrt()
}

/// `‖L_a - L_b‖_op` measured in the frame's Euclidean structure.
pub fn linear_distance(frame: &Frame, a: &QMatrix, b: &QMatrix) -> f64 {
    operator_norm(&frame.cartesian_linear(&(a - b)))
}

/// `d_O(a, b) = ‖τ_a - τ_b‖ + ‖α_a - α_b‖_op` for the decompositions about `origin`.
pub fn iso_distance(frame: &Frame, origin: &Point, a: &Isometry, b: &Isometry) -> Result<f64> {
    let n = frame.dim();
    for d in [origin.dim(), a.dim(), b.dim()] {
        if d != n {
            return Err(Error::FrameMismatch(format!("frame has dimension {n}, argument has {d}")));
        }
    }
    if a == b {
        return Ok(0.0);
    }
    let dt = &a.apply(origin) - &b.apply(origin);
    Ok(frame.norm(&dt) + linear_distance(frame, &a.linear, &b.linear))
}

/// `d_O(a, 1)`.
pub fn iso_size(frame: &Frame, origin: &Point, a: &Isometry) -> Result<f64> {
    iso_distance(frame, origin, a, &Isometry::identity(frame.dim()))
}

/// Square of the translation part of `d_O(a, 1)` for a pure translation, exactly.
pub fn translation_sq_size(frame: &Frame, a: &Isometry) -> Option<Rational> {
    a.is_translation().then(|| frame.sq_norm(a.translation()))
}

/// Orthogonal square root `β` of a Cartesian orthogonal matrix `α` with
/// `‖α - 1‖_op ≤ 1`, obtained by halving the rotation angles of the real
/// Schur blocks.
pub fn ortho_sqrt(alpha: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = alpha.nrows();
    if alpha.ncols() != n {
        return Err(Error::Precondition("matrix is not square".into()));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let orth_err = (alpha.transpose() * alpha - &id).amax();
    if orth_err > METRIC_TOL {
        return Err(Error::Precondition(format!("matrix is not orthogonal (residual {orth_err:e})")));
    }
    let dist = operator_norm(&(alpha - &id));
    if dist > 1.0 + METRIC_TOL {
        return Err(Error::Precondition(format!("‖α - 1‖_op = {dist} exceeds 1")));
    }

    let schur = Schur::try_new(alpha.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Precondition("Schur decomposition did not converge".into()))?;
    let (qm, t) = schur.unpack();
    let mut b = DMatrix::<f64>::zeros(n, n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].abs() > 1e-12 {
            let theta = t[(i + 1, i)].atan2(t[(i, i)]);
            let (s, c) = (theta / 2.0).sin_cos();
            b[(i, i)] = c;
            b[(i, i + 1)] = -s;
            b[(i + 1, i)] = s;
            b[(i + 1, i + 1)] = c;
            i += 2;
        } else {
            if t[(i, i)] < 0.0 {
                return Err(Error::Precondition("orthogonal map has a (-1) block".into()));
            }
            b[(i, i)] = 1.0;
            i += 1;
        }
    }
    Ok(&qm * b * qm.transpose())
}

/// Cartesian matrix of an exact linear part, for [`ortho_sqrt`].
pub fn cartesian_orthogonal(frame: &Frame, iso: &Isometry) -> DMatrix<f64> {
    frame.cartesian_linear(iso.linear())
}

/// `det L ∈ {±1}` check helper.
pub fn has_unit_determinant(l: &QMatrix) -> bool {
    l.det().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn rot90() -> QMatrix {
        QMatrix::from_int_rows(&[vec![0, -1], vec![1, 0]])
    }

    #[test]
    fn conjugating_translation_by_rotation() {
        let a = Isometry::linear_map(rot90());
        let b = Isometry::translation_by(QVector::from_ints(&[1, 0]));
        let c = a.conjugate(&b);
        assert_eq!(c, Isometry::translation_by(QVector::from_ints(&[0, 1])));
    }

    #[test]
    fn translations_add() {
        let a = Isometry::translation_by(QVector::from_ints(&[1, 2]));
        let b = Isometry::translation_by(QVector::from_ints(&[3, 4]));
        assert_eq!(a.compose(&b).unwrap(), Isometry::translation_by(QVector::from_ints(&[4, 6])));
        assert_eq!(Isometry::identity(2).compose(&b).unwrap(), b);
    }

    #[test]
    fn inverse_examples() {
        let t = Isometry::translation_by(QVector::from_ints(&[1, 0]));
        assert_eq!(t.inverse(), Isometry::translation_by(QVector::from_ints(&[-1, 0])));
        let r = Isometry::linear_map(rot90());
        assert_eq!(r.inverse(), Isometry::linear_map(QMatrix::from_int_rows(&[vec![0, 1], vec![-1, 0]])));
        let glide = Isometry::from_parts(
            QMatrix::from_int_rows(&[vec![1, 0], vec![0, -1]]),
            QVector::from_fracs(&[(1, 2), (0, 1)]),
        );
        assert!((&glide * &glide.inverse()).is_identity());
        assert!((&glide.inverse() * &glide).is_identity());
    }

    #[test]
    fn decompose_half_turn() {
        let center = QVector::from_fracs(&[(1, 2), (1, 2)]);
        let a = Isometry::about_point(QMatrix::identity(2).scale(&q(-1)), &center);
        let d = a.decompose(&QVector::zeros(2));
        assert_eq!(d.trans_part, QVector::from_ints(&[1, 1]));
        assert_eq!(d.ortho_part, QMatrix::identity(2).scale(&q(-1)));
        assert_eq!(d.recompose(), a);

        let d = Isometry::identity(2).decompose(&center);
        assert!(d.trans_part.is_zero() && d.ortho_part.is_identity());

        let v = QVector::from_fracs(&[(3, 7), (-1, 2)]);
        let d = Isometry::translation_by(v.clone()).decompose(&center);
        assert_eq!(d.trans_part, v);
        assert!(d.ortho_part.is_identity());
    }

    #[test]
    fn distance_examples() {
        let f = Frame::standard(2);
        let o = QVector::zeros(2);
        let r = Isometry::linear_map(rot90());
        let id = Isometry::identity(2);
        assert_eq!(iso_distance(&f, &o, &r, &r).unwrap(), 0.0);
        let d = iso_distance(&f, &o, &r, &id).unwrap();
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-12);
        let t = Isometry::translation_by(QVector::from_ints(&[3, 4]));
        assert!((iso_distance(&f, &o, &t, &id).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn frame_rejects_indefinite_gram() {
        let g = QMatrix::from_int_rows(&[vec![1, 2], vec![2, 1]]);
        assert!(Frame::new(g).is_err());
        let g = QMatrix::from_rows(vec![vec![q(1), qf(1, 2)], vec![qf(1, 3), q(1)]]);
        assert!(Frame::new(g).is_err());
    }

    #[test]
    fn hexagonal_rotation_is_gram_orthogonal() {
        let g = QMatrix::from_rows(vec![vec![q(1), qf(-1, 2)], vec![qf(-1, 2), q(1)]]);
        let f = Frame::new(g).unwrap();
        let r3 = QMatrix::from_int_rows(&[vec![0, -1], vec![1, -1]]);
        assert!(f.is_gram_orthogonal(&r3));
        let c = f.cartesian_linear(&r3);
        assert!((operator_norm(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_root_of_sixth_turn() {
        let (s, c) = (std::f64::consts::FRAC_PI_3).sin_cos();
        let a = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let b = ortho_sqrt(&a).unwrap();
        let (s2, c2) = (std::f64::consts::FRAC_PI_6).sin_cos();
        let expected = DMatrix::from_row_slice(2, 2, &[c2, -s2, s2, c2]);
        assert!((&b - expected).amax() < 1e-12);
        assert!(ortho_sqrt(&DMatrix::identity(3, 3)).unwrap().is_identity(1e-12));
        let quarter = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(ortho_sqrt(&quarter).is_err());
    }

    #[test]
    fn square_root_rejects_half_turn() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        assert!(ortho_sqrt(&a).is_err());
        let refl = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(ortho_sqrt(&refl).is_err());
    }
}
