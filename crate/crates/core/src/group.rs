//! Crystallographic groups stored as a translation lattice plus Seitz
//! coset representatives, with orbit, stabilizer, symmorphy and conjugacy
//! algorithms.
//!
//! A group lives in its own *lattice frame*: the frame basis spans
//! `Γ ∩ Trans`, so the translation subgroup is `Z^n` and every point part
//! is an integer matrix. Groups computed from tilings additionally record
//! the lattice basis in the tiling's coordinates (the *host* frame); for
//! groups defined directly the host and lattice frames coincide.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::isometry::{Frame, Isometry};
use crate::lattice::{
    basis_gram, integer_points_in_ellipsoid, lattice_isometries, same_lattice, solve_congruence,
    sublattice_index,
};
use crate::rational::{q, Point, QMatrix, QVector, Rational};

/// Seitz pair `(M | v)`: point part and fractional translation in `[0, 1)^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeitzOp {
    pub linear: QMatrix,
    pub translation: QVector,
}

impl SeitzOp {
    pub fn new(linear: QMatrix, translation: QVector) -> Self {
        SeitzOp { linear, translation: translation.frac() }
    }

    pub fn identity(n: usize) -> Self {
        SeitzOp { linear: QMatrix::identity(n), translation: QVector::zeros(n) }
    }

    pub fn to_isometry(&self) -> Isometry {
        Isometry::from_parts(self.linear.clone(), self.translation.clone())
    }
}

impl fmt::Display for SeitzOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.linear, self.translation)
    }
}

/// Unvalidated group description, as read from a file.
#[derive(Clone, Debug)]
pub struct RawGroup {
    pub name: Option<String>,
    pub gram: QMatrix,
    pub reps: Vec<(QMatrix, QVector)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DimensionMismatch { rep: usize },
    NonIntegralPointPart { rep: usize },
    NotGramOrthogonal { rep: usize },
    NotUnimodular { rep: usize },
    DuplicatePointPart { first: usize, second: usize },
    MissingIdentity,
    ClosureFailure { left: usize, right: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { rep } => write!(f, "rep {rep}: dimension does not match the gram matrix"),
            Violation::NonIntegralPointPart { rep } => write!(f, "rep {rep}: point part has non-integer entries"),
            Violation::NotGramOrthogonal { rep } => write!(f, "rep {rep}: point part M violates MᵀGM = G"),
            Violation::NotUnimodular { rep } => write!(f, "rep {rep}: point part is not in GL(n, Z)"),
            Violation::DuplicatePointPart { first, second } => {
                write!(f, "reps {first} and {second} share a point part")
            }
            Violation::MissingIdentity => write!(f, "no representative with point part 1 and integer translation"),
            Violation::ClosureFailure { left, right } => {
                write!(f, "product of reps {left} and {right} is not in the group")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CrystalGroup {
    name: Option<String>,
    frame: Frame,
    /// Lattice basis (columns) in host coordinates.
    basis: QMatrix,
    reps: Vec<SeitzOp>,
}

/// Checks the crystallographic invariants and canonicalizes the reps
/// (translations reduced into `[0, 1)^n`, reps sorted).
pub fn validate_group(raw: RawGroup) -> Result<CrystalGroup> {
    let frame = Frame::new(raw.gram.clone())?;
    let n = frame.dim();
    let mut report = ValidationReport::default();

    let mut reps: Vec<SeitzOp> = Vec::with_capacity(raw.reps.len());
    for (i, (m, v)) in raw.reps.iter().enumerate() {
        if m.rows() != n || !m.is_square() || v.dim() != n {
            report.violations.push(Violation::DimensionMismatch { rep: i });
            continue;
        }
        if !m.is_integral() {
            report.violations.push(Violation::NonIntegralPointPart { rep: i });
        }
        if !frame.is_gram_orthogonal(m) {
            report.violations.push(Violation::NotGramOrthogonal { rep: i });
        } else if m.is_integral() && !crate::lattice::is_unimodular(m) {
            report.violations.push(Violation::NotUnimodular { rep: i });
        }
        reps.push(SeitzOp::new(m.clone(), v.clone()));
    }
    if !report.is_valid() {
        return Err(Error::InvalidGroup(report));
    }
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            if reps[i].linear == reps[j].linear {
                report.violations.push(Violation::DuplicatePointPart { first: i, second: j });
            }
        }
    }
    if !reps.iter().any(|r| r.linear.is_identity() && r.translation.is_zero()) {
        report.violations.push(Violation::MissingIdentity);
    }
    for (i, a) in reps.iter().enumerate() {
        for (j, b) in reps.iter().enumerate() {
            let lin = &a.linear * &b.linear;
            let t = (&a.linear.mul_vec(&b.translation) + &a.translation).frac();
            if !reps.iter().any(|r| r.linear == lin && r.translation == t) {
                report.violations.push(Violation::ClosureFailure { left: i, right: j });
            }
        }
    }
    if !report.is_valid() {
        return Err(Error::InvalidGroup(report));
    }
    reps.sort();
    Ok(CrystalGroup { name: raw.name, basis: QMatrix::identity(n), frame, reps })
}

impl CrystalGroup {
    /// Group whose lattice has basis `basis` (columns, host coordinates) in a
    /// host frame with Gram `host_gram`; `reps` are in lattice coordinates.
    pub fn with_host_basis(
        name: Option<String>,
        host_gram: &QMatrix,
        basis: QMatrix,
        reps: Vec<(QMatrix, QVector)>,
    ) -> Result<Self> {
        let gram = basis_gram(host_gram, &basis);
        let mut g = validate_group(RawGroup { name, gram, reps })?;
        g.basis = basis;
        Ok(g)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = Some(name.into());
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// The lattice frame: Gram matrix of the lattice basis.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn gram(&self) -> &QMatrix {
        self.frame.gram()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn reps(&self) -> &[SeitzOp] {
        &self.reps
    }

    /// Order of the point group `Γ / (Γ ∩ Trans)`.
    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn point_group(&self) -> Vec<QMatrix> {
        self.reps.iter().map(|r| r.linear.clone()).collect()
    }

    pub fn rep_for(&self, linear: &QMatrix) -> Option<&SeitzOp> {
        self.reps.iter().find(|r| &r.linear == linear)
    }

    /// Exact membership of an isometry given in lattice coordinates.
    pub fn contains(&self, g: &Isometry) -> bool {
        g.dim() == self.dim()
            && self.rep_for(g.linear()).is_some_and(|r| (g.translation() - &r.translation).is_integral())
    }

    fn basis_inv(&self) -> QMatrix {
        self.basis.inverse().expect("lattice basis is invertible")
    }

    pub fn to_host(&self, g: &Isometry) -> Isometry {
        if self.basis.is_identity() {
            return g.clone();
        }
        let b = Isometry::linear_map(self.basis.clone());
        let binv = Isometry::linear_map(self.basis_inv());
        &(&b * g) * &binv
    }

    pub fn from_host(&self, g: &Isometry) -> Isometry {
        if self.basis.is_identity() {
            return g.clone();
        }
        let b = Isometry::linear_map(self.basis.clone());
        let binv = Isometry::linear_map(self.basis_inv());
        &(&binv * g) * &b
    }

    pub fn contains_host(&self, g: &Isometry) -> bool {
        g.dim() == self.dim() && self.contains(&self.from_host(g))
    }

    /// Reps as isometries of the host frame.
    pub fn host_reps(&self) -> Vec<Isometry> {
        self.reps.iter().map(|r| self.to_host(&r.to_isometry())).collect()
    }

    /// Lattice generators as host translations.
    pub fn host_translations(&self) -> Vec<Isometry> {
        (0..self.dim()).map(|j| Isometry::translation_by(self.basis.column(j))).collect()
    }

    /// Same subgroup of `Isom(E^n)` (in host coordinates).
    pub fn same_group(&self, other: &CrystalGroup) -> bool {
        self.dim() == other.dim()
            && self.order() == other.order()
            && same_lattice(&self.basis, &other.basis)
            && self.host_reps().iter().all(|g| other.contains_host(g))
    }

    /// The same group re-expressed with lattice basis equal to the identity of its host.
    pub fn is_native(&self) -> bool {
        self.basis.is_identity()
    }
}

/// Points of an orbit `Γ·x` inside a ball, in lattice coordinates.
#[derive(Clone, Debug)]
pub struct OrbitPointSet {
    pub sites: Vec<Point>,
    pub base_point: Point,
    pub center: Point,
    pub r2: Rational,
}

/// All `γ(x)`, `γ ∈ Γ`, with squared distance to `center` at most `r2`.
pub fn orbit_in_ball(g: &CrystalGroup, x: &Point, center: &Point, r2: &Rational) -> OrbitPointSet {
    let mut sites = BTreeSet::new();
    for rep in g.reps() {
        let y = rep.to_isometry().apply(x);
        // y + k within the ball ⇔ k within the ball around center - y.
        let c = center - &y;
        for k in integer_points_in_ellipsoid(g.gram(), &c, r2) {
            sites.insert(&y + &k);
        }
    }
    OrbitPointSet { sites: sites.into_iter().collect(), base_point: x.clone(), center: center.clone(), r2: r2.clone() }
}

/// Exact membership of `p` in the orbit `Γ·x`.
pub fn orbit_contains(g: &CrystalGroup, x: &Point, p: &Point) -> bool {
    g.reps().iter().any(|r| (&r.to_isometry().apply(x) - p).is_integral())
}

/// All elements of `Γ` fixing `x`, in lattice coordinates.
///
/// For each coset `(M | v)` the only candidate translation is
/// `v + k` with `k = x - Mx - v`, which must be integral.
pub fn stabilizer(g: &CrystalGroup, x: &Point) -> Vec<Isometry> {
    g.reps()
        .iter()
        .filter_map(|r| {
            let k = &(x - &r.linear.mul_vec(x)) - &r.translation;
            k.is_integral().then(|| Isometry::from_parts(r.linear.clone(), &r.translation + &k))
        })
        .collect()
}

const GENERIC_DENOMINATORS: [i64; 8] = [101, 211, 419, 839, 1693, 3389, 6781, 13567];

/// Deterministic pseudorandom rational point with trivial stabilizer.
pub fn generic_point(g: &CrystalGroup, seed: u64) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.dim();
    for attempt in 0.. {
        let den = GENERIC_DENOMINATORS[attempt.min(GENERIC_DENOMINATORS.len() - 1)];
        let x = QVector::new((0..n).map(|_| Rational::new(BigInt::from(rng.gen_range(1..den)), BigInt::from(den))).collect());
        if stabilizer(g, &x).len() == 1 {
            return x;
        }
    }
    unreachable!("fixed-point sets have positive codimension")
}

/// An origin `P` about which every coset has an integer translation part,
/// in host coordinates, or `None` for non-symmorphic groups.
///
/// Solves `(M - 1) P ≡ -v (mod Z^n)` simultaneously for all reps.
pub fn is_symmorphic(g: &CrystalGroup) -> Option<Point> {
    let n = g.dim();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in g.reps() {
        let a = &r.linear - &QMatrix::identity(n);
        for i in 0..n {
            rows.push(a.row(i).into_inner());
            rhs.push(-r.translation[i].clone());
        }
    }
    let p = solve_congruence(&QMatrix::from_rows(rows), &QVector::new(rhs))?;
    Some(g.basis().mul_vec(&p.frac()))
}

/// Whether `γ G1 γ⁻¹ ⊆ G2`, checked on lattice generators and reps of `G1`.
/// `γ` maps host coordinates of `G1` to host coordinates of `G2`.
pub fn is_conjugate_subgroup(g1: &CrystalGroup, g2: &CrystalGroup, gamma: &Isometry) -> bool {
    if g1.dim() != g2.dim() || gamma.dim() != g1.dim() {
        return false;
    }
    let ginv = gamma.inverse();
    g1.host_translations()
        .iter()
        .chain(g1.host_reps().iter())
        .all(|h| g2.contains_host(&(&(gamma * h) * &ginv)))
}

/// `[G2 : γ G1 γ⁻¹]` when `γ G1 γ⁻¹ ⊆ G2`.
pub fn conjugate_subgroup_index(g1: &CrystalGroup, g2: &CrystalGroup, gamma: &Isometry) -> Option<BigInt> {
    if !is_conjugate_subgroup(g1, g2, gamma) {
        return None;
    }
    let image_basis = gamma.linear() * g1.basis();
    let lattice_index = sublattice_index(&image_basis, g2.basis())?;
    let num = lattice_index * BigInt::from(g2.order());
    let den = BigInt::from(g1.order());
    Some(num / den)
}

/// An isometry `γ` with `γ G1 γ⁻¹ = G2`, or `None` when the groups are not
/// conjugate in `Isom(E^n)`.
///
/// Searches lattice isometries `U` (`Uᵀ G2 U = G1` on lattice Grams) that
/// conjugate the point groups onto each other, then solves the translation
/// part `c` from `U v_M + (1 - U M U⁻¹) c ≡ w_{UMU⁻¹} (mod Z^n)`.
pub fn conjugacy_search(g1: &CrystalGroup, g2: &CrystalGroup) -> Option<Isometry> {
    let n = g1.dim();
    if n != g2.dim() || g1.order() != g2.order() {
        return None;
    }
    let mut us = lattice_isometries(g1.gram(), g2.gram());
    if let Some(pos) = us.iter().position(QMatrix::is_identity) {
        let id = us.remove(pos);
        us.insert(0, id);
    }
    for u in us {
        let uinv = u.inverse().expect("unimodular");
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut matched = true;
        for r in g1.reps() {
            let m2 = &(&u * &r.linear) * &uinv;
            let Some(target) = g2.rep_for(&m2) else {
                matched = false;
                break;
            };
            let a = &QMatrix::identity(n) - &m2;
            let b = &target.translation - &u.mul_vec(&r.translation);
            for i in 0..n {
                rows.push(a.row(i).into_inner());
                rhs.push(b[i].clone());
            }
        }
        if !matched {
            continue;
        }
        let Some(c) = solve_congruence(&QMatrix::from_rows(rows), &QVector::new(rhs)) else {
            continue;
        };
        let lat = Isometry::from_parts(u, c);
        let b1inv = Isometry::linear_map(g1.basis().inverse().expect("basis"));
        let b2 = Isometry::linear_map(g2.basis().clone());
        let gamma = &(&b2 * &lat) * &b1inv;
        debug_assert!(is_conjugate_subgroup(g1, g2, &gamma));
        return Some(gamma);
    }
    None
}

/// Squared distance from `p` to the nearest lattice point of `g`.
pub fn sq_distance_to_lattice(g: &CrystalGroup, p: &Point) -> Rational {
    let base = p.floor();
    let mut best: Option<Rational> = None;
    let r2 = (0..g.dim()).map(|i| g.gram()[(i, i)].clone()).sum::<Rational>() * q(g.dim() as i64);
    for k in integer_points_in_ellipsoid(g.gram(), &(p - &base), &r2) {
        let d = g.gram().quad(&(&(p - &base) - &k));
        if best.as_ref().map_or(true, |b| d < *b) {
            best = Some(d);
        }
    }
    best.unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;
    use crate::rational::qf;

    fn square_d4() -> Vec<QMatrix> {
        [
            [[1, 0], [0, 1]],
            [[1, 0], [0, -1]],
            [[-1, 0], [0, 1]],
            [[-1, 0], [0, -1]],
            [[0, 1], [1, 0]],
            [[0, -1], [1, 0]],
            [[0, 1], [-1, 0]],
            [[0, -1], [-1, 0]],
        ]
        .iter()
        .map(|m| QMatrix::from_int_rows(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>()))
        .collect()
    }

    #[test]
    fn validates_square_group() {
        let raw = RawGroup {
            name: None,
            gram: QMatrix::identity(2),
            reps: square_d4().into_iter().map(|m| (m, QVector::zeros(2))).collect(),
        };
        let g = validate_group(raw).unwrap();
        assert_eq!(g.order(), 8);
        assert!(is_symmorphic(&g).unwrap().is_zero());
    }

    #[test]
    fn rejects_shear() {
        let raw = RawGroup {
            name: None,
            gram: QMatrix::identity(2),
            reps: vec![
                (QMatrix::identity(2), QVector::zeros(2)),
                (QMatrix::from_int_rows(&[vec![1, 1], vec![0, 1]]), QVector::zeros(2)),
            ],
        };
        match validate_group(raw) {
            Err(Error::InvalidGroup(r)) => {
                assert!(r.violations.contains(&Violation::NotGramOrthogonal { rep: 1 }))
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_closed_set() {
        let raw = RawGroup {
            name: None,
            gram: QMatrix::identity(2),
            reps: vec![
                (QMatrix::identity(2), QVector::zeros(2)),
                (QMatrix::from_int_rows(&[vec![0, -1], vec![1, 0]]), QVector::zeros(2)),
            ],
        };
        assert!(matches!(validate_group(raw), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn canonicalizes_translations() {
        let raw = RawGroup {
            name: None,
            gram: QMatrix::identity(2),
            reps: vec![
                (QMatrix::identity(2), QVector::from_ints(&[3, -2])),
                (QMatrix::from_int_rows(&[vec![-1, 0], vec![0, 1]]), QVector::from_fracs(&[(0, 1), (-1, 2)])),
            ],
        };
        let g = validate_group(raw).unwrap();
        assert!(g.reps().iter().all(|r| r.translation.iter().all(|t| *t >= q(0) && *t < q(1))));
    }

    #[test]
    fn orbit_examples() {
        let p1 = preset("p1").unwrap();
        let o = orbit_in_ball(&p1, &QVector::zeros(2), &QVector::zeros(2), &q(2));
        assert_eq!(o.sites.len(), 9);
        let p4m = preset("p4m").unwrap();
        let x = QVector::from_fracs(&[(1, 5), (1, 10)]);
        let o = orbit_in_ball(&p4m, &x, &x, &qf(1, 4));
        assert_eq!(o.sites.len(), 8);
        let o = orbit_in_ball(&p4m, &x, &x, &qf(1, 100));
        assert_eq!(o.sites, vec![x]);
    }

    #[test]
    fn stabilizer_examples() {
        let p4m = preset("p4m").unwrap();
        assert_eq!(stabilizer(&p4m, &QVector::zeros(2)).len(), 8);
        assert_eq!(stabilizer(&p4m, &QVector::from_fracs(&[(1, 5), (1, 10)])).len(), 1);
        let p1 = preset("p1").unwrap();
        assert_eq!(stabilizer(&p1, &QVector::from_fracs(&[(1, 3), (2, 7)])).len(), 1);
    }

    #[test]
    fn symmorphic_examples() {
        assert!(is_symmorphic(&preset("pg").unwrap()).is_none());
        assert!(is_symmorphic(&preset("pgg").unwrap()).is_none());
        assert!(is_symmorphic(&preset("p4g").unwrap()).is_none());
        assert!(is_symmorphic(&preset("p1").unwrap()).unwrap().is_zero());
        // pmg has a half-turn at (1/4, 0) but the glide is still unremovable.
        assert!(is_symmorphic(&preset("pmg").unwrap()).is_none());
        for name in ["p2", "pm", "cm", "pmm", "cmm", "p4", "p4m", "p3", "p3m1", "p31m", "p6", "p6m"] {
            assert!(is_symmorphic(&preset(name).unwrap()).is_some(), "{name}");
        }
    }

    #[test]
    fn conjugacy_examples() {
        let p4m = preset("p4m").unwrap();
        let gamma = conjugacy_search(&p4m, &p4m).unwrap();
        assert!(gamma.is_identity());
        let p2 = preset("p2").unwrap();
        assert!(conjugacy_search(&p2, &p4m).is_none());

        let raw = RawGroup {
            name: None,
            gram: QMatrix::identity(2).scale(&qf(1, 4)),
            reps: p4m.reps().iter().map(|r| (r.linear.clone(), r.translation.clone())).collect(),
        };
        let half = validate_group(raw).unwrap();
        assert!(conjugacy_search(&p4m, &half).is_none());
    }

    #[test]
    fn conjugate_subgroup_examples() {
        let p4m = preset("p4m").unwrap();
        let p2 = preset("p2").unwrap();
        let id = Isometry::identity(2);
        assert!(is_conjugate_subgroup(&p2, &p4m, &id));
        assert!(!is_conjugate_subgroup(&p4m, &p2, &id));
        let elem = p4m.reps()[3].to_isometry();
        assert!(is_conjugate_subgroup(&p4m, &p4m, &elem));
        assert_eq!(conjugate_subgroup_index(&p2, &p4m, &id), Some(BigInt::from(4)));
    }

    #[test]
    fn shifted_group_is_conjugate_by_translation() {
        let pmg = preset("pmg").unwrap();
        let shift = Isometry::translation_by(QVector::from_fracs(&[(1, 3), (2, 7)]));
        let reps: Vec<(QMatrix, QVector)> = pmg
            .reps()
            .iter()
            .map(|r| {
                let g = shift.conjugate(&r.to_isometry());
                let (l, t) = g.into_parts();
                (l, t)
            })
            .collect();
        let moved = validate_group(RawGroup { name: None, gram: QMatrix::identity(2), reps }).unwrap();
        let gamma = conjugacy_search(&pmg, &moved).unwrap();
        assert!(is_conjugate_subgroup(&pmg, &moved, &gamma));
        assert!(is_conjugate_subgroup(&moved, &pmg, &gamma.inverse()));
    }
}
