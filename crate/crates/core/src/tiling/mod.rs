//! Periodic tilings by convex polytopes: validation, patches, transforms
//! and prototiles.

mod aut;
mod metric;

pub use aut::{
    automorphism_group, is_crystallographic, ld_check, mld_check, translation_mld_check, LdResult,
};
pub use metric::{
    combine_witnesses, distance_upper_bound, verify_witness, DistanceBound, Witness, METRIC_CAP,
};

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::isometry::{Frame, Isometry};
use crate::lattice::{basis_gram, integer_points_in_ellipsoid, same_lattice};
use crate::polytope::{congruent, meet_face_to_face, ConvexPolytope, Meeting};
use crate::rational::{q, to_f64, Point, QMatrix, QVector, Rational};

/// Tiles modulo a lattice of periods; the translates of `cell_tiles` by the
/// lattice form the tiling.
#[derive(Clone, Debug)]
pub struct PeriodicTiling {
    frame: Frame,
    /// Period lattice basis (columns) in frame coordinates.
    lattice: QMatrix,
    lattice_inv: QMatrix,
    /// Canonical representatives, sorted.
    tiles: Vec<ConvexPolytope>,
    provenance: Option<serde_json::Value>,
}

/// The tiles meeting a closed ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    pub tiles: Vec<ConvexPolytope>,
    pub center: Point,
    pub r2: Rational,
}

impl PeriodicTiling {
    /// Validated tiling with the integer lattice as periods.
    pub fn new(frame: Frame, tiles: Vec<ConvexPolytope>) -> Result<Self> {
        let n = frame.dim();
        PeriodicTiling::with_lattice(frame, QMatrix::identity(n), tiles)
    }

    pub fn with_lattice(frame: Frame, lattice: QMatrix, tiles: Vec<ConvexPolytope>) -> Result<Self> {
        let n = frame.dim();
        if lattice.rows() != n || !lattice.is_square() {
            return Err(Error::DimensionMismatch { expected: n, found: lattice.rows() });
        }
        if lattice.det().is_zero() {
            return Err(Error::InvalidTiling("period lattice is singular".into()));
        }
        if let Some(t) = tiles.iter().find(|t| t.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: t.dim() });
        }
        let count = tiles.len();
        let t = PeriodicTiling::from_trusted(frame, lattice, tiles);
        if t.tiles.len() != count {
            return Err(Error::InvalidTiling("two cell tiles are lattice translates of each other".into()));
        }
        t.validate()?;
        Ok(t)
    }

    /// Canonicalizes without validation.
    pub(crate) fn from_trusted(frame: Frame, lattice: QMatrix, tiles: Vec<ConvexPolytope>) -> Self {
        let lattice_inv = lattice.inverse().expect("nonsingular lattice");
        let mut t = PeriodicTiling { frame, lattice, lattice_inv, tiles: Vec::new(), provenance: None };
        let set: BTreeSet<ConvexPolytope> = tiles.iter().map(|p| t.canonical(p)).collect();
        t.tiles = set.into_iter().collect();
        t
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn lattice(&self) -> &QMatrix {
        &self.lattice
    }

    pub fn cell_tiles(&self) -> &[ConvexPolytope] {
        &self.tiles
    }

    pub fn provenance(&self) -> Option<&serde_json::Value> {
        self.provenance.as_ref()
    }

    pub fn set_provenance(&mut self, p: serde_json::Value) {
        self.provenance = Some(p);
    }

    /// Lattice coordinates of a point.
    pub fn lattice_coords(&self, x: &Point) -> QVector {
        self.lattice_inv.mul_vec(x)
    }

    /// The translate of `t` whose lowest vertex lies in the half-open unit cell.
    pub fn canonical(&self, t: &ConvexPolytope) -> ConvexPolytope {
        let k = self.lattice_coords(t.lex_min_vertex()).floor();
        if k.is_zero() {
            return t.clone();
        }
        t.translate(&-&self.lattice.mul_vec(&k))
    }

    pub fn contains_tile(&self, t: &ConvexPolytope) -> bool {
        t.dim() == self.dim() && self.tiles.binary_search(&self.canonical(t)).is_ok()
    }

    /// Checks volume, disjointness of interiors and face-to-face contact
    /// between the cell tiles and every lattice translate that can touch them.
    pub fn validate(&self) -> Result<()> {
        let total: Rational = self.tiles.iter().map(ConvexPolytope::volume).sum();
        let cell = self.lattice.det().abs();
        if total != cell {
            return Err(Error::InvalidTiling(format!("tile volumes sum to {total}, period cell has volume {cell}")));
        }
        let radii: Vec<(Point, Rational)> = self
            .tiles
            .iter()
            .map(|t| {
                let c = t.centroid();
                let r = t.max_sq_distance(&self.frame, &c);
                (c, r)
            })
            .collect();
        let lgram = basis_gram(self.frame.gram(), &self.lattice);
        let float_radii: Vec<f64> = radii.iter().map(|(_, r)| to_f64(r).sqrt()).collect();
        // Translates share the cached face lattice of the original.
        for t in &self.tiles {
            t.all_faces();
        }
        for (i, a) in self.tiles.iter().enumerate() {
            // Each unordered pair once: (b + Bk, a) is a translate of (a, b - Bk).
            for (j, b) in self.tiles.iter().enumerate().skip(i) {
                // |c_b + Bk - c_a| ≤ r_a + r_b, and (r_a + r_b)² ≤ 2(r_a² + r_b²).
                let reach = (&radii[i].1 + &radii[j].1) * q(2);
                let center = self.lattice_coords(&(&radii[i].0 - &radii[j].0));
                let touch = float_radii[i] + float_radii[j];
                for k in integer_points_in_ellipsoid(&lgram, &center, &reach) {
                    if i == j && k <= QVector::zeros(k.dim()) {
                        continue;
                    }
                    let shift = self.lattice.mul_vec(&k);
                    let gap = &(&radii[j].0 + &shift) - &radii[i].0;
                    if self.frame.norm(&gap) > touch + 1e-9 * (1.0 + touch) {
                        continue;
                    }
                    let other = b.translate(&shift);
                    match meet_face_to_face(a, &other) {
                        Ok(Meeting::Violation(v)) => {
                            return Err(Error::InvalidTiling(format!("tiles {a} and {other} meet in {v}")));
                        }
                        Err(Error::OverlappingInteriors) => {
                            return Err(Error::InvalidTiling(format!("tiles {a} and {other} overlap")));
                        }
                        Err(e) => return Err(e),
                        Ok(_) => {}
                    }
                }
            }
        }
        Ok(())
    }

    /// All tiles meeting the closed ball of squared radius `r2` around `center`.
    pub fn patch(&self, center: &Point, r2: &Rational) -> Patch {
        let lgram = basis_gram(self.frame.gram(), &self.lattice);
        let r = to_f64(r2).sqrt();
        let mut out = BTreeSet::new();
        for t in &self.tiles {
            let c = t.centroid();
            let rho2 = t.max_sq_distance(&self.frame, &c);
            let reach = (r2 + &rho2) * q(2);
            // Centroid farther than r + ρ (with a safety margin) cannot meet the ball.
            let far = r + to_f64(&rho2).sqrt();
            let far = far + 1e-9 * (1.0 + far);
            let rel = self.lattice_coords(&(center - &c));
            for k in integer_points_in_ellipsoid(&lgram, &rel, &reach) {
                let shift = self.lattice.mul_vec(&k);
                if self.frame.norm(&(&(&c + &shift) - center)) > far {
                    continue;
                }
                let tile = t.translate(&shift);
                if tile.intersects_ball(&self.frame, center, r2) {
                    out.insert(tile);
                }
            }
        }
        Patch { tiles: out.into_iter().collect(), center: center.clone(), r2: r2.clone() }
    }

    /// `φ(T)`, keeping the period lattice when `φ` normalizes it.
    pub fn transform(&self, phi: &Isometry) -> Result<PeriodicTiling> {
        self.frame.check_isometry(phi)?;
        let image = phi.linear() * &self.lattice;
        let lattice = if same_lattice(&image, &self.lattice) { self.lattice.clone() } else { image };
        let tiles: Vec<ConvexPolytope> = self.tiles.iter().map(|t| t.map(phi)).collect();
        let mut t = PeriodicTiling::from_trusted(self.frame.clone(), lattice, tiles);
        t.provenance = self.provenance.clone();
        Ok(t)
    }

    pub fn translate(&self, v: &QVector) -> PeriodicTiling {
        let tiles: Vec<ConvexPolytope> = self.tiles.iter().map(|t| t.translate(v)).collect();
        let mut t = PeriodicTiling::from_trusted(self.frame.clone(), self.lattice.clone(), tiles);
        t.provenance = self.provenance.clone();
        t
    }

    /// Whether `T + v = T`.
    pub fn has_period(&self, v: &QVector) -> bool {
        self.tiles.iter().all(|t| self.contains_tile(&t.translate(v)))
    }

    /// Equality of the tile sets.
    ///
    /// A tiling contained in another tiling equals it, so it suffices that
    /// the periods of `other` are periods of `self` and that the cell tiles
    /// of `other` are tiles of `self`.
    pub fn same_tiling(&self, other: &PeriodicTiling) -> bool {
        self.frame == other.frame
            && (0..self.dim()).all(|j| self.has_period(&other.lattice.column(j)))
            && other.tiles.iter().all(|t| self.contains_tile(t))
    }

    /// Congruence classes of the cell tiles, as lists of indices.
    pub fn prototiles(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, t) in self.tiles.iter().enumerate() {
            match classes.iter_mut().find(|c| congruent(&self.frame, &self.tiles[c[0]], t).is_some()) {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        classes
    }

    /// Prototile class index of each cell tile.
    pub fn prototile_labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.tiles.len()];
        for (c, members) in self.prototiles().iter().enumerate() {
            for &i in members {
                labels[i] = c;
            }
        }
        labels
    }

    /// Prototile label of an arbitrary tile of the tiling.
    pub fn label_of(&self, t: &ConvexPolytope, labels: &[usize]) -> Option<usize> {
        self.tiles.binary_search(&self.canonical(t)).ok().map(|i| labels[i])
    }

    /// Lattice translation `k` with `t = cell_tiles[i] + Bk`.
    pub fn locate(&self, t: &ConvexPolytope) -> Option<(usize, QVector)> {
        let c = self.canonical(t);
        let i = self.tiles.binary_search(&c).ok()?;
        let shift = t.lex_min_vertex() - c.lex_min_vertex();
        Some((i, self.lattice_coords(&shift)))
    }
}

/// `φ(T)` (free-function form).
pub fn transform_tiling(t: &PeriodicTiling, phi: &Isometry) -> Result<PeriodicTiling> {
    t.transform(phi)
}

pub fn patch(t: &PeriodicTiling, center: &Point, r2: &Rational) -> Patch {
    t.patch(center, r2)
}

pub fn prototiles(t: &PeriodicTiling) -> Vec<Vec<usize>> {
    t.prototiles()
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::qf;

    #[test]
    fn patch_examples() {
        let t = square_tiling();
        let r2 = qf(1, 100);
        assert_eq!(t.patch(&QVector::from_fracs(&[(1, 2), (1, 2)]), &r2).tiles.len(), 1);
        assert_eq!(t.patch(&QVector::zeros(2), &r2).tiles.len(), 4);
        assert_eq!(t.patch(&QVector::from_fracs(&[(1, 2), (0, 1)]), &r2).tiles.len(), 2);
    }

    #[test]
    fn transform_examples() {
        let t = square_tiling();
        assert!(t.transform(&Isometry::identity(2)).unwrap().same_tiling(&t));
        assert!(t.transform(&Isometry::translation_by(QVector::from_ints(&[1, 0]))).unwrap().same_tiling(&t));
        let r = rhomb_tiling();
        let rot = Isometry::linear_map(QMatrix::from_int_rows(&[vec![0, -1], vec![1, 0]]));
        let turned = r.transform(&rot).unwrap();
        turned.validate().unwrap();
        assert!(!turned.same_tiling(&r));
    }

    #[test]
    fn prototile_counts() {
        assert_eq!(square_tiling().prototiles().len(), 1);
        assert_eq!(rhomb_tiling().prototiles().len(), 1);
    }

    #[test]
    fn rejects_gaps_and_overlaps() {
        let f = Frame::standard(2);
        let two = vec![square_tile(0, 0), square_tile(1, 0)];
        assert!(PeriodicTiling::new(f.clone(), two).is_err());
        let shifted = square_tile(0, 0).translate(&QVector::from_fracs(&[(1, 2), (0, 1)]));
        let lattice = QMatrix::from_rows(vec![vec![q(1), qf(1, 2)], vec![q(0), q(1)]]);
        // Bricks cover the plane but meet edge to half-edge.
        assert!(matches!(PeriodicTiling::with_lattice(f, lattice, vec![shifted]), Err(Error::InvalidTiling(_))));
    }

    #[test]
    fn half_scale_is_valid() {
        let t = half_scale_tiling();
        assert_eq!(t.cell_tiles().len(), 1);
        assert!(!t.same_tiling(&square_tiling()));
    }
}
