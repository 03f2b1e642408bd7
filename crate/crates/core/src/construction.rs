//! Simple tilings with a prescribed automorphism group.
//!
//! The Voronoi tiling of a generic orbit has `Γ` among its symmetries but
//! may have more. Coning every facet of the base cell to an apex `y` whose
//! distances to the cell vertices are pairwise distinct (and distinct from
//! the edge lengths) destroys every extra symmetry.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{generic_point, validate_group, CrystalGroup, RawGroup};
use crate::io::vector_to_json;
use crate::isometry::Frame;
use crate::polytope::ConvexPolytope;
use crate::rational::{Point, QMatrix, QVector, Rational};
use crate::tiling::{automorphism_group, PeriodicTiling};
use crate::voronoi::{orbit_voronoi_cell, voronoi_tiling};

const MAX_ATTEMPTS: u64 = 8;
const WEIGHT_RANGE: i64 = 1000;

/// Exact evidence that an apex is generic for a cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericityCertificate {
    pub apex: Point,
    pub cell: ConvexPolytope,
    pub vertex_sq_distances: Vec<Rational>,
    pub edge_sq_lengths: Vec<Rational>,
}

impl GenericityCertificate {
    pub fn new(frame: &Frame, cell: &ConvexPolytope, apex: Point) -> Result<Self> {
        if apex.dim() != cell.dim() {
            return Err(Error::DimensionMismatch { expected: cell.dim(), found: apex.dim() });
        }
        if !cell.contains_interior(&apex) {
            return Err(Error::NotGeneric("apex is not an interior point of the cell".into()));
        }
        let vertex_sq_distances: Vec<Rational> = cell.vertices().iter().map(|v| frame.sq_dist(v, &apex)).collect();
        let edge_sq_lengths = cell.sq_edge_lengths(frame);
        let distinct: BTreeSet<&Rational> = vertex_sq_distances.iter().collect();
        if distinct.len() != vertex_sq_distances.len() {
            return Err(Error::NotGeneric("two vertices are equidistant from the apex".into()));
        }
        if let Some(d) = vertex_sq_distances.iter().find(|d| edge_sq_lengths.contains(d)) {
            return Err(Error::NotGeneric(format!("a vertex distance squared equals an edge length squared ({d})")));
        }
        Ok(GenericityCertificate { apex, cell: cell.clone(), vertex_sq_distances, edge_sq_lengths })
    }

    /// Recomputes every condition from the apex and the cell.
    pub fn verify(&self, frame: &Frame) -> bool {
        GenericityCertificate::new(frame, &self.cell, self.apex.clone()).is_ok_and(|c| &c == self)
    }
}

/// A pseudorandom interior point of `cell` satisfying the genericity conditions.
///
/// Candidates are convex combinations of the vertices with positive integer
/// weights, so they are interior and have small denominators.
pub fn generic_apex(frame: &Frame, cell: &ConvexPolytope, seed: u64) -> GenericityCertificate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verts = cell.vertices();
    loop {
        let weights: Vec<i64> = verts.iter().map(|_| rng.gen_range(1..=WEIGHT_RANGE)).collect();
        let total: i64 = weights.iter().sum();
        let mut y = QVector::zeros(cell.dim());
        for (v, w) in verts.iter().zip(&weights) {
            y = &y + &v.scale(&Rational::new(BigInt::from(*w), BigInt::from(total)));
        }
        if let Ok(cert) = GenericityCertificate::new(frame, cell, y) {
            return cert;
        }
    }
}

/// Replaces every tile `γ(t_x)` of a Voronoi tiling of `Γ` by the cones over
/// its facets with apex `γ(y)`.
pub fn cone_subdivide(g: &CrystalGroup, voronoi: &PeriodicTiling, cert: &GenericityCertificate) -> Result<PeriodicTiling> {
    let frame = voronoi.frame();
    if frame != g.frame() || !voronoi.lattice().is_identity() {
        return Err(Error::Precondition("tiling is not in the lattice frame of the group".into()));
    }
    if !voronoi.contains_tile(&cert.cell) {
        return Err(Error::Precondition("certificate cell is not a tile of the tiling".into()));
    }
    if !cert.verify(frame) {
        return Err(Error::NotGeneric("certificate does not verify".into()));
    }
    let n = g.dim();
    let facets = cert.cell.faces(n - 1)?;
    let mut cones = Vec::with_capacity(facets.len());
    for f in &facets {
        let mut pts = f.vertices.clone();
        pts.push(cert.apex.clone());
        let cone = ConvexPolytope::from_vertices(pts)?;
        assert_eq!(cone.vertices().len(), f.vertices.len() + 1, "apex lies off every facet hyperplane");
        cones.push(cone);
    }
    let mut tiles = Vec::with_capacity(g.order() * cones.len());
    for rep in g.reps() {
        let gamma = rep.to_isometry();
        if !voronoi.contains_tile(&cert.cell.map(&gamma)) {
            return Err(Error::Precondition("Voronoi tiling is not invariant under the group".into()));
        }
        tiles.extend(cones.iter().map(|c| c.map(&gamma)));
    }
    let expected = tiles.len();
    let t = PeriodicTiling::with_lattice(frame.clone(), QMatrix::identity(n), tiles)?;
    if t.cell_tiles().len() != expected {
        return Err(Error::InvalidTiling("cones coincide modulo the lattice".into()));
    }
    Ok(t)
}

/// The same group with its lattice as the coordinate basis.
fn native(g: &CrystalGroup) -> Result<CrystalGroup> {
    validate_group(RawGroup {
        name: g.name().map(str::to_owned),
        gram: g.gram().clone(),
        reps: g.reps().iter().map(|r| (r.linear.clone(), r.translation.clone())).collect(),
    })
}

/// A simple tiling `T`, in the lattice frame of `Γ`, with `Aut(T) = Γ` exactly.
///
/// The equality is checked before returning. A failed check moves on to the
/// next derived seed; after a bounded number of failures the error is returned.
pub fn construct_tiling(g: &CrystalGroup, seed: u64) -> Result<PeriodicTiling> {
    let target = native(g)?;
    let mut last = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9));
        let x = generic_point(&target, s);
        let vt = voronoi_tiling(&target, &x)?;
        let (cell, _) = orbit_voronoi_cell(&target, &x, &x)?;
        let cert = generic_apex(target.frame(), &cell, s);
        let mut t = match cone_subdivide(&target, &vt, &cert) {
            Ok(t) => t,
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        let aut = automorphism_group(&t);
        if !aut.same_group(&target) {
            last = format!("automorphism group has point group order {} and lattice {:?}", aut.order(), aut.basis());
            continue;
        }
        t.set_provenance(json!({
            "construction": "cone",
            "group": g.name(),
            "seed": seed,
            "attempt": attempt,
            "point": vector_to_json(&x),
            "apex": vector_to_json(&cert.apex),
        }));
        return Ok(t);
    }
    Err(Error::ConstructionFailed(format!("{MAX_ATTEMPTS} attempts failed, last: {last}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;
    use crate::rational::{q, qf};

    fn unit_square() -> ConvexPolytope {
        let h = qf(1, 2);
        let m = -&h;
        ConvexPolytope::from_vertices(vec![
            QVector::new(vec![m.clone(), m.clone()]),
            QVector::new(vec![h.clone(), m.clone()]),
            QVector::new(vec![m.clone(), h.clone()]),
            QVector::new(vec![h.clone(), h.clone()]),
        ])
        .unwrap()
    }

    #[test]
    fn off_center_apex() {
        let f = Frame::standard(2);
        // Distances 1/5, 2/5, 4/5 and 1: the last one equals the edge length.
        let y = QVector::from_fracs(&[(-1, 10), (-3, 10)]);
        let d: Vec<Rational> = unit_square().vertices().iter().map(|v| f.sq_dist(v, &y)).collect();
        assert_eq!(d, vec![qf(1, 5), qf(4, 5), qf(2, 5), q(1)]);
        assert!(matches!(GenericityCertificate::new(&f, &unit_square(), y), Err(Error::NotGeneric(_))));

        let y = QVector::from_fracs(&[(-1, 10), (-7, 20)]);
        let c = GenericityCertificate::new(&f, &unit_square(), y).unwrap();
        assert_eq!(c.vertex_sq_distances, vec![qf(73, 400), qf(353, 400), qf(153, 400), qf(433, 400)]);
        assert!(c.edge_sq_lengths.iter().all(|e| *e == q(1)));
        assert!(c.verify(&f));
    }

    #[test]
    fn symmetric_apexes_rejected() {
        let f = Frame::standard(2);
        assert!(matches!(GenericityCertificate::new(&f, &unit_square(), QVector::zeros(2)), Err(Error::NotGeneric(_))));
        let diag = QVector::from_fracs(&[(1, 5), (1, 5)]);
        assert!(matches!(GenericityCertificate::new(&f, &unit_square(), diag), Err(Error::NotGeneric(_))));
        let edge = QVector::from_fracs(&[(1, 2), (1, 5)]);
        assert!(GenericityCertificate::new(&f, &unit_square(), edge).is_err());
    }

    #[test]
    fn apex_is_deterministic() {
        let f = Frame::standard(2);
        let a = generic_apex(&f, &unit_square(), 4);
        assert_eq!(a, generic_apex(&f, &unit_square(), 4));
        assert!(a.verify(&f));
    }

    #[test]
    fn square_subdivision() {
        let g = preset("p1").unwrap();
        let vt = PeriodicTiling::new(Frame::standard(2), vec![unit_square()]).unwrap();
        let cert = GenericityCertificate::new(g.frame(), &unit_square(), QVector::from_fracs(&[(-1, 10), (-7, 20)])).unwrap();
        let t = cone_subdivide(&g, &vt, &cert).unwrap();
        assert_eq!(t.cell_tiles().len(), 4);
        assert_eq!(t.prototiles().len(), 4);
        let aut = automorphism_group(&t);
        assert!(aut.same_group(&g));
    }

    #[test]
    fn centroid_apex_refused() {
        let g = preset("p1").unwrap();
        let vt = PeriodicTiling::new(Frame::standard(2), vec![unit_square()]).unwrap();
        let cert = GenericityCertificate {
            apex: QVector::zeros(2),
            cell: unit_square(),
            vertex_sq_distances: vec![qf(1, 2); 4],
            edge_sq_lengths: vec![q(1); 4],
        };
        assert!(matches!(cone_subdivide(&g, &vt, &cert), Err(Error::NotGeneric(_))));
    }

    #[test]
    fn p2_cells_get_six_cones() {
        let g = preset("p2").unwrap();
        let x = generic_point(&g, 0);
        let vt = voronoi_tiling(&g, &x).unwrap();
        let (cell, _) = orbit_voronoi_cell(&g, &x, &x).unwrap();
        let facets = cell.faces(1).unwrap().len();
        let cert = generic_apex(g.frame(), &cell, 0);
        let t = cone_subdivide(&g, &vt, &cert).unwrap();
        assert_eq!(t.cell_tiles().len(), 2 * facets);
    }

    #[test]
    fn p1_loses_the_square_symmetry() {
        let g = preset("p1").unwrap();
        let t = construct_tiling(&g, 0).unwrap();
        let aut = automorphism_group(&t);
        assert_eq!(aut.order(), 1);
        assert!(aut.same_group(&g));
        let vol: Rational = t.cell_tiles().iter().map(ConvexPolytope::volume).sum();
        assert_eq!(vol, q(1));
    }

    #[test]
    fn chirality_is_kept() {
        let g = preset("p6").unwrap();
        let t = construct_tiling(&g, 1).unwrap();
        let aut = automorphism_group(&t);
        assert!(aut.point_group().iter().all(|m| m.det() == q(1)));
        assert!(aut.same_group(&g));
    }
}
