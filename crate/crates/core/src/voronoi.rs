//! Voronoi cells of finite point sets and of crystallographic orbits.

use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{orbit_contains, orbit_in_ball, stabilizer, validate_group, CrystalGroup, RawGroup};
use crate::io::vector_to_json;
use crate::isometry::Frame;
use crate::polytope::{halfspace_intersection, ConvexPolytope, HalfSpace, Intersection};
use crate::rational::{q, Point, QMatrix, QVector, Rational};
use crate::tiling::PeriodicTiling;

/// Exact witnesses for the two Delone conditions of a crystallographic orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeloneCertificate {
    /// Smallest squared distance between distinct sites.
    pub min_sq_distance: Rational,
    /// Largest squared distance from a point of space to its nearest site.
    pub covering_sq_radius: Rational,
    /// Squared radius of the site ball that determines each cell.
    pub localization_sq_radius: Rational,
}

/// The closed half-space of points at least as close to `x0` as to `x`.
pub fn bisector(frame: &Frame, x0: &Point, x: &Point) -> HalfSpace {
    let g = frame.gram();
    let coeffs = g.mul_vec(&(x0 - x));
    let offset = (g.quad(x0) - g.quad(x)) / q(2);
    HalfSpace::new(coeffs, offset).expect("distinct sites")
}

fn cell_from_sites<'a>(frame: &Frame, x0: &Point, sites: impl Iterator<Item = &'a Point>) -> Result<Intersection> {
    let hs: Vec<HalfSpace> = sites.filter(|s| *s != x0).map(|s| bisector(frame, x0, s)).collect();
    if hs.is_empty() {
        return Ok(Intersection::Unbounded);
    }
    halfspace_intersection(&hs)
}

/// Voronoi cell of `x0` in a finite site set.
pub fn voronoi_cell(frame: &Frame, sites: &[Point], x0: &Point) -> Result<ConvexPolytope> {
    if !sites.contains(x0) {
        return Err(Error::NotASite);
    }
    match cell_from_sites(frame, x0, sites.iter())? {
        Intersection::Polytope(p) => Ok(p),
        _ => Err(Error::UnboundedCell),
    }
}

/// Voronoi cell of `x0` in the orbit `Γ·base`, with the squared site radius used.
///
/// Sites farther than twice the cell's circumradius cannot cut the cell, so
/// the gathering radius is enlarged until it covers that bound.
pub fn orbit_voronoi_cell(g: &CrystalGroup, base: &Point, x0: &Point) -> Result<(ConvexPolytope, Rational)> {
    if !orbit_contains(g, base, x0) {
        return Err(Error::NotASite);
    }
    let stab = stabilizer(g, base).len();
    if stab > 1 {
        return Err(Error::NontrivialStabilizer(stab));
    }
    let frame = g.frame();
    let n = g.dim();
    let mut rho2: Rational = (0..n).map(|i| g.gram()[(i, i)].clone()).sum::<Rational>() * q(2);
    loop {
        let orbit = orbit_in_ball(g, base, x0, &rho2);
        match cell_from_sites(frame, x0, orbit.sites.iter())? {
            Intersection::Polytope(cell) => {
                let need = cell.max_sq_distance(frame, x0) * q(4);
                if rho2 >= need {
                    return Ok((cell, rho2));
                }
                rho2 = need;
            }
            Intersection::Unbounded => rho2 *= q(4),
            _ => unreachable!("a Voronoi cell contains its site"),
        }
    }
}

pub fn delone_params(g: &CrystalGroup, x: &Point) -> Result<DeloneCertificate> {
    let (cell, rho2) = orbit_voronoi_cell(g, x, x)?;
    let frame = g.frame();
    let orbit = orbit_in_ball(g, x, x, &rho2);
    let min_sq_distance = orbit
        .sites
        .iter()
        .filter(|s| *s != x)
        .map(|s| frame.sq_dist(s, x))
        .min()
        .expect("a bounded cell has neighbours");
    Ok(DeloneCertificate { min_sq_distance, covering_sq_radius: cell.max_sq_distance(frame, x), localization_sq_radius: rho2 })
}

/// Squared covering radius of the integer lattice under `gram`.
pub fn lattice_covering_sq_radius(gram: &QMatrix) -> Result<Rational> {
    let n = gram.rows();
    let p1 = validate_group(RawGroup { name: None, gram: gram.clone(), reps: vec![(QMatrix::identity(n), QVector::zeros(n))] })?;
    Ok(delone_params(&p1, &QVector::zeros(n))?.covering_sq_radius)
}

/// The tiling by the Voronoi cells of the orbit `Γ·x`, one tile per coset.
pub fn voronoi_tiling(g: &CrystalGroup, x: &Point) -> Result<PeriodicTiling> {
    let (cell, _) = orbit_voronoi_cell(g, x, x)?;
    let tiles: Vec<ConvexPolytope> = g.reps().iter().map(|r| cell.map(&r.to_isometry())).collect();
    let mut t = PeriodicTiling::from_trusted(g.frame().clone(), QMatrix::identity(g.dim()), tiles);
    t.set_provenance(json!({
        "construction": "voronoi",
        "group": g.name(),
        "point": vector_to_json(x),
    }));
    Ok(t)
}

/// Whether `cell` is unchanged when recomputed from all sites within `factor²`
/// times the localization radius.
pub fn localization_is_stable(g: &CrystalGroup, x: &Point, factor: i64) -> Result<bool> {
    let (cell, rho2) = orbit_voronoi_cell(g, x, x)?;
    let bigger = rho2 * q(factor * factor);
    let orbit = orbit_in_ball(g, x, x, &bigger);
    match cell_from_sites(g.frame(), x, orbit.sites.iter())? {
        Intersection::Polytope(p) => Ok(p == cell),
        _ => Ok(false),
    }
}
