//! Automorphism groups of periodic tilings and the LD/MLD decisions that
//! reduce to group containment and conjugacy.

use crate::error::Result;
use crate::group::{conjugacy_search, is_conjugate_subgroup, CrystalGroup};
use crate::isometry::Isometry;
use crate::polytope::ConvexPolytope;
use crate::lattice::{basis_gram, lattice_basis, lattice_isometries, lll_reduce, same_lattice};
use crate::rational::{to_f64, QMatrix, QVector, Rational};
use crate::voronoi::lattice_covering_sq_radius;

use super::PeriodicTiling;

/// Translations `s` with `image + s` equal to a cell tile.
fn candidate_shifts(t: &PeriodicTiling, image: &ConvexPolytope) -> Vec<QVector> {
    t.cell_tiles()
        .iter()
        .filter(|c| c.vertices().len() == image.vertices().len())
        .map(|c| (c, c.lex_min_vertex() - image.lex_min_vertex()))
        .filter(|(c, s)| &image.translate(s) == *c)
        .map(|(_, s)| s)
        .collect()
}

/// The full symmetry group `{φ : φ(T) = T}`.
///
/// The result carries the maximal translation lattice as its basis in the
/// coordinates of `t`.
pub fn automorphism_group(t: &PeriodicTiling) -> CrystalGroup {
    let n = t.dim();
    let b = t.lattice().clone();
    let anchor = t.cell_tiles()[0].clone();

    // Maximal lattice, in coordinates of the stored lattice.
    let mut gens: Vec<QVector> = (0..n).map(|i| QVector::unit(n, i)).collect();
    for s in candidate_shifts(t, &anchor) {
        if !s.is_zero() && t.has_period(&s) {
            gens.push(t.lattice_coords(&s));
        }
    }
    let h = lattice_basis(&gens, n).expect("full rank");
    let basis = if h.is_identity() {
        b.clone()
    } else {
        let host = &b * &h;
        lll_reduce(&host, t.frame().gram())
    };
    let basis_inv = basis.inverse().expect("nonsingular");
    let lgram = basis_gram(t.frame().gram(), &basis);

    let mut reps: Vec<(QMatrix, QVector)> = Vec::new();
    for u in lattice_isometries(&lgram, &lgram) {
        let l = &(&basis * &u) * &basis_inv;
        let rotated = anchor.map(&Isometry::linear_map(l.clone()));
        for c in candidate_shifts(t, &rotated) {
            let g = Isometry::from_parts(l.clone(), c.clone());
            if t.cell_tiles().iter().all(|tile| t.contains_tile(&tile.map(&g))) {
                reps.push((u.clone(), basis_inv.mul_vec(&c)));
                break;
            }
        }
    }
    CrystalGroup::with_host_basis(None, t.frame().gram(), basis, reps).expect("symmetries of a tiling form a group")
}

/// Always true for a valid periodic tiling; returns the group.
pub fn is_crystallographic(t: &PeriodicTiling) -> (bool, CrystalGroup) {
    let g = automorphism_group(t);
    (g.order() > 0, g)
}

#[derive(Clone, Debug)]
pub struct LdResult {
    pub holds: bool,
    /// Squared covering radius of the translation lattice of `Aut(T)`.
    pub radius_sq: Option<Rational>,
}

impl LdResult {
    pub fn radius(&self) -> Option<f64> {
        self.radius_sq.as_ref().map(|r| to_f64(r).sqrt())
    }
}

/// Whether `T'` is locally derivable from `T` along `γ`, i.e.
/// `γ Aut(T) γ⁻¹ ⊆ Aut(T')`, with a radius that works.
pub fn ld_check(t: &PeriodicTiling, t2: &PeriodicTiling, gamma: &Isometry) -> Result<LdResult> {
    let a = automorphism_group(t);
    let b = automorphism_group(t2);
    if !is_conjugate_subgroup(&a, &b, gamma) {
        return Ok(LdResult { holds: false, radius_sq: None });
    }
    Ok(LdResult { holds: true, radius_sq: Some(lattice_covering_sq_radius(a.gram())?) })
}

/// A conjugator `γ` of the automorphism groups, making the tilings mutually
/// locally derivable, or `None`.
pub fn mld_check(t: &PeriodicTiling, t2: &PeriodicTiling) -> Option<Isometry> {
    conjugacy_search(&automorphism_group(t), &automorphism_group(t2))
}

/// Whether the tilings have the same translation symmetries.
pub fn translation_mld_check(t: &PeriodicTiling, t2: &PeriodicTiling) -> bool {
    t.frame() == t2.frame() && same_lattice(automorphism_group(t).basis(), automorphism_group(t2).basis())
}
