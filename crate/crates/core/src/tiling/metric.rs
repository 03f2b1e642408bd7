//! Certified upper bounds for the tiling metric `d_O`.
//!
//! A witness is a pair `(φ, ψ)` of isometries together with a radius `r`
//! such that `[φT]` and `[ψT']` agree on `B_r(O)` and both isometries have
//! size at most `1/(2r)`. The radius is a supremum: every smaller radius
//! satisfies the strict size condition, so `R(T, T') ≥ r` and
//! `d_O(T, T') ≤ min(ln(3/2), ln(1 + 1/r))`.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::isometry::{iso_size, translation_sq_size, Isometry, METRIC_TOL};
use crate::rational::{q, rational_below, to_f64, Point, QVector, Rational};

use super::PeriodicTiling;

/// `ln(3/2)`, the largest value of the metric.
pub const METRIC_CAP: f64 = 0.405_465_108_108_164_4;

/// Stand-in for an unbounded radius when combining witnesses.
const LARGE_RADIUS: f64 = 1.0e6;

const SEARCH_STEPS: usize = 16;

#[derive(Clone, Debug)]
pub struct Witness {
    pub phi: Isometry,
    pub psi: Isometry,
    /// Squared radius up to which the patches of `φT` and `ψT'` were
    /// verified equal; `None` when the transformed tilings coincide.
    pub agreement_sq: Option<Rational>,
    /// The certified radius; `None` when unbounded.
    pub radius: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct DistanceBound {
    pub origin: Point,
    pub upper: f64,
    pub witness: Witness,
    pub lower: Option<f64>,
}

fn bound_from_radius(radius: Option<f64>) -> f64 {
    match radius {
        None => 0.0,
        Some(r) if r <= 0.0 => METRIC_CAP,
        Some(r) => METRIC_CAP.min((1.0 / r).ln_1p()),
    }
}

/// Supremum of radii allowed by the sizes of `φ` and `ψ`; `None` if both are trivial.
fn size_radius(t: &PeriodicTiling, origin: &Point, phi: &Isometry, psi: &Isometry) -> Result<Option<f64>> {
    let frame = t.frame();
    let exact = |g: &Isometry| translation_sq_size(frame, g);
    let d = match (exact(phi), exact(psi)) {
        (Some(a), Some(b)) => to_f64(&a.max(b)).sqrt(),
        _ => iso_size(frame, origin, phi)?.max(iso_size(frame, origin, psi)?),
    };
    Ok((d > 0.0).then(|| 1.0 / (2.0 * d)))
}

fn patches_agree(a: &PeriodicTiling, b: &PeriodicTiling, origin: &Point, r2: &Rational) -> bool {
    r2.is_zero() || a.patch(origin, r2).tiles == b.patch(origin, r2).tiles
}

/// Re-checks the patch agreement and the size constraints of a witness.
pub fn verify_witness(origin: &Point, t: &PeriodicTiling, t2: &PeriodicTiling, w: &Witness) -> Result<bool> {
    let frame = t.frame();
    let a = t.transform(&w.phi)?;
    let b = t2.transform(&w.psi)?;
    let agree = match &w.agreement_sq {
        None => a.same_tiling(&b),
        Some(r2) => patches_agree(&a, &b, origin, r2),
    };
    if !agree {
        return Ok(false);
    }
    let Some(r) = w.radius else {
        return Ok(w.agreement_sq.is_none() && w.phi.is_identity() && w.psi.is_identity());
    };
    if let Some(r2) = &w.agreement_sq {
        if r * r > to_f64(r2) * (1.0 + METRIC_TOL) + METRIC_TOL {
            return Ok(false);
        }
    }
    let limit = 1.0 / (2.0 * r) + METRIC_TOL;
    Ok(iso_size(frame, origin, &w.phi)? <= limit && iso_size(frame, origin, &w.psi)? <= limit)
}

/// Largest verified squared radius of patch agreement in `[0, hi2]`, by bisection.
fn search_agreement(a: &PeriodicTiling, b: &PeriodicTiling, origin: &Point, hi2: &Rational) -> Option<Rational> {
    if patches_agree(a, b, origin, hi2) {
        return Some(hi2.clone());
    }
    let mut lo: Option<Rational> = None;
    let mut lo_v = Rational::zero();
    let mut hi_v = hi2.clone();
    for _ in 0..SEARCH_STEPS {
        let mid = (&lo_v + &hi_v) / q(2);
        if patches_agree(a, b, origin, &mid) {
            lo = Some(mid.clone());
            lo_v = mid;
        } else {
            hi_v = mid;
        }
    }
    lo
}

struct Candidate {
    phi: Isometry,
    psi: Isometry,
    a: PeriodicTiling,
    b: PeriodicTiling,
    size: Option<f64>,
}

fn radius_at_least(r: Option<f64>, s: Option<f64>) -> bool {
    match (r, s) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x >= y,
    }
}

/// Patch-agreement witness for a pair whose transformed tilings differ.
fn search_witness(c: &Candidate, origin: &Point, search_r2: &Rational) -> Option<Witness> {
    let cap2 = match c.size {
        Some(r) => rational_below(r * r, 1 << 40).min(search_r2.clone()),
        None => search_r2.clone(),
    };
    if !cap2.is_positive() {
        return None;
    }
    search_agreement(&c.a, &c.b, origin, &cap2).map(|r2| {
        let r = to_f64(&r2).sqrt();
        Witness { phi: c.phi.clone(), psi: c.psi.clone(), radius: Some(c.size.map_or(r, |s| s.min(r))), agreement_sq: Some(r2) }
    })
}

/// Shortest representative of `v` modulo the period lattice of `t`.
fn reduce_shift(t: &PeriodicTiling, v: &QVector) -> QVector {
    let base = t.lattice().mul_vec(&t.lattice_coords(v).floor());
    let r = v - &base;
    let n = t.dim();
    let frame = t.frame();
    let mut best = r.clone();
    let mut best_n = frame.sq_norm(&r);
    for mask in 0..3usize.pow(n as u32) {
        let mut k = Vec::with_capacity(n);
        let mut m = mask;
        for _ in 0..n {
            k.push((m % 3) as i64 - 1);
            m /= 3;
        }
        let cand = &r - &t.lattice().mul_vec(&QVector::from_ints(&k));
        let norm = frame.sq_norm(&cand);
        if norm < best_n {
            best_n = norm;
            best = cand;
        }
    }
    best
}

/// `(𝟙, 𝟙)` plus the half-shift pairs `(τ/2, −τ/2)` for every relative
/// translation of the anchor tile of `t` onto a translate-equal tile of `t2`.
fn default_candidates(t: &PeriodicTiling, t2: &PeriodicTiling) -> Vec<(Isometry, Isometry)> {
    let n = t.dim();
    let mut out = vec![(Isometry::identity(n), Isometry::identity(n))];
    let anchor = &t.cell_tiles()[0];
    let half = Rational::new(1.into(), 2.into());
    let mut seen = Vec::new();
    for c in t2.cell_tiles() {
        let tau = c.lex_min_vertex() - anchor.lex_min_vertex();
        if &anchor.translate(&tau) != c {
            continue;
        }
        let tau = reduce_shift(t, &tau);
        if tau.is_zero() || seen.contains(&tau) {
            continue;
        }
        seen.push(tau.clone());
        let h = tau.scale(&half);
        out.push((Isometry::translation_by(h.clone()), Isometry::translation_by(-&h)));
    }
    out
}

/// Default search radius: four tile diameters.
fn default_search_r2(t: &PeriodicTiling) -> Rational {
    let frame = t.frame();
    let diam2 = t
        .cell_tiles()
        .iter()
        .map(|c| c.max_sq_distance(frame, c.lex_min_vertex()))
        .max()
        .expect("tiles");
    diam2 * q(16)
}

/// Certified upper bound on `d_O(T, T')` from a finite set of candidate pairs.
pub fn distance_upper_bound(
    origin: &Point,
    t: &PeriodicTiling,
    t2: &PeriodicTiling,
    candidates: Option<&[(Isometry, Isometry)]>,
    search_r2: Option<Rational>,
) -> Result<DistanceBound> {
    if t.frame() != t2.frame() {
        return Err(Error::FrameMismatch("tilings live in different frames".into()));
    }
    let owned;
    let cands: &[(Isometry, Isometry)] = match candidates {
        Some(c) if c.is_empty() => return Err(Error::Precondition("empty candidate set".into())),
        Some(c) => c,
        None => {
            owned = default_candidates(t, t2);
            &owned
        }
    };
    let search_r2 = search_r2.unwrap_or_else(|| default_search_r2(t));
    // Globally equal pairs need no patch search; the rest only matter if
    // they could beat the best radius found so far.
    let mut best: Option<Witness> = None;
    let mut pending = Vec::new();
    for (phi, psi) in cands {
        let c = Candidate {
            phi: phi.clone(),
            psi: psi.clone(),
            a: t.transform(phi)?,
            b: t2.transform(psi)?,
            size: size_radius(t, origin, phi, psi)?,
        };
        if c.a.same_tiling(&c.b) {
            if best.as_ref().map_or(true, |w| !radius_at_least(w.radius, c.size)) {
                best = Some(Witness { phi: c.phi, psi: c.psi, agreement_sq: None, radius: c.size });
            }
        } else {
            pending.push(c);
        }
    }
    for c in &pending {
        if let Some(w) = &best {
            let reach = c.size.map_or(to_f64(&search_r2).sqrt(), |s| s.min(to_f64(&search_r2).sqrt()));
            if radius_at_least(w.radius, Some(reach)) {
                continue;
            }
        }
        if let Some(w) = search_witness(c, origin, &search_r2) {
            if best.as_ref().map_or(true, |b| !radius_at_least(b.radius, w.radius)) {
                best = Some(w);
            }
        }
    }
    let witness = best.unwrap_or_else(|| Witness {
        phi: Isometry::identity(t.dim()),
        psi: Isometry::identity(t.dim()),
        agreement_sq: Some(Rational::zero()),
        radius: Some(0.0),
    });
    Ok(DistanceBound { origin: origin.clone(), upper: bound_from_radius(witness.radius), witness, lower: None })
}

/// Composes a witness for `(T, T')` with one for `(T', T'')`.
///
/// With `w1 = (φ, ψ)` at radius `r` and `w2 = (χ, ω)` at radius `r'`, the
/// pair `(χφ, ψ̄ω)` with `ψ̄ = χψχ⁻¹` agrees on `B_{r0}(O)` for
/// `r0 = rr'/(r + r')`. Its sizes are bounded by `1/(2r0)` and
/// `1/(2r0) + 1/(4rr')`, so the certified radius `r''` satisfies
/// `1/r'' = 1/r0 + 1/(2rr')`.
pub fn combine_witnesses(
    origin: &Point,
    t: &PeriodicTiling,
    t2: &PeriodicTiling,
    t3: &PeriodicTiling,
    w1: &Witness,
    w2: &Witness,
) -> Result<Witness> {
    let r = w1.radius.unwrap_or(LARGE_RADIUS);
    let rp = w2.radius.unwrap_or(LARGE_RADIUS);
    if r <= 2.0 || rp <= 2.0 {
        return Err(Error::Precondition(format!("witness radii must exceed 2, got {r} and {rp}")));
    }
    if !verify_witness(origin, t, t2, w1)? || !verify_witness(origin, t2, t3, w2)? {
        return Err(Error::WitnessFailed("input witness does not verify".into()));
    }
    let chi = &w2.phi;
    let psi_bar = chi.conjugate(&w1.psi);
    let phi = chi * &w1.phi;
    let psi = &psi_bar * &w2.psi;
    let r0 = r * rp / (r + rp);
    let r_cert = 1.0 / (1.0 / r0 + 1.0 / (2.0 * r * rp));
    let agreement_sq = if w1.agreement_sq.is_none() && w2.agreement_sq.is_none() {
        None
    } else {
        Some(rational_below(r0 * r0, 1 << 30))
    };
    let w = Witness { phi, psi, agreement_sq, radius: Some(r_cert) };
    if !verify_witness(origin, t, t3, &w)? {
        return Err(Error::WitnessFailed(format!("combined witness at r0 = {r0} does not re-verify")));
    }
    Ok(w)
}

impl DistanceBound {
    pub fn verify(&self, t: &PeriodicTiling, t2: &PeriodicTiling) -> Result<bool> {
        Ok(verify_witness(&self.origin, t, t2, &self.witness)?
            && (self.upper - bound_from_radius(self.witness.radius)).abs() <= METRIC_TOL)
    }
}
