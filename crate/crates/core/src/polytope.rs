//! Exact convex polytopes in dimension at most 3.
//!
//! Half-spaces are stored as covectors, `c · x ≥ b`, so they do not depend
//! on the Gram matrix; [`HalfSpace::from_normal`] builds one from a normal
//! vector and the frame's inner product. Every polytope is full-dimensional
//! and keeps both its vertices (sorted, which is the canonical form) and its
//! facet inequalities.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::isometry::{Frame, Isometry};
use nalgebra::{DMatrix, DVector};

use crate::rational::{common_denominator, to_f64, Point, QMatrix, QVector, Rational};

pub const MAX_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpace {
    coeffs: QVector,
    offset: Rational,
}

impl HalfSpace {
    /// `{x : coeffs · x ≥ offset}`.
    pub fn new(coeffs: QVector, offset: Rational) -> Result<Self> {
        if coeffs.is_zero() {
            return Err(Error::ZeroNormal);
        }
        Ok(HalfSpace { coeffs, offset }.normalized())
    }

    /// `{x : ⟨normal, x⟩_G ≥ offset}`.
    pub fn from_normal(frame: &Frame, normal: &QVector, offset: Rational) -> Result<Self> {
        HalfSpace::new(frame.gram().mul_vec(normal), offset)
    }

    fn normalized(self) -> Self {
        let lead = self.coeffs.iter().find(|c| !c.is_zero()).expect("nonzero").abs();
        if lead.is_one() {
            return self;
        }
        let s = lead.recip();
        HalfSpace { coeffs: self.coeffs.scale(&s), offset: &self.offset * &s }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn coeffs(&self) -> &QVector {
        &self.coeffs
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    /// `coeffs · x − offset`; nonnegative exactly on the half-space.
    pub fn eval(&self, x: &Point) -> Rational {
        self.coeffs.dot(x) - &self.offset
    }

    pub fn contains(&self, x: &Point) -> bool {
        !self.eval(x).is_negative()
    }

    pub fn complement(&self) -> HalfSpace {
        HalfSpace { coeffs: -&self.coeffs, offset: -self.offset.clone() }.normalized()
    }

    pub fn map(&self, g: &Isometry) -> HalfSpace {
        let linv = g.linear().inverse().expect("isometries are invertible");
        let coeffs = linv.transpose().mul_vec(&self.coeffs);
        let offset = &self.offset + &coeffs.dot(g.translation());
        HalfSpace { coeffs, offset }.normalized()
    }

    pub fn translate(&self, v: &QVector) -> HalfSpace {
        HalfSpace { coeffs: self.coeffs.clone(), offset: &self.offset + &self.coeffs.dot(v) }
    }
}

impl fmt::Display for HalfSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} · x ≥ {}", self.coeffs, self.offset)
    }
}

/// A face given by its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    pub vertices: Vec<Point>,
}

#[derive(Clone, Debug)]
struct FaceLattice {
    /// `(dim, sorted vertex indices)`, sorted by dimension; includes the polytope itself.
    faces: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug)]
pub struct ConvexPolytope {
    vertices: Vec<Point>,
    facets: Vec<HalfSpace>,
    lattice: OnceLock<FaceLattice>,
}

#[derive(Clone, Debug)]
pub enum Intersection {
    Polytope(ConvexPolytope),
    Unbounded,
    Empty,
    /// Nonempty with empty interior.
    LowerDimensional,
}

impl Intersection {
    pub fn polytope(self) -> Option<ConvexPolytope> {
        match self {
            Intersection::Polytope(p) => Some(p),
            _ => None,
        }
    }
}

/// Rank of the affine span of `points` (`-1` is reported as 0 for no points).
pub fn affine_rank(points: &[Point]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let rows: Vec<Vec<Rational>> = points[1..].iter().map(|p| (p - &points[0]).into_inner()).collect();
    QMatrix::from_rows(rows).rank()
}

fn rank_of(rows: Vec<QVector>, n: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = QMatrix::from_rows(rows.into_iter().map(QVector::into_inner).collect());
    debug_assert_eq!(m.cols(), n);
    m.rank()
}

/// Indices of an affinely independent subset of maximal size, greedily from the front.
fn independent_subset(points: &[Point]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rank = 0;
    for i in 0..points.len() {
        if chosen.is_empty() {
            chosen.push(i);
            continue;
        }
        let mut trial: Vec<Point> = chosen.iter().map(|&j| points[j].clone()).collect();
        trial.push(points[i].clone());
        let r = affine_rank(&trial);
        if r > rank {
            rank = r;
            chosen.push(i);
        }
    }
    chosen
}

fn hyperplane_through(points: &[&Point], n: usize) -> Option<QVector> {
    let mut m = QMatrix::zeros(points.len() - 1, n);
    for (i, p) in points[1..].iter().enumerate() {
        let d = *p - points[0];
        for j in 0..n {
            m[(i, j)] = d[j].clone();
        }
    }
    let k = m.kernel();
    (k.len() == 1).then(|| k.into_iter().next().expect("one kernel vector"))
}

fn subsets(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::with_capacity(k), &mut f);
}

/// Unit-normalised float copy of a half-space.
fn float_row(h: &HalfSpace) -> (Vec<f64>, f64) {
    let c = h.coeffs.to_f64();
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    (c.iter().map(|x| x / norm).collect(), to_f64(&h.offset) / norm)
}

/// Whether a float solve shows the basic solution of `rows` to violate some
/// constraint by a clear margin. Ill-conditioned systems are never rejected.
fn clearly_infeasible(rows: &[&(Vec<f64>, f64)], cons: &[(Vec<f64>, f64)], n: usize) -> bool {
    let a = DMatrix::from_fn(n, n, |i, j| rows[i].0[j]);
    let b = DVector::from_fn(n, |i, _| rows[i].1);
    if a.determinant().abs() < 1e-6 {
        return false;
    }
    let Some(x) = a.lu().solve(&b) else { return false };
    let scale = 1.0 + x.amax();
    cons.iter().any(|(c, off)| c.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() - off < -1e-7 * scale)
}

/// Feasible basic solutions of a system of half-spaces and equations.
fn basic_solutions(constraints: &[HalfSpace], equations: &[HalfSpace], n: usize) -> BTreeSet<Point> {
    let mut out = BTreeSet::new();
    let k = n.saturating_sub(equations.len());
    let fc: Vec<(Vec<f64>, f64)> = constraints.iter().map(float_row).collect();
    let fe: Vec<(Vec<f64>, f64)> = equations.iter().map(float_row).collect();
    subsets(constraints.len(), k, |idx| {
        let frows: Vec<&(Vec<f64>, f64)> = fe.iter().chain(idx.iter().map(|&i| &fc[i])).collect();
        if frows.len() == n && clearly_infeasible(&frows, &fc, n) {
            return;
        }
        let rows: Vec<&HalfSpace> = equations.iter().chain(idx.iter().map(|&i| &constraints[i])).collect();
        let a = QMatrix::from_rows(rows.iter().map(|h| h.coeffs.clone().into_inner()).collect());
        let b = QVector::new(rows.iter().map(|h| h.offset.clone()).collect());
        if let Some(x) = a.solve(&b) {
            if constraints.iter().all(|h| h.contains(&x)) && equations.iter().all(|h| h.eval(&x).is_zero()) {
                out.insert(x);
            }
        }
    });
    out
}

struct ClipVertex {
    point: Point,
    tight: Vec<usize>,
}

fn common(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|i| b.binary_search(i).is_ok()).copied().collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|i| b.binary_search(i).is_ok())
}

fn adjacent(vs: &[ClipVertex], i: usize, j: usize, cons: &[HalfSpace], n: usize) -> bool {
    let c = common(&vs[i].tight, &vs[j].tight);
    if c.len() + 1 < n {
        return false;
    }
    if rank_of(c.iter().map(|&k| cons[k].coeffs.clone()).collect(), n) != n - 1 {
        return false;
    }
    !vs.iter().enumerate().any(|(k, w)| k != i && k != j && is_subset(&c, &w.tight))
}

/// Coordinate bound exceeding every vertex of every subsystem (Hadamard).
fn cramer_bound(hs: &[HalfSpace], n: usize) -> Rational {
    let mut max_sq = BigInt::one();
    for h in hs {
        let den = common_denominator(h.coeffs.iter().chain(std::iter::once(&h.offset)));
        let sq: BigInt = h
            .coeffs
            .iter()
            .chain(std::iter::once(&h.offset))
            .map(|c| {
                let v = (c * Rational::from_integer(den.clone())).to_integer();
                &v * &v
            })
            .sum();
        if sq > max_sq {
            max_sq = sq;
        }
    }
    Rational::from_integer(max_sq.pow(n as u32).sqrt() + BigInt::from(2))
}

/// Exact intersection of half-spaces in dimension at most 3 by incremental
/// clipping of a box that provably contains all vertices.
pub fn halfspace_intersection(hs: &[HalfSpace]) -> Result<Intersection> {
    let n = hs.first().map(HalfSpace::dim).ok_or_else(|| Error::Precondition("no half-spaces".into()))?;
    if hs.iter().any(|h| h.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: hs.iter().map(HalfSpace::dim).find(|&d| d != n).unwrap_or(n) });
    }
    if n == 0 || n > MAX_DIM {
        return Err(Error::Precondition(format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    let m = cramer_bound(hs, n);
    let mut cons: Vec<HalfSpace> = Vec::with_capacity(2 * n + hs.len());
    for i in 0..n {
        cons.push(HalfSpace { coeffs: QVector::unit(n, i), offset: -m.clone() });
        cons.push(HalfSpace { coeffs: -&QVector::unit(n, i), offset: -m.clone() });
    }
    let n_box = cons.len();
    cons.extend(hs.iter().cloned());

    let mut verts: Vec<ClipVertex> = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << n) {
        let coords = (0..n).map(|i| if mask >> i & 1 == 1 { m.clone() } else { -m.clone() }).collect();
        let tight = (0..n).map(|i| 2 * i + (mask >> i & 1)).collect();
        verts.push(ClipVertex { point: QVector::new(coords), tight });
    }

    for h in n_box..cons.len() {
        let s: Vec<Rational> = verts.iter().map(|v| cons[h].eval(&v.point)).collect();
        let max = s.iter().max().expect("nonempty").clone();
        if max.is_negative() {
            return Ok(Intersection::Empty);
        }
        if max.is_zero() {
            return Ok(if basic_solutions(&cons, &[], n).is_empty() {
                Intersection::Empty
            } else {
                Intersection::LowerDimensional
            });
        }
        let mut next: Vec<ClipVertex> = Vec::with_capacity(verts.len() + 4);
        for i in 0..verts.len() {
            if !s[i].is_positive() {
                continue;
            }
            for j in 0..verts.len() {
                if s[j].is_negative() && adjacent(&verts, i, j, &cons, n) {
                    let lambda = &s[i] / (&s[i] - &s[j]);
                    let point = &verts[i].point + &(&verts[j].point - &verts[i].point).scale(&lambda);
                    let mut tight = common(&verts[i].tight, &verts[j].tight);
                    tight.push(h);
                    next.push(ClipVertex { point, tight });
                }
            }
        }
        for (i, v) in verts.into_iter().enumerate() {
            if s[i].is_zero() {
                let mut tight = v.tight;
                tight.push(h);
                next.push(ClipVertex { point: v.point, tight });
            } else if s[i].is_positive() {
                next.push(v);
            }
        }
        verts = next;
    }

    if verts.iter().any(|v| v.tight.iter().any(|&k| k < n_box)) {
        return Ok(Intersection::Unbounded);
    }
    let points: Vec<Point> = verts.iter().map(|v| v.point.clone()).collect();
    let mut facets: Vec<HalfSpace> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for h in n_box..cons.len() {
        let on: Vec<usize> = (0..verts.len()).filter(|&i| verts[i].tight.contains(&h)).collect();
        if on.len() < n {
            continue;
        }
        let pts: Vec<Point> = on.iter().map(|&i| points[i].clone()).collect();
        if affine_rank(&pts) == n - 1 && seen.insert(on) {
            facets.push(cons[h].clone());
        }
    }
    Ok(Intersection::Polytope(ConvexPolytope::from_parts(points, facets)))
}

impl ConvexPolytope {
    fn from_parts(mut vertices: Vec<Point>, mut facets: Vec<HalfSpace>) -> Self {
        vertices.sort();
        facets.sort();
        ConvexPolytope { vertices, facets, lattice: OnceLock::new() }
    }

    /// Convex hull of a finite point set; the hull must be full-dimensional.
    pub fn from_vertices(points: Vec<Point>) -> Result<Self> {
        let pts: Vec<Point> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let n = pts.first().map(QVector::dim).ok_or_else(|| Error::DegeneratePolytope("no points".into()))?;
        if n == 0 || n > MAX_DIM {
            return Err(Error::Precondition(format!("dimension {n} outside 1..={MAX_DIM}")));
        }
        if pts.iter().any(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: pts.iter().map(QVector::dim).find(|&d| d != n).unwrap_or(n) });
        }
        if affine_rank(&pts) < n {
            return Err(Error::DegeneratePolytope("points are not full-dimensional".into()));
        }
        let mut facets: BTreeSet<HalfSpace> = BTreeSet::new();
        subsets(pts.len(), n, |idx| {
            let chosen: Vec<&Point> = idx.iter().map(|&i| &pts[i]).collect();
            let Some(c) = hyperplane_through(&chosen, n) else { return };
            let b = c.dot(chosen[0]);
            let vals: Vec<Rational> = pts.iter().map(|p| c.dot(p) - &b).collect();
            if vals.iter().all(|v| !v.is_negative()) {
                facets.insert(HalfSpace { coeffs: c, offset: b }.normalized());
            } else if vals.iter().all(|v| !v.is_positive()) {
                facets.insert(HalfSpace { coeffs: -&c, offset: -b }.normalized());
            }
        });
        let facets: Vec<HalfSpace> = facets.into_iter().collect();
        let vertices: Vec<Point> = pts
            .into_iter()
            .filter(|p| {
                let tight: Vec<QVector> =
                    facets.iter().filter(|h| h.eval(p).is_zero()).map(|h| h.coeffs.clone()).collect();
                rank_of(tight, n) == n
            })
            .collect();
        Ok(ConvexPolytope::from_parts(vertices, facets))
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[HalfSpace] {
        &self.facets
    }

    pub fn lex_min_vertex(&self) -> &Point {
        &self.vertices[0]
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.facets.iter().all(|h| h.contains(x))
    }

    pub fn contains_interior(&self, x: &Point) -> bool {
        self.facets.iter().all(|h| h.eval(x).is_positive())
    }

    /// Vertex average, an interior point.
    pub fn centroid(&self) -> Point {
        let n = self.dim();
        let mut acc = QVector::zeros(n);
        for v in &self.vertices {
            acc = &acc + v;
        }
        acc.scale(&Rational::new(BigInt::one(), BigInt::from(self.vertices.len())))
    }

    /// Coordinate-wise bounding box.
    pub fn bbox(&self) -> (QVector, QVector) {
        let n = self.dim();
        let lo = (0..n).map(|i| self.vertices.iter().map(|v| v[i].clone()).min().expect("vertices")).collect();
        let hi = (0..n).map(|i| self.vertices.iter().map(|v| v[i].clone()).max().expect("vertices")).collect();
        (QVector::new(lo), QVector::new(hi))
    }

    fn face_lattice(&self) -> &FaceLattice {
        self.lattice.get_or_init(|| {
            let n = self.dim();
            let mut sets: BTreeSet<Vec<usize>> = self
                .facets
                .iter()
                .map(|h| (0..self.vertices.len()).filter(|&i| h.eval(&self.vertices[i]).is_zero()).collect())
                .collect();
            let mut frontier: Vec<Vec<usize>> = sets.iter().cloned().collect();
            let facet_sets = frontier.clone();
            while !frontier.is_empty() {
                let mut new = Vec::new();
                for a in &frontier {
                    for b in &facet_sets {
                        let c = common(a, b);
                        if !c.is_empty() && sets.insert(c.clone()) {
                            new.push(c);
                        }
                    }
                }
                frontier = new;
            }
            let mut faces: Vec<(usize, Vec<usize>)> = sets
                .into_iter()
                .map(|s| {
                    let pts: Vec<Point> = s.iter().map(|&i| self.vertices[i].clone()).collect();
                    (affine_rank(&pts), s)
                })
                .collect();
            faces.push((n, (0..self.vertices.len()).collect()));
            faces.sort();
            FaceLattice { faces }
        })
    }

    /// All `m`-faces for `0 ≤ m < dim`.
    pub fn faces(&self, m: usize) -> Result<Vec<Face>> {
        if m >= self.dim() {
            return Err(Error::Precondition(format!("face dimension {m} must be below {}", self.dim())));
        }
        Ok(self
            .face_lattice()
            .faces
            .iter()
            .filter(|(d, _)| *d == m)
            .map(|(d, s)| Face { dim: *d, vertices: s.iter().map(|&i| self.vertices[i].clone()).collect() })
            .collect())
    }

    /// All proper faces together with the polytope itself.
    pub fn all_faces(&self) -> Vec<Face> {
        self.face_lattice()
            .faces
            .iter()
            .map(|(d, s)| Face { dim: *d, vertices: s.iter().map(|&i| self.vertices[i].clone()).collect() })
            .collect()
    }

    pub fn is_face(&self, points: &[Point]) -> bool {
        let set: BTreeSet<&Point> = points.iter().collect();
        self.face_lattice().faces.iter().any(|(_, s)| {
            s.len() == set.len() && s.iter().all(|&i| set.contains(&self.vertices[i]))
        })
    }

    pub fn edges(&self) -> Vec<(Point, Point)> {
        self.face_lattice()
            .faces
            .iter()
            .filter(|(d, _)| *d == 1)
            .map(|(_, s)| (self.vertices[s[0]].clone(), self.vertices[s[1]].clone()))
            .collect()
    }

    /// Sorted squared edge lengths.
    pub fn sq_edge_lengths(&self, frame: &Frame) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.edges().iter().map(|(a, b)| frame.sq_dist(a, b)).collect();
        out.sort();
        out
    }

    /// Triangulation into simplices by pulling from the lowest vertex of each face.
    pub fn simplices(&self) -> Vec<Vec<Point>> {
        let lat = self.face_lattice();
        fn rec(face: &(usize, Vec<usize>), lat: &FaceLattice, out: &mut Vec<Vec<usize>>) {
            let (d, s) = face;
            if *d == 0 {
                out.push(vec![s[0]]);
                return;
            }
            let apex = s[0];
            for sub in lat.faces.iter().filter(|(e, t)| *e + 1 == *d && !t.contains(&apex) && is_subset(t, s)) {
                let mut parts = Vec::new();
                rec(sub, lat, &mut parts);
                for mut p in parts {
                    p.push(apex);
                    out.push(p);
                }
            }
        }
        let top = lat.faces.last().expect("polytope face");
        let mut idx = Vec::new();
        rec(top, lat, &mut idx);
        idx.into_iter().map(|s| s.into_iter().map(|i| self.vertices[i].clone()).collect()).collect()
    }

    /// Volume in units of the frame's fundamental parallelepiped.
    pub fn volume(&self) -> Rational {
        self.simplices().iter().map(|s| simplex_volume(s)).sum()
    }

    pub fn map(&self, g: &Isometry) -> ConvexPolytope {
        ConvexPolytope::from_parts(
            self.vertices.iter().map(|v| g.apply(v)).collect(),
            self.facets.iter().map(|h| h.map(g)).collect(),
        )
    }

    pub fn translate(&self, v: &QVector) -> ConvexPolytope {
        let lattice = OnceLock::new();
        if let Some(l) = self.lattice.get() {
            let _ = lattice.set(l.clone());
        }
        // Translation preserves the vertex order, so the face lattice carries over.
        ConvexPolytope {
            vertices: self.vertices.iter().map(|p| p + v).collect(),
            facets: self.facets.iter().map(|h| h.translate(v)).collect(),
            lattice,
        }
    }

    /// Exact squared distance from `x` to the polytope.
    ///
    /// The nearest point lies in the relative interior of some face and is
    /// the orthogonal projection onto that face's affine hull.
    pub fn sq_distance(&self, frame: &Frame, x: &Point) -> Rational {
        if self.contains(x) {
            return Rational::zero();
        }
        let mut best: Option<Rational> = None;
        for (d, s) in &self.face_lattice().faces {
            if *d == self.dim() {
                continue;
            }
            let pts: Vec<Point> = s.iter().map(|&i| self.vertices[i].clone()).collect();
            let p = project_affine(frame, &pts, x);
            if self.contains(&p) {
                let dist = frame.sq_dist(x, &p);
                if best.as_ref().map_or(true, |b| dist < *b) {
                    best = Some(dist);
                }
            }
        }
        best.expect("some face contains the nearest point")
    }

    pub fn intersects_ball(&self, frame: &Frame, center: &Point, r2: &Rational) -> bool {
        if self.vertices.iter().any(|v| frame.sq_dist(v, center) <= *r2) {
            return true;
        }
        self.sq_distance(frame, center) <= *r2
    }

    /// Largest squared distance from `x` to a vertex.
    pub fn max_sq_distance(&self, frame: &Frame, x: &Point) -> Rational {
        self.vertices.iter().map(|v| frame.sq_dist(v, x)).max().expect("vertices")
    }
}

fn simplex_volume(s: &[Point]) -> Rational {
    let n = s.len() - 1;
    let rows: Vec<Vec<Rational>> = s[1..].iter().map(|p| (p - &s[0]).into_inner()).collect();
    let det = QMatrix::from_rows(rows).det().abs();
    let fact: u64 = (1..=n as u64).product();
    det / Rational::from_integer(BigInt::from(fact))
}

/// Orthogonal projection of `x` onto the affine hull of `pts`.
fn project_affine(frame: &Frame, pts: &[Point], x: &Point) -> Point {
    let basis = independent_subset(pts);
    if basis.len() == 1 {
        return pts[basis[0]].clone();
    }
    let p0 = &pts[basis[0]];
    let dirs: Vec<QVector> = basis[1..].iter().map(|&i| &pts[i] - p0).collect();
    let k = dirs.len();
    let mut a = QMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            a[(i, j)] = frame.inner(&dirs[i], &dirs[j]);
        }
    }
    let w = x - p0;
    let b = QVector::new(dirs.iter().map(|d| frame.inner(d, &w)).collect());
    let lambda = a.solve(&b).expect("independent directions");
    let mut p = p0.clone();
    for (d, l) in dirs.iter().zip(lambda.iter()) {
        p = &p + &d.scale(l);
    }
    p
}

impl PartialEq for ConvexPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for ConvexPolytope {}

impl Hash for ConvexPolytope {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.vertices.hash(state);
    }
}

impl PartialOrd for ConvexPolytope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ConvexPolytope {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices.cmp(&other.vertices)
    }
}

impl fmt::Display for ConvexPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "conv{{{}}}", vs.join(", "))
    }
}

/// An isometry mapping `p` onto `q`, if one exists.
pub fn congruent(frame: &Frame, p: &ConvexPolytope, q: &ConvexPolytope) -> Option<Isometry> {
    let n = p.dim();
    if q.dim() != n || p.vertices.len() != q.vertices.len() || p.facets.len() != q.facets.len() {
        return None;
    }
    if p == q {
        return Some(Isometry::identity(n));
    }
    if p.sq_edge_lengths(frame) != q.sq_edge_lengths(frame) {
        return None;
    }
    let tuple = independent_subset(&p.vertices);
    debug_assert_eq!(tuple.len(), n + 1);
    let dp: Vec<Vec<Rational>> = tuple
        .iter()
        .map(|&a| tuple.iter().map(|&b| frame.sq_dist(&p.vertices[a], &p.vertices[b])).collect())
        .collect();
    let mut src = QMatrix::zeros(n, n);
    for (k, &i) in tuple[1..].iter().enumerate() {
        let d = &p.vertices[i] - &p.vertices[tuple[0]];
        for r in 0..n {
            src[(r, k)] = d[r].clone();
        }
    }
    let src_inv = src.inverse().expect("affinely independent");

    let mut chosen: Vec<usize> = Vec::with_capacity(n + 1);
    fn rec(
        frame: &Frame,
        p: &ConvexPolytope,
        q: &ConvexPolytope,
        tuple: &[usize],
        dp: &[Vec<Rational>],
        src_inv: &QMatrix,
        chosen: &mut Vec<usize>,
    ) -> Option<Isometry> {
        let k = chosen.len();
        let n = p.dim();
        if k == tuple.len() {
            let mut dst = QMatrix::zeros(n, n);
            for (c, &j) in chosen[1..].iter().enumerate() {
                let d = &q.vertices[j] - &q.vertices[chosen[0]];
                for r in 0..n {
                    dst[(r, c)] = d[r].clone();
                }
            }
            let l = &dst * src_inv;
            if !frame.is_gram_orthogonal(&l) {
                return None;
            }
            let t = &q.vertices[chosen[0]] - &l.mul_vec(&p.vertices[tuple[0]]);
            let g = Isometry::from_parts(l, t);
            return (p.map(&g).vertices == q.vertices).then_some(g);
        }
        for j in 0..q.vertices.len() {
            if chosen.contains(&j) {
                continue;
            }
            if chosen.iter().enumerate().all(|(a, &c)| frame.sq_dist(&q.vertices[c], &q.vertices[j]) == dp[a][k]) {
                chosen.push(j);
                if let Some(g) = rec(frame, p, q, tuple, dp, src_inv, chosen) {
                    return Some(g);
                }
                chosen.pop();
            }
        }
        None
    }
    rec(frame, p, q, &tuple, &dp, &src_inv, &mut chosen)
}

/// How two polytopes with disjoint interiors meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Meeting {
    Disjoint,
    /// The intersection is a common face of the given dimension.
    SharedFace(usize),
    /// The intersection is not a face of at least one of the two.
    Violation(MeetViolation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetViolation {
    pub intersection: Vec<Point>,
    pub face_of_first: bool,
    pub face_of_second: bool,
}

impl fmt::Display for MeetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.intersection.iter().map(|v| v.to_string()).collect();
        write!(
            f,
            "intersection conv{{{}}} (face of first: {}, face of second: {})",
            vs.join(", "),
            self.face_of_first,
            self.face_of_second
        )
    }
}

/// Vertices of `p ∩ q` for dimension at most 3: vertices of either polytope
/// lying in the other, and crossings of an edge of one with a facet plane of
/// the other.
fn intersection_vertices(p: &ConvexPolytope, q: &ConvexPolytope) -> BTreeSet<Point> {
    let mut out = BTreeSet::new();
    for (a, b) in [(p, q), (q, p)] {
        out.extend(a.vertices.iter().filter(|v| b.contains(v)).cloned());
        for (u, v) in a.edges() {
            for h in &b.facets {
                let (eu, ev) = (h.eval(&u), h.eval(&v));
                if eu.is_positive() && ev.is_negative() || eu.is_negative() && ev.is_positive() {
                    let t = &eu / (&eu - &ev);
                    let x = &u + &(&v - &u).scale(&t);
                    if b.contains(&x) {
                        out.insert(x);
                    }
                }
            }
        }
    }
    out
}

fn separating(p: &ConvexPolytope, q: &ConvexPolytope) -> Option<(HalfSpace, bool)> {
    for h in &p.facets {
        let max = q.vertices.iter().map(|v| h.eval(v)).max().expect("vertices");
        if !max.is_positive() {
            return Some((h.clone(), max.is_negative()));
        }
    }
    None
}

/// Classifies `p ∩ q` as empty, a common face, or a face-to-face violation.
pub fn meet_face_to_face(p: &ConvexPolytope, q: &ConvexPolytope) -> Result<Meeting> {
    let n = p.dim();
    if q.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.dim() });
    }
    let (plo, phi) = p.bbox();
    let (qlo, qhi) = q.bbox();
    if (0..n).any(|i| phi[i] < qlo[i] || qhi[i] < plo[i]) {
        return Ok(Meeting::Disjoint);
    }
    let points = match separating(p, q).or_else(|| separating(q, p)) {
        Some((_, true)) => return Ok(Meeting::Disjoint),
        Some(_) => intersection_vertices(p, q),
        None => {
            let pts = intersection_vertices(p, q);
            let v: Vec<Point> = pts.iter().cloned().collect();
            if !v.is_empty() && affine_rank(&v) == n {
                return Err(Error::OverlappingInteriors);
            }
            pts
        }
    };
    if points.is_empty() {
        return Ok(Meeting::Disjoint);
    }
    let pts: Vec<Point> = points.into_iter().collect();
    let fp = p.is_face(&pts);
    let fq = q.is_face(&pts);
    if fp && fq {
        Ok(Meeting::SharedFace(affine_rank(&pts)))
    } else {
        Ok(Meeting::Violation(MeetViolation { intersection: pts, face_of_first: fp, face_of_second: fq }))
    }
}
