#![allow(dead_code)]

use crystile_core::isometry::Frame;
use crystile_core::rational::{q, qf};
use crystile_core::{ConvexPolytope, Isometry, PeriodicTiling, QMatrix, QVector, Rational};
use proptest::prelude::*;

pub mod metric;

pub fn square_tile(x0: i64, y0: i64) -> ConvexPolytope {
    ConvexPolytope::from_vertices(vec![
        QVector::from_ints(&[x0, y0]),
        QVector::from_ints(&[x0 + 1, y0]),
        QVector::from_ints(&[x0, y0 + 1]),
        QVector::from_ints(&[x0 + 1, y0 + 1]),
    ])
    .unwrap()
}

pub fn square_tiling() -> PeriodicTiling {
    PeriodicTiling::new(Frame::standard(2), vec![square_tile(0, 0)]).unwrap()
}

pub fn rhomb_tiling() -> PeriodicTiling {
    let rhomb = ConvexPolytope::from_vertices(vec![
        QVector::from_ints(&[0, 0]),
        QVector::from_ints(&[1, 0]),
        QVector::from_ints(&[2, 1]),
        QVector::from_ints(&[1, 1]),
    ])
    .unwrap();
    PeriodicTiling::new(Frame::standard(2), vec![rhomb]).unwrap()
}

pub fn half_scale_tiling() -> PeriodicTiling {
    let half = QMatrix::identity(2).scale(&qf(1, 2));
    let tile = square_tile(0, 0).map(&Isometry::from_parts(half.clone(), QVector::zeros(2)));
    PeriodicTiling::with_lattice(Frame::standard(2), half, vec![tile]).unwrap()
}

/// Triangles: each unit square cut along its diagonal.
pub fn triangle_tiling() -> PeriodicTiling {
    let a = ConvexPolytope::from_vertices(vec![QVector::from_ints(&[0, 0]), QVector::from_ints(&[1, 0]), QVector::from_ints(&[1, 1])]).unwrap();
    let b = ConvexPolytope::from_vertices(vec![QVector::from_ints(&[0, 0]), QVector::from_ints(&[0, 1]), QVector::from_ints(&[1, 1])]).unwrap();
    PeriodicTiling::new(Frame::standard(2), vec![a, b]).unwrap()
}

pub fn fixture(i: usize) -> PeriodicTiling {
    match i % 4 {
        0 => square_tiling(),
        1 => rhomb_tiling(),
        2 => half_scale_tiling(),
        _ => triangle_tiling(),
    }
}

/// Cayley transform `(1 + S)(1 - S)⁻¹` of a skew matrix: rational and orthogonal.
pub fn cayley(params: &[Rational], n: usize) -> QMatrix {
    let mut s = QMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            s[(i, j)] = params[k].clone();
            s[(j, i)] = -params[k].clone();
            k += 1;
        }
    }
    let id = QMatrix::identity(n);
    &(&id + &s) * &(&id - &s).inverse().expect("1 - S is invertible for skew S")
}

pub fn reflection(n: usize) -> QMatrix {
    let mut d = vec![q(1); n];
    d[0] = q(-1);
    QMatrix::diagonal(&d)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| qf(a, b))
}

/// Rational orthogonal matrices of `E^n` with the standard inner product.
pub fn orthogonal(n: usize) -> impl Strategy<Value = QMatrix> {
    (prop::collection::vec(small_rational(), n * (n - 1) / 2), any::<bool>()).prop_map(move |(p, flip)| {
        let r = cayley(&p, n);
        if flip {
            &r * &reflection(n)
        } else {
            r
        }
    })
}

pub fn vector(n: usize) -> impl Strategy<Value = QVector> {
    prop::collection::vec((-20i64..=20, 1i64..=8), n).prop_map(|v| QVector::new(v.into_iter().map(|(a, b)| qf(a, b)).collect()))
}

pub fn isometry(n: usize) -> impl Strategy<Value = Isometry> {
    (orthogonal(n), vector(n)).prop_map(|(l, t)| Isometry::from_parts(l, t))
}

pub fn translation(n: usize) -> impl Strategy<Value = Isometry> {
    vector(n).prop_map(Isometry::translation_by)
}
