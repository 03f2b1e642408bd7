//! Checks of the identities satisfied by `d_O` and the operator norm.

use super::{isometry, orthogonal, translation, vector};
use crystile_core::isometry::{iso_distance, iso_size, linear_distance, operator_norm, Frame};
use crystile_core::{Isometry, QMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

pub const TOL: f64 = 1e-9;

fn d(f: &Frame, o: &crystile_core::Point, a: &Isometry, b: &Isometry) -> f64 {
    iso_distance(f, o, a, b).unwrap()
}

fn size(f: &Frame, o: &crystile_core::Point, a: &Isometry) -> f64 {
    iso_size(f, o, a).unwrap()
}

#[derive(Debug)]
pub struct Sample {
    alpha: QMatrix,
    beta: QMatrix,
    end: Vec<f64>,
    sigma: Isometry,
    tau: Isometry,
    chi: Isometry,
    phi: Isometry,
    psi: Isometry,
    o: crystile_core::Point,
}

pub fn sample(n: usize) -> impl Strategy<Value = Sample> {
    (
        (orthogonal(n), orthogonal(n), prop::collection::vec(-3.0..3.0f64, 2 * n * n)),
        (translation(n), translation(n)),
        (isometry(n), isometry(n), isometry(n), vector(n)),
    )
        .prop_map(|((alpha, beta, end), (sigma, tau), (chi, phi, psi, o))| Sample { alpha, beta, end, sigma, tau, chi, phi, psi, o })
}

pub fn identities(n: usize, s: Sample) -> Result<(), TestCaseError> {
    let Sample { alpha, beta, end, sigma, tau, chi, phi, psi, o } = s;
    let f = Frame::standard(n);
    let id = QMatrix::identity(n);
    let ca = f.cartesian_linear(&alpha);
    let cb = f.cartesian_linear(&beta);

    // (1) and (2)
    prop_assert!((operator_norm(&ca) - 1.0).abs() < TOL);
    let end_a = DMatrix::from_column_slice(n, n, &end[..n * n]);
    let end_b = DMatrix::from_column_slice(n, n, &end[n * n..]) + &cb;
    prop_assert!(operator_norm(&(&end_a * &end_b)) <= operator_norm(&end_a) * operator_norm(&end_b) + TOL);
    prop_assert!((operator_norm(&(&ca * &end_b)) - operator_norm(&end_b)).abs() < TOL);

    // (3) and (4)
    let conj = &(&alpha * &beta) * &alpha.inverse().unwrap();
    prop_assert!((linear_distance(&f, &conj, &id) - linear_distance(&f, &beta, &id)).abs() < TOL);
    prop_assert!(linear_distance(&f, &(&alpha * &beta), &id) <= linear_distance(&f, &alpha, &id) + linear_distance(&f, &beta, &id) + TOL);

    // (5)
    let a_o = Isometry::about_point(alpha.clone(), &o);
    prop_assert!((size(&f, &o, &(&a_o * &sigma)) - size(&f, &o, &(&sigma * &a_o))).abs() < TOL);

    // (6) and (7)
    prop_assert!((size(&f, &o, &chi.inverse()) - size(&f, &o, &chi)).abs() < TOL);
    prop_assert!(size(&f, &o, &(&chi * &phi)) <= size(&f, &o, &chi) + size(&f, &o, &phi) + TOL);

    // (8)
    let diff = sigma.translation() - tau.translation();
    prop_assert!((d(&f, &o, &sigma, &tau) - f.norm(&diff)).abs() < TOL);

    // (9): χ = σ_O · α_O, and σ_O(O) = χ(O).
    let chi_o = chi.apply(&o);
    let lhs = d(&f, &chi_o, &chi.conjugate(&phi), &chi.conjugate(&psi));
    prop_assert!((lhs - d(&f, &o, &phi, &psi)).abs() < TOL * (1.0 + lhs));

    // (10)
    let so = sigma.apply(&o);
    prop_assert!(d(&f, &so, &phi, &psi) <= (1.0 + f.norm(sigma.translation())) * d(&f, &o, &phi, &psi) + TOL);

    // (11)
    prop_assert!(size(&f, &o, &chi.conjugate(&phi)) <= size(&f, &o, &phi) * (1.0 + size(&f, &o, &chi)) + TOL);

    // (12), (13) and (14)
    prop_assert!((d(&f, &o, &(&phi * &chi), &phi) - size(&f, &o, &chi)).abs() < TOL);
    let cp = d(&f, &o, &(&chi * &phi), &phi);
    prop_assert!(cp <= size(&f, &o, &chi) * (1.0 + size(&f, &o, &phi)) + TOL);
    prop_assert!(size(&f, &o, &chi) <= cp * (1.0 + size(&f, &o, &phi)) + TOL);
    Ok(())
}

pub fn axioms(n: usize, (a, b, c, o): Triple) -> Result<(), TestCaseError> {
    let f = Frame::standard(n);
    prop_assert_eq!(d(&f, &o, &a, &a), 0.0);
    let ab = d(&f, &o, &a, &b);
    prop_assert!(ab >= 0.0);
    prop_assert!((ab - d(&f, &o, &b, &a)).abs() < TOL);
    prop_assert!(ab <= d(&f, &o, &a, &c) + d(&f, &o, &c, &b) + TOL);
    if a != b {
        prop_assert!(ab > 0.0);
    }
    Ok(())
}

pub type Triple = (Isometry, Isometry, Isometry, crystile_core::Point);

pub fn triple(n: usize) -> impl Strategy<Value = Triple> {
    (isometry(n), isometry(n), isometry(n), vector(n))
}

