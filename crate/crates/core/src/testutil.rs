//! Random states and unitaries for unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::hilbert::{unitary_from_hermitian, CMatrix};

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let m = random_matrix(rng, n);
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Hermitian, unit trace, not necessarily positive.
pub fn random_unit_trace_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let mut h = random_hermitian(rng, n);
    let tr = h.trace();
    for i in 0..n {
        h[(i, i)] -= tr / n as f64;
        h[(i, i)] += Complex64::new(1.0 / n as f64, 0.0);
    }
    h
}

/// Positive, unit trace.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_matrix(rng, n);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    unitary_from_hermitian(&random_hermitian(rng, n))
}
