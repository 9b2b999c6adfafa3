//! Entanglement and mixedness measures.
//!
//! Negativity is the absolute sum of the negative eigenvalues of the partial
//! transpose taken on the qubit factor. Participation ratio is the inverse
//! purity of a reduced state.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, purity, Basis, CMatrix, DensityMatrix, Subsystem};

/// Partial-transpose eigenvalues with magnitude below this count as zero.
pub const EIGEN_ZERO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSet {
    pub negativity: f64,
    pub k_sigma: f64,
    pub k_r: f64,
    pub purity: f64,
}

/// Transposes the qubit factor: block `(s, s')` becomes block `(s', s)`.
pub fn partial_transpose(rho: &DensityMatrix) -> Result<CMatrix> {
    rho.require_composite()?;
    Ok(partial_transpose_matrix(rho.matrix()))
}

pub fn partial_transpose_matrix(m: &CMatrix) -> CMatrix {
    let dim = m.nrows();
    let n = dim / 2;
    let mut out = m.clone();
    out.view_mut((0, n), (n, n))
        .copy_from(&m.view((n, 0), (n, n)));
    out.view_mut((n, 0), (n, n))
        .copy_from(&m.view((0, n), (n, n)));
    out
}

fn negative_mass(eigenvalues: impl Iterator<Item = f64>) -> f64 {
    eigenvalues.filter(|&l| l < -EIGEN_ZERO).map(|l| -l).sum()
}

pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho)?;
    Ok(negative_mass(pt.symmetric_eigenvalues().iter().cloned()))
}

/// `1 / Tr ρ²` of a reduced (qubit-only or oscillator-only) state.
pub fn participation_ratio(reduced: &DensityMatrix) -> Result<f64> {
    match reduced.basis() {
        Basis::Composite { .. } => Err(Error::WrongBasis {
            expected: "qubit or oscillator",
            got: "composite",
        }),
        _ => Ok(1.0 / reduced.purity()),
    }
}

pub fn measure_set(rho: &DensityMatrix) -> Result<MeasureSet> {
    let qubit = partial_trace(rho, Subsystem::Qubit)?;
    let osc = partial_trace(rho, Subsystem::Oscillator)?;
    Ok(MeasureSet {
        negativity: negativity(rho)?,
        k_sigma: participation_ratio(&qubit)?,
        k_r: participation_ratio(&osc)?,
        purity: rho.purity(),
    })
}

/// Participation ratios from the raw composite matrix, skipping the
/// reduced-state allocation.
pub fn participation_ratios(m: &CMatrix) -> (f64, f64) {
    let dim = m.nrows();
    let n = dim / 2;
    let mut q = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (s, row) in q.iter_mut().enumerate() {
        for (sp, entry) in row.iter_mut().enumerate() {
            for k in 0..n {
                *entry += m[(s * n + k, sp * n + k)];
            }
        }
    }
    let q_purity: f64 = q.iter().flatten().map(|z| z.norm_sqr()).sum();
    let osc = m.view((0, 0), (n, n)) + m.view((n, n), (n, n));
    (1.0 / q_purity, 1.0 / purity(&osc))
}

/// Negativity route taken by [`negativity_of_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Pivoted Cholesky factor of the given rank with `‖ρ − L L†‖_F` at
    /// most [`RESIDUAL_TOL`], which also bounds `λ_min(ρ) ≥ −RESIDUAL_TOL`.
    LowRank(usize),
    /// Cholesky factorisation of `ρ^PT + 10⁻¹⁰ I` succeeded, so no
    /// eigenvalue lies below the zero threshold.
    Certified,
    Dense,
}

/// Pivot threshold for the low-rank route.
const PIVOT_TOL: f64 = 1e-13;
/// Largest `‖ρ − L L†‖_F` accepted from the low-rank factor.
pub const RESIDUAL_TOL: f64 = 1e-10;

pub fn negativity_dense(m: &CMatrix) -> f64 {
    negative_mass(
        partial_transpose_matrix(m)
            .symmetric_eigenvalues()
            .iter()
            .cloned(),
    )
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

/// True when every eigenvalue of the Hermitian `m` exceeds `-tol`, decided by
/// a Cholesky factorisation of `m + tol I`.
pub fn eigenvalues_above(m: &CMatrix, tol: f64) -> bool {
    let n = m.nrows();
    // Lower triangle, column-major, left-looking.
    let mut l = m.as_slice().to_vec();
    for j in 0..n {
        let (done, rest) = l.split_at_mut(j * n);
        let col = &mut rest[..n];
        for k in 0..j {
            let prev = &done[k * n..(k + 1) * n];
            let w = prev[j].conj();
            for i in j..n {
                col[i] -= prev[i] * w;
            }
        }
        let d = col[j].re + tol;
        if !(d > 0.0) {
            return false;
        }
        let inv = 1.0 / d.sqrt();
        col[j] = Complex64::new(d.sqrt(), 0.0);
        for c in &mut col[j + 1..] {
            *c *= inv;
        }
    }
    true
}

/// Negativity of the composite matrix `m`, identical to the dense
/// eigendecomposition up to rounding.
pub fn negativity_of_matrix(m: &CMatrix) -> f64 {
    negativity_with_route(m).0
}

/// Tries, in order: a low-rank factor `ρ ≈ L L†`, a Cholesky certificate of
/// zero negativity, and the dense eigendecomposition.
///
/// With `L = [L_↑; L_↓]`, the partial transpose of `L L†` lives on
/// `C² ⊗ range([L_↑ L_↓])`, so its nonzero spectrum is that of a
/// `2m × 2m` compression with `m ≤ 2 rank`.
pub fn negativity_with_route(m: &CMatrix) -> (f64, Route) {
    let dim = m.nrows();
    let n = dim / 2;
    if let Some(l) = pivoted_cholesky(m, PIVOT_TOL, n / 3) {
        if (m - &l * l.adjoint()).norm() <= RESIDUAL_TOL {
            let rank = l.ncols();
            return (negativity_low_rank(&l), Route::LowRank(rank));
        }
    }
    let pt = partial_transpose_matrix(m);
    if eigenvalues_above(&pt, EIGEN_ZERO) {
        return (0.0, Route::Certified);
    }
    (
        negative_mass(pt.symmetric_eigenvalues().iter().cloned()),
        Route::Dense,
    )
}

fn negativity_low_rank(l: &CMatrix) -> f64 {
    let n = l.nrows() / 2;
    let rank = l.ncols();
    let l_up = l.rows(0, n);
    let l_dn = l.rows(n, n);
    let mut w = DMatrix::zeros(n, 2 * rank);
    w.columns_mut(0, rank).copy_from(&l_up);
    w.columns_mut(rank, rank).copy_from(&l_dn);
    let q = w.qr().q();
    let u_up = q.adjoint() * l_up;
    let u_dn = q.adjoint() * l_dn;
    let k = q.ncols();
    let mut pt = DMatrix::zeros(2 * k, 2 * k);
    pt.view_mut((0, 0), (k, k))
        .copy_from(&(&u_up * u_up.adjoint()));
    pt.view_mut((0, k), (k, k))
        .copy_from(&(&u_dn * u_up.adjoint()));
    pt.view_mut((k, 0), (k, k))
        .copy_from(&(&u_up * u_dn.adjoint()));
    pt.view_mut((k, k), (k, k))
        .copy_from(&(&u_dn * u_dn.adjoint()));
    negative_mass(pt.symmetric_eigenvalues().iter().cloned())
}

/// Left-looking pivoted Cholesky. Stops when the largest remaining pivot is
/// at most `tol`; returns `None` once the rank would exceed `max_rank`.
fn pivoted_cholesky(m: &CMatrix, tol: f64, max_rank: usize) -> Option<CMatrix> {
    let dim = m.nrows();
    let mut diag: Vec<f64> = (0..dim).map(|i| m[(i, i)].re).collect();
    let mut used = vec![false; dim];
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    loop {
        let (p, &d) = diag
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        if d <= tol {
            break;
        }
        if cols.len() == max_rank {
            return None;
        }
        let inv = 1.0 / d.sqrt();
        let mut col: Vec<Complex64> = (0..dim).map(|i| m[(i, p)]).collect();
        for prev in &cols {
            let w = prev[p].conj();
            for (c, &v) in col.iter_mut().zip(prev) {
                *c -= v * w;
            }
        }
        for (i, c) in col.iter_mut().enumerate() {
            if used[i] {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c *= inv;
            }
        }
        used[p] = true;
        for (i, c) in col.iter().enumerate() {
            if !used[i] {
                diag[i] -= c.norm_sqr();
            }
        }
        cols.push(col);
        if cols.len() == dim {
            break;
        }
    }
    let rank = cols.len();
    Some(DMatrix::from_fn(dim, rank, |i, j| cols[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{
        coherent_state, kron, qubit_plus, thermal_density, CVector, FockSpace, PureState, ONE,
    };
    use crate::testutil::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn composite(n_max: usize, m: CMatrix) -> DensityMatrix {
        DensityMatrix::new(Basis::Composite { n_max }, m).unwrap()
    }

    fn bell(n_max: usize) -> DensityMatrix {
        let space = FockSpace::new(n_max).unwrap();
        let mut v = CVector::zeros(2 * n_max);
        v[space.index(0, 0)] = ONE;
        v[space.index(1, 1)] = ONE;
        DensityMatrix::from_pure(Basis::Composite { n_max }, &PureState::new(v).unwrap()).unwrap()
    }

    fn cat(alpha: f64, n_max: usize) -> PureState {
        let space = FockSpace::new(n_max).unwrap();
        let up = coherent_state(Complex64::new(-alpha, 0.0), space).unwrap();
        let dn = coherent_state(Complex64::new(alpha, 0.0), space).unwrap();
        let v = CVector::from_vec(vec![ONE, Complex64::new(0.0, 0.0)]).kronecker(up.amplitudes())
            + CVector::from_vec(vec![Complex64::new(0.0, 0.0), ONE]).kronecker(dn.amplitudes());
        PureState::new(v).unwrap()
    }

    #[test]
    fn product_states_are_ppt() {
        let mut rng = StdRng::seed_from_u64(10);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 5);
        let rho = composite(5, kron(&a, &b).unwrap());
        let pt = partial_transpose(&rho).unwrap();
        let expected = kron(&a.transpose(), &b).unwrap();
        assert!((&pt - expected).norm() < 1e-14);
        assert!(pt.symmetric_eigenvalues().min() > -1e-12);
        assert_eq!(negativity(&rho).unwrap(), 0.0);
    }

    #[test]
    fn bell_state_negativity() {
        let rho = bell(4);
        let pt = partial_transpose(&rho).unwrap();
        assert!((pt.symmetric_eigenvalues().min() + 0.5).abs() < 1e-12);
        assert!((negativity(&rho).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn double_partial_transpose_is_identity() {
        let mut rng = StdRng::seed_from_u64(11);
        let m = random_density(&mut rng, 10);
        let twice = partial_transpose_matrix(&partial_transpose_matrix(&m));
        assert_eq!(twice, m);
    }

    #[test]
    fn cat_state_negativity_matches_closed_form() {
        // √(1 − e^{−4|α|²})/2 at |α| = 1
        let expected = (1.0 - (-4.0f64).exp()).sqrt() / 2.0;
        assert!((expected - 0.495400).abs() < 1e-6);
        let psi = cat(1.0, 40);
        let rho = DensityMatrix::from_pure(Basis::Composite { n_max: 40 }, &psi).unwrap();
        assert!((negativity(&rho).unwrap() - expected).abs() < 1e-6);
    }

    #[test]
    fn participation_ratio_cases() {
        let space = FockSpace::new(64).unwrap();
        let pure = DensityMatrix::from_pure(
            Basis::Oscillator { n_max: 64 },
            &coherent_state(Complex64::new(1.2, 0.3), space).unwrap(),
        )
        .unwrap();
        assert!((participation_ratio(&pure).unwrap() - 1.0).abs() < 1e-12);

        let mixed = DensityMatrix::new(
            Basis::Qubit,
            CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0),
        )
        .unwrap();
        assert!((participation_ratio(&mixed).unwrap() - 2.0).abs() < 1e-14);

        let thermal = thermal_density(0.90827, space).unwrap();
        assert!((participation_ratio(&thermal).unwrap() - 2.81654).abs() < 1e-4);

        assert!(participation_ratio(&bell(3)).is_err());
    }

    #[test]
    fn negativity_invariant_under_local_unitaries() {
        let mut rng = StdRng::seed_from_u64(12);
        let psi = cat(0.7, 12);
        let rho = psi.projector() * Complex64::new(0.7, 0.0)
            + random_density(&mut rng, 24) * Complex64::new(0.3, 0.0);
        let base = negativity(&composite(12, rho.clone())).unwrap();
        assert!(base > 0.01);
        for _ in 0..10 {
            let u = kron(&random_unitary(&mut rng, 2), &random_unitary(&mut rng, 12)).unwrap();
            let rotated = &u * &rho * u.adjoint();
            let n = negativity(
                &DensityMatrix::new_unchecked(Basis::Composite { n_max: 12 }, rotated).unwrap(),
            )
            .unwrap();
            assert!((n - base).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_state_reductions_share_participation_ratio() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..10 {
            let v = CVector::from_fn(16, |_, _| {
                Complex64::new(
                    rand::Rng::gen_range(&mut rng, -1.0..1.0),
                    rand::Rng::gen_range(&mut rng, -1.0..1.0),
                )
            });
            let psi = PureState::new(v).unwrap();
            let rho = DensityMatrix::from_pure(Basis::Composite { n_max: 8 }, &psi).unwrap();
            let set = measure_set(&rho).unwrap();
            assert!((set.k_sigma - set.k_r).abs() < 1e-8);
            assert!(set.negativity <= 0.5 + 1e-12);
            // Two Schmidt coefficients: 𝒩 = √(λ₁λ₂).
            let q = partial_trace(&rho, Subsystem::Qubit).unwrap();
            let lam = q.matrix().clone().symmetric_eigenvalues();
            assert!((set.negativity - (lam[0] * lam[1]).sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn cat_negativity_from_schmidt_coefficients() {
        for &alpha in &[0.2f64, 0.6, 1.1] {
            let e = (-2.0 * alpha * alpha).exp();
            let l1 = (1.0 + e) / 2.0;
            let l2 = (1.0 - e) / 2.0;
            let rho =
                DensityMatrix::from_pure(Basis::Composite { n_max: 40 }, &cat(alpha, 40)).unwrap();
            assert!((negativity(&rho).unwrap() - (l1 * l2).sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn raw_participation_ratios_agree() {
        let mut rng = StdRng::seed_from_u64(14);
        let m = random_density(&mut rng, 12);
        let rho = composite(6, m.clone());
        let set = measure_set(&rho).unwrap();
        let (ks, kr) = participation_ratios(&m);
        assert!((ks - set.k_sigma).abs() < 1e-12);
        assert!((kr - set.k_r).abs() < 1e-12);
    }

    fn mixed_states(n_max: usize) -> Vec<CMatrix> {
        let mut rng = StdRng::seed_from_u64(15);
        let space = FockSpace::new(n_max).unwrap();
        let thermal = thermal_density(0.3, space).unwrap();
        let mixed_product = kron(&qubit_plus().projector(), thermal.matrix()).unwrap();
        let c = cat(1.3, n_max).projector();
        let mut out = vec![];
        for &p in &[0.0, 0.3, 0.8, 1.0] {
            // low-rank mixture of the cat with a random state on two Fock levels
            let low = random_density(&mut rng, 4);
            let mut embedded = CMatrix::zeros(2 * n_max, 2 * n_max);
            for i in 0..4 {
                for j in 0..4 {
                    embedded[((i / 2) * n_max + i % 2, (j / 2) * n_max + j % 2)] = low[(i, j)];
                }
            }
            let mix = |other: &CMatrix| {
                &c * Complex64::new(p, 0.0) + other * Complex64::new(1.0 - p, 0.0)
            };
            out.push(mix(&embedded));
            out.push(mix(&mixed_product));
        }
        out
    }

    #[test]
    fn negativity_routes_agree() {
        let mut seen = std::collections::HashSet::new();
        for m in mixed_states(30) {
            let (fast, route) = negativity_with_route(&m);
            let slow = negativity_dense(&m);
            assert!((fast - slow).abs() < 1e-10, "{route:?}: {fast} vs {slow}");
            seen.insert(std::mem::discriminant(&route));
        }
        assert_eq!(seen.len(), 3, "all three routes exercised");
    }

    #[test]
    fn positivity_certificate() {
        let n_max = 20;
        let mut m = cat(1.0, n_max).projector();
        assert!(eigenvalues_above(&m, 1e-8));
        m[(15, 15)] -= Complex64::new(1e-6, 0.0);
        m[(0, 0)] += Complex64::new(1e-6, 0.0);
        assert!(!eigenvalues_above(&m, 1e-8));
        assert!((min_eigenvalue(&m) + 1e-6).abs() < 1e-12);
    }
}
