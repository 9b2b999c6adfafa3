//! Truncated qubit ⊗ oscillator Hilbert space.
//!
//! Composite basis ordering is `(spin, fock)` with spin slowest:
//! `(↑,0), (↑,1), …, (↑,n_max-1), (↓,0), …`. Index of `(s, k)` is
//! `s * n_max + k` with `s = 0` for `↑`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tail mass above which a truncated state is rejected.
pub const TRUNCATION_TAIL: f64 = 1e-8;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Oscillator truncation: Fock states `|0⟩ … |n_max-1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub const DEFAULT_N_MAX: usize = 64;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_max must be at least 2, got {n_max}"
            )));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimension of the composite qubit ⊗ oscillator space.
    pub fn dim(&self) -> usize {
        2 * self.n_max
    }

    pub fn index(&self, spin: usize, fock: usize) -> usize {
        spin * self.n_max + fock
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self {
            n_max: Self::DEFAULT_N_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Composite { n_max: usize },
    Qubit,
    Oscillator { n_max: usize },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::Composite { n_max } => 2 * n_max,
            Basis::Qubit => 2,
            Basis::Oscillator { n_max } => n_max,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Basis::Composite { .. } => "composite",
            Basis::Qubit => "qubit",
            Basis::Oscillator { .. } => "oscillator",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Qubit,
    Oscillator,
}

/// Normalized state vector.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// Normalizes `amplitudes`; fails on a zero vector.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("state vector has zero norm".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// `|q⟩ ⊗ |osc⟩` with the qubit as the left factor.
    pub fn product(qubit: &PureState, osc: &PureState) -> Result<Self> {
        if qubit.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: qubit.dim(),
            });
        }
        Self::new(qubit.amplitudes.kronecker(&osc.amplitudes))
    }
}

/// Dense density matrix tagged with the space it lives on.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    basis: Basis,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity, unit trace and positivity.
    pub fn new(basis: Basis, matrix: CMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(basis, matrix)?;
        rho.check_invariants()?;
        Ok(rho)
    }

    /// Checks shape only. Used by the integrator, which validates on its
    /// own sample grid.
    pub fn new_unchecked(basis: Basis, matrix: CMatrix) -> Result<Self> {
        let dim = basis.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn from_pure(basis: Basis, psi: &PureState) -> Result<Self> {
        Self::new(basis, psi.projector())
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        purity(&self.matrix)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.clone().symmetric_eigenvalues().min()
    }

    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        trace_of_product(&self.matrix, op)
    }

    pub fn fidelity_with(&self, psi: &PureState) -> f64 {
        let v = psi.amplitudes();
        (v.adjoint() * &self.matrix * v)[(0, 0)].re
    }

    pub fn require_composite(&self) -> Result<FockSpace> {
        match self.basis {
            Basis::Composite { n_max } => FockSpace::new(n_max),
            other => Err(Error::WrongBasis {
                expected: "composite",
                got: other.name(),
            }),
        }
    }

    pub fn check_invariants(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvariantViolation {
                t: 0.0,
                what: format!("hermiticity defect {herm:.3e}"),
            });
        }
        let tr = (self.trace() - ONE).norm();
        if tr > TRACE_TOL {
            return Err(Error::InvariantViolation {
                t: 0.0,
                what: format!("trace error {tr:.3e}"),
            });
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::InvariantViolation {
                t: 0.0,
                what: format!("min eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(())
    }
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `Tr(A B)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `Tr ρ²` for Hermitian `ρ`.
pub fn purity(rho: &CMatrix) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Truncated annihilation operator, `a[n-1, n] = √n`.
pub fn annihilation(space: FockSpace) -> CMatrix {
    let n = space.n_max();
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(space: FockSpace) -> CMatrix {
    annihilation(space).adjoint()
}

pub fn number(space: FockSpace) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_fn(space.n_max(), |k, _| {
        Complex64::new(k as f64, 0.0)
    }))
}

/// `e^{-iπ a†a}`, diagonal `(-1)^k`.
pub fn parity(space: FockSpace) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_fn(space.n_max(), |k, _| {
        if k % 2 == 0 {
            ONE
        } else {
            -ONE
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// `σ_+ = |↑⟩⟨↓|`
    Plus,
    /// `σ_- = |↓⟩⟨↑|`
    Minus,
}

/// Pauli matrices in the `(|↑⟩, |↓⟩)` basis with `σ_z|↑⟩ = |↑⟩`.
pub fn pauli(which: Pauli) -> CMatrix {
    let (a, b, c, d) = match which {
        Pauli::X => (ZERO, ONE, ONE, ZERO),
        Pauli::Y => (ZERO, -I, I, ZERO),
        Pauli::Z => (ONE, ZERO, ZERO, -ONE),
        Pauli::Plus => (ZERO, ONE, ZERO, ZERO),
        Pauli::Minus => (ZERO, ZERO, ONE, ZERO),
    };
    CMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

/// Tensor product with the qubit as the left (slow) factor.
pub fn kron(qubit_op: &CMatrix, osc_op: &CMatrix) -> Result<CMatrix> {
    if qubit_op.nrows() != 2 || qubit_op.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: qubit_op.nrows(),
        });
    }
    if osc_op.nrows() != osc_op.ncols() {
        return Err(Error::DimensionMismatch {
            expected: osc_op.nrows(),
            got: osc_op.ncols(),
        });
    }
    Ok(qubit_op.kronecker(osc_op))
}

/// `|↑⟩⟨↑| ⊗ up + |↓⟩⟨↓| ⊗ down`.
pub fn spin_block_diag(up: &CMatrix, down: &CMatrix) -> CMatrix {
    let n = up.nrows();
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(up);
    m.view_mut((n, n), (n, n)).copy_from(down);
    m
}

pub(crate) fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

/// Poisson mass `Σ_{k ≥ n_max} e^{-λ} λ^k / k!` with `λ = |α|²`.
pub fn coherent_tail(abs_alpha: f64, n_max: usize) -> f64 {
    let lambda = abs_alpha * abs_alpha;
    if lambda == 0.0 {
        return 0.0;
    }
    let ln_lambda = lambda.ln();
    let mut ln_term = -lambda + n_max as f64 * ln_lambda - ln_factorial(n_max);
    let mut tail = 0.0;
    let mut k = n_max;
    loop {
        let term = ln_term.exp();
        tail += term;
        k += 1;
        ln_term += ln_lambda - (k as f64).ln();
        if (k as f64) > lambda && ln_term.exp() < 1e-18 * tail.max(1e-300) {
            break;
        }
        if k > n_max + 10_000 {
            break;
        }
    }
    tail
}

fn check_coherent_truncation(alpha: Complex64, space: FockSpace) -> Result<()> {
    let tail = coherent_tail(alpha.norm(), space.n_max());
    if tail > TRUNCATION_TAIL {
        return Err(Error::Truncation {
            what: format!("coherent state alpha = {alpha}"),
            tail,
            n_max: space.n_max(),
        });
    }
    Ok(())
}

/// Oscillator coherent state `|α⟩`, renormalized after truncation.
pub fn coherent_state(alpha: Complex64, space: FockSpace) -> Result<PureState> {
    check_coherent_truncation(alpha, space)?;
    let n = space.n_max();
    let mut amps = CVector::zeros(n);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps[0] = c;
    for k in 1..n {
        c = c * alpha / (k as f64).sqrt();
        amps[k] = c;
    }
    PureState::new(amps)
}

pub fn fock_state(k: usize, space: FockSpace) -> Result<PureState> {
    if k >= space.n_max() {
        return Err(Error::InvalidParameter(format!(
            "Fock level {k} outside n_max = {}",
            space.n_max()
        )));
    }
    let mut amps = CVector::zeros(space.n_max());
    amps[k] = ONE;
    PureState::new(amps)
}

/// `(|↑⟩ + |↓⟩)/√2`
pub fn qubit_plus() -> PureState {
    PureState::new(CVector::from_vec(vec![ONE, ONE])).expect("nonzero")
}

/// Thermal oscillator state with mean occupation `nbar`, renormalized.
pub fn thermal_density(nbar: f64, space: FockSpace) -> Result<DensityMatrix> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "thermal occupation must be finite and non-negative, got {nbar}"
        )));
    }
    let n = space.n_max();
    let q = nbar / (nbar + 1.0);
    let tail = q.powi(n as i32);
    if tail > TRUNCATION_TAIL {
        return Err(Error::Truncation {
            what: format!("thermal state nbar = {nbar}"),
            tail,
            n_max: n,
        });
    }
    let weights: Vec<f64> = (0..n).map(|k| q.powi(k as i32)).collect();
    let total: f64 = weights.iter().sum();
    let diag = CVector::from_iterator(n, weights.iter().map(|w| Complex64::new(w / total, 0.0)));
    DensityMatrix::new(
        Basis::Oscillator { n_max: n },
        CMatrix::from_diagonal(&diag),
    )
}

/// Reduced state of the kept subsystem.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let space = rho.require_composite()?;
    let n = space.n_max();
    let m = rho.matrix();
    match keep {
        Subsystem::Qubit => {
            let mut red = CMatrix::zeros(2, 2);
            for s in 0..2 {
                for sp in 0..2 {
                    let mut acc = ZERO;
                    for k in 0..n {
                        acc += m[(s * n + k, sp * n + k)];
                    }
                    red[(s, sp)] = acc;
                }
            }
            DensityMatrix::new_unchecked(Basis::Qubit, red)
        }
        Subsystem::Oscillator => {
            let red = m.view((0, 0), (n, n)) + m.view((n, n), (n, n));
            DensityMatrix::new_unchecked(Basis::Oscillator { n_max: n }, red)
        }
    }
}

/// `exp(iH)` for Hermitian `H`, via eigendecomposition.
pub fn unitary_from_hermitian(h: &CMatrix) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let phases = CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, l)),
    );
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Displacement `D(α) = exp(α a† − α* a)` on the truncated oscillator.
pub fn displacement(alpha: Complex64, space: FockSpace) -> Result<CMatrix> {
    check_coherent_truncation(alpha, space)?;
    let a = annihilation(space);
    let generator = a.adjoint() * alpha - &a * alpha.conj();
    // exp(G) = exp(i · (-iG)), and -iG is Hermitian.
    Ok(unitary_from_hermitian(&(generator * -I)))
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn fock_space_rejects_tiny_truncation() {
        assert!(FockSpace::new(1).is_err());
        assert_eq!(FockSpace::new(5).unwrap().dim(), 10);
    }

    #[test]
    fn annihilation_entries() {
        let a = annihilation(FockSpace::new(2).unwrap());
        assert_eq!(a, CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]));

        let a = annihilation(FockSpace::new(3).unwrap());
        assert_eq!(a[(0, 1)], ONE);
        assert!((a[(1, 2)] - c(2f64.sqrt())).norm() < 1e-15);
        assert_eq!(a.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn number_operator_on_fock_states() {
        let space = FockSpace::new(10).unwrap();
        let a = annihilation(space);
        let n_op = a.adjoint() * &a;
        for k in 0..10 {
            let v = fock_state(k, space).unwrap();
            let out = &n_op * v.amplitudes();
            assert!((out - v.amplitudes() * c(k as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn canonical_commutator_below_cutoff() {
        let space = FockSpace::new(12).unwrap();
        let a = annihilation(space);
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        let n = space.n_max();
        let inner = comm.view((0, 0), (n - 1, n - 1)).into_owned();
        assert!(max_abs(&(inner - identity(n - 1))) < 1e-12);
    }

    #[test]
    fn pauli_algebra() {
        let z = pauli(Pauli::Z);
        assert_eq!(z, CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]));
        let p = pauli(Pauli::Plus);
        let m = pauli(Pauli::Minus);
        assert!(max_abs(&(&p * &m + &m * &p - identity(2))) < 1e-15);
        let x = pauli(Pauli::X);
        assert!(max_abs(&(&x * &z * &x + &z)) < 1e-15);
        // σ_- = (σ_x − iσ_y)/2 and lowers ↑ → ↓
        let built = (pauli(Pauli::X) - pauli(Pauli::Y) * I) * c(0.5);
        assert!(max_abs(&(built - &m)) < 1e-15);
        let up = CVector::from_vec(vec![ONE, ZERO]);
        assert_eq!(&m * up, CVector::from_vec(vec![ZERO, ONE]));
    }

    #[test]
    fn kron_structure() {
        let space = FockSpace::new(4).unwrap();
        let id = kron(&identity(2), &identity(4)).unwrap();
        assert_eq!(id, identity(8));

        let a = annihilation(space);
        let m = kron(&pauli(Pauli::Z), &a).unwrap();
        assert_eq!(m.view((0, 0), (4, 4)).into_owned(), a);
        assert_eq!(m.view((4, 4), (4, 4)).into_owned(), -a.clone());
        assert!(max_abs(&m.view((0, 4), (4, 4)).into_owned()) == 0.0);

        assert!(kron(&identity(3), &a).is_err());
        assert!(kron(&identity(2), &CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn coherent_state_properties() {
        let space = FockSpace::new(32).unwrap();
        let vac = coherent_state(ZERO, space).unwrap();
        assert!((vac.amplitudes()[0] - ONE).norm() < 1e-15);

        let alpha = c(1.0);
        let psi = coherent_state(alpha, space).unwrap();
        let a = annihilation(space);
        let mean = psi.amplitudes().dotc(&(&a * psi.amplitudes()));
        assert!((mean - alpha).norm() < 1e-8);

        // ⟨-α|α⟩ = e^{-2|α|²} for real α, checked against the closed form.
        let alpha = c(0.8);
        let plus = coherent_state(alpha, space).unwrap();
        let minus = coherent_state(-alpha, space).unwrap();
        let overlap = minus.inner(&plus).norm();
        assert!((overlap - (-2.0 * 0.64f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn coherent_state_truncation_error() {
        let space = FockSpace::new(8).unwrap();
        assert!(matches!(
            coherent_state(c(3.0), space),
            Err(Error::Truncation { .. })
        ));
        assert!(coherent_state(c(0.3), space).is_ok());
    }

    #[test]
    fn coherent_tail_matches_direct_sum() {
        for &(alpha, n) in &[(1.0, 4usize), (2.0, 10), (3.0, 20), (0.5, 3)] {
            let lambda: f64 = alpha * alpha;
            let head: f64 = (0..n)
                .map(|k| (-lambda + k as f64 * lambda.ln() - ln_factorial(k)).exp())
                .sum();
            assert!((coherent_tail(alpha, n) - (1.0 - head)).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_density_moments() {
        let space = FockSpace::new(64).unwrap();
        let rho = thermal_density(0.0, space).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], ONE);
        assert!((rho.purity() - 1.0).abs() < 1e-15);

        // Geometric-series oracle: purity 1/(1+2n̄), mean occupation n̄.
        let nbar = 0.90827;
        let rho = thermal_density(nbar, space).unwrap();
        let q: f64 = nbar / (nbar + 1.0);
        let p0 = 1.0 - q;
        let purity_oracle: f64 = (0..400).map(|k| (p0 * q.powi(k)).powi(2)).sum();
        let mean_oracle: f64 = (0..400).map(|k| k as f64 * p0 * q.powi(k)).sum();
        assert!((purity_oracle - 1.0 / (1.0 + 2.0 * nbar)).abs() < 1e-12);
        assert!((rho.purity() - purity_oracle).abs() < 1e-6);
        let mean = rho.expectation(&number(space)).re;
        assert!((mean - mean_oracle).abs() < 1e-6);
        assert!((mean - nbar).abs() < 1e-6);
    }

    #[test]
    fn thermal_density_truncation_error() {
        let space = FockSpace::new(8).unwrap();
        assert!(matches!(
            thermal_density(0.9, space),
            Err(Error::Truncation { .. })
        ));
        assert!(thermal_density(-0.1, space).is_err());
    }

    #[test]
    fn partial_trace_cases() {
        let space = FockSpace::new(6).unwrap();
        let q = qubit_plus();
        let osc = coherent_state(c(0.2), space).unwrap();
        let prod = PureState::product(&q, &osc).unwrap();
        let rho = DensityMatrix::from_pure(Basis::Composite { n_max: 6 }, &prod).unwrap();
        let red = partial_trace(&rho, Subsystem::Qubit).unwrap();
        assert!(max_abs(&(red.matrix() - q.projector())) < 1e-12);
        let red = partial_trace(&rho, Subsystem::Oscillator).unwrap();
        assert!(max_abs(&(red.matrix() - osc.projector())) < 1e-12);

        // (|↑0⟩ + |↓1⟩)/√2 → I/2
        let mut v = CVector::zeros(12);
        v[space.index(0, 0)] = ONE;
        v[space.index(1, 1)] = ONE;
        let bell = PureState::new(v).unwrap();
        let rho = DensityMatrix::from_pure(Basis::Composite { n_max: 6 }, &bell).unwrap();
        let red = partial_trace(&rho, Subsystem::Qubit).unwrap();
        assert!(max_abs(&(red.matrix() - identity(2) * c(0.5))) < 1e-12);

        assert!(matches!(
            partial_trace(&red, Subsystem::Qubit),
            Err(Error::WrongBasis { .. })
        ));
    }

    #[test]
    fn displacement_properties() {
        let space = FockSpace::new(32).unwrap();
        let d0 = displacement(ZERO, space).unwrap();
        assert!(operator_norm(&(d0 - identity(32))) < 1e-12);

        let alpha = Complex64::new(0.5, 0.0);
        let d = displacement(alpha, space).unwrap();
        assert!(operator_norm(&(d.adjoint() * &d - identity(32))) < 1e-8);
        let from_d = d.column(0).into_owned();
        let direct = coherent_state(alpha, space).unwrap();
        assert!((from_d - direct.amplitudes()).norm() < 1e-7);

        let inv = displacement(-alpha, space).unwrap();
        assert!(operator_norm(&(&d * &inv - identity(32))) < 1e-7);

        assert!(displacement(Complex64::new(5.0, 0.0), FockSpace::new(10).unwrap()).is_err());
    }
}
