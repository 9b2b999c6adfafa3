//! Physical parameters, the interaction-picture master-equation generator,
//! and the instantaneous spin-flip pulse.
//!
//! Units: ħ = 1. Times are in the same units as `1/omega0`; with the default
//! `omega0 = 1` the pulse period is `tau0 = π`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation, identity, kron, pauli, CMatrix, DensityMatrix, FockSpace, Pauli, I, ZERO,
};

/// Fig. 1–4 temperature, `ħω₀/k_BT`.
pub const PAPER_TEMPERATURE_RATIO: f64 = 0.74239;
pub const PAPER_LAMBDA0: f64 = 0.2;
/// Qubit splitting chosen so that `ε_z τ₀ / ħ = 2π`.
pub const DEFAULT_EPSILON_Z: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega0: f64,
    pub epsilon_z: f64,
    pub lambda0: f64,
    /// Qubit dissipation rate.
    pub gamma: f64,
    /// Oscillator dissipation rate.
    pub c: f64,
    /// `ħω₀ / k_B T`; `f64::INFINITY` means zero temperature.
    pub temperature_ratio: f64,
    pub alpha0: f64,
    pub nbar_sigma: f64,
    pub nbar_r: f64,
    pub tau0: f64,
}

impl ModelParams {
    /// Rates `gamma` and `c` are in natural units (per unit time).
    pub fn new(
        omega0: f64,
        epsilon_z: f64,
        lambda0: f64,
        gamma: f64,
        c: f64,
        temperature_ratio: f64,
    ) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be positive, got {omega0}"
            )));
        }
        if !(epsilon_z > 0.0) || !epsilon_z.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon_z must be positive, got {epsilon_z}"
            )));
        }
        for (name, v) in [("lambda0", lambda0), ("gamma", gamma), ("c", c)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !(temperature_ratio > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temperature_ratio must be positive, got {temperature_ratio}"
            )));
        }
        Ok(Self {
            omega0,
            epsilon_z,
            lambda0,
            gamma,
            c,
            temperature_ratio,
            alpha0: lambda0 / (2.0 * omega0),
            nbar_sigma: bose(epsilon_z / omega0 * temperature_ratio),
            nbar_r: bose(temperature_ratio),
            tau0: PI / omega0,
        })
    }

    /// Coupling and temperature of the figures, no decoherence.
    pub fn standard() -> Self {
        Self::new(
            1.0,
            DEFAULT_EPSILON_Z,
            PAPER_LAMBDA0,
            0.0,
            0.0,
            PAPER_TEMPERATURE_RATIO,
        )
        .expect("valid defaults")
    }

    /// Same parameters with `Γ` and `𝒞` quoted in units of `1/tau0`.
    pub fn with_rates_per_tau0(&self, gamma: f64, c: f64) -> Result<Self> {
        Self::new(
            self.omega0,
            self.epsilon_z,
            self.lambda0,
            gamma / self.tau0,
            c / self.tau0,
            self.temperature_ratio,
        )
    }

    pub fn with_lambda0(&self, lambda0: f64) -> Result<Self> {
        Self::new(
            self.omega0,
            self.epsilon_z,
            lambda0,
            self.gamma,
            self.c,
            self.temperature_ratio,
        )
    }

    pub fn with_temperature_ratio(&self, ratio: f64) -> Result<Self> {
        Self::new(
            self.omega0,
            self.epsilon_z,
            self.lambda0,
            self.gamma,
            self.c,
            ratio,
        )
    }

    pub fn gamma_per_tau0(&self) -> f64 {
        self.gamma * self.tau0
    }

    pub fn c_per_tau0(&self) -> f64 {
        self.c * self.tau0
    }
}

/// `1/(e^x − 1)`, zero for `x = ∞`.
fn bose(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Right-hand side of the master equation between pulses.
///
/// Evaluated as a banded stencil over the density matrix: every operator in
/// the generator is at most tridiagonal in the Fock index, so one pass over
/// the entries suffices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    params: ModelParams,
    space: FockSpace,
    sqrt_k: Vec<f64>,
    /// Diagonal of the truncated `a a†`; the last entry is zero.
    aad: Vec<f64>,
}

impl Liouvillian {
    pub fn new(params: ModelParams, space: FockSpace) -> Self {
        let n = space.n_max();
        let sqrt_k = (0..=n).map(|k| (k as f64).sqrt()).collect();
        let aad = (0..n)
            .map(|k| if k + 1 < n { (k + 1) as f64 } else { 0.0 })
            .collect();
        Self {
            params,
            space,
            sqrt_k,
            aad,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn master_rhs(&self, rho: &DensityMatrix, t: f64) -> Result<CMatrix> {
        let space = rho.require_composite()?;
        if space != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                got: space.dim(),
            });
        }
        let mut out = CMatrix::zeros(space.dim(), space.dim());
        self.rhs_into(rho.matrix(), t, &mut out);
        Ok(out)
    }

    /// Writes `dρ/dt` at time `t` into `out`. Shapes must match the space.
    pub fn rhs_into(&self, rho: &CMatrix, t: f64, out: &mut CMatrix) {
        let n = self.space.n_max();
        let dim = 2 * n;
        debug_assert_eq!(rho.nrows(), dim);
        debug_assert_eq!(out.nrows(), dim);
        let p = &self.params;
        let src = rho.as_slice();
        let dst = out.as_mut_slice();
        let sq = &self.sqrt_k;
        let aad = &self.aad;

        // H = σ_z ⊗ (c a + c̄ a†); coefficients pre-multiplied by −i.
        let c = Complex64::from_polar(-p.alpha0 * p.omega0, -p.omega0 * t);
        let mic = -I * c;
        let micb = -I * c.conj();

        let gc_up = p.nbar_r * p.c; // a† jumps
        let gc_dn = (p.nbar_r + 1.0) * p.c; // a jumps
        let g_plus = p.nbar_sigma * p.gamma; // σ_+ jumps, ↓ → ↑
        let g_minus = (p.nbar_sigma + 1.0) * p.gamma; // σ_- jumps, ↑ → ↓

        for sp in 0..2 {
            let sign_r = if sp == 0 { 1.0 } else { -1.0 };
            for l in 0..n {
                let j = sp * n + l;
                let col = &src[j * dim..(j + 1) * dim];
                let col_lm = if l > 0 {
                    Some(&src[(j - 1) * dim..j * dim])
                } else {
                    None
                };
                let col_lp = if l + 1 < n {
                    Some(&src[(j + 1) * dim..(j + 2) * dim])
                } else {
                    None
                };
                let out_col = &mut dst[j * dim..(j + 1) * dim];
                for s in 0..2 {
                    let sign_l = if s == 0 { 1.0 } else { -1.0 };
                    let base = s * n;
                    let same_spin = s == sp;
                    let cross = if same_spin {
                        // (s, s) block receives population from the opposite
                        // diagonal block.
                        let oj = (1 - sp) * n + l;
                        Some((&src[oj * dim..(oj + 1) * dim], (1 - s) * n))
                    } else {
                        None
                    };
                    let n_down = (s == 1) as u8 + (sp == 1) as u8;
                    let n_up = 2 - n_down;
                    let spin_decay = 0.5 * (g_plus * n_down as f64 + g_minus * n_up as f64);
                    let feed = if s == 0 { g_plus } else { g_minus };

                    for k in 0..n {
                        let i = base + k;
                        let m = col[i];
                        // X ρ: rows k±1 of the same column.
                        let mut x_rho = ZERO;
                        if k + 1 < n {
                            x_rho += mic * (sq[k + 1] * col[i + 1]);
                        }
                        if k > 0 {
                            x_rho += micb * (sq[k] * col[i - 1]);
                        }
                        // ρ X: columns l±1 of the same row.
                        let mut rho_x = ZERO;
                        if let Some(cm) = col_lm {
                            rho_x += mic * (sq[l] * cm[i]);
                        }
                        if let Some(cp) = col_lp {
                            rho_x += micb * (sq[l + 1] * cp[i]);
                        }
                        let mut acc = x_rho * sign_l - rho_x * sign_r;

                        // Oscillator bath.
                        acc -= m * (0.5 * gc_up * (aad[k] + aad[l]) + 0.5 * gc_dn * (k + l) as f64);
                        if k > 0 {
                            if let Some(cm) = col_lm {
                                acc += cm[i - 1] * (gc_up * sq[k] * sq[l]);
                            }
                        }
                        if k + 1 < n {
                            if let Some(cp) = col_lp {
                                acc += cp[i + 1] * (gc_dn * sq[k + 1] * sq[l + 1]);
                            }
                        }

                        // Qubit bath.
                        acc -= m * spin_decay;
                        if let Some((ocol, obase)) = cross {
                            acc += ocol[obase + k] * feed;
                        }

                        out_col[i] = acc;
                    }
                }
            }
        }
    }

    /// The coherent part `H̃_I(t) = −(λ₀/2)(a e^{−iω₀t} + a† e^{iω₀t}) σ_z`.
    pub fn hamiltonian(&self, t: f64) -> CMatrix {
        let p = &self.params;
        let a = annihilation(self.space);
        let x = (&a * Complex64::from_polar(1.0, -p.omega0 * t)
            + a.adjoint() * Complex64::from_polar(1.0, p.omega0 * t))
            * Complex64::new(-p.lambda0 / 2.0, 0.0);
        kron(&pauli(Pauli::Z), &x).expect("square")
    }

    /// Dense-operator evaluation of the same generator, term by term.
    /// Slow; used to cross-check the stencil.
    pub fn dense_rhs(&self, rho: &CMatrix, t: f64) -> CMatrix {
        let p = &self.params;
        let n = self.space.n_max();
        let a_osc = annihilation(self.space);
        let id_q = identity(2);
        let id_o = identity(n);
        let a = kron(&id_q, &a_osc).unwrap();
        let ad = a.adjoint();
        let sz = kron(&pauli(Pauli::Z), &id_o).unwrap();
        let sp = kron(&pauli(Pauli::Plus), &id_o).unwrap();
        let sm = kron(&pauli(Pauli::Minus), &id_o).unwrap();
        let a_sz = &a * &sz;
        let ad_sz = &ad * &sz;

        let comm = |x: &CMatrix| x * rho - rho * x;
        let diss = |x: &CMatrix, y: &CMatrix| {
            // x y ρ − 2 y ρ x + ρ x y, for the pairs in the master equation
            x * y * rho - (y * rho * x) * Complex64::new(2.0, 0.0) + rho * x * y
        };

        let coh = (comm(&a_sz) * Complex64::from_polar(1.0, -p.omega0 * t)
            + comm(&ad_sz) * Complex64::from_polar(1.0, p.omega0 * t))
            * (I * p.alpha0 * p.omega0);
        let real = |v: f64| Complex64::new(v, 0.0);
        coh - diss(&sm, &sp) * real(p.nbar_sigma * p.gamma / 2.0)
            - diss(&sp, &sm) * real((p.nbar_sigma + 1.0) * p.gamma / 2.0)
            - diss(&a, &ad) * real(p.nbar_r * p.c / 2.0)
            - diss(&ad, &a) * real((p.nbar_r + 1.0) * p.c / 2.0)
    }
}

/// `(−iσ_x) ⊗ I` on the composite space.
pub fn pulse_unitary(space: FockSpace) -> CMatrix {
    kron(&(pauli(Pauli::X) * -I), &identity(space.n_max())).expect("square")
}

/// In-place conjugation by the pulse: swaps the spin blocks,
/// `ρ_{s s'} → ρ_{s̄ s̄'}`.
pub fn apply_pulse(rho: &mut CMatrix) {
    let dim = rho.nrows();
    let n = dim / 2;
    for j in 0..n {
        for i in 0..n {
            rho.swap((i, j), (i + n, j + n));
            rho.swap((i + n, j), (i, j + n));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{hermiticity_defect, Basis};
    use crate::testutil::*;
    use rand::rngs::StdRng as Rng64;
    use rand::SeedableRng;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn decohering() -> ModelParams {
        ModelParams::standard()
            .with_rates_per_tau0(0.3, 0.2)
            .unwrap()
    }

    #[test]
    fn derived_parameters() {
        let p = ModelParams::standard();
        assert_eq!(p.alpha0, 0.1);
        assert_eq!(p.tau0, PI);
        // n̄_r = 1/(e^{0.74239} − 1), evaluated directly.
        let direct = 1.0 / (0.74239f64.exp() - 1.0);
        assert!((p.nbar_r - direct).abs() < 1e-14);
        assert!((p.nbar_r - 0.908306).abs() < 1e-5);
        let direct_sigma = 1.0 / ((2.0 * 0.74239f64).exp() - 1.0);
        assert!((p.nbar_sigma - direct_sigma).abs() < 1e-14);

        let cold = p.with_temperature_ratio(f64::INFINITY).unwrap();
        assert_eq!(cold.nbar_r, 0.0);
        assert_eq!(cold.nbar_sigma, 0.0);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ModelParams::new(0.0, 2.0, 0.2, 0.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 2.0, 0.2, -0.1, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 2.0, 0.2, 0.0, -0.1, 1.0).is_err());
        assert!(ModelParams::new(1.0, 2.0, -0.2, 0.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 2.0, 0.2, 0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 2.0, 0.2, 0.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn rates_per_tau0_round_trip() {
        let p = decohering();
        assert!((p.gamma * PI - 0.3).abs() < 1e-15);
        assert!((p.c_per_tau0() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn free_evolution_vanishes() {
        let params = ModelParams::standard().with_lambda0(0.0).unwrap();
        let space = FockSpace::new(6).unwrap();
        let l = Liouvillian::new(params, space);
        let mut rng = Rng64::seed_from_u64(1);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 12);
            let rho = DensityMatrix::new_unchecked(Basis::Composite { n_max: 6 }, rho).unwrap();
            let t = rand::Rng::gen_range(&mut rng, 0.0..10.0);
            assert_eq!(max_abs(&l.master_rhs(&rho, t).unwrap()), 0.0);
        }
    }

    #[test]
    fn stencil_matches_dense_operators() {
        let space = FockSpace::new(7).unwrap();
        let l = Liouvillian::new(decohering(), space);
        let mut rng = Rng64::seed_from_u64(2);
        for _ in 0..10 {
            let rho = random_matrix(&mut rng, 14);
            let t = rand::Rng::gen_range(&mut rng, 0.0..20.0);
            let mut out = CMatrix::zeros(14, 14);
            l.rhs_into(&rho, t, &mut out);
            assert!(max_abs(&(out - l.dense_rhs(&rho, t))) < 1e-12);
        }
    }

    #[test]
    fn trace_preservation_on_random_inputs() {
        let space = FockSpace::new(5).unwrap();
        let l = Liouvillian::new(decohering(), space);
        let mut rng = Rng64::seed_from_u64(3);
        let mut out = CMatrix::zeros(10, 10);
        for _ in 0..10_000 {
            let rho = random_unit_trace_hermitian(&mut rng, 10);
            let t = rand::Rng::gen_range(&mut rng, 0.0..50.0);
            l.rhs_into(&rho, t, &mut out);
            assert!(out.trace().norm() <= 1e-10);
            assert!(hermiticity_defect(&out) <= 1e-10);
        }
    }

    #[test]
    fn coherent_part_is_a_commutator() {
        let space = FockSpace::new(8).unwrap();
        let l = Liouvillian::new(ModelParams::standard(), space);
        let mut rng = Rng64::seed_from_u64(4);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 16);
            let t = rand::Rng::gen_range(&mut rng, 0.0..20.0);
            let h = l.hamiltonian(t);
            let expected = (&h * &rho - &rho * &h) * -I;
            let mut out = CMatrix::zeros(16, 16);
            l.rhs_into(&rho, t, &mut out);
            assert!(max_abs(&(out - expected)) < 1e-12);
        }
    }

    #[test]
    fn master_rhs_rejects_mismatched_space() {
        let l = Liouvillian::new(ModelParams::standard(), FockSpace::new(4).unwrap());
        let rho = DensityMatrix::new_unchecked(
            Basis::Composite { n_max: 5 },
            CMatrix::identity(10, 10) / Complex64::new(10.0, 0.0),
        )
        .unwrap();
        assert!(matches!(
            l.master_rhs(&rho, 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
        let q = DensityMatrix::new_unchecked(Basis::Qubit, CMatrix::identity(2, 2)).unwrap();
        assert!(matches!(
            l.master_rhs(&q, 0.0),
            Err(Error::WrongBasis { .. })
        ));
    }

    #[test]
    fn pulse_conjugation() {
        let space = FockSpace::new(4).unwrap();
        let u = pulse_unitary(space);
        let mut rng = Rng64::seed_from_u64(5);
        let rho = random_density(&mut rng, 8);

        let conj = &u * &rho * u.adjoint();
        let mut swapped = rho.clone();
        apply_pulse(&mut swapped);
        assert!(max_abs(&(&conj - &swapped)) < 1e-14);
        apply_pulse(&mut swapped);
        assert!(max_abs(&(&swapped - &rho)) == 0.0);

        let sz = kron(&pauli(Pauli::Z), &identity(4)).unwrap();
        assert!(max_abs(&(&u * &sz * u.adjoint() + &sz)) < 1e-14);

        let a_sz = kron(&pauli(Pauli::Z), &annihilation(space)).unwrap();
        let before = crate::hilbert::trace_of_product(&rho, &a_sz);
        let mut flipped = rho.clone();
        apply_pulse(&mut flipped);
        let after = crate::hilbert::trace_of_product(&flipped, &a_sz);
        assert!((before + after).norm() < 1e-14);
    }
}
