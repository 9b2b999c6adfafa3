//! Closed-form reference results, independent of the integrator.
//!
//! Conventions match the integrator: interaction picture, spin-major basis,
//! states at `t = nτ₀` are taken just after the `n`-th kick. Amplitude
//! functions take the segment index `n` with `nτ₀ ≤ t ≤ (n+1)τ₀`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    displacement, identity, kron, ln_factorial, parity, pauli, spin_block_diag, CMatrix, CVector,
    FockSpace, Pauli, PureState, I, ONE, TRUNCATION_TAIL, ZERO,
};
use crate::model::ModelParams;

/// Slack on segment bounds, in units of `tau0`.
const SEGMENT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NoDecoherence,
    /// The printed decohered amplitude.
    Decoherence,
    /// Exact mean-field amplitude of the damped, kicked oscillator.
    Damped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude {
    pub value: Complex64,
    pub regime: Regime,
    pub segment: usize,
    pub t: f64,
}

impl CoherentAmplitude {
    pub fn at(t: f64, params: &ModelParams, regime: Regime) -> Result<Self> {
        let n = segment_of(t, params);
        let value = match regime {
            Regime::NoDecoherence => alpha_tilde_nodecoh(t, n, params)?,
            Regime::Decoherence => alpha_tilde_decoh(t, n, params)?,
            Regime::Damped => alpha_tilde_damped(t, n, params)?,
        };
        Ok(Self {
            value,
            regime,
            segment: n,
            t,
        })
    }
}

/// Index `n` of the segment containing `t`; pulse times belong to the
/// segment they open.
pub fn segment_of(t: f64, params: &ModelParams) -> usize {
    (t / params.tau0 + SEGMENT_SLACK).floor().max(0.0) as usize
}

fn check_segment(t: f64, n: usize, params: &ModelParams) -> Result<f64> {
    let x = t / params.tau0 - n as f64;
    if !(-SEGMENT_SLACK..=1.0 + SEGMENT_SLACK).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "t = {:.6} tau0 lies outside segment {n}",
            t / params.tau0
        )));
    }
    Ok(t - n as f64 * params.tau0)
}

/// `2nα₀ + α₀(1 − e^{iω₀(t − nτ₀)})`
pub fn alpha_tilde_nodecoh(t: f64, n: usize, params: &ModelParams) -> Result<Complex64> {
    let delta = check_segment(t, n, params)?;
    let a0 = params.alpha0;
    Ok(Complex64::new(2.0 * n as f64 * a0, 0.0)
        + a0 * (ONE - Complex64::from_polar(1.0, params.omega0 * delta)))
}

/// The printed decohered amplitude,
/// `α₀ω₀ e^{−𝒞(n−1)τ₀/2}/(ω₀ − i𝒞/2) · {n(1 + e^{−𝒞τ₀/2})
///  + e^{iω₀Δ} e^{−𝒞τ₀/2} [e^{−(iω₀ + 𝒞/2)Δ} − 1]}` with `Δ = t − nτ₀`.
///
/// It agrees with [`alpha_tilde_damped`] on the first segment and at the
/// end of the second, but not in general.
pub fn alpha_tilde_decoh(t: f64, n: usize, params: &ModelParams) -> Result<Complex64> {
    let delta = check_segment(t, n, params)?;
    let (w, c, tau0) = (params.omega0, params.c, params.tau0);
    let nf = n as f64;
    let pre = Complex64::new(
        params.alpha0 * w * (-c / 2.0 * (nf - 1.0) * tau0).exp(),
        0.0,
    ) / Complex64::new(w, -c / 2.0);
    let half = (-c / 2.0 * tau0).exp();
    let inner = Complex64::new(nf * (1.0 + half), 0.0)
        + Complex64::from_polar(half, w * delta)
            * ((Complex64::new(-c / 2.0, -w) * delta).exp() - ONE);
    Ok(pre * inner)
}

/// Mean-field amplitude of the damped oscillator under the kicked drive,
/// `A[(1 + e^{−𝒞τ₀/2}) S_n e^{−𝒞Δ/2} + e^{−𝒞Δ/2} − e^{iω₀Δ}]` with
/// `A = α₀ω₀/(ω₀ − i𝒞/2)` and `S_n = Σ_{j<n} e^{−𝒞jτ₀/2}`.
///
/// Reduces to [`alpha_tilde_nodecoh`] at `𝒞 = 0`.
pub fn alpha_tilde_damped(t: f64, n: usize, params: &ModelParams) -> Result<Complex64> {
    let delta = check_segment(t, n, params)?;
    let (w, c, tau0) = (params.omega0, params.c, params.tau0);
    let a = Complex64::new(params.alpha0 * w, 0.0) / Complex64::new(w, -c / 2.0);
    let q = (-c / 2.0 * tau0).exp();
    let s_n = if c == 0.0 {
        n as f64
    } else {
        (1.0 - q.powi(n as i32)) / (1.0 - q)
    };
    let decay = (-c / 2.0 * delta).exp();
    Ok(a * (Complex64::new((1.0 + q) * s_n * decay + decay, 0.0)
        - Complex64::from_polar(1.0, w * delta)))
}

/// `(|↑⟩|−(−1)ⁿα̃⟩ + |↓⟩|(−1)ⁿα̃⟩)/√2` with the undamped amplitude.
pub fn cat_state(t: f64, n: usize, params: &ModelParams, space: FockSpace) -> Result<PureState> {
    let alpha = alpha_tilde_nodecoh(t, n, params)?;
    let s = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    cat_from_centres(-s * alpha, s * alpha, space)
}

fn cat_from_centres(up: Complex64, down: Complex64, space: FockSpace) -> Result<PureState> {
    let up = crate::hilbert::coherent_state(up, space)?;
    let down = crate::hilbert::coherent_state(down, space)?;
    let v = CVector::from_vec(vec![ONE, ZERO]).kronecker(up.amplitudes())
        + CVector::from_vec(vec![ZERO, ONE]).kronecker(down.amplitudes());
    PureState::new(v)
}

/// `2/(1 + e^{−4|α̃|²})`
pub fn k_pure(abs_alpha: f64) -> f64 {
    2.0 / (1.0 + (-4.0 * abs_alpha * abs_alpha).exp())
}

/// `√(1 − e^{−4|α̃|²})/2`
pub fn n_pure(abs_alpha: f64) -> f64 {
    (-(-4.0 * abs_alpha * abs_alpha).exp_m1()).sqrt() / 2.0
}

/// `D(β σ_z) = diag(D(β), D(−β))`
fn spin_displacement(beta: f64, space: FockSpace) -> Result<CMatrix> {
    let b = Complex64::new(beta, 0.0);
    Ok(spin_block_diag(
        &displacement(b, space)?,
        &displacement(-b, space)?,
    ))
}

/// The closed-form lab-frame propagator at `t = nτ₀`:
/// `D†(2nα₀σ_z)` for even `n`, `iσ_x e^{−iπa†a} D†(2nα₀σ_z)` for odd `n`.
pub fn stroboscopic_u(n: usize, params: &ModelParams, space: FockSpace) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "stroboscopic_u needs n >= 1".into(),
        ));
    }
    let d_dag = spin_displacement(-2.0 * n as f64 * params.alpha0, space)?;
    if n.is_multiple_of(2) {
        Ok(d_dag)
    } else {
        let flip = kron(&(pauli(Pauli::X) * I), &parity(space))?;
        Ok(flip * d_dag)
    }
}

/// One lab-frame period followed by a kick, `−iσ_x D(α₀σ_z) e^{−iπa†a} D†(α₀σ_z)`.
pub fn kicked_period(params: &ModelParams, space: FockSpace) -> Result<CMatrix> {
    let d = spin_displacement(params.alpha0, space)?;
    let u1 = &d * kron(&identity(2), &parity(space))? * d.adjoint();
    Ok(kron(&(pauli(Pauli::X) * -I), &identity(space.n_max()))? * u1)
}

/// `(−iσ_x U₁)ⁿ` by repeated multiplication.
pub fn composed_stroboscopic_u(
    n: usize,
    params: &ModelParams,
    space: FockSpace,
) -> Result<CMatrix> {
    let step = kicked_period(params, space)?;
    let mut u = identity(space.dim());
    for _ in 0..n {
        u = &step * u;
    }
    Ok(u)
}

/// Lab frame to interaction frame at `t = nτ₀` for `ε_z τ₀ ∈ 2πℤ`: the
/// oscillator picks up `e^{iπn a†a}`, the qubit only a global phase.
pub fn lab_to_interaction(n: usize, space: FockSpace) -> Result<CMatrix> {
    if n.is_multiple_of(2) {
        Ok(identity(space.dim()))
    } else {
        kron(&identity(2), &parity(space))
    }
}

/// `min_φ ‖(U − e^{iφ}V) P‖₂` where `P` projects onto inputs with Fock
/// index below `fock_cut`. Returns the distance and the aligning phase.
pub fn phase_aligned_distance(
    u: &CMatrix,
    v: &CMatrix,
    space: FockSpace,
    fock_cut: usize,
) -> (f64, Complex64) {
    let n = space.n_max();
    let cols: Vec<usize> = (0..2)
        .flat_map(|s| (0..fock_cut.min(n)).map(move |k| s * n + k))
        .collect();
    let pick = |m: &CMatrix| CMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])]);
    let (up, vp) = (pick(u), pick(v));
    let overlap: Complex64 = (vp.adjoint() * &up).trace();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    let diff = up - vp * phase;
    (crate::hilbert::operator_norm(&diff), phase)
}

/// Gaussian P-function
/// `weight/(π·width) · exp(−(α − center)(α* − conj_center)/width)`.
///
/// For a Hermitian block `conj_center = center*`; off-diagonal spin blocks
/// use an independent `conj_center`. `width = 0` is the coherent-state limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianP {
    pub weight: f64,
    pub center: Complex64,
    pub conj_center: Complex64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    Ground,
    Thermal,
}

impl GaussianP {
    pub fn new(weight: f64, center: Complex64, width: f64) -> Result<Self> {
        Self::with_conj_center(weight, center, center.conj(), width)
    }

    pub fn with_conj_center(
        weight: f64,
        center: Complex64,
        conj_center: Complex64,
        width: f64,
    ) -> Result<Self> {
        if !(width >= 0.0) || !width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Gaussian width must be finite and non-negative, got {width}"
            )));
        }
        Ok(Self {
            weight,
            center,
            conj_center,
            width,
        })
    }

    pub fn is_hermitian(&self) -> bool {
        (self.conj_center - self.center.conj()).norm() <= 1e-14 * (1.0 + self.center.norm())
    }

    /// Value at `α`. Requires `width > 0`.
    pub fn density(&self, alpha: Complex64) -> Complex64 {
        let v = self.width;
        let arg = (alpha - self.center) * (alpha.conj() - self.conj_center);
        (-arg / v).exp() * (self.weight / (std::f64::consts::PI * v))
    }

    /// Fock-basis matrix of `∫d²α P(α)|α⟩⟨α|`.
    ///
    /// `ρ_kl = w/(v+1) e^{−c c̄/(v+1)} Σ_j √(k!l!)/((k−j)!(l−j)!j!)
    ///        (v/(v+1))^j (c/(v+1))^{k−j} (c̄/(v+1))^{l−j}`.
    pub fn to_fock_matrix(&self, space: FockSpace) -> Result<CMatrix> {
        let n = space.n_max();
        let v1 = self.width + 1.0;
        let x = self.center / v1;
        let y = self.conj_center / v1;
        let r = self.width / v1;
        let ln_fact: Vec<f64> = (0..n).map(ln_factorial).collect();
        let pow = |z: Complex64, k: usize| -> Complex64 {
            if k == 0 {
                ONE
            } else {
                z.powu(k as u32)
            }
        };
        let xp: Vec<Complex64> = (0..n).map(|k| pow(x, k)).collect();
        let yp: Vec<Complex64> = (0..n).map(|k| pow(y, k)).collect();
        let pre = (-self.center * self.conj_center / v1).exp() * (self.weight / v1);
        let mut m = CMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                let mut acc = ZERO;
                for j in 0..=k.min(l) {
                    let ln_coef = 0.5 * (ln_fact[k] + ln_fact[l])
                        - ln_fact[k - j]
                        - ln_fact[l - j]
                        - ln_fact[j];
                    let rj = if j == 0 { 1.0 } else { r.powi(j as i32) };
                    acc += xp[k - j] * yp[l - j] * (ln_coef.exp() * rj);
                }
                m[(k, l)] = acc * pre;
            }
        }
        if self.is_hermitian() {
            let tail = self.weight - m.trace().re;
            if tail > TRUNCATION_TAIL * self.weight.abs().max(1e-300) {
                return Err(Error::Truncation {
                    what: format!(
                        "Gaussian P with center {} and width {}",
                        self.center, self.width
                    ),
                    tail,
                    n_max: n,
                });
            }
        }
        Ok(m)
    }

    /// Convolves with the Fokker–Planck kernel from `nτ₀` to `t` for the
    /// given spin block.
    pub fn propagate(&self, t: f64, n: usize, params: &ModelParams, spin: Spin) -> Result<Self> {
        let delta = check_segment(t, n, params)?;
        let decay = (-params.c * delta).exp();
        let w = drift_offset(delta, n, params, spin);
        Ok(Self {
            weight: self.weight,
            center: self.center * decay.sqrt() - w,
            conj_center: self.conj_center * decay.sqrt() - w.conj(),
            width: self.width * decay + params.nbar_r * (1.0 - decay),
        })
    }
}

/// Drift offset of the kernel centre,
/// `w_↑ = (−1)ⁿ A (e^{−𝒞Δ/2} − e^{iω₀Δ})`, `w_↓ = −w_↑`.
fn drift_offset(delta: f64, n: usize, params: &ModelParams, spin: Spin) -> Complex64 {
    let (w, c) = (params.omega0, params.c);
    let a = Complex64::new(params.alpha0 * w, 0.0) / Complex64::new(w, -c / 2.0);
    let parity = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let sign = match spin {
        Spin::Up => parity,
        Spin::Down => -parity,
    };
    a * (Complex64::new((-c / 2.0 * delta).exp(), 0.0) - Complex64::from_polar(1.0, w * delta))
        * sign
}

/// Green's function of the Fokker–Planck equation for one spin block,
/// from `α_src` at `nτ₀` to `α` at `t`:
/// `exp(−|α − α_src e^{−𝒞Δ/2} + w|²/σ²)/(πσ²)` with `σ² = n̄_r(1 − e^{−𝒞Δ})`.
pub fn fp_green(
    alpha: Complex64,
    alpha_src: Complex64,
    t: f64,
    n: usize,
    params: &ModelParams,
    spin: Spin,
) -> Result<f64> {
    let delta = check_segment(t, n, params)?;
    if !(delta > 0.0) || !(params.c > 0.0) || !(params.nbar_r > 0.0) {
        return Err(Error::InvalidParameter(
            "fp_green needs t > n tau0, C > 0 and a positive bath occupation".into(),
        ));
    }
    let var = params.nbar_r * (1.0 - (-params.c * delta).exp());
    let w = drift_offset(delta, n, params, spin);
    let d = alpha - alpha_src * (-params.c * delta / 2.0).exp() + w;
    Ok((-d.norm_sqr() / var).exp() / (std::f64::consts::PI * var))
}

/// Diagonal spin-block P-functions at time `t`, propagated segment by
/// segment from the initial state with kicks swapping the blocks.
/// Returns `(P_↑↑, P_↓↓)`.
pub fn diagonal_blocks(
    t: f64,
    params: &ModelParams,
    initial: Initial,
) -> Result<(GaussianP, GaussianP)> {
    let width0 = match initial {
        Initial::Ground => 0.0,
        Initial::Thermal => params.nbar_r,
    };
    let mut up = GaussianP::new(0.5, ZERO, width0)?;
    let mut down = up;
    let n_end = segment_of(t, params);
    for n in 0..n_end {
        let end = (n + 1) as f64 * params.tau0;
        let up_end = up.propagate(end, n, params, Spin::Up)?;
        let down_end = down.propagate(end, n, params, Spin::Down)?;
        up = down_end;
        down = up_end;
    }
    Ok((
        up.propagate(t, n_end, params, Spin::Up)?,
        down.propagate(t, n_end, params, Spin::Down)?,
    ))
}

/// The four spin blocks `[P_↑↑, P_↑↓, P_↓↑, P_↓↓]` at `t = nτ₀` without
/// decoherence, starting from `|+⟩⟨+| ⊗ ρ_thermal`.
///
/// The off-diagonal blocks are
/// `(1/2πn̄)e^{(1/n̄+2)4n²α₀²} e^{−|α|²/n̄} e^{±2(−1)ⁿ(1/n̄+2)(α−α*)nα₀}`,
/// i.e. Gaussians with `c = ∓2(−1)ⁿ(1+2n̄)nα₀`, `c̄ = −c` and weight
/// `½e^{−8n²α₀²(1+2n̄)}`.
pub fn thermal_p_blocks(n: usize, params: &ModelParams) -> Result<[GaussianP; 4]> {
    let nbar = params.nbar_r;
    if !(nbar > 0.0) {
        return Err(Error::InvalidParameter(
            "thermal P-blocks need a positive occupation".into(),
        ));
    }
    let s = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let shift = 2.0 * n as f64 * params.alpha0;
    let up = GaussianP::new(0.5, Complex64::new(-s * shift, 0.0), nbar)?;
    let down = GaussianP::new(0.5, Complex64::new(s * shift, 0.0), nbar)?;
    let c = Complex64::new(-s * (1.0 + 2.0 * nbar) * shift, 0.0);
    let weight = 0.5 * (-2.0 * shift * shift * (1.0 + 2.0 * nbar)).exp();
    let up_down = GaussianP::with_conj_center(weight, c, -c, nbar)?;
    let down_up = GaussianP::with_conj_center(weight, up_down.conj_center.conj(), c.conj(), nbar)?;
    Ok([up, up_down, down_up, down])
}

/// `K_σ(nτ₀) = 2/(1 + exp[−16n²α₀²(1 + 2n̄_r)])`
pub fn k_sigma_thermal(n: usize, params: &ModelParams) -> f64 {
    let x = 4.0 * (n as f64 * params.alpha0).powi(2);
    2.0 / (1.0 + (-4.0 * x * (1.0 + 2.0 * params.nbar_r)).exp())
}

/// The printed thermal form `2/(1 + exp[−4|α̃|²/(2n̄_r + 1)])`.
///
/// It lacks the mixedness factor `1 + 2n̄_r`; see [`k_r_thermal_anytime`].
pub fn k_r_thermal_nodecoh(t: f64, n: usize, params: &ModelParams) -> Result<f64> {
    let a = alpha_tilde_nodecoh(t, n, params)?.norm();
    let m = 2.0 * params.nbar_r + 1.0;
    Ok(2.0 / (1.0 + (-4.0 * a * a / m).exp()))
}

/// `(1 + 2n̄_r)` times [`k_r_thermal_nodecoh`]: the oscillator participation
/// ratio of the thermal start at any time without decoherence.
pub fn k_r_thermal_anytime(t: f64, n: usize, params: &ModelParams) -> Result<f64> {
    Ok((1.0 + 2.0 * params.nbar_r) * k_r_thermal_nodecoh(t, n, params)?)
}

/// `K_r(nτ₀) = 2(1 + 2n̄_r)/(1 + exp[−16n²α₀²/(1 + 2n̄_r)])`
pub fn k_r_thermal_ntau(n: usize, params: &ModelParams) -> f64 {
    let m = 1.0 + 2.0 * params.nbar_r;
    let x = 4.0 * (n as f64 * params.alpha0).powi(2);
    2.0 * m / (1.0 + (-4.0 * x / m).exp())
}

/// Oscillator participation ratio under oscillator damping,
/// `2m/(1 + exp[−4|α̃|²/m])` with `m = 2n̄_r(1 − e^{−𝒞t}) + 1` from the
/// ground state and `m = 2n̄_r + 1` from the thermal state, evaluated with
/// the damped amplitude.
pub fn k_r_decoh(t: f64, n: usize, params: &ModelParams, initial: Initial) -> Result<f64> {
    let a = alpha_tilde_damped(t, n, params)?.norm();
    Ok(k_r_decoh_with_amplitude(a, t, params, initial))
}

/// As [`k_r_decoh`] with the amplitude supplied by the caller.
pub fn k_r_decoh_with_amplitude(
    abs_alpha: f64,
    t: f64,
    params: &ModelParams,
    initial: Initial,
) -> f64 {
    let m = match initial {
        Initial::Ground => 2.0 * params.nbar_r * (-(-params.c * t).exp_m1()) + 1.0,
        Initial::Thermal => 2.0 * params.nbar_r + 1.0,
    };
    2.0 * m / (1.0 + (-4.0 * abs_alpha * abs_alpha / m).exp())
}

/// `1/K = Σ_ij w_i w_j/(1 + v_i + v_j) exp[−(c_i − c_j)(c̄_i − c̄_j)/(1 + v_i + v_j)]`
/// for the oscillator state `∫d²α Σ_i P_i(α)|α⟩⟨α|`.
pub fn k_from_p(mixture: &[GaussianP]) -> f64 {
    let mut inv = ZERO;
    for a in mixture {
        for b in mixture {
            let s = 1.0 + a.width + b.width;
            let arg = (a.center - b.center) * (a.conj_center - b.conj_center);
            inv += (-arg / s).exp() * (a.weight * b.weight / s);
        }
    }
    1.0 / inv.re
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pure_measures_are_linked(a in 0.0f64..3.0) {
            let k = k_pure(a);
            prop_assert!((1.0..=2.0).contains(&k));
            prop_assert!(((2.0 - 2.0 / k).max(0.0).sqrt() / 2.0 - n_pure(a)).abs() < 1e-12);
        }

        #[test]
        fn damped_amplitude_is_continuous_at_kicks(c in 0.0f64..0.5, n in 1usize..60) {
            let p = ModelParams::standard().with_rates_per_tau0(0.0, c).unwrap();
            let t = n as f64 * p.tau0;
            let jump = alpha_tilde_damped(t, n - 1, &p).unwrap() - alpha_tilde_damped(t, n, &p).unwrap();
            prop_assert!(jump.norm() < 1e-12);
        }

        #[test]
        fn undamped_limit(x in 0.0f64..30.0) {
            let p = ModelParams::standard();
            let t = x * p.tau0;
            let n = segment_of(t, &p);
            let d = alpha_tilde_damped(t, n, &p).unwrap() - alpha_tilde_nodecoh(t, n, &p).unwrap();
            prop_assert!(d.norm() < 1e-12);
        }

        #[test]
        fn propagation_keeps_weight_and_width(
            c in 0.001f64..0.5,
            x in 0.0f64..20.0,
            re in -2.0f64..2.0,
            im in -2.0f64..2.0,
            w in 0.0f64..3.0,
        ) {
            let p = ModelParams::standard().with_rates_per_tau0(0.0, c).unwrap();
            let t = x * p.tau0;
            let n = segment_of(t, &p);
            let g = GaussianP::new(0.5, Complex64::new(re, im), w).unwrap();
            let out = g.propagate(t, n, &p, Spin::Up).unwrap();
            prop_assert_eq!(out.weight, 0.5);
            prop_assert!(out.width >= 0.0);
            // the width relaxes toward the bath occupation
            prop_assert!((out.width - p.nbar_r).abs() <= (w - p.nbar_r).abs() + 1e-12);
        }
    }
}
