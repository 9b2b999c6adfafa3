//! Fixed-step RK4 integration of the master equation with instantaneous
//! spin-flip pulses at every multiple of `tau0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    hermiticity_defect, Basis, CMatrix, DensityMatrix, FockSpace, HERMITICITY_TOL, POSITIVITY_TOL,
};
use crate::measures::{
    eigenvalues_above, min_eigenvalue, negativity_with_route, participation_ratios, Route,
};
use crate::model::{apply_pulse, Liouvillian};

/// Largest allowed `|Tr ρ − 1|` at a sample.
pub const TRACE_ERROR_TOL: f64 = 1e-6;
/// Largest allowed population in the two highest Fock levels.
pub const TOP_LEVEL_TOL: f64 = 1e-6;
/// Negativity of a qubit–oscillator state cannot exceed one half.
const NEGATIVITY_BOUND: f64 = 0.5 + 1e-8;

/// Time discretisation in integer steps so pulse and sample times are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegratorConfig {
    pub steps_per_tau0: usize,
    pub steps_per_sample: usize,
    pub total_steps: usize,
    pub pulses: bool,
    /// Certify `ρ ≥ −10⁻⁸` at every sample.
    pub check_positivity: bool,
}

impl IntegratorConfig {
    pub const DEFAULT_STEPS_PER_TAU0: usize = 200;
    pub const DEFAULT_SAMPLES_PER_TAU0: usize = 100;

    /// Default `dt = tau0/200`, samples every `tau0/100`, pulses on.
    pub fn to_time(t_end_tau0: f64) -> Result<Self> {
        Self::new(
            Self::DEFAULT_STEPS_PER_TAU0,
            Self::DEFAULT_STEPS_PER_TAU0 / Self::DEFAULT_SAMPLES_PER_TAU0,
            t_end_tau0,
            true,
        )
    }

    /// `t_end_tau0` must be a whole number of steps.
    pub fn new(
        steps_per_tau0: usize,
        steps_per_sample: usize,
        t_end_tau0: f64,
        pulses: bool,
    ) -> Result<Self> {
        if steps_per_tau0 == 0 || steps_per_sample == 0 {
            return Err(Error::InvalidParameter(
                "steps per tau0 and steps per sample must be positive".into(),
            ));
        }
        if !(t_end_tau0 >= 0.0) || !t_end_tau0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t_end must be finite and non-negative, got {t_end_tau0}"
            )));
        }
        let steps = t_end_tau0 * steps_per_tau0 as f64;
        let total_steps = steps.round() as usize;
        if (steps - total_steps as f64).abs() > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "t_end = {t_end_tau0} tau0 is not a whole number of steps of tau0/{steps_per_tau0}"
            )));
        }
        Ok(Self {
            steps_per_tau0,
            steps_per_sample,
            total_steps,
            pulses,
            check_positivity: true,
        })
    }

    pub fn dt(&self, tau0: f64) -> f64 {
        tau0 / self.steps_per_tau0 as f64
    }

    pub fn t_end_tau0(&self) -> f64 {
        self.total_steps as f64 / self.steps_per_tau0 as f64
    }

    /// Same sample grid, half the step.
    pub fn refined(&self) -> Self {
        Self {
            steps_per_tau0: 2 * self.steps_per_tau0,
            steps_per_sample: 2 * self.steps_per_sample,
            total_steps: 2 * self.total_steps,
            ..*self
        }
    }

    fn is_sample_step(&self, step: usize) -> bool {
        step.is_multiple_of(self.steps_per_sample) || step == self.total_steps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Negativity,
    KR,
    KSigma,
    Purity,
    TraceError,
    MinEig,
    MeanA,
    SigmaZ,
}

impl Measure {
    pub const ALL: [Measure; 8] = [
        Measure::Negativity,
        Measure::KR,
        Measure::KSigma,
        Measure::Purity,
        Measure::TraceError,
        Measure::MinEig,
        Measure::MeanA,
        Measure::SigmaZ,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Negativity => "negativity",
            Measure::KR => "K_r",
            Measure::KSigma => "K_sigma",
            Measure::Purity => "purity",
            Measure::TraceError => "trace_error",
            Measure::MinEig => "min_eig",
            Measure::MeanA => "a",
            Measure::SigmaZ => "sz",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

/// One row of a trajectory. Unrequested measures are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sample {
    /// Time in natural units.
    pub t: f64,
    pub negativity: Option<f64>,
    pub k_r: Option<f64>,
    pub k_sigma: Option<f64>,
    pub purity: Option<f64>,
    pub trace_error: Option<f64>,
    pub min_eigenvalue: Option<f64>,
    pub mean_a: Option<Complex64>,
    pub sigma_z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub measures: Vec<Measure>,
    pub tau0: f64,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn times_tau0(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t / self.tau0).collect()
    }

    pub fn negativity(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.negativity).collect()
    }

    pub fn k_r(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.k_r).collect()
    }

    pub fn k_sigma(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.k_sigma).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub trajectory: Trajectory,
    pub final_state: DensityMatrix,
}

pub fn evolve(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    cfg: &IntegratorConfig,
    measures: &[Measure],
) -> Result<Evolution> {
    evolve_observed(rho0, l, cfg, measures, |_, _| {})
}

/// As [`evolve`], calling `observe(t, ρ)` at every sample after the checks.
pub fn evolve_observed(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    cfg: &IntegratorConfig,
    measures: &[Measure],
    mut observe: impl FnMut(f64, &CMatrix),
) -> Result<Evolution> {
    let space = rho0.require_composite()?;
    if space != l.space() {
        return Err(Error::DimensionMismatch {
            expected: l.space().dim(),
            got: space.dim(),
        });
    }
    rho0.check_invariants()?;

    let tau0 = l.params().tau0;
    let dt = cfg.dt(tau0);
    let dim = space.dim();
    let mut rho = rho0.matrix().clone();
    let mut k = CMatrix::zeros(dim, dim);
    let mut acc = CMatrix::zeros(dim, dim);
    let mut stage = CMatrix::zeros(dim, dim);
    let h = dt / 2.0;
    let full = dt;
    let sixth = dt / 6.0;

    let mut samples = Vec::with_capacity(cfg.total_steps / cfg.steps_per_sample + 2);
    samples.push(sample(&rho, 0.0, tau0, space, cfg, measures)?);
    observe(0.0, &rho);

    for step in 1..=cfg.total_steps {
        let t0 = (step - 1) as f64 * dt;
        let t_mid = t0 + dt / 2.0;
        let t1 = step as f64 * dt;

        l.rhs_into(&rho, t0, &mut k);
        acc.copy_from(&k);
        set_axpy(&mut stage, &rho, h, &k);
        l.rhs_into(&stage, t_mid, &mut k);
        add_scaled(&mut acc, 2.0, &k);
        set_axpy(&mut stage, &rho, h, &k);
        l.rhs_into(&stage, t_mid, &mut k);
        add_scaled(&mut acc, 2.0, &k);
        set_axpy(&mut stage, &rho, full, &k);
        l.rhs_into(&stage, t1, &mut k);
        add_scaled(&mut acc, 1.0, &k);
        add_scaled(&mut rho, sixth, &acc);

        if cfg.pulses && step % cfg.steps_per_tau0 == 0 {
            apply_pulse(&mut rho);
        }
        if cfg.is_sample_step(step) {
            samples.push(sample(&rho, t1, tau0, space, cfg, measures)?);
            observe(t1, &rho);
        }
    }

    let final_state = DensityMatrix::new_unchecked(
        Basis::Composite {
            n_max: space.n_max(),
        },
        rho,
    )?;
    Ok(Evolution {
        trajectory: Trajectory {
            measures: measures.to_vec(),
            tau0,
            samples,
        },
        final_state,
    })
}

/// `out = x + a y`
fn set_axpy(out: &mut CMatrix, x: &CMatrix, a: f64, y: &CMatrix) {
    for ((o, &xv), &yv) in out.iter_mut().zip(x.iter()).zip(y.iter()) {
        *o = xv + yv * a;
    }
}

/// `out += a y`
fn add_scaled(out: &mut CMatrix, a: f64, y: &CMatrix) {
    for (o, &yv) in out.iter_mut().zip(y.iter()) {
        *o += yv * a;
    }
}

fn sample(
    rho: &CMatrix,
    t: f64,
    tau0: f64,
    space: FockSpace,
    cfg: &IntegratorConfig,
    measures: &[Measure],
) -> Result<Sample> {
    let n = space.n_max();
    let violation = |what: String| Error::InvariantViolation { t: t / tau0, what };

    let trace = (0..space.dim()).map(|i| rho[(i, i)]).sum::<Complex64>();
    let trace_error = (trace - 1.0).norm();
    if trace_error > TRACE_ERROR_TOL {
        return Err(violation(format!("trace error {trace_error:.3e}")));
    }
    let herm = hermiticity_defect(rho);
    if herm > HERMITICITY_TOL {
        return Err(violation(format!("hermiticity defect {herm:.3e}")));
    }
    let top: f64 = [n - 1, n - 2]
        .iter()
        .flat_map(|&k| [rho[(k, k)].re, rho[(n + k, n + k)].re])
        .sum();
    if top > TOP_LEVEL_TOL {
        return Err(Error::Truncation {
            what: format!(
                "population of the top two Fock levels at t = {:.6} tau0",
                t / tau0
            ),
            tail: top,
            n_max: n,
        });
    }

    let wants = |m: Measure| measures.contains(&m);
    let mut out = Sample {
        t,
        ..Sample::default()
    };
    // A low-rank factor with residual below 1e-10 already bounds the
    // smallest eigenvalue.
    let mut positivity_known = false;
    if wants(Measure::Negativity) {
        let (neg, route) = negativity_with_route(rho);
        if neg > NEGATIVITY_BOUND {
            return Err(violation(format!("negativity {neg:.12} above 1/2")));
        }
        positivity_known = matches!(route, Route::LowRank(_));
        out.negativity = Some(neg);
    }
    if cfg.check_positivity && !positivity_known && !eigenvalues_above(rho, POSITIVITY_TOL) {
        return Err(violation(format!(
            "smallest eigenvalue {:.3e}",
            min_eigenvalue(rho)
        )));
    }
    if wants(Measure::MinEig) {
        out.min_eigenvalue = Some(min_eigenvalue(rho));
    }
    if wants(Measure::KR) || wants(Measure::KSigma) {
        let (k_sigma, k_r) = participation_ratios(rho);
        if wants(Measure::KR) {
            out.k_r = Some(k_r);
        }
        if wants(Measure::KSigma) {
            out.k_sigma = Some(k_sigma);
        }
    }
    if wants(Measure::Purity) {
        out.purity = Some(crate::hilbert::purity(rho));
    }
    if wants(Measure::TraceError) {
        out.trace_error = Some(trace_error);
    }
    if wants(Measure::MeanA) {
        let mut a = Complex64::new(0.0, 0.0);
        for base in [0, n] {
            for k in 0..n - 1 {
                a += rho[(base + k + 1, base + k)] * ((k + 1) as f64).sqrt();
            }
        }
        out.mean_a = Some(a);
    }
    if wants(Measure::SigmaZ) {
        let sz: f64 = (0..n)
            .map(|k| rho[(k, k)].re - rho[(n + k, n + k)].re)
            .sum();
        out.sigma_z = Some(sz);
    }
    Ok(out)
}

/// Zero-pads the Fock index of a composite state into a larger space.
pub fn embed(rho: &DensityMatrix, target: FockSpace) -> Result<DensityMatrix> {
    let src = rho.require_composite()?;
    let (n, m) = (src.n_max(), target.n_max());
    if m < n {
        return Err(Error::InvalidParameter(format!(
            "cannot embed n_max = {n} into n_max = {m}"
        )));
    }
    let mut out = CMatrix::zeros(2 * m, 2 * m);
    for s in 0..2 {
        for sp in 0..2 {
            out.view_mut((s * m, sp * m), (n, n))
                .copy_from(&rho.matrix().view((s * n, sp * n), (n, n)));
        }
    }
    DensityMatrix::new_unchecked(Basis::Composite { n_max: m }, out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub max_dev_negativity: f64,
    pub max_dev_k_r: f64,
    pub max_dev_k_sigma: f64,
    /// Set when either run failed; the deviations are then meaningless.
    pub error: Option<String>,
    pub pass: bool,
}

pub const CONVERGENCE_TOL: f64 = 1e-5;
pub const CONVERGENCE_EXTRA_LEVELS: usize = 16;

/// Reruns with half the step and `n_max + 16` on the same sample grid and
/// compares negativity and both participation ratios.
pub fn convergence_check(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    cfg: &IntegratorConfig,
) -> ConvergenceReport {
    let measures = [Measure::Negativity, Measure::KR, Measure::KSigma];
    let run = || -> Result<(Trajectory, Trajectory)> {
        let base = evolve(rho0, l, cfg, &measures)?.trajectory;
        let big = FockSpace::new(l.space().n_max() + CONVERGENCE_EXTRA_LEVELS)?;
        let fine_l = Liouvillian::new(*l.params(), big);
        let fine = evolve(&embed(rho0, big)?, &fine_l, &cfg.refined(), &measures)?.trajectory;
        Ok((base, fine))
    };
    match run() {
        Ok((a, b)) => {
            let dev = |f: fn(&Sample) -> Option<f64>| {
                a.samples
                    .iter()
                    .zip(&b.samples)
                    .map(|(x, y)| (f(x).unwrap_or(0.0) - f(y).unwrap_or(0.0)).abs())
                    .fold(0.0, f64::max)
            };
            let n = dev(|s| s.negativity);
            let kr = dev(|s| s.k_r);
            let ks = dev(|s| s.k_sigma);
            ConvergenceReport {
                max_dev_negativity: n,
                max_dev_k_r: kr,
                max_dev_k_sigma: ks,
                error: None,
                pass: n < CONVERGENCE_TOL && kr < CONVERGENCE_TOL && ks < CONVERGENCE_TOL,
            }
        }
        Err(e) => ConvergenceReport {
            max_dev_negativity: f64::NAN,
            max_dev_k_r: f64::NAN,
            max_dev_k_sigma: f64::NAN,
            error: Some(e.to_string()),
            pass: false,
        },
    }
}
