//! Mean-force spin states, the bare spin Gibbs state, spin observables and
//! the Fock-cutoff convergence loop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, gibbs_density, partial_trace_keep_first, ComplexMatrix, DensityMatrix, POSITIVITY_TOL,
};
use crate::model::{
    beta_from_temperature, build_hamiltonian, ModelConfig, Topology, LARMOR, SPIN_LENGTH,
};

mod parity;

pub use parity::three_bath_spin_populations;

/// Spin observables of a reduced 2×2 state. Components are normalised by `S₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinExpectations {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub magnitude: f64,
    pub purity: f64,
    /// Von Neumann entropy in nats.
    pub entropy: f64,
}

impl SpinExpectations {
    /// Observables of the qubit state with Bloch vector `(sx, sy, sz)`.
    pub fn from_bloch(sx: f64, sy: f64, sz: f64) -> Self {
        let magnitude = (sx * sx + sy * sy + sz * sz).sqrt();
        let up = 0.5 * (1.0 + magnitude);
        let down = 0.5 * (1.0 - magnitude);
        Self {
            sx,
            sy,
            sz,
            magnitude,
            purity: 0.5 * (1.0 + magnitude * magnitude),
            entropy: shannon(&[up, down]),
        }
    }
}

fn shannon(p: &[f64]) -> f64 {
    // `0.0 +` keeps a pure state at +0 rather than −0.
    0.0 + p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum::<f64>()
}

/// Fock cutoff schedule for [`converge_fock`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockPolicy {
    pub n_start: usize,
    pub n_cap: usize,
    pub tol: f64,
}

pub const THREE_BATH_N_CAP: usize = 24;
pub const SINGLE_BATH_N_CAP: usize = 4096;

impl FockPolicy {
    pub fn for_topology(topology: Topology) -> Self {
        match topology {
            Topology::ThreeBath => Self {
                n_start: 6,
                n_cap: THREE_BATH_N_CAP,
                tol: 1e-4,
            },
            Topology::SingleBath => Self {
                n_start: 16,
                n_cap: SINGLE_BATH_N_CAP,
                tol: 1e-4,
            },
        }
    }

    pub fn validate(&self, topology: Topology) -> Result<()> {
        let hard_cap = match topology {
            Topology::ThreeBath => THREE_BATH_N_CAP,
            Topology::SingleBath => SINGLE_BATH_N_CAP,
        };
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::validation(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.n_start < 2 {
            return Err(Error::validation(format!(
                "n_start must be >= 2, got {}",
                self.n_start
            )));
        }
        if self.n_cap > hard_cap || self.n_cap < self.n_start {
            return Err(Error::validation(format!(
                "n_cap must lie in [n_start, {hard_cap}], got {}",
                self.n_cap
            )));
        }
        Ok(())
    }
}

/// One cutoff of the convergence loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStep {
    pub n_max: usize,
    pub observables: SpinExpectations,
    /// Largest change in `(sx, sy, sz, entropy)` against the previous step.
    pub delta: Option<f64>,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub n_max_used: usize,
    pub converged: bool,
    pub tol: f64,
    pub deltas: Vec<f64>,
    pub steps: Vec<ConvergenceStep>,
}

/// `ρ = exp(−βH_S′)/Z` traced down to the spin, with `β = 1/t` and `t = 0`
/// taken through the ground eigenspace.
///
/// Three baths use the parity-block real solver; one bath uses the dense
/// complex path.
pub fn qmf_spin_state(cfg: &ModelConfig, t: f64) -> Result<DensityMatrix> {
    let beta = beta_from_temperature(t)?;
    cfg.validate()?;
    match cfg.topology {
        Topology::ThreeBath => {
            let (up, down) = three_bath_spin_populations(cfg, beta)?;
            Ok(DensityMatrix::new_unchecked(
                ComplexMatrix::from_real_diagonal(&[up, down]),
            ))
        }
        Topology::SingleBath => qmf_spin_state_dense(cfg, t),
    }
}

/// Reference path for either topology: full Hamiltonian, complex Hermitian
/// eigendecomposition, Gibbs density, partial trace.
pub fn qmf_spin_state_dense(cfg: &ModelConfig, t: f64) -> Result<DensityMatrix> {
    let beta = beta_from_temperature(t)?;
    let h = build_hamiltonian(cfg)?;
    let spec = eigh(&h)?;
    let rho = gibbs_density(&spec, beta)?;
    partial_trace_keep_first(&rho, &cfg.factor_dims())
}

pub fn spin_expectations(rho: &DensityMatrix) -> Result<SpinExpectations> {
    if rho.dim() != 2 {
        return Err(Error::validation(format!(
            "spin observables need a 2x2 state, got dim {}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    // tr(ρ S_x) = Re ρ₀₁, tr(ρ S_y) = −Im ρ₀₁, tr(ρ S_z) = (ρ₀₀ − ρ₁₁)/2
    let sx = 2.0 * m[(0, 1)].re;
    let sy = -2.0 * m[(0, 1)].im;
    let sz = m[(0, 0)].re - m[(1, 1)].re;
    let scale = 0.5 / SPIN_LENGTH;
    // `+ 0.0` folds −0 into +0 so formatted output never shows "-0.0".
    let (sx, sy, sz) = (sx * scale + 0.0, sy * scale + 0.0, sz * scale + 0.0);
    Ok(SpinExpectations {
        sx,
        sy,
        sz,
        magnitude: (sx * sx + sy * sy + sz * sz).sqrt(),
        purity: rho.purity(),
        entropy: entanglement_entropy(rho)?,
    })
}

/// `−Σ pᵢ ln pᵢ` over the eigenvalues of `rho`.
pub fn entanglement_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eigs = rho.eigenvalues()?;
    let min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -POSITIVITY_TOL {
        return Err(Error::Positivity {
            min_eigenvalue: min,
        });
    }
    let clamped: Vec<f64> = eigs.into_iter().map(|p| p.max(0.0)).collect();
    Ok(shannon(&clamped))
}

/// `tanh(β ω_L S₀)` normalised by `S₀`; 1 at `t = 0`.
pub fn gibbs_spin_sz(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    (LARMOR * SPIN_LENGTH / t).tanh()
}

/// Bare spin Gibbs state for `H_S = −ω_L S_z`.
pub fn gibbs_spin_state(t: f64) -> Result<DensityMatrix> {
    beta_from_temperature(t)?;
    let sz = gibbs_spin_sz(t);
    let diag = [0.5 * (1.0 + sz), 0.5 * (1.0 - sz)];
    Ok(DensityMatrix::new_unchecked(
        ComplexMatrix::from_real_diagonal(&diag),
    ))
}

#[cfg(not(target_arch = "wasm32"))]
fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

// No monotonic clock on wasm32-unknown-unknown.
#[cfg(target_arch = "wasm32")]
fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    (f(), 0.0)
}

/// Raises `n_max` in steps of 2 from `policy.n_start` until the spin
/// observables and entropy move by at most `policy.tol` between successive
/// cutoffs. Returns the state at the last cutoff.
pub fn converge_fock(
    cfg: &ModelConfig,
    t: f64,
    policy: &FockPolicy,
) -> Result<(DensityMatrix, ConvergenceReport)> {
    policy.validate(cfg.topology)?;
    beta_from_temperature(t)?;
    let mut steps: Vec<ConvergenceStep> = Vec::new();
    let mut deltas = Vec::new();
    let mut n = policy.n_start;
    loop {
        let trial = cfg.with_n_max(n)?;
        let (rho, wall_seconds) = timed(|| qmf_spin_state(&trial, t));
        let rho = rho?;
        let obs = spin_expectations(&rho)?;
        let delta = steps.last().map(|prev| {
            let p = prev.observables;
            [
                obs.sx - p.sx,
                obs.sy - p.sy,
                obs.sz - p.sz,
                obs.entropy - p.entropy,
            ]
            .iter()
            .fold(0.0_f64, |acc, d| acc.max(d.abs()))
        });
        if let Some(d) = delta {
            deltas.push(d);
        }
        steps.push(ConvergenceStep {
            n_max: n,
            observables: obs,
            delta,
            wall_seconds,
        });
        let converged = delta.is_some_and(|d| d <= policy.tol);
        if converged || n + 2 > policy.n_cap {
            let report = ConvergenceReport {
                n_max_used: n,
                converged,
                tol: policy.tol,
                deltas,
                steps,
            };
            if converged {
                return Ok((rho, report));
            }
            return Err(Error::FockConvergence {
                report: Box::new(report),
            });
        }
        n += 2;
    }
}
