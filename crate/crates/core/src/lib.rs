//! Equilibrium (mean-force) states of a spin-1/2 coupled isotropically to one
//! or three bosonic baths with Lorentzian spectral densities.
//!
//! Each bath is replaced by a reaction coordinate, a single harmonic mode
//! coupled to the spin, and the spin + RC Hamiltonian is diagonalised in a
//! truncated Fock space. The reduced spin state is compared with the bare
//! Gibbs state, the classical result and the weak-coupling expansion.
//!
//! Units: `ħ = k_B = ω_L = 1`, spin length `S₀ = 1/2`, temperature
//! `t = k_B T/(ħ ω_L)`.

pub mod classical;
pub mod equilibrium;
pub mod error;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod weak;

pub use classical::{
    classical_gibbs_sz, cmf_sz, langevin, reorganisation_energy, sphere_quadrature_sz,
    ClassicalSpinState,
};
pub use equilibrium::{
    converge_fock, entanglement_entropy, gibbs_spin_state, gibbs_spin_sz, qmf_spin_state,
    qmf_spin_state_dense, spin_expectations, ConvergenceReport, ConvergenceStep, FockPolicy,
    SpinExpectations,
};
pub use error::{Error, Result};
pub use linalg::{
    eigh, gibbs_density, kron, partial_trace_keep_first, ComplexMatrix, DensityMatrix, Spectrum,
    C64,
};
pub use model::{
    build_hamiltonian, lambda_from_alpha, lorentzian_j, ohmic_rc_j, rc_operators,
    spin_half_operators, LorentzianBath, ModelConfig, Topology,
};
pub use weak::{
    d_dwl, integral_i1, integral_i2, integral_i3, integral_i3_inf, sz_weak, sz_weak_t0,
    PvQuadratureSettings, WeakIntegral,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
