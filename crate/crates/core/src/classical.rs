//! Classical fixed-length spin: Gibbs magnetisation, reorganisation energy
//! and the classical mean-force state.
//!
//! For a classical spin the bath only shifts the effective Hamiltonian by
//! `−Q|S|²`, which is constant on the sphere `|S| = S₀`. The mean-force state
//! is therefore the bare Gibbs state for every bath.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{beta_from_temperature, LorentzianBath, LARMOR, SPIN_LENGTH};
use crate::quadrature::{
    gauss_legendre, integrate_to_infinity, integrate_with_breakpoints, Tolerance,
};

/// Below this argument the Langevin function uses its cubic series.
pub const LANGEVIN_SERIES_CUTOFF: f64 = 1e-4;

/// `L(x) = coth x − 1/x`, odd in `x`.
pub fn langevin(x: f64) -> f64 {
    if x.is_infinite() {
        return x.signum();
    }
    if x.abs() < LANGEVIN_SERIES_CUTOFF {
        return x / 3.0 - x * x * x / 45.0;
    }
    1.0 / x.tanh() - 1.0 / x
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSpinState {
    /// `+inf` at `t = 0`.
    pub beta: f64,
    pub larmor: f64,
    pub sz: f64,
}

impl ClassicalSpinState {
    pub fn at_temperature(t: f64) -> Result<Self> {
        let beta = beta_from_temperature(t)?;
        Ok(Self {
            beta,
            larmor: LARMOR,
            sz: langevin(beta * LARMOR * SPIN_LENGTH),
        })
    }
}

/// `⟨S_z⟩/S₀` of a classical spin of length `S₀` in the field, `L(β ω_L S₀)`.
pub fn classical_gibbs_sz(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    langevin(LARMOR * SPIN_LENGTH / t)
}

/// `Q = ∫₀^∞ J(ω)/ω dω` by adaptive quadrature.
pub fn reorganisation_energy(bath: &LorentzianBath) -> Result<f64> {
    bath.validate()?;
    if bath.alpha == 0.0 {
        return Ok(0.0);
    }
    let tol = Tolerance::new(1e-11, 0.0);
    let w0 = bath.omega0;
    let g = bath.gamma;
    // Panel edges resolve the peak; the tail beyond it falls off as ω⁻⁴.
    let lo = (w0 - 5.0 * g).max(0.0);
    let hi = w0 + 5.0 * g;
    let mut points = vec![0.0];
    if lo > 0.0 {
        points.push(lo);
    }
    points.extend([w0, hi]);
    let body = integrate_with_breakpoints(|w| bath.spectral_density_over_omega(w), &points, tol)?;
    let tail = integrate_to_infinity(|w| bath.spectral_density_over_omega(w), hi, tol)?;
    Ok(body.value + tail.value)
}

/// Classical mean-force `s_z`. Equal to [`classical_gibbs_sz`] for every
/// bath; the argument is accepted only to make that explicit.
pub fn cmf_sz(t: f64, _bath: &LorentzianBath) -> f64 {
    classical_gibbs_sz(t)
}

/// `s_z` from direct quadrature over the sphere `|S| = S₀` of
/// `exp(−β(H_S − Q S₀²))` with `H_S = −ω_L S_z`, using `nodes`-point
/// Gauss–Legendre in `cos θ`. The azimuth integrates out.
pub fn sphere_quadrature_sz(t: f64, q: f64, nodes: usize) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let beta = 1.0 / t;
    let (u, w) = gauss_legendre(nodes);
    // Shift by the maximum exponent so nothing overflows at low t.
    let shift = beta * (LARMOR * SPIN_LENGTH + q * SPIN_LENGTH * SPIN_LENGTH);
    let mut z = 0.0;
    let mut m = 0.0;
    for (&ui, &wi) in u.iter().zip(&w) {
        let sz = SPIN_LENGTH * ui;
        let energy = -LARMOR * sz - q * SPIN_LENGTH * SPIN_LENGTH;
        let boltz = (-beta * energy - shift).exp();
        z += wi * boltz;
        m += wi * boltz * ui;
    }
    m / z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn langevin_limits() {
        assert_eq!(langevin(0.0), 0.0);
        assert_eq!(langevin(f64::INFINITY), 1.0);
        assert!((langevin(1.0) - (1.0 / 1f64.tanh() - 1.0)).abs() < 1e-15);
        assert!((langevin(1.0) - 0.313_035).abs() < 1e-6);
        assert!((langevin(-2.0) + langevin(2.0)).abs() < 1e-15);
    }

    #[test]
    fn langevin_series_joins_closed_form() {
        let x = LANGEVIN_SERIES_CUTOFF;
        let series = x / 3.0 - x.powi(3) / 45.0;
        // The closed form cancels two terms of size 1/x here.
        let closed = 1.0 / x.tanh() - 1.0 / x;
        assert!((series - closed).abs() < 1e-11);
        assert!((langevin(x * 0.999) - series * 0.999).abs() < 1e-12);
    }

    #[test]
    fn classical_gibbs_endpoints() {
        assert_eq!(classical_gibbs_sz(0.0), 1.0);
        assert!(classical_gibbs_sz(1e8) < 1e-8);
        // t = 1/2 gives x = 1
        assert!((classical_gibbs_sz(0.5) - langevin(1.0)).abs() < 1e-15);
        assert_eq!(ClassicalSpinState::at_temperature(0.0).unwrap().sz, 1.0);
    }

    #[test]
    fn sphere_oracle_reproduces_langevin() {
        for t in [0.05, 0.5, 1.0, 3.0] {
            let oracle = sphere_quadrature_sz(t, 0.0, 96);
            assert!((oracle - classical_gibbs_sz(t)).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn reorganisation_energy_matches_closed_form() {
        let bath = LorentzianBath::new(2.0, 0.6, 10.0, 1e10).unwrap();
        let q = reorganisation_energy(&bath).unwrap();
        assert!((q - 2.5).abs() < 1e-8);
        assert_eq!(reorganisation_energy(&bath.with_alpha(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn cmf_ignores_the_bath() {
        let strong = LorentzianBath::new(2.0, 0.6, 10.0, 1e10).unwrap();
        assert_eq!(cmf_sz(1.0, &strong), cmf_sz(1.0, &strong.with_alpha(0.0)));
        assert_eq!(cmf_sz(0.5, &strong), classical_gibbs_sz(0.5));
    }
}
