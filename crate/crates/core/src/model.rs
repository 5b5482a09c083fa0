//! Units, spectral densities, spin and oscillator operators, and the
//! augmented spin + reaction-coordinate Hamiltonians.
//!
//! Everything is expressed in units where `ħ = k_B = ω_L = 1` and the spin
//! length is `S₀ = 1/2`. Frequencies are multiples of the Larmor frequency and
//! temperatures are `t = k_B T / (ħ ω_L)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, DEFAULT_MAX_HILBERT_DIM};

pub const HBAR: f64 = 1.0;
pub const K_B: f64 = 1.0;
pub const LARMOR: f64 = 1.0;
pub const SPIN_LENGTH: f64 = 0.5;

/// `β = 1/t`, with `t = 0` mapped to `+inf`.
pub fn beta_from_temperature(t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::validation(format!(
            "temperature must be >= 0, got {t}"
        )));
    }
    Ok(if t == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (K_B * t)
    })
}

/// Lorentzian bath parameters, all in units of `ω_L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzianBath {
    /// Peak (reaction-coordinate) frequency Ω.
    pub omega0: f64,
    /// Peak width Γ.
    pub gamma: f64,
    /// Coupling amplitude α.
    pub alpha: f64,
    /// Residual-bath cutoff Λ. Only the residual spectral density uses it.
    pub lambda_cut: f64,
}

impl LorentzianBath {
    pub fn new(omega0: f64, gamma: f64, alpha: f64, lambda_cut: f64) -> Result<Self> {
        let bath = Self {
            omega0,
            gamma,
            alpha,
            lambda_cut,
        };
        bath.validate()?;
        Ok(bath)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega0, self.gamma, self.alpha, self.lambda_cut]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::validation("bath parameters must be finite"));
        }
        if self.omega0 <= 0.0 || self.gamma <= 0.0 || self.lambda_cut <= 0.0 {
            return Err(Error::validation(format!(
                "omega0, gamma and lambda_cut must be positive (got {}, {}, {})",
                self.omega0, self.gamma, self.lambda_cut
            )));
        }
        if self.alpha < 0.0 {
            return Err(Error::validation(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Same bath with a different coupling amplitude.
    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }

    /// Spin-RC coupling `λ = ω_L √(2α/ħ)`.
    pub fn lambda(&self) -> f64 {
        LARMOR * (2.0 * self.alpha / HBAR).sqrt()
    }

    /// Closed-form reorganisation energy `λ²/(2Ω²)`.
    pub fn reorganisation_energy_closed_form(&self) -> f64 {
        self.lambda().powi(2) / (2.0 * self.omega0 * self.omega0)
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        omega * self.spectral_density_over_omega(omega)
    }

    /// `J(ω)/ω`, finite at the origin.
    pub fn spectral_density_over_omega(&self, omega: f64) -> f64 {
        let w0sq = self.omega0 * self.omega0;
        let detune = w0sq - omega * omega;
        let lam2 = 2.0 * self.alpha * LARMOR * LARMOR / HBAR;
        lam2 * self.gamma / (PI * (detune * detune + self.gamma * self.gamma * omega * omega))
    }
}

/// `λ = ω_L √(2α/ħ)`.
pub fn lambda_from_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::validation(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    Ok(LARMOR * (2.0 * alpha / HBAR).sqrt())
}

/// Lorentzian spectral density `J(ω) = λ²Γω / (π[(Ω² − ω²)² + Γ²ω²])`.
pub fn lorentzian_j(omega: f64, bath: &LorentzianBath) -> f64 {
    bath.spectral_density(omega)
}

/// Ohmic residual-bath density `Γω Λ² / (π(ω² + Λ²))`.
pub fn ohmic_rc_j(omega: f64, gamma: f64, lambda_cut: f64) -> f64 {
    // Written as Γω/(π(1 + (ω/Λ)²)) so Λ = 1e10 does not overflow.
    let r = omega / lambda_cut;
    gamma * omega / (PI * (1.0 + r * r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Spin components `S_x, S_y, S_z` each coupled to their own bath.
    #[serde(alias = "three")]
    ThreeBath,
    /// All three components coupled to one bath through `S_x + S_y + S_z`.
    #[serde(alias = "single")]
    SingleBath,
}

impl Topology {
    pub fn label(self) -> &'static str {
        match self {
            Topology::ThreeBath => "three_bath",
            Topology::SingleBath => "single_bath",
        }
    }

    /// Number of reaction coordinates.
    pub fn modes(self) -> u32 {
        match self {
            Topology::ThreeBath => 3,
            Topology::SingleBath => 1,
        }
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "three_bath" | "three" | "3" => Ok(Topology::ThreeBath),
            "single_bath" | "single" | "1" => Ok(Topology::SingleBath),
            other => Err(Error::validation(format!("unknown topology {other:?}"))),
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelConfig {
    pub topology: Topology,
    pub bath: LorentzianBath,
    /// Fock levels kept per reaction coordinate.
    pub n_max: usize,
    pub max_dim: usize,
}

impl ModelConfig {
    pub fn new(topology: Topology, bath: LorentzianBath, n_max: usize) -> Result<Self> {
        let cfg = Self {
            topology,
            bath,
            n_max,
            max_dim: DEFAULT_MAX_HILBERT_DIM,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_n_max(&self, n_max: usize) -> Result<Self> {
        let cfg = Self { n_max, ..*self };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.bath.validate()?;
        if self.n_max < 2 {
            return Err(Error::validation(format!(
                "n_max must be >= 2, got {}",
                self.n_max
            )));
        }
        let dim = self.hilbert_dim();
        if dim > self.max_dim {
            return Err(Error::Sizing {
                dim,
                cap: self.max_dim,
            });
        }
        Ok(())
    }

    /// `2·n³` for three baths, `2·n` for one; saturates on overflow.
    pub fn hilbert_dim(&self) -> usize {
        let modes = self
            .n_max
            .checked_pow(self.topology.modes())
            .unwrap_or(usize::MAX);
        modes.saturating_mul(2)
    }

    /// Tensor factor dimensions, spin first.
    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = vec![2];
        dims.extend(std::iter::repeat_n(
            self.n_max,
            self.topology.modes() as usize,
        ));
        dims
    }
}

/// Spin-1/2 operators `S_i = σ_i / 2` (ħ = 1).
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
}

pub fn spin_half_operators() -> SpinOperators {
    let z = C64::new(0.0, 0.0);
    let h = C64::new(0.5, 0.0);
    let ih = C64::new(0.0, 0.5);
    SpinOperators {
        sx: ComplexMatrix::from_row_major(2, 2, vec![z, h, h, z]).expect("2x2"),
        sy: ComplexMatrix::from_row_major(2, 2, vec![z, -ih, ih, z]).expect("2x2"),
        sz: ComplexMatrix::from_row_major(2, 2, vec![h, z, z, -h]).expect("2x2"),
    }
}

/// Truncated-Fock operators of one unit-mass reaction coordinate.
#[derive(Clone, Debug)]
pub struct OscillatorOperators {
    pub x: ComplexMatrix,
    pub p: ComplexMatrix,
    /// `Ω(a†a + 1/2)`.
    pub h: ComplexMatrix,
}

/// `x = (a + a†)/√(2Ω)`, `p = i√(Ω/2)(a† − a)` in the lowest `n_max` Fock
/// states. The Hamiltonian is the number-operator form, so its diagonal is
/// `Ω(k + 1/2)` on every kept level; the `½(p² + Ω²x²)` product of truncated
/// matrices would push a spurious level `Ω(n_max − 1)/2` into the spectrum.
pub fn rc_operators(n_max: usize, omega0: f64) -> Result<OscillatorOperators> {
    if n_max < 2 {
        return Err(Error::validation(format!(
            "n_max must be >= 2, got {n_max}"
        )));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::validation(format!(
            "omega0 must be positive, got {omega0}"
        )));
    }
    let x_scale = (HBAR / (2.0 * omega0)).sqrt();
    let p_scale = (HBAR * omega0 / 2.0).sqrt();
    let mut x = ComplexMatrix::zeros(n_max, n_max);
    let mut p = ComplexMatrix::zeros(n_max, n_max);
    for k in 1..n_max {
        let amp = (k as f64).sqrt();
        // a[k-1, k] = √k, a†[k, k-1] = √k
        x[(k - 1, k)] = C64::new(x_scale * amp, 0.0);
        x[(k, k - 1)] = C64::new(x_scale * amp, 0.0);
        p[(k, k - 1)] = C64::new(0.0, p_scale * amp);
        p[(k - 1, k)] = C64::new(0.0, -p_scale * amp);
    }
    let levels: Vec<f64> = (0..n_max)
        .map(|k| HBAR * omega0 * (k as f64 + 0.5))
        .collect();
    Ok(OscillatorOperators {
        x,
        p,
        h: ComplexMatrix::from_real_diagonal(&levels),
    })
}

/// Adds `coeff · (f₀ ⊗ f₁ ⊗ …)` into `out` without materialising the product.
fn add_product_term(out: &mut ComplexMatrix, coeff: f64, factors: &[&ComplexMatrix]) {
    fn recurse(
        out: &mut ComplexMatrix,
        factors: &[&ComplexMatrix],
        row: usize,
        col: usize,
        value: C64,
    ) {
        match factors.split_first() {
            None => out[(row, col)] += value,
            Some((f, rest)) => {
                for i in 0..f.rows() {
                    for j in 0..f.cols() {
                        let fij = f[(i, j)];
                        if fij.re == 0.0 && fij.im == 0.0 {
                            continue;
                        }
                        recurse(
                            out,
                            rest,
                            row * f.rows() + i,
                            col * f.cols() + j,
                            value * fij,
                        );
                    }
                }
            }
        }
    }
    if coeff != 0.0 {
        recurse(out, factors, 0, 0, C64::new(coeff, 0.0));
    }
}

/// Augmented spin + reaction-coordinate Hamiltonian.
///
/// Three baths, factor order spin ⊗ RCx ⊗ RCy ⊗ RCz:
/// `H = −ω_L S_z + Σᵢ hᵢ + λ(S_x x₁ + S_y x₂ + S_z x₃)`.
///
/// Single bath, factor order spin ⊗ RC:
/// `H = −ω_L S_z + h + λ (S_x + S_y + S_z) x`, i.e. `√3 λ S_R x` with
/// `S_R = (S_x + S_y + S_z)/√3`.
pub fn build_hamiltonian(cfg: &ModelConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let dim = cfg.hilbert_dim();
    let spin = spin_half_operators();
    let rc = rc_operators(cfg.n_max, cfg.bath.omega0)?;
    let lambda = cfg.bath.lambda();
    let i2 = ComplexMatrix::identity(2);
    let id = ComplexMatrix::identity(cfg.n_max);
    let mut h = ComplexMatrix::zeros(dim, dim);
    match cfg.topology {
        Topology::ThreeBath => {
            add_product_term(&mut h, -LARMOR, &[&spin.sz, &id, &id, &id]);
            add_product_term(&mut h, 1.0, &[&i2, &rc.h, &id, &id]);
            add_product_term(&mut h, 1.0, &[&i2, &id, &rc.h, &id]);
            add_product_term(&mut h, 1.0, &[&i2, &id, &id, &rc.h]);
            add_product_term(&mut h, lambda, &[&spin.sx, &rc.x, &id, &id]);
            add_product_term(&mut h, lambda, &[&spin.sy, &id, &rc.x, &id]);
            add_product_term(&mut h, lambda, &[&spin.sz, &id, &id, &rc.x]);
        }
        Topology::SingleBath => {
            let s_sum = &(&spin.sx + &spin.sy) + &spin.sz;
            add_product_term(&mut h, -LARMOR, &[&spin.sz, &id]);
            add_product_term(&mut h, 1.0, &[&i2, &rc.h]);
            add_product_term(&mut h, lambda, &[&s_sum, &rc.x]);
        }
    }
    Ok(h)
}
