//! Weak-coupling expansion of the spin magnetisation to first order in α.
//!
//! The frequency integrals
//!
//! - `I₁ = PV ∫ J(ω) ω/(ω² − ω_L²) dω`
//! - `I₂ = PV ∫ J(ω) (1/ω − ω/(ω² − ω_L²)) dω`
//! - `I₃ = PV ∫ J(ω) coth(βω/2) ω_L/(ω² − ω_L²) dω`, with `I₃^∞` its `β → ∞` limit
//!
//! all run over `[0, ∞)` and have a simple pole at `ω = ω_L`. Each is written
//! as `PV ∫ f(ω)/(ω − ω_L) dω` with `f` regular at the pole and evaluated as
//!
//! - `∫ (f(ω) − f(ω_L))/(ω − ω_L)` over `[0, ω_L − δ] ∪ [ω_L + δ, ω_cut]`,
//! - plus `f(ω_L) ln((ω_cut − ω_L)/ω_L)`, the exact integral of the subtracted term,
//! - plus `f(ω_L + δ) − f(ω_L − δ)` for the excised window (error `O(δ³ f‴)`),
//! - plus `∫ f(ω)/(ω − ω_L)` over `[ω_cut, ∞)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LorentzianBath, LARMOR, SPIN_LENGTH};
use crate::quadrature::{integrate_to_infinity, integrate_with_breakpoints, Tolerance};

/// Agreement required between the two zero-temperature forms.
pub const T0_CONSISTENCY_TOL: f64 = 1e-3;

/// Relative accuracy of each quadrature piece.
const PIECE_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PvQuadratureSettings {
    /// Half-width of the window excised around the pole.
    pub delta: f64,
    /// Outer cutoff; `None` means `Ω + 40·max(Γ, ω_L)`.
    pub omega_cut: Option<f64>,
    /// Target relative accuracy of derivatives.
    pub rel_tol: f64,
    /// Central-difference step for `d/dω_L`.
    pub h: f64,
}

impl Default for PvQuadratureSettings {
    fn default() -> Self {
        Self {
            // Window error is (2/9)δ³ f‴; at 5e-4 it stays below 1e-8·Q even
            // with the pole on the Lorentzian peak.
            delta: 5e-4,
            omega_cut: None,
            rel_tol: 1e-6,
            h: 1e-3,
        }
    }
}

impl PvQuadratureSettings {
    pub fn min_cutoff(bath: &LorentzianBath) -> f64 {
        bath.omega0 + 40.0 * bath.gamma.max(LARMOR)
    }

    pub fn cutoff(&self, bath: &LorentzianBath) -> f64 {
        self.omega_cut.unwrap_or_else(|| Self::min_cutoff(bath))
    }

    pub fn validate(&self, bath: &LorentzianBath) -> Result<()> {
        bath.validate()?;
        if !(self.delta > 0.0 && self.delta <= LARMOR / 10.0) {
            return Err(Error::validation(format!(
                "pole half-width must lie in (0, {}], got {}",
                LARMOR / 10.0,
                self.delta
            )));
        }
        let cut = self.cutoff(bath);
        let min_cut = Self::min_cutoff(bath);
        if !(cut >= min_cut && cut.is_finite()) {
            return Err(Error::validation(format!(
                "outer cutoff must be finite and >= {min_cut}, got {cut}"
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::validation(format!(
                "relative tolerance must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(1e-5..=1e-2).contains(&self.h) {
            return Err(Error::validation(format!(
                "derivative step must lie in [1e-5, 1e-2], got {}",
                self.h
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakIntegral {
    I1,
    I2,
    I3,
    I3Inf,
}

/// `ω coth(βω/2)`, finite as `ω → 0`.
fn omega_coth(omega: f64, beta: f64) -> f64 {
    let x = 0.5 * beta * omega;
    let x_coth_x = if x < 1e-4 {
        1.0 + x * x / 3.0
    } else {
        x / x.tanh()
    };
    2.0 * x_coth_x / beta
}

/// Numerator `f(ω)` of the pole form `f(ω)/(ω − ω_L)`.
fn numerator(which: WeakIntegral, bath: &LorentzianBath, beta: f64, wl: f64, omega: f64) -> f64 {
    let j_over_w = bath.spectral_density_over_omega(omega);
    match which {
        WeakIntegral::I1 => j_over_w * omega * omega / (omega + wl),
        WeakIntegral::I2 => -j_over_w * wl * wl / (omega + wl),
        WeakIntegral::I3 => j_over_w * omega_coth(omega, beta) * wl / (omega + wl),
        WeakIntegral::I3Inf => j_over_w * omega * wl / (omega + wl),
    }
}

/// Breakpoints strictly inside `(a, b)` that resolve the Lorentzian peak.
fn peak_points(bath: &LorentzianBath, a: f64, b: f64) -> Vec<f64> {
    let w0 = bath.omega0;
    let g = bath.gamma;
    let margin = 1e-9 * (b - a);
    let mut pts = vec![a];
    for p in [w0 - 3.0 * g, w0, w0 + 3.0 * g] {
        if p > a + margin && p < b - margin {
            pts.push(p);
        }
    }
    pts.push(b);
    pts
}

fn principal_value(
    which: WeakIntegral,
    bath: &LorentzianBath,
    beta: f64,
    wl: f64,
    settings: &PvQuadratureSettings,
) -> Result<f64> {
    settings.validate(bath)?;
    if !(wl > 0.0 && wl.is_finite()) {
        return Err(Error::validation(format!(
            "Larmor frequency must be positive, got {wl}"
        )));
    }
    if which == WeakIntegral::I3 && (beta.is_nan() || beta <= 0.0) {
        return Err(Error::validation(format!("I3 needs beta > 0, got {beta}")));
    }
    if bath.alpha == 0.0 {
        return Ok(0.0);
    }
    let which = if which == WeakIntegral::I3 && beta.is_infinite() {
        WeakIntegral::I3Inf
    } else {
        which
    };
    let delta = settings.delta;
    let cut = settings.cutoff(bath);
    if wl - delta <= 0.0 || wl + delta >= cut {
        return Err(Error::validation(format!(
            "pole window [{}, {}] must lie inside (0, {cut})",
            wl - delta,
            wl + delta
        )));
    }
    let f = |w: f64| numerator(which, bath, beta, wl, w);
    let f_pole = f(wl);
    let subtracted = |w: f64| (f(w) - f_pole) / (w - wl);
    let tol = Tolerance::new(
        PIECE_RTOL,
        PIECE_RTOL * bath.reorganisation_energy_closed_form(),
    );

    let below = integrate_with_breakpoints(subtracted, &peak_points(bath, 0.0, wl - delta), tol)?;
    let above = integrate_with_breakpoints(subtracted, &peak_points(bath, wl + delta, cut), tol)?;
    let log_term = f_pole * ((cut - wl) / wl).ln();
    let window = f(wl + delta) - f(wl - delta);
    let tail = integrate_to_infinity(|w| f(w) / (w - wl), cut, tol)?;
    Ok(below.value + above.value + log_term + window + tail.value)
}

pub fn integral_i1(bath: &LorentzianBath, wl: f64, settings: &PvQuadratureSettings) -> Result<f64> {
    principal_value(WeakIntegral::I1, bath, f64::INFINITY, wl, settings)
}

pub fn integral_i2(bath: &LorentzianBath, wl: f64, settings: &PvQuadratureSettings) -> Result<f64> {
    principal_value(WeakIntegral::I2, bath, f64::INFINITY, wl, settings)
}

/// `beta = +inf` gives [`integral_i3_inf`].
pub fn integral_i3(
    bath: &LorentzianBath,
    beta: f64,
    wl: f64,
    settings: &PvQuadratureSettings,
) -> Result<f64> {
    principal_value(WeakIntegral::I3, bath, beta, wl, settings)
}

pub fn integral_i3_inf(
    bath: &LorentzianBath,
    wl: f64,
    settings: &PvQuadratureSettings,
) -> Result<f64> {
    principal_value(WeakIntegral::I3Inf, bath, f64::INFINITY, wl, settings)
}

pub fn integral(
    which: WeakIntegral,
    bath: &LorentzianBath,
    beta: f64,
    wl: f64,
    settings: &PvQuadratureSettings,
) -> Result<f64> {
    principal_value(which, bath, beta, wl, settings)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: f64,
    /// `|D(h) − D(h/2)|` of the two central differences.
    pub error: f64,
}

/// `d/dω_L` of one integral: central differences at `h` and `h/2` combined
/// by one Richardson step.
///
/// Fails when the error estimate exceeds `100·rel_tol·max(|value|, Q)`; the
/// floor at `Q` keeps derivatives that vanish by symmetry from tripping it.
pub fn d_dwl(
    which: WeakIntegral,
    bath: &LorentzianBath,
    beta: f64,
    wl: f64,
    settings: &PvQuadratureSettings,
) -> Result<Derivative> {
    settings.validate(bath)?;
    let h = settings.h;
    let central = |h: f64| -> Result<f64> {
        let plus = principal_value(which, bath, beta, wl + h, settings)?;
        let minus = principal_value(which, bath, beta, wl - h, settings)?;
        Ok((plus - minus) / (2.0 * h))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    let value = (4.0 * fine - coarse) / 3.0;
    let error = (coarse - fine).abs();
    let scale = value.abs().max(bath.reorganisation_energy_closed_form());
    if error > 100.0 * settings.rel_tol * scale {
        return Err(Error::Derivative {
            estimate: value,
            error,
        });
    }
    Ok(Derivative { value, error })
}

/// First-order weak-coupling `⟨S_z⟩/S₀` at `t > 0`.
pub fn sz_weak(bath: &LorentzianBath, t: f64, settings: &PvQuadratureSettings) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::validation(format!(
            "weak-coupling s_z needs a finite t > 0, got {t}; use sz_weak_t0 at t = 0"
        )));
    }
    let beta = 1.0 / t;
    let wl = LARMOR;
    let s0 = SPIN_LENGTH;
    let d1 = d_dwl(WeakIntegral::I1, bath, beta, wl, settings)?.value;
    let d2 = d_dwl(WeakIntegral::I2, bath, beta, wl, settings)?.value;
    let d3 = d_dwl(WeakIntegral::I3, bath, beta, wl, settings)?.value;
    let i3 = integral_i3(bath, beta, wl, settings)?;
    let arg = beta * wl * s0;
    let th = arg.tanh();
    let sech2 = if arg > 350.0 {
        0.0
    } else {
        1.0 / arg.cosh().powi(2)
    };
    let s =
        s0 * th + s0 * (s0 + 1.0) * d1 + s0 * s0 * d2 - s0 * th * d3 - beta * s0 * s0 * sech2 * i3;
    Ok(s / s0)
}

/// Both zero-temperature forms: `(regular, derivative_form)`.
///
/// The regular form is `1 − ∫ J(ω)/(ω + ω_L)² dω`; the derivative form is
/// `1 + (I₁′ − I₃^∞′) + S₀(I₁′ + I₂′)`.
pub fn sz_weak_t0_forms(
    bath: &LorentzianBath,
    settings: &PvQuadratureSettings,
) -> Result<(f64, f64)> {
    settings.validate(bath)?;
    if bath.alpha == 0.0 {
        return Ok((1.0, 1.0));
    }
    let wl = LARMOR;
    let tol = Tolerance::new(PIECE_RTOL, 0.0);
    let g = |w: f64| bath.spectral_density(w) / ((w + wl) * (w + wl));
    let cut = settings.cutoff(bath);
    let body = integrate_with_breakpoints(g, &peak_points(bath, 0.0, cut), tol)?;
    let tail = integrate_to_infinity(g, cut, tol)?;
    let regular = 1.0 - (body.value + tail.value);

    let inf = f64::INFINITY;
    let d1 = d_dwl(WeakIntegral::I1, bath, inf, wl, settings)?.value;
    let d2 = d_dwl(WeakIntegral::I2, bath, inf, wl, settings)?.value;
    let d3 = d_dwl(WeakIntegral::I3Inf, bath, inf, wl, settings)?.value;
    let derivative_form = 1.0 + (d1 - d3) + SPIN_LENGTH * (d1 + d2);
    Ok((regular, derivative_form))
}

/// Zero-temperature weak-coupling `⟨S_z⟩/S₀` (the regular form), after
/// checking it against the derivative form.
pub fn sz_weak_t0(bath: &LorentzianBath, settings: &PvQuadratureSettings) -> Result<f64> {
    let (regular, derivative_form) = sz_weak_t0_forms(bath, settings)?;
    if (regular - derivative_form).abs() > T0_CONSISTENCY_TOL {
        return Err(Error::Consistency {
            regular,
            derivative_form,
        });
    }
    Ok(regular)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weak_bath() -> LorentzianBath {
        LorentzianBath::new(2.0, 0.6, 0.1, 1e10).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn reference_values() {
        // Independent high-precision evaluations of the same integrals.
        let b = weak_bath();
        let s = PvQuadratureSettings::default();
        assert!(close(
            integral_i1(&b, 0.5, &s).unwrap(),
            0.026_497_085_320_614_733,
            1e-7
        ));
        assert!(close(
            integral_i1(&b, 1.0, &s).unwrap(),
            0.032_051_282_051_282_055,
            1e-7
        ));
        assert!(close(
            integral_i2(&b, 1.0, &s).unwrap(),
            -0.007_051_282_051_282_049,
            1e-6
        ));
        assert!(close(integral_i2(&b, 2.0, &s).unwrap(), 0.025, 1e-7));
        assert!(integral_i1(&b, 2.0, &s).unwrap().abs() < 1e-9);
        assert!(close(
            integral_i3(&b, 10.0, 1.0, &s).unwrap(),
            0.016_519_998_039_124_05,
            1e-7
        ));
        assert!(close(
            integral_i3_inf(&b, 1.0, &s).unwrap(),
            0.016_604_660_171_284_896,
            1e-7
        ));
    }

    #[test]
    fn vanishing_coupling() {
        let b = weak_bath().with_alpha(0.0);
        let s = PvQuadratureSettings::default();
        assert_eq!(integral_i1(&b, 1.0, &s).unwrap(), 0.0);
        assert_eq!(integral_i3(&b, 2.0, 1.0, &s).unwrap(), 0.0);
        assert_eq!(
            d_dwl(WeakIntegral::I2, &b, 1.0, 1.0, &s).unwrap().value,
            0.0
        );
        assert_eq!(sz_weak_t0(&b, &s).unwrap(), 1.0);
        assert!((sz_weak(&b, 0.7, &s).unwrap() - (0.5f64 / 0.7).tanh()).abs() < 1e-15);
    }

    #[test]
    fn infinite_beta_routes_to_i3_inf() {
        let b = weak_bath();
        let s = PvQuadratureSettings::default();
        let a = integral_i3(&b, f64::INFINITY, 1.0, &s).unwrap();
        let c = integral_i3_inf(&b, 1.0, &s).unwrap();
        assert!(close(a, c, 1e-10));
    }

    #[test]
    fn zero_temperature_forms_agree() {
        let (regular, derivative) =
            sz_weak_t0_forms(&weak_bath(), &PvQuadratureSettings::default()).unwrap();
        assert!((regular - 0.994_494_085_934_384_7).abs() < 1e-9);
        assert!((regular - derivative).abs() < 1e-6);
    }

    #[test]
    fn settings_validation() {
        let b = weak_bath();
        let ok = PvQuadratureSettings::default();
        assert!(ok.validate(&b).is_ok());
        assert!(PvQuadratureSettings { delta: 0.2, ..ok }
            .validate(&b)
            .is_err());
        assert!(PvQuadratureSettings { h: 0.1, ..ok }.validate(&b).is_err());
        assert!(PvQuadratureSettings {
            omega_cut: Some(10.0),
            ..ok
        }
        .validate(&b)
        .is_err());
        assert!(sz_weak(&b, 0.0, &ok).is_err());
    }
}
