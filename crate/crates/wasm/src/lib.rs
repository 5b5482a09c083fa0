//! Browser bindings for the demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain Rust function so the numerics
//! can be unit-tested natively. Curves are returned as flat `Float64Array`s.

use mfspin_core::{
    cmf_sz, converge_fock, entanglement_entropy, gibbs_spin_sz, lorentzian_j, qmf_spin_state,
    spin_expectations, sz_weak, sz_weak_t0, FockPolicy, LorentzianBath, ModelConfig,
    PvQuadratureSettings, Topology,
};
use wasm_bindgen::prelude::*;

/// Columns per row of [`sz_curves`].
pub const CURVE_COLUMNS: usize = 5;

fn bath(omega0: f64, gamma: f64, alpha: f64) -> Result<LorentzianBath, String> {
    LorentzianBath::new(omega0, gamma, alpha, 1e10).map_err(|e| e.to_string())
}

fn topology(name: &str) -> Result<Topology, String> {
    name.parse::<Topology>().map_err(|e| e.to_string())
}

/// `[ω₀, J(ω₀), ω₁, J(ω₁), ...]` on `points` samples of `(0, w_max]`.
pub fn spectral_density_curve(
    omega0: f64,
    gamma: f64,
    alpha: f64,
    w_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let b = bath(omega0, gamma, alpha)?;
    if !(w_max > 0.0) || points < 2 {
        return Err("need w_max > 0 and at least two points".into());
    }
    Ok((1..=points)
        .flat_map(|i| {
            let w = w_max * i as f64 / points as f64;
            [w, lorentzian_j(w, &b)]
        })
        .collect())
}

/// Rows of `[t, qmf, qg, cg, weak]` for `t` on `points` samples of `[0, t_max]`.
///
/// QMF uses a fixed truncation `n_max` so the page stays responsive. The
/// weak column is NaN for the single-bath model.
pub fn sz_curve_rows(
    topology_name: &str,
    omega0: f64,
    gamma: f64,
    alpha: f64,
    t_max: f64,
    points: usize,
    n_max: usize,
) -> Result<Vec<f64>, String> {
    let topo = topology(topology_name)?;
    let b = bath(omega0, gamma, alpha)?;
    let cfg = ModelConfig::new(topo, b, n_max).map_err(|e| e.to_string())?;
    if !(t_max > 0.0) || points < 2 {
        return Err("need t_max > 0 and at least two points".into());
    }
    let pv = PvQuadratureSettings::default();
    let mut out = Vec::with_capacity(points * CURVE_COLUMNS);
    for i in 0..points {
        let t = t_max * i as f64 / (points - 1) as f64;
        let rho = qmf_spin_state(&cfg, t).map_err(|e| e.to_string())?;
        let qmf = spin_expectations(&rho).map_err(|e| e.to_string())?.sz;
        let weak = match topo {
            Topology::SingleBath => f64::NAN,
            Topology::ThreeBath if t == 0.0 => sz_weak_t0(&b, &pv).unwrap_or(f64::NAN),
            Topology::ThreeBath => sz_weak(&b, t, &pv).unwrap_or(f64::NAN),
        };
        out.extend_from_slice(&[t, qmf, gibbs_spin_sz(t), cmf_sz(t, &b), weak]);
    }
    Ok(out)
}

/// `[S/ln2, n_max_used]` for the converged ground state.
pub fn ground_entropy(
    topology_name: &str,
    omega0: f64,
    gamma: f64,
    alpha: f64,
) -> Result<Vec<f64>, String> {
    let topo = topology(topology_name)?;
    let policy = FockPolicy::for_topology(topo);
    let cfg = ModelConfig::new(topo, bath(omega0, gamma, alpha)?, policy.n_start)
        .map_err(|e| e.to_string())?;
    let (rho, report) = converge_fock(&cfg, 0.0, &policy).map_err(|e| e.to_string())?;
    let s = entanglement_entropy(&rho).map_err(|e| e.to_string())?;
    Ok(vec![s / std::f64::consts::LN_2, report.n_max_used as f64])
}

#[wasm_bindgen]
pub fn spectral_density(
    omega0: f64,
    gamma: f64,
    alpha: f64,
    w_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    spectral_density_curve(omega0, gamma, alpha, w_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sz_curves(
    topology: &str,
    omega0: f64,
    gamma: f64,
    alpha: f64,
    t_max: f64,
    points: usize,
    n_max: usize,
) -> Result<Vec<f64>, JsValue> {
    sz_curve_rows(topology, omega0, gamma, alpha, t_max, points, n_max)
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn ground_state_entropy(
    topology: &str,
    omega0: f64,
    gamma: f64,
    alpha: f64,
) -> Result<Vec<f64>, JsValue> {
    ground_entropy(topology, omega0, gamma, alpha).map_err(|e| JsValue::from_str(&e))
}
