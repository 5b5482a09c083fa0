//! Sweep driver behind the `mfspin` binary: run configurations, figure
//! presets, deterministic CSV/JSON output and self-check suites.

pub mod checks;
pub mod config;
pub mod sweep;

use mfspin_core::{
    converge_fock, spin_expectations, FockPolicy, LorentzianBath, ModelConfig, Topology,
};
use serde_json::{json, Value};

/// Single-point entropy report. At `t = 0` the entropy is reported as the
/// entanglement entropy; above that it is only a von Neumann entropy.
pub fn entropy_report(
    topology: Topology,
    bath: LorentzianBath,
    t: f64,
    policy: &FockPolicy,
) -> mfspin_core::Result<Value> {
    let cfg = ModelConfig::new(topology, bath, policy.n_start)?;
    let (rho, report) = converge_fock(&cfg, t, policy)?;
    let s = spin_expectations(&rho)?;
    let key = if t == 0.0 {
        "entanglement_entropy"
    } else {
        "vn_entropy"
    };
    let mut v = json!({
        "topology": topology.label(),
        "alpha": bath.alpha,
        "omega0": bath.omega0,
        "t": t,
        "entropy_over_ln2": s.entropy / std::f64::consts::LN_2,
        "s_mag": s.magnitude,
        "sz": s.sz,
        "n_max_used": report.n_max_used,
        "converged": report.converged,
    });
    v[key] = json!(s.entropy);
    Ok(v)
}
