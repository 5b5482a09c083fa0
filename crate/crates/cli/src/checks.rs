//! Self-check suites behind `mfspin check`.
//!
//! Every check reports a measured quantity, the bound it must meet and the
//! verdict. Random inputs come from fixed seeds.

use mfspin_core::classical::sphere_quadrature_sz;
use mfspin_core::linalg::kron_all;
use mfspin_core::weak::{integral, sz_weak_t0_forms};
use mfspin_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Invariants,
    Oracles,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "invariants" => Ok(Suite::Invariants),
            "oracles" => Ok(Suite::Oracles),
            other => Err(format!(
                "unknown suite '{other}' (expected invariants or oracles)"
            )),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Worst observed deviation.
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            bound,
            pass: value <= bound,
        }
    }

    fn failed(name: &str, bound: f64, err: &Error) -> Self {
        Self {
            name: format!("{name} [{err}]"),
            value: f64::INFINITY,
            bound,
            pass: false,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Multiplies the pole half-width in the principal-value checks.
    pub tamper_delta: f64,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tamper_delta: 1.0,
            seed: 20_240_611,
        }
    }
}

fn bath(alpha: f64) -> LorentzianBath {
    LorentzianBath::new(2.0, 0.6, alpha, 1e10).expect("valid bath")
}

fn run(name: &str, bound: f64, f: impl FnOnce() -> Result<f64>) -> CheckResult {
    match f() {
        Ok(v) => CheckResult::new(name, v, bound),
        Err(e) => CheckResult::failed(name, bound, &e),
    }
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> Result<DensityMatrix> {
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = g.matmul(&g.adjoint())?;
    let tr = m.trace().re;
    DensityMatrix::new(&m * (1.0 / tr))
}

/// Largest violation of the density-matrix invariants and the qubit purity
/// identity; 0 when every state is valid.
fn state_violation(rho: &DensityMatrix) -> Result<f64> {
    rho.check_invariants()?;
    let s = spin_expectations(rho)?;
    let mut worst = (s.purity - 0.5 * (1.0 + s.magnitude * s.magnitude)).abs();
    worst = worst.max(s.entropy - 2f64.ln()).max(-s.entropy);
    for c in [s.sx, s.sy, s.sz] {
        worst = worst.max(c.abs() - 1.0);
    }
    Ok(worst.max(0.0))
}

fn pv_halving(opts: &CheckOptions) -> Result<f64> {
    let b = bath(0.1);
    let q = b.reorganisation_energy_closed_form();
    let base = PvQuadratureSettings::default();
    let s = PvQuadratureSettings {
        delta: base.delta * opts.tamper_delta,
        ..base
    };
    let half = PvQuadratureSettings {
        delta: s.delta / 2.0,
        ..s
    };
    let mut worst = 0.0_f64;
    for which in [
        WeakIntegral::I1,
        WeakIntegral::I2,
        WeakIntegral::I3,
        WeakIntegral::I3Inf,
    ] {
        for wl in [0.5, 1.0, 2.0] {
            let a = integral(which, &b, 2.0, wl, &s)?;
            let c = integral(which, &b, 2.0, wl, &half)?;
            worst = worst.max((a - c).abs() / c.abs().max(q));
        }
    }
    Ok(worst)
}

fn invariants(opts: &CheckOptions) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    out.push(run(
        "random 2x2 states: density-matrix invariants (200)",
        1e-9,
        || {
            let mut worst = 0.0_f64;
            for _ in 0..200 {
                worst = worst.max(state_violation(&random_density(&mut rng, 2)?)?);
            }
            Ok(worst)
        },
    ));

    out.push(run("QMF states: density-matrix invariants", 1e-9, || {
        let mut worst = 0.0_f64;
        for (topology, n) in [(Topology::ThreeBath, 6), (Topology::SingleBath, 20)] {
            for alpha in [0.1, 10.0] {
                let cfg = ModelConfig::new(topology, bath(alpha), n)?;
                for t in [0.0, 0.3, 1.0, 3.0] {
                    worst = worst.max(state_violation(&qmf_spin_state(&cfg, t)?)?);
                }
            }
        }
        Ok(worst)
    }));

    out.push(run("three-bath QMF: max |s_x|, |s_y|", 1e-6, || {
        let cfg = ModelConfig::new(Topology::ThreeBath, bath(10.0), 4)?;
        let mut worst = 0.0_f64;
        for t in [0.0, 0.5, 2.0] {
            let s = spin_expectations(&qmf_spin_state_dense(&cfg, t)?)?;
            worst = worst.max(s.sx.abs()).max(s.sy.abs());
        }
        Ok(worst)
    }));

    out.push(run("single-bath QMF: |s_x - s_y|", 1e-8, || {
        let cfg = ModelConfig::new(Topology::SingleBath, bath(10.0), 24)?;
        let mut worst = 0.0_f64;
        for t in [0.0, 0.5, 2.0] {
            let s = spin_expectations(&qmf_spin_state(&cfg, t)?)?;
            worst = worst.max((s.sx - s.sy).abs());
        }
        Ok(worst)
    }));

    out.push(run("QMF independent of bath width", 1e-12, || {
        let mut worst = 0.0_f64;
        for (topology, n) in [(Topology::ThreeBath, 5), (Topology::SingleBath, 20)] {
            let narrow = ModelConfig::new(topology, LorentzianBath::new(2.0, 0.1, 10.0, 1e10)?, n)?;
            let wide = ModelConfig::new(topology, LorentzianBath::new(2.0, 3.0, 10.0, 1e10)?, n)?;
            for t in [0.0, 1.0] {
                let a = spin_expectations(&qmf_spin_state(&narrow, t)?)?;
                let b = spin_expectations(&qmf_spin_state(&wide, t)?)?;
                worst = worst
                    .max((a.sz - b.sz).abs())
                    .max((a.sx - b.sx).abs())
                    .max((a.entropy - b.entropy).abs());
            }
        }
        Ok(worst)
    }));

    out.push(run("high temperature: |s| at t = 1e4", 1e-3, || {
        let mut worst = 0.0_f64;
        for (topology, n) in [(Topology::ThreeBath, 6), (Topology::SingleBath, 24)] {
            let cfg = ModelConfig::new(topology, bath(10.0), n)?;
            worst = worst.max(spin_expectations(&qmf_spin_state(&cfg, 1e4)?)?.magnitude);
        }
        Ok(worst)
    }));

    out.push(run("I1 + I2 = Q (relative)", 1e-8, || {
        let b = bath(0.1);
        let q = reorganisation_energy(&b)?;
        let s = PvQuadratureSettings::default();
        let mut worst = 0.0_f64;
        for wl in [0.5, 1.0, 2.0] {
            worst = worst.max((integral_i1(&b, wl, &s)? + integral_i2(&b, wl, &s)? - q).abs() / q);
        }
        Ok(worst)
    }));

    out.push(run(
        "principal value: delta-halving change (relative)",
        1e-5,
        || pv_halving(opts),
    ));

    out.push(run(
        "Langevin: bounds, monotonicity, below tanh",
        0.0,
        || {
            let mut worst = 0.0_f64;
            let mut prev = 0.0;
            for k in 0..=180 {
                let x = 10f64.powf(-6.0 + 9.0 * k as f64 / 180.0);
                let l = langevin(x);
                worst = worst
                    .max(-l)
                    .max(l - 1.0)
                    .max(prev - l)
                    .max(l - x.tanh() - 1e-15);
                prev = l;
            }
            Ok(worst.max(0.0))
        },
    ));

    out.push(run("CMF = classical Gibbs", 0.0, || {
        let mut worst = 0.0_f64;
        for alpha in [0.0, 0.1, 10.0] {
            for t in [0.0, 0.1, 1.0, 3.0] {
                worst = worst.max((cmf_sz(t, &bath(alpha)) - classical_gibbs_sz(t)).abs());
            }
        }
        Ok(worst)
    }));
    out
}

fn oracles(opts: &CheckOptions) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    out.push(run("Q: quadrature vs closed form (relative)", 1e-6, || {
        let mut worst = 0.0_f64;
        for gamma in [0.1, 0.6, 3.0] {
            let b = LorentzianBath::new(2.0, gamma, 10.0, 1e10)?;
            let closed = b.reorganisation_energy_closed_form();
            worst = worst.max((reorganisation_energy(&b)? - closed).abs() / closed);
        }
        Ok(worst)
    }));

    out.push(run("kron vs index formula", 0.0, || {
        let mut r = |n| {
            ComplexMatrix::from_fn(n, n, |_, _| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })
        };
        let a = r(3);
        let b = r(4);
        let k = kron(&a, &b)?;
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                for p in 0..4 {
                    for q in 0..4 {
                        worst =
                            worst.max((k[(i * 4 + p, j * 4 + q)] - a[(i, j)] * b[(p, q)]).norm());
                    }
                }
            }
        }
        let c = r(2);
        let assoc = kron(&kron(&a, &b)?, &c)?.max_abs_diff(&kron_all(&[&a, &kron(&b, &c)?])?);
        Ok(worst.max((assoc - 1e-12).max(0.0)))
    }));

    out.push(run("partial trace vs explicit loop", 1e-14, || {
        let rho = random_density(&mut rng, 18)?;
        let reduced = partial_trace_keep_first(&rho, &[2, 3, 3])?;
        let m = rho.matrix();
        let mut worst = 0.0_f64;
        for s in 0..2 {
            for t in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..9 {
                    acc += m[(s * 9 + r, t * 9 + r)];
                }
                worst = worst.max((reduced.matrix()[(s, t)] - acc).norm());
            }
        }
        Ok(worst)
    }));

    out.push(run(
        "eigh reconstruction of H (relative to range)",
        1e-9,
        || {
            let cfg = ModelConfig::new(Topology::ThreeBath, bath(0.1), 2)?;
            let h = build_hamiltonian(&cfg)?;
            let spec = eigh(&h)?;
            Ok(spec.reconstruct().max_abs_diff(&h) / spec.spectral_range())
        },
    ));

    out.push(run("parity-block solver vs dense path", 1e-10, || {
        let cfg = ModelConfig::new(Topology::ThreeBath, bath(10.0), 5)?;
        let mut worst = 0.0_f64;
        for t in [0.0, 0.5, 3.0] {
            let a = spin_expectations(&qmf_spin_state(&cfg, t)?)?;
            let b = spin_expectations(&qmf_spin_state_dense(&cfg, t)?)?;
            worst = worst.max((a.sz - b.sz).abs());
        }
        Ok(worst)
    }));

    out.push(run("classical sphere quadrature vs Langevin", 1e-8, || {
        let mut worst = 0.0_f64;
        for alpha in [0.0, 1.0, 10.0] {
            let b = bath(alpha);
            let q = reorganisation_energy(&b)?;
            for t in [0.1, 1.0, 5.0] {
                worst = worst.max((sphere_quadrature_sz(t, q, 96) - cmf_sz(t, &b)).abs());
            }
        }
        Ok(worst)
    }));

    out.push(run("weak T=0: regular vs derivative form", 1e-3, || {
        let (a, b) = sz_weak_t0_forms(&bath(0.1), &PvQuadratureSettings::default())?;
        Ok((a - b).abs())
    }));

    out.push(run("d/dwl (I1 + I2) = 0", 1e-6, || {
        let s = PvQuadratureSettings::default();
        let b = bath(0.1);
        let d1 = d_dwl(WeakIntegral::I1, &b, 1.0, 1.0, &s)?;
        let d2 = d_dwl(WeakIntegral::I2, &b, 1.0, 1.0, &s)?;
        Ok((d1.value + d2.value).abs())
    }));

    out.push(run(
        "principal value: delta-halving change (relative)",
        1e-5,
        || pv_halving(opts),
    ));
    out
}

pub fn run_suite(suite: Suite, opts: &CheckOptions) -> Vec<CheckResult> {
    match suite {
        Suite::Invariants => invariants(opts),
        Suite::Oracles => oracles(opts),
    }
}

pub fn render_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in results {
        s.push_str(&format!(
            "{:<4}  {:<width$}  {:>11.3e}  <= {:.1e}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.value,
            r.bound
        ));
    }
    s
}

#[derive(Serialize)]
pub struct Summary<'a> {
    pub suite: &'a str,
    pub passed: usize,
    pub failed: usize,
    pub checks: &'a [CheckResult],
}

pub fn summary_json(suite: Suite, results: &[CheckResult]) -> String {
    let passed = results.iter().filter(|r| r.pass).count();
    let summary = Summary {
        suite: match suite {
            Suite::Invariants => "invariants",
            Suite::Oracles => "oracles",
        },
        passed,
        failed: results.len() - passed,
        checks: results,
    };
    serde_json::to_string(&summary).expect("summary serialises")
}
