//! Parallel temperature sweeps and their CSV/JSON artifacts.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use mfspin_core::{
    classical_gibbs_sz, cmf_sz, converge_fock, gibbs_spin_state, spin_expectations, sz_weak,
    sz_weak_t0, ConvergenceReport, Error, LorentzianBath, ModelConfig, SpinExpectations,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, Engine, OutputFormat, RunConfig};

pub const CSV_HEADER: &str =
    "engine,topology,t,sx,sy,sz,s_mag,purity,vn_entropy,n_max_used,converged,alpha,omega0,gamma";

/// Environment variable that fixes the worker count.
pub const THREADS_ENV: &str = "MFSPIN_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub engine: &'static str,
    pub topology: &'static str,
    pub t: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub s_mag: f64,
    pub purity: f64,
    pub vn_entropy: f64,
    pub n_max_used: usize,
    pub converged: bool,
    pub alpha: f64,
    pub omega0: f64,
    pub gamma: f64,
}

/// Per-point record for the metadata file.
#[derive(Clone, Debug, Serialize)]
pub struct PointRecord {
    pub engine: &'static str,
    pub t: f64,
    pub report: Option<ConvergenceReport>,
    pub error: Option<String>,
}

#[derive(Debug)]
pub struct SweepOutput {
    /// Sorted by engine, then temperature.
    pub rows: Vec<ResultRow>,
    pub points: Vec<PointRecord>,
}

impl SweepOutput {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Artifacts were written but some points failed.
    Numeric {
        failed: usize,
    },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Io { path, source } => write!(f, "cannot write {}: {source}", path.display()),
            RunError::Numeric { failed } => {
                write!(f, "{failed} grid point(s) failed; see the metadata file")
            }
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric { .. } => 3,
            RunError::Io { .. } => 4,
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

struct PointResult {
    obs: SpinExpectations,
    n_max_used: usize,
    converged: bool,
    report: Option<ConvergenceReport>,
}

/// A failed point keeps its convergence report for the metadata file.
type PointOutcome = Result<PointResult, (Error, Option<ConvergenceReport>)>;

fn evaluate(engine: Engine, t: f64, bath: &LorentzianBath, cfg: &RunConfig) -> PointOutcome {
    let closed = |obs| PointResult {
        obs,
        n_max_used: 0,
        converged: true,
        report: None,
    };
    match engine {
        Engine::Qmf => {
            let model = ModelConfig::new(cfg.topology, *bath, cfg.fock_policy().n_start)
                .map_err(|e| (e, None))?;
            match converge_fock(&model, t, &cfg.fock_policy()) {
                Ok((rho, report)) => Ok(PointResult {
                    obs: spin_expectations(&rho).map_err(|e| (e, Some(report.clone())))?,
                    n_max_used: report.n_max_used,
                    converged: report.converged,
                    report: Some(report),
                }),
                Err(Error::FockConvergence { report }) => {
                    let r = (*report).clone();
                    Err((Error::FockConvergence { report }, Some(r)))
                }
                Err(e) => Err((e, None)),
            }
        }
        Engine::Qg => {
            let rho = gibbs_spin_state(t).map_err(|e| (e, None))?;
            Ok(closed(spin_expectations(&rho).map_err(|e| (e, None))?))
        }
        // Classical and weak-coupling engines give only s_z; purity and
        // entropy are those of the qubit with that Bloch vector.
        Engine::Cg => Ok(closed(SpinExpectations::from_bloch(
            0.0,
            0.0,
            classical_gibbs_sz(t),
        ))),
        Engine::Cmf => Ok(closed(SpinExpectations::from_bloch(
            0.0,
            0.0,
            cmf_sz(t, bath),
        ))),
        Engine::Weak => {
            let sz = if t == 0.0 {
                sz_weak_t0(bath, &cfg.quadrature)
            } else {
                sz_weak(bath, t, &cfg.quadrature)
            }
            .map_err(|e| (e, None))?;
            Ok(closed(SpinExpectations::from_bloch(0.0, 0.0, sz)))
        }
    }
}

/// Worker count from `MFSPIN_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Runs every `(engine, t)` point on a work-stealing pool and sorts the
/// joined results, so the output does not depend on the schedule.
pub fn sweep(cfg: &RunConfig, threads: Option<usize>) -> Result<SweepOutput, ConfigError> {
    cfg.validate()?;
    let bath = cfg.bath()?;
    let temps = cfg.temperatures.points()?;
    let mut engines = cfg.engines.clone();
    engines.sort();
    let jobs: Vec<(Engine, f64)> = engines
        .iter()
        .flat_map(|&e| temps.iter().map(move |&t| (e, t)))
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| ConfigError(format!("cannot start worker pool: {e}")))?;
    let mut results: Vec<(Engine, f64, PointOutcome)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(engine, t)| (engine, t, evaluate(engine, t, &bath, cfg)))
            .collect()
    });
    results.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut rows = Vec::with_capacity(results.len());
    let mut points = Vec::with_capacity(results.len());
    for (engine, t, outcome) in results {
        let label = engine.row_label(t);
        let mut row = ResultRow {
            engine: label,
            topology: cfg.topology.label(),
            t,
            sx: f64::NAN,
            sy: f64::NAN,
            sz: f64::NAN,
            s_mag: f64::NAN,
            purity: f64::NAN,
            vn_entropy: f64::NAN,
            n_max_used: 0,
            converged: false,
            alpha: cfg.alpha,
            omega0: cfg.omega0,
            gamma: cfg.gamma,
        };
        match outcome {
            Ok(p) => {
                row.sx = p.obs.sx;
                row.sy = p.obs.sy;
                row.sz = p.obs.sz;
                row.s_mag = p.obs.magnitude;
                row.purity = p.obs.purity;
                row.vn_entropy = p.obs.entropy;
                row.n_max_used = p.n_max_used;
                row.converged = p.converged;
                points.push(PointRecord {
                    engine: label,
                    t,
                    report: p.report,
                    error: None,
                });
            }
            Err((err, report)) => {
                row.n_max_used = report.as_ref().map_or(0, |r| r.n_max_used);
                points.push(PointRecord {
                    engine: label,
                    t,
                    report,
                    error: Some(err.to_string()),
                });
            }
        }
        rows.push(row);
    }
    Ok(SweepOutput { rows, points })
}

/// Shortest round-trip decimal; NaN is spelled `nan`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:?}")
    }
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.engine.to_string(),
            r.topology.to_string(),
            format_float(r.t),
            format_float(r.sx),
            format_float(r.sy),
            format_float(r.sz),
            format_float(r.s_mag),
            format_float(r.purity),
            format_float(r.vn_entropy),
            r.n_max_used.to_string(),
            r.converged.to_string(),
            format_float(r.alpha),
            format_float(r.omega0),
            format_float(r.gamma),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// JSON array of rows; NaN becomes `null`.
pub fn to_json(rows: &[ResultRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialise");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Versions {
    mfspin: &'static str,
    mfspin_core: &'static str,
}

#[derive(Serialize)]
struct Meta<'a> {
    config: &'a RunConfig,
    versions: Versions,
    points: &'a [PointRecord],
}

pub fn meta_json(cfg: &RunConfig, out: &SweepOutput) -> String {
    let meta = Meta {
        config: &cfg.resolved(),
        versions: Versions {
            mfspin: env!("CARGO_PKG_VERSION"),
            mfspin_core: mfspin_core::VERSION,
        },
        points: &out.points,
    };
    let mut s = serde_json::to_string_pretty(&meta).expect("metadata serialises");
    s.push('\n');
    s
}

fn with_suffix(stem: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{stem}{suffix}"))
}

fn write(path: &Path, contents: &str) -> Result<(), RunError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| RunError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the sweep and writes `<output>.csv` (or `.json`) and
/// `<output>.meta.json`. Returns the written data path.
pub fn run(cfg: &RunConfig, threads: Option<usize>) -> Result<(PathBuf, SweepOutput), RunError> {
    let out = sweep(cfg, threads)?;
    let data_path = match cfg.format {
        OutputFormat::Csv => with_suffix(&cfg.output, ".csv"),
        OutputFormat::Json => with_suffix(&cfg.output, ".json"),
    };
    let body = match cfg.format {
        OutputFormat::Csv => to_csv(&out.rows),
        OutputFormat::Json => to_json(&out.rows),
    };
    write(&data_path, &body)?;
    write(
        &with_suffix(&cfg.output, ".meta.json"),
        &meta_json(cfg, &out),
    )?;
    match out.failures() {
        0 => Ok((data_path, out)),
        failed => Err(RunError::Numeric { failed }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{preset, TemperatureGrid};

    fn quick(engines: Vec<Engine>, temps: Vec<f64>) -> RunConfig {
        RunConfig {
            engines,
            temperatures: TemperatureGrid::List(temps),
            ..preset("fig3").unwrap()
        }
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0, 1e-10, -2.5e300, 0.761_594_155_955_764_9] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(format_float(1.0), "1.0");
    }

    #[test]
    fn quantum_gibbs_row() {
        let out = sweep(&quick(vec![Engine::Qg], vec![0.5]), Some(1)).unwrap();
        let r = &out.rows[0];
        assert_eq!((r.engine, r.sx, r.sy), ("qg", 0.0, 0.0));
        assert!((r.sz - 0.761_59).abs() < 1e-5);
    }

    #[test]
    fn classical_engines_coincide() {
        let out = sweep(
            &quick(vec![Engine::Cmf, Engine::Cg], vec![0.0, 0.5, 2.0]),
            Some(2),
        )
        .unwrap();
        let (cmf, cg): (Vec<_>, Vec<_>) = out.rows.iter().partition(|r| r.engine == "cmf");
        assert_eq!(cmf.len(), 3);
        for (a, b) in cmf.iter().zip(&cg) {
            assert_eq!((a.t, a.sz, a.purity), (b.t, b.sz, b.purity));
        }
    }

    #[test]
    fn rows_sort_by_engine_then_temperature() {
        let cfg = RunConfig {
            alpha: 0.1,
            ..quick(
                vec![Engine::Weak, Engine::Cg, Engine::Qg],
                vec![0.0, 0.25, 1.0],
            )
        };
        let out = sweep(&cfg, Some(3)).unwrap();
        let labels: Vec<_> = out.rows.iter().map(|r| (r.engine, r.t)).collect();
        assert_eq!(
            labels,
            vec![
                ("qg", 0.0),
                ("qg", 0.25),
                ("qg", 1.0),
                ("cg", 0.0),
                ("cg", 0.25),
                ("cg", 1.0),
                ("weak_t0", 0.0),
                ("weak", 0.25),
                ("weak", 1.0),
            ]
        );
    }

    #[test]
    fn csv_header_is_exact() {
        let csv = to_csv(&[]);
        assert_eq!(csv, format!("{CSV_HEADER}\n"));
    }
}
