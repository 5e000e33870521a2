//! Subcommand implementations. Each returns a JSON report and an exit code.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use flipmode::detection::{
    detection_mode, detection_mode_with_tol, dual_path_check, multi_measurement_plan,
    two_zone_decomposition, ReportSummary,
};
use flipmode::linalg::RMatrix;
use flipmode::modes::export::{write_intensity_pgm, write_mode_csv};
use flipmode::modes::SampledMode;
use flipmode::montecarlo::{simulate_linearized, simulate_poisson, SimConfig, SimResult};
use flipmode::state::mean_field_mode;
use serde::Serialize;
use serde_json::Value;

use crate::config::{CommandName, ScenarioConfig};
use crate::error::CliError;
use crate::scenario::{build_layout, BasisInfo, Scenario};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit code when the two variance routes disagree beyond tolerance.
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Pgm,
}

/// `--seed` wins over `analysis.monte_carlo.seed`; without either the seed is 0.
pub fn effective_seed(cfg: &ScenarioConfig, cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or(cfg.analysis.monte_carlo.map(|m| m.seed))
        .unwrap_or(0)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

#[derive(Serialize)]
struct StateSummary {
    dim: usize,
    n0: f64,
    degree: usize,
    single_mode: bool,
}

#[derive(Serialize)]
struct DualPathSummary {
    relative_discrepancy: f64,
    tolerance: f64,
    agrees: bool,
}

#[derive(Serialize)]
struct SimEntry {
    #[serde(flatten)]
    result: SimResult,
    analytic_variance: f64,
    within_3_stderr: bool,
}

#[derive(Serialize)]
struct MonteCarloSection {
    linearized: SimEntry,
    /// Only for coherent states, where pixel counts are independent Poisson.
    poisson: Option<SimEntry>,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    command: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a ScenarioConfig,
    basis: &'a BasisInfo,
    state: StateSummary,
    direct: ReportSummary,
    via_detection_mode: ReportSummary,
    dual_path: DualPathSummary,
    monte_carlo: Option<MonteCarloSection>,
}

pub fn analyze(cfg: &ScenarioConfig, cli_seed: Option<u64>) -> Result<Outcome, CliError> {
    let scenario = Scenario::build(cfg)?;
    let layout = scenario.require_layout()?;
    let tol = cfg.analysis.tolerances;
    let seed = effective_seed(cfg, cli_seed);
    let (state, basis) = (&scenario.state, &scenario.basis);

    let check = dual_path_check(state, basis, layout, tol.dual_path)
        .map_err(|e| CliError::from_core("layout", e))?;
    let (v0, _) = mean_field_mode(state, basis).map_err(|e| CliError::from_core("state", e))?;
    let is_difference = detection_mode_with_tol(&v0, layout, tol.difference)
        .map_err(|e| CliError::from_core("layout", e))?
        .is_difference;
    let mut direct = check.direct.summary();
    let mut via = check.via_detection_mode.summary();
    direct.is_difference = is_difference;
    via.is_difference = is_difference;
    log::info!(
        "variance {} (direct) vs {} (detection mode), sql_ratio {}",
        direct.variance,
        via.variance,
        direct.sql_ratio
    );

    let monte_carlo = match cfg.analysis.monte_carlo {
        None => None,
        Some(mc) => {
            let sim_cfg = SimConfig { seed, ..mc };
            let analytic = direct.variance;
            let lin = simulate_linearized(state, basis, layout, &sim_cfg)
                .map_err(|e| CliError::from_core("analysis.monte_carlo", e))?;
            let n = state.cov().nrows();
            let coherent = (state.cov() - RMatrix::identity(n, n)).amax() < 1e-12;
            let poisson = if coherent {
                let p = simulate_poisson(&v0, state.n0(), layout, &sim_cfg)
                    .map_err(|e| CliError::from_core("analysis.monte_carlo", e))?;
                Some(SimEntry {
                    within_3_stderr: p.variance_within(analytic, 3.0),
                    result: p,
                    analytic_variance: analytic,
                })
            } else {
                None
            };
            Some(MonteCarloSection {
                linearized: SimEntry {
                    within_3_stderr: lin.variance_within(analytic, 3.0),
                    result: lin,
                    analytic_variance: analytic,
                },
                poisson,
            })
        }
    };

    let degree = state.degree(tol.rank);
    let report = AnalyzeReport {
        command: "analyze",
        version: VERSION,
        seed,
        config: cfg,
        basis: &scenario.basis_info,
        state: StateSummary {
            dim: state.dim(),
            n0: state.n0(),
            degree,
            single_mode: degree <= 1,
        },
        direct,
        via_detection_mode: via,
        dual_path: DualPathSummary {
            relative_discrepancy: check.relative_discrepancy,
            tolerance: check.tolerance,
            agrees: check.agrees(),
        },
        monte_carlo,
    };
    Ok(Outcome {
        report: to_value(&report),
        exit_code: if check.agrees() { 0 } else { EXIT_MISMATCH },
    })
}

#[derive(Serialize)]
struct DegreeReport<'a> {
    command: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a ScenarioConfig,
    dim: usize,
    n0: f64,
    degree: usize,
    single_mode: bool,
    rank_tolerance: f64,
}

pub fn degree(cfg: &ScenarioConfig, cli_seed: Option<u64>) -> Result<Outcome, CliError> {
    let scenario = Scenario::build(cfg)?;
    let tol = cfg.analysis.tolerances.rank;
    let d = scenario.state.degree(tol);
    let report = DegreeReport {
        command: "degree",
        version: VERSION,
        seed: effective_seed(cfg, cli_seed),
        config: cfg,
        dim: scenario.state.dim(),
        n0: scenario.state.n0(),
        degree: d,
        single_mode: d <= 1,
        rank_tolerance: tol,
    };
    Ok(Outcome {
        report: to_value(&report),
        exit_code: 0,
    })
}

#[derive(Serialize)]
struct MultiReport<'a> {
    command: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a ScenarioConfig,
    rank: usize,
    plan_degree: usize,
    dependent_layouts: bool,
    independent_layouts: Vec<usize>,
    reports: Vec<ReportSummary>,
}

pub fn multi(cfg: &ScenarioConfig, cli_seed: Option<u64>) -> Result<Outcome, CliError> {
    let plan_cfg = cfg
        .multi
        .as_ref()
        .ok_or_else(|| CliError::config("multi", "the multi command needs a `multi` section"))?;
    let scenario = Scenario::build(cfg)?;
    let layouts = plan_cfg
        .layouts
        .iter()
        .enumerate()
        .map(|(i, l)| build_layout(scenario.grid, l, &format!("multi.layouts[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let (v0, n0) = mean_field_mode(&scenario.state, &scenario.basis)
        .map_err(|e| CliError::from_core("state", e))?;
    let plan = multi_measurement_plan(&v0, n0, &layouts, plan_cfg.r, &scenario.pool)
        .map_err(|e| CliError::from_core("multi", e))?;
    if plan.dependent_layouts {
        log::warn!(
            "flipped modes are linearly dependent; using layouts {:?}",
            plan.independent_layouts
        );
    }
    let report = MultiReport {
        command: "multi",
        version: VERSION,
        seed: effective_seed(cfg, cli_seed),
        config: cfg,
        rank: plan.rank,
        plan_degree: plan.degree,
        dependent_layouts: plan.dependent_layouts,
        independent_layouts: plan.independent_layouts.clone(),
        reports: plan.reports.iter().map(|r| r.summary()).collect(),
    };
    Ok(Outcome {
        report: to_value(&report),
        exit_code: 0,
    })
}

#[derive(Serialize)]
struct ExportedFile {
    mode: &'static str,
    path: PathBuf,
}

#[derive(Serialize)]
struct TwoZoneSummary {
    i_plus: f64,
    i_minus: f64,
    alpha: f64,
    beta: f64,
}

#[derive(Serialize)]
struct ExportReport<'a> {
    command: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a ScenarioConfig,
    format: &'static str,
    files: Vec<ExportedFile>,
    two_zone: Option<TwoZoneSummary>,
}

fn write_mode(mode: &SampledMode, path: &Path, format: ExportFormat) -> Result<(), CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Output(format!("cannot create {}: {e}", path.display())))?;
    let out = std::io::BufWriter::new(file);
    match format {
        ExportFormat::Csv => write_mode_csv(mode, out),
        ExportFormat::Pgm => write_intensity_pgm(mode, out),
    }
    .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes `v0` and `w1`, plus `w0` and `v1` when the layout is a +1/-1 two-zone split.
pub fn export_modes(
    cfg: &ScenarioConfig,
    cli_seed: Option<u64>,
    format: ExportFormat,
    out_dir: &Path,
) -> Result<Outcome, CliError> {
    let scenario = Scenario::build(cfg)?;
    let layout = scenario.require_layout()?;
    let (v0, _) = mean_field_mode(&scenario.state, &scenario.basis)
        .map_err(|e| CliError::from_core("state", e))?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Output(format!("cannot create {}: {e}", out_dir.display())))?;

    let two_zone = two_zone_decomposition(&v0, layout).ok();
    let modes: Vec<(&'static str, SampledMode)> = match &two_zone {
        Some(d) => vec![
            ("v0", d.v0.clone()),
            ("w0", d.w0.clone()),
            ("w1", d.w1.clone()),
            ("v1", d.v1.clone()),
        ],
        None => {
            let dm = detection_mode(&v0, layout).map_err(|e| CliError::from_core("layout", e))?;
            vec![("v0", v0), ("w1", dm.w1)]
        }
    };
    let ext = match format {
        ExportFormat::Csv => "csv",
        ExportFormat::Pgm => "pgm",
    };
    let mut files = Vec::new();
    for (name, mode) in &modes {
        let path = out_dir.join(format!("{name}.{ext}"));
        write_mode(mode, &path, format)?;
        log::info!("wrote {}", path.display());
        files.push(ExportedFile { mode: name, path });
    }
    let report = ExportReport {
        command: "export_modes",
        version: VERSION,
        seed: effective_seed(cfg, cli_seed),
        config: cfg,
        format: ext,
        files,
        two_zone: two_zone.map(|d| TwoZoneSummary {
            i_plus: d.i_plus,
            i_minus: d.i_minus,
            alpha: d.alpha,
            beta: d.beta,
        }),
    };
    Ok(Outcome {
        report: to_value(&report),
        exit_code: 0,
    })
}

/// Runs `analysis.commands` in order and nests their reports under `results`.
pub fn run(cfg: &ScenarioConfig, cli_seed: Option<u64>) -> Result<Outcome, CliError> {
    let mut results = BTreeMap::new();
    let mut exit_code = 0;
    for name in &cfg.analysis.commands {
        let (key, outcome) = match name {
            CommandName::Analyze => ("analyze", analyze(cfg, cli_seed)?),
            CommandName::Degree => ("degree", degree(cfg, cli_seed)?),
            CommandName::Multi => ("multi", multi(cfg, cli_seed)?),
        };
        let mut report = outcome.report;
        if let Value::Object(map) = &mut report {
            map.remove("config");
            map.remove("version");
            map.remove("seed");
        }
        exit_code = exit_code.max(outcome.exit_code);
        results.insert(key.to_string(), report);
    }
    let mut top = serde_json::Map::new();
    top.insert("command".into(), Value::from("run"));
    top.insert("version".into(), Value::from(VERSION));
    top.insert("seed".into(), Value::from(effective_seed(cfg, cli_seed)));
    top.insert("config".into(), to_value(cfg));
    top.insert("results".into(), to_value(&results));
    Ok(Outcome {
        report: Value::Object(top),
        exit_code,
    })
}

/// Pretty JSON with a trailing newline; key order is fixed, so equal reports
/// are byte-identical.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("JSON values always render");
    s.push('\n');
    s
}
