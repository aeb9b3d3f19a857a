//! Command-line front end. JSON output is canonical; CSV and plot formats are
//! projections of the same rows. Wall time goes to a sidecar manifest so that
//! the primary output is byte-for-byte reproducible.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotics::{
    bulk_asymptotic, exp_profile, left_edge_asymptotic, phase_maximizer, profile_references, right_edge_asymptotic,
};
use crate::curvature::{
    curvature_density, gauss_curvature, gauss_map, principal_curvatures, sigma_curvatures, support_function,
    BoundaryPoint,
};
use crate::error::{Error, Result};
use crate::exactvol::{intrinsic_volume_profile, intrinsic_volume_weighted, is_log_concave, PBallSpec};
use crate::maxwell::{convergence_table, gaps_decreasing, Regime};
use crate::oracles::{ball_vj, steiner_mc_volume, McConfig};
use crate::quad::QuadConfig;
use crate::specfun::kappa;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20_260_416;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lpvol", version, about = "Intrinsic volumes and curvature measures of weighted lp-balls")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout; a `.manifest.json` sidecar is written next to it.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// TOML file overriding quadrature settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    /// Two-column `x,y` series.
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeArg {
    Bulk,
    Left,
    Right,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact intrinsic volumes.
    Intrinsic {
        #[arg(short = 'p')]
        p: f64,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'j', conflicts_with = "all")]
        j: Option<usize>,
        #[arg(long)]
        all: bool,
        /// Comma-separated weights a_1,...,a_n.
        #[arg(long, value_delimiter = ',', conflicts_with = "weights_file")]
        weights: Option<Vec<f64>>,
        /// File of whitespace- or comma-separated weights.
        #[arg(long)]
        weights_file: Option<PathBuf>,
    },
    /// Bulk, left-edge or right-edge asymptotics against exact values.
    Asymptotic {
        #[arg(short = 'p')]
        p: f64,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        /// Bulk ratio j/n.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Left-edge index.
        #[arg(short = 'j', default_value_t = 1)]
        j: usize,
        /// Right-edge codimension.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Exponential profile on a grid of α.
    Profile {
        #[arg(short = 'p')]
        p: f64,
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
    },
    /// Pointwise curvature data at the radial projection of a point.
    Curvature {
        #[arg(short = 'p')]
        p: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        point: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Density of Φ_{n-m}; all m when omitted.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Convergence of scaled coordinate moments to the limit law.
    Maxwell {
        #[arg(short = 'p')]
        p: f64,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[arg(long = "lambda", value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(short = 'j', default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Built-in consistency suites.
    Validate {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ClosedForm,
    SteinerN2,
    SteinerN3,
    Phase,
    Profile,
    Curvature,
    Maxwell,
}

/// A rendered command result.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub parameters: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Value>,
    pub checks: Vec<Check>,
    pub seeds: Vec<u64>,
    /// `(title, x column, y column)` for plot output.
    pub series: Vec<(&'static str, &'static str, &'static str)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Report {
    fn new(command: &'static str, parameters: Value, columns: Vec<&'static str>) -> Self {
        Report { command, parameters, columns, rows: Vec::new(), checks: Vec::new(), seeds: Vec::new(), series: Vec::new() }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self, cfg: &QuadConfig) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "parameters": self.parameters,
            "config": cfg,
            "seeds": self.seeds,
            "columns": self.columns,
            "rows": self.rows,
            "checks": self.checks,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# schema_version={} command={}", SCHEMA_VERSION, self.command);
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = self.columns.iter().map(|c| csv_cell(&row[*c])).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        for c in &self.checks {
            let _ = writeln!(out, "# check {} {} {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
        }
        out
    }

    pub fn to_plot(&self) -> String {
        let mut out = String::new();
        for (title, x, y) in &self.series {
            let _ = writeln!(out, "# {title}");
            let _ = writeln!(out, "{x},{y}");
            for row in &self.rows {
                if !row[*y].is_null() {
                    let _ = writeln!(out, "{},{}", csv_cell(&row[*x]), csv_cell(&row[*y]));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format, cfg: &QuadConfig) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(cfg)).unwrap_or_default();
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Plot => self.to_plot(),
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

/// Reads a TOML quadrature configuration; unknown keys are rejected.
pub fn load_config(path: Option<&Path>) -> Result<QuadConfig> {
    let cfg = match path {
        None => QuadConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Domain(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Error::Domain(format!("{}: {e}", p.display())))?
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn read_weights(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| Error::Domain(format!("bad weight {s:?}: {e}"))))
        .collect()
}

fn regime_of(regime: RegimeArg, alpha: f64, j: usize, m: usize) -> Regime {
    match regime {
        RegimeArg::Bulk => Regime::Bulk { alpha },
        RegimeArg::Left => Regime::LeftEdge { j },
        RegimeArg::Right => Regime::RightEdge { m },
    }
}

/// Runs one parsed command.
pub fn execute(command: &Command, cfg: &QuadConfig) -> Result<Report> {
    match command {
        Command::Intrinsic { p, n, j, all, weights, weights_file } => {
            let weights = match (weights, weights_file) {
                (Some(w), _) => w.clone(),
                (None, Some(f)) => read_weights(f)?,
                (None, None) => vec![1.0; *n],
            };
            if weights.len() != *n {
                return invalid(format!("{} weights given for n = {n}", weights.len()));
            }
            cmd_intrinsic(*p, weights, *j, *all, cfg)
        }
        Command::Asymptotic { p, regime, n_list, alpha, j, m } => {
            cmd_asymptotic(*p, regime_of(*regime, *alpha, *j, *m), n_list, cfg)
        }
        Command::Profile { p, grid } => cmd_profile(*p, *grid, cfg),
        Command::Curvature { p, point, weights, m } => {
            let weights = weights.clone().unwrap_or_else(|| vec![1.0; point.len()]);
            cmd_curvature(*p, weights, point, *m)
        }
        Command::Maxwell { p, regime, lambdas, n_list, alpha, j, m } => {
            cmd_maxwell(*p, regime_of(*regime, *alpha, *j, *m), lambdas, n_list, cfg)
        }
        Command::Validate { suite, seed, samples } => cmd_validate(*suite, *seed, *samples, cfg),
    }
}

pub fn cmd_intrinsic(p: f64, weights: Vec<f64>, j: Option<usize>, all: bool, cfg: &QuadConfig) -> Result<Report> {
    let spec = PBallSpec::new(p, weights)?;
    let n = spec.n();
    let mut report = Report::new(
        "intrinsic",
        json!({"p": p, "n": n, "j": j, "all": all, "weights": spec.weights()}),
        vec!["j", "value", "log_value", "est_rel_error", "theta_nodes"],
    );
    report.series.push(("log intrinsic volume against j", "j", "log_value"));
    let results = if all || j.is_none() {
        intrinsic_volume_profile(&spec, cfg)?
    } else {
        let j = j.unwrap_or(0);
        if j > n {
            return invalid(format!("j must lie in [0, {n}], got {j}"));
        }
        vec![intrinsic_volume_weighted(&spec, j, cfg)?]
    };
    for r in &results {
        report.rows.push(json!({
            "j": r.j,
            "value": r.value_f64(),
            "log_value": r.ln(),
            "est_rel_error": r.diagnostics.est_rel_error,
            "theta_nodes": r.diagnostics.theta_nodes,
        }));
    }
    if results.len() == n + 1 {
        let logs: Vec<_> = results.iter().map(|r| r.value).collect();
        let pass = is_log_concave(&logs, 1e-9);
        report.checks.push(Check { name: "log-concave".into(), pass, detail: "V_j^2 >= V_{j-1} V_{j+1}".into() });
    }
    Ok(report)
}

pub fn cmd_asymptotic(p: f64, regime: Regime, n_list: &[usize], cfg: &QuadConfig) -> Result<Report> {
    let mut report = Report::new(
        "asymptotic",
        json!({"p": p, "regime": regime, "n": n_list}),
        vec!["n", "j", "exact", "log_exact", "log_asymptotic", "ratio", "est_rel_error"],
    );
    report.series.push(("exact over asymptotic against n", "n", "ratio"));
    for &n in n_list {
        let spec = PBallSpec::unit(p, n)?;
        let (j, log_asy) = match regime {
            Regime::Bulk { alpha } => {
                let j = regime.index(n)?;
                if j == 0 || !(alpha > 0.0 && alpha < 1.0) {
                    return invalid(format!("bulk regime needs 0 < j < n, got j = {j}"));
                }
                (j, bulk_asymptotic(p, n, j, cfg)?.log_abs())
            }
            Regime::LeftEdge { j } => {
                if j > n {
                    return invalid(format!("j = {j} exceeds n = {n}"));
                }
                (j, left_edge_asymptotic(p, n, j)?.ln())
            }
            Regime::RightEdge { m } => {
                let j = regime.index(n)?;
                (j, right_edge_asymptotic(p, n, m)?.log_abs())
            }
        };
        let exact = intrinsic_volume_weighted(&spec, j, cfg)?;
        report.rows.push(json!({
            "n": n,
            "j": j,
            "exact": exact.value_f64(),
            "log_exact": exact.ln(),
            "log_asymptotic": log_asy,
            "ratio": (exact.ln() - log_asy).exp(),
            "est_rel_error": exact.diagnostics.est_rel_error,
        }));
    }
    Ok(report)
}

pub fn cmd_profile(p: f64, grid: f64, cfg: &QuadConfig) -> Result<Report> {
    if !(grid > 0.0 && grid <= 1.0) {
        return invalid(format!("grid step must lie in (0, 1], got {grid}"));
    }
    let steps = (1.0 / grid).round() as usize;
    if ((steps as f64) * grid - 1.0).abs() > 1e-9 {
        return invalid(format!("grid step {grid} does not divide [0, 1]"));
    }
    let mut report = Report::new(
        "profile",
        json!({"p": p, "grid": grid}),
        vec!["alpha", "g", "kappa_term", "sup_psi", "phase_residual", "g_inf", "g_2", "g_1", "g_simplex"],
    );
    report.series.push(("exponential profile g_p against alpha", "alpha", "g"));
    report.series.push(("cube profile", "alpha", "g_inf"));
    report.series.push(("euclidean ball profile", "alpha", "g_2"));
    report.series.push(("crosspolytope profile", "alpha", "g_1"));
    report.series.push(("simplex profile", "alpha", "g_simplex"));
    let mut gs = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let alpha = (k as f64 / steps as f64).min(1.0);
        let pt = exp_profile(p, alpha, cfg)?;
        let residual = if alpha > 0.0 && alpha < 1.0 { phase_maximizer(p, alpha, cfg)?.residual } else { 0.0 };
        let refs = profile_references(alpha)?;
        gs.push(pt.g_value);
        report.rows.push(json!({
            "alpha": alpha,
            "g": pt.g_value,
            "kappa_term": pt.kappa_term,
            "sup_psi": pt.sup_psi,
            "phase_residual": residual,
            "g_inf": refs.g_inf,
            "g_2": refs.g_2,
            "g_1": refs.g_1,
            "g_simplex": refs.g_simplex,
        }));
    }
    let worst = gs.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::NEG_INFINITY, f64::max);
    report.checks.push(Check {
        name: "concave".into(),
        pass: worst <= 1e-6,
        detail: format!("max second difference {worst:.3e}"),
    });
    Ok(report)
}

pub fn cmd_curvature(p: f64, weights: Vec<f64>, point: &[f64], m: Option<usize>) -> Result<Report> {
    let spec = PBallSpec::new(p, weights)?;
    let pt = BoundaryPoint::from_direction(&spec, point)?;
    let n = spec.n();
    let ms: Vec<usize> = match m {
        Some(m) if (1..=n).contains(&m) => vec![m],
        Some(m) => return invalid(format!("m must lie in [1, {n}], got {m}")),
        None => (1..=n).collect(),
    };
    let lambdas = principal_curvatures(&pt)?;
    let normal = gauss_map(&pt)?;
    let mut report = Report::new(
        "curvature",
        json!({"p": p, "weights": spec.weights(), "direction": point, "m": m}),
        vec!["m", "sigma", "density", "vieta_gap"],
    );
    report.parameters["boundary_point"] = json!(pt.coords());
    report.parameters["principal_curvatures"] = json!(lambdas);
    report.parameters["gauss_curvature"] = json!(gauss_curvature(&pt)?);
    report.parameters["normal"] = json!(normal);
    report.parameters["support_value"] = json!(support_function(&spec, &normal)?);
    let e = crate::symmetric::elementary_symmetric(&lambdas);
    for m in ms {
        let sigma = sigma_curvatures(&pt, m)?;
        report.rows.push(json!({
            "m": m,
            "sigma": sigma,
            "density": curvature_density(&pt, m)?,
            "vieta_gap": (sigma - e[m - 1]).abs() / sigma.abs().max(f64::MIN_POSITIVE),
        }));
    }
    Ok(report)
}

pub fn cmd_maxwell(p: f64, regime: Regime, lambdas: &[f64], n_list: &[usize], cfg: &QuadConfig) -> Result<Report> {
    let rows = convergence_table(p, regime, lambdas, n_list, cfg)?;
    let mut report = Report::new(
        "maxwell",
        json!({"p": p, "regime": regime, "lambda": lambdas, "n": n_list}),
        vec!["n", "j", "scaled_moment", "limit", "rel_gap", "est_rel_error"],
    );
    report.series.push(("relative moment gap against n", "n", "rel_gap"));
    for r in &rows {
        report.rows.push(serde_json::to_value(r).map_err(|e| Error::Domain(e.to_string()))?);
    }
    report.checks.push(Check {
        name: "gap-decreasing".into(),
        pass: gaps_decreasing(&rows, 1e-8),
        detail: "each gap below the previous one or below 1e-8".into(),
    });
    Ok(report)
}

fn check(name: impl Into<String>, pass: bool, detail: String) -> Check {
    Check { name: name.into(), pass, detail }
}

pub fn cmd_validate(suite: Suite, seed: u64, samples: u64, cfg: &QuadConfig) -> Result<Report> {
    let mut report = Report::new(
        "validate",
        json!({"suite": suite, "seed": seed, "samples": samples}),
        vec!["name", "pass", "detail"],
    );
    match suite {
        Suite::ClosedForm => {
            for n in 2..=8 {
                let spec = PBallSpec::unit(2.0, n)?;
                let rows = intrinsic_volume_profile(&spec, cfg)?;
                let worst = rows.iter().map(|r| (r.value_f64() / ball_vj(n, r.j) - 1.0).abs()).fold(0.0, f64::max);
                report.checks.push(check(format!("ball n={n}"), worst <= 1e-8, format!("max rel err {worst:.2e}")));
            }
        }
        Suite::SteinerN2 | Suite::SteinerN3 => {
            let n = if suite == Suite::SteinerN2 { 2 } else { 3 };
            let mc = McConfig::new(samples, seed);
            mc.validate()?;
            report.seeds.push(seed);
            for &p in &[1.5, 3.0] {
                let spec = PBallSpec::unit(p, n)?;
                let vj: Vec<f64> = intrinsic_volume_profile(&spec, cfg)?.iter().map(|r| r.value_f64()).collect();
                for &t in &[0.1f64, 0.5, 1.0] {
                    let predicted: f64 = (0..=n).map(|j| kappa(n - j) * vj[j] * t.powi((n - j) as i32)).sum();
                    let est = steiner_mc_volume(&spec, t, &mc)?;
                    let z = (est.estimate - predicted).abs() / est.std_err;
                    report.checks.push(check(
                        format!("steiner p={p} t={t}"),
                        z <= 3.0,
                        format!("predicted {predicted:.6} mc {:.6} ± {:.1e} ({z:.2} se)", est.estimate, est.std_err),
                    ));
                }
            }
        }
        Suite::Phase => {
            for k in 1..=9 {
                let beta = k as f64 / 10.0;
                let t = phase_maximizer(2.0, beta, cfg)?.theta_star;
                let err = (t / ((1.0 - beta) / beta) - 1.0).abs();
                report.checks.push(check(format!("p=2 beta={beta}"), err <= 1e-10, format!("rel err {err:.2e}")));
            }
            for &p in &[1.2, 1.5, 3.0, 5.0] {
                let worst = (1..=9)
                    .map(|k| phase_maximizer(p, k as f64 / 10.0, cfg).map(|pt| pt.residual))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                report.checks.push(check(format!("residual p={p}"), worst <= 1e-10, format!("{worst:.2e}")));
            }
        }
        Suite::Profile => {
            let worst = (1..20)
                .map(|k| {
                    let a = k as f64 / 20.0;
                    Ok((exp_profile(2.0, a, cfg)?.g_value - profile_references(a)?.g_2).abs())
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            report.checks.push(check("p=2 closed form", worst <= 1e-8, format!("max abs err {worst:.2e}")));
            for &p in &[1.5, 3.0] {
                let inner = cmd_profile(p, 0.05, cfg)?;
                report.checks.extend(inner.checks.into_iter().map(|c| Check { name: format!("{} p={p}", c.name), ..c }));
            }
        }
        Suite::Curvature => {
            for n in 2..=6 {
                let spec = PBallSpec::unit(2.0, n)?;
                let dir: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.37).collect();
                let pt = BoundaryPoint::from_direction(&spec, &dir)?;
                let worst = principal_curvatures(&pt)?.iter().map(|k| (k - 1.0).abs()).fold(0.0, f64::max);
                report.checks.push(check(format!("sphere n={n}"), worst <= 1e-10, format!("{worst:.2e}")));
            }
            let inner = cmd_curvature(3.5, vec![1.0, 0.5, 2.0, 1.5], &[0.3, -1.0, 0.2, 0.6], None)?;
            let worst = inner.rows.iter().map(|r| r["vieta_gap"].as_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
            report.checks.push(check("vieta", worst <= 1e-8, format!("{worst:.2e}")));
        }
        Suite::Maxwell => {
            for &p in &[1.5, 2.0, 3.0] {
                for regime in [Regime::Bulk { alpha: 0.5 }, Regime::LeftEdge { j: 1 }, Regime::RightEdge { m: 1 }] {
                    let rows = convergence_table(p, regime, &[2.0], &[8, 16, 32], cfg)?;
                    let gaps: Vec<String> = rows.iter().map(|r| format!("{:.2e}", r.rel_gap)).collect();
                    report.checks.push(check(
                        format!("gap p={p} {regime:?}"),
                        gaps_decreasing(&rows, 1e-8),
                        gaps.join(" "),
                    ));
                }
            }
        }
    }
    for c in &report.checks {
        report.rows.push(json!({"name": c.name, "pass": c.pass, "detail": c.detail}));
    }
    Ok(report)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::DegenerateInput(_) => EXIT_INVALID,
        Error::QuadratureFailure(_) | Error::ConvergenceFailure(_) | Error::OverflowGuard(_) => EXIT_NUMERIC,
    }
}

/// Caps the global rayon pool at `LPVOL_THREADS` when set.
fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("LPVOL_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Error::Domain(format!("LPVOL_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return invalid("LPVOL_THREADS must be positive");
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn write_output(cli: &Cli, report: &Report, cfg: &QuadConfig, wall: f64) -> Result<()> {
    let body = report.render(cli.common.format, cfg);
    match &cli.common.output {
        None => print!("{body}"),
        Some(path) => {
            let io = |e: std::io::Error| Error::Domain(format!("{}: {e}", path.display()));
            std::fs::write(path, body).map_err(io)?;
            let manifest = json!({
                "schema_version": SCHEMA_VERSION,
                "command": report.command,
                "parameters": report.parameters,
                "config": cfg,
                "seeds": report.seeds,
                "format": cli.common.format,
                "tool_version": env!("CARGO_PKG_VERSION"),
                "wall_time_s": wall,
                "output": path.file_name().map(|s| s.to_string_lossy().into_owned()),
            });
            let mut side = path.clone().into_os_string();
            side.push(".manifest.json");
            let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Domain(e.to_string()))?;
            std::fs::write(PathBuf::from(side), text + "\n").map_err(io)?;
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let outcome = configure_threads()
        .and_then(|_| load_config(cli.common.config.as_deref()))
        .and_then(|cfg| execute(&cli.command, &cfg).map(|r| (r, cfg)))
        .and_then(|(report, cfg)| {
            write_output(&cli, &report, &cfg, start.elapsed().as_secs_f64())?;
            Ok(report)
        });
    match outcome {
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("check failed: {} ({})", c.name, c.detail);
            }
            if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("lpvol: {e}");
            exit_code(&e)
        }
    }
}
