//! Experiment orchestration: config ingestion, command dispatch, and CSV
//! emission. All numeric output uses the shortest round-trip decimal form,
//! '.' radix, comma separators, and LF line endings, so identical manifests
//! produce byte-identical files.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::analysis::AnalysisOptions;
use crate::config;
use crate::error::{Error, Result};
use crate::model::NetworkConfig;
use crate::montecarlo;
use crate::optimizer::{self, SearchSpec, SweepAxis};

/// A log-spaced grid request.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.min >= 1.0 && self.max >= self.min && self.points >= 1) {
            return Err(Error::invalid("grid", "1 <= grid-min <= grid-max, grid-points >= 1"));
        }
        Ok(SearchSpec::log_grid(self.min, self.max, self.points, 1.0)?.grid)
    }
}

/// What to run.
#[derive(Debug, Clone)]
pub enum Command {
    /// Association probabilities and loads across a bias grid.
    Associate { grid: GridSpec },
    /// Full coverage breakdown at a single rate threshold.
    Coverage { delta: f64 },
    /// Linear-search bias optimization; emits the full curve.
    Optimize { delta: f64, grid: GridSpec },
    /// Monte Carlo estimates of association and rate coverage.
    Simulate { delta: f64 },
    /// Analysis sweep along one axis.
    Sweep { axis: SweepAxis, values: Vec<f64>, delta: f64 },
    /// Analysis-vs-simulation cross check with pass/fail verdicts.
    Validate { delta: f64 },
}

/// A fully resolved run request.
#[derive(Debug, Clone)]
pub struct RunManifest {
    /// Config file; the bundled baseline is used when absent.
    pub config_path: Option<PathBuf>,
    pub command: Command,
    pub output_path: PathBuf,
    pub seed: u64,
    pub trials: u64,
    pub exact_exclusion: bool,
}

impl RunManifest {
    fn load(&self) -> Result<NetworkConfig> {
        match &self.config_path {
            Some(p) => config::load_config(p),
            None => Ok(config::baseline()),
        }
    }

    fn opts(&self) -> AnalysisOptions {
        AnalysisOptions {
            exact_exclusion: self.exact_exclusion,
            ..Default::default()
        }
    }
}

fn csv_row(fields: &[String]) -> String {
    fields.join(",")
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Execute the manifest and write its CSV artifact. `validate` returns an
/// error (nonzero exit) when any metric exceeds tolerance.
pub fn run(manifest: &RunManifest) -> Result<()> {
    let cfg = manifest.load()?;
    let opts = manifest.opts();
    let (out, clean) = match &manifest.command {
        Command::Associate { grid } => associate_csv(&cfg, grid, &opts)?,
        Command::Coverage { delta } => sweep_csv(&cfg, SweepAxis::Delta, &[*delta], *delta, &opts)?,
        Command::Optimize { delta, grid } => optimize_csv(&cfg, *delta, grid, &opts)?,
        Command::Simulate { delta } => (simulate_csv(&cfg, *delta, manifest)?, true),
        Command::Sweep { axis, values, delta } => sweep_csv(&cfg, *axis, values, *delta, &opts)?,
        Command::Validate { delta } => {
            let (report, ok) = validate_report(&cfg, *delta, manifest)?;
            (report, ok)
        }
    };
    std::fs::write(&manifest.output_path, out)?;
    if clean {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "run reported failures; see {}",
            manifest.output_path.display()
        )))
    }
}

fn associate_csv(
    cfg: &NetworkConfig,
    grid: &GridSpec,
    opts: &AnalysisOptions,
) -> Result<(String, bool)> {
    let mut clean = true;
    let mut out = String::from("A_s,B_m,B_s,P_tm,P_ts,L_m,L_s,error\n");
    for bias in grid.values()? {
        let c = NetworkConfig { bias, ..*cfg };
        match crate::analysis::association_probabilities(&c, opts) {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "{}",
                    csv_row(&[
                        num(bias),
                        num(r.b_macro),
                        num(r.b_micro),
                        num(r.p_assoc_macro),
                        num(r.p_assoc_micro),
                        num(r.load_macro),
                        num(r.load_micro),
                        String::new(),
                    ])
                );
            }
            Err(e) => {
                clean = false;
                let _ = writeln!(out, "{},,,,,,,{}", num(bias), csv_escape(&e.to_string()));
            }
        }
    }
    Ok((out, clean))
}

fn sweep_csv(
    cfg: &NetworkConfig,
    axis: SweepAxis,
    values: &[f64],
    delta: f64,
    opts: &AnalysisOptions,
) -> Result<(String, bool)> {
    let rows = optimizer::sweep(cfg, axis, values, delta, opts)?;
    let mut out = String::from(
        "axis_value,B_m,B_s,P_tm,P_ts,L_m,L_s,tau_m,tau_s,P2,P3,P4,P5,P_c,error\n",
    );
    let mut any_failed = false;
    for row in &rows {
        match &row.outcome {
            Ok((r, c)) => {
                let _ = writeln!(
                    out,
                    "{}",
                    csv_row(&[
                        num(row.axis_value),
                        num(r.b_macro),
                        num(r.b_micro),
                        num(r.p_assoc_macro),
                        num(r.p_assoc_micro),
                        num(r.load_macro),
                        num(r.load_micro),
                        num(c.tau_macro),
                        num(c.tau_micro),
                        num(c.p2),
                        num(c.p3),
                        num(c.p4),
                        num(c.p5),
                        num(c.p_c),
                        String::new(),
                    ])
                );
            }
            Err(msg) => {
                any_failed = true;
                let _ = writeln!(out, "{},,,,,,,,,,,,,,{}", num(row.axis_value), csv_escape(msg));
            }
        }
    }
    Ok((out, !any_failed))
}

fn optimize_csv(
    cfg: &NetworkConfig,
    delta: f64,
    grid: &GridSpec,
    opts: &AnalysisOptions,
) -> Result<(String, bool)> {
    let spec = SearchSpec::new(grid.values()?, delta)?;
    let optimum = optimizer::optimize_bias(cfg, &spec, opts)?;
    let mut out = String::from("A_s,P_c,is_optimum,error\n");
    for &(bias, p_c) in &optimum.curve {
        let marker = if bias == optimum.a_s_opt { "1" } else { "0" };
        let _ = writeln!(out, "{},{},{},", num(bias), num(p_c), marker);
    }
    for (bias, msg) in &optimum.failures {
        let _ = writeln!(out, "{},,,{}", num(*bias), csv_escape(msg));
    }
    Ok((out, optimum.failures.is_empty()))
}

fn simulate_csv(cfg: &NetworkConfig, delta: f64, manifest: &RunManifest) -> Result<String> {
    let (p_tm, p_ts) = montecarlo::estimate_association(cfg, manifest.trials, manifest.seed)?;
    let p_c = montecarlo::estimate_rate_coverage(cfg, delta, manifest.trials, manifest.seed)?;
    let mut out = String::from("metric,mean,half_width_95,trials,seed\n");
    for (name, est) in [("P_tm", p_tm), ("P_ts", p_ts), ("P_c", p_c)] {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            name,
            num(est.mean),
            num(est.half_width_95),
            est.trials,
            est.seed
        );
    }
    Ok(out)
}

/// Compare analysis against simulation; returns (report, all_passed).
fn validate_report(
    cfg: &NetworkConfig,
    delta: f64,
    manifest: &RunManifest,
) -> Result<(String, bool)> {
    let opts = manifest.opts();
    let mut out = String::from("metric,analytic,simulated,abs_delta,tolerance,pass\n");
    let mut all_ok = true;
    let mut push = |name: &str, analytic: f64, est: &montecarlo::McEstimate, floor: f64| {
        let delta_abs = (analytic - est.mean).abs();
        let tol = floor.max(3.0 * est.half_width_95);
        let ok = delta_abs <= tol;
        all_ok &= ok;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            name,
            num(analytic),
            num(est.mean),
            num(delta_abs),
            num(tol),
            if ok { "pass" } else { "FAIL" }
        );
    };

    for bias in [1.0, 100.0, 1e4] {
        let c = NetworkConfig { bias, ..*cfg };
        let report = crate::analysis::association_probabilities(&c, &opts)?;
        let (sim_m, sim_s) = montecarlo::estimate_association(&c, manifest.trials, manifest.seed)?;
        push(&format!("P_tm@A_s={bias}"), report.p_assoc_macro, &sim_m, 0.01);
        push(&format!("P_ts@A_s={bias}"), report.p_assoc_micro, &sim_s, 0.01);
    }
    let cov = crate::analysis::rate_coverage(cfg, delta, &opts)?;
    let sim = montecarlo::estimate_rate_coverage(cfg, delta, manifest.trials, manifest.seed)?;
    push(&format!("P_c@delta={delta}"), cov.p_c, &sim, 0.02);
    drop(push);
    Ok((out, all_ok))
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
