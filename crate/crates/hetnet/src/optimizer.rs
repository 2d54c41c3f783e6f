//! Bias optimization (linear search over a grid) and parameter sweeps.

use rayon::prelude::*;

use crate::analysis::{
    association_probabilities, rate_coverage, AnalysisOptions, AssociationReport, CoverageResult,
};
use crate::error::{Error, Result};
use crate::model::NetworkConfig;

/// Grid and objective for the bias search.
#[derive(Debug, Clone)]
pub struct SearchSpec {
    /// Candidate bias values, sorted ascending, all >= 1.
    pub grid: Vec<f64>,
    /// Rate threshold (bits/s) defining the objective.
    pub objective_delta: f64,
    /// Number of golden-section refinement iterations around the best grid
    /// point; 0 disables refinement.
    pub refine_iters: u32,
}

impl SearchSpec {
    pub fn new(mut grid: Vec<f64>, objective_delta: f64) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::invalid("grid", "nonempty list of bias values"));
        }
        grid.sort_by(f64::total_cmp);
        if grid[0] < 1.0 {
            return Err(Error::invalid("grid", "all bias values >= 1"));
        }
        Ok(SearchSpec { grid, objective_delta, refine_iters: 0 })
    }

    /// Log-spaced grid of `points` bias values over [lo, hi].
    pub fn log_grid(lo: f64, hi: f64, points: usize, objective_delta: f64) -> Result<Self> {
        if !(lo >= 1.0 && hi >= lo && points >= 1) {
            return Err(Error::invalid("grid", "1 <= lo <= hi and points >= 1"));
        }
        let grid = if points == 1 {
            vec![lo]
        } else {
            (0..points)
                .map(|i| {
                    let f = i as f64 / (points - 1) as f64;
                    (lo.ln() + f * (hi.ln() - lo.ln())).exp()
                })
                .collect()
        };
        Self::new(grid, objective_delta)
    }

    /// The default search: 60 log-spaced points over [1, 1e4].
    pub fn default_for(objective_delta: f64) -> Self {
        Self::log_grid(1.0, 1e4, 60, objective_delta).expect("default grid is valid")
    }
}

/// Result of the bias search.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub a_s_opt: f64,
    pub p_c_opt: f64,
    /// (bias, rate coverage) pairs in grid order for successful points.
    pub curve: Vec<(f64, f64)>,
    /// Grid points whose evaluation failed, with the failure message.
    pub failures: Vec<(f64, String)>,
}

fn with_bias(cfg: &NetworkConfig, bias: f64) -> NetworkConfig {
    NetworkConfig { bias, ..*cfg }
}

/// Linear search for the bias maximizing rate coverage. Ties break toward
/// the smallest bias. Failed grid points are excluded and reported.
pub fn optimize_bias(
    cfg: &NetworkConfig,
    spec: &SearchSpec,
    opts: &AnalysisOptions,
) -> Result<Optimum> {
    let evaluated: Vec<(f64, std::result::Result<f64, String>)> = spec
        .grid
        .par_iter()
        .map(|&bias| {
            let point = rate_coverage(&with_bias(cfg, bias), spec.objective_delta, opts)
                .map(|r| r.p_c)
                .map_err(|e| e.to_string());
            (bias, point)
        })
        .collect();

    let mut curve = Vec::new();
    let mut failures = Vec::new();
    for (bias, res) in evaluated {
        match res {
            Ok(p_c) => curve.push((bias, p_c)),
            Err(msg) => failures.push((bias, msg)),
        }
    }
    if curve.is_empty() {
        return Err(Error::Domain("optimize_bias: every grid point failed".into()));
    }
    let (mut a_s_opt, mut p_c_opt) = curve[0];
    for &(bias, p_c) in &curve[1..] {
        if p_c > p_c_opt {
            a_s_opt = bias;
            p_c_opt = p_c;
        }
    }

    // optional local refinement between the grid neighbors of the best point
    if spec.refine_iters > 0 {
        let idx = curve.iter().position(|&(b, _)| b == a_s_opt).expect("optimum on curve");
        let lo = if idx > 0 { curve[idx - 1].0 } else { a_s_opt };
        let hi = if idx + 1 < curve.len() { curve[idx + 1].0 } else { a_s_opt };
        if hi > lo {
            let (b, p) = golden_section(cfg, spec, opts, lo, hi, spec.refine_iters)?;
            if p > p_c_opt {
                a_s_opt = b;
                p_c_opt = p;
            }
        }
    }

    Ok(Optimum { a_s_opt, p_c_opt, curve, failures })
}

fn golden_section(
    cfg: &NetworkConfig,
    spec: &SearchSpec,
    opts: &AnalysisOptions,
    mut lo: f64,
    mut hi: f64,
    iters: u32,
) -> Result<(f64, f64)> {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let eval = |b: f64| -> Result<f64> {
        Ok(rate_coverage(&with_bias(cfg, b), spec.objective_delta, opts)?.p_c)
    };
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval(x1)?;
        }
    }
    if f1 > f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// The micro-tier association bias.
    Bias,
    /// The rate threshold delta.
    Delta,
    /// The micro-tier LoS intensity.
    LambdaMicro,
    /// The macro beamwidth; the micro beamwidth tracks it at twice the
    /// value, preserving the baseline ratio.
    Beamwidths,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bias" => Ok(SweepAxis::Bias),
            "delta" => Ok(SweepAxis::Delta),
            "lambda_s" => Ok(SweepAxis::LambdaMicro),
            "beamwidths" => Ok(SweepAxis::Beamwidths),
            other => Err(Error::invalid(
                "axis",
                &format!("one of bias|delta|lambda_s|beamwidths, got `{other}`"),
            )),
        }
    }
}

/// One sweep row: the association report and coverage at a single axis
/// value. Failed rows carry the error instead.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: f64,
    pub outcome: std::result::Result<(AssociationReport, CoverageResult), String>,
}

fn apply_axis(cfg: &NetworkConfig, axis: SweepAxis, value: f64) -> (NetworkConfig, f64) {
    let mut c = *cfg;
    let mut delta = f64::NAN; // caller substitutes the manifest delta
    match axis {
        SweepAxis::Bias => c.bias = value,
        SweepAxis::Delta => delta = value,
        SweepAxis::LambdaMicro => c.micro_tier.lambda_los = value,
        SweepAxis::Beamwidths => {
            c.macro_tier.beamwidth = value;
            c.micro_tier.beamwidth = 2.0 * value;
        }
    }
    (c, delta)
}

/// Evaluate the analysis pipeline at each axis value. Rows fail
/// independently; ordering follows `values`.
pub fn sweep(
    cfg: &NetworkConfig,
    axis: SweepAxis,
    values: &[f64],
    delta: f64,
    opts: &AnalysisOptions,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::invalid("values", "nonempty list of axis values"));
    }
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&value| {
            let (c, row_delta) = apply_axis(cfg, axis, value);
            let d = if row_delta.is_nan() { delta } else { row_delta };
            let outcome = (|| {
                let report = association_probabilities(&c, opts).map_err(|e| e.to_string())?;
                let coverage = rate_coverage(&c, d, opts).map_err(|e| e.to_string())?;
                Ok((report, coverage))
            })();
            SweepRow { axis_value: value, outcome }
        })
        .collect();
    Ok(rows)
}
