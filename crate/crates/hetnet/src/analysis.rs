//! Load and rate-coverage analysis for the two-tier network.
//!
//! The pipeline: nearest-distance statistics feed the association
//! probabilities and per-BS loads; the interference Laplace transforms are
//! exponentials of radial integrals of the Omega kernel; scenario coverage
//! integrates the transform (and its derivatives, for Nakagami shapes
//! above 1) against the serving-distance density; rate coverage maps a rate
//! threshold to per-tier SINR thresholds through the mean loads and sums
//! the four scenario terms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{
    association_ratio, distance_stats, NetworkConfig, Tier, TierParams,
};
use crate::numerics::{exp_form_derivatives, integrate, DerivativeStack, QuadratureSpec};

/// The four association outcomes with a serving BS. Scenario 1 (no LoS BS
/// at all) carries no coverage term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Only the macro LoS process is nonempty; serving tier macro.
    MacroOnly,
    /// Only the micro LoS process is nonempty; serving tier micro.
    MicroOnly,
    /// Both nonempty, macro BS wins the biased association.
    BothMacro,
    /// Both nonempty, micro BS wins the biased association.
    BothMicro,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::MacroOnly,
        Scenario::MicroOnly,
        Scenario::BothMacro,
        Scenario::BothMicro,
    ];

    pub fn serving_tier(self) -> Tier {
        match self {
            Scenario::MacroOnly | Scenario::BothMacro => Tier::Macro,
            Scenario::MicroOnly | Scenario::BothMicro => Tier::Micro,
        }
    }
}

/// Knobs shared by every analysis entry point.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalysisOptions {
    pub quad: QuadratureSpec,
    /// When set, the two-tier scenarios carve the association exclusion
    /// disk out of the non-serving tier's interference integral instead of
    /// integrating it from zero.
    pub exact_exclusion: bool,
}

/// A SINR coverage query: which scenario, at which threshold.
#[derive(Debug, Clone, Copy)]
pub struct SinrQuery {
    pub scenario: Scenario,
    pub tau: f64,
}

impl SinrQuery {
    pub fn new(scenario: Scenario, tau: f64) -> Result<Self> {
        if !(tau >= 0.0) {
            return Err(Error::Domain(format!("SinrQuery: tau must be >= 0, got {tau}")));
        }
        Ok(SinrQuery { scenario, tau })
    }

    /// psi = m * tau / (P G_max) for the serving tier.
    pub fn psi(&self, cfg: &NetworkConfig) -> f64 {
        let t = cfg.tier(self.scenario.serving_tier());
        cfg.fading.shape() as f64 * self.tau / (t.power * t.g_max)
    }
}

/// Association probabilities and mean per-BS loads at a given bias.
#[derive(Debug, Clone, Copy)]
pub struct AssociationReport {
    pub b_macro: f64,
    pub b_micro: f64,
    pub p_assoc_macro: f64,
    pub p_assoc_micro: f64,
    pub load_macro: f64,
    pub load_micro: f64,
    /// Probability that no LoS BS of either tier exists.
    pub scenario1_prob: f64,
}

/// The four scenario coverages and their sum at one rate threshold.
#[derive(Debug, Clone, Copy)]
pub struct CoverageResult {
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub p5: f64,
    pub p_c: f64,
    pub delta: f64,
    pub tau_macro: f64,
    pub tau_micro: f64,
}

/// Association probabilities P_tm / P_ts and mean loads.
///
/// The overlap term conditions on both processes being nonempty and
/// compares the two nearest distances through rho. The integrals use the
/// unconditioned distance forms, so the near-one occupancy of the macro
/// tier never enters a catastrophic subtraction.
pub fn association_probabilities(
    cfg: &NetworkConfig,
    opts: &AnalysisOptions,
) -> Result<AssociationReport> {
    let d_m = distance_stats(&cfg.macro_tier);
    let d_s = distance_stats(&cfg.micro_tier);
    let rho = association_ratio(cfg);

    // P_tm = B_m (1 - B_s) + int_0^{mu_s} [B_s f_s](x) [B_m F_m](x / rho) dx
    let overlap_macro = integrate(
        |x| d_s.pdf_unnorm(x) * d_m.cdf_unnorm(x / rho),
        0.0,
        cfg.micro_tier.mu,
        &opts.quad,
    )?;
    let p_assoc_macro = d_m.prob_nonempty * d_s.prob_empty + overlap_macro;

    // P_ts = B_s (1 - B_m) + int_0^{mu_m} [B_m f_m](x) [B_s F_s](rho x) dx
    let overlap_micro = integrate(
        |x| d_m.pdf_unnorm(x) * d_s.cdf_unnorm(rho * x),
        0.0,
        cfg.macro_tier.mu,
        &opts.quad,
    )?;
    let p_assoc_micro = d_s.prob_nonempty * d_m.prob_empty + overlap_micro;

    let load = |p_assoc: f64, tier: &TierParams| {
        let lambda_all = tier.lambda_all();
        if lambda_all > 0.0 {
            cfg.lambda_u * p_assoc / lambda_all
        } else {
            0.0
        }
    };

    Ok(AssociationReport {
        b_macro: d_m.prob_nonempty,
        b_micro: d_s.prob_nonempty,
        p_assoc_macro,
        p_assoc_micro,
        load_macro: load(p_assoc_macro, &cfg.macro_tier),
        load_micro: load(p_assoc_micro, &cfg.micro_tier),
        scenario1_prob: d_m.prob_empty * d_s.prob_empty,
    })
}

/// Angular-averaged interference kernel of one tier at Laplace argument `a`
/// and interferer distance `r`:
/// theta [1 - (1 + a P G_max / (m r^alpha))^{-m}]
/// + (2 pi - theta) [1 - (1 + a P G_min / (m r^alpha))^{-m}].
pub fn omega_kernel(tier: &TierParams, a: f64, r: f64, cfg: &NetworkConfig) -> f64 {
    let m = cfg.fading.shape() as f64;
    let scale = tier.power / (m * r.powf(cfg.alpha));
    // 1 - (1+t)^{-m} via expm1/ln_1p, stable for tiny t
    let term = |g: f64| -> f64 {
        let t = a * scale * g;
        -(-m * t.ln_1p()).exp_m1()
    };
    tier.beamwidth * term(tier.g_max) + (2.0 * PI - tier.beamwidth) * term(tier.g_min)
}

/// n-th partial derivative of the Omega kernel with respect to `a`
/// (n >= 1), from the closed form
/// d^n/da^n (1 + c a)^{-m} = (-1)^n c^n m (m+1) ... (m+n-1) (1 + c a)^{-m-n}.
pub fn omega_kernel_derivative(
    tier: &TierParams,
    n: u32,
    a: f64,
    r: f64,
    cfg: &NetworkConfig,
) -> f64 {
    debug_assert!(n >= 1);
    let m = cfg.fading.shape() as f64;
    let scale = tier.power / (m * r.powf(cfg.alpha));
    let mut rising = 1.0;
    for i in 0..n {
        rising *= m + i as f64;
    }
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    let term = |g: f64| -> f64 {
        let c = scale * g;
        sign * rising * c.powi(n as i32) * (1.0 + c * a).powi(-((cfg.fading.shape() + n) as i32))
    };
    tier.beamwidth * term(tier.g_max) + (2.0 * PI - tier.beamwidth) * term(tier.g_min)
}

/// Radial integration ranges contributing to a scenario's interference
/// exponent: (tier, lower limit). The upper limit is always the tier's LoS
/// ball radius.
fn interference_ranges(
    cfg: &NetworkConfig,
    scenario: Scenario,
    x: f64,
    exact_exclusion: bool,
) -> [(Tier, Option<f64>); 2] {
    let rho = association_ratio(cfg);
    match scenario {
        Scenario::MacroOnly => [(Tier::Macro, Some(x)), (Tier::Micro, None)],
        Scenario::MicroOnly => [(Tier::Macro, None), (Tier::Micro, Some(x))],
        Scenario::BothMacro => {
            let micro_lo = if exact_exclusion { rho * x } else { 0.0 };
            [(Tier::Macro, Some(x)), (Tier::Micro, Some(micro_lo))]
        }
        Scenario::BothMicro => {
            let macro_lo = if exact_exclusion { x / rho } else { 0.0 };
            [(Tier::Macro, Some(macro_lo)), (Tier::Micro, Some(x))]
        }
    }
}

/// Value of the transform exponent
/// g(a) = -a sigma^2 - sum_tiers lambda int_lo^mu r Omega(a, r) dr
/// for a serving distance `x` under the given scenario.
pub fn omega_exponent(
    cfg: &NetworkConfig,
    scenario: Scenario,
    a: f64,
    x: f64,
    opts: &AnalysisOptions,
) -> Result<f64> {
    let mut g = -a * cfg.noise;
    for (tier_id, lo) in interference_ranges(cfg, scenario, x, opts.exact_exclusion) {
        let Some(lo) = lo else { continue };
        let tier = cfg.tier(tier_id);
        let lambda = tier.lambda_los();
        if lambda == 0.0 || lo >= tier.mu {
            continue;
        }
        let radial = integrate(|r| r * omega_kernel(tier, a, r, cfg), lo, tier.mu, &opts.quad)?;
        g -= lambda * radial;
    }
    Ok(g)
}

/// n-th derivative of the exponent with respect to `a` (n >= 1),
/// integrating the kernel derivative termwise in r.
pub fn omega_exponent_derivative(
    cfg: &NetworkConfig,
    scenario: Scenario,
    n: u32,
    a: f64,
    x: f64,
    opts: &AnalysisOptions,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain(
            "omega_exponent_derivative: n must be >= 1; use omega_exponent for the value".into(),
        ));
    }
    let mut g = if n == 1 { -cfg.noise } else { 0.0 };
    for (tier_id, lo) in interference_ranges(cfg, scenario, x, opts.exact_exclusion) {
        let Some(lo) = lo else { continue };
        let tier = cfg.tier(tier_id);
        let lambda = tier.lambda_los();
        if lambda == 0.0 || lo >= tier.mu {
            continue;
        }
        let radial = integrate(
            |r| r * omega_kernel_derivative(tier, n, a, r, cfg),
            lo,
            tier.mu,
            &opts.quad,
        )?;
        g -= lambda * radial;
    }
    Ok(g)
}

/// Derivatives L^{(0)}..L^{(k_max)} of the scenario's interference-plus-noise
/// Laplace transform at argument `a`, for serving distance `x`.
pub fn laplace_derivatives(
    cfg: &NetworkConfig,
    scenario: Scenario,
    a: f64,
    x: f64,
    k_max: usize,
    opts: &AnalysisOptions,
) -> Result<DerivativeStack> {
    let mut g = Vec::with_capacity(k_max + 1);
    g.push(omega_exponent(cfg, scenario, a, x, opts)?);
    for n in 1..=k_max as u32 {
        g.push(omega_exponent_derivative(cfg, scenario, n, a, x, opts)?);
    }
    Ok(exp_form_derivatives(|n| g[n], k_max))
}

/// Stable per-scenario weight at serving distance x, already folded with the
/// occupancy prefactors and the unconditioned serving-distance density.
fn scenario_weight(cfg: &NetworkConfig, scenario: Scenario, x: f64) -> f64 {
    let d_m = distance_stats(&cfg.macro_tier);
    let d_s = distance_stats(&cfg.micro_tier);
    let rho = association_ratio(cfg);
    match scenario {
        Scenario::MacroOnly => d_s.prob_empty * d_m.pdf_unnorm(x),
        Scenario::MicroOnly => d_m.prob_empty * d_s.pdf_unnorm(x),
        Scenario::BothMacro => {
            // B_s (1 - F_s(rho x)) = e^{-lambda_s pi (rho x)^2} - e^{-lambda_s pi mu_s^2}
            let l = cfg.micro_tier.lambda_los() * PI;
            let y = rho * x;
            ((-l * y * y).exp() - d_s.prob_empty) * d_m.pdf_unnorm(x)
        }
        Scenario::BothMicro => {
            let l = cfg.macro_tier.lambda_los() * PI;
            let y = x / rho;
            ((-l * y * y).exp() - d_m.prob_empty) * d_s.pdf_unnorm(x)
        }
    }
}

/// Upper limit of the serving-distance integral for a scenario.
fn outer_limit(cfg: &NetworkConfig, scenario: Scenario) -> f64 {
    let rho = association_ratio(cfg);
    match scenario {
        Scenario::MacroOnly => cfg.macro_tier.mu,
        Scenario::MicroOnly => cfg.micro_tier.mu,
        Scenario::BothMacro => (cfg.micro_tier.mu / rho).min(cfg.macro_tier.mu),
        Scenario::BothMicro => cfg.micro_tier.mu.min(rho * cfg.macro_tier.mu),
    }
}

/// SINR coverage probability of one scenario at threshold tau.
pub fn scenario_coverage(
    cfg: &NetworkConfig,
    query: &SinrQuery,
    opts: &AnalysisOptions,
) -> Result<f64> {
    if !query.tau.is_finite() {
        // threshold beyond representable rate: coverage is zero
        return Ok(0.0);
    }
    let psi = query.psi(cfg);
    let shape = cfg.fading.shape() as usize;
    let upper = outer_limit(cfg, query.scenario);
    let integrand = |x: f64| -> f64 {
        let w = scenario_weight(cfg, query.scenario, x);
        if w == 0.0 {
            return 0.0;
        }
        let a = psi * x.powf(cfg.alpha);
        let stack = match laplace_derivatives(cfg, query.scenario, a, x, shape - 1, opts) {
            Ok(s) => s,
            Err(_) => return f64::NAN,
        };
        let mut sum = 0.0;
        let mut factor = 1.0; // (-a)^k / k!
        for k in 0..shape {
            sum += factor * stack.get(k);
            factor *= -a / (k + 1) as f64;
        }
        w * sum
    };
    let value = integrate(integrand, 0.0, upper, &opts.quad)?;
    if value.is_nan() {
        return Err(Error::Domain("scenario_coverage: inner transform failed".into()));
    }
    // quadrature wiggle can leave a tiny negative or >1 excursion
    Ok(value.clamp(0.0, 1.0))
}

/// Rate coverage probability at rate threshold `delta` (bits/s), using
/// mean loads to convert the rate threshold into per-tier SINR thresholds.
pub fn rate_coverage(
    cfg: &NetworkConfig,
    delta: f64,
    opts: &AnalysisOptions,
) -> Result<CoverageResult> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("rate_coverage: delta must be > 0, got {delta}")));
    }
    let report = association_probabilities(cfg, opts)?;
    let tau_macro = tau_for(delta, report.load_macro, cfg.macro_tier.spectrum);
    let tau_micro = tau_for(delta, report.load_micro, cfg.micro_tier.spectrum);
    let p2 = scenario_coverage(cfg, &SinrQuery::new(Scenario::MacroOnly, tau_macro)?, opts)?;
    let p3 = scenario_coverage(cfg, &SinrQuery::new(Scenario::MicroOnly, tau_micro)?, opts)?;
    let p4 = scenario_coverage(cfg, &SinrQuery::new(Scenario::BothMacro, tau_macro)?, opts)?;
    let p5 = scenario_coverage(cfg, &SinrQuery::new(Scenario::BothMicro, tau_micro)?, opts)?;
    Ok(CoverageResult {
        p2,
        p3,
        p4,
        p5,
        p_c: p2 + p3 + p4 + p5,
        delta,
        tau_macro,
        tau_micro,
    })
}

/// SINR threshold equivalent to rate threshold delta under TDMA with mean
/// load L and spectrum S: tau = 2^{delta L / S} - 1.
pub fn tau_for(delta: f64, load: f64, spectrum: f64) -> f64 {
    (delta * load / spectrum).exp2() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config;
    use approx::assert_relative_eq;

    fn opts() -> AnalysisOptions {
        AnalysisOptions::default()
    }

    #[test]
    fn association_report_baseline() {
        let cfg = config::baseline();
        let r = association_probabilities(&cfg, &opts()).unwrap();
        assert_relative_eq!(r.b_micro, 1.0 - (-PI).exp(), epsilon = 1e-12);
        // partition of the association outcomes
        let total = r.p_assoc_macro + r.p_assoc_micro + r.scenario1_prob;
        assert_relative_eq!(total, 1.0, epsilon = 1e-7);
        assert!(r.p_assoc_macro > 0.0 && r.p_assoc_macro < 1.0);
        assert!(r.load_macro > 0.0 && r.load_micro > 0.0);
    }

    #[test]
    fn association_empty_micro_process() {
        let mut cfg = config::baseline();
        cfg.micro_tier.omega = 0.0;
        cfg.micro_tier.lambda_los = 0.0;
        let r = association_probabilities(&cfg, &opts()).unwrap();
        assert_eq!(r.p_assoc_micro, 0.0);
        assert_relative_eq!(r.p_assoc_macro, r.b_macro, epsilon = 1e-10);
    }

    #[test]
    fn association_limit_large_bias() {
        let mut cfg = config::baseline();
        cfg.bias = 1e8;
        let r = association_probabilities(&cfg, &opts()).unwrap();
        let limit = r.b_macro * distance_stats(&cfg.micro_tier).prob_empty;
        assert!((r.p_assoc_macro - limit).abs() < 1e-3);
    }

    #[test]
    fn association_monotone_in_bias() {
        let cfg = config::baseline();
        let mut prev_macro = f64::INFINITY;
        let mut prev_micro = -1.0;
        for &b in &[1.0, 10.0, 100.0, 1e3, 1e4] {
            let c = NetworkConfig { bias: b, ..cfg };
            let r = association_probabilities(&c, &opts()).unwrap();
            assert!(r.p_assoc_macro <= prev_macro + 1e-10);
            assert!(r.p_assoc_micro >= prev_micro - 1e-10);
            prev_macro = r.p_assoc_macro;
            prev_micro = r.p_assoc_micro;
        }
    }

    #[test]
    fn association_overlap_swap_consistency() {
        // the overlap term can be computed from either tier's side; the two
        // routes decompose the same joint event
        let cfg = config::baseline();
        let d_m = distance_stats(&cfg.macro_tier);
        let d_s = distance_stats(&cfg.micro_tier);
        let rho = association_ratio(&cfg);
        let q = QuadratureSpec::default();
        let from_micro = integrate(
            |x| d_s.pdf_unnorm(x) * d_m.cdf_unnorm(x / rho),
            0.0,
            cfg.micro_tier.mu,
            &q,
        )
        .unwrap();
        let from_macro = integrate(
            |x| d_m.pdf_unnorm(x) * (d_s.prob_nonempty - d_s.cdf_unnorm(rho * x)),
            0.0,
            cfg.macro_tier.mu,
            &q,
        )
        .unwrap()
            + d_m.prob_empty * 0.0; // no contribution beyond mu_m
        // from_macro integrates Pr(S4) = B_m B_s - overlap_micro route
        let r = association_probabilities(&cfg, &opts()).unwrap();
        let s4_a = from_micro;
        let s4_b = from_macro;
        assert_relative_eq!(s4_a, s4_b, epsilon = 1e-7);
        let total = r.p_assoc_macro + r.p_assoc_micro + r.scenario1_prob;
        assert_relative_eq!(total, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn omega_kernel_zero_argument() {
        let cfg = config::baseline();
        assert_eq!(omega_kernel(&cfg.macro_tier, 0.0, 100.0, &cfg), 0.0);
    }

    #[test]
    fn omega_kernel_full_beamwidth() {
        let mut cfg = config::baseline();
        cfg.macro_tier.beamwidth = 2.0 * PI;
        let a = 1e-6;
        let r = 150.0;
        let got = omega_kernel(&cfg.macro_tier, a, r, &cfg);
        let t = a * cfg.macro_tier.power * cfg.macro_tier.g_max / r.powf(cfg.alpha);
        let expected = 2.0 * PI * (1.0 - 1.0 / (1.0 + t));
        assert_relative_eq!(got, expected, epsilon = 1e-10);
    }

    #[test]
    fn omega_kernel_baseline_point() {
        // independent arithmetic route: 1 - (1+t)^{-1} = t / (1+t) for shape 1
        let cfg = config::baseline();
        let a = 1e-7;
        let r: f64 = 200.0;
        let ra = r.powf(2.2);
        let t_max = a * 1e4 * 4e3 / ra;
        let t_min = a * 1e4 * 1.0 / ra;
        let expected = 0.1 * (t_max / (1.0 + t_max)) + (2.0 * PI - 0.1) * (t_min / (1.0 + t_min));
        let got = omega_kernel(&cfg.macro_tier, a, r, &cfg);
        assert_relative_eq!(got, expected, epsilon = 1e-12);
    }

    #[test]
    fn omega_kernel_derivative_matches_finite_difference() {
        let mut cfg = config::baseline();
        for shape in [1u32, 3] {
            cfg.fading = crate::model::FadingModel::new(shape).unwrap();
            let a = 3e-7;
            let r = 180.0;
            let h = 1e-12;
            let fd = (omega_kernel(&cfg.macro_tier, a + h, r, &cfg)
                - omega_kernel(&cfg.macro_tier, a - h, r, &cfg))
                / (2.0 * h);
            let got = omega_kernel_derivative(&cfg.macro_tier, 1, a, r, &cfg);
            assert_relative_eq!(got, fd, max_relative = 1e-4);
        }
    }

    #[test]
    fn exponent_noise_only() {
        let mut cfg = config::baseline();
        cfg.macro_tier.lambda_los = 0.0;
        cfg.micro_tier.lambda_los = 0.0;
        let o = opts();
        let g1 = omega_exponent_derivative(&cfg, Scenario::MacroOnly, 1, 0.3, 50.0, &o).unwrap();
        assert_eq!(g1, -cfg.noise);
        let g2 = omega_exponent_derivative(&cfg, Scenario::MacroOnly, 2, 0.3, 50.0, &o).unwrap();
        assert_eq!(g2, 0.0);
        assert!(omega_exponent_derivative(&cfg, Scenario::MacroOnly, 0, 0.3, 50.0, &o).is_err());
    }

    #[test]
    fn exponent_derivative_matches_finite_difference() {
        let cfg = config::baseline();
        let o = opts();
        for scenario in Scenario::ALL {
            let x = 40.0;
            let a = 2e-7;
            let h = a * 1e-4;
            let gp = omega_exponent(&cfg, scenario, a + h, x, &o).unwrap();
            let gm = omega_exponent(&cfg, scenario, a - h, x, &o).unwrap();
            let fd = (gp - gm) / (2.0 * h);
            let got = omega_exponent_derivative(&cfg, scenario, 1, a, x, &o).unwrap();
            assert_relative_eq!(got, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn laplace_transform_is_completely_monotone() {
        let cfg = config::baseline();
        let mut c = cfg;
        c.fading = crate::model::FadingModel::new(4).unwrap();
        let o = opts();
        for scenario in Scenario::ALL {
            for &x in &[10.0, 60.0] {
                for &a in &[1e-8, 1e-6, 1e-4] {
                    let stack = laplace_derivatives(&c, scenario, a, x, 3, &o).unwrap();
                    assert!(stack.get(0) > 0.0 && stack.get(0) <= 1.0);
                    for k in 0..=3usize {
                        let signed = if k % 2 == 0 { stack.get(k) } else { -stack.get(k) };
                        assert!(signed >= 0.0, "sign violation at k={k}, a={a}, x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn scenario_coverage_at_vanishing_threshold() {
        let cfg = config::baseline();
        let o = opts();
        let d_m = distance_stats(&cfg.macro_tier);
        let d_s = distance_stats(&cfg.micro_tier);
        let r = association_probabilities(&cfg, &o).unwrap();
        let p2 = scenario_coverage(&cfg, &SinrQuery::new(Scenario::MacroOnly, 1e-12).unwrap(), &o).unwrap();
        assert_relative_eq!(p2, d_m.prob_nonempty * d_s.prob_empty, epsilon = 1e-6);
        let p3 = scenario_coverage(&cfg, &SinrQuery::new(Scenario::MicroOnly, 1e-12).unwrap(), &o).unwrap();
        assert_relative_eq!(p3, d_s.prob_nonempty * d_m.prob_empty, epsilon = 1e-6);
        let p4 = scenario_coverage(&cfg, &SinrQuery::new(Scenario::BothMacro, 1e-12).unwrap(), &o).unwrap();
        let p5 = scenario_coverage(&cfg, &SinrQuery::new(Scenario::BothMicro, 1e-12).unwrap(), &o).unwrap();
        // the four limits partition 1 - Pr(no LoS BS at all)
        let total = p2 + p3 + p4 + p5;
        assert_relative_eq!(total, 1.0 - r.scenario1_prob, epsilon = 1e-6);
        // and the two-tier limits are the association overlap probabilities
        assert_relative_eq!(p2 + p4, r.p_assoc_macro, epsilon = 1e-6);
        assert_relative_eq!(p3 + p5, r.p_assoc_micro, epsilon = 1e-6);
    }

    #[test]
    fn scenario_coverage_empty_network() {
        let mut cfg = config::baseline();
        cfg.macro_tier.lambda_los = 0.0;
        cfg.micro_tier.lambda_los = 0.0;
        let o = opts();
        for scenario in Scenario::ALL {
            let p = scenario_coverage(&cfg, &SinrQuery::new(scenario, 1.0).unwrap(), &o).unwrap();
            assert_eq!(p, 0.0);
        }
    }

    #[test]
    fn scenario_coverage_nonincreasing_in_tau() {
        let cfg = config::baseline();
        let o = opts();
        for scenario in Scenario::ALL {
            let mut prev = f64::INFINITY;
            for i in 0..20 {
                // tau from 1e-3 to ~1e3, log spaced
                let tau = 10f64.powf(-3.0 + 6.0 * i as f64 / 19.0);
                let p = scenario_coverage(&cfg, &SinrQuery::new(scenario, tau).unwrap(), &o).unwrap();
                assert!(p <= prev + 1e-8, "{scenario:?} not monotone at tau={tau}");
                prev = p;
            }
        }
    }

    #[test]
    fn general_shape_path_reduces_to_rayleigh() {
        // shape 1 through the general machinery vs a direct hand-specialized
        // path using only the transform value
        let cfg = config::baseline();
        let o = opts();
        for scenario in Scenario::ALL {
            let tau = 1.0;
            let q = SinrQuery::new(scenario, tau).unwrap();
            let psi = q.psi(&cfg);
            let upper = outer_limit(&cfg, scenario);
            let direct = integrate(
                |x| {
                    let a = psi * x.powf(cfg.alpha);
                    let g = omega_exponent(&cfg, scenario, a, x, &o).unwrap();
                    scenario_weight(&cfg, scenario, x) * g.exp()
                },
                0.0,
                upper,
                &o.quad,
            )
            .unwrap();
            let general = scenario_coverage(&cfg, &q, &o).unwrap();
            assert_relative_eq!(general, direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn rate_coverage_baseline() {
        let cfg = config::baseline();
        let o = opts();
        let r = rate_coverage(&cfg, 10f64.powf(6.5), &o).unwrap();
        assert_relative_eq!(r.p_c, r.p2 + r.p3 + r.p4 + r.p5, epsilon = 1e-14);
        assert!(r.p_c > 0.0 && r.p_c < 1.0);
        let rep = association_probabilities(&cfg, &o).unwrap();
        assert!(r.p_c <= 1.0 - rep.scenario1_prob + 1e-9);
        assert!(rate_coverage(&cfg, 0.0, &o).is_err());
    }

    #[test]
    fn rate_coverage_small_delta_limit() {
        let cfg = config::baseline();
        let o = opts();
        let rep = association_probabilities(&cfg, &o).unwrap();
        let r = rate_coverage(&cfg, 1e-3, &o).unwrap();
        assert_relative_eq!(r.p_c, 1.0 - rep.scenario1_prob, epsilon = 1e-5);
    }

    #[test]
    fn exact_exclusion_reduces_interference() {
        // carving out the exclusion disk removes interferers, so coverage
        // cannot decrease
        let cfg = config::baseline();
        let a = AnalysisOptions { exact_exclusion: false, ..Default::default() };
        let b = AnalysisOptions { exact_exclusion: true, ..Default::default() };
        let tau = 1.0;
        for scenario in [Scenario::BothMacro, Scenario::BothMicro] {
            let q = SinrQuery::new(scenario, tau).unwrap();
            let pa = scenario_coverage(&cfg, &q, &a).unwrap();
            let pb = scenario_coverage(&cfg, &q, &b).unwrap();
            assert!(pb >= pa - 1e-9, "{scenario:?}: literal {pa} vs exclusion {pb}");
        }
    }
}
