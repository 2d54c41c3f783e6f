//! Simulation oracle: samples LoS topologies, applies the biased
//! association rule, and measures association frequencies and SINR / rate
//! coverage empirically.
//!
//! Every trial draws from its own counter-based RNG substream keyed by
//! (seed, trial index), so estimates are bit-exact regardless of how rayon
//! partitions the work.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rand_distr::{Distribution, Gamma, Poisson};
use rayon::prelude::*;

use std::f64::consts::PI;

use crate::analysis::{association_probabilities, AnalysisOptions, Scenario, tau_for};
use crate::error::{Error, Result};
use crate::model::{association_ratio, NetworkConfig, Tier, TierParams};

/// One sampled LoS BS as seen from the typical UE.
#[derive(Debug, Clone, Copy)]
pub struct BsSample {
    /// Distance to the UE, meters.
    pub r: f64,
    /// Polar angle of the BS position (unused by any metric, kept for
    /// completeness of the realization record).
    pub position_angle: f64,
    /// Boresight offset of this BS's beam relative to the UE direction.
    pub boresight: f64,
    /// Small-scale fading power gain on the BS-to-UE link.
    pub fading: f64,
}

/// Which BS, if any, serves the typical UE in a realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Association {
    None,
    Macro(usize),
    Micro(usize),
}

/// One sampled topology with fading, beam orientations, and the
/// association decision already applied.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub macro_bs: Vec<BsSample>,
    pub micro_bs: Vec<BsSample>,
    pub association: Association,
}

impl NetworkRealization {
    pub fn scenario(&self) -> Option<Scenario> {
        match (self.macro_bs.is_empty(), self.micro_bs.is_empty(), self.association) {
            (false, true, _) => Some(Scenario::MacroOnly),
            (true, false, _) => Some(Scenario::MicroOnly),
            (false, false, Association::Macro(_)) => Some(Scenario::BothMacro),
            (false, false, Association::Micro(_)) => Some(Scenario::BothMicro),
            _ => None,
        }
    }
}

/// A Bernoulli-frequency estimate with its 95% normal-approximation
/// half-width.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_bernoulli(successes: u64, trials: u64, seed: u64) -> Self {
        let mean = successes as f64 / trials as f64;
        let half_width_95 = 1.96 * (mean * (1.0 - mean) / trials as f64).sqrt();
        McEstimate { mean, half_width_95, trials, seed }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn sample_tier(tier: &TierParams, fading_shape: u32, rng: &mut ChaCha8Rng) -> Vec<BsSample> {
    let mean = tier.mean_los_count();
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive mean").sample(rng) as usize
    } else {
        0
    };
    let m = fading_shape as f64;
    let gamma = Gamma::new(m, 1.0 / m).expect("valid gamma");
    (0..count)
        .map(|_| {
            // uniform in the disk: r = mu * sqrt(U)
            let r = tier.mu * rng.gen::<f64>().sqrt();
            let position_angle = rng.gen::<f64>() * 2.0 * PI;
            let boresight = rng.gen::<f64>() * 2.0 * PI;
            let fading = gamma.sample(rng);
            BsSample { r, position_angle, boresight, fading }
        })
        .collect()
}

fn nearest(bs: &[BsSample]) -> Option<usize> {
    bs.iter()
        .enumerate()
        .min_by(|a, b| a.1.r.total_cmp(&b.1.r))
        .map(|(i, _)| i)
}

/// Draw one realization from the (seed, trial)-keyed substream, including
/// the association decision.
pub fn sample_realization(cfg: &NetworkConfig, seed: u64, trial: u64) -> NetworkRealization {
    let mut rng = trial_rng(seed, trial);
    let macro_bs = sample_tier(&cfg.macro_tier, cfg.fading.shape(), &mut rng);
    let micro_bs = sample_tier(&cfg.micro_tier, cfg.fading.shape(), &mut rng);
    let rho = association_ratio(cfg);
    let association = match (nearest(&macro_bs), nearest(&micro_bs)) {
        (None, None) => Association::None,
        (Some(i), None) => Association::Macro(i),
        (None, Some(j)) => Association::Micro(j),
        (Some(i), Some(j)) => {
            // macro wins when the nearest micro is beyond rho times the
            // nearest macro
            if micro_bs[j].r > rho * macro_bs[i].r {
                Association::Macro(i)
            } else {
                Association::Micro(j)
            }
        }
    };
    NetworkRealization { macro_bs, micro_bs, association }
}

fn gain(tier: &TierParams, boresight: f64) -> f64 {
    // boresight is uniform on [0, 2pi); fold to the off-axis angle
    let off = if boresight > PI { 2.0 * PI - boresight } else { boresight };
    if off <= tier.beamwidth / 2.0 {
        tier.g_max
    } else {
        tier.g_min
    }
}

/// SINR of the serving link in a realization, with the serving BS's beam
/// pointed at the UE and every other LoS BS of both tiers interfering
/// through its random boresight gain.
pub fn sinr(cfg: &NetworkConfig, real: &NetworkRealization) -> Option<(Tier, f64)> {
    let (serving_tier, serving_idx) = match real.association {
        Association::None => return None,
        Association::Macro(i) => (Tier::Macro, i),
        Association::Micro(i) => (Tier::Micro, i),
    };
    let mut interference = 0.0;
    for (tier_id, list) in [(Tier::Macro, &real.macro_bs), (Tier::Micro, &real.micro_bs)] {
        let tier = cfg.tier(tier_id);
        for (idx, bs) in list.iter().enumerate() {
            if tier_id == serving_tier && idx == serving_idx {
                continue;
            }
            interference += tier.power * gain(tier, bs.boresight) * bs.r.powf(-cfg.alpha) * bs.fading;
        }
    }
    let tier = cfg.tier(serving_tier);
    let serving = match serving_tier {
        Tier::Macro => &real.macro_bs[serving_idx],
        Tier::Micro => &real.micro_bs[serving_idx],
    };
    let signal = tier.power * tier.g_max * serving.r.powf(-cfg.alpha) * serving.fading;
    Some((serving_tier, signal / (interference + cfg.noise)))
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(Error::Domain("trials must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Empirical association probabilities (macro, micro) with confidence
/// intervals.
pub fn estimate_association(
    cfg: &NetworkConfig,
    trials: u64,
    seed: u64,
) -> Result<(McEstimate, McEstimate)> {
    check_trials(trials)?;
    let (n_macro, n_micro) = (0..trials)
        .into_par_iter()
        .map(|t| match sample_realization(cfg, seed, t).association {
            Association::Macro(_) => (1u64, 0u64),
            Association::Micro(_) => (0, 1),
            Association::None => (0, 0),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((
        McEstimate::from_bernoulli(n_macro, trials, seed),
        McEstimate::from_bernoulli(n_micro, trials, seed),
    ))
}

/// Empirical SINR coverage of one scenario at threshold tau: the fraction
/// of realizations that fall in the scenario and clear the threshold.
pub fn estimate_scenario_coverage(
    cfg: &NetworkConfig,
    scenario: Scenario,
    tau: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials)?;
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let real = sample_realization(cfg, seed, t);
            if real.scenario() != Some(scenario) {
                return false;
            }
            matches!(sinr(cfg, &real), Some((_, s)) if s > tau)
        })
        .count() as u64;
    Ok(McEstimate::from_bernoulli(successes, trials, seed))
}

/// Empirical rate coverage at rate threshold delta, using the analytical
/// mean loads to map delta to per-tier SINR thresholds (mirroring the
/// analysis, so the two are comparable).
pub fn estimate_rate_coverage(
    cfg: &NetworkConfig,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials)?;
    let report = association_probabilities(cfg, &AnalysisOptions::default())?;
    let tau_macro = tau_for(delta, report.load_macro, cfg.macro_tier.spectrum);
    let tau_micro = tau_for(delta, report.load_micro, cfg.micro_tier.spectrum);
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let real = sample_realization(cfg, seed, t);
            match sinr(cfg, &real) {
                Some((Tier::Macro, s)) => s > tau_macro,
                Some((Tier::Micro, s)) => s > tau_micro,
                None => false,
            }
        })
        .count() as u64;
    Ok(McEstimate::from_bernoulli(successes, trials, seed))
}
