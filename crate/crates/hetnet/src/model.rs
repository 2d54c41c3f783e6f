//! Physical model of the two-tier network: LoS ball blockage, sectored
//! antennas, Nakagami fading, and the biased nearest-LoS-BS association rule.
//!
//! Everything here is a pure function of immutable value objects, so the
//! whole module is safe to share across threads.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Which of the two tiers a parameter set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Macro,
    Micro,
}

impl Tier {
    pub fn label(self) -> &'static str {
        match self {
            Tier::Macro => "macro",
            Tier::Micro => "micro",
        }
    }
}

/// Per-tier deployment parameters.
///
/// The stored intensity is that of the LoS-thinned process seen by the
/// typical UE inside the ball of radius `mu`; the full-process intensity
/// is derived as `lambda_los / omega`. Storing the thinned value keeps
/// file round-trips exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierParams {
    pub tier: Tier,
    /// LoS BS intensity per m^2 (the omega-thinned process).
    pub lambda_los: f64,
    /// LoS probability inside the ball, in [0, 1].
    pub omega: f64,
    /// LoS ball radius in meters.
    pub mu: f64,
    /// Transmit power in mW.
    pub power: f64,
    /// Main-lobe gain (linear).
    pub g_max: f64,
    /// Side-lobe gain (linear).
    pub g_min: f64,
    /// Main-lobe beamwidth in radians, in (0, 2*pi].
    pub beamwidth: f64,
    /// Spectrum allocated to a BS of this tier, Hz.
    pub spectrum: f64,
}

impl TierParams {
    pub fn new(
        tier: Tier,
        lambda_los: f64,
        omega: f64,
        mu: f64,
        power: f64,
        g_max: f64,
        g_min: f64,
        beamwidth: f64,
        spectrum: f64,
    ) -> Result<Self> {
        let t = tier.label();
        let check = |ok: bool, field: &str, constraint: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(&format!("{t}.{field}"), constraint))
            }
        };
        check(lambda_los.is_finite() && lambda_los >= 0.0, "lambda_los", "lambda_los >= 0")?;
        check((0.0..=1.0).contains(&omega), "omega", "omega in [0, 1]")?;
        check(omega > 0.0 || lambda_los == 0.0, "lambda_los", "lambda_los = 0 when omega = 0")?;
        check(mu.is_finite() && mu > 0.0, "mu", "mu > 0")?;
        check(power.is_finite() && power > 0.0, "power", "power > 0")?;
        check(g_min.is_finite() && g_min > 0.0, "g_min", "g_min > 0")?;
        check(g_max.is_finite() && g_max >= g_min, "g_max", "g_max >= g_min > 0")?;
        check(
            beamwidth.is_finite() && beamwidth > 0.0 && beamwidth <= 2.0 * PI,
            "beamwidth",
            "beamwidth in (0, 2*pi]",
        )?;
        check(spectrum.is_finite() && spectrum > 0.0, "spectrum", "spectrum > 0")?;
        Ok(TierParams {
            tier,
            lambda_los,
            omega,
            mu,
            power,
            g_max,
            g_min,
            beamwidth,
            spectrum,
        })
    }

    /// Intensity of the LoS-thinned process inside the ball.
    pub fn lambda_los(&self) -> f64 {
        self.lambda_los
    }

    /// Intensity of the full BS process (LoS or not), used by the load
    /// computation.
    pub fn lambda_all(&self) -> f64 {
        if self.omega > 0.0 {
            self.lambda_los / self.omega
        } else {
            0.0
        }
    }

    /// Mean number of LoS BSs of this tier visible to the typical UE.
    pub fn mean_los_count(&self) -> f64 {
        self.lambda_los() * PI * self.mu * self.mu
    }
}

/// Nakagami-m fading; the power gain is Gamma(m, 1/m), so its mean is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FadingModel {
    m: u32,
}

impl FadingModel {
    /// The shape is restricted to small integers: the coverage sums and the
    /// derivative recursion both iterate over 0..m.
    pub const MAX_SHAPE: u32 = 8;

    pub fn new(m: u32) -> Result<Self> {
        if (1..=Self::MAX_SHAPE).contains(&m) {
            Ok(FadingModel { m })
        } else {
            Err(Error::invalid("nakagami_m", "integer in 1..=8"))
        }
    }

    pub fn shape(&self) -> u32 {
        self.m
    }
}

/// Full description of the two-tier network plus UE process and channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    pub macro_tier: TierParams,
    pub micro_tier: TierParams,
    /// UE intensity per m^2.
    pub lambda_u: f64,
    /// Micro-tier association bias, >= 1.
    pub bias: f64,
    /// Path-loss exponent, > 2.
    pub alpha: f64,
    /// Noise power at the UE (same linear units as received power).
    pub noise: f64,
    pub fading: FadingModel,
}

impl NetworkConfig {
    pub fn new(
        macro_tier: TierParams,
        micro_tier: TierParams,
        lambda_u: f64,
        bias: f64,
        alpha: f64,
        noise: f64,
        fading: FadingModel,
    ) -> Result<Self> {
        if !(lambda_u.is_finite() && lambda_u > 0.0) {
            return Err(Error::invalid("lambda_u", "lambda_u > 0"));
        }
        if !(bias.is_finite() && bias >= 1.0) {
            return Err(Error::invalid("bias", "A_s >= 1"));
        }
        if !(alpha.is_finite() && alpha > 2.0) {
            return Err(Error::invalid("alpha", "alpha > 2"));
        }
        if !(noise.is_finite() && noise > 0.0) {
            return Err(Error::invalid("noise", "noise > 0"));
        }
        Ok(NetworkConfig {
            macro_tier,
            micro_tier,
            lambda_u,
            bias,
            alpha,
            noise,
            fading,
        })
    }

    pub fn tier(&self, tier: Tier) -> &TierParams {
        match tier {
            Tier::Macro => &self.macro_tier,
            Tier::Micro => &self.micro_tier,
        }
    }
}

/// Probability that a link of length `r` to a tier-`tier` BS is LoS.
pub fn los_probability(r: f64, tier: &TierParams) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("los_probability: r must be >= 0, got {r}")));
    }
    if r > 0.0 && r < tier.mu {
        Ok(tier.omega)
    } else {
        Ok(0.0)
    }
}

/// Sectored antenna gain at angle `theta` off boresight. The main lobe
/// boundary is inclusive.
pub fn antenna_gain(theta: f64, tier: &TierParams) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::Domain("antenna_gain: theta must be finite".into()));
    }
    // normalize to (-pi, pi]
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t.abs() <= tier.beamwidth / 2.0 {
        Ok(tier.g_max)
    } else {
        Ok(tier.g_min)
    }
}

/// CDF of the Nakagami power gain: 1 - e^{-mx} * sum_{k<m} (mx)^k / k!.
pub fn fading_cdf(x: f64, fading: FadingModel) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain(format!("fading_cdf: x must be >= 0, got {x}")));
    }
    let m = fading.shape() as f64;
    let mx = m * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..fading.shape() {
        term *= mx / k as f64;
        sum += term;
    }
    Ok(1.0 - (-mx).exp() * sum)
}

/// MGF of the Nakagami power gain: (1 - s/m)^{-m}, valid for s < m.
pub fn fading_mgf(s: f64, fading: FadingModel) -> Result<f64> {
    let m = fading.shape() as f64;
    if !(s.is_finite() && s < m) {
        return Err(Error::Domain(format!("fading_mgf: requires s < m = {m}, got {s}")));
    }
    Ok((1.0 - s / m).powi(-(fading.shape() as i32)))
}

/// Distance-ratio association threshold rho: the UE picks the macro tier
/// when the nearest LoS micro BS is farther than rho times the nearest LoS
/// macro BS.
pub fn association_ratio(cfg: &NetworkConfig) -> f64 {
    let num = cfg.macro_tier.power * cfg.macro_tier.g_max;
    let den = cfg.bias * cfg.micro_tier.power * cfg.micro_tier.g_max;
    (num / den).powf(-1.0 / cfg.alpha)
}

/// Nearest-LoS-BS distance statistics for one tier, conditioned on the
/// tier's LoS process being nonempty.
///
/// `prob_empty` is kept alongside `prob_nonempty` because the macro-tier
/// occupancy is often within 1e-14 of 1; `1 - prob_nonempty` would lose
/// every significant digit.
#[derive(Debug, Clone, Copy)]
pub struct DistanceStats {
    pub tier: Tier,
    /// Pr(LoS process nonempty), the B term of the load analysis.
    pub prob_nonempty: f64,
    /// Pr(LoS process empty) = e^{-lambda_los * pi * mu^2}, computed directly.
    pub prob_empty: f64,
    lambda_los: f64,
    mu: f64,
}

impl DistanceStats {
    /// Conditional CDF of the nearest-BS distance. Saturates at 1 past mu.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.prob_nonempty == 0.0 {
            // degenerate: conditioning event has probability zero
            return if x >= self.mu { 1.0 } else { 0.0 };
        }
        self.cdf_unnorm(x) / self.prob_nonempty
    }

    /// Conditional PDF of the nearest-BS distance; zero outside [0, mu].
    pub fn pdf(&self, x: f64) -> f64 {
        if self.prob_nonempty == 0.0 {
            return 0.0;
        }
        self.pdf_unnorm(x) / self.prob_nonempty
    }

    /// B * CDF(x) = 1 - e^{-lambda*pi*min(x,mu)^2}; numerically stable form
    /// used by the association integrals.
    pub fn cdf_unnorm(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let y = x.min(self.mu);
        -(-self.lambda_los * PI * y * y).exp_m1()
    }

    /// B * PDF(x) = 2*lambda*pi*x*e^{-lambda*pi*x^2} on [0, mu].
    pub fn pdf_unnorm(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.mu {
            return 0.0;
        }
        let l = self.lambda_los * PI;
        2.0 * l * x * (-l * x * x).exp()
    }
}

/// Build the nearest-distance statistics for a tier.
pub fn distance_stats(tier: &TierParams) -> DistanceStats {
    let exponent = tier.mean_los_count();
    let prob_empty = (-exponent).exp();
    let prob_nonempty = -(-exponent).exp_m1();
    DistanceStats {
        tier: tier.tier,
        prob_nonempty,
        prob_empty,
        lambda_los: tier.lambda_los(),
        mu: tier.mu,
    }
}

/// Received power P * G(theta) * r^{-alpha} * hbar.
pub fn received_power(
    tier: &TierParams,
    r: f64,
    theta: f64,
    hbar: f64,
    alpha: f64,
) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("received_power: r must be > 0, got {r}")));
    }
    if !(hbar.is_finite() && hbar >= 0.0) {
        return Err(Error::Domain(format!("received_power: hbar must be >= 0, got {hbar}")));
    }
    Ok(tier.power * antenna_gain(theta, tier)? * r.powf(-alpha) * hbar)
}
