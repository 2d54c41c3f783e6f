//! Configuration ingestion: a flat, tier-prefixed TOML schema.
//!
//! The file carries the LoS-thinned intensity (`lambda_los`) per tier; the
//! full-process intensity is derived as `lambda_los / omega` for the load
//! computation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FadingModel, NetworkConfig, Tier, TierParams};

#[derive(Debug, Serialize, Deserialize)]
struct TierFile {
    lambda_los: f64,
    omega: f64,
    mu: f64,
    power: f64,
    g_max: f64,
    g_min: f64,
    beamwidth: f64,
    spectrum: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConfigFile {
    lambda_u: f64,
    bias: f64,
    alpha: f64,
    noise: f64,
    nakagami_m: u32,
    #[serde(rename = "macro")]
    macro_tier: TierFile,
    micro: TierFile,
}

fn tier_from_file(tier: Tier, f: &TierFile) -> Result<TierParams> {
    TierParams::new(
        tier,
        f.lambda_los,
        f.omega,
        f.mu,
        f.power,
        f.g_max,
        f.g_min,
        f.beamwidth,
        f.spectrum,
    )
}

fn tier_to_file(t: &TierParams) -> TierFile {
    TierFile {
        lambda_los: t.lambda_los(),
        omega: t.omega,
        mu: t.mu,
        power: t.power,
        g_max: t.g_max,
        g_min: t.g_min,
        beamwidth: t.beamwidth,
        spectrum: t.spectrum,
    }
}

/// Parse a configuration file into a validated `NetworkConfig`.
pub fn load_config(path: &Path) -> Result<NetworkConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Parse configuration text (TOML, flat tier-prefixed keys).
pub fn parse_config(text: &str) -> Result<NetworkConfig> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| Error::Config(format!("unparseable config: {e}")))?;
    let macro_tier = tier_from_file(Tier::Macro, &file.macro_tier)?;
    let micro_tier = tier_from_file(Tier::Micro, &file.micro)?;
    let fading = FadingModel::new(file.nakagami_m)?;
    NetworkConfig::new(
        macro_tier,
        micro_tier,
        file.lambda_u,
        file.bias,
        file.alpha,
        file.noise,
        fading,
    )
}

/// Serialize a config back to the same schema. Parsing the output yields an
/// identical `NetworkConfig`.
pub fn config_to_string(cfg: &NetworkConfig) -> String {
    let file = ConfigFile {
        lambda_u: cfg.lambda_u,
        bias: cfg.bias,
        alpha: cfg.alpha,
        noise: cfg.noise,
        nakagami_m: cfg.fading.shape(),
        macro_tier: tier_to_file(&cfg.macro_tier),
        micro: tier_to_file(&cfg.micro_tier),
    };
    toml::to_string(&file).expect("config serialization cannot fail")
}

pub fn save_config(cfg: &NetworkConfig, path: &Path) -> Result<()> {
    std::fs::write(path, config_to_string(cfg))?;
    Ok(())
}

/// The bundled default parameter set used throughout the experiments:
/// a 10 W macro tier with a 1 km LoS ball and narrow 0.1 rad beams over a
/// 100 mW micro tier with a 100 m ball, bias 100, path-loss exponent 2.2,
/// Rayleigh fading, unit noise, 1 GHz per tier.
pub fn baseline() -> NetworkConfig {
    let macro_tier = TierParams::new(
        Tier::Macro,
        1e-5,
        0.6,
        1000.0,
        1e4,
        4e3,
        1.0,
        0.1,
        1e9,
    )
    .expect("baseline macro tier is valid");
    let micro_tier = TierParams::new(
        Tier::Micro,
        1e-4,
        0.5,
        100.0,
        1e2,
        1e3,
        1.0,
        0.2,
        1e9,
    )
    .expect("baseline micro tier is valid");
    NetworkConfig::new(
        macro_tier,
        micro_tier,
        1e-1,
        100.0,
        2.2,
        1.0,
        FadingModel::new(1).expect("valid shape"),
    )
    .expect("baseline config is valid")
}
