//! Resolved run configurations, embedded into every artifact.
//!
//! Each command resolves its inputs with the precedence
//! flags > config file > defaults; the result is one of these structs, and
//! artifacts carry it under a `"config"` key so outputs are reproducible
//! from their own metadata.

use serde::{Deserialize, Serialize};

use zd_thresholds::games::{GameFamily, GameSpec};
use zd_thresholds::zd::ZDClass;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Region(RegionConfig),
    Construct(ConstructConfig),
    Verify(VerifyConfig),
    Simulate(SimulateConfig),
    Check(CheckConfig),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionConfig {
    pub family: GameFamily,
    pub n: usize,
    pub class: ZDClass,
    pub preset: Option<String>,
    pub axis_min: f64,
    pub axis_max: f64,
    pub axis_step: f64,
    pub m_min: usize,
    pub m_max: usize,
    pub format: String,
    pub out: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructConfig {
    pub game: GameSpec,
    /// Requested class preset, if any ("generous", "extortionate",
    /// "equalizer"); explicit (s, l) otherwise.
    pub class: Option<String>,
    pub s: f64,
    pub l: f64,
    pub delta: f64,
    /// Resolved phi (the feasible-interval midpoint unless given).
    pub phi: f64,
    pub p0: f64,
    pub out: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub game: GameSpec,
    pub strategy_file: Option<String>,
    pub s: f64,
    pub l: f64,
    pub delta: f64,
    /// Number of random opponent profiles (ignored when an explicit
    /// opponents file is given).
    pub opponents: usize,
    pub seed: u64,
    pub opponents_file: Option<String>,
    pub tolerance: f64,
    pub out: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub game: GameSpec,
    pub strategy_file: Option<String>,
    pub delta: f64,
    pub episodes: usize,
    pub seed: u64,
    pub opponent_seed: u64,
    /// Present when the strategy artifact carried its (s, l) relation.
    pub s: Option<f64>,
    pub l: Option<f64>,
    pub out: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckConfig {
    pub game: GameSpec,
}
