//! `zdt` — construct, sweep, and verify zero-determinant strategies for
//! threshold public goods and snowdrift games.
//!
//! Exit codes are a stable contract for scripting:
//! 0 success, 1 internal failure or solver limits, 2 invalid input,
//! 3 infeasible request, 4 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

mod commands;
mod config;

#[derive(Parser)]
#[command(
    name = "zdt",
    version,
    about = "Zero-determinant strategies for threshold public goods and snowdrift games",
    after_help = "Exit codes: 0 success, 1 internal/limits, 2 invalid input, \
                  3 infeasible request, 4 verification failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the payoff table and check the social-dilemma conditions.
    Check(CheckCmd),
    /// Sweep feasible-slope regions over a parameter grid (CSV/JSON).
    Region(RegionCmd),
    /// Construct a ZD memory-one strategy and write it as JSON.
    Construct(ConstructCmd),
    /// Verify the enforced payoff relation against memory-one opponents.
    Verify(VerifyCmd),
    /// Monte Carlo payoff estimation with geometric stopping.
    Simulate(SimulateCmd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Pgg,
    Sdg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassArg {
    Generous,
    Extortionate,
    Equalizer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetArg {
    /// Generous regions of the 8-player public goods game.
    Fig1Left,
    /// Extortionate regions of the 8-player public goods game.
    Fig1Right,
    /// Generous regions of the 8-player snowdrift game.
    Fig2Left,
    /// Extortionate regions of the 8-player snowdrift game.
    Fig2Right,
}

/// Game parameters shared by every command. `r` applies to the public
/// goods game, `b` to the snowdrift game; `c` defaults to 1.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default)]
pub struct GameOpts {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Number of players.
    #[arg(long)]
    pub n: Option<usize>,
    /// Cooperator threshold, 1 < m < n.
    #[arg(long)]
    pub m: Option<usize>,
    /// Public goods multiplier (PGG), 1 < r < n.
    #[arg(long)]
    pub r: Option<f64>,
    /// Benefit (SDG), b > c.
    #[arg(long)]
    pub b: Option<f64>,
    /// Contribution cost (PGG) or total clearing cost (SDG).
    #[arg(long)]
    pub c: Option<f64>,
}

impl GameOpts {
    fn or(self, fallback: Self) -> Self {
        GameOpts {
            family: self.family.or(fallback.family),
            n: self.n.or(fallback.n),
            m: self.m.or(fallback.m),
            r: self.r.or(fallback.r),
            b: self.b.or(fallback.b),
            c: self.c.or(fallback.c),
        }
    }

    fn is_empty(&self) -> bool {
        self.family.is_none()
            && self.n.is_none()
            && self.m.is_none()
            && self.r.is_none()
            && self.b.is_none()
            && self.c.is_none()
    }
}

#[derive(Args)]
pub struct CheckCmd {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub game: GameOpts,
}

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default)]
pub struct RegionOpts {
    #[serde(flatten)]
    #[command(flatten)]
    pub game: GameOpts,
    /// Strategy class for the sweep (generous or extortionate).
    #[arg(long, value_enum)]
    pub class: Option<ClassArg>,
    /// Named sweep preset; pins n = 8, the family, class, and axes.
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[arg(long)]
    pub axis_min: Option<f64>,
    #[arg(long)]
    pub axis_max: Option<f64>,
    #[arg(long)]
    pub axis_step: Option<f64>,
    /// Smallest threshold in the sweep (default 2).
    #[arg(long)]
    pub m_min: Option<usize>,
    /// Largest threshold in the sweep (default n-1).
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output path (default region.csv / region.json).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RegionOpts {
    fn or(self, fallback: Self) -> Self {
        RegionOpts {
            game: self.game.or(fallback.game),
            class: self.class.or(fallback.class),
            preset: self.preset.or(fallback.preset),
            axis_min: self.axis_min.or(fallback.axis_min),
            axis_max: self.axis_max.or(fallback.axis_max),
            axis_step: self.axis_step.or(fallback.axis_step),
            m_min: self.m_min.or(fallback.m_min),
            m_max: self.m_max.or(fallback.m_max),
            format: self.format.or(fallback.format),
            out: self.out.or(fallback.out),
        }
    }
}

#[derive(Args)]
pub struct RegionCmd {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub opts: RegionOpts,
}

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default)]
pub struct ConstructOpts {
    #[serde(flatten)]
    #[command(flatten)]
    pub game: GameOpts,
    /// Class preset resolving the baseline payoff l.
    #[arg(long, value_enum)]
    pub class: Option<ClassArg>,
    /// Slope of the enforced relation.
    #[arg(long)]
    pub s: Option<f64>,
    /// Baseline payoff (overrides the class preset).
    #[arg(long)]
    pub l: Option<f64>,
    /// Discount factor (default 0.999).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Scaling factor (default: midpoint of the feasible interval).
    #[arg(long)]
    pub phi: Option<f64>,
    /// Initial cooperation probability (default per class).
    #[arg(long)]
    pub p0: Option<f64>,
}

impl ConstructOpts {
    fn or(self, fallback: Self) -> Self {
        ConstructOpts {
            game: self.game.or(fallback.game),
            class: self.class.or(fallback.class),
            s: self.s.or(fallback.s),
            l: self.l.or(fallback.l),
            delta: self.delta.or(fallback.delta),
            phi: self.phi.or(fallback.phi),
            p0: self.p0.or(fallback.p0),
        }
    }
}

#[derive(Args)]
pub struct ConstructCmd {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub opts: ConstructOpts,
    /// Output path for the strategy artifact (default strategy.json).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Shape of the `construct` config file: the shared options plus `out`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default)]
pub struct ConstructFileConfig {
    #[serde(flatten)]
    pub opts: ConstructOpts,
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default)]
pub struct VerifyOpts {
    /// Strategy artifact (from `zdt construct`) or bare strategy JSON.
    #[arg(long)]
    pub strategy: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub construct: ConstructOpts,
    /// Number of random opponent profiles (default 100).
    #[arg(long)]
    pub opponents: Option<usize>,
    /// Seed for the random opponents (default 42).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Explicit opponents: JSON array of n-1 memory-one strategies.
    #[arg(long)]
    pub opponents_file: Option<PathBuf>,
    /// Report path (optional).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl VerifyOpts {
    fn or(self, fallback: Self) -> Self {
        VerifyOpts {
            strategy: self.strategy.or(fallback.strategy),
            construct: self.construct.or(fallback.construct),
            opponents: self.opponents.or(fallback.opponents),
            seed: self.seed.or(fallback.seed),
            opponents_file: self.opponents_file.or(fallback.opponents_file),
            out: self.out.or(fallback.out),
        }
    }
}

#[derive(Args)]
pub struct VerifyCmd {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub opts: VerifyOpts,
}

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default)]
pub struct SimulateOpts {
    /// Strategy artifact (from `zdt construct`) or bare strategy JSON.
    #[arg(long)]
    pub strategy: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub construct: ConstructOpts,
    /// Episodes to simulate (default 100000).
    #[arg(long)]
    pub episodes: Option<usize>,
    /// Episode seed (default 7).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seed for the random opponents (default 1).
    #[arg(long)]
    pub opponent_seed: Option<u64>,
    /// Report path (optional).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SimulateOpts {
    fn or(self, fallback: Self) -> Self {
        SimulateOpts {
            strategy: self.strategy.or(fallback.strategy),
            construct: self.construct.or(fallback.construct),
            episodes: self.episodes.or(fallback.episodes),
            seed: self.seed.or(fallback.seed),
            opponent_seed: self.opponent_seed.or(fallback.opponent_seed),
            out: self.out.or(fallback.out),
        }
    }
}

#[derive(Args)]
pub struct SimulateCmd {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub opts: SimulateOpts,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
