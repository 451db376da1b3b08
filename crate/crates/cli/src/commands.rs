//! Command implementations and the exit-code mapping.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use zd_thresholds::games::{check_social_dilemma, GameFamily, GameSpec, PayoffTable};
use zd_thresholds::regions::{linear_grid, region_sweep, SweepSpec};
use zd_thresholds::verify::{
    exact_discounted_payoffs, random_memory_one, relation_residual, simulate_monte_carlo,
    PayoffOutcome, StrategyProfile, MAX_EXACT_PLAYERS,
};
use zd_thresholds::zd::{
    construct_zd, enforceable, feasible_phi_interval, l_bounds, MemoryOneStrategy, PhiInterval,
    ZDClass, ZDParameters,
};
use zd_thresholds::Error;

use crate::config::{
    CheckConfig, ConstructConfig, RegionConfig, RunConfig, SimulateConfig, VerifyConfig,
};
use crate::{
    CheckCmd, ClassArg, Command, ConstructCmd, ConstructOpts, FamilyArg, FormatArg, GameOpts,
    PresetArg, RegionCmd, SimulateCmd, VerifyCmd,
};

/// Residual threshold for a passing verification.
const VERIFY_TOLERANCE: f64 = 1e-8;

pub enum CliError {
    /// Exit 1: internal failures and solver limits.
    Internal(String),
    /// Exit 2: invalid input (flags, config files, specs, parameters).
    Invalid(String),
    /// Exit 3: structurally infeasible requests.
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Internal(msg) | CliError::Invalid(msg) | CliError::Infeasible(msg) => {
                write!(f, "{msg}")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidSpec(_) | Error::InvalidParameters(_) | Error::SlopeAtOne(_) => {
                CliError::Invalid(err.to_string())
            }
            Error::SlopeOutOfRange { .. }
            | Error::InfeasibleParameters(_)
            | Error::NotEnforceable { .. }
            | Error::NoFeasibleSlope => CliError::Infeasible(err.to_string()),
            Error::StateSpaceTooLarge { .. } | Error::NumericFailure(_) => {
                CliError::Internal(err.to_string())
            }
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult<u8> {
    match command {
        Command::Check(cmd) => run_check(cmd),
        Command::Region(cmd) => run_region(cmd),
        Command::Construct(cmd) => run_construct(cmd),
        Command::Verify(cmd) => run_verify(cmd),
        Command::Simulate(cmd) => run_simulate(cmd),
    }
}

// ---------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------

fn load_config_file<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("invalid config {}: {e}", path.display())))
}

/// Atomic write: temp file in the target directory, then rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Internal(format!("cannot create temp file in {}: {e}", dir.display())))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::Internal(format!("cannot persist {}: {e}", path.display())))?;
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))
}

fn resolve_game(opts: &GameOpts) -> CliResult<GameSpec> {
    let family = opts
        .family
        .ok_or_else(|| CliError::Invalid("--family is required (pgg or sdg)".into()))?;
    let n = opts.n.ok_or_else(|| CliError::Invalid("--n is required".into()))?;
    let m = opts.m.ok_or_else(|| CliError::Invalid("--m is required".into()))?;
    let c = opts.c.unwrap_or(1.0);
    let spec = match family {
        FamilyArg::Pgg => {
            let r = opts
                .r
                .ok_or_else(|| CliError::Invalid("--r is required for the public goods game".into()))?;
            GameSpec::Pgg { n, m, r, c }
        }
        FamilyArg::Sdg => {
            let b = opts
                .b
                .ok_or_else(|| CliError::Invalid("--b is required for the snowdrift game".into()))?;
            GameSpec::Sdg { n, m, b, c }
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn class_name(class: ClassArg) -> &'static str {
    match class {
        ClassArg::Generous => "generous",
        ClassArg::Extortionate => "extortionate",
        ClassArg::Equalizer => "equalizer",
    }
}

// ---------------------------------------------------------------------
// check
// ---------------------------------------------------------------------

fn run_check(cmd: CheckCmd) -> CliResult<u8> {
    let opts = match &cmd.config {
        Some(path) => cmd.game.clone().or(load_config_file::<GameOpts>(path)?),
        None => cmd.game,
    };
    let game = resolve_game(&opts)?;
    let table = game.payoff_table()?;
    let report = check_social_dilemma(&table);

    let config = RunConfig::Check(CheckConfig { game });
    println!("config: {}", serde_json::to_string(&config).unwrap());
    println!("z:  {}", (0..table.n).map(|z| format!("{z:>10}")).collect::<String>());
    println!("a:  {}", table.a.iter().map(|x| format!("{x:>10.4}")).collect::<String>());
    println!("b:  {}", table.b.iter().map(|x| format!("{x:>10.4}")).collect::<String>());
    let mark = |ok: bool| if ok { "ok" } else { "VIOLATED" };
    println!("monotone payoffs:      {}", mark(report.monotone));
    println!("defector advantage:    {}", mark(report.defector_advantage));
    println!("cooperation favored:   {}", mark(report.cooperation_favored));
    if report.all_hold() {
        println!("all social-dilemma conditions hold");
        Ok(0)
    } else {
        println!("violations: {:?}", report.violations);
        Ok(4)
    }
}

// ---------------------------------------------------------------------
// region
// ---------------------------------------------------------------------

fn preset_region(preset: PresetArg) -> (GameFamily, ZDClass) {
    match preset {
        PresetArg::Fig1Left => (GameFamily::Pgg, ZDClass::Generous),
        PresetArg::Fig1Right => (GameFamily::Pgg, ZDClass::Extortionate),
        PresetArg::Fig2Left => (GameFamily::Sdg, ZDClass::Generous),
        PresetArg::Fig2Right => (GameFamily::Sdg, ZDClass::Extortionate),
    }
}

fn default_axis_max(family: GameFamily, n: usize) -> f64 {
    match family {
        GameFamily::Pgg => n as f64 - 0.01,
        GameFamily::Sdg => 10.0,
    }
}

fn run_region(cmd: RegionCmd) -> CliResult<u8> {
    let opts = match &cmd.config {
        Some(path) => cmd.opts.clone().or(load_config_file(path)?),
        None => cmd.opts,
    };

    let (family, class) = if let Some(preset) = opts.preset {
        preset_region(preset)
    } else {
        let family = match opts.game.family {
            Some(FamilyArg::Pgg) => GameFamily::Pgg,
            Some(FamilyArg::Sdg) => GameFamily::Sdg,
            None => return Err(CliError::Invalid("--family or --preset is required".into())),
        };
        let class = match opts.class {
            Some(ClassArg::Generous) => ZDClass::Generous,
            Some(ClassArg::Extortionate) => ZDClass::Extortionate,
            Some(ClassArg::Equalizer) => {
                return Err(CliError::Infeasible(
                    "not enforceable: no equalizer region exists for threshold games".into(),
                ))
            }
            None => return Err(CliError::Invalid("--class is required (generous or extortionate)".into())),
        };
        (family, class)
    };
    let n = if opts.preset.is_some() { 8 } else { opts.game.n.unwrap_or(8) };
    if n < 3 {
        return Err(CliError::Invalid(format!("n must be at least 3 for a sweep (got {n})")));
    }

    let axis_min = opts.axis_min.unwrap_or(1.01);
    let axis_max = opts.axis_max.unwrap_or_else(|| default_axis_max(family, n));
    let axis_step = opts.axis_step.unwrap_or(0.01);
    if !(axis_step > 0.0) || axis_max < axis_min {
        return Err(CliError::Invalid(format!(
            "axis grid must satisfy axis_min <= axis_max and axis_step > 0 \
             (got {axis_min}..{axis_max} step {axis_step})"
        )));
    }
    let (m_min, m_max) = match opts.game.m {
        Some(m) => (m, m),
        None => (opts.m_min.unwrap_or(2), opts.m_max.unwrap_or(n - 1)),
    };
    if m_min > m_max {
        return Err(CliError::Invalid(format!("m_min {m_min} exceeds m_max {m_max}")));
    }

    let format = opts.format.unwrap_or(FormatArg::Csv);
    let out = opts.out.unwrap_or_else(|| {
        PathBuf::from(match format {
            FormatArg::Csv => "region.csv",
            FormatArg::Json => "region.json",
        })
    });

    let config = RunConfig::Region(RegionConfig {
        family,
        n,
        class,
        preset: opts.preset.map(|p| format!("{p:?}")),
        axis_min,
        axis_max,
        axis_step,
        m_min,
        m_max,
        format: match format {
            FormatArg::Csv => "csv".into(),
            FormatArg::Json => "json".into(),
        },
        out: out.display().to_string(),
    });

    let sweep = SweepSpec {
        family,
        n,
        axis_values: linear_grid(axis_min, axis_max, axis_step),
        m_values: (m_min..=m_max).collect(),
        class,
    };
    let grid = region_sweep(&sweep)?;

    let bytes = match format {
        FormatArg::Csv => {
            let mut text = format!("# config: {}\n", serde_json::to_string(&config).unwrap());
            text.push_str(&grid.to_csv());
            text.into_bytes()
        }
        FormatArg::Json => to_pretty_json(&json!({ "config": config, "grid": grid }))?.into_bytes(),
    };
    write_atomic(&out, &bytes)?;
    println!(
        "wrote {} ({} cells); max closed-form vs oracle discrepancy {:.3e}",
        out.display(),
        grid.cells.len(),
        grid.max_discrepancy
    );
    Ok(0)
}

// ---------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------

struct ResolvedConstruction {
    game: GameSpec,
    table: PayoffTable,
    params: ZDParameters,
    class: Option<ClassArg>,
    phi_interval: PhiInterval,
    strategy: MemoryOneStrategy,
}

/// Shared by `construct` and the inline paths of `verify`/`simulate`.
fn resolve_construction(opts: &ConstructOpts) -> CliResult<ResolvedConstruction> {
    let game = resolve_game(&opts.game)?;
    let table = game.payoff_table()?;
    let n = table.n;

    let (s, l) = match opts.class {
        Some(ClassArg::Equalizer) => {
            let bounds = l_bounds(&table, 0.0).expect("slope 0 is valid");
            (0.0, opts.l.unwrap_or(0.5 * (bounds.lower + bounds.upper)))
        }
        Some(class) => {
            let s = opts.s.ok_or_else(|| {
                CliError::Invalid(format!("--s is required with --class {}", class_name(class)))
            })?;
            let preset = match class {
                ClassArg::Generous => table.a[n - 1],
                ClassArg::Extortionate => table.b[0],
                ClassArg::Equalizer => unreachable!(),
            };
            (s, opts.l.unwrap_or(preset))
        }
        None => {
            let s = opts
                .s
                .ok_or_else(|| CliError::Invalid("--s is required (or use --class)".into()))?;
            let l = opts
                .l
                .ok_or_else(|| CliError::Invalid("--l is required when no --class is given".into()))?;
            (s, l)
        }
    };

    if !enforceable(&table, s, l) {
        return Err(CliError::Infeasible(format!(
            "not enforceable: (s, l) = ({s}, {l}) fails the baseline-payoff bounds or the \
             slope range for this game"
        )));
    }

    let delta = opts.delta.unwrap_or(0.999);
    if !(0.0 < delta && delta < 1.0) {
        return Err(CliError::Invalid(format!("0 < delta < 1 required (got {delta})")));
    }

    let p0_candidates: Vec<f64> = match (opts.p0, opts.class) {
        (Some(p0), _) => vec![p0],
        (None, Some(ClassArg::Generous)) => vec![1.0],
        (None, Some(ClassArg::Extortionate)) => vec![0.0],
        _ => vec![1.0, 0.0, 0.5],
    };
    let mut chosen = None;
    for &p0 in &p0_candidates {
        if !(0.0..=1.0).contains(&p0) {
            return Err(CliError::Invalid(format!("p0 must lie in [0, 1] (got {p0})")));
        }
        if let Some(interval) = feasible_phi_interval(&table, s, l, delta, p0) {
            chosen = Some((p0, interval));
            break;
        }
    }
    let Some((p0, phi_interval)) = chosen else {
        return Err(CliError::Infeasible(format!(
            "no feasible phi: no positive scaling realizes (s, l) = ({s}, {l}) at delta = {delta} \
             with p0 in {p0_candidates:?}"
        )));
    };
    let phi = opts.phi.unwrap_or_else(|| phi_interval.midpoint());

    let params = ZDParameters { s, l, phi, delta, p0 };
    let strategy = construct_zd(&table, &params)?;
    Ok(ResolvedConstruction { game, table, params, class: opts.class, phi_interval, strategy })
}

fn run_construct(cmd: ConstructCmd) -> CliResult<u8> {
    let (opts, out) = match &cmd.config {
        Some(path) => {
            let file: crate::ConstructFileConfig = load_config_file(path)?;
            (cmd.opts.clone().or(file.opts), cmd.out.or(file.out))
        }
        None => (cmd.opts, cmd.out),
    };
    let out = out.unwrap_or_else(|| PathBuf::from("strategy.json"));
    let resolved = resolve_construction(&opts)?;

    let config = RunConfig::Construct(ConstructConfig {
        game: resolved.game,
        class: resolved.class.map(|c| class_name(c).to_string()),
        s: resolved.params.s,
        l: resolved.params.l,
        delta: resolved.params.delta,
        phi: resolved.params.phi,
        p0: resolved.params.p0,
        out: out.display().to_string(),
    });
    let artifact = json!({
        "config": config,
        "game": resolved.game,
        "params": resolved.params,
        "phi_interval": resolved.phi_interval,
        "strategy": resolved.strategy,
    });
    write_atomic(&out, to_pretty_json(&artifact)?.as_bytes())?;
    println!(
        "wrote {}: {} ZD strategy, s = {}, l = {}, phi in [{:.6e}, {:.6e}]",
        out.display(),
        resolved.class.map(class_name).unwrap_or("custom"),
        resolved.params.s,
        resolved.params.l,
        resolved.phi_interval.lo,
        resolved.phi_interval.hi
    );
    Ok(0)
}

// ---------------------------------------------------------------------
// strategy loading shared by verify/simulate
// ---------------------------------------------------------------------

#[derive(Deserialize)]
struct StrategyArtifact {
    game: Option<GameSpec>,
    params: Option<ZDParameters>,
    strategy: MemoryOneStrategy,
}

fn load_strategy_artifact(path: &Path) -> CliResult<StrategyArtifact> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read strategy {}: {e}", path.display())))?;
    let artifact = serde_json::from_str::<StrategyArtifact>(&text).or_else(|_| {
        serde_json::from_str::<MemoryOneStrategy>(&text)
            .map(|strategy| StrategyArtifact { game: None, params: None, strategy })
            .map_err(|e| CliError::Invalid(format!("invalid strategy JSON {}: {e}", path.display())))
    })?;
    MemoryOneStrategy::new(
        artifact.strategy.n,
        artifact.strategy.probs.clone(),
        artifact.strategy.init,
    )
    .map_err(|e| CliError::Invalid(format!("strategy in {}: {e}", path.display())))?;
    Ok(artifact)
}

/// The focal strategy plus game/relation metadata, from a file or built
/// inline from construct flags. Flags override artifact metadata.
struct FocalSetup {
    game: GameSpec,
    table: PayoffTable,
    strategy: MemoryOneStrategy,
    params: Option<ZDParameters>,
}

fn resolve_focal(strategy_path: Option<&Path>, construct: &ConstructOpts) -> CliResult<FocalSetup> {
    match strategy_path {
        Some(path) => {
            let artifact = load_strategy_artifact(path)?;
            let game = if !construct.game.is_empty() {
                resolve_game(&construct.game)?
            } else {
                artifact.game.ok_or_else(|| {
                    CliError::Invalid(format!(
                        "{} carries no game spec; pass --family/--n/--m/.. explicitly",
                        path.display()
                    ))
                })?
            };
            let table = game.payoff_table()?;
            if artifact.strategy.n != table.n {
                return Err(CliError::Invalid(format!(
                    "strategy is sized for n = {} but the game has n = {}",
                    artifact.strategy.n, table.n
                )));
            }
            Ok(FocalSetup { game, table, strategy: artifact.strategy, params: artifact.params })
        }
        None => {
            let resolved = resolve_construction(construct)?;
            Ok(FocalSetup {
                game: resolved.game,
                table: resolved.table,
                strategy: resolved.strategy,
                params: Some(resolved.params),
            })
        }
    }
}

fn opponents_from_file(path: &Path, n: usize) -> CliResult<Vec<MemoryOneStrategy>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read opponents {}: {e}", path.display())))?;
    let opponents: Vec<MemoryOneStrategy> = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("invalid opponents JSON {}: {e}", path.display())))?;
    if opponents.len() != n - 1 {
        return Err(CliError::Invalid(format!(
            "expected {} opponents for an n = {n} game, got {}",
            n - 1,
            opponents.len()
        )));
    }
    Ok(opponents)
}

fn random_opponents(n: usize, seed: u64, profile_index: usize) -> Vec<MemoryOneStrategy> {
    (0..n - 1)
        .map(|j| random_memory_one(n, seed.wrapping_add((profile_index * (n - 1) + j) as u64)))
        .collect()
}

// ---------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct VerifySample {
    profile_index: usize,
    pi: Vec<f64>,
    pi_focal: f64,
    pi_coplayers_avg: f64,
    residual: f64,
}

fn run_verify(cmd: VerifyCmd) -> CliResult<u8> {
    let opts = match &cmd.config {
        Some(path) => cmd.opts.clone().or(load_config_file(path)?),
        None => cmd.opts,
    };
    let focal = resolve_focal(opts.strategy.as_deref(), &opts.construct)?;
    let n = focal.table.n;

    let s = opts.construct.s.or(focal.params.map(|p| p.s)).ok_or_else(|| {
        CliError::Invalid("no slope available: pass --s or use a strategy artifact with params".into())
    })?;
    let l = opts.construct.l.or(focal.params.map(|p| p.l)).ok_or_else(|| {
        CliError::Invalid("no baseline available: pass --l or use a strategy artifact with params".into())
    })?;
    let delta = opts.construct.delta.or(focal.params.map(|p| p.delta)).ok_or_else(|| {
        CliError::Invalid("no discount factor available: pass --delta".into())
    })?;
    if !(0.0 < delta && delta < 1.0) {
        return Err(CliError::Invalid(format!("0 < delta < 1 required (got {delta})")));
    }
    if n > MAX_EXACT_PLAYERS {
        return Err(CliError::Internal(format!(
            "state space 2^{n} exceeds the exact-solver limit of 2^16; use `zdt simulate` instead"
        )));
    }

    let opponents = opts.opponents.unwrap_or(100);
    let seed = opts.seed.unwrap_or(42);
    let config = RunConfig::Verify(VerifyConfig {
        game: focal.game,
        strategy_file: opts.strategy.as_ref().map(|p| p.display().to_string()),
        s,
        l,
        delta,
        opponents,
        seed,
        opponents_file: opts.opponents_file.as_ref().map(|p| p.display().to_string()),
        tolerance: VERIFY_TOLERANCE,
        out: opts.out.as_ref().map(|p| p.display().to_string()),
    });

    let profiles: Vec<Vec<MemoryOneStrategy>> = match &opts.opponents_file {
        Some(path) => vec![opponents_from_file(path, n)?],
        None => {
            if opponents == 0 {
                return Err(CliError::Invalid("--opponents must be at least 1".into()));
            }
            (0..opponents).map(|k| random_opponents(n, seed, k)).collect()
        }
    };

    let mut samples = Vec::with_capacity(profiles.len());
    let mut max_abs_residual = 0.0_f64;
    for (profile_index, opponents) in profiles.into_iter().enumerate() {
        let mut strategies = vec![focal.strategy.clone()];
        strategies.extend(opponents);
        let profile =
            StrategyProfile::new(strategies).map_err(|e| CliError::Invalid(e.to_string()))?;
        let outcome = exact_discounted_payoffs(&profile, &focal.table, delta)?;
        let residual = relation_residual(&outcome, s, l);
        max_abs_residual = max_abs_residual.max(residual.abs());
        samples.push(VerifySample {
            profile_index,
            pi: outcome.pi.clone(),
            pi_focal: outcome.pi_focal,
            pi_coplayers_avg: outcome.pi_coplayers_avg,
            residual,
        });
    }

    let pass = max_abs_residual < VERIFY_TOLERANCE;
    if let Some(out) = &opts.out {
        let report = json!({
            "config": config,
            "max_abs_residual": max_abs_residual,
            "pass": pass,
            "samples": samples,
        });
        write_atomic(out, to_pretty_json(&report)?.as_bytes())?;
    }
    println!(
        "verified {} opponent profiles: max |pi_coplayers - s*pi_focal - (1-s)*l| = {max_abs_residual:.3e} ({})",
        samples.len(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 4 })
}

// ---------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------

fn run_simulate(cmd: SimulateCmd) -> CliResult<u8> {
    let opts = match &cmd.config {
        Some(path) => cmd.opts.clone().or(load_config_file(path)?),
        None => cmd.opts,
    };
    let focal = resolve_focal(opts.strategy.as_deref(), &opts.construct)?;
    let n = focal.table.n;

    let episodes = opts.episodes.unwrap_or(100_000);
    if episodes == 0 {
        return Err(CliError::Invalid("--episodes must be at least 1".into()));
    }
    let delta = opts
        .construct
        .delta
        .or(focal.params.map(|p| p.delta))
        .ok_or_else(|| CliError::Invalid("no discount factor available: pass --delta".into()))?;
    if !(0.0 < delta && delta < 1.0) {
        return Err(CliError::Invalid(format!("0 < delta < 1 required (got {delta})")));
    }
    let seed = opts.seed.unwrap_or(7);
    let opponent_seed = opts.opponent_seed.unwrap_or(1);

    let mut strategies = vec![focal.strategy.clone()];
    strategies.extend(random_opponents(n, opponent_seed, 0));
    let profile = StrategyProfile::new(strategies).map_err(|e| CliError::Invalid(e.to_string()))?;

    let outcome = simulate_monte_carlo(&profile, &focal.table, delta, episodes, seed)?;
    let exact: Option<PayoffOutcome> = if n <= MAX_EXACT_PLAYERS {
        Some(exact_discounted_payoffs(&profile, &focal.table, delta)?)
    } else {
        None
    };
    let max_diff_stderr_units = exact.as_ref().map(|ex| {
        let stderr = outcome.stderr.as_ref().unwrap();
        (0..n)
            .map(|j| {
                let diff = (outcome.pi[j] - ex.pi[j]).abs();
                if stderr[j] > 0.0 {
                    diff / stderr[j]
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0_f64, f64::max)
    });

    let relation = focal.params.map(|p| (p.s, p.l));
    let config = RunConfig::Simulate(SimulateConfig {
        game: focal.game,
        strategy_file: opts.strategy.as_ref().map(|p| p.display().to_string()),
        delta,
        episodes,
        seed,
        opponent_seed,
        s: relation.map(|(s, _)| s),
        l: relation.map(|(_, l)| l),
        out: opts.out.as_ref().map(|p| p.display().to_string()),
    });
    let report = json!({
        "config": config,
        "outcome": outcome,
        "exact": exact,
        "residual_monte_carlo": relation.map(|(s, l)| relation_residual(&outcome, s, l)),
        "residual_exact": relation
            .and_then(|(s, l)| exact.as_ref().map(|ex| relation_residual(ex, s, l))),
        "max_abs_diff_in_stderr_units": max_diff_stderr_units,
    });
    if let Some(out) = &opts.out {
        write_atomic(out, to_pretty_json(&report)?.as_bytes())?;
        println!("wrote {}", out.display());
    }
    println!(
        "simulated {episodes} episodes at delta = {delta}: pi_focal = {:.6}, pi_coplayers = {:.6}{}",
        outcome.pi_focal,
        outcome.pi_coplayers_avg,
        match max_diff_stderr_units {
            Some(u) => format!(", max |MC - exact| = {u:.2} standard errors"),
            None => String::new(),
        }
    );
    Ok(0)
}
