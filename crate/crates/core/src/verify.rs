//! Ground-truth verification of enforced payoff relations.
//!
//! The discounted payoffs of a memory-one strategy profile are computed two
//! independent ways:
//!
//! * exactly, over the full 2^n action-profile Markov chain via a dense
//!   linear solve of `(I - delta * M)`, and
//! * statistically, by Monte Carlo episodes that stop after each round with
//!   probability `1 - delta` (geometric stopping realizes the same
//!   discounted expectation).
//!
//! State encoding: an action profile is the bitmask with bit `j` set iff
//! player `j` cooperated. Episode randomness comes from a ChaCha8 generator
//! with one counter stream per episode, so runs are reproducible and
//! independent of scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::games::PayoffTable;
use crate::zd::MemoryOneStrategy;
use crate::{Error, Result};

/// Largest n for which the exact 2^n-state solver may be used.
pub const MAX_EXACT_PLAYERS: usize = 16;

/// Identifier of the episode RNG scheme, recorded in outputs.
pub const RNG_ALGORITHM: &str = "chacha8-stream-per-episode";

/// Episodes are processed in fixed-size chunks; partial sums are combined
/// in chunk order so results do not depend on thread scheduling.
const EPISODE_CHUNK: usize = 1024;

/// A full strategy profile; index 0 is the focal player by convention.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub n: usize,
    pub strategies: Vec<MemoryOneStrategy>,
}

impl StrategyProfile {
    /// Builds a profile, checking that every strategy is sized for an
    /// n-player game and that all probabilities are in range.
    pub fn new(strategies: Vec<MemoryOneStrategy>) -> Result<Self> {
        let n = strategies.len();
        if n < 2 {
            return Err(Error::InvalidParameters(format!(
                "a profile needs at least 2 players (got {n})"
            )));
        }
        for (j, strategy) in strategies.iter().enumerate() {
            if strategy.n != n {
                return Err(Error::InvalidParameters(format!(
                    "strategy {j} is sized for n = {} but the profile has {n} players",
                    strategy.n
                )));
            }
            MemoryOneStrategy::new(n, strategy.probs.clone(), strategy.init)
                .map_err(|e| Error::InvalidParameters(format!("strategy {j}: {e}")))?;
        }
        Ok(StrategyProfile { n, strategies })
    }
}

/// How a payoff outcome was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffMethod {
    Exact,
    MonteCarlo,
}

/// Expected discounted payoffs, normalized by `1 - delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffOutcome {
    /// Per-player payoffs; index 0 is the focal player.
    pub pi: Vec<f64>,
    /// Focal player's payoff (`pi[0]`).
    pub pi_focal: f64,
    /// Mean payoff of the co-players.
    pub pi_coplayers_avg: f64,
    pub method: PayoffMethod,
    /// Per-player standard errors (Monte Carlo only).
    pub stderr: Option<Vec<f64>>,
    pub delta: f64,
    /// Episode seed (Monte Carlo only).
    pub seed: Option<u64>,
    /// RNG scheme tag (Monte Carlo only).
    pub rng_algorithm: Option<String>,
}

impl PayoffOutcome {
    fn from_pi(pi: Vec<f64>, method: PayoffMethod, delta: f64) -> Self {
        let pi_focal = pi[0];
        let pi_coplayers_avg = pi[1..].iter().sum::<f64>() / (pi.len() as f64 - 1.0);
        PayoffOutcome {
            pi,
            pi_focal,
            pi_coplayers_avg,
            method,
            stderr: None,
            delta,
            seed: None,
            rng_algorithm: None,
        }
    }
}

/// Signed residual of the linear relation: `pi_coplayers - s*pi_focal - (1-s)*l`.
pub fn relation_residual(outcome: &PayoffOutcome, s: f64, l: f64) -> f64 {
    outcome.pi_coplayers_avg - s * outcome.pi_focal - (1.0 - s) * l
}

fn check_exact_preconditions(profile: &StrategyProfile, table: &PayoffTable, delta: f64) -> Result<()> {
    if profile.n > MAX_EXACT_PLAYERS {
        return Err(Error::StateSpaceTooLarge { n: profile.n });
    }
    if profile.n != table.n {
        return Err(Error::InvalidParameters(format!(
            "profile has {} players but the payoff table is for n = {}",
            profile.n, table.n
        )));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameters(format!("0 < delta < 1 required (got {delta})")));
    }
    Ok(())
}

/// Player `j`'s one-round payoff at action profile `state`.
fn profile_payoff(table: &PayoffTable, state: usize, j: usize) -> f64 {
    let own = (state >> j) & 1 == 1;
    let z = state.count_ones() as usize - own as usize;
    if own {
        table.a[z]
    } else {
        table.b[z]
    }
}

/// Writes the product distribution `prod_j (bit_j ? w[j] : 1 - w[j])` over
/// all bitmasks into `out[0 .. 2^n]`.
fn product_distribution(weights: &[f64], out: &mut [f64]) {
    out[0] = 1.0;
    let mut len = 1;
    for &w in weights {
        for t in 0..len {
            let v = out[t];
            out[t + len] = v * w;
            out[t] = v * (1.0 - w);
        }
        len *= 2;
    }
}

/// Dense solve seam: `x` with `a * x = rhs`.
fn linear_solve(a: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    a.lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericFailure("singular discounted-chain system".into()))
}

/// Exact expected discounted payoffs via the 2^n-state profile chain:
/// `pi_j = (1 - delta) * v0' (I - delta M)^-1 g_j`, where `M` is the
/// one-round transition matrix, `v0` the initial profile distribution and
/// `g_j` player j's per-profile payoff vector.
pub fn exact_discounted_payoffs(
    profile: &StrategyProfile,
    table: &PayoffTable,
    delta: f64,
) -> Result<PayoffOutcome> {
    check_exact_preconditions(profile, table, delta)?;
    let n = profile.n;
    let dim = 1usize << n;

    // System matrix (I - delta M)^T, filled column-by-column: column sigma
    // holds the (negated, scaled) transition row out of profile sigma.
    let mut system = DMatrix::<f64>::zeros(dim, dim);
    let mut coop = vec![0.0; n];
    let mut row = vec![0.0; dim];
    for sigma in 0..dim {
        for (j, strategy) in profile.strategies.iter().enumerate() {
            let own = (sigma >> j) & 1 == 1;
            let z = sigma.count_ones() as usize - own as usize;
            coop[j] = strategy.prob(own, z);
        }
        product_distribution(&coop, &mut row);
        let mut column = system.column_mut(sigma);
        for tau in 0..dim {
            column[tau] = -delta * row[tau];
        }
        column[sigma] += 1.0;
    }

    let inits: Vec<f64> = profile.strategies.iter().map(|s| s.init).collect();
    product_distribution(&inits, &mut row);
    let weights = linear_solve(system, DVector::from_column_slice(&row))?;

    let pi: Vec<f64> = (0..n)
        .map(|j| {
            (1.0 - delta)
                * (0..dim).map(|state| weights[state] * profile_payoff(table, state, j)).sum::<f64>()
        })
        .collect();
    Ok(PayoffOutcome::from_pi(pi, PayoffMethod::Exact, delta))
}

/// One episode with geometric stopping; returns per-player payoff totals.
fn run_episode(
    profile: &StrategyProfile,
    table: &PayoffTable,
    delta: f64,
    rng: &mut ChaCha8Rng,
    actions: &mut Vec<bool>,
    previous: &mut Vec<bool>,
    totals: &mut [f64],
) {
    totals.fill(0.0);
    actions.clear();
    actions.extend(profile.strategies.iter().map(|s| rng.random::<f64>() < s.init));
    loop {
        let coop_total: usize = actions.iter().map(|&a| a as usize).sum();
        for (j, &own) in actions.iter().enumerate() {
            let z = coop_total - own as usize;
            totals[j] += if own { table.a[z] } else { table.b[z] };
        }
        if rng.random::<f64>() >= delta {
            break;
        }
        std::mem::swap(actions, previous);
        actions.clear();
        for (j, strategy) in profile.strategies.iter().enumerate() {
            let own = previous[j];
            let z = previous.iter().map(|&a| a as usize).sum::<usize>() - own as usize;
            actions.push(rng.random::<f64>() < strategy.prob(own, z));
        }
    }
}

/// Monte Carlo estimate of the discounted payoffs.
///
/// Each episode stops after every round with probability `1 - delta`, so
/// `(1 - delta) * E[episode total]` equals the discounted expectation.
/// Episode `e` draws from stream `e` of a ChaCha8 generator seeded with
/// `seed`; results are bit-identical across runs and thread counts.
pub fn simulate_monte_carlo(
    profile: &StrategyProfile,
    table: &PayoffTable,
    delta: f64,
    episodes: usize,
    seed: u64,
) -> Result<PayoffOutcome> {
    if episodes == 0 {
        return Err(Error::InvalidParameters("episodes must be at least 1".into()));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameters(format!("0 < delta < 1 required (got {delta})")));
    }
    if profile.n != table.n {
        return Err(Error::InvalidParameters(format!(
            "profile has {} players but the payoff table is for n = {}",
            profile.n, table.n
        )));
    }
    let n = profile.n;
    let chunk_count = episodes.div_ceil(EPISODE_CHUNK);
    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..chunk_count)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * EPISODE_CHUNK;
            let hi = (lo + EPISODE_CHUNK).min(episodes);
            let mut sum = vec![0.0; n];
            let mut sumsq = vec![0.0; n];
            let mut totals = vec![0.0; n];
            let mut actions = Vec::with_capacity(n);
            let mut previous = vec![false; n];
            for episode in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(episode as u64);
                run_episode(profile, table, delta, &mut rng, &mut actions, &mut previous, &mut totals);
                for j in 0..n {
                    sum[j] += totals[j];
                    sumsq[j] += totals[j] * totals[j];
                }
            }
            (sum, sumsq)
        })
        .collect();

    let mut sum = vec![0.0; n];
    let mut sumsq = vec![0.0; n];
    for (s, sq) in partials {
        for j in 0..n {
            sum[j] += s[j];
            sumsq[j] += sq[j];
        }
    }
    let e = episodes as f64;
    let pi: Vec<f64> = sum.iter().map(|&s| (1.0 - delta) * s / e).collect();
    let stderr: Vec<f64> = (0..n)
        .map(|j| {
            if episodes < 2 {
                return 0.0;
            }
            let mean = sum[j] / e;
            let var = ((sumsq[j] - e * mean * mean) / (e - 1.0)).max(0.0);
            (1.0 - delta) * (var / e).sqrt()
        })
        .collect();
    let mut outcome = PayoffOutcome::from_pi(pi, PayoffMethod::MonteCarlo, delta);
    outcome.stderr = Some(stderr);
    outcome.seed = Some(seed);
    outcome.rng_algorithm = Some(RNG_ALGORITHM.to_string());
    Ok(outcome)
}

/// A uniformly random memory-one strategy: 2n+1 independent draws from
/// [0, 1] (conditional probabilities first, initial probability last).
pub fn random_memory_one(n: usize, seed: u64) -> MemoryOneStrategy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs: Vec<f64> = (0..2 * n).map(|_| rng.random::<f64>()).collect();
    let init = rng.random::<f64>();
    MemoryOneStrategy { n, probs, init }
}
