use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A game specification violates one of its parameter bounds. The
    /// message names the violated bound.
    #[error("invalid game spec: {0}")]
    InvalidSpec(String),

    /// A strategy parameter (phi, delta, p0) is out of its legal range.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// The baseline-payoff bounds divide by `1 - s`; they are only defined
    /// for slopes strictly below 1.
    #[error("slope s = {0} is not below 1; the baseline-payoff bounds divide by 1 - s")]
    SlopeAtOne(f64),

    /// The slope lies outside the open range `(-1/(n-1), 1)` of relations
    /// enforceable in a finitely repeated n-player game.
    #[error("slope s = {s} outside the enforceable range ({lo}, 1) for n = {n}")]
    SlopeOutOfRange { s: f64, lo: f64, n: usize },

    /// The requested (phi, p0, delta) cannot realize the (s, l) relation:
    /// some conditional cooperation probabilities fall outside [0, 1].
    /// Carries every offending (index, value) pair.
    #[error("parameters yield probabilities outside [0, 1] at {0:?}")]
    InfeasibleParameters(Vec<(usize, f64)>),

    /// The (s, l) pair fails the baseline-payoff inequalities or the slope
    /// range, so no ZD strategy enforces it.
    #[error("(s, l) = ({s}, {l}) is not enforceable for this game")]
    NotEnforceable { s: f64, l: f64 },

    /// No slope in the legal range is enforceable for the given baseline.
    #[error("no feasible slope in the legal range for the given baseline payoff")]
    NoFeasibleSlope,

    /// The exact solver builds the full 2^n action-profile chain; n is
    /// capped so the state space stays at or below 2^16.
    #[error("state space 2^{n} exceeds the exact-solver limit of 2^16; use the Monte Carlo simulator")]
    StateSpaceTooLarge { n: usize },

    /// The dense linear solve failed. Does not occur for delta < 1 on a
    /// well-formed chain; surfaced rather than panicking if it ever does.
    #[error("numeric failure: {0}")]
    NumericFailure(String),
}
