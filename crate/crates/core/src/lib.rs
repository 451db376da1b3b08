//! Zero-determinant (ZD) memory-one strategies for finitely repeated
//! n-player threshold games.
//!
//! Two game families are covered: the threshold public goods game, where
//! pooled contributions are multiplied and shared only if at least `m`
//! players contribute, and the threshold snowdrift game, where a shared
//! benefit is produced only if at least `m` players split the clearing
//! cost. For both, this crate
//!
//! * materializes per-round payoff tables and checks the social-dilemma
//!   conditions ([`games`]),
//! * decides which linear payoff relations `pi_coplayers = s * pi_focal +
//!   (1 - s) * l` are enforceable and constructs the memory-one strategies
//!   that enforce them ([`zd`]),
//! * computes closed-form feasible-slope regions for generous and
//!   extortionate strategies, cross-checked by a bisection oracle that uses
//!   only the baseline-payoff inequalities ([`regions`]),
//! * and verifies enforcement against arbitrary memory-one opponents, both
//!   exactly via a discounted Markov-chain solve and statistically via
//!   Monte Carlo with geometric stopping ([`verify`]).
//!
//! All operations are pure functions over immutable values and are safe to
//! call from multiple threads.

pub mod games;
pub mod regions;
pub mod verify;
pub mod zd;

mod error;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
