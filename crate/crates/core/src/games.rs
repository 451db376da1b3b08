//! The two threshold game families and their social-dilemma conditions.
//!
//! Payoffs are indexed by `z`, the number of cooperating co-players
//! (`z = 0..n-1`, ascending). `a[z]` is the payoff of a cooperator and
//! `b[z]` the payoff of a defector when `z` co-players cooperate.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The two supported game families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameFamily {
    /// Threshold public goods game: contributions `c` are multiplied by `r`
    /// and shared by all `n` players once at least `m` players contribute.
    Pgg,
    /// Threshold snowdrift game: a benefit `b` is produced for everyone once
    /// at least `m` players split the total clearing cost `c`.
    Sdg,
}

impl std::fmt::Display for GameFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GameFamily::Pgg => write!(f, "pgg"),
            GameFamily::Sdg => write!(f, "sdg"),
        }
    }
}

/// A concrete game instance.
///
/// Serializes to `{"family": "pgg"|"sdg", "n": .., "m": .., "r"/"b": .., "c": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GameSpec {
    Pgg { n: usize, m: usize, r: f64, c: f64 },
    Sdg { n: usize, m: usize, b: f64, c: f64 },
}

impl GameSpec {
    /// A validated public goods spec.
    pub fn pgg(n: usize, m: usize, r: f64, c: f64) -> Result<Self> {
        let spec = GameSpec::Pgg { n, m, r, c };
        spec.validate()?;
        Ok(spec)
    }

    /// A validated snowdrift spec.
    pub fn sdg(n: usize, m: usize, b: f64, c: f64) -> Result<Self> {
        let spec = GameSpec::Sdg { n, m, b, c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn family(&self) -> GameFamily {
        match self {
            GameSpec::Pgg { .. } => GameFamily::Pgg,
            GameSpec::Sdg { .. } => GameFamily::Sdg,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            GameSpec::Pgg { n, .. } | GameSpec::Sdg { n, .. } => n,
        }
    }

    pub fn m(&self) -> usize {
        match *self {
            GameSpec::Pgg { m, .. } | GameSpec::Sdg { m, .. } => m,
        }
    }

    /// Checks every parameter bound; the first violated bound is named in
    /// the error message.
    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.n(), self.m());
        if n < 2 {
            return Err(Error::InvalidSpec(format!("n must be at least 2 (got n = {n})")));
        }
        if !(1 < m && m < n) {
            return Err(Error::InvalidSpec(format!(
                "m must satisfy 1 < m < n (got m = {m}, n = {n})"
            )));
        }
        match *self {
            GameSpec::Pgg { r, c, .. } => {
                if !(1.0 < r && r < n as f64) {
                    return Err(Error::InvalidSpec(format!(
                        "r must satisfy 1 < r < n (got r = {r}, n = {n})"
                    )));
                }
                if !(c > 0.0) {
                    return Err(Error::InvalidSpec(format!("c > 0 required (got c = {c})")));
                }
            }
            GameSpec::Sdg { b, c, .. } => {
                if !(c > 0.0) {
                    return Err(Error::InvalidSpec(format!("c > 0 required (got c = {c})")));
                }
                if !(b > c) {
                    return Err(Error::InvalidSpec(format!(
                        "b > c required (got b = {b}, c = {c})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Materializes the per-round payoff table for this instance.
    pub fn payoff_table(&self) -> Result<PayoffTable> {
        self.validate()?;
        let n = self.n();
        let m = self.m();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        match *self {
            GameSpec::Pgg { r, c, .. } => {
                let nf = n as f64;
                for z in 0..n {
                    a[z] = if z >= m - 1 { r * c * (z + 1) as f64 / nf - c } else { -c };
                    b[z] = if z >= m { r * c * z as f64 / nf } else { 0.0 };
                }
            }
            GameSpec::Sdg { b: benefit, c, .. } => {
                for z in 0..n {
                    let share = c / (z + 1) as f64;
                    a[z] = if z >= m - 1 { benefit - share } else { -share };
                    b[z] = if z >= m { benefit } else { 0.0 };
                }
            }
        }
        Ok(PayoffTable { n, a, b })
    }
}

/// Per-round payoffs of a symmetric cooperate/defect game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    pub n: usize,
    /// Cooperator payoff `a[z]` with `z` cooperating co-players.
    pub a: Vec<f64>,
    /// Defector payoff `b[z]` with `z` cooperating co-players.
    pub b: Vec<f64>,
}

impl PayoffTable {
    /// Builds a table from raw payoff vectors; both must have length `n >= 2`.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidSpec(format!(
                "payoff vectors must have equal length (got {} and {})",
                a.len(),
                b.len()
            )));
        }
        if a.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "payoff vectors need at least 2 entries (got {})",
                a.len()
            )));
        }
        Ok(PayoffTable { n: a.len(), a, b })
    }

    /// Largest payoff magnitude in the table; used to scale tolerances.
    pub fn max_abs(&self) -> f64 {
        self.a.iter().chain(self.b.iter()).fold(0.0_f64, |acc, &x| acc.max(x.abs()))
    }

    /// Both vectors scaled by `kappa`.
    pub fn scaled(&self, kappa: f64) -> PayoffTable {
        PayoffTable {
            n: self.n,
            a: self.a.iter().map(|x| kappa * x).collect(),
            b: self.b.iter().map(|x| kappa * x).collect(),
        }
    }
}

/// The three social-dilemma conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DilemmaCondition {
    /// (i) `a` and `b` are non-decreasing in z.
    Monotone,
    /// (ii) in any mixed group, defectors earn strictly more: `b[z+1] > a[z]`.
    DefectorAdvantage,
    /// (iii) full cooperation beats full defection: `a[n-1] > b[0]`.
    CooperationFavored,
}

/// Result of checking the social-dilemma conditions on a payoff table.
///
/// The three booleans are true iff `violations` holds no entry for the
/// corresponding condition. For condition (iii), which has no z index, the
/// violation is reported at z = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub monotone: bool,
    pub defector_advantage: bool,
    pub cooperation_favored: bool,
    pub violations: Vec<(DilemmaCondition, usize)>,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.monotone && self.defector_advantage && self.cooperation_favored
    }
}

/// Exhaustively checks the social-dilemma conditions over all valid z.
pub fn check_social_dilemma(table: &PayoffTable) -> AssumptionReport {
    let n = table.n;
    let mut violations = Vec::new();
    for z in 0..n - 1 {
        if !(table.a[z + 1] >= table.a[z] && table.b[z + 1] >= table.b[z]) {
            violations.push((DilemmaCondition::Monotone, z));
        }
    }
    for z in 0..n - 1 {
        if !(table.b[z + 1] > table.a[z]) {
            violations.push((DilemmaCondition::DefectorAdvantage, z));
        }
    }
    if !(table.a[n - 1] > table.b[0]) {
        violations.push((DilemmaCondition::CooperationFavored, 0));
    }
    AssumptionReport {
        monotone: !violations.iter().any(|(c, _)| *c == DilemmaCondition::Monotone),
        defector_advantage: !violations
            .iter()
            .any(|(c, _)| *c == DilemmaCondition::DefectorAdvantage),
        cooperation_favored: !violations
            .iter()
            .any(|(c, _)| *c == DilemmaCondition::CooperationFavored),
        violations,
    }
}
