//! Construction of zero-determinant memory-one strategies and the
//! enforceability conditions they must satisfy.
//!
//! A memory-one strategy for an n-player game reacts to the previous
//! round's own action `x` and the number `z` of cooperating co-players.
//! A ZD strategy is one whose conditional cooperation probabilities `p`
//! satisfy, for some scaling `phi > 0`,
//!
//! ```text
//! delta * p = p_rep + phi * (s * g_self - g_coplayers + (1 - s) * l * 1) - (1 - delta) * p0 * 1
//! ```
//!
//! where `p_rep = (1,..,1,0,..,0)` repeats the previous action. Any such
//! strategy with all entries in [0, 1] unilaterally enforces
//! `pi_coplayers = s * pi_focal + (1 - s) * l` in the discounted repeated
//! game, no matter what the co-players do.
//!
//! Vector entries are ordered the same way throughout:
//! `(C, n-1), .., (C, 0), (D, n-1), .., (D, 0)` (own action, then z
//! descending).

use serde::{Deserialize, Serialize};

use crate::games::PayoffTable;
use crate::{Error, Result};

/// Probabilities within this distance outside [0, 1] are clamped; anything
/// farther out is a hard error. Boundary phi choices land exactly on the
/// interval endpoints, where rounding can overshoot by a few ulps.
pub const PROB_CLAMP_TOL: f64 = 1e-12;

/// Lower end of the open slope range for an n-player game: `-1/(n-1)`.
pub fn slope_floor(n: usize) -> f64 {
    -1.0 / (n as f64 - 1.0)
}

/// True iff `s` lies in the open range `(-1/(n-1), 1)`.
pub fn slope_in_range(n: usize, s: f64) -> bool {
    slope_floor(n) < s && s < 1.0
}

/// The two ZD strategy classes with a feasible slope region.
///
/// A generous strategy pins the baseline to the full-cooperation payoff
/// `a[n-1]`; an extortionate one pins it to the full-defection payoff
/// `b[0]`. Fair (`s = 1`) strategies do not exist in finitely repeated
/// games and equalizers (`s = 0`) do not exist in the threshold families,
/// so neither gets a class here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZDClass {
    Generous,
    Extortionate,
}

impl ZDClass {
    /// The Table-defining baseline payoff for this class.
    pub fn baseline_payoff(&self, table: &PayoffTable) -> f64 {
        match self {
            ZDClass::Generous => table.a[table.n - 1],
            ZDClass::Extortionate => table.b[0],
        }
    }

    /// Default initial cooperation probability: a generous player opens
    /// cooperatively, an extortionate one defects. These are also the only
    /// feasible choices, because the class baselines make one constraint
    /// row exactly zero.
    pub fn default_initial_cooperation(&self) -> f64 {
        match self {
            ZDClass::Generous => 1.0,
            ZDClass::Extortionate => 0.0,
        }
    }
}

impl std::fmt::Display for ZDClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZDClass::Generous => write!(f, "generous"),
            ZDClass::Extortionate => write!(f, "extortionate"),
        }
    }
}

/// Parameters of a candidate ZD strategy.
///
/// Serializes with keys `s`, `l`, `phi`, `delta`, `p0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZDParameters {
    /// Slope of the enforced relation, in `(-1/(n-1), 1)`.
    pub s: f64,
    /// Baseline payoff of the enforced relation.
    pub l: f64,
    /// Scaling factor, `phi > 0`.
    pub phi: f64,
    /// Discount factor, `0 < delta < 1`.
    pub delta: f64,
    /// Initial cooperation probability, in [0, 1].
    pub p0: f64,
}

impl ZDParameters {
    /// Checks every invariant against the game size `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !slope_in_range(n, self.s) {
            return Err(Error::SlopeOutOfRange { s: self.s, lo: slope_floor(n), n });
        }
        if !(self.phi > 0.0) {
            return Err(Error::InvalidParameters(format!("phi > 0 required (got {})", self.phi)));
        }
        if !(0.0 < self.delta && self.delta < 1.0) {
            return Err(Error::InvalidParameters(format!(
                "0 < delta < 1 required (got {})",
                self.delta
            )));
        }
        if !(0.0..=1.0).contains(&self.p0) {
            return Err(Error::InvalidParameters(format!(
                "p0 must lie in [0, 1] (got {})",
                self.p0
            )));
        }
        Ok(())
    }
}

/// A memory-one strategy: 2n conditional cooperation probabilities plus an
/// initial one.
///
/// Serializes to `{"n": .., "probs": [2n numbers], "init": ..}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryOneStrategy {
    pub n: usize,
    /// `(p_{C,n-1}, .., p_{C,0}, p_{D,n-1}, .., p_{D,0})`.
    pub probs: Vec<f64>,
    /// Initial cooperation probability.
    pub init: f64,
}

impl MemoryOneStrategy {
    pub fn new(n: usize, probs: Vec<f64>, init: f64) -> Result<Self> {
        if probs.len() != 2 * n {
            return Err(Error::InvalidParameters(format!(
                "expected {} probabilities for n = {n}, got {}",
                2 * n,
                probs.len()
            )));
        }
        let strategy = MemoryOneStrategy { n, probs, init };
        let bad = strategy.out_of_range_entries();
        if !bad.is_empty() {
            return Err(Error::InfeasibleParameters(bad));
        }
        if !(0.0..=1.0).contains(&init) {
            return Err(Error::InvalidParameters(format!(
                "initial probability must lie in [0, 1] (got {init})"
            )));
        }
        Ok(strategy)
    }

    /// Unconditional cooperation.
    pub fn all_cooperate(n: usize) -> Self {
        MemoryOneStrategy { n, probs: vec![1.0; 2 * n], init: 1.0 }
    }

    /// Unconditional defection.
    pub fn all_defect(n: usize) -> Self {
        MemoryOneStrategy { n, probs: vec![0.0; 2 * n], init: 0.0 }
    }

    /// Cooperation probability after own action `cooperated` with `z`
    /// cooperating co-players.
    pub fn prob(&self, cooperated: bool, z: usize) -> f64 {
        debug_assert!(z < self.n);
        let offset = if cooperated { 0 } else { self.n };
        self.probs[offset + self.n - 1 - z]
    }

    fn out_of_range_entries(&self) -> Vec<(usize, f64)> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| !(0.0..=1.0).contains(&p))
            .map(|(k, &p)| (k, p))
            .collect()
    }
}

/// The focal player's own payoff vector `(a_{n-1},..,a_0, b_{n-1},..,b_0)`.
pub fn payoff_vector_self(table: &PayoffTable) -> Vec<f64> {
    let n = table.n;
    let mut g = Vec::with_capacity(2 * n);
    g.extend(table.a.iter().rev());
    g.extend(table.b.iter().rev());
    g
}

/// The co-players' average payoff vector, in the same outcome ordering.
///
/// Given own outcome (C, z) the co-players average
/// `(z*a[z] + (n-z-1)*b[z+1]) / (n-1)`; given (D, z) they average
/// `(z*a[z-1] + (n-z-1)*b[z]) / (n-1)`. Out-of-range payoff symbols only
/// ever appear with coefficient zero and are dropped, never evaluated.
pub fn payoff_vector_coplayers(table: &PayoffTable) -> Vec<f64> {
    let n = table.n;
    let d = n as f64 - 1.0;
    let mut g = Vec::with_capacity(2 * n);
    for z in (0..n).rev() {
        // All co-players cooperate: the average reduces to a[n-1] exactly.
        g.push(if z + 1 < n {
            (z as f64 * table.a[z] + (n - z - 1) as f64 * table.b[z + 1]) / d
        } else {
            table.a[n - 1]
        });
    }
    for z in (0..n).rev() {
        // No co-player cooperates: the average reduces to b[0] exactly.
        g.push(if z > 0 {
            (z as f64 * table.a[z - 1] + (n - z - 1) as f64 * table.b[z]) / d
        } else {
            table.b[0]
        });
    }
    g
}

/// Admissible interval for the baseline payoff `l` at slope `s`, together
/// with the z indices attaining each end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_argz: usize,
    pub upper_argz: usize,
}

/// The z-th lower expression: `b[z] - (z/(n-1)) * (b[z] - a[z-1]) / (1-s)`.
fn lower_expr(table: &PayoffTable, s: f64, z: usize) -> f64 {
    let n = table.n;
    let gap = if z > 0 { table.b[z] - table.a[z - 1] } else { 0.0 };
    table.b[z] - (z as f64 / (n as f64 - 1.0)) * gap / (1.0 - s)
}

/// The z-th upper expression: `a[z] + ((n-z-1)/(n-1)) * (b[z+1] - a[z]) / (1-s)`.
fn upper_expr(table: &PayoffTable, s: f64, z: usize) -> f64 {
    let n = table.n;
    let gap = if z + 1 < n { table.b[z + 1] - table.a[z] } else { 0.0 };
    table.a[z] + ((n - z - 1) as f64 / (n as f64 - 1.0)) * gap / (1.0 - s)
}

/// Exact max/min of the baseline-payoff expressions over `z = 0..n-1`.
///
/// Requires `s < 1`; ties keep the smallest attaining index.
pub fn l_bounds(table: &PayoffTable, s: f64) -> Result<LBounds> {
    if s >= 1.0 {
        return Err(Error::SlopeAtOne(s));
    }
    let mut bounds = LBounds {
        lower: lower_expr(table, s, 0),
        upper: upper_expr(table, s, 0),
        lower_argz: 0,
        upper_argz: 0,
    };
    for z in 1..table.n {
        let lo = lower_expr(table, s, z);
        if lo > bounds.lower {
            bounds.lower = lo;
            bounds.lower_argz = z;
        }
        let up = upper_expr(table, s, z);
        if up < bounds.upper {
            bounds.upper = up;
            bounds.upper_argz = z;
        }
    }
    Ok(bounds)
}

/// True iff some ZD strategy enforces the relation with slope `s` and
/// baseline `l`: the slope must lie in the open legal range and `l` must
/// satisfy `lower <= l <= upper` with at least one comparison strict.
pub fn enforceable(table: &PayoffTable, s: f64, l: f64) -> bool {
    if !slope_in_range(table.n, s) {
        return false;
    }
    let b = l_bounds(table, s).expect("s < 1 inside the slope range");
    b.lower <= l && l <= b.upper && (b.lower < l || l < b.upper)
}

/// Per-entry coefficient of phi in the strategy construction:
/// `s * g_self - g_coplayers + (1-s) * l`, entrywise.
///
/// Computed in the algebraically equivalent margin form
/// `(1-s) * (l - upper_z)` on C rows and `(1-s) * (l - lower_z)` on D rows,
/// so that the class presets `l = a[n-1]` and `l = b[0]` zero out their
/// defining row exactly rather than up to rounding.
fn phi_coefficients(table: &PayoffTable, s: f64, l: f64) -> Vec<f64> {
    let n = table.n;
    let d = n as f64 - 1.0;
    let mut u = Vec::with_capacity(2 * n);
    for z in (0..n).rev() {
        let gap = if z + 1 < n { table.b[z + 1] - table.a[z] } else { 0.0 };
        u.push((1.0 - s) * (l - table.a[z]) - (n - z - 1) as f64 * gap / d);
    }
    for z in (0..n).rev() {
        let gap = if z > 0 { table.b[z] - table.a[z - 1] } else { 0.0 };
        u.push((1.0 - s) * (l - table.b[z]) + z as f64 * gap / d);
    }
    u
}

/// Builds the ZD memory-one strategy for the given parameters.
///
/// Fails with [`Error::SlopeOutOfRange`] if `s` is outside the legal open
/// range, and with [`Error::InfeasibleParameters`] (listing every offending
/// entry) if the resulting probabilities leave [0, 1] by more than
/// [`PROB_CLAMP_TOL`]. Entries inside the tolerance are clamped.
pub fn construct_zd(table: &PayoffTable, params: &ZDParameters) -> Result<MemoryOneStrategy> {
    let n = table.n;
    params.validate(n)?;
    let u = phi_coefficients(table, params.s, params.l);
    let mut probs = Vec::with_capacity(2 * n);
    let mut out_of_range = Vec::new();
    for (k, &u_k) in u.iter().enumerate() {
        let rep = if k < n { 1.0 } else { 0.0 };
        let p = (rep + params.phi * u_k - (1.0 - params.delta) * params.p0) / params.delta;
        if p < -PROB_CLAMP_TOL || p > 1.0 + PROB_CLAMP_TOL {
            out_of_range.push((k, p));
        }
        probs.push(p.clamp(0.0, 1.0));
    }
    if !out_of_range.is_empty() {
        return Err(Error::InfeasibleParameters(out_of_range));
    }
    Ok(MemoryOneStrategy { n, probs, init: params.p0 })
}

/// A closed interval of feasible phi values; `lo == 0` means the interval
/// is open at zero (phi itself must be positive).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiInterval {
    pub lo: f64,
    pub hi: f64,
}

impl PhiInterval {
    /// Midpoint, the default phi choice. Falls back to a finite point when
    /// the interval is unbounded above (only possible for degenerate
    /// all-zero coefficient vectors).
    pub fn midpoint(&self) -> f64 {
        if self.hi.is_finite() {
            0.5 * (self.lo + self.hi)
        } else if self.lo > 0.0 {
            2.0 * self.lo
        } else {
            1.0
        }
    }
}

/// The exact set of `phi > 0` for which [`construct_zd`] succeeds, solved
/// in closed form from the 2n linear-in-phi constraints `0 <= p_k <= 1`.
/// `None` means no positive phi works.
///
/// Expects `s` in the legal slope range, `0 < delta < 1` and `p0` in
/// [0, 1]; anything else yields `None`.
pub fn feasible_phi_interval(
    table: &PayoffTable,
    s: f64,
    l: f64,
    delta: f64,
    p0: f64,
) -> Option<PhiInterval> {
    if !slope_in_range(table.n, s) || !(0.0 < delta && delta < 1.0) || !(0.0..=1.0).contains(&p0) {
        return None;
    }
    let u = phi_coefficients(table, s, l);
    let mut lo = 0.0_f64;
    let mut hi = f64::INFINITY;
    // construct_zd clamps probabilities within PROB_CLAMP_TOL of [0, 1], so
    // the constraints carry the same slack; without it, rounding in
    // 1 - (1 - delta) * p0 spuriously kills boundary rows.
    let slack = delta * PROB_CLAMP_TOL;
    for (k, &u_k) in u.iter().enumerate() {
        let rep = if k < table.n { 1.0 } else { 0.0 };
        // -slack <= rep + phi * u_k - (1 - delta) * p0 <= delta + slack
        let base = rep - (1.0 - delta) * p0;
        if u_k == 0.0 {
            if base < -slack || base > delta + slack {
                return None;
            }
        } else if u_k > 0.0 {
            lo = lo.max(-(base + slack) / u_k);
            hi = hi.min((delta + slack - base) / u_k);
        } else {
            lo = lo.max((delta + slack - base) / u_k);
            hi = hi.min(-(base + slack) / u_k);
        }
    }
    if hi < lo || hi <= 0.0 {
        None
    } else {
        Some(PhiInterval { lo, hi })
    }
}

const MIN_DELTA_RESOLUTION: f64 = 1e-6;

/// Smallest discount factor (up to a 1e-6 bisection grid) at which some
/// initial cooperation probability admits a nonempty phi interval for the
/// enforceable pair `(s, l)`. `p0` is searched over the 11-point grid
/// `{0, 0.1, .., 1}`, which contains the endpoints 0 and 1 that any
/// zero-coefficient constraint row forces.
///
/// Returns `Ok(None)` if even `delta = 1 - 1e-6` admits no phi, and
/// [`Error::NotEnforceable`] if `(s, l)` fails the enforceability
/// conditions to begin with. This is a coarse numeric search, not an
/// analytic characterization.
pub fn min_enforceable_delta(table: &PayoffTable, s: f64, l: f64) -> Result<Option<f64>> {
    if !enforceable(table, s, l) {
        return Err(Error::NotEnforceable { s, l });
    }
    let feasible = |delta: f64| {
        (0..=10)
            .map(|i| i as f64 / 10.0)
            .any(|p0| feasible_phi_interval(table, s, l, delta, p0).is_some())
    };
    let mut hi = 1.0 - MIN_DELTA_RESOLUTION;
    if !feasible(hi) {
        return Ok(None);
    }
    let mut lo = MIN_DELTA_RESOLUTION;
    if feasible(lo) {
        return Ok(Some(lo));
    }
    while hi - lo > MIN_DELTA_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
