//! Feasible-slope regions for generous and extortionate ZD strategies.
//!
//! For each game family the region of enforceable slopes has a closed-form
//! threshold. Every closed form here is paired with [`numeric_slope_bound`],
//! an independent oracle that bisects on the slope using only the
//! baseline-payoff inequalities from [`crate::zd::l_bounds`]; parameter
//! sweeps evaluate both routes per cell and record the discrepancy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::games::{GameFamily, GameSpec, PayoffTable};
use crate::zd::{enforceable, l_bounds, slope_floor, ZDClass};
use crate::{Error, Result};

/// Bisection tolerance of the numeric oracle.
const BISECTION_TOL: f64 = 1e-10;

/// Margin kept between the bisection bracket and the open range endpoints.
const RANGE_MARGIN: f64 = 1e-9;

/// Interval width (relative to the table scale) below which the admissible
/// baseline interval at the threshold slope counts as degenerate, making
/// the bound strict. Strict thresholds leave an exactly-zero width at the
/// boundary, non-strict ones a width on the order of the payoffs, so the
/// two sides sit several orders of magnitude from this cut.
const STRICT_WIDTH_TOL: f64 = 1e-8;

/// A one-sided feasible-slope region: every slope `s > s_star` (strict) or
/// `s >= s_star` (non-strict) is enforceable for the class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeBound {
    pub s_star: f64,
    /// True means the threshold itself is excluded (`s > s_star`).
    pub strict: bool,
    pub class: ZDClass,
    /// Set when a closed form fell at or below the legal range floor
    /// `-1/(n-1)` and was clamped to it. Cannot happen for valid specs;
    /// kept as a guard for extended parameter experiments.
    pub floored: bool,
}

impl SlopeBound {
    fn new(n: usize, s_star: f64, strict: bool, class: ZDClass) -> Self {
        let floor = slope_floor(n);
        if s_star <= floor {
            SlopeBound { s_star: floor, strict: true, class, floored: true }
        } else {
            SlopeBound { s_star, strict, class, floored: false }
        }
    }
}

/// Generous threshold for the public goods game:
/// `s_star = 1 - (n-m+1) / (r(n-1))`, threshold included.
pub fn pgg_generous_bound(n: usize, m: usize, r: f64) -> Result<SlopeBound> {
    GameSpec::Pgg { n, m, r, c: 1.0 }.validate()?;
    let s_star = 1.0 - (n - m + 1) as f64 / (r * (n as f64 - 1.0));
    Ok(SlopeBound::new(n, s_star, false, ZDClass::Generous))
}

/// Extortionate threshold for the public goods game:
/// the larger of `(m-2)/(n-1)` (excluded) and `1 - n/(r(n-1))` (included).
pub fn pgg_extortionate_bound(n: usize, m: usize, r: f64) -> Result<SlopeBound> {
    GameSpec::Pgg { n, m, r, c: 1.0 }.validate()?;
    let threshold_branch = (m as f64 - 2.0) / (n as f64 - 1.0);
    let multiplier_branch = 1.0 - n as f64 / (r * (n as f64 - 1.0));
    // The threshold branch dominates iff r <= n/(n-m+1). Comparing r against
    // the switch point keeps branch ties exact; comparing the two branch
    // values directly misclassifies representable ties by an ulp.
    let bound = if r <= n as f64 / (n - m + 1) as f64 {
        SlopeBound::new(n, threshold_branch, true, ZDClass::Extortionate)
    } else {
        SlopeBound::new(n, multiplier_branch, false, ZDClass::Extortionate)
    };
    Ok(bound)
}

/// Generous threshold for the snowdrift game:
/// `s_star = 1 - cn(n-m+1) / ((n-1)((bn-c)(m-1) + cn))`, threshold included.
///
/// Only the ratio `b/c` enters, so jointly scaled `(b, c)` give the same
/// bound.
pub fn sdg_generous_bound(n: usize, m: usize, b: f64, c: f64) -> Result<SlopeBound> {
    GameSpec::Sdg { n, m, b, c }.validate()?;
    let (nf, rho) = (n as f64, b / c);
    let s_star =
        1.0 - nf * (n - m + 1) as f64 / ((nf - 1.0) * ((rho * nf - 1.0) * (m as f64 - 1.0) + nf));
    Ok(SlopeBound::new(n, s_star, false, ZDClass::Generous))
}

/// Extortionate threshold for the snowdrift game:
/// `s_star = 1 - c / (b(n-1))`, threshold included and independent of `m`.
pub fn sdg_extortionate_bound(n: usize, m: usize, b: f64, c: f64) -> Result<SlopeBound> {
    GameSpec::Sdg { n, m, b, c }.validate()?;
    let s_star = 1.0 - 1.0 / ((b / c) * (n as f64 - 1.0));
    Ok(SlopeBound::new(n, s_star, false, ZDClass::Extortionate))
}

/// Whether any equalizing strategy (slope 0) exists: true iff the
/// admissible baseline interval at `s = 0` contains a strictly admissible
/// point. False for every valid threshold game of either family.
pub fn equalizer_exists(table: &PayoffTable) -> bool {
    let bounds = l_bounds(table, 0.0).expect("s = 0 is below 1");
    enforceable(table, 0.0, 0.5 * (bounds.lower + bounds.upper))
}

/// Independent oracle: the infimum slope above which `(s, l)` is
/// enforceable, found by bisection over the legal range using only the
/// baseline-payoff inequalities.
///
/// `l` must be the Table preset for `class` (`a[n-1]` for generous, `b[0]`
/// for extortionate); for those baselines enforceability is monotone in the
/// slope. The threshold is strict iff the admissible baseline interval
/// degenerates to the single point `l` at the threshold itself.
pub fn numeric_slope_bound(table: &PayoffTable, class: ZDClass, l: f64) -> Result<SlopeBound> {
    let n = table.n;
    let mut lo = slope_floor(n) + RANGE_MARGIN;
    let mut hi = 1.0 - RANGE_MARGIN;
    if !enforceable(table, hi, l) {
        return Err(Error::NoFeasibleSlope);
    }
    if enforceable(table, lo, l) {
        // Feasible right down to the open floor; report the floor itself.
        return Ok(SlopeBound { s_star: slope_floor(n), strict: true, class, floored: true });
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if enforceable(table, mid, l) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s_star = hi;
    if enforceable(table, s_star - 1e-9, l) || !enforceable(table, s_star + 1e-9, l) {
        return Err(Error::NumericFailure(format!(
            "slope bisection did not bracket a threshold at s = {s_star}"
        )));
    }
    let bounds = l_bounds(table, s_star).expect("s < 1");
    let strict = (bounds.upper - bounds.lower).abs() <= STRICT_WIDTH_TOL * table.max_abs().max(1.0);
    Ok(SlopeBound { s_star, strict, class, floored: false })
}

/// One sweep cell: the closed-form bound next to the oracle bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub m: usize,
    pub axis_value: f64,
    pub s_star: f64,
    pub strict: bool,
    pub floored: bool,
    pub oracle_s_star: f64,
    pub oracle_strict: bool,
    pub discrepancy: f64,
}

/// A parameter sweep request over one game family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: GameFamily,
    pub n: usize,
    /// `r` values for the PGG, `b/c` ratios for the SDG.
    pub axis_values: Vec<f64>,
    pub m_values: Vec<usize>,
    pub class: ZDClass,
}

/// Sweep output: one cell per `(m, axis)` pair, in `m`-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub family: GameFamily,
    pub n: usize,
    pub class: ZDClass,
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub m_values: Vec<usize>,
    pub cells: Vec<RegionCell>,
    /// Largest |closed form - oracle| over all cells.
    pub max_discrepancy: f64,
}

impl RegionGrid {
    /// CSV export; floats carry 12 significant digits with `.` separators.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "family,n,m,axis1_name,axis1_value,class,s_star_closed,strict,s_star_oracle,discrepancy\n",
        );
        for cell in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                self.family,
                self.n,
                cell.m,
                self.axis_name,
                fmt_sig(cell.axis_value),
                self.class,
                fmt_sig(cell.s_star),
                cell.strict,
                fmt_sig(cell.oracle_s_star),
                fmt_sig(cell.discrepancy),
            ));
        }
        out
    }

    pub fn cell(&self, m: usize, axis_index: usize) -> Option<&RegionCell> {
        let row = self.m_values.iter().position(|&mm| mm == m)?;
        self.cells.get(row * self.axis_values.len() + axis_index)
    }
}

/// 12 significant digits, plain decimal exponent notation.
pub(crate) fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.11e}")
    }
}

fn cell_spec(family: GameFamily, n: usize, m: usize, axis: f64) -> GameSpec {
    match family {
        GameFamily::Pgg => GameSpec::Pgg { n, m, r: axis, c: 1.0 },
        GameFamily::Sdg => GameSpec::Sdg { n, m, b: axis, c: 1.0 },
    }
}

fn closed_bound(spec: &GameSpec, class: ZDClass) -> Result<SlopeBound> {
    match (*spec, class) {
        (GameSpec::Pgg { n, m, r, .. }, ZDClass::Generous) => pgg_generous_bound(n, m, r),
        (GameSpec::Pgg { n, m, r, .. }, ZDClass::Extortionate) => pgg_extortionate_bound(n, m, r),
        (GameSpec::Sdg { n, m, b, c }, ZDClass::Generous) => sdg_generous_bound(n, m, b, c),
        (GameSpec::Sdg { n, m, b, c }, ZDClass::Extortionate) => sdg_extortionate_bound(n, m, b, c),
    }
}

/// Evaluates the closed-form bound and the oracle on every grid cell.
/// Cells are independent and evaluated in parallel; the output ordering is
/// fixed by the grid regardless of scheduling.
pub fn region_sweep(sweep: &SweepSpec) -> Result<RegionGrid> {
    let cells: Vec<Result<RegionCell>> = sweep
        .m_values
        .iter()
        .flat_map(|&m| sweep.axis_values.iter().map(move |&axis| (m, axis)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(m, axis)| {
            let spec = cell_spec(sweep.family, sweep.n, m, axis);
            spec.validate().map_err(|e| {
                let reason = match e {
                    Error::InvalidSpec(msg) => msg,
                    other => other.to_string(),
                };
                Error::InvalidSpec(format!(
                    "cell (m = {m}, {} = {axis}): {reason}",
                    axis_name(sweep.family)
                ))
            })?;
            let closed = closed_bound(&spec, sweep.class)?;
            let table = spec.payoff_table()?;
            let l = sweep.class.baseline_payoff(&table);
            let oracle = numeric_slope_bound(&table, sweep.class, l)?;
            Ok(RegionCell {
                m,
                axis_value: axis,
                s_star: closed.s_star,
                strict: closed.strict,
                floored: closed.floored,
                oracle_s_star: oracle.s_star,
                oracle_strict: oracle.strict,
                discrepancy: (closed.s_star - oracle.s_star).abs(),
            })
        })
        .collect();
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;
    let max_discrepancy = cells.iter().map(|c| c.discrepancy).fold(0.0_f64, f64::max);
    Ok(RegionGrid {
        family: sweep.family,
        n: sweep.n,
        class: sweep.class,
        axis_name: axis_name(sweep.family).to_string(),
        axis_values: sweep.axis_values.clone(),
        m_values: sweep.m_values.clone(),
        cells,
        max_discrepancy,
    })
}

fn axis_name(family: GameFamily) -> &'static str {
    match family {
        GameFamily::Pgg => "r",
        GameFamily::Sdg => "b/c",
    }
}

/// Grid `start, start + step, ..` up to and including `end` (with a small
/// absolute tolerance for the endpoint), generated from integer indices so
/// repeated calls are bit-identical.
pub fn linear_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0, "grid step must be positive");
    let mut out = Vec::new();
    for k in 0.. {
        let x = start + k as f64 * step;
        if x > end + 1e-9 {
            break;
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pgg(n: usize, m: usize, r: f64, c: f64) -> PayoffTable {
        GameSpec::pgg(n, m, r, c).unwrap().payoff_table().unwrap()
    }

    fn sdg(n: usize, m: usize, b: f64, c: f64) -> PayoffTable {
        GameSpec::sdg(n, m, b, c).unwrap().payoff_table().unwrap()
    }

    #[test]
    fn pgg_generous_values() {
        let b = pgg_generous_bound(8, 3, 3.0).unwrap();
        assert!((b.s_star - 5.0 / 7.0).abs() < 1e-15);
        assert!(!b.strict);
        // Increasing in m: m = 2 gives 2/3, m = 7 gives 19/21.
        let lo = pgg_generous_bound(8, 2, 3.0).unwrap().s_star;
        let hi = pgg_generous_bound(8, 7, 3.0).unwrap().s_star;
        assert!((lo - 2.0 / 3.0).abs() < 1e-15);
        assert!((hi - 19.0 / 21.0).abs() < 1e-15);
        assert!(lo < hi);
    }

    #[test]
    fn pgg_generous_algebraic_zero() {
        // n - m + 1 = r(n - 1) makes the bound vanish: n = 5, m = 2, r = 1.
        // r = 1 is outside the legal range, so approach it: the bound tends
        // to zero linearly in r - 1.
        let b = pgg_generous_bound(5, 2, 1.0 + 1e-9).unwrap();
        assert!(b.s_star.abs() < 1e-8);
    }

    #[test]
    fn pgg_extortionate_values() {
        let b = pgg_extortionate_bound(8, 3, 3.0).unwrap();
        assert!((b.s_star - 13.0 / 21.0).abs() < 1e-15);
        assert!(!b.strict);

        let b = pgg_extortionate_bound(8, 6, 1.05).unwrap();
        assert!((b.s_star - 4.0 / 7.0).abs() < 1e-15);
        assert!(b.strict);

        // m = 2 zeroes the threshold branch; the bound is max{0+, ..}.
        let b = pgg_extortionate_bound(8, 2, 3.0).unwrap();
        assert!((b.s_star - 13.0 / 21.0).abs() < 1e-15 && !b.strict);
        let b = pgg_extortionate_bound(8, 2, 1.05).unwrap();
        assert_eq!(b.s_star, 0.0);
        assert!(b.strict);
    }

    #[test]
    fn sdg_generous_values() {
        let b = sdg_generous_bound(8, 3, 2.0, 1.0).unwrap();
        assert!((b.s_star - 109.0 / 133.0).abs() < 1e-15);
        assert!(!b.strict);
        assert!(sdg_generous_bound(8, 7, 2.0, 1.0).unwrap().s_star > b.s_star);
        // Joint scaling of (b, c) leaves the bound untouched.
        assert_eq!(sdg_generous_bound(8, 3, 20.0, 10.0).unwrap().s_star, b.s_star);
    }

    #[test]
    fn sdg_extortionate_values() {
        for m in 2..=7 {
            let b = sdg_extortionate_bound(8, m, 2.0, 1.0).unwrap();
            assert!((b.s_star - 13.0 / 14.0).abs() < 1e-15);
            assert!(!b.strict);
        }
        // b -> c from above pushes the bound to (n-2)/(n-1).
        let b = sdg_extortionate_bound(8, 4, 1.0 + 1e-12, 1.0).unwrap();
        assert!((b.s_star - 6.0 / 7.0).abs() < 1e-11);
    }

    #[test]
    fn equalizers_do_not_exist() {
        assert!(!equalizer_exists(&pgg(4, 2, 2.0, 1.0)));
        assert!(!equalizer_exists(&sdg(8, 5, 2.0, 1.0)));
        assert!(!equalizer_exists(&pgg(8, 4, 3.0, 1.0)));
    }

    #[test]
    fn oracle_matches_closed_forms_on_examples() {
        let table = pgg(8, 3, 3.0, 1.0);
        let oracle = numeric_slope_bound(&table, ZDClass::Generous, table.a[7]).unwrap();
        assert!((oracle.s_star - 5.0 / 7.0).abs() < 1e-8);
        assert!(!oracle.strict);

        let table = sdg(8, 5, 2.0, 1.0);
        let oracle = numeric_slope_bound(&table, ZDClass::Extortionate, table.b[0]).unwrap();
        assert!((oracle.s_star - 13.0 / 14.0).abs() < 1e-8);
        assert!(!oracle.strict);

        let table = pgg(8, 6, 1.05, 1.0);
        let oracle = numeric_slope_bound(&table, ZDClass::Extortionate, table.b[0]).unwrap();
        assert!((oracle.s_star - 4.0 / 7.0).abs() < 1e-8);
        assert!(oracle.strict);
    }

    #[test]
    fn single_cell_sweep_degenerates_to_point_evaluation() {
        let sweep = SweepSpec {
            family: GameFamily::Pgg,
            n: 8,
            axis_values: vec![3.0],
            m_values: vec![3],
            class: ZDClass::Generous,
        };
        let grid = region_sweep(&sweep).unwrap();
        assert_eq!(grid.cells.len(), 1);
        let cell = grid.cell(3, 0).unwrap();
        assert_eq!(cell.s_star, pgg_generous_bound(8, 3, 3.0).unwrap().s_star);
        assert!(cell.discrepancy < 1e-8);
        assert_eq!(grid.max_discrepancy, cell.discrepancy);
    }

    #[test]
    fn sweep_rejects_invalid_cells_by_name() {
        let sweep = SweepSpec {
            family: GameFamily::Pgg,
            n: 8,
            axis_values: vec![3.0, 9.0],
            m_values: vec![3],
            class: ZDClass::Generous,
        };
        let err = region_sweep(&sweep).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(ref msg) if msg.contains("r = 9")));
    }

    #[test]
    fn sdg_extortionate_rows_identical_across_m() {
        let sweep = SweepSpec {
            family: GameFamily::Sdg,
            n: 8,
            axis_values: linear_grid(1.25, 9.25, 0.5),
            m_values: (2..=7).collect(),
            class: ZDClass::Extortionate,
        };
        let grid = region_sweep(&sweep).unwrap();
        for (i, axis) in grid.axis_values.iter().enumerate() {
            let first = grid.cell(2, i).unwrap().s_star;
            for m in 3..=7 {
                assert_eq!(grid.cell(m, i).unwrap().s_star, first, "axis {axis}");
            }
        }
    }

    #[test]
    fn csv_schema() {
        let sweep = SweepSpec {
            family: GameFamily::Pgg,
            n: 8,
            axis_values: vec![3.0],
            m_values: vec![3],
            class: ZDClass::Generous,
        };
        let csv = region_sweep(&sweep).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "family,n,m,axis1_name,axis1_value,class,s_star_closed,strict,s_star_oracle,discrepancy"
        );
        let row = lines.next().unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "pgg");
        assert_eq!(fields[2], "3");
        assert_eq!(fields[5], "generous");
        let closed: f64 = fields[6].parse().unwrap();
        assert!((closed - 5.0 / 7.0).abs() < 1e-11);
    }

    #[test]
    fn linear_grid_endpoints() {
        let g = linear_grid(1.05, 2.95, 0.2);
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 1.05);
        assert!((g[9] - 2.85).abs() < 1e-12);
        let g = linear_grid(1.0, 3.0, 0.5);
        assert_eq!(g, vec![1.0, 1.5, 2.0, 2.5, 3.0]);
    }
}
