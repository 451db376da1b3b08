//! Property tests over randomized valid game specs.

use proptest::prelude::*;

use zd_thresholds::games::{check_social_dilemma, GameSpec};
use zd_thresholds::regions::{
    equalizer_exists, numeric_slope_bound, pgg_extortionate_bound, pgg_generous_bound,
    sdg_extortionate_bound, sdg_generous_bound, SlopeBound,
};
use zd_thresholds::verify::{
    exact_discounted_payoffs, random_memory_one, relation_residual, StrategyProfile,
};
use zd_thresholds::zd::{
    construct_zd, enforceable, feasible_phi_interval, l_bounds, payoff_vector_coplayers,
    payoff_vector_self, slope_floor, ZDClass, ZDParameters,
};

fn pgg_spec() -> impl Strategy<Value = GameSpec> {
    (3usize..=10).prop_flat_map(|n| {
        (2usize..n, 1.05..(n as f64 - 0.05), 0.1f64..10.0)
            .prop_map(move |(m, r, c)| GameSpec::Pgg { n, m, r, c })
    })
}

fn sdg_spec() -> impl Strategy<Value = GameSpec> {
    (3usize..=10).prop_flat_map(|n| {
        (2usize..n, 1.05f64..10.0, 0.1f64..10.0)
            .prop_map(move |(m, ratio, c)| GameSpec::Sdg { n, m, b: ratio * c, c })
    })
}

fn any_spec() -> impl Strategy<Value = GameSpec> {
    prop_oneof![pgg_spec(), sdg_spec()]
}

/// Slope inside the legal open range, kept away from the endpoints.
fn legal_slope(n: usize) -> impl Strategy<Value = f64> {
    (0.01f64..0.99).prop_map(move |t| {
        let floor = slope_floor(n);
        floor + t * (1.0 - floor)
    })
}

/// Baseline bounds for the public goods game assembled from the per-case
/// analysis of the inequalities (z < m-1, z = m-1, z >= m), independent of
/// the scan in `l_bounds`.
fn pgg_bounds_reference(n: usize, m: usize, r: f64, c: f64, s: f64) -> (f64, f64) {
    let nf = n as f64;
    let d = (nf - 1.0) * (1.0 - s);
    let lower = (r * c * (nf - 1.0) / nf - c / (1.0 - s)).max(0.0);
    let upper = (-c + (n - m + 1) as f64 * c / d)
        .min(r * c * m as f64 / nf - c + (n - m) as f64 * c / d)
        .min(r * c * (m + 1) as f64 / nf - c + (n - m - 1) as f64 * c / d)
        .min(r * c - c);
    (lower, upper)
}

/// Same for the snowdrift game.
fn sdg_bounds_reference(n: usize, m: usize, b: f64, c: f64, s: f64) -> (f64, f64) {
    let nf = n as f64;
    let mf = m as f64;
    let d = (nf - 1.0) * (1.0 - s);
    let lower = (b - c / d).max(0.0);
    let upper = ((c / (mf - 1.0)) * ((n - m + 1) as f64 / d - 1.0))
        .min(b - c / mf + (n - m) as f64 * c / (mf * d))
        .min(b - c / nf);
    (lower, upper)
}

fn reference_bounds(spec: &GameSpec, s: f64) -> (f64, f64) {
    match *spec {
        GameSpec::Pgg { n, m, r, c } => pgg_bounds_reference(n, m, r, c, s),
        GameSpec::Sdg { n, m, b, c } => sdg_bounds_reference(n, m, b, c, s),
    }
}

fn closed_bound(spec: &GameSpec, class: ZDClass) -> SlopeBound {
    match (*spec, class) {
        (GameSpec::Pgg { n, m, r, .. }, ZDClass::Generous) => pgg_generous_bound(n, m, r),
        (GameSpec::Pgg { n, m, r, .. }, ZDClass::Extortionate) => pgg_extortionate_bound(n, m, r),
        (GameSpec::Sdg { n, m, b, c }, ZDClass::Generous) => sdg_generous_bound(n, m, b, c),
        (GameSpec::Sdg { n, m, b, c }, ZDClass::Extortionate) => sdg_extortionate_bound(n, m, b, c),
    }
    .unwrap()
}

proptest! {
    #[test]
    fn valid_specs_are_social_dilemmas(spec in any_spec()) {
        let table = spec.payoff_table().unwrap();
        let report = check_social_dilemma(&table);
        prop_assert!(report.all_hold(), "violations: {:?}", report.violations);
    }

    #[test]
    fn pgg_payoffs_scale_linearly_in_cost(spec in pgg_spec(), kappa in 0.01f64..100.0) {
        let GameSpec::Pgg { n, m, r, c } = spec else { unreachable!() };
        let base = spec.payoff_table().unwrap();
        let scaled = GameSpec::Pgg { n, m, r, c: kappa * c }.payoff_table().unwrap();
        for z in 0..n {
            prop_assert!((scaled.a[z] - kappa * base.a[z]).abs() <= 1e-12 * (kappa * base.a[z]).abs().max(1e-300));
            prop_assert!((scaled.b[z] - kappa * base.b[z]).abs() <= 1e-12 * (kappa * base.b[z]).abs().max(1e-300));
        }
    }

    #[test]
    fn sdg_payoffs_scale_linearly(spec in sdg_spec(), kappa in 0.01f64..100.0) {
        let GameSpec::Sdg { n, m, b, c } = spec else { unreachable!() };
        let base = spec.payoff_table().unwrap();
        let scaled = GameSpec::Sdg { n, m, b: kappa * b, c: kappa * c }.payoff_table().unwrap();
        for z in 0..n {
            prop_assert!((scaled.a[z] - kappa * base.a[z]).abs() <= 1e-12 * (kappa * base.a[z]).abs().max(1e-300));
            prop_assert!((scaled.b[z] - kappa * base.b[z]).abs() <= 1e-12 * (kappa * base.b[z]).abs().max(1e-300));
        }
    }

    #[test]
    fn payoff_vectors_are_consistent_reorderings(spec in any_spec()) {
        let table = spec.payoff_table().unwrap();
        let n = table.n;
        let gi = payoff_vector_self(&table);
        let gmi = payoff_vector_coplayers(&table);
        prop_assert_eq!(gi.len(), 2 * n);
        prop_assert_eq!(gmi.len(), 2 * n);
        for z in 0..n {
            prop_assert_eq!(gi[n - 1 - z], table.a[z]);
            prop_assert_eq!(gi[2 * n - 1 - z], table.b[z]);
        }
        prop_assert_eq!(gmi[0], table.a[n - 1]);
        prop_assert_eq!(gmi[2 * n - 1], table.b[0]);
    }

    #[test]
    fn l_bounds_match_case_analysis(spec in any_spec(), s in 0.0f64..0.98) {
        // The per-z scan must agree with the closed forms assembled from
        // the three-case analysis of the inequalities.
        let table = spec.payoff_table().unwrap();
        prop_assume!(s > slope_floor(table.n) + 0.01);
        let got = l_bounds(&table, s).unwrap();
        let (lower, upper) = reference_bounds(&spec, s);
        let scale = table.max_abs().max(1.0) / (1.0 - s);
        prop_assert!((got.lower - lower).abs() <= 1e-12 * scale, "lower {} vs {lower}", got.lower);
        prop_assert!((got.upper - upper).abs() <= 1e-12 * scale, "upper {} vs {upper}", got.upper);
    }

    #[test]
    fn l_bounds_extrema_are_attained(spec in any_spec(), s in -0.05f64..0.95) {
        let table = spec.payoff_table().unwrap();
        prop_assume!(s > slope_floor(table.n));
        let bounds = l_bounds(&table, s).unwrap();
        // Re-derive each per-z expression; every lower term is dominated by
        // the max, every upper term dominates the min, and the recorded
        // indices attain them exactly.
        let n = table.n;
        let d = n as f64 - 1.0;
        for z in 0..n {
            let gap = if z > 0 { table.b[z] - table.a[z - 1] } else { 0.0 };
            let lo_z = table.b[z] - (z as f64 / d) * gap / (1.0 - s);
            prop_assert!(lo_z <= bounds.lower);
            if z == bounds.lower_argz {
                prop_assert_eq!(lo_z, bounds.lower);
            }
            let gap = if z + 1 < n { table.b[z + 1] - table.a[z] } else { 0.0 };
            let up_z = table.a[z] + ((n - z - 1) as f64 / d) * gap / (1.0 - s);
            prop_assert!(up_z >= bounds.upper);
            if z == bounds.upper_argz {
                prop_assert_eq!(up_z, bounds.upper);
            }
        }
    }

    #[test]
    fn enforceability_is_scale_invariant(spec in any_spec(), s in 0.0f64..0.95, t in 0.0f64..1.0, kappa in 0.05f64..20.0) {
        let table = spec.payoff_table().unwrap();
        prop_assume!(s > slope_floor(table.n));
        let bounds = l_bounds(&table, s).unwrap();
        // Probe an l inside and outside the admissible interval.
        let span = (bounds.upper - bounds.lower).abs().max(0.1);
        let l = bounds.lower + (2.0 * t - 0.5) * span;
        let scaled = table.scaled(kappa);
        prop_assert_eq!(enforceable(&table, s, l), enforceable(&scaled, s, kappa * l));
        let scaled_bounds = l_bounds(&scaled, s).unwrap();
        let tol = 1e-12 * table.max_abs().max(1.0) * kappa / (1.0 - s);
        prop_assert!((scaled_bounds.lower - kappa * bounds.lower).abs() <= tol);
        prop_assert!((scaled_bounds.upper - kappa * bounds.upper).abs() <= tol);
    }

    #[test]
    fn fair_and_sub_floor_slopes_are_never_enforceable(spec in any_spec(), l in -5.0f64..5.0, eps in 0.0f64..0.5) {
        let table = spec.payoff_table().unwrap();
        prop_assert!(!enforceable(&table, 1.0, l));
        prop_assert!(!enforceable(&table, 1.0 + eps, l));
        prop_assert!(!enforceable(&table, slope_floor(table.n) - eps, l));
    }

    #[test]
    fn equalizers_never_exist(spec in any_spec()) {
        let table = spec.payoff_table().unwrap();
        prop_assert!(!equalizer_exists(&table));
    }

    #[test]
    fn oracle_agrees_with_closed_forms(spec in any_spec(), generous in any::<bool>()) {
        let class = if generous { ZDClass::Generous } else { ZDClass::Extortionate };
        let closed = closed_bound(&spec, class);
        let table = spec.payoff_table().unwrap();
        let oracle = numeric_slope_bound(&table, class, class.baseline_payoff(&table)).unwrap();
        prop_assert!(
            (closed.s_star - oracle.s_star).abs() < 1e-8,
            "closed {} vs oracle {}", closed.s_star, oracle.s_star
        );
        prop_assert_eq!(closed.strict, oracle.strict);
    }

    #[test]
    fn pgg_generous_bound_monotone(n in 3usize..=10, t in 0.0f64..1.0, dt in 0.01f64..0.5) {
        // The threshold slope rises strictly with m and with r (a larger
        // slope floor means a smaller region of enforceable slopes).
        let r_lo = 1.05 + t * (n as f64 - 1.11 - dt);
        let r_hi = r_lo + dt;
        for m in 2..n - 1 {
            let a = pgg_generous_bound(n, m, r_lo).unwrap().s_star;
            let b = pgg_generous_bound(n, m + 1, r_lo).unwrap().s_star;
            prop_assert!(a < b, "m: {a} !< {b}");
        }
        for m in 2..n {
            let a = pgg_generous_bound(n, m, r_lo).unwrap().s_star;
            let b = pgg_generous_bound(n, m, r_hi).unwrap().s_star;
            prop_assert!(a < b, "r: {a} !< {b}");
        }
    }

    #[test]
    fn pgg_extortionate_bound_m_free_above_branch_switch(n in 3usize..=10, t in 0.0f64..1.0) {
        // For r >= n/(n-m+1) the bound does not depend on m.
        let r = 1.05 + t * (n as f64 - 1.1);
        let independent: Vec<f64> = (2..n)
            .filter(|&m| r >= n as f64 / (n - m + 1) as f64)
            .map(|m| pgg_extortionate_bound(n, m, r).unwrap().s_star)
            .collect();
        for pair in independent.windows(2) {
            prop_assert_eq!(pair[0], pair[1]);
        }
    }

    #[test]
    fn sdg_bounds_invariant_under_joint_scaling(spec in sdg_spec(), kappa in 0.05f64..20.0) {
        let GameSpec::Sdg { n, m, b, c } = spec else { unreachable!() };
        let gen = sdg_generous_bound(n, m, b, c).unwrap().s_star;
        let gen_scaled = sdg_generous_bound(n, m, kappa * b, kappa * c).unwrap().s_star;
        prop_assert!((gen - gen_scaled).abs() < 1e-12);
        let ext = sdg_extortionate_bound(n, m, b, c).unwrap().s_star;
        let ext_scaled = sdg_extortionate_bound(n, m, kappa * b, kappa * c).unwrap().s_star;
        prop_assert!((ext - ext_scaled).abs() < 1e-12);
    }

    #[test]
    fn pgg_bounds_do_not_depend_on_cost(spec in pgg_spec(), s in 0.0f64..0.95, kappa in 0.05f64..20.0) {
        // The slope regions come out of inequalities that scale linearly in
        // c, so the enforceable-slope test is unchanged under rescaling.
        let GameSpec::Pgg { n, m, r, c } = spec else { unreachable!() };
        let table = spec.payoff_table().unwrap();
        let scaled = GameSpec::Pgg { n, m, r, c: kappa * c }.payoff_table().unwrap();
        for class in [ZDClass::Generous, ZDClass::Extortionate] {
            let l = class.baseline_payoff(&table);
            let l_scaled = class.baseline_payoff(&scaled);
            prop_assert_eq!(enforceable(&table, s, l), enforceable(&scaled, s, l_scaled));
        }
    }

    #[test]
    fn construction_satisfies_defining_identity(spec in any_spec(), generous in any::<bool>(), margin in 0.05f64..0.95, u in 0.0f64..1.0) {
        let class = if generous { ZDClass::Generous } else { ZDClass::Extortionate };
        let table = spec.payoff_table().unwrap();
        let bound = closed_bound(&spec, class);
        let s = bound.s_star + margin * (1.0 - bound.s_star);
        let l = class.baseline_payoff(&table);
        let delta = 0.999;
        let p0 = class.default_initial_cooperation();
        let Some(interval) = feasible_phi_interval(&table, s, l, delta, p0) else {
            return Err(TestCaseError::fail("expected nonempty phi interval at delta = 0.999"));
        };
        let phi = interval.lo + u * (interval.hi - interval.lo);
        let params = ZDParameters { s, l, phi, delta, p0 };
        let strategy = construct_zd(&table, &params).unwrap();
        let gi = payoff_vector_self(&table);
        let gmi = payoff_vector_coplayers(&table);
        let scale = table.max_abs().max(1.0) * phi.max(1.0);
        for k in 0..2 * table.n {
            let rep = if k < table.n { 1.0 } else { 0.0 };
            let lhs = delta * strategy.probs[k] - rep + (1.0 - delta) * p0;
            let rhs = phi * (s * gi[k] - gmi[k] + (1.0 - s) * l);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "entry {k}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn phi_interval_nonempty_is_monotone_in_delta(spec in any_spec(), generous in any::<bool>(), margin in 0.05f64..0.95) {
        let class = if generous { ZDClass::Generous } else { ZDClass::Extortionate };
        let table = spec.payoff_table().unwrap();
        let bound = closed_bound(&spec, class);
        let s = bound.s_star + margin * (1.0 - bound.s_star);
        let l = class.baseline_payoff(&table);
        let p0 = class.default_initial_cooperation();
        let mut seen = false;
        for i in 1..=999 {
            let delta = i as f64 / 1000.0;
            let nonempty = feasible_phi_interval(&table, s, l, delta, p0).is_some();
            prop_assert!(!seen || nonempty, "feasibility lost at delta = {delta}");
            seen |= nonempty;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zd_strategies_enforce_the_relation(
        seed in 0u64..1_000_000,
        n in 3usize..=6,
        generous in any::<bool>(),
        margin in 0.05f64..0.9,
    ) {
        // Small randomized enforcement check; the acceptance suite runs the
        // full-scale version.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(2..n);
        let spec = if rng.random::<bool>() {
            GameSpec::Pgg { n, m, r: rng.random_range(1.05..n as f64 - 0.05), c: 1.0 }
        } else {
            GameSpec::Sdg { n, m, b: rng.random_range(1.05..6.0), c: 1.0 }
        };
        let class = if generous { ZDClass::Generous } else { ZDClass::Extortionate };
        let table = spec.payoff_table().unwrap();
        let bound = closed_bound(&spec, class);
        let s = bound.s_star + margin * (1.0 - bound.s_star);
        let l = class.baseline_payoff(&table);
        let p0 = class.default_initial_cooperation();
        let (delta, interval) = [0.99, 0.999]
            .into_iter()
            .find_map(|d| feasible_phi_interval(&table, s, l, d, p0).map(|iv| (d, iv)))
            .expect("some delta below 1 admits a phi interval");
        let phi = interval.lo + rng.random::<f64>() * (interval.hi - interval.lo);
        let focal = construct_zd(&table, &ZDParameters { s, l, phi, delta, p0 }).unwrap();
        let mut strategies = vec![focal];
        strategies.extend((1..n).map(|j| random_memory_one(n, seed.wrapping_add(j as u64))));
        let profile = StrategyProfile::new(strategies).unwrap();
        let outcome = exact_discounted_payoffs(&profile, &table, delta).unwrap();
        let residual = relation_residual(&outcome, s, l);
        prop_assert!(residual.abs() < 1e-8, "residual {residual}");

        // Under the enforced relation, the focal player leads or trails the
        // co-players' average exactly as total welfare exceeds or falls
        // short of n*l. Full cooperation maximizes welfare in both families,
        // so the generous baseline (l = a[n-1]) makes the focal player trail
        // unconditionally; the extortionate baseline has no such guarantee
        // because below-threshold cooperation can push welfare negative.
        let welfare: f64 = outcome.pi.iter().sum();
        let gap = welfare - table.n as f64 * l;
        if gap.abs() > 1e-9 {
            prop_assert_eq!(
                outcome.pi_focal >= outcome.pi_coplayers_avg,
                gap >= 0.0,
                "welfare gap {}, focal {}, co-players {}",
                gap,
                outcome.pi_focal,
                outcome.pi_coplayers_avg
            );
        }
        if class == ZDClass::Generous {
            prop_assert!(outcome.pi_coplayers_avg >= outcome.pi_focal - 1e-8);
        }
    }
}
