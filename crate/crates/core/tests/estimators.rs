use richardson_core::estimators::*;
use richardson_core::exec::Execution;
use richardson_core::lattice::SeedConfig;

#[test]
fn repeated_invocation_is_bit_identical() {
    let plan = Plan::new(2, 99, 12);
    assert_eq!(estimate_mu(&plan, 1.0, 20).unwrap(), estimate_mu(&plan, 1.0, 20).unwrap());
    let spec = SurvivalSpec::new(SeedConfig::half_axis(2, 16), 1.0, vec![2, 4, 8], 0.42);
    let a = survival_curve(&plan, &spec).unwrap();
    let b = survival_curve(&plan.with_execution(Execution::Sequential), &spec).unwrap();
    assert_eq!(a, b);
}

#[test]
fn nested_survival_is_monotone_per_run() {
    let plan = Plan::new(2, 5, 200);
    let spec = SurvivalSpec::new(SeedConfig::hyperplane(2, 24), 1.0, vec![1, 3, 6, 12], 0.42);
    let curve = survival_curve(&plan, &spec).unwrap();
    for w in curve.rows.windows(2) {
        assert!(w[0].survived >= w[1].survived);
    }
    for (row, r) in curve.rows.iter().zip([1, 3, 6, 12]) {
        let direct = curve.max_distance.iter().filter(|&&d| d >= r).count() as u64;
        assert_eq!(row.survived, direct);
    }
    assert!(curve.rows[0].survived > curve.rows[3].survived);
}

#[test]
fn markov_survival_engine_runs() {
    let plan = Plan::new(2, 5, 100);
    let mut spec = SurvivalSpec::new(SeedConfig::half_axis(2, 16), 1.0, vec![4, 8], 0.42);
    spec.engine = Engine::Markov;
    let curve = survival_curve(&plan, &spec).unwrap();
    assert_eq!(curve.rows[0].reps, 100);
    assert_eq!(curve.horizon_hits, 0);
}

#[test]
fn coexistence_is_exchangeable() {
    let plan = Plan::new(2, 8, 600);
    let a = coexistence_scan(&plan, &[2, 6], 8, false, 0.42).unwrap();
    let b = coexistence_scan(&plan, &[2, 6], 8, true, 0.42).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(x.estimate.overlaps(&y.estimate), "{x:?} {y:?}");
    }
}

#[test]
fn descent_counts_average_one() {
    let stats = descent_statistics(&Plan::new(2, 3, 400), 4, 32, 4).unwrap();
    assert_eq!(stats.violations, 0);
    assert!(stats.x_b.estimate.ci_lo < 1.0 + 0.3 && stats.x_b.estimate.ci_hi > 1.0 - 0.3);
    let zero = descent_statistics(&Plan::new(2, 3, 20), 0, 8, 0).unwrap();
    assert!(zero.x_b.samples.iter().chain(&zero.x_b_star.samples).all(|&x| x == 1.0));
}

#[test]
fn hampered_estimates_decrease_with_width() {
    let rows = mu_hampered(&Plan::new(2, 4, 50), 1.0, 32, &[0, 2, 8], 40).unwrap();
    // b = 0 is a sum of n unit exponentials
    assert!(rows[0].1.estimate.contains(1.0));
    assert!(rows[1].1.estimate.mean < rows[0].1.estimate.mean);
    assert!(rows[2].1.estimate.mean <= rows[1].1.estimate.mean);
}

#[test]
fn record_counts_are_consistent() {
    let s = record_statistics(&Plan::new(2, 2, 20), 20.0, 0.42, 16).unwrap();
    for (y, r) in s.infected_rate.samples.iter().zip(&s.record_rate.samples) {
        assert!(r <= y);
    }
    assert_eq!(s.truncated, 0);
}

#[test]
fn identity_check_runs() {
    let c = hyperplane_identity(&Plan::new(2, 1, 50), 1.0, 4, 16).unwrap();
    assert_eq!(c.from_hyperplane.len(), 50);
    assert!((0.0..=1.0).contains(&c.ks.p_value));
}
