//! Monte Carlo experiments built on the engines.
//!
//! Replication `r` of an experiment with master seed `s` always uses the
//! weight field keyed by `(s, r)`, so estimates are deterministic functions
//! of their parameters and runs at different rates or truncations share
//! randomness edge by edge.

use std::ops::ControlFlow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::competition::{run_two_type_markov_seeds, run_two_type_seeds, RunOutcome, StopRule, Termination};
use crate::error::{config_err, Error, Result};
use crate::exec::{replicate, Execution};
use crate::fpp::{self, passage_time_to_set, DescentCounts, PassageSearch, Target};
use crate::hull::{self, Cell};
use crate::lattice::{Domain, Point, SeedConfig, SeedRegion};
use crate::stats::{ks_two_sample, Estimate, KsResult};
use crate::weights::{stream_key, ClockMode, InfectionType, WeightField};

const MARKOV_STREAM: u64 = 0x4d41_524b_4f56;

/// Dimension, seed, replication count and scheduling shared by every
/// experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plan {
    pub dim: usize,
    pub seed: u64,
    pub reps: u64,
    pub exec: Execution,
}

impl Plan {
    pub fn new(dim: usize, seed: u64, reps: u64) -> Self {
        Plan {
            dim,
            seed,
            reps,
            exec: Execution::default(),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    fn require_reps(&self, min: u64) -> Result<()> {
        if self.reps < min {
            return Err(config_err!("reps must be at least {min}, got {}", self.reps));
        }
        Ok(())
    }

    fn field(&self, rep: u64, lambda: f64) -> Result<WeightField> {
        WeightField::single(self.seed, rep, lambda)
    }

    fn run<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync + Send,
    {
        replicate(self.reps, self.exec, f)
    }
}

/// Per-replication values and their mean.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleEstimate {
    pub estimate: Estimate,
    pub samples: Vec<f64>,
}

impl SampleEstimate {
    fn new(samples: Vec<f64>) -> Result<Self> {
        Ok(SampleEstimate {
            estimate: Estimate::from_samples(&samples)?,
            samples,
        })
    }
}

fn axis(dim: usize, n: i32) -> Result<Point> {
    Point::on_axis(dim, n)
}

fn check_rate(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(config_err!("lambda must satisfy lambda > 0, got {lambda}"));
    }
    Ok(())
}

/// Slab used for point-to-point axis times: `x1 ∈ [-n/2, 3n/2]`, lateral
/// half-width `n/2` (at least 4).
pub fn mu_domain(dim: usize, n: u32) -> Result<Domain> {
    let m = (n / 2).max(4);
    Domain::slab(dim, -(m as i32), (n + m) as i32, m)
}

/// `T^0(n·e1) / n` per replication.
pub fn estimate_mu(plan: &Plan, lambda: f64, n: u32) -> Result<SampleEstimate> {
    plan.require_reps(2)?;
    check_rate(lambda)?;
    if n == 0 {
        return Err(config_err!("n must be at least 1"));
    }
    let dom = mu_domain(plan.dim, n)?;
    let origin = Point::origin(plan.dim)?;
    let target = Target::Site(axis(plan.dim, n as i32)?);
    let samples = plan.run(|rep| {
        let f = plan.field(rep, lambda)?;
        Ok(passage_time_to_set(&dom, &origin, &target, &f, InfectionType::One)? / n as f64)
    })?;
    SampleEstimate::new(samples)
}

/// Estimates from the truncated hyperplane and from the origin, on the
/// same weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperplaneEstimate {
    /// `T^H(n·e1) / n`.
    pub hyperplane: SampleEstimate,
    /// `T^0(n·e1) / n`.
    pub origin: SampleEstimate,
}

fn hyperplane_domain(dim: usize, n: u32, w: u32) -> Result<Domain> {
    Domain::slab(dim, -(n as i32), 2 * n as i32, w)
}

fn hyperplane_sources(dim: usize, w: u32) -> Result<Vec<Point>> {
    let mut h = SeedRegion::Hyperplane { half_width: w }.enumerate(dim)?;
    h.push(Point::origin(dim)?);
    h.sort();
    Ok(h)
}

fn check_hyperplane_width(n: u32, w: u32) -> Result<()> {
    if (w as u64) < 4 * n as u64 {
        return Err(config_err!("hyperplane half-width W={w} must be at least 4n={}", 4 * n as u64));
    }
    Ok(())
}

fn hyperplane_time(dom: &Domain, sources: &[Point], target: &Point, f: &WeightField) -> Result<f64> {
    let idx = dom.index_of(target).expect("target inside slab");
    let mut hit = None;
    PassageSearch::new(dom, f, InfectionType::One).run_until(sources, |s| {
        if s.index == idx {
            hit = Some(s.time);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(hit.expect("target is reachable"))
}

/// `T^H(n·e1)/n` from the hyperplane `{x1 = 0}` truncated to `|x_i| <= w`
/// on the slab `x1 ∈ [-n, 2n]`, paired with `T^0(n·e1)/n` on the same
/// domain and weights.
pub fn estimate_mu_hyperplane(plan: &Plan, lambda: f64, n: u32, w: u32) -> Result<HyperplaneEstimate> {
    plan.require_reps(2)?;
    check_rate(lambda)?;
    check_hyperplane_width(n, w)?;
    let dom = hyperplane_domain(plan.dim, n, w)?;
    let sources = hyperplane_sources(plan.dim, w)?;
    let origin = Point::origin(plan.dim)?;
    let target = axis(plan.dim, n as i32)?;
    let pairs = plan.run(|rep| {
        let f = plan.field(rep, lambda)?;
        let th = hyperplane_time(&dom, &sources, &target, &f)?;
        let t0 = hyperplane_time(&dom, std::slice::from_ref(&origin), &target, &f)?;
        Ok((th / n as f64, t0 / n as f64))
    })?;
    Ok(HyperplaneEstimate {
        hyperplane: SampleEstimate::new(pairs.iter().map(|p| p.0).collect())?,
        origin: SampleEstimate::new(pairs.iter().map(|p| p.1).collect())?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// `T^H(n·e1)` samples, replications `0..reps`.
    pub from_hyperplane: Vec<f64>,
    /// `T^0(H_n)` samples, replications `reps..2·reps`.
    pub to_hyperplane: Vec<f64>,
    pub ks: KsResult,
}

/// Compares the law of `T^H(n·e1)` with that of `T^0(H_n)` (origin to the
/// hyperplane `{x1 = n}`) using independent replications for each side.
pub fn hyperplane_identity(plan: &Plan, lambda: f64, n: u32, w: u32) -> Result<IdentityCheck> {
    plan.require_reps(2)?;
    check_rate(lambda)?;
    check_hyperplane_width(n, w)?;
    let dom = hyperplane_domain(plan.dim, n, w)?;
    let sources = hyperplane_sources(plan.dim, w)?;
    let origin = Point::origin(plan.dim)?;
    let target = axis(plan.dim, n as i32)?;
    let from_hyperplane = plan.run(|rep| hyperplane_time(&dom, &sources, &target, &plan.field(rep, lambda)?))?;
    let to_hyperplane = plan.run(|rep| {
        let f = plan.field(plan.reps + rep, lambda)?;
        passage_time_to_set(&dom, &origin, &Target::Hyperplane(n as i32), &f, InfectionType::One)
    })?;
    let ks = ks_two_sample(&from_hyperplane, &to_hyperplane)?;
    Ok(IdentityCheck {
        from_hyperplane,
        to_hyperplane,
        ks,
    })
}

/// `T(n·e1)/n` inside the tube of lateral radius `b`, for each `b`.
pub fn mu_hampered(plan: &Plan, lambda: f64, n: u32, bs: &[u32], x1_max: u32) -> Result<Vec<(u32, SampleEstimate)>> {
    plan.require_reps(2)?;
    check_rate(lambda)?;
    if x1_max < n {
        return Err(config_err!("tube length {x1_max} is shorter than n={n}"));
    }
    bs.iter()
        .map(|&b| {
            let samples = plan.run(|rep| {
                let times = fpp::hampered_front(plan.dim, b, x1_max, &plan.field(rep, lambda)?)?;
                Ok(times[n as usize] / n as f64)
            })?;
            Ok((b, SampleEstimate::new(samples)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentStatistics {
    pub x_b: SampleEstimate,
    pub x_b_star: SampleEstimate,
    /// Replications with `X_b >= 1` but `X_b* = 0`.
    pub violations: u64,
}

pub fn descent_statistics(plan: &Plan, b: u32, w: u32, overshoot: u32) -> Result<DescentStatistics> {
    plan.require_reps(2)?;
    let counts: Vec<DescentCounts> =
        plan.run(|rep| fpp::descent_counts(plan.dim, b, w, overshoot, &plan.field(rep, 1.0)?))?;
    Ok(DescentStatistics {
        x_b: SampleEstimate::new(counts.iter().map(|c| c.x_b as f64).collect())?,
        x_b_star: SampleEstimate::new(counts.iter().map(|c| c.x_b_star as f64).collect())?,
        violations: counts.iter().filter(|c| c.x_b >= 1 && c.x_b_star == 0).count() as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecordStatistics {
    /// `Y(t)/t`.
    pub infected_rate: SampleEstimate,
    /// `Y→(t)/t`.
    pub record_rate: SampleEstimate,
    pub n_max: u32,
    /// Replications where the guard band was reached by time `t`.
    pub truncated: u64,
}

/// Axis horizon for record counts at time `t`: well past the expected
/// front `t/μ`, plus the guard band.
pub fn record_horizon(t: f64, mu: f64, k_guard: usize) -> u32 {
    (1.5 * t / mu).ceil() as u32 + k_guard as u32
}

/// Record counts at time `t` from single-origin runs on the slab
/// `x1 ∈ [-n_max/4, n_max]`, lateral half-width `n_max/4`.
pub fn record_statistics(plan: &Plan, t: f64, mu: f64, k_guard: usize) -> Result<RecordStatistics> {
    plan.require_reps(2)?;
    if !(t > 0.0 && mu > 0.0) {
        return Err(config_err!("need t > 0 and a positive time constant"));
    }
    let n_max = record_horizon(t, mu, k_guard);
    let m = (n_max / 4).max(4);
    let dom = Domain::slab(plan.dim, -(m as i32), n_max as i32, m)?;
    let probes = plan.run(|rep| {
        let tr = fpp::record_trace(&dom, &plan.field(rep, 1.0)?, n_max as usize, &[t], k_guard)?;
        Ok(tr.probes()[0])
    })?;
    Ok(RecordStatistics {
        infected_rate: SampleEstimate::new(probes.iter().map(|p| p.infected as f64 / t).collect())?,
        record_rate: SampleEstimate::new(probes.iter().map(|p| p.records as f64 / t).collect())?,
        n_max,
        truncated: probes.iter().filter(|p| p.truncated).count() as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProportionResult {
    pub estimate: Estimate,
    pub successes: u64,
}

fn proportion(outcomes: &[bool]) -> Result<ProportionResult> {
    let successes = outcomes.iter().filter(|&&b| b).count() as u64;
    Ok(ProportionResult {
        estimate: Estimate::wilson(successes, outcomes.len() as u64)?,
        successes,
    })
}

/// Proportion of replications with `T(n·e1) = min_{n <= l <= n+k} T(l·e1)`.
pub fn record_probability(plan: &Plan, n: u32, k: u32) -> Result<ProportionResult> {
    plan.require_reps(1)?;
    let end = n + k;
    let m = (end / 2).max(8);
    let dom = Domain::slab(plan.dim, -(m as i32), (end + m) as i32, m)?;
    let origin = Point::origin(plan.dim)?;
    let outcomes = plan.run(|rep| {
        let f = plan.field(rep, 1.0)?;
        let mut times = vec![f64::NAN; k as usize + 1];
        let mut remaining = k + 1;
        PassageSearch::new(&dom, &f, InfectionType::One).run_until(std::slice::from_ref(&origin), |s| {
            let x1 = s.coords[0];
            if x1 >= n as i32 && x1 <= end as i32 && s.coords[1..].iter().all(|&c| c == 0) {
                times[(x1 - n as i32) as usize] = s.time;
                remaining -= 1;
                if remaining == 0 {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        })?;
        Ok(times.iter().all(|&t| times[0] <= t))
    })?;
    proportion(&outcomes)
}

/// Scores of one infected set at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeSnapshot {
    pub sites: u64,
    /// Convex hull of `{x / (λt)}`.
    pub scaled_hull: Vec<(f64, f64)>,
    pub deficiency: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeSummary {
    pub deficiency: SampleEstimate,
    pub deviation: SampleEstimate,
    pub half_width: u32,
    pub snapshots: Vec<ShapeSnapshot>,
}

/// Infected set `{x : T(x) <= t}` from the origin at rate `lambda` on the
/// box of the given half-width; fails if it touches the boundary.
pub fn infected_set(dom: &Domain, f: &WeightField, t: f64) -> Result<Vec<Cell>> {
    let m = dom.upper_corner().x1();
    let mut touched = false;
    let r = PassageSearch::new(dom, f, InfectionType::One)
        .until_time(t)
        .run_until(&[Point::origin(dom.dim())?], |s| {
            if s.coords.iter().any(|c| c.abs() == m) {
                touched = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
    if touched {
        return Err(Error::Domain(format!("infected set reached the boundary of the box M={m} before t={t}")));
    }
    Ok(r.settled().map(|(p, _)| (p.coords()[0] as i64, p.coords()[1] as i64)).collect())
}

/// Shape diagnostics in the plane: convexity deficiency and dihedral
/// symmetry deviation of the infected set at time `t`.
pub fn shape_check(plan: &Plan, lambda: f64, t: f64, mu: f64) -> Result<ShapeSummary> {
    if plan.dim != 2 {
        return Err(Error::Unsupported(format!("shape diagnostics are planar, got d={}", plan.dim)));
    }
    plan.require_reps(2)?;
    check_rate(lambda)?;
    let half_width = ((1.4 * lambda * t / mu).ceil() as u32).max(4);
    let dom = Domain::cube(2, half_width)?;
    let scale = lambda * t;
    let snapshots = plan.run(|rep| {
        let set = infected_set(&dom, &plan.field(rep, lambda)?, t)?;
        Ok(ShapeSnapshot {
            sites: set.len() as u64,
            scaled_hull: hull::convex_hull(&set)
                .into_iter()
                .map(|(x, y)| (x as f64 / scale, y as f64 / scale))
                .collect(),
            deficiency: hull::convexity_deficiency(&set),
            deviation: hull::symmetry_deviation(&set),
        })
    })?;
    Ok(ShapeSummary {
        deficiency: SampleEstimate::new(snapshots.iter().map(|s| s.deficiency).collect())?,
        deviation: SampleEstimate::new(snapshots.iter().map(|s| s.deviation).collect())?,
        half_width,
        snapshots,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Competing first-passage dynamics on the weight field.
    Weights,
    /// Event-driven Markov chain with its own random stream.
    Markov,
}

/// A survival experiment: type 1 on `seeds.type1`, type 2 on `seeds.type2`
/// with rates `(lambda1, lambda2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalSpec {
    pub seeds: SeedConfig,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Increasing list of radii.
    pub radii: Vec<u32>,
    /// Box half-width; `2 * max(radii)` when absent.
    pub half_width: Option<u32>,
    pub engine: Engine,
    /// Time constant used to size the safety horizon.
    pub mu: f64,
    pub horizon_factor: f64,
}

impl SurvivalSpec {
    pub fn new(seeds: SeedConfig, lambda2: f64, radii: Vec<u32>, mu: f64) -> Self {
        SurvivalSpec {
            seeds,
            lambda1: 1.0,
            lambda2,
            radii,
            half_width: None,
            engine: Engine::Weights,
            mu,
            horizon_factor: 10.0,
        }
    }

    pub fn max_radius(&self) -> u32 {
        self.radii.iter().copied().max().unwrap_or(0)
    }

    pub fn box_half_width(&self) -> u32 {
        self.half_width.unwrap_or(2 * self.max_radius())
    }

    /// Safety stop `horizon_factor · R · μ / min λ`.
    pub fn horizon(&self) -> f64 {
        self.horizon_factor * self.max_radius().max(1) as f64 * self.mu / self.lambda1.min(self.lambda2)
    }

    /// Checks the rules that make a survival run meaningful.
    pub fn validate(&self) -> Result<()> {
        check_rate(self.lambda1)?;
        check_rate(self.lambda2)?;
        if self.radii.is_empty() || self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err!("radius list must be nonempty and strictly increasing"));
        }
        let r = self.max_radius();
        let m = self.box_half_width();
        if (m as u64) < 2 * r as u64 {
            return Err(config_err!("R={r} exceeds the domain rule M=2R: half-width M={m} < {}", 2 * r as u64));
        }
        if let Some(window) = self.seeds.window() {
            if window < m {
                return Err(config_err!(
                    "R={r} exceeds the domain rule M=2R: seed window {window} must cover the half-width M={m}"
                ));
            }
        }
        if !(self.mu > 0.0 && self.horizon_factor > 0.0) {
            return Err(config_err!("horizon needs a positive time constant and factor"));
        }
        self.seeds.enumerate()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalRow {
    pub radius: u32,
    pub survived: u64,
    pub reps: u64,
    pub estimate: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub rows: Vec<SurvivalRow>,
    /// Largest distance type 2 reached, per replication.
    pub max_distance: Vec<u32>,
    pub horizon_hits: u64,
    pub half_width: u32,
}

/// One run per replication out to the largest radius; survival to a
/// smaller radius is read off the same run, so each curve is pathwise
/// nonincreasing in R.
pub fn survival_curve(plan: &Plan, spec: &SurvivalSpec) -> Result<SurvivalCurve> {
    plan.require_reps(1)?;
    spec.validate()?;
    if spec.seeds.dim != plan.dim {
        return Err(config_err!("seed configuration dimension does not match d={}", plan.dim));
    }
    let m = spec.box_half_width();
    let dom = Domain::cube(plan.dim, m)?;
    let (one, two) = spec.seeds.enumerate_within(&dom)?;
    let stop = StopRule::type2_escapes(spec.max_radius()).with_horizon(spec.horizon());
    let outcomes: Vec<RunOutcome> = plan.run(|rep| {
        let run = match spec.engine {
            Engine::Weights => {
                let f = WeightField::new(plan.seed, rep, ClockMode::Two, spec.lambda1, spec.lambda2)?;
                run_two_type_seeds(&dom, &one, &two, &f, &stop)?
            }
            Engine::Markov => {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_key(plan.seed, rep, MARKOV_STREAM));
                run_two_type_markov_seeds(&dom, &one, &two, spec.lambda1, spec.lambda2, &mut rng, &stop)?
            }
        };
        Ok(run.1)
    })?;
    let max_distance: Vec<u32> = outcomes.iter().map(|o| o.max_type2_distance()).collect();
    let rows = spec
        .radii
        .iter()
        .map(|&r| {
            let survived = max_distance.iter().filter(|&&d| d >= r).count() as u64;
            Ok(SurvivalRow {
                radius: r,
                survived,
                reps: plan.reps,
                estimate: Estimate::wilson(survived, plan.reps)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SurvivalCurve {
        rows,
        max_distance,
        horizon_hits: outcomes.iter().filter(|o| o.termination == Termination::Horizon).count() as u64,
        half_width: m,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoexistenceRow {
    pub n: u32,
    pub both: u64,
    pub reps: u64,
    pub estimate: Estimate,
    pub horizon_hits: u64,
}

/// For each `n`, the proportion of runs (single clock, unit rates) in which
/// the type seeded at the origin and the type seeded at `n·e1` both reach
/// L∞ distance `r` from their own seeds. `swapped` exchanges the types.
pub fn coexistence_scan(plan: &Plan, ns: &[u32], r: u32, swapped: bool, mu: f64) -> Result<Vec<CoexistenceRow>> {
    plan.require_reps(1)?;
    ns.iter()
        .map(|&n| {
            let origin = Point::origin(plan.dim)?;
            let other = axis(plan.dim, n as i32)?;
            let (s1, s2) = if swapped { (other, origin) } else { (origin, other) };
            if s1 == s2 {
                return Err(config_err!("n=0 puts both seeds on the origin"));
            }
            let dom = Domain::cube(plan.dim, 2 * r + n)?;
            let stop = StopRule::both_escape(r, [s1, s2]).with_horizon(10.0 * (r.max(1) + n) as f64 * mu);
            let outcomes = plan.run(|rep| {
                let f = plan.field(rep, 1.0)?;
                Ok(run_two_type_seeds(&dom, &[s1], &[s2], &f, &stop)?.1)
            })?;
            let both = outcomes.iter().filter(|o| o.both_reached).count() as u64;
            Ok(CoexistenceRow {
                n,
                both,
                reps: plan.reps,
                estimate: Estimate::wilson(both, plan.reps)?,
                horizon_hits: outcomes.iter().filter(|o| o.termination == Termination::Horizon).count() as u64,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(reps: u64) -> Plan {
        Plan::new(2, 11, reps)
    }

    #[test]
    fn mu_rate_scaling_is_exact() {
        let one = estimate_mu(&plan(8), 1.0, 16).unwrap();
        for lambda in [0.5, 2.0, 4.0] {
            let l = estimate_mu(&plan(8), lambda, 16).unwrap();
            for (a, b) in l.samples.iter().zip(&one.samples) {
                assert_eq!(lambda * a, *b);
            }
            assert_eq!(lambda * l.estimate.mean, one.estimate.mean);
        }
    }

    #[test]
    fn two_reps_cover_both_values() {
        let e = estimate_mu(&plan(2), 1.0, 8).unwrap();
        for s in &e.samples {
            assert!(e.estimate.contains(*s));
        }
        assert!(estimate_mu(&plan(1), 1.0, 8).is_err());
        assert!(estimate_mu(&plan(0), 1.0, 8).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = estimate_mu(&plan(6).with_execution(Execution::Sequential), 1.0, 12).unwrap();
        let b = estimate_mu(&plan(6).with_execution(Execution::Parallel), 1.0, 12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hyperplane_is_never_slower() {
        let e = estimate_mu_hyperplane(&plan(10), 1.0, 8, 32).unwrap();
        for (h, o) in e.hyperplane.samples.iter().zip(&e.origin.samples) {
            assert!(h <= o);
        }
        assert!(matches!(estimate_mu_hyperplane(&plan(10), 1.0, 8, 31), Err(Error::Config(_))));
    }

    #[test]
    fn record_probability_trivial_cases() {
        assert_eq!(record_probability(&plan(20), 0, 5).unwrap().successes, 20);
        assert_eq!(record_probability(&plan(20), 7, 0).unwrap().successes, 20);
    }

    #[test]
    fn shape_is_planar_and_rate_invariant() {
        assert!(matches!(shape_check(&Plan::new(3, 1, 2), 1.0, 1.0, 0.4), Err(Error::Unsupported(_))));
        let dom = Domain::cube(2, 40).unwrap();
        for rep in 0..3 {
            let a = infected_set(&dom, &WeightField::single(5, rep, 1.0).unwrap(), 6.0).unwrap();
            let b = infected_set(&dom, &WeightField::single(5, rep, 2.0).unwrap(), 3.0).unwrap();
            let (mut a, mut b) = (a, b);
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
        let tiny = shape_check(&plan(3), 1.0, 1e-9, 0.4).unwrap();
        assert_eq!(tiny.deficiency.estimate.mean, 0.0);
        assert_eq!(tiny.deviation.estimate.mean, 0.0);
    }

    #[test]
    fn survival_rules() {
        let spec = SurvivalSpec::new(SeedConfig::half_axis(2, 64), 1.0, vec![16, 32, 128], 0.4);
        assert!(matches!(spec.validate(), Err(Error::Config(m)) if m.contains("M=2R")));
        let bad_rate = SurvivalSpec::new(SeedConfig::half_axis(2, 64), -1.0, vec![16], 0.4);
        assert!(matches!(bad_rate.validate(), Err(Error::Config(m)) if m.contains("lambda > 0")));
        let spec = SurvivalSpec::new(SeedConfig::hyperplane(2, 16), 1.0, vec![0, 2, 4, 8], 0.4);
        let curve = survival_curve(&plan(50), &spec).unwrap();
        assert_eq!(curve.rows[0].survived, 50);
        assert!(curve.rows.windows(2).all(|w| w[0].survived >= w[1].survived));
    }

    #[test]
    fn coexistence_rejects_overlap() {
        assert!(matches!(coexistence_scan(&plan(4), &[0], 8, false, 0.4), Err(Error::Config(_))));
        let rows = coexistence_scan(&plan(10), &[2], 4, false, 0.4).unwrap();
        assert_eq!(rows[0].reps, 10);
    }
}
