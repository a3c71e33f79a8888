use std::collections::HashSet;

use super::{run_two_type_seeds, InfectionMap, StopRule};
use crate::error::{config_err, Result};
use crate::fpp::passage_times;
use crate::lattice::{Domain, Point};
use crate::weights::{InfectionType, WeightField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingKind {
    /// Two-type runs A and B on one domain with `A.type1 ⊆ B.type1` and
    /// `A.type2 ⊇ B.type2`: at all times type 1 of A is contained in type 1
    /// of B and type 2 of A contains type 2 of B.
    Containment,
    /// One-type growth from the union of the seeds on `domA ⊆ domB` with
    /// seeds of A among those of B: every site reached in A is reached no
    /// later in B.
    SubgraphDominance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingReport {
    pub kind: CouplingKind,
    /// Number of site-level comparisons made.
    pub checks: u64,
    pub violations: u64,
    pub first_violation: Option<Point>,
}

impl CouplingReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, ok: bool, p: Point) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            self.first_violation.get_or_insert(p);
        }
    }
}

/// Runs two processes on the same weights and checks the ordering between
/// them.
///
/// For [`CouplingKind::Containment`] both runs go to exhaustion (or the
/// horizon of `stop`). Since states are write-once, the set inclusions
/// hold at every event time exactly when each type-1 site of A is type 1
/// in B no later, and each type-2 site of B is type 2 in A no later; that
/// per-site form is what gets checked.
pub fn coupled_pair(
    dom_a: &Domain,
    seeds_a: (&[Point], &[Point]),
    dom_b: &Domain,
    seeds_b: (&[Point], &[Point]),
    field: &WeightField,
    stop: &StopRule,
    kind: CouplingKind,
) -> Result<CouplingReport> {
    let mut report = CouplingReport {
        kind,
        checks: 0,
        violations: 0,
        first_violation: None,
    };
    match kind {
        CouplingKind::Containment => {
            if dom_a != dom_b {
                return Err(config_err!("containment coupling needs both runs on the same domain"));
            }
            if !subset(seeds_a.0, seeds_b.0) || !subset(seeds_b.1, seeds_a.1) {
                return Err(config_err!("need A.type1 ⊆ B.type1 and A.type2 ⊇ B.type2"));
            }
            let rule = StopRule {
                horizon: stop.horizon,
                ..StopRule::exhaust()
            };
            let (a, _) = run_two_type_seeds(dom_a, seeds_a.0, seeds_a.1, field, &rule)?;
            let (b, _) = run_two_type_seeds(dom_b, seeds_b.0, seeds_b.1, field, &rule)?;
            check_earlier(&mut report, &a, &b, InfectionType::One);
            check_earlier(&mut report, &b, &a, InfectionType::Two);
        }
        CouplingKind::SubgraphDominance => {
            if !dom_a.is_subdomain_of(dom_b) {
                return Err(config_err!("domain A must be a subdomain of domain B"));
            }
            let sources_a: Vec<Point> = seeds_a.0.iter().chain(seeds_a.1).copied().collect();
            let sources_b: Vec<Point> = seeds_b.0.iter().chain(seeds_b.1).copied().collect();
            if !subset(&sources_a, &sources_b) {
                return Err(config_err!("seeds of A must be seeds of B"));
            }
            let a = passage_times(dom_a, &sources_a, field, InfectionType::One)?;
            let b = passage_times(dom_b, &sources_b, field, InfectionType::One)?;
            for (p, t) in a.settled() {
                report.record(b.time(&p).is_some_and(|tb| tb <= t), p);
            }
        }
    }
    Ok(report)
}

/// Every site of type `ty` in `inner` has type `ty` in `outer` with a time
/// no later.
fn check_earlier(report: &mut CouplingReport, inner: &InfectionMap, outer: &InfectionMap, ty: InfectionType) {
    for e in inner.events().filter(|e| e.ty == ty) {
        let ok = outer.state(&e.site) == Some(ty) && outer.time(&e.site).is_some_and(|t| t <= e.time);
        report.record(ok, e.site);
    }
}

fn subset(small: &[Point], big: &[Point]) -> bool {
    let big: HashSet<&Point> = big.iter().collect();
    small.iter().all(|p| big.contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SeedConfig;

    #[test]
    fn identical_configurations_are_equal() {
        let dom = Domain::cube(2, 6).unwrap();
        let (one, two) = SeedConfig::half_axis(2, 6).enumerate().unwrap();
        let f = WeightField::single(1, 0, 1.0).unwrap();
        let r = coupled_pair(
            &dom,
            (&one, &two),
            &dom,
            (&one, &two),
            &f,
            &StopRule::exhaust(),
            CouplingKind::Containment,
        )
        .unwrap();
        assert!(r.holds());
        assert_eq!(r.checks as usize, dom.volume());
    }

    #[test]
    fn preconditions_are_enforced() {
        let dom = Domain::cube(2, 6).unwrap();
        let f = WeightField::single(1, 0, 1.0).unwrap();
        let (h1, h2) = SeedConfig::hyperplane(2, 6).enumerate().unwrap();
        let (l1, l2) = SeedConfig::half_axis(2, 6).enumerate().unwrap();
        let reversed = coupled_pair(&dom, (&h1, &h2), &dom, (&l1, &l2), &f, &StopRule::exhaust(), CouplingKind::Containment);
        assert!(matches!(reversed, Err(crate::Error::Config(_))));
        let big = Domain::cube(2, 7).unwrap();
        let sub = coupled_pair(&big, (&l1, &l2), &dom, (&l1, &l2), &f, &StopRule::exhaust(), CouplingKind::SubgraphDominance);
        assert!(matches!(sub, Err(crate::Error::Config(_))));
    }
}
