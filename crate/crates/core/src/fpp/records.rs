use std::ops::ControlFlow;

use super::PassageSearch;
use crate::error::{domain_err, Result};
use crate::lattice::{Domain, Point};
use crate::weights::{InfectionType, WeightField};

/// Counts of infected positive-axis nodes at one probe time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeCount {
    pub time: f64,
    /// `Y(t)`: axis nodes `1..=n_max` infected by `time`.
    pub infected: u64,
    /// `Y→(t)`: those among them that were records.
    pub records: u64,
    /// Some node inside the guard band was already infected, so the counts
    /// may be cut off by the horizon `n_max`.
    pub truncated: bool,
}

/// Axis passage times and record flags of a single-origin run.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordTrace {
    axis_times: Vec<Option<f64>>,
    records: Vec<Option<bool>>,
    k_guard: usize,
    probes: Vec<ProbeCount>,
}

impl RecordTrace {
    pub fn n_max(&self) -> usize {
        self.axis_times.len() - 1
    }

    /// `T(n·e1)`, if it was reached before the search stopped.
    pub fn axis_time(&self, n: usize) -> Option<f64> {
        self.axis_times.get(n).copied().flatten()
    }

    /// Whether `n` was infected strictly before every node `n < l <= n_max`.
    pub fn is_record(&self, n: usize) -> Option<bool> {
        self.records.get(n).copied().flatten()
    }

    /// Flags further than the guard band from the horizon cannot be
    /// overturned by nodes beyond `n_max` in most realisations.
    pub fn is_reliable(&self, n: usize) -> bool {
        n + self.k_guard <= self.n_max()
    }

    pub fn probes(&self) -> &[ProbeCount] {
        &self.probes
    }
}

/// Runs one-type growth from the origin over `domain` until every axis node
/// `0..=n_max` is infected or the last probe time has passed.
pub fn record_trace(
    domain: &Domain,
    field: &WeightField,
    n_max: usize,
    probe_times: &[f64],
    k_guard: usize,
) -> Result<RecordTrace> {
    let dim = domain.dim();
    let origin = Point::origin(dim)?;
    let far = Point::on_axis(dim, n_max as i32)?;
    if !domain.contains(&origin) || !domain.contains(&far) {
        return Err(domain_err!("domain does not contain the axis segment 0..={n_max}"));
    }
    let mut search = PassageSearch::new(domain, field, InfectionType::One);
    if let Some(limit) = probe_times.iter().copied().reduce(f64::max) {
        search = search.until_time(limit);
    }
    let mut axis_times = vec![None; n_max + 1];
    let mut remaining = n_max + 1;
    search.run_until(&[origin], |s| {
        if s.coords[0] >= 0 && s.coords[1..].iter().all(|&c| c == 0) && s.coords[0] as usize <= n_max {
            axis_times[s.coords[0] as usize] = Some(s.time);
            remaining -= 1;
            if remaining == 0 {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;

    let mut records = vec![None; n_max + 1];
    let mut later_min = f64::INFINITY;
    for n in (0..=n_max).rev() {
        if let Some(t) = axis_times[n] {
            records[n] = Some(t < later_min);
            later_min = later_min.min(t);
        }
    }

    let guard_start = (n_max + 1).saturating_sub(k_guard).max(1);
    let probes = probe_times
        .iter()
        .map(|&time| {
            let reached = |n: &usize| axis_times[*n].is_some_and(|t| t <= time);
            ProbeCount {
                time,
                infected: (1..=n_max).filter(reached).count() as u64,
                records: (1..=n_max).filter(reached).filter(|&n| records[n] == Some(true)).count() as u64,
                truncated: (guard_start..=n_max).any(|n| reached(&n)),
            }
        })
        .collect();

    Ok(RecordTrace {
        axis_times,
        records,
        k_guard,
        probes,
    })
}

/// Axis passage times `T(n·e1)`, `n = 0..=x1_max`, for growth confined to
/// the tube `|x_i| <= b` (i >= 2), `0 <= x1 <= x1_max`.
pub fn hampered_front(dim: usize, b: u32, x1_max: u32, field: &WeightField) -> Result<Vec<f64>> {
    let domain = Domain::tube(dim, b, 0, x1_max as i32)?;
    let n = x1_max as usize;
    let mut times = vec![f64::NAN; n + 1];
    let mut remaining = n + 1;
    PassageSearch::new(&domain, field, InfectionType::One).run_until(&[Point::origin(dim)?], |s| {
        if s.coords[1..].iter().all(|&c| c == 0) {
            times[s.coords[0] as usize] = s.time;
            remaining -= 1;
            if remaining == 0 {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpp::passage_times;
    use crate::lattice::Edge;

    #[test]
    fn origin_is_a_record_and_counts_are_ordered() {
        let dom = Domain::slab(2, -20, 60, 30).unwrap();
        for seed in 0..20 {
            let f = WeightField::single(seed, 0, 1.0).unwrap();
            let tr = record_trace(&dom, &f, 40, &[2.0, 5.0, 10.0], 8).unwrap();
            assert_eq!(tr.is_record(0), Some(true));
            assert_eq!(tr.axis_time(0), Some(0.0));
            for p in tr.probes() {
                assert!(p.records <= p.infected);
            }
            assert!(tr.is_reliable(32) && !tr.is_reliable(33));
        }
    }

    #[test]
    fn flags_match_full_run() {
        let dom = Domain::slab(2, -10, 40, 20).unwrap();
        let f = WeightField::single(3, 0, 1.0).unwrap();
        let full = passage_times(&dom, &[Point::origin(2).unwrap()], &f, InfectionType::One).unwrap();
        let tr = record_trace(&dom, &f, 30, &[], 4).unwrap();
        let t = |n: usize| full.time(&Point::on_axis(2, n as i32).unwrap()).unwrap();
        for n in 0..=30 {
            assert_eq!(tr.axis_time(n), Some(t(n)));
            let expect = (n + 1..=30).all(|l| t(n) < t(l));
            assert_eq!(tr.is_record(n), Some(expect));
        }
    }

    #[test]
    fn probe_horizon_stops_early() {
        let dom = Domain::slab(2, -10, 200, 60).unwrap();
        let f = WeightField::single(1, 0, 1.0).unwrap();
        let tr = record_trace(&dom, &f, 200, &[3.0], 16).unwrap();
        assert!(tr.axis_time(200).is_none());
        let p = tr.probes()[0];
        assert_eq!(p.infected, (1..=200).filter(|&n| tr.axis_time(n).is_some()).count() as u64);
        assert!(!p.truncated);
    }

    #[test]
    fn axis_outside_domain() {
        let dom = Domain::cube(2, 5).unwrap();
        let f = WeightField::single(1, 0, 1.0).unwrap();
        assert!(matches!(record_trace(&dom, &f, 6, &[], 1), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn zero_width_tube_sums_axis_weights() {
        let f = WeightField::single(9, 0, 2.0).unwrap();
        let times = hampered_front(2, 0, 30, &f).unwrap();
        let mut acc = 0.0;
        for n in 1..=30 {
            let e = Edge::new(Point::on_axis(2, n - 1).unwrap(), Point::on_axis(2, n).unwrap()).unwrap();
            acc += f.weight(&e, InfectionType::One);
            assert_eq!(times[n as usize], acc);
        }
    }

    #[test]
    fn hampering_only_slows() {
        let f = WeightField::single(4, 0, 1.0).unwrap();
        let dom = Domain::slab(2, 0, 40, 40).unwrap();
        let free = passage_times(&dom, &[Point::origin(2).unwrap()], &f, InfectionType::One).unwrap();
        let mut previous = hampered_front(2, 0, 40, &f).unwrap();
        for b in 1..=6 {
            let times = hampered_front(2, b, 40, &f).unwrap();
            for n in 0..=40 {
                assert!(times[n] <= previous[n]);
                assert!(times[n] >= free.time(&Point::on_axis(2, n as i32).unwrap()).unwrap());
            }
            previous = times;
        }
    }
}
