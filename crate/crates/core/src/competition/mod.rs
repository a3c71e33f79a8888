//! Two-type competing growth.
//!
//! [`run_two_type`] realises the process from the edge weights of a
//! [`WeightField`]: a site takes the type of whichever infection reaches it
//! first. [`run_two_type_markov`] simulates the same law as a
//! continuous-time Markov chain with fresh randomness and serves as an
//! independent check. Both produce an [`InfectionMap`] and a [`RunOutcome`].

mod coupling;
mod markov;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{config_err, contract_err, domain_err, Result};
use crate::fpp::{step_point, NO_PRED};
use crate::lattice::{Domain, Point, SeedConfig, MAX_DIM};
use crate::weights::{InfectionType, WeightField};

pub use coupling::{coupled_pair, CouplingKind, CouplingReport};
pub use markov::{run_two_type_markov, run_two_type_markov_seeds};

const TENTATIVE: u8 = 3;

/// When a run should stop, besides running out of susceptible sites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Goal {
    /// Run until nothing is left to infect (or the horizon).
    Exhaust,
    /// Stop once type 2 reaches L∞ distance `radius` from its anchor, or
    /// once type 2 is enclosed.
    Type2Escapes { radius: u32 },
    /// Stop once both types have reached `radius` from their anchors, or
    /// once either is enclosed short of it.
    BothEscape { radius: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub goal: Goal,
    pub horizon: Option<f64>,
    /// Points distances are measured from, per type; the origin by default.
    pub anchors: Option<[Point; 2]>,
}

impl StopRule {
    pub fn exhaust() -> Self {
        StopRule {
            goal: Goal::Exhaust,
            horizon: None,
            anchors: None,
        }
    }

    pub fn type2_escapes(radius: u32) -> Self {
        StopRule {
            goal: Goal::Type2Escapes { radius },
            ..Self::exhaust()
        }
    }

    pub fn both_escape(radius: u32, anchors: [Point; 2]) -> Self {
        StopRule {
            goal: Goal::BothEscape { radius },
            horizon: None,
            anchors: Some(anchors),
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn radius(&self) -> Option<u32> {
        match self.goal {
            Goal::Exhaust => None,
            Goal::Type2Escapes { radius } | Goal::BothEscape { radius } => Some(radius),
        }
    }

    fn resolve_anchors(&self, domain: &Domain) -> Result<[Point; 2]> {
        let anchors = match self.anchors {
            Some(a) => a,
            None => [Point::origin(domain.dim())?; 2],
        };
        if let Some(r) = self.radius() {
            let needed: &[usize] = match self.goal {
                Goal::BothEscape { .. } => &[0, 1],
                _ => &[1],
            };
            for &i in needed {
                let fits = domain
                    .inner_radius(&anchors[i])
                    .is_some_and(|inner| 2 * r as u64 <= inner as u64);
                if !fits {
                    return Err(config_err!(
                        "radius R={r} too large for the domain: need half-width M >= 2R around {}",
                        anchors[i]
                    ));
                }
            }
        }
        Ok(anchors)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    ReachedRadius,
    Enclosed,
    Horizon,
    Exhausted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOutcome {
    /// Type 2 reached its stop radius.
    pub survived_to_r: bool,
    /// Both types reached the stop radius.
    pub both_reached: bool,
    /// Largest L∞ distance from the anchor reached by each type.
    pub max_distance: [u32; 2],
    /// First time type 2 had no susceptible neighbour in the domain.
    pub enclosure_time: Option<f64>,
    pub type1_enclosure_time: Option<f64>,
    /// Number of non-seed infections.
    pub event_count: u64,
    pub termination: Termination,
    /// Time of the last infection.
    pub final_time: f64,
}

impl RunOutcome {
    pub fn max_type2_distance(&self) -> u32 {
        self.max_distance[1]
    }
}

/// Per-site outcome of a two-type run.
#[derive(Clone, Debug)]
pub struct InfectionMap {
    domain: Domain,
    state: Vec<u8>,
    time: Vec<f64>,
    pred: Vec<u8>,
    order: Vec<usize>,
    seeds: usize,
}

/// One line of the infection log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfectionEvent {
    pub time: f64,
    pub site: Point,
    pub ty: InfectionType,
}

impl InfectionMap {
    fn new(domain: &Domain) -> Self {
        let volume = domain.volume();
        InfectionMap {
            domain: domain.clone(),
            state: vec![0; volume],
            time: vec![0.0; volume],
            pred: vec![0; volume],
            order: Vec::new(),
            seeds: 0,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    fn infected_index(&self, p: &Point) -> Option<usize> {
        self.domain.index_of(p).filter(|&i| matches!(self.state[i], 1 | 2))
    }

    pub fn state(&self, p: &Point) -> Option<InfectionType> {
        self.infected_index(p).map(|i| type_of(self.state[i]))
    }

    pub fn time(&self, p: &Point) -> Option<f64> {
        self.infected_index(p).map(|i| self.time[i])
    }

    /// The neighbour that passed the infection on; `None` for seeds.
    pub fn predecessor(&self, p: &Point) -> Option<Point> {
        let i = self.infected_index(p)?;
        (self.pred[i] != NO_PRED).then(|| step_point(p, self.pred[i]))
    }

    /// Number of infected sites, seeds included.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn count(&self, ty: InfectionType) -> usize {
        self.order.iter().filter(|&&i| self.state[i] == ty.label()).count()
    }

    /// Infections in the order they happened, seeds first.
    pub fn events(&self) -> impl Iterator<Item = InfectionEvent> + '_ {
        self.order.iter().map(|&i| InfectionEvent {
            time: self.time[i],
            site: self.domain.point_at(i),
            ty: type_of(self.state[i]),
        })
    }

    /// Checks the log against the map: every site appears once, times are
    /// nondecreasing, and every non-seed site was infected by a neighbour
    /// of its own type with a strictly smaller time.
    pub fn audit(&self) -> Result<()> {
        let mut seen = vec![false; self.domain.volume()];
        let mut last = 0.0;
        for (k, &i) in self.order.iter().enumerate() {
            let p = self.domain.point_at(i);
            if std::mem::replace(&mut seen[i], true) {
                return Err(contract_err!("{p} infected twice"));
            }
            if !matches!(self.state[i], 1 | 2) {
                return Err(contract_err!("{p} logged but not infected"));
            }
            let t = self.time[i];
            if t < last {
                return Err(contract_err!("log out of order at {p}"));
            }
            last = t;
            if k < self.seeds {
                if t != 0.0 || self.pred[i] != NO_PRED {
                    return Err(contract_err!("seed {p} has a history"));
                }
                continue;
            }
            let q = self
                .predecessor(&p)
                .ok_or_else(|| contract_err!("{p} has no predecessor"))?;
            if self.state(&q) != self.state(&p) || self.time(&q).is_none_or(|tq| tq >= t) {
                return Err(contract_err!("{p} was not infected by {q}"));
            }
        }
        if self.state.iter().filter(|&&s| matches!(s, 1 | 2)).count() != self.order.len() {
            return Err(contract_err!("infected sites missing from the log"));
        }
        Ok(())
    }

    /// [`InfectionMap::audit`] plus exact reproduction of every infection
    /// time from the predecessor's time and the edge weight of its type.
    pub fn audit_weights(&self, field: &WeightField) -> Result<()> {
        self.audit()?;
        for e in self.events().skip(self.seeds) {
            let q = self.predecessor(&e.site).expect("audited");
            let edge = crate::lattice::Edge::new(e.site, q)?;
            if self.time(&q).unwrap() + field.weight(&edge, e.ty) != e.time {
                return Err(contract_err!("time at {} is not reproduced by its predecessor", e.site));
            }
        }
        Ok(())
    }
}

fn type_of(state: u8) -> InfectionType {
    if state == 1 {
        InfectionType::One
    } else {
        InfectionType::Two
    }
}

/// Bookkeeping shared by both engines: writes infections into the map and
/// tracks frontier bonds, distances and stop conditions.
struct Tracker {
    map: InfectionMap,
    bonds: [u64; 2],
    sizes: [u64; 2],
    max_distance: [u32; 2],
    anchors: [[i32; MAX_DIM]; 2],
    enclosure: [Option<f64>; 2],
    goal: Goal,
    events: u64,
    last_time: f64,
}

impl Tracker {
    fn new(domain: &Domain, stop: &StopRule) -> Result<Self> {
        let anchors = stop.resolve_anchors(domain)?;
        let mut a = [[0; MAX_DIM]; 2];
        for (slot, p) in a.iter_mut().zip(&anchors) {
            if p.dim() != domain.dim() {
                return Err(config_err!("anchor {p} has the wrong dimension"));
            }
            slot[..p.dim()].copy_from_slice(p.coords());
        }
        Ok(Tracker {
            map: InfectionMap::new(domain),
            bonds: [0; 2],
            sizes: [0; 2],
            max_distance: [0; 2],
            anchors: a,
            enclosure: [None; 2],
            goal: stop.goal,
            events: 0,
            last_time: 0.0,
        })
    }

    fn is_susceptible(&self, site: usize) -> bool {
        !matches!(self.map.state[site], 1 | 2)
    }

    /// Places the seeds; rejects sites outside the domain and overlaps.
    fn seed(&mut self, type1: &[Point], type2: &[Point]) -> Result<()> {
        let dim = self.map.domain.dim();
        for (ty, seeds) in [(InfectionType::One, type1), (InfectionType::Two, type2)] {
            for p in seeds {
                if p.dim() != dim {
                    return Err(config_err!("seed {p} has the wrong dimension"));
                }
                let i = self
                    .map
                    .domain
                    .index_of(p)
                    .ok_or_else(|| domain_err!("seed {p} lies outside the domain"))?;
                match self.map.state[i] {
                    0 => self.infect(i, ty, 0.0, NO_PRED),
                    s if s == ty.label() => {}
                    _ => return Err(config_err!("seed {p} is assigned to both types")),
                }
            }
        }
        self.map.seeds = self.map.order.len();
        self.events = 0;
        Ok(())
    }

    fn infect(&mut self, site: usize, ty: InfectionType, time: f64, pred: u8) {
        debug_assert!(self.is_susceptible(site));
        let k = ty.index();
        let map = &mut self.map;
        map.state[site] = ty.label();
        map.time[site] = time;
        map.pred[site] = pred;
        map.order.push(site);
        self.sizes[k] += 1;
        self.events += 1;
        self.last_time = time;
        let mut c = [0; MAX_DIM];
        map.domain.decode(site, &mut c);
        let dim = map.domain.dim();
        for code in 0..2 * dim {
            if let Some(m) = map.domain.step(site, &c, code) {
                match map.state[m] {
                    1 | 2 => self.bonds[map.state[m] as usize - 1] -= 1,
                    _ => self.bonds[k] += 1,
                }
            }
        }
        let d = (0..dim).map(|i| c[i].abs_diff(self.anchors[k][i])).max().unwrap_or(0);
        self.max_distance[k] = self.max_distance[k].max(d);
    }

    /// Records enclosures and reports whether the goal has settled the run.
    fn check(&mut self) -> Option<Termination> {
        for k in 0..2 {
            if self.sizes[k] > 0 && self.bonds[k] == 0 && self.enclosure[k].is_none() {
                self.enclosure[k] = Some(self.last_time);
            }
        }
        match self.goal {
            Goal::Exhaust => None,
            Goal::Type2Escapes { radius } => {
                if self.sizes[1] > 0 && self.max_distance[1] >= radius {
                    Some(Termination::ReachedRadius)
                } else if self.enclosure[1].is_some() || self.sizes[1] == 0 {
                    Some(Termination::Enclosed)
                } else {
                    None
                }
            }
            Goal::BothEscape { radius } => {
                let reached = |k: usize| self.sizes[k] > 0 && self.max_distance[k] >= radius;
                if reached(0) && reached(1) {
                    Some(Termination::ReachedRadius)
                } else if (0..2).any(|k| !reached(k) && (self.enclosure[k].is_some() || self.sizes[k] == 0)) {
                    Some(Termination::Enclosed)
                } else {
                    None
                }
            }
        }
    }

    fn finish(self, termination: Termination) -> (InfectionMap, RunOutcome) {
        let reached = |k: usize| match self.goal {
            Goal::Exhaust => false,
            Goal::Type2Escapes { radius } | Goal::BothEscape { radius } => {
                self.sizes[k] > 0 && self.max_distance[k] >= radius
            }
        };
        let outcome = RunOutcome {
            survived_to_r: reached(1),
            both_reached: reached(0) && reached(1),
            max_distance: self.max_distance,
            enclosure_time: self.enclosure[1],
            type1_enclosure_time: self.enclosure[0],
            event_count: self.events,
            termination,
            final_time: self.last_time,
        };
        (self.map, outcome)
    }
}

/// Heap key: `(time bits, site << 16 | label << 8 | pred)`, so ties go to
/// the lower site, then to type 1.
type Pending = Reverse<(u64, u64)>;

fn pending(time: f64, site: usize, label: u8, pred: u8) -> Pending {
    Reverse((time.to_bits(), (site as u64) << 16 | (label as u64) << 8 | pred as u64))
}

/// Weight-based two-type run from a seed configuration. Every seed must
/// lie inside `domain`.
pub fn run_two_type(
    domain: &Domain,
    cfg: &SeedConfig,
    field: &WeightField,
    stop: &StopRule,
) -> Result<(InfectionMap, RunOutcome)> {
    if cfg.dim != domain.dim() {
        return Err(config_err!("seed configuration is {}-dimensional, domain {}", cfg.dim, domain.dim()));
    }
    let (one, two) = cfg.enumerate()?;
    run_two_type_seeds(domain, &one, &two, field, stop)
}

/// [`run_two_type`] from explicit seed lists.
pub fn run_two_type_seeds(
    domain: &Domain,
    type1: &[Point],
    type2: &[Point],
    field: &WeightField,
    stop: &StopRule,
) -> Result<(InfectionMap, RunOutcome)> {
    let mut tr = Tracker::new(domain, stop)?;
    tr.seed(type1, type2)?;
    let horizon = stop.horizon.unwrap_or(f64::INFINITY);
    let dim = domain.dim();
    let mut heap = BinaryHeap::new();
    let mut coords = [0i32; MAX_DIM];

    let relax = |tr: &mut Tracker, heap: &mut BinaryHeap<Pending>, site: usize, coords: &mut [i32; MAX_DIM]| {
        let label = tr.map.state[site];
        let ty = type_of(label);
        let t = tr.map.time[site];
        domain.decode(site, coords);
        for code in 0..2 * dim {
            let Some(m) = domain.step(site, coords, code) else {
                continue;
            };
            let state = tr.map.state[m];
            if matches!(state, 1 | 2) {
                continue;
            }
            let axis = code >> 1;
            let w = if code & 1 == 0 {
                coords[axis] -= 1;
                let w = field.weight_at(&coords[..dim], axis, ty);
                coords[axis] += 1;
                w
            } else {
                field.weight_at(&coords[..dim], axis, ty)
            };
            let candidate = t + w;
            let best = tr.map.time[m];
            if state == TENTATIVE && (candidate > best || (candidate == best && ty == InfectionType::Two)) {
                continue;
            }
            if state != TENTATIVE || candidate < best {
                tr.map.time[m] = candidate;
            }
            tr.map.state[m] = TENTATIVE;
            heap.push(pending(candidate, m, label, (code ^ 1) as u8));
        }
    };

    if let Some(end) = tr.check() {
        return Ok(tr.finish(end));
    }
    for k in 0..tr.map.order.len() {
        let site = tr.map.order[k];
        relax(&mut tr, &mut heap, site, &mut coords);
    }
    let termination = loop {
        let Some(Reverse((bits, key))) = heap.pop() else {
            break Termination::Exhausted;
        };
        let site = (key >> 16) as usize;
        if !tr.is_susceptible(site) {
            continue;
        }
        let time = f64::from_bits(bits);
        if time > horizon {
            break Termination::Horizon;
        }
        tr.infect(site, type_of((key >> 8) as u8), time, key as u8);
        if let Some(end) = tr.check() {
            break end;
        }
        relax(&mut tr, &mut heap, site, &mut coords);
    };
    Ok(tr.finish(termination))
}
