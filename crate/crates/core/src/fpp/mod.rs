//! One-type first-passage computations.
//!
//! All entry points share one multi-source Dijkstra search over a
//! [`Domain`]. Edge weights come from the stateless [`WeightField`] and are
//! evaluated on first touch, so a run only pays for the region it reaches.
//! Per-site arrays are allocated zeroed (which the allocator maps lazily),
//! so memory also tracks the visited region.

mod descent;
mod records;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::ControlFlow;

use crate::error::{contract_err, domain_err, Result};
use crate::lattice::{Domain, Point, SeedRegion, MAX_DIM};
use crate::weights::{InfectionType, WeightField};

pub use descent::{descent_counts, DescentCounts};
pub use records::{hampered_front, record_trace, ProbeCount, RecordTrace};

pub(crate) const NO_PRED: u8 = u8::MAX;

const UNTOUCHED: u8 = 0;
const TENTATIVE: u8 = 1;
const SETTLED: u8 = 2;

/// Heap key: `(time bits, site << 32 | source)`. Passage times are
/// nonnegative, so their IEEE bit patterns order like the values.
type Entry = Reverse<(u64, u64)>;

fn entry(time: f64, site: usize, source: u32) -> Entry {
    Reverse((time.to_bits(), (site as u64) << 32 | source as u64))
}

/// A site the search has just fixed, handed to stop callbacks.
#[derive(Clone, Copy, Debug)]
pub struct Settled<'a> {
    pub index: usize,
    pub coords: &'a [i32],
    pub time: f64,
    pub source: usize,
}

/// Outcome of a passage-time search: for every settled site its passage
/// time, the source it descends from and the neighbour it was reached
/// through.
#[derive(Clone, Debug)]
pub struct PassageResult {
    domain: Domain,
    sources: Vec<Point>,
    time: Vec<f64>,
    source_of: Vec<u32>,
    pred: Vec<u8>,
    status: Vec<u8>,
    order: Vec<usize>,
}

impl PassageResult {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn sources(&self) -> &[Point] {
        &self.sources
    }

    fn settled_index(&self, p: &Point) -> Option<usize> {
        self.domain.index_of(p).filter(|&i| self.status[i] == SETTLED)
    }

    pub fn time(&self, p: &Point) -> Option<f64> {
        self.settled_index(p).map(|i| self.time[i])
    }

    /// The source the fastest path to `p` starts from.
    pub fn descent(&self, p: &Point) -> Option<Point> {
        self.settled_index(p).map(|i| self.sources[self.source_of[i] as usize - 1])
    }

    /// Ordinal of [`PassageResult::descent`] in the source list.
    pub fn descent_ordinal(&self, p: &Point) -> Option<usize> {
        self.settled_index(p).map(|i| self.source_of[i] as usize - 1)
    }

    /// Previous site on the fastest path; `None` for sources and unsettled sites.
    pub fn predecessor(&self, p: &Point) -> Option<Point> {
        let i = self.settled_index(p)?;
        let code = self.pred[i];
        (code != NO_PRED).then(|| step_point(p, code))
    }

    pub fn is_settled(&self, p: &Point) -> bool {
        self.settled_index(p).is_some()
    }

    /// Number of settled sites.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Settled sites in settle order (nondecreasing time).
    pub fn settled(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.order.iter().map(|&i| (self.domain.point_at(i), self.time[i]))
    }
}

pub(crate) fn step_point(p: &Point, code: u8) -> Point {
    let axis = (code >> 1) as usize;
    p.shifted(axis, if code & 1 == 0 { -1 } else { 1 })
}

/// Configurable passage-time search over a fixed domain and weight field.
#[derive(Clone, Copy, Debug)]
pub struct PassageSearch<'a> {
    domain: &'a Domain,
    field: &'a WeightField,
    ty: InfectionType,
    bound: Option<i32>,
    time_limit: f64,
}

impl<'a> PassageSearch<'a> {
    pub fn new(domain: &'a Domain, field: &'a WeightField, ty: InfectionType) -> Self {
        PassageSearch {
            domain,
            field,
            ty,
            bound: None,
            time_limit: f64::INFINITY,
        }
    }

    /// Never relax into sites with `x1 > bound`.
    pub fn restricted(mut self, bound: i32) -> Self {
        self.bound = Some(bound);
        self
    }

    /// Leave every site whose passage time exceeds `limit` unsettled.
    pub fn until_time(mut self, limit: f64) -> Self {
        self.time_limit = limit;
        self
    }

    pub fn run(&self, sources: &[Point]) -> Result<PassageResult> {
        self.run_until(sources, |_| ControlFlow::Continue(()))
    }

    /// Runs until the domain is exhausted, the time limit is passed, or
    /// `on_settle` breaks (the site it was called with stays settled).
    pub fn run_until<F>(&self, sources: &[Point], mut on_settle: F) -> Result<PassageResult>
    where
        F: FnMut(Settled<'_>) -> ControlFlow<()>,
    {
        let dom = self.domain;
        if sources.is_empty() {
            return Err(contract_err!("passage search needs at least one source"));
        }
        let volume = dom.volume();
        let mut time = vec![0.0f64; volume];
        let mut source_of = vec![0u32; volume];
        let mut pred = vec![0u8; volume];
        let mut status = vec![UNTOUCHED; volume];
        let mut order = Vec::new();
        let mut heap = BinaryHeap::new();

        for (k, s) in sources.iter().enumerate() {
            let idx = dom
                .index_of(s)
                .ok_or_else(|| domain_err!("source {s} lies outside the domain"))?;
            if let Some(b) = self.bound {
                if s.x1() > b {
                    return Err(contract_err!("source {s} has x1 > {b}"));
                }
            }
            if status[idx] != UNTOUCHED {
                continue;
            }
            status[idx] = TENTATIVE;
            source_of[idx] = k as u32 + 1;
            pred[idx] = NO_PRED;
            heap.push(entry(0.0, idx, k as u32));
        }

        let dim = dom.dim();
        let mut coords = [0i32; MAX_DIM];
        while let Some(Reverse((bits, key))) = heap.pop() {
            let (t, site, source) = (f64::from_bits(bits), (key >> 32) as usize, key as u32);
            if status[site] == SETTLED || t != time[site] || source + 1 != source_of[site] {
                continue;
            }
            if t > self.time_limit {
                break;
            }
            status[site] = SETTLED;
            order.push(site);
            dom.decode(site, &mut coords);
            let settled = Settled {
                index: site,
                coords: &coords[..dim],
                time: t,
                source: source as usize,
            };
            if on_settle(settled).is_break() {
                break;
            }
            for code in 0..2 * dim {
                let Some(next) = dom.step(site, &coords, code) else {
                    continue;
                };
                if status[next] == SETTLED {
                    continue;
                }
                let axis = code >> 1;
                if axis == 0 && code & 1 == 1 && self.bound.is_some_and(|b| coords[0] >= b) {
                    continue;
                }
                let w = if code & 1 == 0 {
                    coords[axis] -= 1;
                    let w = self.field.weight_at(&coords[..dim], axis, self.ty);
                    coords[axis] += 1;
                    w
                } else {
                    self.field.weight_at(&coords[..dim], axis, self.ty)
                };
                let candidate = t + w;
                let better = match status[next] {
                    UNTOUCHED => true,
                    _ => {
                        candidate < time[next]
                            || (candidate == time[next]
                                && sources[source as usize] < sources[source_of[next] as usize - 1])
                    }
                };
                if better {
                    status[next] = TENTATIVE;
                    time[next] = candidate;
                    source_of[next] = source + 1;
                    pred[next] = (code ^ 1) as u8;
                    heap.push(entry(candidate, next, source));
                }
            }
        }

        Ok(PassageResult {
            domain: dom.clone(),
            sources: sources.to_vec(),
            time,
            source_of,
            pred,
            status,
            order,
        })
    }
}

/// Exact multi-source passage times from `sources` over `domain`.
pub fn passage_times(
    domain: &Domain,
    sources: &[Point],
    field: &WeightField,
    ty: InfectionType,
) -> Result<PassageResult> {
    PassageSearch::new(domain, field, ty).run(sources)
}

/// Passage times over paths that never visit a site with `x1 > bound`.
pub fn restricted_passage_times(
    domain: &Domain,
    sources: &[Point],
    field: &WeightField,
    ty: InfectionType,
    bound: i32,
) -> Result<PassageResult> {
    PassageSearch::new(domain, field, ty).restricted(bound).run(sources)
}

/// Target sets for [`passage_time_to_set`].
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Site(Point),
    /// The hyperplane `{x1 = n}` (intersected with the domain).
    Hyperplane(i32),
    Region(SeedRegion),
}

impl Target {
    fn contains(&self, p: &Point) -> bool {
        match self {
            Target::Site(q) => p == q,
            Target::Hyperplane(n) => p.x1() == *n,
            Target::Region(r) => r.contains(p),
        }
    }

    fn meets(&self, domain: &Domain) -> Result<bool> {
        Ok(match self {
            Target::Site(q) => domain.contains(q),
            Target::Hyperplane(n) => {
                let (lo, hi) = domain.x1_range();
                (lo..=hi).contains(n)
            }
            Target::Region(r) => r.enumerate(domain.dim())?.iter().any(|p| domain.contains(p)),
        })
    }
}

/// Minimal passage time from `source` to any site of `target`, stopping as
/// soon as the first target site is settled.
pub fn passage_time_to_set(
    domain: &Domain,
    source: &Point,
    target: &Target,
    field: &WeightField,
    ty: InfectionType,
) -> Result<f64> {
    if !target.meets(domain)? {
        return Err(domain_err!("target {target:?} does not meet the domain"));
    }
    let dim = domain.dim();
    let mut hit = None;
    PassageSearch::new(domain, field, ty).run_until(std::slice::from_ref(source), |s| {
        let p = Point::from_array(dim, pad(s.coords));
        if target.contains(&p) {
            hit = Some(s.time);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    hit.ok_or_else(|| domain_err!("target {target:?} unreachable"))
}

pub(crate) fn pad(coords: &[i32]) -> [i32; MAX_DIM] {
    let mut c = [0; MAX_DIM];
    c[..coords.len()].copy_from_slice(coords);
    c
}
