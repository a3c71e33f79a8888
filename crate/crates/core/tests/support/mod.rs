//! Exhaustive path enumeration shared by the oracle tests and the
//! acceptance run.
#![allow(dead_code)]

use richardson_core::fpp::{passage_times, restricted_passage_times};
use richardson_core::lattice::{Domain, Edge, Point};
use richardson_core::weights::{ClockMode, InfectionType, WeightField};

pub fn pt(c: &[i32]) -> Point {
    Point::new(c).unwrap()
}

/// Minimal path sums over all simple paths from any source, accumulated
/// from the source outwards; `bound` excludes sites with x1 > bound.
pub fn brute_force(dom: &Domain, sources: &[Point], f: &WeightField, bound: Option<i32>) -> Vec<(Point, f64)> {
    let allowed = |p: &Point| bound.is_none_or(|b| p.x1() <= b);
    let points: Vec<Point> = dom.points().filter(allowed).collect();
    let mut best: Vec<f64> = vec![f64::INFINITY; points.len()];
    fn walk(
        dom: &Domain,
        f: &WeightField,
        allowed: &dyn Fn(&Point) -> bool,
        points: &[Point],
        best: &mut [f64],
        path: &mut Vec<Point>,
        t: f64,
    ) {
        let here = *path.last().unwrap();
        let k = points.iter().position(|p| *p == here).unwrap();
        best[k] = best[k].min(t);
        for q in dom.neighbors(&here).unwrap() {
            if !allowed(&q) || path.contains(&q) {
                continue;
            }
            let w = f.weight(&Edge::new(here, q).unwrap(), InfectionType::One);
            path.push(q);
            walk(dom, f, allowed, points, best, path, t + w);
            path.pop();
        }
    }
    for s in sources {
        walk(dom, f, &allowed, &points, &mut best, &mut vec![*s], 0.0);
    }
    points.into_iter().zip(best).collect()
}

pub fn tiny_domains() -> Vec<Domain> {
    vec![
        Domain::cube(2, 1).unwrap(),
        Domain::slab(2, 0, 1, 1).unwrap(),
        Domain::tube(2, 0, 0, 9).unwrap(),
        Domain::tube(2, 1, -1, 1).unwrap(),
        Domain::slab(3, 0, 0, 1).unwrap(),
        Domain::tube(3, 0, -4, 5).unwrap(),
        Domain::slab(2, -2, 2, 0).unwrap(),
    ]
}

/// Runs every oracle comparison for seeds `0..seeds`: single source,
/// two sources, and restricted growth. Returns (comparisons, mismatches).
pub fn oracle_sweep(seeds: u64) -> (u64, u64) {
    let (mut checks, mut bad) = (0, 0);
    let mut compare = |got: Option<f64>, want: f64| {
        checks += 1;
        if got != Some(want) {
            bad += 1;
        }
    };
    for dom in tiny_domains() {
        let pts: Vec<Point> = dom.points().collect();
        let centre = pts[pts.len() / 2];
        for seed in 0..seeds {
            let f = WeightField::single(seed, 0, 1.0).unwrap();
            for s in [pts[0], centre] {
                let r = passage_times(&dom, &[s], &f, InfectionType::One).unwrap();
                for (p, t) in brute_force(&dom, &[s], &f, None) {
                    compare(r.time(&p), t);
                }
            }
            let sources = [pts[0], pts[pts.len() - 1]];
            let f = WeightField::new(seed, 3, ClockMode::Two, 1.0, 0.5).unwrap();
            let r = passage_times(&dom, &sources, &f, InfectionType::One).unwrap();
            for (p, t) in brute_force(&dom, &sources, &f, None) {
                compare(r.time(&p), t);
            }
            let b = pts[pts.len() / 2].x1();
            let r = restricted_passage_times(&dom, &[pts[0]], &f, InfectionType::One, b).unwrap();
            for (p, t) in brute_force(&dom, &[pts[0]], &f, Some(b)) {
                compare(r.time(&p), t);
            }
        }
    }
    (checks, bad)
}
