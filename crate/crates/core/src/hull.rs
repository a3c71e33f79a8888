//! Planar lattice-set geometry for shape diagnostics.

use std::collections::HashSet;

pub type Cell = (i64, i64);

fn cross(o: Cell, a: Cell, b: Cell) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

/// Convex hull (monotone chain), counter-clockwise, without collinear
/// vertices. Degenerate inputs give one or two vertices.
pub fn convex_hull(points: &[Cell]) -> Vec<Cell> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Cell> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Cell>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 2 {
        pts.truncate(1);
        return pts;
    }
    hull
}

/// Number of lattice points inside or on the boundary of a convex polygon
/// given by its vertices (any orientation).
pub fn lattice_points_in_hull(hull: &[Cell]) -> u64 {
    match hull.len() {
        0 => return 0,
        1 => return 1,
        _ => {}
    }
    let x_min = hull.iter().map(|p| p.0).min().unwrap();
    let x_max = hull.iter().map(|p| p.0).max().unwrap();
    let mut total = 0u64;
    for x in x_min..=x_max {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for k in 0..hull.len() {
            let (a, b) = (hull[k], hull[(k + 1) % hull.len()]);
            if x < a.0.min(b.0) || x > a.0.max(b.0) {
                continue;
            }
            if a.0 == b.0 {
                lo = lo.min(a.1.min(b.1));
                hi = hi.max(a.1.max(b.1));
                continue;
            }
            // y = a.1 + (b.1 - a.1)(x - a.0)/(b.0 - a.0), as num/den with den > 0
            let (mut num, mut den) = ((b.1 - a.1) as i128 * (x - a.0) as i128, (b.0 - a.0) as i128);
            if den < 0 {
                num = -num;
                den = -den;
            }
            let base = a.1 as i128;
            let floor = base + num.div_euclid(den);
            let ceil = base - (-num).div_euclid(den);
            lo = lo.min(ceil as i64);
            hi = hi.max(floor as i64);
        }
        if hi >= lo {
            total += (hi - lo + 1) as u64;
        }
    }
    total
}

/// Fraction of lattice points of the convex hull of `set` that are not in
/// `set`; 0 for convex lattice sets.
pub fn convexity_deficiency(set: &[Cell]) -> f64 {
    if set.is_empty() {
        return 0.0;
    }
    let unique: HashSet<Cell> = set.iter().copied().collect();
    let inside = lattice_points_in_hull(&convex_hull(set));
    (1.0 - unique.len() as f64 / inside as f64).max(0.0)
}

/// The eight symmetries of the square lattice fixing the origin.
pub fn dihedral(k: usize, (x, y): Cell) -> Cell {
    let (x, y) = if k & 4 != 0 { (y, x) } else { (x, y) };
    let x = if k & 1 != 0 { -x } else { x };
    let y = if k & 2 != 0 { -y } else { y };
    (x, y)
}

/// Mean over the seven non-identity dihedral maps g of `|S Δ gS| / (2|S|)`.
pub fn symmetry_deviation(set: &[Cell]) -> f64 {
    let s: HashSet<Cell> = set.iter().copied().collect();
    if s.is_empty() {
        return 0.0;
    }
    let total: f64 = (1..8)
        .map(|k| {
            let moved_out = s.iter().filter(|&&p| !s.contains(&dihedral(k, p))).count();
            // |S Δ gS| = 2 |gS \ S| because g is a bijection
            moved_out as f64 / s.len() as f64
        })
        .sum();
    total / 7.0
}
