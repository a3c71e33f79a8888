use std::ops::ControlFlow;

use super::PassageSearch;
use crate::error::{config_err, Result};
use crate::lattice::{Domain, Point, SeedRegion};
use crate::weights::{InfectionType, WeightField};

/// Number of sites of the hyperplane `{x1 = b}` whose fastest path from the
/// (truncated) hyperplane `{x1 = 0}` starts at the origin, without and with
/// the restriction `x1 <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DescentCounts {
    pub x_b: u64,
    pub x_b_star: u64,
}

/// Descent counts on the slab `x1 ∈ [-overshoot, b + overshoot]`,
/// `|x_i| <= w`, with every site of `{x1 = 0}` in the slab as a source.
pub fn descent_counts(dim: usize, b: u32, w: u32, overshoot: u32, field: &WeightField) -> Result<DescentCounts> {
    if w < b {
        return Err(config_err!("lateral half-width W={w} must be at least b={b}"));
    }
    let b = b as i32;
    let over = overshoot as i32;
    let domain = Domain::slab(dim, -over, b + over, w)?;
    let mut sources = SeedRegion::Hyperplane { half_width: w }.enumerate(dim)?;
    sources.push(Point::origin(dim)?);
    sources.sort();
    let origin = sources.binary_search(&Point::origin(dim)?).expect("origin is a source");
    let plane = (2 * w as usize + 1).pow(dim as u32 - 1);

    let count = |search: PassageSearch<'_>| -> Result<u64> {
        let mut settled = 0;
        let mut hits = 0u64;
        search.run_until(&sources, |s| {
            if s.coords[0] == b {
                settled += 1;
                if s.source == origin {
                    hits += 1;
                }
                if settled == plane {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        })?;
        Ok(hits)
    };
    let search = PassageSearch::new(&domain, field, InfectionType::One);
    Ok(DescentCounts {
        x_b: count(search)?,
        x_b_star: count(search.restricted(b))?,
    })
}
