use super::{check_dim, Point, MAX_DIM};
use crate::error::{config_err, domain_err, Result};

/// Upper bound on the number of sites a domain may hold. Engines keep dense
/// per-site arrays (lazily zeroed), so this bounds their address space.
const MAX_VOLUME: u64 = 1 << 31;

/// The shapes of finite region the engines run on. Every kind is an
/// axis-aligned box; sites outside are never susceptible (hard walls).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    /// `|x_i| <= half_width` on every axis.
    Box { half_width: u32 },
    /// `x1_min <= x1 <= x1_max` and `|x_i| <= radius` for i >= 2: the
    /// hampered region around the first axis, cut to a finite x1 range.
    Tube { radius: u32, x1_min: i32, x1_max: i32 },
    /// `x1_min <= x1 <= x1_max` and `|x_i| <= half_width` for i >= 2.
    Slab {
        x1_min: i32,
        x1_max: i32,
        half_width: u32,
    },
}

/// A finite box of Z^d with a dense site numbering.
///
/// Sites are numbered in row-major order with x1 the most significant
/// coordinate, so index order coincides with lexicographic point order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    dim: usize,
    kind: DomainKind,
    lo: [i32; MAX_DIM],
    hi: [i32; MAX_DIM],
    strides: [usize; MAX_DIM],
    volume: usize,
}

impl Domain {
    pub fn new(dim: usize, kind: DomainKind) -> Result<Self> {
        check_dim(dim)?;
        let (x1_lo, x1_hi, lateral) = match kind {
            DomainKind::Box { half_width } => {
                let m = to_i32(half_width)?;
                (-m, m, half_width)
            }
            DomainKind::Tube {
                radius,
                x1_min,
                x1_max,
            } => (x1_min, x1_max, radius),
            DomainKind::Slab {
                x1_min,
                x1_max,
                half_width,
            } => (x1_min, x1_max, half_width),
        };
        if x1_lo > x1_hi {
            return Err(config_err!("empty x1 range [{x1_lo}, {x1_hi}]"));
        }
        let lateral = to_i32(lateral)?;
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        lo[0] = x1_lo;
        hi[0] = x1_hi;
        for i in 1..dim {
            lo[i] = -lateral;
            hi[i] = lateral;
        }
        let mut strides = [0usize; MAX_DIM];
        let mut volume: u64 = 1;
        for i in (0..dim).rev() {
            strides[i] = volume as usize;
            let extent = (hi[i] as i64 - lo[i] as i64 + 1) as u64;
            volume = volume
                .checked_mul(extent)
                .filter(|v| *v <= MAX_VOLUME)
                .ok_or_else(|| config_err!("domain {kind:?} in d={dim} exceeds {MAX_VOLUME} sites"))?;
        }
        Ok(Domain {
            dim,
            kind,
            lo,
            hi,
            strides,
            volume: volume as usize,
        })
    }

    /// The cube `[-half_width, half_width]^d`.
    pub fn cube(dim: usize, half_width: u32) -> Result<Self> {
        Self::new(dim, DomainKind::Box { half_width })
    }

    pub fn tube(dim: usize, radius: u32, x1_min: i32, x1_max: i32) -> Result<Self> {
        Self::new(
            dim,
            DomainKind::Tube {
                radius,
                x1_min,
                x1_max,
            },
        )
    }

    pub fn slab(dim: usize, x1_min: i32, x1_max: i32, half_width: u32) -> Result<Self> {
        Self::new(
            dim,
            DomainKind::Slab {
                x1_min,
                x1_max,
                half_width,
            },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn volume(&self) -> usize {
        self.volume
    }

    pub fn x1_range(&self) -> (i32, i32) {
        (self.lo[0], self.hi[0])
    }

    pub fn lower_corner(&self) -> Point {
        Point::from_array(self.dim, self.lo)
    }

    pub fn upper_corner(&self) -> Point {
        Point::from_array(self.dim, self.hi)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim
            && p.coords()
                .iter()
                .enumerate()
                .all(|(i, &c)| self.lo[i] <= c && c <= self.hi[i])
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        Some(
            p.coords()
                .iter()
                .enumerate()
                .map(|(i, &c)| (c - self.lo[i]) as usize * self.strides[i])
                .sum(),
        )
    }

    pub fn point_at(&self, index: usize) -> Point {
        let mut c = [0; MAX_DIM];
        self.decode(index, &mut c);
        Point::from_array(self.dim, c)
    }

    #[inline]
    pub(crate) fn decode(&self, mut index: usize, out: &mut [i32; MAX_DIM]) {
        debug_assert!(index < self.volume);
        for i in 0..self.dim {
            let q = index / self.strides[i];
            index -= q * self.strides[i];
            out[i] = self.lo[i] + q as i32;
        }
    }

    /// Index of the neighbour in direction `code` (`2*axis` is the minus
    /// side, `2*axis + 1` the plus side), if it lies inside the domain.
    #[inline]
    pub(crate) fn step(&self, index: usize, coords: &[i32; MAX_DIM], code: usize) -> Option<usize> {
        let axis = code >> 1;
        if code & 1 == 0 {
            (coords[axis] > self.lo[axis]).then(|| index - self.strides[axis])
        } else {
            (coords[axis] < self.hi[axis]).then(|| index + self.strides[axis])
        }
    }

    /// Nearest neighbours of `p` inside the domain, in axis order with the
    /// minus side before the plus side.
    pub fn neighbors(&self, p: &Point) -> Result<Vec<Point>> {
        if !self.contains(p) {
            return Err(domain_err!("{p} is outside {:?}", self.kind));
        }
        let mut out = Vec::with_capacity(2 * self.dim);
        for axis in 0..self.dim {
            for delta in [-1, 1] {
                let q = p.shifted(axis, delta);
                if self.contains(&q) {
                    out.push(q);
                }
            }
        }
        Ok(out)
    }

    /// All sites, in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.volume).map(|i| self.point_at(i))
    }

    pub fn is_subdomain_of(&self, other: &Domain) -> bool {
        self.dim == other.dim && (0..self.dim).all(|i| other.lo[i] <= self.lo[i] && self.hi[i] <= other.hi[i])
    }

    /// Largest `r` such that the L∞ ball of radius `r` about `p` fits in the
    /// domain, or `None` when `p` is outside.
    pub fn inner_radius(&self, p: &Point) -> Option<u32> {
        if !self.contains(p) {
            return None;
        }
        (0..self.dim)
            .map(|i| (p.coords[i] - self.lo[i]).min(self.hi[i] - p.coords[i]) as u32)
            .min()
    }
}

fn to_i32(v: u32) -> Result<i32> {
    i32::try_from(v).map_err(|_| config_err!("extent {v} does not fit the coordinate range"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[i32]) -> Point {
        Point::new(c).unwrap()
    }

    #[test]
    fn interior_point_has_all_neighbours() {
        let dom = Domain::cube(2, 5).unwrap();
        assert_eq!(
            dom.neighbors(&pt(&[0, 0])).unwrap(),
            vec![pt(&[-1, 0]), pt(&[1, 0]), pt(&[0, -1]), pt(&[0, 1])]
        );
    }

    #[test]
    fn boundary_clips_neighbours() {
        let dom = Domain::cube(2, 5).unwrap();
        assert_eq!(
            dom.neighbors(&pt(&[5, 0])).unwrap(),
            vec![pt(&[4, 0]), pt(&[5, -1]), pt(&[5, 1])]
        );
    }

    #[test]
    fn thin_tube_is_the_axis() {
        let dom = Domain::tube(2, 0, 0, 10).unwrap();
        assert_eq!(dom.neighbors(&pt(&[3, 0])).unwrap(), vec![pt(&[2, 0]), pt(&[4, 0])]);
        assert_eq!(dom.volume(), 11);
    }

    #[test]
    fn outside_point_is_a_domain_error() {
        let dom = Domain::cube(2, 1).unwrap();
        assert!(matches!(dom.neighbors(&pt(&[2, 0])), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn index_round_trip_and_lex_order() {
        let dom = Domain::slab(3, -2, 1, 2).unwrap();
        let pts: Vec<Point> = dom.points().collect();
        assert_eq!(pts.len(), dom.volume());
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        for (i, p) in pts.iter().enumerate() {
            assert!(dom.contains(p));
            assert_eq!(dom.index_of(p), Some(i));
        }
    }

    #[test]
    fn step_matches_neighbors() {
        let dom = Domain::tube(3, 1, -1, 2).unwrap();
        for p in dom.points() {
            let idx = dom.index_of(&p).unwrap();
            let mut c = [0; MAX_DIM];
            dom.decode(idx, &mut c);
            let stepped: Vec<Point> = (0..2 * dom.dim())
                .filter_map(|code| dom.step(idx, &c, code))
                .map(|j| dom.point_at(j))
                .collect();
            assert_eq!(stepped, dom.neighbors(&p).unwrap());
        }
    }

    #[test]
    fn membership_by_kind() {
        let tube = Domain::tube(2, 1, 0, 4).unwrap();
        assert!(tube.contains(&pt(&[4, -1])));
        assert!(!tube.contains(&pt(&[-1, 0])));
        assert!(!tube.contains(&pt(&[2, 2])));
        let slab = Domain::slab(2, -3, 3, 10).unwrap();
        assert!(slab.contains(&pt(&[-3, 10])));
        assert!(!slab.contains(&pt(&[4, 0])));
    }

    #[test]
    fn subdomains_and_inner_radius() {
        let small = Domain::tube(2, 1, 0, 3).unwrap();
        let big = Domain::cube(2, 4).unwrap();
        assert!(small.is_subdomain_of(&big));
        assert!(!big.is_subdomain_of(&small));
        assert_eq!(big.inner_radius(&pt(&[0, 0])), Some(4));
        assert_eq!(big.inner_radius(&pt(&[3, -1])), Some(1));
        assert_eq!(big.inner_radius(&pt(&[5, 0])), None);
    }

    #[test]
    fn rejects_empty_and_huge() {
        assert!(Domain::slab(2, 3, 2, 1).is_err());
        assert!(Domain::cube(4, 1000).is_err());
    }
}
