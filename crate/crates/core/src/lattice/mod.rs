//! Integer lattice geometry: sites, bonds, finite domains, seed regions and
//! the signed-permutation symmetries of Z^d.

mod domain;
mod seeds;
mod symmetry;

use std::fmt;

use crate::error::{config_err, contract_err, Result};

pub use domain::{Domain, DomainKind};
pub use seeds::{SeedConfig, SeedRegion, Slope};
pub use symmetry::Symmetry;

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 6;

/// A site of Z^d, 2 <= d <= [`MAX_DIM`].
///
/// Unused trailing coordinates are kept at zero so that the derived
/// `Eq`/`Ord`/`Hash` agree with coordinate-wise comparison; `Ord` is the
/// lexicographic order on `(x1, .., xd)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    dim: u8,
    coords: [i32; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[i32]) -> Result<Self> {
        check_dim(coords.len())?;
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point {
            dim: coords.len() as u8,
            coords: c,
        })
    }

    pub fn origin(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Point {
            dim: dim as u8,
            coords: [0; MAX_DIM],
        })
    }

    /// The axis site `n·e1 = (n, 0, .., 0)`.
    pub fn on_axis(dim: usize, n: i32) -> Result<Self> {
        let mut p = Point::origin(dim)?;
        p.coords[0] = n;
        Ok(p)
    }

    pub(crate) fn from_array(dim: usize, coords: [i32; MAX_DIM]) -> Self {
        debug_assert!((2..=MAX_DIM).contains(&dim));
        debug_assert!(coords[dim..].iter().all(|&c| c == 0));
        Point {
            dim: dim as u8,
            coords,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn x1(&self) -> i32 {
        self.coords[0]
    }

    /// `max_{i >= 2} |x_i|`.
    pub fn lateral_norm(&self) -> u32 {
        self.coords()[1..]
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn linf_norm(&self) -> u32 {
        self.coords()
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn linf_distance(&self, other: &Point) -> u32 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }

    /// Translate by `delta` along `axis`.
    pub fn shifted(&self, axis: usize, delta: i32) -> Point {
        let mut p = *self;
        p.coords[axis] += delta;
        p
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(config_err!("dimension must be in 2..={MAX_DIM}, got {dim}"))
    }
}

/// An undirected nearest-neighbour bond, stored canonically as its
/// lexicographically smaller endpoint plus the axis it is parallel to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    low: Point,
    axis: u8,
}

impl Edge {
    /// Canonical bond between two nearest neighbours, in either order.
    pub fn new(p: Point, q: Point) -> Result<Self> {
        if p.dim != q.dim {
            return Err(contract_err!("edge endpoints {p} and {q} differ in dimension"));
        }
        let mut axis = None;
        for i in 0..p.dim() {
            match p.coords[i].abs_diff(q.coords[i]) {
                0 => {}
                1 if axis.is_none() => axis = Some(i),
                _ => return Err(contract_err!("{p} and {q} are not nearest neighbours")),
            }
        }
        let axis = axis.ok_or_else(|| contract_err!("degenerate edge at {p}"))?;
        Ok(Edge {
            low: p.min(q),
            axis: axis as u8,
        })
    }

    pub fn low(&self) -> Point {
        self.low
    }

    pub fn high(&self) -> Point {
        self.low.shifted(self.axis as usize, 1)
    }

    pub fn axis(&self) -> usize {
        self.axis as usize
    }
}
