use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::{check_dim, Domain, Point, MAX_DIM};
use crate::error::{config_err, Error, Result};

/// Non-negative rational slope `num/den`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slope {
    num: u32,
    den: u32,
}

impl Slope {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(config_err!("slope denominator must be positive"));
        }
        let g = gcd(num, den);
        Ok(Slope {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    /// `floor(self * depth)`.
    fn scaled_floor(&self, depth: u32) -> u64 {
        self.num as u64 * depth as u64 / self.den as u64
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Slope {
    type Err = Error;

    /// Accepts `p/q`, an integer, or a finite decimal such as `1.25`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || config_err!("invalid slope {s:?}");
        if let Some((p, q)) = s.split_once('/') {
            return Slope::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
        }
        match s.split_once('.') {
            None => Slope::new(s.trim().parse().map_err(|_| bad())?, 1),
            Some((int, frac)) => {
                if frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let den = 10u64.pow(frac.len() as u32);
                let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
                let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
                let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
                let g = gcd_u64(num, den);
                Slope::new(
                    u32::try_from(num / g).map_err(|_| bad())?,
                    u32::try_from(den / g).map_err(|_| bad())?,
                )
            }
        }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Declarative description of a set of initially infected sites.
///
/// The unbounded regions are truncated: `Hyperplane` to lateral half-width
/// `W`, `HalfAxis` and `Cone` to depth `L`. All three exclude the origin,
/// which is where the opposing single seed sits in the standard setups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedRegion {
    Origin,
    /// `{x : x1 = 0, 0 < max_{i>=2} |x_i| <= W}`.
    Hyperplane { half_width: u32 },
    /// `{(-k, 0, .., 0) : 1 <= k <= L}`.
    HalfAxis { depth: u32 },
    /// `{x : -L <= x1 <= -1, max_{i>=2} |x_i| <= s·|x1|}`.
    Cone { slope: Slope, depth: u32 },
    Explicit(Vec<Point>),
    Empty,
}

impl SeedRegion {
    pub fn contains(&self, p: &Point) -> bool {
        match self {
            SeedRegion::Origin => p.linf_norm() == 0,
            SeedRegion::Hyperplane { half_width } => {
                let lat = p.lateral_norm();
                p.x1() == 0 && lat > 0 && lat <= *half_width
            }
            SeedRegion::HalfAxis { depth } => {
                p.lateral_norm() == 0 && p.x1() < 0 && p.x1().unsigned_abs() <= *depth
            }
            SeedRegion::Cone { slope, depth } => {
                let k = p.x1().unsigned_abs();
                p.x1() < 0
                    && k <= *depth
                    && p.lateral_norm() as u64 * slope.den as u64 <= slope.num as u64 * k as u64
            }
            SeedRegion::Explicit(points) => points.contains(p),
            SeedRegion::Empty => false,
        }
    }

    /// Truncation parameter of an unbounded region (`W` or `L`).
    pub fn window(&self) -> Option<u32> {
        match self {
            SeedRegion::Hyperplane { half_width } => Some(*half_width),
            SeedRegion::HalfAxis { depth } | SeedRegion::Cone { depth, .. } => Some(*depth),
            _ => None,
        }
    }

    /// Finite, duplicate-free list of the region's sites in a fixed order.
    pub fn enumerate(&self, dim: usize) -> Result<Vec<Point>> {
        check_dim(dim)?;
        let origin = Point::origin(dim)?;
        Ok(match self {
            SeedRegion::Origin => vec![origin],
            SeedRegion::Empty => Vec::new(),
            SeedRegion::Hyperplane { half_width } => lateral_box(dim, 0, *half_width)?
                .into_iter()
                .filter(|p| p.lateral_norm() > 0)
                .collect(),
            SeedRegion::HalfAxis { depth } => (1..=*depth)
                .map(|k| Point::on_axis(dim, -(k as i32)))
                .collect::<Result<_>>()?,
            SeedRegion::Cone { slope, depth } => {
                let mut out = Vec::new();
                for k in 1..=*depth {
                    let w = u32::try_from(slope.scaled_floor(k))
                        .map_err(|_| config_err!("cone too wide at depth {k}"))?;
                    out.extend(lateral_box(dim, -(k as i32), w)?);
                }
                out
            }
            SeedRegion::Explicit(points) => {
                let mut seen = HashSet::with_capacity(points.len());
                let mut out = Vec::with_capacity(points.len());
                for p in points {
                    if p.dim() != dim {
                        return Err(config_err!("explicit seed {p} is not {dim}-dimensional"));
                    }
                    if seen.insert(*p) {
                        out.push(*p);
                    }
                }
                out
            }
        })
    }
}

/// `{(x1, y) : max |y_i| <= w}` in lexicographic order.
fn lateral_box(dim: usize, x1: i32, w: u32) -> Result<Vec<Point>> {
    let w = i32::try_from(w).map_err(|_| config_err!("lateral width {w} too large"))?;
    let side = 2 * w as u64 + 1;
    let count = side
        .checked_pow(dim as u32 - 1)
        .filter(|c| *c <= 1 << 28)
        .ok_or_else(|| config_err!("lateral window of width {w} in d={dim} is too large"))?;
    let mut out = Vec::with_capacity(count as usize);
    let mut c = [0i32; MAX_DIM];
    c[0] = x1;
    for i in 1..dim {
        c[i] = -w;
    }
    loop {
        out.push(Point::from_array(dim, c));
        // odometer increment over axes dim-1 .. 1
        let mut axis = dim - 1;
        loop {
            if axis == 0 {
                return Ok(out);
            }
            if c[axis] < w {
                c[axis] += 1;
                break;
            }
            c[axis] = -w;
            axis -= 1;
        }
    }
}

impl fmt::Display for SeedRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedRegion::Origin => f.write_str("origin"),
            SeedRegion::Empty => f.write_str("empty"),
            SeedRegion::Hyperplane { half_width } => write!(f, "hyperplane:W={half_width}"),
            SeedRegion::HalfAxis { depth } => write!(f, "halfaxis:L={depth}"),
            SeedRegion::Cone { slope, depth } => write!(f, "cone:s={slope},L={depth}"),
            SeedRegion::Explicit(points) => {
                f.write_str("explicit:[")?;
                for (i, p) in points.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl FromStr for SeedRegion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let params = |args: Option<&str>| -> Result<Vec<(String, String)>> {
            let args = args.ok_or_else(|| config_err!("region {head:?} needs parameters"))?;
            args.split(',')
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| config_err!("expected key=value in {kv:?}"))
                })
                .collect()
        };
        let int = |key: &str, v: &str| -> Result<u32> {
            v.parse()
                .map_err(|_| config_err!("region parameter {key} must be a non-negative integer, got {v:?}"))
        };
        match head {
            "origin" | "empty" if args.is_some() => Err(config_err!("region {head:?} takes no parameters")),
            "origin" => Ok(SeedRegion::Origin),
            "empty" => Ok(SeedRegion::Empty),
            "hyperplane" => match params(args)?.as_slice() {
                [(k, v)] if k == "W" => Ok(SeedRegion::Hyperplane {
                    half_width: int(k, v)?,
                }),
                _ => Err(config_err!("expected hyperplane:W=<int>, got {s:?}")),
            },
            "halfaxis" => match params(args)?.as_slice() {
                [(k, v)] if k == "L" => Ok(SeedRegion::HalfAxis { depth: int(k, v)? }),
                _ => Err(config_err!("expected halfaxis:L=<int>, got {s:?}")),
            },
            "cone" => match params(args)?.as_slice() {
                [(ks, vs), (kl, vl)] if ks == "s" && kl == "L" => Ok(SeedRegion::Cone {
                    slope: vs.parse()?,
                    depth: int(kl, vl)?,
                }),
                _ => Err(config_err!("expected cone:s=<rational>,L=<int>, got {s:?}")),
            },
            "explicit" => parse_explicit(args.unwrap_or_default()),
            _ => Err(config_err!("unknown region {head:?}")),
        }
    }
}

fn parse_explicit(body: &str) -> Result<SeedRegion> {
    let inner = body
        .trim()
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| config_err!("explicit list must be bracketed: {body:?}"))?;
    let mut points = Vec::new();
    for item in inner.split(';').map(str::trim).filter(|i| !i.is_empty()) {
        let coords = item
            .strip_prefix('(')
            .and_then(|i| i.strip_suffix(')'))
            .ok_or_else(|| config_err!("point must be parenthesised: {item:?}"))?
            .split(',')
            .map(|c| c.trim().parse::<i32>().map_err(|_| config_err!("bad coordinate in {item:?}")))
            .collect::<Result<Vec<_>>>()?;
        points.push(Point::new(&coords)?);
    }
    if let Some(first) = points.first() {
        if points.iter().any(|p| p.dim() != first.dim()) {
            return Err(config_err!("explicit points mix dimensions"));
        }
    }
    Ok(SeedRegion::Explicit(points))
}

/// An initial two-type configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedConfig {
    pub dim: usize,
    pub type1: SeedRegion,
    pub type2: SeedRegion,
}

impl SeedConfig {
    pub fn new(dim: usize, type1: SeedRegion, type2: SeedRegion) -> Self {
        SeedConfig { dim, type1, type2 }
    }

    /// Type 1 on the truncated hyperplane minus the origin, type 2 at the origin.
    pub fn hyperplane(dim: usize, half_width: u32) -> Self {
        Self::new(dim, SeedRegion::Hyperplane { half_width }, SeedRegion::Origin)
    }

    /// Type 1 on the truncated negative half-axis, type 2 at the origin.
    pub fn half_axis(dim: usize, depth: u32) -> Self {
        Self::new(dim, SeedRegion::HalfAxis { depth }, SeedRegion::Origin)
    }

    /// Smallest truncation window among the two regions, if any is unbounded.
    pub fn window(&self) -> Option<u32> {
        match (self.type1.window(), self.type2.window()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Both seed lists; fails when they share a site.
    pub fn enumerate(&self) -> Result<(Vec<Point>, Vec<Point>)> {
        let one = self.type1.enumerate(self.dim)?;
        let two = self.type2.enumerate(self.dim)?;
        let set: HashSet<&Point> = two.iter().collect();
        if let Some(p) = one.iter().find(|p| set.contains(p)) {
            return Err(config_err!("seed {p} is assigned to both types"));
        }
        Ok((one, two))
    }

    /// Seed lists intersected with `domain`.
    pub fn enumerate_within(&self, domain: &Domain) -> Result<(Vec<Point>, Vec<Point>)> {
        let (mut one, mut two) = self.enumerate()?;
        one.retain(|p| domain.contains(p));
        two.retain(|p| domain.contains(p));
        Ok((one, two))
    }
}
