//! Stateless, counter-based exponential passage times.
//!
//! Every edge weight is a pure function of
//! `(master_seed, replication, canonical edge, clock)`. The tuple is folded
//! into a 64-bit state with
//!
//! ```text
//! absorb(h, w) = mix64((h ^ w) + 0x9E3779B97F4A7C15)      (wrapping add)
//! key   = absorb(absorb(SEED_SALT, master_seed), replication)
//! h     = absorb(.. absorb(absorb(key, x_1), x_2) .., x_d), axis), clock)
//! ```
//!
//! where `mix64` is the SplitMix64 finaliser, `x_i` are the coordinates of
//! the edge's lexicographically smaller endpoint (sign-extended to 64 bits),
//! `axis` is the 0-based axis the edge is parallel to and `clock` is 1 or 2.
//! The top 52 bits of `h` give `u = ((h >> 12) + 0.5) / 2^52`, which lies
//! strictly inside (0, 1), and the passage time at rate λ is `-ln(u) / λ`.
//!
//! Because nothing depends on visit order, two runs over overlapping
//! domains see identical weights on shared edges, which is what makes
//! pathwise coupling checks possible.

use crate::error::{config_err, Result};
use crate::lattice::{Edge, MAX_DIM};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_SALT: u64 = 0x243F_6A88_85A3_08D3;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, w: u64) -> u64 {
    mix64((h ^ w).wrapping_add(GOLDEN))
}

/// Maps 64 random bits to the open unit interval.
#[inline]
pub fn unit_open(h: u64) -> f64 {
    ((h >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Inverse-CDF sample of Exp(rate) from a uniform variate.
#[inline]
pub fn exponential_from_uniform(u: f64, rate: f64) -> f64 {
    -u.ln() / rate
}

/// Key for an auxiliary random stream derived from `(master_seed, replication)`.
pub fn stream_key(master_seed: u64, replication: u64, tag: u64) -> u64 {
    absorb(absorb(absorb(SEED_SALT, master_seed), replication), tag)
}

/// Which competing infection an edge weight is requested for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InfectionType {
    One,
    Two,
}

impl InfectionType {
    pub fn index(self) -> usize {
        match self {
            InfectionType::One => 0,
            InfectionType::Two => 1,
        }
    }

    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn other(self) -> Self {
        match self {
            InfectionType::One => InfectionType::Two,
            InfectionType::Two => InfectionType::One,
        }
    }
}

/// Whether the two types share one passage time per edge or own one each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockMode {
    /// One variable per edge, read by both types. Requires λ1 = λ2.
    Single,
    /// Independent variables τ1(e), τ2(e).
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightField {
    master_seed: u64,
    replication: u64,
    clock_mode: ClockMode,
    rates: [f64; 2],
    key: u64,
}

impl WeightField {
    pub fn new(master_seed: u64, replication: u64, clock_mode: ClockMode, lambda1: f64, lambda2: f64) -> Result<Self> {
        for (i, l) in [lambda1, lambda2].into_iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(config_err!("lambda{} must satisfy lambda > 0, got {l}", i + 1));
            }
        }
        if clock_mode == ClockMode::Single && lambda1 != lambda2 {
            return Err(config_err!(
                "single-clock mode needs lambda1 = lambda2, got {lambda1} and {lambda2}"
            ));
        }
        Ok(WeightField {
            master_seed,
            replication,
            clock_mode,
            rates: [lambda1, lambda2],
            key: absorb(absorb(SEED_SALT, master_seed), replication),
        })
    }

    /// One-type field at rate `lambda` (single clock).
    pub fn single(master_seed: u64, replication: u64, lambda: f64) -> Result<Self> {
        Self::new(master_seed, replication, ClockMode::Single, lambda, lambda)
    }

    pub fn with_replication(&self, replication: u64) -> Self {
        WeightField {
            replication,
            key: absorb(absorb(SEED_SALT, self.master_seed), replication),
            ..*self
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn replication(&self) -> u64 {
        self.replication
    }

    pub fn clock_mode(&self) -> ClockMode {
        self.clock_mode
    }

    pub fn rate(&self, ty: InfectionType) -> f64 {
        match self.clock_mode {
            ClockMode::Single => self.rates[0],
            ClockMode::Two => self.rates[ty.index()],
        }
    }

    /// Uniform variate behind `edge` on clock 1 or 2.
    pub fn uniform(&self, edge: &Edge, clock: InfectionType) -> f64 {
        let low = edge.low();
        let mut c = [0; MAX_DIM];
        c[..low.dim()].copy_from_slice(low.coords());
        unit_open(self.hash(&c[..low.dim()], edge.axis(), clock))
    }

    /// Passage time of `edge` for infection type `ty`.
    pub fn weight(&self, edge: &Edge, ty: InfectionType) -> f64 {
        let low = edge.low();
        self.weight_at(low.coords(), edge.axis(), ty)
    }

    /// Hot-path form of [`WeightField::weight`] taking the low endpoint's
    /// coordinates directly.
    #[inline]
    pub(crate) fn weight_at(&self, low: &[i32], axis: usize, ty: InfectionType) -> f64 {
        let clock = match self.clock_mode {
            ClockMode::Single => InfectionType::One,
            ClockMode::Two => ty,
        };
        exponential_from_uniform(unit_open(self.hash(low, axis, clock)), self.rate(ty))
    }

    #[inline]
    fn hash(&self, low: &[i32], axis: usize, clock: InfectionType) -> u64 {
        let mut h = self.key;
        for &c in low {
            h = absorb(h, c as i64 as u64);
        }
        h = absorb(h, axis as u64);
        absorb(h, clock.label() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Point;
    use std::collections::HashSet;

    fn edge(a: &[i32], b: &[i32]) -> Edge {
        Edge::new(Point::new(a).unwrap(), Point::new(b).unwrap()).unwrap()
    }

    /// Deterministic stream of distinct probe edges.
    fn probe_edges(count: usize) -> impl Iterator<Item = Edge> {
        (0..count as i32).map(|i| {
            let x = i % 1000 - 500;
            let y = i / 1000 - 500;
            edge(&[x, y], &[x + (i & 1), y + 1 - (i & 1)])
        })
    }

    #[test]
    fn repeated_queries_are_identical() {
        let f = WeightField::new(7, 3, ClockMode::Two, 1.0, 2.5).unwrap();
        let e = edge(&[4, -2], &[4, -1]);
        for ty in [InfectionType::One, InfectionType::Two] {
            assert_eq!(f.weight(&e, ty).to_bits(), f.weight(&e, ty).to_bits());
        }
        assert_eq!(f.uniform(&e, InfectionType::One), f.uniform(&edge(&[4, -1], &[4, -2]), InfectionType::One));
    }

    #[test]
    fn uniform_is_open_and_centred() {
        let f = WeightField::single(11, 0, 1.0).unwrap();
        let n = 1_000_000;
        let mut sum = 0.0;
        for e in probe_edges(n) {
            let u = f.uniform(&e, InfectionType::One);
            assert!(u > 0.0 && u < 1.0);
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn unit_open_extremes() {
        assert!(unit_open(0) > 0.0);
        assert!(unit_open(u64::MAX) < 1.0);
    }

    #[test]
    fn replication_index_changes_every_value() {
        let a = WeightField::single(5, 41, 1.0).unwrap();
        let b = a.with_replication(42);
        let mut values = HashSet::new();
        for e in probe_edges(1_000_000) {
            let (ua, ub) = (a.uniform(&e, InfectionType::One), b.uniform(&e, InfectionType::One));
            assert_ne!(ua, ub);
            values.insert(ua.to_bits());
        }
        // distinct edges also do not collide at 52-bit resolution
        assert_eq!(values.len(), 1_000_000);
    }

    #[test]
    fn inverse_cdf_closed_form() {
        assert!((exponential_from_uniform(0.5, 1.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn rate_scaling_is_exact() {
        let e = edge(&[0, 0], &[1, 0]);
        let unit = WeightField::single(3, 9, 1.0).unwrap().weight(&e, InfectionType::One);
        let double = WeightField::single(3, 9, 2.0).unwrap().weight(&e, InfectionType::One);
        assert_eq!(double, unit / 2.0);
        for lambda in [0.5, 2.0, 4.0, 0.25] {
            for e in probe_edges(2000) {
                let w1 = WeightField::single(3, 1, 1.0).unwrap().weight(&e, InfectionType::One);
                let wl = WeightField::single(3, 1, lambda).unwrap().weight(&e, InfectionType::One);
                assert_eq!(lambda * wl, w1);
            }
        }
        // arbitrary rates agree to rounding
        for lambda in [0.3, 1.7, 3.0] {
            for e in probe_edges(2000) {
                let w1 = WeightField::single(3, 1, 1.0).unwrap().weight(&e, InfectionType::One);
                let wl = WeightField::single(3, 1, lambda).unwrap().weight(&e, InfectionType::One);
                assert!((lambda * wl - w1).abs() <= 4.0 * f64::EPSILON * w1);
            }
        }
    }

    #[test]
    fn exponential_mean() {
        let f = WeightField::single(99, 0, 1.0).unwrap();
        let n = 1_000_000;
        let mean = probe_edges(n).map(|e| f.weight(&e, InfectionType::One)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn clock_modes() {
        let e = edge(&[2, 2], &[3, 2]);
        let single = WeightField::single(1, 1, 1.5).unwrap();
        assert_eq!(single.weight(&e, InfectionType::One), single.weight(&e, InfectionType::Two));
        let two = WeightField::new(1, 1, ClockMode::Two, 1.5, 1.5).unwrap();
        assert_eq!(two.weight(&e, InfectionType::One), single.weight(&e, InfectionType::One));
        assert_ne!(two.weight(&e, InfectionType::Two), two.weight(&e, InfectionType::One));
    }

    #[test]
    fn invalid_rates() {
        assert!(WeightField::new(0, 0, ClockMode::Two, 0.0, 1.0).is_err());
        assert!(WeightField::new(0, 0, ClockMode::Two, 1.0, -1.0).is_err());
        assert!(WeightField::new(0, 0, ClockMode::Two, 1.0, f64::NAN).is_err());
        assert!(WeightField::new(0, 0, ClockMode::Single, 1.0, 2.0).is_err());
    }
}
