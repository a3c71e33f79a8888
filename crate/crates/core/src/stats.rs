//! Interval estimates and the two-sample Kolmogorov–Smirnov test.

use serde::Serialize;

use crate::error::{contract_err, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateKind {
    /// Sample mean with a CLT interval.
    Mean,
    /// Binomial proportion with a Wilson score interval.
    Proportion,
}

/// A point estimate with its 95% confidence interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n: u64,
    pub kind: EstimateKind,
}

impl Estimate {
    /// Mean of `samples` with interval `mean ± z·s/√n`.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(contract_err!("a mean interval needs at least 2 samples, got {n}"));
        }
        let (mean, var) = mean_var(samples);
        let half = Z95 * (var / n as f64).sqrt();
        Ok(Estimate {
            mean,
            ci_lo: mean - half,
            ci_hi: mean + half,
            n: n as u64,
            kind: EstimateKind::Mean,
        })
    }

    /// Proportion `successes / n` with the Wilson score interval.
    pub fn wilson(successes: u64, n: u64) -> Result<Self> {
        if n == 0 || successes > n {
            return Err(contract_err!("invalid proportion {successes}/{n}"));
        }
        let nf = n as f64;
        let p = successes as f64 / nf;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        let centre = (p + z2 / (2.0 * nf)) / denom;
        let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
        Ok(Estimate {
            mean: p,
            ci_lo: (centre - half).max(0.0).min(p),
            ci_hi: (centre + half).min(1.0).max(p),
            n,
            kind: EstimateKind::Proportion,
        })
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_hi - self.ci_lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_lo <= x && x <= self.ci_hi
    }

    pub fn overlaps(&self, other: &Estimate) -> bool {
        self.ci_lo <= other.ci_hi && other.ci_lo <= self.ci_hi
    }
}

/// Sample mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, if xs.len() > 1 { ss / (n - 1.0) } else { 0.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov–Smirnov test: the largest gap between the two
/// empirical CDFs and its asymptotic p-value (with Stephens' small-sample
/// correction to the argument).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(contract_err!("KS test needs two nonempty samples"));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(contract_err!("KS test input contains NaN"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    let p = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
    Ok(KsResult {
        statistic: d,
        p_value: p,
    })
}

/// Kolmogorov survival function `Q(x) = P(K > x)`.
pub fn kolmogorov_q(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // Jacobi-transformed series, fast for small x
        let y = -std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let s: f64 = (0..8).map(|k| ((2 * k + 1) as f64).powi(2) * y).map(f64::exp).sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=20)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * x * x).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}
