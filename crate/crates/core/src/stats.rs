//! Sample-side estimators.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::output::num;

/// One-pass accumulator of the first four central moments.
///
/// Updates follow Terriberry's extension of Welford's recurrence; partial
/// accumulators combine exactly through [`Moments::merge`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    /// Moments of the concatenation of both inputs.
    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;
        let mean = (na * self.mean + nb * other.mean) / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3 + other.m3 + d3 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4 + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self { n: self.n + other.n, mean, m2, m3, m4 }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Biased central moment `m_k = Σ (x - x̄)^k / n` for `k` in `2..=4`.
    pub fn central(&self, k: u32) -> f64 {
        let n = self.n as f64;
        match k {
            2 => self.m2 / n,
            3 => self.m3 / n,
            4 => self.m4 / n,
            _ => f64::NAN,
        }
    }

    pub fn estimates(&self) -> Result<MomentEstimates> {
        if self.n < 4 {
            return domain(format!("moment estimates need at least 4 values, got {}", self.n));
        }
        if self.m2.is_nan() || self.m2 <= 0.0 {
            return domain("sample has zero variance; kurtosis is undefined");
        }
        let n = self.n as f64;
        let c2 = self.m2 / n;
        Ok(MomentEstimates {
            n: self.n,
            mean: self.mean,
            variance: self.m2 / (n - 1.0),
            skewness: (self.m3 / n) / c2.powf(1.5),
            kurtosis: (self.m4 / n) / (c2 * c2),
        })
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::new();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Summary statistics of a sample. Skewness and kurtosis are ratios of the
/// biased central moments; the kurtosis is raw (3 for a Gaussian).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimates {
    pub n: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Moments of `values`, accumulated in parallel chunks and merged.
pub fn sample_moments(values: &[f64]) -> Result<MomentEstimates> {
    if values.len() < 4 {
        return domain(format!("moment estimates need at least 4 values, got {}", values.len()));
    }
    values
        .par_chunks(1 << 14)
        .map(|c| c.iter().copied().collect::<Moments>())
        .collect::<Vec<_>>()
        .iter()
        .fold(Moments::new(), |acc, m| acc.merge(m))
        .estimates()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    lo: f64,
    hi: f64,
    bins: usize,
}

impl HistogramSpec {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return domain(format!("histogram needs finite lo < hi, got [{lo}, {hi}]"));
        }
        if bins == 0 {
            return domain("histogram needs at least one bin");
        }
        Ok(Self { lo, hi, bins })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Left edge of bin `i`; `edge(bins) == hi`.
    pub fn edge(&self, i: usize) -> f64 {
        if i == self.bins {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * (i as f64 / self.bins as f64)
        }
    }

    fn locate(&self, v: f64) -> Option<usize> {
        if !(v >= self.lo && v <= self.hi) {
            return None;
        }
        let mut i = (((v - self.lo) / (self.hi - self.lo)) * self.bins as f64) as usize;
        i = i.min(self.bins - 1);
        if i > 0 && v < self.edge(i) {
            i -= 1;
        }
        if i + 1 < self.bins && v >= self.edge(i + 1) {
            i += 1;
        }
        Some(i)
    }
}

/// Bin counts over `[lo, hi]`: half-open bins, the last one closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub spec: HistogramSpec,
    pub counts: Vec<u64>,
    pub underflow: u64,
    /// Values above `hi`, plus NaNs.
    pub overflow: u64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    /// `(bin_low, bin_high, count)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (self.spec.edge(i), self.spec.edge(i + 1), c))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        for (lo, hi, c) in self.rows() {
            let _ = writeln!(out, "{},{},{}", num(lo), num(hi), c);
        }
        let _ = writeln!(out, "# underflow={}, overflow={}", self.underflow, self.overflow);
        out
    }
}

pub fn histogram(values: &[f64], spec: HistogramSpec) -> Histogram {
    let mut counts = vec![0u64; spec.bins];
    let mut underflow = 0;
    let mut overflow = 0;
    for &v in values {
        match spec.locate(v) {
            Some(i) => counts[i] += 1,
            None if v < spec.lo => underflow += 1,
            None => overflow += 1,
        }
    }
    Histogram { spec, counts, underflow, overflow }
}
