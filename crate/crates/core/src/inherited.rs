//! The inherited law of `S(X)` for a Student-t source `X` and a response
//! curve `S`.
//!
//! For a single rising term the density follows from the change of
//! variables `g(y) = f(S⁻¹(y)) |dS⁻¹/dy|`. For any number of terms the law is
//! reached by pushing samples through `S`, and its moments by integrating
//! `S(x)^k f(x)` in source space, where nothing is singular.

use serde::{Deserialize, Serialize};

use crate::distributions::{SampleBatch, StudentT};
use crate::error::{domain, require_finite, Error, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::response::{inverse_single, GeneralizedSigmoid, Interval, SigmoidTerm, SATURATION_TOL};

/// Quantile cut `ε` for source-space moment integrals.
pub const TAIL_EPS: f64 = 1e-10;

/// Relative tolerance requested from the moment quadrature.
pub const MOMENT_REL_TOL: f64 = 1e-10;

/// A response curve applied to a Student-t source.
#[derive(Debug, Clone, PartialEq)]
pub struct InheritedSpec {
    pub response: GeneralizedSigmoid,
    pub source: StudentT,
}

/// Central moments and raw kurtosis of the inherited law, by quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMoments {
    pub mean: f64,
    pub variance: f64,
    pub third_central: f64,
    pub fourth_central: f64,
    /// `μ₄/μ₂²`, equal to 3 for a Gaussian.
    pub kurtosis: f64,
    pub tail_eps: f64,
    pub rel_tol: f64,
}

impl InheritedSpec {
    pub fn new(response: GeneralizedSigmoid, source: StudentT) -> Self {
        Self { response, source }
    }

    /// Support of the inherited law, the attained range of the curve.
    pub fn support(&self) -> Interval {
        self.response.attained_range()
    }

    fn single_rising_term(&self) -> Result<&SigmoidTerm> {
        match self.response.terms() {
            [t] if t.a > 0.0 => Ok(t),
            [_] => Err(Error::Unsupported(
                "analytic density needs a rising term (a > 0)".into(),
            )),
            _ => Err(Error::Unsupported(
                "analytic density exists only for single-term curves; the inverse of a \
                 multi-term curve is not analytic"
                    .into(),
            )),
        }
    }

    /// Density of `S(X)` at `y` for a single-term curve.
    pub fn pdf(&self, y: f64) -> Result<f64> {
        let t = self.single_rising_term()?;
        require_finite(y, "y")?;
        let k_l = self.response.k_l();
        let x = inverse_single(t, k_l, y)?;
        let u = y - k_l;
        let jacobian = t.a / (t.b * u * (t.a - u));
        Ok(self.source.pdf_unchecked(x) * jacobian)
    }

    /// `P(S(X) <= y)` for a single-term curve.
    pub fn cdf(&self, y: f64) -> Result<f64> {
        let t = self.single_rising_term()?;
        require_finite(y, "y")?;
        let k_l = self.response.k_l();
        if y <= k_l {
            return Ok(0.0);
        }
        if y >= k_l + t.a {
            return Ok(1.0);
        }
        self.source.cdf(inverse_single(t, k_l, y)?)
    }

    /// `(y, g(y))` on `points` evenly spaced values across the open support,
    /// endpoints pulled in by `1e-6` of the support width.
    pub fn density_grid(&self, points: usize) -> Result<Vec<(f64, f64)>> {
        let t = self.single_rising_term()?;
        if points < 2 {
            return domain("density grid needs at least 2 points");
        }
        let lo = self.response.k_l();
        let width = t.a;
        let start = lo + 1e-6 * width;
        let stop = lo + width - 1e-6 * width;
        let step = (stop - start) / (points - 1) as f64;
        (0..points)
            .map(|i| {
                let y = if i + 1 == points { stop } else { start + i as f64 * step };
                Ok((y, self.pdf(y)?))
            })
            .collect()
    }

    /// Draws from the inherited law by mapping Student-t draws through `S`.
    pub fn sample(&self, seed: u64, n: usize) -> Result<SampleBatch> {
        let mut batch = self.source.sample(seed, n)?;
        for v in batch.values.iter_mut() {
            *v = self.response.eval_unchecked(*v);
        }
        batch.algorithm_id.push_str("/pushforward");
        Ok(batch)
    }

    /// Raw moment `E[S(X)^k]`, `k` in `1..=4`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if !(1..=4).contains(&k) {
            return domain(format!("moment order must be in 1..=4, got {k}"));
        }
        self.source_space_moment(k, 0.0)
    }

    /// `E[(S(X) - center)^k]` for any `k >= 1`, integrated in source space.
    pub fn source_space_moment(&self, k: u32, center: f64) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        let (lo, hi) = self.integration_window()?;
        let k_i = k as i32;
        let s = &self.response;
        let f = |x: f64| (s.eval_unchecked(x) - center).powi(k_i) * self.source.pdf_unchecked(x);
        let breaks = self.breakpoints(lo, hi);
        let cfg = QuadConfig { abs_tol: 1e-300, rel_tol: MOMENT_REL_TOL, max_intervals: 50_000 };
        let body = integrate(f, lo, hi, &breaks, cfg).map_err(|e| match e {
            Error::Numeric(m) => Error::Numeric(format!(
                "moment k={k} for {} with StudentT(sigma={}, alpha={}): {m}",
                self.response,
                self.source.sigma(),
                self.source.alpha()
            )),
            other => other,
        })?;
        let left_mass = self.source.tail(lo)?;
        let right_mass = self.source.tail(hi)?;
        let left = (s.k_l() - center).powi(k_i) * left_mass;
        let right = (s.k_r() - center).powi(k_i) * right_mass;
        Ok(body.value + left + right)
    }

    /// `[Q(ε), Q(1-ε)]`, widened until the response is saturated.
    fn integration_window(&self) -> Result<(f64, f64)> {
        let (sat_lo, sat_hi) = self.response.saturation_bracket(SATURATION_TOL);
        let lo = self.source.quantile(TAIL_EPS)?.min(sat_lo);
        let hi = self.source.quantile(1.0 - TAIL_EPS)?.max(sat_hi);
        Ok((lo, hi))
    }

    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = vec![0.0];
        let (sat_lo, sat_hi) = self.response.saturation_bracket(SATURATION_TOL);
        pts.extend([sat_lo, sat_hi]);
        for t in self.response.terms() {
            let mid = t.c / t.b;
            pts.extend([mid - 4.0 / t.b, mid, mid + 4.0 / t.b]);
        }
        // Geometric ladder through the power-law tails.
        let mut r = self.source.sigma();
        while r < hi.max(-lo) {
            pts.push(r);
            pts.push(-r);
            r *= 2.0;
        }
        pts
    }

    /// Mean, central moments and raw kurtosis by quadrature.
    pub fn quadrature_moments(&self) -> Result<QuadratureMoments> {
        let mean = self.source_space_moment(1, 0.0)?;
        let variance = self.source_space_moment(2, mean)?;
        if variance.is_nan() || variance <= 0.0 {
            return domain(format!("inherited law of {} is degenerate (zero variance)", self.response));
        }
        let third_central = self.source_space_moment(3, mean)?;
        let fourth_central = self.source_space_moment(4, mean)?;
        Ok(QuadratureMoments {
            mean,
            variance,
            third_central,
            fourth_central,
            kurtosis: fourth_central / (variance * variance),
            tail_eps: TAIL_EPS,
            rel_tol: MOMENT_REL_TOL,
        })
    }

    /// Raw (non-excess) kurtosis `μ₄/μ₂²` of the inherited law.
    pub fn kurtosis(&self) -> Result<f64> {
        Ok(self.quadrature_moments()?.kurtosis)
    }
}
