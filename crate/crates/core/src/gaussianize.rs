//! Monotone maps `γ` carrying a Student-t source onto a Gaussian target,
//! defined by `Φ_{m,s}(γ(x)) = F_{σ,α}(x)`.
//!
//! For `α = 2` and `α = 3` the maps are evaluated from their closed forms;
//! other exponents compose `erfc⁻¹` with the Student-t cdf.

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::distributions::{GaussianSpec, StudentT};
use crate::error::{domain, require_finite, Result};
use crate::special::{erfc_inv, erfc_inv_ln};

/// Tail probability below which the log-space inverse takes over.
pub const EXTREME_TAIL: f64 = 1e-15;

/// How `γ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Closed form in `x` for `α = 2`.
    ClosedAlpha2,
    /// Closed form with the arctangent term for `α = 3`.
    ClosedAlpha3,
    /// `m − √2 s erfc⁻¹(2 F(x))` for any `α`.
    Composed,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::ClosedAlpha2 => "closed-alpha-2",
            Route::ClosedAlpha3 => "closed-alpha-3",
            Route::Composed => "composed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaMapSpec {
    pub source: StudentT,
    pub target: GaussianSpec,
}

impl GammaMapSpec {
    pub fn new(source: StudentT, target: GaussianSpec) -> Self {
        Self { source, target }
    }

    /// The route [`GammaMapSpec::eval`] uses.
    pub fn default_route(&self) -> Route {
        let a = self.source.alpha();
        if a == 2.0 {
            Route::ClosedAlpha2
        } else if a == 3.0 {
            Route::ClosedAlpha3
        } else {
            Route::Composed
        }
    }

    /// `γ(x)` along the default route.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.eval_with(self.default_route(), x)
    }

    pub fn eval_with(&self, route: Route, x: f64) -> Result<f64> {
        require_finite(x, "x")?;
        let tail = self.source.tail(x)?;
        if tail < EXTREME_TAIL {
            return self.extreme(x);
        }
        match route {
            Route::ClosedAlpha2 => self.closed_alpha2(x),
            Route::ClosedAlpha3 => self.closed_alpha3(x),
            Route::Composed => self.composed(x, tail),
        }
    }

    fn check_alpha(&self, alpha: f64) -> Result<()> {
        if self.source.alpha() != alpha {
            return domain(format!(
                "closed form for alpha = {alpha} used with alpha = {}",
                self.source.alpha()
            ));
        }
        Ok(())
    }

    fn target_from_erfc_arg(&self, arg: f64) -> Result<f64> {
        Ok(self.target.mean() - SQRT_2 * self.target.sd() * erfc_inv(arg)?)
    }

    /// `m − √2 s erfc⁻¹(σ x √((2σ²+x²)/σ²) / (2σ²+x²) + 1)`.
    fn closed_alpha2(&self, x: f64) -> Result<f64> {
        self.check_alpha(2.0)?;
        let s = self.source.sigma();
        let s2 = s * s;
        let arg = s * x * ((2.0 * s2 + x * x) / s2).sqrt() / (2.0 * s2 + x * x) + 1.0;
        self.target_from_erfc_arg(arg)
    }

    /// `m − √2 s erfc⁻¹((2√3 σ x/(3σ²+x²) + 2 atan(x/(√3σ)) + π)/π)`.
    fn closed_alpha3(&self, x: f64) -> Result<f64> {
        self.check_alpha(3.0)?;
        let s = self.source.sigma();
        let r3 = 3f64.sqrt();
        let arg = (2.0 * r3 * s * x / (3.0 * s * s + x * x) + 2.0 * (x / (r3 * s)).atan() + PI) / PI;
        self.target_from_erfc_arg(arg)
    }

    /// Composed route on whichever tail keeps full relative precision.
    fn composed(&self, x: f64, tail: f64) -> Result<f64> {
        let y = erfc_inv(2.0 * tail)?;
        let (m, sd) = (self.target.mean(), self.target.sd());
        Ok(if x <= 0.0 { m - SQRT_2 * sd * y } else { m + SQRT_2 * sd * y })
    }

    /// Far tails: `ln erfc(y) = ln 2 + ln F(-|x|)` solved in log space.
    fn extreme(&self, x: f64) -> Result<f64> {
        let y = erfc_inv_ln(LN_2 + self.source.ln_tail(x)?);
        let (m, sd) = (self.target.mean(), self.target.sd());
        Ok(if x <= 0.0 { m - SQRT_2 * sd * y } else { m + SQRT_2 * sd * y })
    }

    /// `max |Φ(γ(x)) − F(x)|` over the grid.
    pub fn cdf_identity_residual(&self, grid: &[f64]) -> Result<f64> {
        if grid.is_empty() {
            return domain("residual grid must be nonempty");
        }
        grid.iter().try_fold(0.0_f64, |acc, &x| Ok(acc.max(self.residual_at(x)?)))
    }

    /// `|Φ(γ(x)) − F(x)|` at one point.
    pub fn residual_at(&self, x: f64) -> Result<f64> {
        let g = self.eval(x)?;
        Ok((self.target.cdf(g)? - self.source.cdf(x)?).abs())
    }
}
