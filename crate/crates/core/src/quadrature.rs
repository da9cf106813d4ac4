//! Globally adaptive Gauss–Kronrod (7/15) integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for [`integrate`]. The relative tolerance applies
/// to `∫|f|`, so integrals that cancel to zero still terminate.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 20_000 }
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    abs_value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    let mut kron_abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        let s = lo + hi;
        kron += WGK[j] * s;
        kron_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Segment { a, b, value, abs_value: (kron_abs * half).abs(), error }
}

/// Integrates `f` over `[a, b]`, first splitting at the given interior
/// `breakpoints` (which need not be sorted or inside the interval).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: QuadConfig,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Domain(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut heap = BinaryHeap::new();
    for w in pts.windows(2) {
        heap.push(kronrod(&f, w[0], w[1]));
    }
    loop {
        let (value, abs_value, error) = heap
            .iter()
            .fold((0.0, 0.0, 0.0), |(v, av, e), s| (v + s.value, av + s.abs_value, e + s.error));
        if !value.is_finite() {
            return Err(Error::Numeric(format!("integrand is not finite on [{a}, {b}]")));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * abs_value);
        if error <= target {
            return Ok(QuadResult { value, error, intervals: heap.len() });
        }
        if heap.len() >= cfg.max_intervals {
            return Err(Error::Numeric(format!(
                "quadrature did not converge on [{a}, {b}]: estimate {value:e}, error {error:e}, \
                 target {target:e}, {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Numeric(format!(
                "quadrature interval collapsed near x = {mid}: estimate {value:e}, error {error:e}"
            )));
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &[], QuadConfig::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn peaked_and_split() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        let r = integrate(f, -1.0, 1.0, &[0.0], QuadConfig::default()).unwrap();
        assert!(((r.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn cancelling_integral_terminates() {
        let r = integrate(|x: f64| x.powi(3) * (-x * x).exp(), -8.0, 8.0, &[], QuadConfig::default()).unwrap();
        assert!(r.value.abs() < 1e-14);
    }

    #[test]
    fn bad_bounds() {
        assert!(integrate(|x| x, 1.0, 1.0, &[], QuadConfig::default()).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, &[], QuadConfig::default()).is_err());
    }

    #[test]
    fn non_convergence_reported() {
        let cfg = QuadConfig { abs_tol: 0.0, rel_tol: 1e-15, max_intervals: 4 };
        let r = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &[], cfg);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }
}
