//! The generalized dose-response curve: a sum of scaled logistic terms on top
//! of a left saturation level.
//!
//! ```text
//! S(x) = Σ_k a_k / (1 + exp(-b_k x + c_k)) + K_L,    K_R = Σ_k a_k + K_L
//! ```
//!
//! Every term has `b_k > 0`, so `S(-∞) = K_L` and `S(+∞) = K_R`. A falling
//! term is written with a negative `a_k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, require_finite, Error, Result};

/// Number of grid points used to bracket critical and inflection points.
pub const SHAPE_GRID: usize = 4096;

/// Saturation tolerance for the search bracket.
pub const SATURATION_TOL: f64 = 1e-9;

/// One logistic term `a / (1 + exp(-b x + c))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidTerm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SigmoidTerm {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        require_finite(a, "a")?;
        require_finite(b, "b")?;
        require_finite(c, "c")?;
        if b <= 0.0 {
            return domain(format!("slope b must be positive, got {b}"));
        }
        Ok(Self { a, b, c })
    }

    #[inline]
    fn arg(&self, x: f64) -> f64 {
        self.b * x - self.c
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.a * logistic(self.arg(x))
    }

    #[inline]
    fn d1(&self, x: f64) -> f64 {
        self.a * self.b * logistic_slope(self.arg(x))
    }

    #[inline]
    fn d2(&self, x: f64) -> f64 {
        let z = self.arg(x);
        // σ'' = σ(1-σ)(1-2σ) and 1 - 2σ(z) = -tanh(z/2)
        -self.a * self.b * self.b * logistic_slope(z) * (0.5 * z).tanh()
    }
}

/// Logistic `1/(1+e^{-z})` without overflow for any finite `z`.
#[inline]
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `σ(z)(1 - σ(z))`.
#[inline]
fn logistic_slope(z: f64) -> f64 {
    let e = (-z.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sign of the curvature on a stretch between inflection points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Convex,
    Concave,
    Flat,
}

/// Findings of [`GeneralizedSigmoid::validate_shape`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub k_l: f64,
    pub k_r: f64,
    pub monotone: bool,
    /// Roots of the first derivative, ascending.
    pub critical_points: Vec<f64>,
    /// Roots of the second derivative, ascending.
    pub inflection_points: Vec<f64>,
    /// Curvature on each stretch delimited by the inflection points.
    pub curvature_pattern: Vec<Curvature>,
    pub attained_range: Interval,
    /// Whether the curvature runs convex, concave and optionally convex
    /// again, left to right.
    pub satisfies_iii: bool,
}

/// `S^N`: ordered logistic terms plus the left saturation level `K_L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedSigmoid {
    terms: Vec<SigmoidTerm>,
    k_l: f64,
}

impl GeneralizedSigmoid {
    pub fn new(terms: Vec<SigmoidTerm>, k_l: f64) -> Result<Self> {
        if terms.is_empty() {
            return domain("a response curve needs at least one term");
        }
        require_finite(k_l, "kl")?;
        for t in &terms {
            SigmoidTerm::new(t.a, t.b, t.c)?;
        }
        Ok(Self { terms, k_l })
    }

    /// Single standard term with `K_L = 0`.
    pub fn single(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(vec![SigmoidTerm::new(a, b, c)?], 0.0)
    }

    pub fn terms(&self) -> &[SigmoidTerm] {
        &self.terms
    }

    pub fn k_l(&self) -> f64 {
        self.k_l
    }

    /// Right saturation level `Σ a_k + K_L`.
    pub fn k_r(&self) -> f64 {
        self.terms.iter().map(|t| t.a).sum::<f64>() + self.k_l
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_slope(&self) -> f64 {
        self.terms.iter().map(|t| t.b).fold(f64::INFINITY, f64::min)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        require_finite(x, "x")?;
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum::<f64>() + self.k_l
    }

    /// Analytic first or second derivative.
    pub fn derivative(&self, x: f64, order: u32) -> Result<f64> {
        require_finite(x, "x")?;
        match order {
            1 => Ok(self.d1(x)),
            2 => Ok(self.d2(x)),
            _ => domain(format!("derivative order must be 1 or 2, got {order}")),
        }
    }

    fn d1(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.d1(x)).sum()
    }

    fn d2(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.d2(x)).sum()
    }

    /// `[x_lo, x_hi]` outside of which every term sits within
    /// `tol / N` of its plateau.
    pub fn saturation_bracket(&self, tol: f64) -> (f64, f64) {
        let n = self.terms.len() as f64;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in &self.terms {
            let mag = t.a.abs().max(f64::MIN_POSITIVE);
            // σ(z) < e^z and 1 - σ(z) < e^{-z}
            let z = (tol / (n * mag)).ln().min(0.0);
            lo = lo.min((t.c + z) / t.b);
            hi = hi.max((t.c - z) / t.b);
        }
        (lo, hi)
    }

    /// The smallest closed interval holding every value the curve takes on
    /// the real line, plateaus included.
    pub fn attained_range(&self) -> Interval {
        let crit = self.critical_points();
        let mut lo = self.k_l.min(self.k_r());
        let mut hi = self.k_l.max(self.k_r());
        for x in crit {
            let v = self.eval_unchecked(x);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Interval { lo, hi }
    }

    fn critical_points(&self) -> Vec<f64> {
        let (lo, hi) = self.saturation_bracket(SATURATION_TOL);
        sign_change_roots(|x| self.d1(x), lo, hi)
    }

    fn inflection_points(&self) -> Vec<f64> {
        let (lo, hi) = self.saturation_bracket(SATURATION_TOL);
        sign_change_roots(|x| self.d2(x), lo, hi)
    }

    /// Limits, monotonicity, inflection structure and attained range.
    pub fn validate_shape(&self) -> ShapeReport {
        let (lo, hi) = self.saturation_bracket(SATURATION_TOL);
        let critical_points = self.critical_points();
        let inflection_points = self.inflection_points();

        let mut edges = Vec::with_capacity(inflection_points.len() + 2);
        edges.push(lo.min(inflection_points.first().copied().unwrap_or(lo)) - 1.0);
        edges.extend(inflection_points.iter().copied());
        edges.push(hi.max(inflection_points.last().copied().unwrap_or(hi)) + 1.0);
        let curvature_pattern: Vec<Curvature> = edges
            .windows(2)
            .map(|w| {
                // Probe well inside the stretch, away from underflow at the
                // outer edges.
                let x = if w[0] == edges[0] {
                    w[1] - 0.5 * (w[1] - lo).abs().clamp(1e-3, 1.0)
                } else if w[1] == *edges.last().unwrap() {
                    w[0] + 0.5 * (hi - w[0]).abs().clamp(1e-3, 1.0)
                } else {
                    0.5 * (w[0] + w[1])
                };
                let d = self.d2(x);
                if d > 0.0 {
                    Curvature::Convex
                } else if d < 0.0 {
                    Curvature::Concave
                } else {
                    Curvature::Flat
                }
            })
            .collect();

        let satisfies_iii = matches!(
            curvature_pattern.as_slice(),
            [Curvature::Convex | Curvature::Flat, Curvature::Concave]
                | [Curvature::Convex | Curvature::Flat, Curvature::Concave, Curvature::Convex | Curvature::Flat]
        );

        ShapeReport {
            k_l: self.k_l,
            k_r: self.k_r(),
            monotone: critical_points.is_empty(),
            critical_points,
            inflection_points,
            curvature_pattern,
            attained_range: self.attained_range(),
            satisfies_iii,
        }
    }

    /// Inverse of a single-term curve, see [`inverse_single`].
    pub fn inverse(&self, y: f64) -> Result<f64> {
        match self.terms.as_slice() {
            [t] => inverse_single(t, self.k_l, y),
            _ => Err(Error::Unsupported(
                "closed-form inverse exists only for single-term curves".into(),
            )),
        }
    }
}

/// `x` with `k_l + a / (1 + exp(-b x + c)) = y`, for `a > 0` and `y`
/// strictly between the plateaus.
pub fn inverse_single(t: &SigmoidTerm, k_l: f64, y: f64) -> Result<f64> {
    if t.a <= 0.0 {
        return Err(Error::Unsupported(format!(
            "inverse requires a rising term (a > 0), got a = {}",
            t.a
        )));
    }
    require_finite(y, "y")?;
    let u = y - k_l;
    let v = t.a - u;
    if !(u > 0.0 && v > 0.0) {
        return domain(format!(
            "y = {y} is outside the open range ({k_l}, {})",
            k_l + t.a
        ));
    }
    Ok(((u / v).ln() + t.c) / t.b)
}

/// Roots of `f` on `[lo, hi]` located by sign changes on a uniform grid and
/// polished by bisection.
fn sign_change_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Vec<f64> {
    let h = (hi - lo) / (SHAPE_GRID - 1) as f64;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..SHAPE_GRID {
        let x = lo + i as f64 * h;
        let v = f(x);
        if v == 0.0 || !v.is_finite() {
            continue;
        }
        if let Some((px, pv)) = prev {
            if pv.signum() != v.signum() {
                roots.push(bisect(&f, px, x, pv));
            }
        }
        prev = Some((x, v));
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    while b - a > 1e-12 * (1.0 + a.abs().max(b.abs())) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
        if m == a && m == b {
            break;
        }
    }
    0.5 * (a + b)
}

impl fmt::Display for GeneralizedSigmoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigmoid:kl={}", self.k_l)?;
        for t in &self.terms {
            write!(f, ";a={},b={},c={}", t.a, t.b, t.c)?;
        }
        Ok(())
    }
}

impl FromStr for GeneralizedSigmoid {
    type Err = Error;

    /// Parses `sigmoid:kl=<r>;a=<r>,b=<r>,c=<r>[;a=<r>,b=<r>,c=<r>]*`.
    fn from_str(s: &str) -> Result<Self> {
        let perr = |m: String| Error::Parse(m);
        let body = s
            .trim()
            .strip_prefix("sigmoid:")
            .ok_or_else(|| perr(format!("curve spec must start with 'sigmoid:', got '{s}'")))?;
        let mut segments = body.split(';').map(str::trim);
        let head = segments.next().unwrap_or_default();
        let k_l = match head.split_once('=') {
            Some((k, v)) if k.trim() == "kl" => parse_real(v, "kl")?,
            _ => return Err(perr(format!("expected 'kl=<real>' as first field, got '{head}'"))),
        };
        let mut terms = Vec::new();
        for seg in segments {
            if seg.is_empty() {
                return Err(perr("empty term in curve spec".into()));
            }
            let (mut a, mut b, mut c) = (None, None, None);
            for field in seg.split(',') {
                let (k, v) = field
                    .split_once('=')
                    .ok_or_else(|| perr(format!("expected key=value, got '{field}'")))?;
                let slot = match k.trim() {
                    "a" => &mut a,
                    "b" => &mut b,
                    "c" => &mut c,
                    other => return Err(perr(format!("unknown term key '{other}'"))),
                };
                if slot.is_some() {
                    return Err(perr(format!("duplicate key '{}' in term '{seg}'", k.trim())));
                }
                *slot = Some(parse_real(v, k.trim())?);
            }
            match (a, b, c) {
                (Some(a), Some(b), Some(c)) => terms.push(
                    SigmoidTerm::new(a, b, c).map_err(|e| perr(format!("term '{seg}': {e}")))?,
                ),
                _ => return Err(perr(format!("term '{seg}' must define a, b and c"))),
            }
        }
        Self::new(terms, k_l).map_err(|e| perr(e.to_string()))
    }
}

fn parse_real(v: &str, key: &str) -> Result<f64> {
    let v = v.trim();
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Parse(format!("'{v}' is not a real number (field {key})")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("field {key} must be finite, got '{v}'")));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2(a1: f64, a2: f64, b1: f64, b2: f64, c1: f64, c2: f64) -> GeneralizedSigmoid {
        GeneralizedSigmoid::new(
            vec![SigmoidTerm::new(a1, b1, c1).unwrap(), SigmoidTerm::new(a2, b2, c2).unwrap()],
            0.0,
        )
        .unwrap()
    }

    fn std1() -> GeneralizedSigmoid {
        GeneralizedSigmoid::single(1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn rejects_non_positive_slope() {
        assert!(SigmoidTerm::new(1.0, 0.0, 0.0).is_err());
        assert!(SigmoidTerm::new(1.0, -1.0, 0.0).is_err());
        assert!(GeneralizedSigmoid::new(vec![], 0.0).is_err());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(std1().eval(0.0).unwrap(), 0.5);
        let v = std1().eval(-20.0).unwrap();
        assert!((v - 2.061_153_618_190_203_6e-9).abs() < 1e-12);
        let s = s2(1.0, -2.0, 1.0, 2.0, 1.0, 15.0);
        assert!((s.eval(1000.0).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(s.k_r(), -1.0);
        assert!(std1().eval(f64::NAN).is_err());
    }

    #[test]
    fn eval_does_not_overflow() {
        let s = GeneralizedSigmoid::single(1.0, 10.0, 0.0).unwrap();
        assert_eq!(s.eval(1e4).unwrap(), 1.0);
        assert_eq!(s.eval(-1e4).unwrap(), 0.0);
        assert_eq!(s.derivative(1e4, 2).unwrap(), 0.0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(std1().derivative(0.0, 1).unwrap(), 0.25);
        assert_eq!(std1().derivative(0.0, 2).unwrap(), 0.0);
        assert!(std1().derivative(0.0, 3).is_err());
        let s = s2(1.0, -2.0, 1.0, 2.0, 1.0, 15.0);
        let h = 1e-5;
        let fd = (s.eval(1.0 + h).unwrap() - s.eval(1.0 - h).unwrap()) / (2.0 * h);
        assert!((s.derivative(1.0, 1).unwrap() - fd).abs() < 1e-7);
    }

    #[test]
    fn inverse_examples() {
        let t = SigmoidTerm::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(inverse_single(&t, 0.0, 0.5).unwrap(), 0.0);
        let y = 1.0 / (1.0 + std::f64::consts::E);
        assert!((inverse_single(&t, 0.0, y).unwrap() + 1.0).abs() < 1e-15);
        let x = inverse_single(&t, 0.0, std1().eval(3.7).unwrap()).unwrap();
        assert!((x - 3.7).abs() < 1e-10);
        for y in [0.0, 1.0, -0.1, 1.2] {
            assert!(matches!(inverse_single(&t, 0.0, y), Err(Error::Domain(_))));
        }
        let neg = SigmoidTerm::new(-1.0, 1.0, 0.0).unwrap();
        assert!(inverse_single(&neg, 0.0, -0.5).is_err());
        assert!(s2(1.0, -2.0, 1.0, 2.0, 1.0, 15.0).inverse(0.1).is_err());
    }

    #[test]
    fn inverse_round_trip_with_offsets() {
        let t = SigmoidTerm::new(2.5, 0.7, -1.2).unwrap();
        let s = GeneralizedSigmoid::new(vec![t], -3.0).unwrap();
        for i in -40..=40 {
            let x = i as f64;
            let y = s.eval(x).unwrap();
            if y > -3.0 && y < -0.5 {
                let back = inverse_single(&t, -3.0, y).unwrap();
                // Near either plateau the distance to it carries only the
                // absolute precision of y.
                let gap = (-0.5 - y).min(y + 3.0);
                let conditioning = 4.0 * f64::EPSILON * 3.0 / (t.b * gap);
                assert!((back - x).abs() < 1e-10 + conditioning, "x={x}");
            }
        }
    }

    #[test]
    fn shape_standard_logistic() {
        let r = std1().validate_shape();
        assert!(r.monotone);
        assert_eq!(r.inflection_points.len(), 1);
        assert!(r.inflection_points[0].abs() < 1e-9);
        assert_eq!(r.attained_range, Interval { lo: 0.0, hi: 1.0 });
        assert_eq!(r.curvature_pattern, vec![Curvature::Convex, Curvature::Concave]);
        assert!(r.satisfies_iii);
    }

    #[test]
    fn shape_non_monotone_table_curve() {
        let s = s2(1.0, -2.0, 1.0, 2.0, 1.0, 15.0);
        let r = s.validate_shape();
        assert!(!r.monotone);
        assert_eq!(r.k_r, -1.0);
        // The slower rising term outlasts the falling one: a shallow minimum
        // just below K_R near x = 14 + ln 4.
        assert!(r.attained_range.lo < -1.0 && r.attained_range.lo > -1.0 - 1e-6);
        assert!(r.attained_range.hi > 0.0);
        assert_eq!(r.critical_points.len(), 2);
        assert!((r.critical_points[1] - (14.0 + 4f64.ln())).abs() < 1e-3);
        assert_eq!(r.curvature_pattern[..2], [Curvature::Convex, Curvature::Concave]);
    }

    #[test]
    fn attained_range_matches_golden_section_oracle() {
        let s = s2(1.0, -2.0, 1.0, 2.0, 1.0, 15.0);
        // Dense grid then golden-section refinement of the maximum.
        let (mut best, mut bx) = (f64::NEG_INFINITY, 0.0);
        for i in 0..=200_000 {
            let x = -50.0 + i as f64 * 1e-3 * 0.5;
            let v = s.eval(x).unwrap();
            if v > best {
                best = v;
                bx = x;
            }
        }
        let (mut a, mut b) = (bx - 1e-3, bx + 1e-3);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if s.eval(c).unwrap() > s.eval(d).unwrap() {
                b = d;
            } else {
                a = c;
            }
        }
        let oracle = s.eval(0.5 * (a + b)).unwrap();
        let r = s.attained_range();
        assert!((r.hi - oracle).abs() < 1e-12);
        let min_oracle = (0..=400_000)
            .map(|i| s.eval(10.0 + i as f64 * 5e-5).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(r.lo <= min_oracle && min_oracle - r.lo < 1e-12);
    }

    #[test]
    fn shape_second_table_curve() {
        let s = s2(1.0, -0.5, 2.0, 1.0, 1.0, 15.0);
        let r = s.validate_shape();
        assert_eq!(r.k_r, 0.5);
        assert!(r.attained_range.lo <= 0.0 && r.attained_range.hi >= 0.5);
    }

    #[test]
    fn saturation_at_far_field() {
        for s in [std1(), s2(1.0, -2.0, 1.0, 2.0, 1.0, 15.0), s2(1.0, -0.5, 2.0, 1.0, 1.0, 15.0)] {
            let x = 1e3 / s.min_slope();
            assert!((s.eval(-x).unwrap() - s.k_l()).abs() < 1e-9);
            assert!((s.eval(x).unwrap() - s.k_r()).abs() < 1e-9);
        }
    }

    #[test]
    fn parse_and_display() {
        let s: GeneralizedSigmoid = "sigmoid:kl=0;a=1,b=1,c=0".parse().unwrap();
        assert_eq!(s, std1());
        let s: GeneralizedSigmoid =
            "sigmoid:kl=0.5; a=1, b=2e0, c=1 ;a=-0.5,b=1,c=1.5E1".parse().unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.terms()[1].c, 15.0);
        let back: GeneralizedSigmoid = s.to_string().parse().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "",
            "logistic:kl=0;a=1,b=1,c=0",
            "sigmoid:a=1,b=1,c=0",
            "sigmoid:kl=0",
            "sigmoid:kl=0;a=1,b=1",
            "sigmoid:kl=0;a=1,b=1,c=0,d=2",
            "sigmoid:kl=0;a=1,a=1,b=1,c=0",
            "sigmoid:kl=0;a=1,b=0,c=0",
            "sigmoid:kl=x;a=1,b=1,c=0",
            "sigmoid:kl=0;a=1,b=1,c=inf",
            "sigmoid:kl=0;;a=1,b=1,c=0",
        ] {
            assert!(matches!(bad.parse::<GeneralizedSigmoid>(), Err(Error::Parse(_))), "{bad}");
        }
    }
}
