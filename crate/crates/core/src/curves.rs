//! The benchmark response curves and source law used by the kurtosis table.

use crate::distributions::StudentT;
use crate::response::{GeneralizedSigmoid, SigmoidTerm};

/// Source scale that reproduces the published kurtosis table.
pub const TABLE_SIGMA: f64 = 0.4;

/// Tail exponent of the benchmark source.
pub const TABLE_ALPHA: f64 = 3.0;

/// A curve row of the kurtosis table.
#[derive(Debug, Clone)]
pub struct BenchmarkCurve {
    pub label: &'static str,
    pub curve: GeneralizedSigmoid,
    /// Published in-sample kurtosis at n = 10⁶.
    pub published_kurtosis: f64,
}

/// `S²(a1, a2, b1, b2, c1, c2)` with `K_L = 0`.
pub fn two_term(a1: f64, a2: f64, b1: f64, b2: f64, c1: f64, c2: f64) -> GeneralizedSigmoid {
    GeneralizedSigmoid::new(
        vec![
            SigmoidTerm::new(a1, b1, c1).expect("valid benchmark term"),
            SigmoidTerm::new(a2, b2, c2).expect("valid benchmark term"),
        ],
        0.0,
    )
    .expect("valid benchmark curve")
}

/// The three response rows in table order.
pub fn benchmark_curves() -> Vec<BenchmarkCurve> {
    vec![
        BenchmarkCurve {
            label: "S2(1,-2,1,2,1,15)",
            curve: two_term(1.0, -2.0, 1.0, 2.0, 1.0, 15.0),
            published_kurtosis: 8.77458,
        },
        BenchmarkCurve {
            label: "S2(1,-1/2,2,1,1,15)",
            curve: two_term(1.0, -0.5, 2.0, 1.0, 1.0, 15.0),
            published_kurtosis: 4.08643,
        },
        BenchmarkCurve {
            label: "S1(1,1,0)",
            curve: GeneralizedSigmoid::single(1.0, 1.0, 0.0).expect("valid benchmark curve"),
            published_kurtosis: 4.20523,
        },
    ]
}

/// Published in-sample kurtosis of the untransformed source.
pub const PUBLISHED_SOURCE_KURTOSIS: f64 = 86.3988;

pub fn table_source(sigma: f64) -> crate::error::Result<StudentT> {
    StudentT::new(sigma, TABLE_ALPHA)
}
