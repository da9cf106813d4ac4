//! Fat-tailed Student-t sources pushed through bounded sigmoid response
//! curves.
//!
//! The crate evaluates the generalized response curve, the inherited
//! (pushforward) law it induces on a Student-t source, that law's moments by
//! quadrature and by simulation, and the monotone maps that carry the source
//! onto an exact Gaussian.

pub mod cli;
pub mod curves;
pub mod distributions;
pub mod error;
pub mod gaussianize;
pub mod inherited;
pub mod output;
pub mod quadrature;
pub mod response;
pub mod rng;
pub mod special;
pub mod stats;

pub use distributions::{GaussianSpec, SampleBatch, StudentT};
pub use error::{Error, Result};
pub use gaussianize::{GammaMapSpec, Route};
pub use inherited::{InheritedSpec, QuadratureMoments};
pub use response::{GeneralizedSigmoid, Interval, ShapeReport, SigmoidTerm};
pub use stats::{histogram, sample_moments, Histogram, HistogramSpec, MomentEstimates};
