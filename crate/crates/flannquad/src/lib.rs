//! Definite integration with a functional-link network.
//!
//! The integrand `f` is never integrated directly. Instead a single-layer
//! network with monomial links, `N(x) = w₁x + w₂x² + … + wₙxⁿ`, is trained
//! so that its analytic derivative matches `f` on sample points inside
//! `[a, b]`; `N` then approximates an antiderivative of `f` and any
//! sub-interval integral is read off as `N(b₁) − N(a₁)`.
//!
//! ```
//! use flannquad::trainer::{train, BasisSpec, TrainingConfig};
//!
//! // ∫₀² 3x² dx = 8: the antiderivative x³ is exactly representable
//! let f = |x: f64| 3.0 * x * x;
//! let config = TrainingConfig {
//!     basis: BasisSpec { degree: 3, scale_to_domain: true },
//!     tolerance: 1e-12,
//!     ..TrainingConfig::default()
//! };
//! let (network, trace) = train(&f, 0.0, 2.0, &config).unwrap();
//! assert!(trace.converged);
//! assert!((network.integrate(0.0, 2.0).unwrap() - 8.0).abs() < 1e-6);
//! ```
//!
//! [`quadrature`] holds the classical baselines (composite trapezoid and
//! Simpson with their textbook error bounds) and the adaptive reference
//! integrator the tests use as an oracle. [`expr`] parses textual
//! integrands; anything implementing [`expr::Integrable`], including plain
//! closures, can be trained against.
//!
//! With the `parallel` feature (on by default) batch passes fan out via
//! rayon; results are bit-identical to the sequential build.

// Interval checks are written `!(b > a)` so that NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod batch;
pub mod expr;
pub mod integrator;
pub mod quadrature;
pub mod trainer;

pub use basis::BasisSet;
pub use expr::{parse, Integrable, Integrand};
pub use integrator::TrainedNetwork;
pub use quadrature::QuadratureResult;
pub use trainer::{ConvergenceTrace, TrainingConfig};
