//! The trained network `N(x)` and definite integrals read off it.
//!
//! Once the weights are locked, any sub-interval integral of the trained
//! domain is just `N(b₁) − N(a₁)`. Queries outside the trained domain are
//! refused: polynomial extrapolation is unreliable and nothing in the
//! training constrains it.

use serde::Deserialize;
use thiserror::Error;

use crate::basis::{BasisError, BasisSet};

/// Learned weights plus the basis and the interval they were trained on.
/// Immutable; evaluation and integration are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedNetwork {
    weights: Vec<f64>,
    basis: BasisSet,
    domain: (f64, f64),
    final_error: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("{0} weights do not match {1} links")]
    WeightCountMismatch(usize, usize),
    #[error("domain must satisfy b > a, got [{a}, {b}]")]
    InvalidDomain { a: f64, b: f64 },
    #[error("final error must be a non-negative finite value, got {0}")]
    InvalidFinalError(f64),
    #[error("weights must be finite")]
    NonFiniteWeight,
    #[error(
        "integration limits [{lo}, {hi}] leave the trained domain [{a}, {b}]; \
         the network does not extrapolate"
    )]
    OutOfDomain { lo: f64, hi: f64, a: f64, b: f64 },
    #[error("model JSON is malformed: {0}")]
    MalformedModel(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

impl TrainedNetwork {
    pub fn new(
        weights: Vec<f64>,
        basis: BasisSet,
        domain: (f64, f64),
        final_error: f64,
    ) -> Result<Self, NetworkError> {
        if weights.len() != basis.degree() {
            return Err(NetworkError::WeightCountMismatch(
                weights.len(),
                basis.degree(),
            ));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(NetworkError::NonFiniteWeight);
        }
        let (a, b) = domain;
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(NetworkError::InvalidDomain { a, b });
        }
        if !final_error.is_finite() || final_error < 0.0 {
            return Err(NetworkError::InvalidFinalError(final_error));
        }
        Ok(TrainedNetwork {
            weights,
            basis,
            domain,
            final_error,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    /// The trained interval `[a, b]`.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Loss at the locked weights.
    pub fn final_error(&self) -> f64 {
        self.final_error
    }

    /// `N(x) = Σ wᵢ·Φᵢ(x)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let links = self.basis.expand(x);
        self.weights.iter().zip(&links).map(|(w, p)| w * p).sum()
    }

    /// `∫ₐ₁^б₁ f ≈ N(b₁) − N(a₁)` for any sub-interval of the trained
    /// domain. Reversed limits are allowed and negate the result exactly.
    pub fn integrate(&self, a1: f64, b1: f64) -> Result<f64, NetworkError> {
        let (a, b) = self.domain;
        let lo = a1.min(b1);
        let hi = a1.max(b1);
        if lo < a || hi > b || !lo.is_finite() || !hi.is_finite() {
            return Err(NetworkError::OutOfDomain { lo, hi, a, b });
        }
        Ok(self.evaluate(b1) - self.evaluate(a1))
    }

    /// Serialize as a flat JSON object:
    /// `{degree, scaling:{a,b}|null, weights:[…], domain:[a,b], final_error}`.
    /// Floats are written with 17 significant digits, which round-trips
    /// `f64` exactly.
    pub fn to_json(&self) -> String {
        let scaling = match self.basis.scaling_interval() {
            Some((a, b)) => format!(r#"{{"a":{},"b":{}}}"#, fmt_f64(a), fmt_f64(b)),
            None => "null".to_string(),
        };
        let weights: Vec<String> = self.weights.iter().map(|w| fmt_f64(*w)).collect();
        format!(
            r#"{{"degree":{},"scaling":{},"weights":[{}],"domain":[{},{}],"final_error":{}}}"#,
            self.basis.degree(),
            scaling,
            weights.join(","),
            fmt_f64(self.domain.0),
            fmt_f64(self.domain.1),
            fmt_f64(self.final_error),
        )
    }

    /// Parse a model produced by [`to_json`](Self::to_json).
    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let raw: RawModel =
            serde_json::from_str(text).map_err(|e| NetworkError::MalformedModel(e.to_string()))?;
        let basis = match raw.scaling {
            Some(interval) => BasisSet::scaled_monomials(raw.degree, interval.a, interval.b)?,
            None => BasisSet::monomials(raw.degree)?,
        };
        TrainedNetwork::new(
            raw.weights,
            basis,
            (raw.domain[0], raw.domain[1]),
            raw.final_error,
        )
    }
}

/// 17 significant digits: enough to reproduce any f64 bit pattern.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Deserialize)]
struct RawModel {
    degree: usize,
    scaling: Option<RawScaling>,
    weights: Vec<f64>,
    domain: [f64; 2],
    final_error: f64,
}

#[derive(Deserialize)]
struct RawScaling {
    a: f64,
    b: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cubic_network() -> TrainedNetwork {
        // N = x^3 over [0, 2]
        TrainedNetwork::new(
            vec![0.0, 0.0, 1.0],
            BasisSet::monomials(3).unwrap(),
            (0.0, 2.0),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn zero_weights_evaluate_to_zero() {
        let net = TrainedNetwork::new(
            vec![0.0, 0.0],
            BasisSet::monomials(2).unwrap(),
            (0.0, 1.0),
            0.0,
        )
        .unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(net.evaluate(x), 0.0);
        }
    }

    #[test]
    fn evaluate_known_polynomials() {
        assert_eq!(cubic_network().evaluate(2.0), 8.0);
        let net = TrainedNetwork::new(
            vec![1.0, 1.0],
            BasisSet::monomials(2).unwrap(),
            (0.0, 4.0),
            0.0,
        )
        .unwrap();
        assert_eq!(net.evaluate(3.0), 12.0); // x + x^2 at 3
    }

    #[test]
    fn zero_width_integral_is_exactly_zero() {
        let net = cubic_network();
        for x in [0.0, 0.7, 2.0] {
            assert_eq!(net.integrate(x, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn cubic_telescopes() {
        assert_eq!(cubic_network().integrate(0.0, 2.0).unwrap(), 8.0);
    }

    #[test]
    fn reversed_limits_negate_exactly() {
        let net = cubic_network();
        let forward = net.integrate(0.25, 1.75).unwrap();
        let backward = net.integrate(1.75, 0.25).unwrap();
        assert_eq!(forward.to_bits(), (-backward).to_bits());
    }

    #[test]
    fn extrapolation_is_refused() {
        let net = cubic_network();
        assert!(matches!(
            net.integrate(0.0, 2.0000001),
            Err(NetworkError::OutOfDomain { .. })
        ));
        assert!(matches!(
            net.integrate(-0.1, 1.0),
            Err(NetworkError::OutOfDomain { .. })
        ));
        // reversed limits are still domain-checked on the enclosing range
        assert!(matches!(
            net.integrate(2.5, 0.5),
            Err(NetworkError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn constructor_validates() {
        let basis = BasisSet::monomials(3).unwrap();
        assert!(matches!(
            TrainedNetwork::new(vec![0.0; 2], basis, (0.0, 1.0), 0.0),
            Err(NetworkError::WeightCountMismatch(2, 3))
        ));
        assert!(matches!(
            TrainedNetwork::new(vec![0.0; 3], basis, (1.0, 1.0), 0.0),
            Err(NetworkError::InvalidDomain { .. })
        ));
        assert!(matches!(
            TrainedNetwork::new(vec![0.0; 3], basis, (0.0, 1.0), -1.0),
            Err(NetworkError::InvalidFinalError(_))
        ));
    }

    #[test]
    fn json_schema_is_stable() {
        let net = TrainedNetwork::new(
            vec![0.5, -0.25],
            BasisSet::scaled_monomials(2, 0.0, 6.0).unwrap(),
            (0.0, 6.0),
            1.25e-9,
        )
        .unwrap();
        let json = net.to_json();
        assert!(json.starts_with(r#"{"degree":2,"scaling":{"a":"#));
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["degree"], 2);
        assert_eq!(value["weights"].as_array().unwrap().len(), 2);
        assert_eq!(value["domain"][1], 6.0);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let weights = vec![
            0.1 + 0.2, // 0.30000000000000004: needs all 17 digits
            -1.0 / 3.0,
            39990.857142857142,
        ];
        let net = TrainedNetwork::new(
            weights.clone(),
            BasisSet::scaled_monomials(3, 0.0, 2.0).unwrap(),
            (0.0, 2.0),
            3.25e-11,
        )
        .unwrap();
        let restored = TrainedNetwork::from_json(&net.to_json()).unwrap();
        for (w, r) in weights.iter().zip(restored.weights()) {
            assert_eq!(w.to_bits(), r.to_bits());
        }
        assert_eq!(restored.domain(), (0.0, 2.0));
        assert_eq!(restored.final_error().to_bits(), 3.25e-11f64.to_bits());
        assert_eq!(
            restored.basis().scaling_interval(),
            Some((0.0, 2.0))
        );
    }

    #[test]
    fn unscaled_model_round_trips() {
        let net = cubic_network();
        let restored = TrainedNetwork::from_json(&net.to_json()).unwrap();
        assert_eq!(restored.basis().scaling_interval(), None);
        assert_eq!(restored.integrate(0.0, 2.0).unwrap(), 8.0);
    }

    #[test]
    fn malformed_model_is_rejected() {
        assert!(matches!(
            TrainedNetwork::from_json("{"),
            Err(NetworkError::MalformedModel(_))
        ));
        // degree disagreeing with the weight count
        let bad = r#"{"degree":3,"scaling":null,"weights":[1.0],"domain":[0.0,1.0],"final_error":0.0}"#;
        assert!(matches!(
            TrainedNetwork::from_json(bad),
            Err(NetworkError::WeightCountMismatch(1, 3))
        ));
    }

    #[test]
    fn trained_sqrt_network_matches_analytic_integral() {
        // end-to-end: train on sqrt(1+x^2) and compare against the
        // antiderivative (x·sqrt(1+x²) + asinh x)/2 evaluated at 2
        let f = |x: f64| (1.0 + x * x).sqrt();
        let config = crate::trainer::TrainingConfig {
            basis: crate::trainer::BasisSpec {
                degree: 8,
                scale_to_domain: true,
            },
            max_iterations: 200_000,
            ..Default::default()
        };
        let (net, _) = crate::trainer::train(&f, 0.0, 2.0, &config).unwrap();
        let exact = 2.9578857150891948;
        assert_abs_diff_eq!(net.integrate(0.0, 2.0).unwrap(), exact, epsilon = 1e-3);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // integrate(a1,c) + integrate(c,b1) telescopes through N(c)
            #[test]
            fn additivity_telescopes(
                weights in proptest::collection::vec(-3.0f64..3.0, 4),
                t in 0.0f64..=1.0,
                u in 0.0f64..=1.0,
                v in 0.0f64..=1.0,
            ) {
                let net = TrainedNetwork::new(
                    weights,
                    BasisSet::scaled_monomials(4, -1.0, 3.0).unwrap(),
                    (-1.0, 3.0),
                    0.0,
                ).unwrap();
                let (a, b) = net.domain();
                let mut ends = [a + t * (b - a), a + u * (b - a), a + v * (b - a)];
                ends.sort_by(f64::total_cmp);
                let [a1, c, b1] = ends;
                let split = net.integrate(a1, c).unwrap() + net.integrate(c, b1).unwrap();
                let whole = net.integrate(a1, b1).unwrap();
                let scale = net.evaluate(a1).abs()
                    + 2.0 * net.evaluate(c).abs()
                    + net.evaluate(b1).abs();
                let tol = 8.0 * f64::EPSILON * scale.max(1.0);
                prop_assert!(
                    (split - whole).abs() <= tol,
                    "split {split} vs whole {whole}"
                );
            }

            #[test]
            fn antisymmetry_is_exact(
                weights in proptest::collection::vec(-3.0f64..3.0, 4),
                t in 0.0f64..=1.0,
                u in 0.0f64..=1.0,
            ) {
                let net = TrainedNetwork::new(
                    weights,
                    BasisSet::scaled_monomials(4, -1.0, 3.0).unwrap(),
                    (-1.0, 3.0),
                    0.0,
                ).unwrap();
                let (a, b) = net.domain();
                let (a1, b1) = (a + t * (b - a), a + u * (b - a));
                let fwd = net.integrate(a1, b1).unwrap();
                let bwd = net.integrate(b1, a1).unwrap();
                prop_assert_eq!(fwd.to_bits(), (-bwd).to_bits());
            }
        }
    }
}
