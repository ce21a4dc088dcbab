//! Monomial functional links and their analytic derivatives.
//!
//! The network input is expanded through fixed links `Φ₁..Φₙ` with
//! `Φᵢ(x) = xⁱ` (no constant link: a constant cancels in `N(b) − N(a)` and
//! is invisible to the derivative-matching loss). An optional affine remap
//! `u = (x − a)/(b − a)` keeps the links inside `[-1, 1]` on the training
//! interval, which is what makes plain gradient descent usable on wide
//! domains.

use thiserror::Error;

/// Largest supported link count. Past this, double-precision normal
/// equations on monomials carry no information.
pub const MAX_DEGREE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scaling {
    None,
    /// u = (x - a) / (b - a)
    Affine { a: f64, b: f64 },
}

/// The functional-link set `Φ₁..Φₙ`. Immutable; both expansions are pure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSet {
    degree: usize,
    scaling: Scaling,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("link count must be between 1 and {MAX_DEGREE}, got {0}")]
    DegreeOutOfRange(usize),
    #[error("scaling interval must satisfy b > a, got [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
}

impl BasisSet {
    /// Raw monomial links `Φᵢ(x) = xⁱ`.
    pub fn monomials(degree: usize) -> Result<Self, BasisError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(BasisError::DegreeOutOfRange(degree));
        }
        Ok(BasisSet {
            degree,
            scaling: Scaling::None,
        })
    }

    /// Monomial links in the scaled variable `u = (x - a)/(b - a)`.
    pub fn scaled_monomials(degree: usize, a: f64, b: f64) -> Result<Self, BasisError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(BasisError::DegreeOutOfRange(degree));
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(BasisError::InvalidInterval { a, b });
        }
        Ok(BasisSet {
            degree,
            scaling: Scaling::Affine { a, b },
        })
    }

    /// Number of links `n`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The scaling interval, if the basis is domain-scaled.
    pub fn scaling_interval(&self) -> Option<(f64, f64)> {
        match self.scaling {
            Scaling::None => None,
            Scaling::Affine { a, b } => Some((a, b)),
        }
    }

    fn substitute(&self, x: f64) -> (f64, f64) {
        match self.scaling {
            Scaling::None => (x, 1.0),
            Scaling::Affine { a, b } => ((x - a) / (b - a), 1.0 / (b - a)),
        }
    }

    /// `[Φ₁(x), …, Φₙ(x)]`.
    pub fn expand(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.degree];
        self.expand_into(x, &mut out);
        out
    }

    /// `[Φ₁′(x), …, Φₙ′(x)]`; with scaling active the chain rule applies,
    /// `d/dx uⁱ = i·uⁱ⁻¹ / (b − a)`.
    pub fn expand_derivative(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.degree];
        self.expand_derivative_into(x, &mut out);
        out
    }

    /// Allocation-free form of [`expand`](Self::expand).
    pub fn expand_into(&self, x: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.degree);
        let (u, _) = self.substitute(x);
        let mut power = 1.0;
        for slot in out.iter_mut() {
            power *= u;
            *slot = power;
        }
    }

    /// Allocation-free form of [`expand_derivative`](Self::expand_derivative).
    pub fn expand_derivative_into(&self, x: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.degree);
        let (u, du) = self.substitute(x);
        // Φᵢ′ = i·uⁱ⁻¹·du
        let mut power = 1.0; // u^(i-1)
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = (i + 1) as f64 * power * du;
            power *= u;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn monomial_powers() {
        let basis = BasisSet::monomials(3).unwrap();
        assert_eq!(basis.expand(2.0), vec![2.0, 4.0, 8.0]);
    }

    #[test]
    fn no_constant_link_so_zero_maps_to_zeros() {
        for n in [1, 4, 8, 16] {
            let basis = BasisSet::monomials(n).unwrap();
            assert!(basis.expand(0.0).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn scaled_expansion_uses_unit_variable() {
        let basis = BasisSet::scaled_monomials(2, 0.0, 6.0).unwrap();
        assert_eq!(basis.expand(3.0), vec![0.5, 0.25]);
    }

    #[test]
    fn derivative_powers() {
        let basis = BasisSet::monomials(3).unwrap();
        assert_eq!(basis.expand_derivative(2.0), vec![1.0, 4.0, 12.0]);
    }

    #[test]
    fn only_first_derivative_link_survives_at_zero() {
        let basis = BasisSet::monomials(4).unwrap();
        assert_eq!(basis.expand_derivative(0.0), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn scaled_derivative_applies_chain_rule() {
        // d/dx uⁱ = i·uⁱ⁻¹/(b−a) on (0,6) at x=3: [1/6, 2·0.5/6]
        let basis = BasisSet::scaled_monomials(2, 0.0, 6.0).unwrap();
        let d = basis.expand_derivative(3.0);
        assert_abs_diff_eq!(d[0], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 1.0 / 6.0, epsilon = 1e-15);
        // cross-check against a central difference of expand()
        let h = 1e-6;
        for i in 0..2 {
            let fd = (basis.expand(3.0 + h)[i] - basis.expand(3.0 - h)[i]) / (2.0 * h);
            assert_abs_diff_eq!(d[i], fd, epsilon = 1e-9);
        }
    }

    #[test]
    fn degree_bounds_enforced() {
        assert!(matches!(
            BasisSet::monomials(0),
            Err(BasisError::DegreeOutOfRange(0))
        ));
        assert!(matches!(
            BasisSet::monomials(MAX_DEGREE + 1),
            Err(BasisError::DegreeOutOfRange(_))
        ));
        assert!(BasisSet::monomials(MAX_DEGREE).is_ok());
    }

    #[test]
    fn scaling_interval_must_be_increasing() {
        assert!(matches!(
            BasisSet::scaled_monomials(2, 1.0, 1.0),
            Err(BasisError::InvalidInterval { .. })
        ));
        assert!(matches!(
            BasisSet::scaled_monomials(2, 2.0, -1.0),
            Err(BasisError::InvalidInterval { .. })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Analytic derivatives agree with central differences of the
            // expansion for all link indices up to 8.
            #[test]
            fn derivative_consistency(x in -3.0f64..3.0, n in 1usize..=8) {
                let basis = BasisSet::monomials(n).unwrap();
                let h = 1e-6;
                let analytic = basis.expand_derivative(x);
                let plus = basis.expand(x + h);
                let minus = basis.expand(x - h);
                for i in 0..n {
                    let fd = (plus[i] - minus[i]) / (2.0 * h);
                    let tol = 1e-4 * analytic[i].abs().max(1.0);
                    prop_assert!(
                        (analytic[i] - fd).abs() <= tol,
                        "link {i} at x={x}: analytic {} vs fd {}",
                        analytic[i],
                        fd
                    );
                }
            }

            #[test]
            fn scaled_derivative_consistency(t in 0.05f64..0.95, n in 1usize..=8) {
                let (a, b) = (-1.5, 4.0);
                let x = a + t * (b - a);
                let basis = BasisSet::scaled_monomials(n, a, b).unwrap();
                let h = 1e-6;
                let analytic = basis.expand_derivative(x);
                let plus = basis.expand(x + h);
                let minus = basis.expand(x - h);
                for i in 0..n {
                    let fd = (plus[i] - minus[i]) / (2.0 * h);
                    let tol = 1e-4 * analytic[i].abs().max(1.0);
                    prop_assert!((analytic[i] - fd).abs() <= tol);
                }
            }

            // Both expansions always return exactly n values.
            #[test]
            fn length_contract(x in -5.0f64..5.0, n in 1usize..=MAX_DEGREE) {
                let basis = BasisSet::monomials(n).unwrap();
                prop_assert_eq!(basis.expand(x).len(), n);
                prop_assert_eq!(basis.expand_derivative(x).len(), n);
            }

            // With affine scaling, every link stays within [-1, 1] on the
            // scaled interval.
            #[test]
            fn scaling_keeps_links_bounded(t in 0.0f64..=1.0, n in 1usize..=MAX_DEGREE) {
                let (a, b) = (0.0, 6.0);
                let x = a + t * (b - a);
                let basis = BasisSet::scaled_monomials(n, a, b).unwrap();
                for v in basis.expand(x) {
                    prop_assert!(v.abs() <= 1.0 + 1e-15);
                }
            }
        }
    }
}
