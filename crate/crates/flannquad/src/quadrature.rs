//! Classical quadrature baselines and the high-accuracy reference
//! integrator used as the test oracle across the crate.
//!
//! The composite rules carry their textbook error bounds:
//! trapezoid `h²(b−a)/12·max|f″|` and Simpson `(b−a)h⁴/180·max|f⁗|`.
//! The reference integrator is adaptive Simpson with interval bisection
//! and Richardson extrapolation of the local error.

use thiserror::Error;

use crate::expr::{EvalError, Integrable};

/// Hard cap on adaptive subdivisions before giving up.
pub const MAX_REFERENCE_INTERVALS: usize = 1_000_000;

/// Loosest meaning of "reference": tolerances below this are not
/// resolvable above f64 noise on the supported integrands.
pub const MIN_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Trapezoid,
    Simpson,
    Reference,
    Flann,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Trapezoid => "trapezoid",
            Method::Simpson => "simpson",
            Method::Reference => "reference",
            Method::Flann => "flann",
        })
    }
}

/// A quadrature value with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub method: Method,
    /// Present for the composite rules only.
    pub subintervals: Option<usize>,
    /// Worst-case bound when the caller supplied a derivative maximum.
    pub error_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integration interval must satisfy b > a, got [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("subinterval count must be at least {min}, got {m}")]
    TooFewSubintervals { m: usize, min: usize },
    #[error("Simpson's rule needs an even subinterval count, got {0}")]
    OddSubintervals(usize),
    #[error("derivative bound must be non-negative, got {0}")]
    NegativeDerivativeBound(f64),
    #[error("relative tolerance must be at least {MIN_REL_TOL:e}, got {0}")]
    ToleranceTooTight(f64),
    #[error(
        "reference integrator did not converge within {MAX_REFERENCE_INTERVALS} \
         interval evaluations"
    )]
    NonConvergence,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Composite trapezoidal rule over `m` subintervals:
/// `h·(½f₀ + f₁ + … + f_{m−1} + ½f_m)`.
pub fn trapezoid(
    f: &dyn Integrable,
    a: f64,
    b: f64,
    m: usize,
) -> Result<QuadratureResult, QuadratureError> {
    if !(b > a) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if m < 1 {
        return Err(QuadratureError::TooFewSubintervals { m, min: 1 });
    }
    let h = (b - a) / m as f64;
    let mut acc = 0.5 * (f.eval_at(a)? + f.eval_at(b)?);
    for j in 1..m {
        acc += f.eval_at(a + j as f64 * h)?;
    }
    Ok(QuadratureResult {
        value: h * acc,
        method: Method::Trapezoid,
        subintervals: Some(m),
        error_bound: None,
    })
}

/// Composite Simpson 1/3 rule over an even number of subintervals:
/// `(h/3)·(f₀ + 4f₁ + 2f₂ + … + 4f_{m−1} + f_m)`.
pub fn simpson(
    f: &dyn Integrable,
    a: f64,
    b: f64,
    m: usize,
) -> Result<QuadratureResult, QuadratureError> {
    if !(b > a) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if m < 2 {
        return Err(QuadratureError::TooFewSubintervals { m, min: 2 });
    }
    if m % 2 != 0 {
        return Err(QuadratureError::OddSubintervals(m));
    }
    let h = (b - a) / m as f64;
    let mut acc = f.eval_at(a)? + f.eval_at(b)?;
    for j in 1..m {
        let weight = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * f.eval_at(a + j as f64 * h)?;
    }
    Ok(QuadratureResult {
        value: acc * h / 3.0,
        method: Method::Simpson,
        subintervals: Some(m),
        error_bound: None,
    })
}

/// Magnitude of the worst-case trapezoid error `h²(b−a)/12 · max|f″|`.
/// The caller supplies the second-derivative bound.
pub fn trapezoid_error_bound(
    max_abs_f2: f64,
    a: f64,
    b: f64,
    h: f64,
) -> Result<f64, QuadratureError> {
    if !(b > a) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if max_abs_f2 < 0.0 {
        return Err(QuadratureError::NegativeDerivativeBound(max_abs_f2));
    }
    Ok(h * h * (b - a) / 12.0 * max_abs_f2)
}

/// Magnitude of the worst-case Simpson error `(b−a)h⁴/180 · max|f⁗|`.
pub fn simpson_error_bound(
    max_abs_f4: f64,
    a: f64,
    b: f64,
    h: f64,
) -> Result<f64, QuadratureError> {
    if !(b > a) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if max_abs_f4 < 0.0 {
        return Err(QuadratureError::NegativeDerivativeBound(max_abs_f4));
    }
    Ok((b - a) * h.powi(4) / 180.0 * max_abs_f4)
}

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    /// Simpson estimate over [a, b].
    estimate: f64,
    /// Absolute error budget for this segment.
    eps: f64,
}

/// Adaptive-Simpson reference integrator.
///
/// Splits intervals until the Richardson error estimate of each segment
/// drops under its share of `rel_tol` times the integral's magnitude, then
/// sums the extrapolated contributions left to right, so the result is
/// deterministic. The magnitude scale comes from a coarse composite pass;
/// a tiny floor keeps the budget positive for near-zero integrals.
pub fn reference(
    f: &dyn Integrable,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    if !(b > a) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if !(rel_tol >= MIN_REL_TOL) {
        return Err(QuadratureError::ToleranceTooTight(rel_tol));
    }

    let coarse = simpson(f, a, b, 32)?.value;
    let scale = coarse.abs().max(1e-290);
    let root_eps = rel_tol * scale;

    let eval = |x: f64| f.eval_at(x);
    let midpoint = 0.5 * (a + b);
    let (fa, fm, fb) = (eval(a)?, eval(midpoint)?, eval(b)?);
    let root_estimate = (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    let mut stack = vec![Segment {
        a,
        b,
        fa,
        fm,
        fb,
        estimate: root_estimate,
        eps: root_eps,
    }];
    let mut total = 0.0;
    let mut processed = 0usize;

    // Depth-first, left child pushed last so contributions accumulate in
    // ascending x order.
    while let Some(seg) = stack.pop() {
        processed += 1;
        if processed > MAX_REFERENCE_INTERVALS {
            return Err(QuadratureError::NonConvergence);
        }
        let mid = 0.5 * (seg.a + seg.b);
        let left_mid = 0.5 * (seg.a + mid);
        let right_mid = 0.5 * (mid + seg.b);
        let (fl, fr) = (eval(left_mid)?, eval(right_mid)?);
        let left = (mid - seg.a) / 6.0 * (seg.fa + 4.0 * fl + seg.fm);
        let right = (seg.b - mid) / 6.0 * (seg.fm + 4.0 * fr + seg.fb);
        let refined = left + right;
        let delta = refined - seg.estimate;
        // |refined - exact| ≈ |delta| / 15 by Richardson extrapolation
        if delta.abs() <= 15.0 * seg.eps || (seg.b - seg.a) < f64::EPSILON * (b - a) {
            total += refined + delta / 15.0;
            continue;
        }
        let child_eps = (0.5 * seg.eps).max(1e-300);
        stack.push(Segment {
            a: mid,
            b: seg.b,
            fa: seg.fm,
            fm: fr,
            fb: seg.fb,
            estimate: right,
            eps: child_eps,
        });
        stack.push(Segment {
            a: seg.a,
            b: mid,
            fa: seg.fa,
            fm: fl,
            fb: seg.fm,
            estimate: left,
            eps: child_eps,
        });
    }

    Ok(QuadratureResult {
        value: total,
        method: Method::Reference,
        subintervals: None,
        error_bound: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::expr::parse;

    const INT_SQRT_1PX2_0_2: f64 = 2.9578857150891948; // √5 + ½·ln(2+√5)
    const INT_2X_0_2: f64 = 4.328085122666891; // 3/ln 2
    const INT_X6_0_6: f64 = 39990.857142857145; // 6⁷/7

    #[test]
    fn trapezoid_is_exact_on_linear() {
        let f = |x: f64| x;
        let r = trapezoid(&f, 0.0, 1.0, 1).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.subintervals, Some(1));
    }

    #[test]
    fn trapezoid_quadratic_hand_value() {
        // m=2 on x² over [0,1]: 0.5·(½·0 + 0.25 + ½·1) = 0.375
        let f = |x: f64| x * x;
        let r = trapezoid(&f, 0.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(r.value, 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(r.value - 1.0 / 3.0, 1.0 / 24.0, epsilon = 1e-15);
    }

    #[test]
    fn trapezoid_x6_overshoots_badly() {
        let f = parse("x^6").unwrap();
        let r = trapezoid(&f, 0.0, 6.0, 11).unwrap();
        // brute-force composite sum as the oracle
        let h = 6.0 / 11.0;
        let mut brute = 0.5 * (0.0f64.powi(6) + 6.0f64.powi(6));
        for j in 1..11 {
            brute += (j as f64 * h).powi(6);
        }
        brute *= h;
        assert_abs_diff_eq!(r.value, brute, epsilon = 1e-9 * brute);
        let err = r.value - INT_X6_0_6;
        assert!(err > 1000.0, "trapezoid error should be large, got {err}");
    }

    #[test]
    fn simpson_exact_through_cubics() {
        // (0.5/3)·(0 + 4·0.125 + 1) = 0.25
        let f = |x: f64| x * x * x;
        let r = simpson(&f, 0.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(r.value, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn simpson_quartic_hand_value() {
        let f = |x: f64| x.powi(4);
        let r = simpson(&f, 0.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(r.value, 0.2083333333333333, epsilon = 1e-15);
        assert_abs_diff_eq!(r.value - 0.2, 1.0 / 120.0, epsilon = 1e-15);
    }

    #[test]
    fn simpson_constant() {
        let c = 3.25;
        let f = move |_: f64| c;
        for m in [2, 4, 10] {
            let r = simpson(&f, -1.0, 2.0, m).unwrap();
            assert_abs_diff_eq!(r.value, c * 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn simpson_rejects_odd_subintervals() {
        let f = |x: f64| x;
        assert!(matches!(
            simpson(&f, 0.0, 1.0, 3),
            Err(QuadratureError::OddSubintervals(3))
        ));
        assert!(matches!(
            simpson(&f, 0.0, 1.0, 1),
            Err(QuadratureError::TooFewSubintervals { .. })
        ));
    }

    #[test]
    fn trapezoid_bound_equals_true_error_for_constant_f2() {
        // f = x² has constant f″ = 2, so the bound is the exact error
        let bound = trapezoid_error_bound(2.0, 0.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(bound, 1.0 / 24.0, epsilon = 1e-15);
        let f = |x: f64| x * x;
        let true_err = trapezoid(&f, 0.0, 1.0, 2).unwrap().value - 1.0 / 3.0;
        assert_abs_diff_eq!(bound, true_err, epsilon = 1e-12);
    }

    #[test]
    fn simpson_bound_equals_true_error_for_constant_f4() {
        // f = x⁴ has constant f⁗ = 24
        let bound = simpson_error_bound(24.0, 0.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(bound, 1.0 / 120.0, epsilon = 1e-15);
        let f = |x: f64| x.powi(4);
        let true_err = simpson(&f, 0.0, 1.0, 2).unwrap().value - 0.2;
        assert_abs_diff_eq!(bound, true_err, epsilon = 1e-12);
    }

    #[test]
    fn bounds_scale_with_h() {
        let b1 = trapezoid_error_bound(2.0, 0.0, 1.0, 0.25).unwrap();
        let b2 = trapezoid_error_bound(2.0, 0.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(b2 / b1, 4.0, epsilon = 1e-12);
        let s1 = simpson_error_bound(24.0, 0.0, 1.0, 0.25).unwrap();
        let s2 = simpson_error_bound(24.0, 0.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(s2 / s1, 16.0, epsilon = 1e-12);
        assert_eq!(trapezoid_error_bound(0.0, 0.0, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(simpson_error_bound(0.0, 0.0, 1.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn bounds_reject_negative_maxima() {
        assert!(matches!(
            trapezoid_error_bound(-1.0, 0.0, 1.0, 0.5),
            Err(QuadratureError::NegativeDerivativeBound(_))
        ));
        assert!(matches!(
            simpson_error_bound(-1.0, 0.0, 1.0, 0.5),
            Err(QuadratureError::NegativeDerivativeBound(_))
        ));
    }

    #[test]
    fn reference_matches_analytic_values() {
        let cases: [(&str, f64, f64, f64); 3] = [
            ("sqrt(1+x^2)", 0.0, 2.0, INT_SQRT_1PX2_0_2),
            ("2^x", 0.0, 2.0, INT_2X_0_2),
            ("x^6", 0.0, 6.0, INT_X6_0_6),
        ];
        for (src, a, b, exact) in cases {
            let f = parse(src).unwrap();
            for rel_tol in [1e-8, 1e-10, 1e-12] {
                let r = reference(&f, a, b, rel_tol).unwrap();
                assert!(
                    (r.value - exact).abs() <= rel_tol * exact.abs(),
                    "{src} at rel_tol {rel_tol}: {} vs {exact}",
                    r.value
                );
            }
        }
    }

    #[test]
    fn reference_self_consistency_across_tolerances() {
        for src in ["sqrt(1+x^2)", "2^x", "x^6", "sqrt(1-0.5*sin(x)^2)"] {
            let f = parse(src).unwrap();
            let (a, b) = if src == "x^6" {
                (0.0, 6.0)
            } else if src.contains("sin") {
                (0.0, std::f64::consts::FRAC_PI_2)
            } else {
                (0.0, 2.0)
            };
            let coarse = reference(&f, a, b, 1e-10).unwrap().value;
            let fine = reference(&f, a, b, 1e-12).unwrap().value;
            assert!(
                (coarse - fine).abs() <= 1e-9 * fine.abs(),
                "{src}: {coarse} vs {fine}"
            );
        }
    }

    #[test]
    fn reference_propagates_domain_errors() {
        let f = parse("1/x").unwrap();
        assert!(matches!(
            reference(&f, 0.0, 2.0, 1e-10),
            Err(QuadratureError::Eval(_))
        ));
    }

    #[test]
    fn reference_rejects_overtight_tolerance() {
        let f = |x: f64| x;
        assert!(matches!(
            reference(&f, 0.0, 1.0, 1e-14),
            Err(QuadratureError::ToleranceTooTight(_))
        ));
    }

    #[test]
    fn monotone_refinement_on_x6() {
        let f = parse("x^6").unwrap();
        let mut last = f64::INFINITY;
        for m in [11, 22, 44, 88] {
            let err = (trapezoid(&f, 0.0, 6.0, m).unwrap().value - INT_X6_0_6).abs();
            assert!(err < last, "error should shrink as m doubles");
            last = err;
        }
    }

    #[test]
    fn bound_validity_on_corpus_functions() {
        // hand-derived maxima over the stated intervals:
        //   sqrt(1+x²): f″ = (1+x²)^(-3/2) ≤ 1;  f⁗ = (12x²−3)(1+x²)^(-7/2), |f⁗| ≤ 3
        //   2^x on [0,2]: f″ = ln²2·2^x ≤ 4ln²2; f⁗ = ln⁴2·2^x ≤ 4ln⁴2
        //   x⁶ on [0,6]:  f″ = 30x⁴ ≤ 38880;     f⁗ = 360x² ≤ 12960
        let ln2 = std::f64::consts::LN_2;
        let cases: [(&str, f64, f64, f64, f64, f64); 3] = [
            ("sqrt(1+x^2)", 0.0, 2.0, 1.0, 3.0, INT_SQRT_1PX2_0_2),
            ("2^x", 0.0, 2.0, 4.0 * ln2 * ln2, 4.0 * ln2.powi(4), INT_2X_0_2),
            ("x^6", 0.0, 6.0, 38880.0, 12960.0, INT_X6_0_6),
        ];
        for (src, a, b, max_f2, max_f4, exact) in cases {
            let f = parse(src).unwrap();
            for m in [4usize, 8, 16] {
                let h = (b - a) / m as f64;
                let t_err = (trapezoid(&f, a, b, m).unwrap().value - exact).abs();
                let t_bound = trapezoid_error_bound(max_f2, a, b, h).unwrap();
                assert!(
                    t_err <= t_bound * (1.0 + 1e-12),
                    "{src} m={m}: trapezoid error {t_err} exceeds bound {t_bound}"
                );
                let s_err = (simpson(&f, a, b, m).unwrap().value - exact).abs();
                let s_bound = simpson_error_bound(max_f4, a, b, h).unwrap();
                assert!(
                    s_err <= s_bound * (1.0 + 1e-12),
                    "{src} m={m}: simpson error {s_err} exceeds bound {s_bound}"
                );
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // trapezoid integrates degree-≤1 polynomials exactly
            #[test]
            fn trapezoid_exact_on_linears(
                c0 in -5.0f64..5.0,
                c1 in -5.0f64..5.0,
                a in -5.0f64..4.0,
                width in 0.1f64..5.0,
                m in 1usize..20,
            ) {
                let b = a + width;
                let f = move |x: f64| c0 + c1 * x;
                let exact = c0 * (b - a) + 0.5 * c1 * (b * b - a * a);
                let got = trapezoid(&f, a, b, m).unwrap().value;
                prop_assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0));
            }

            // Simpson integrates degree-≤3 polynomials exactly
            #[test]
            fn simpson_exact_on_cubics(
                c0 in -5.0f64..5.0,
                c1 in -5.0f64..5.0,
                c2 in -5.0f64..5.0,
                c3 in -5.0f64..5.0,
                a in -5.0f64..4.0,
                width in 0.1f64..5.0,
                half_m in 1usize..10,
            ) {
                let b = a + width;
                let m = 2 * half_m;
                let f = move |x: f64| c0 + x * (c1 + x * (c2 + x * c3));
                let prim = |x: f64| {
                    x * (c0 + x * (c1 / 2.0 + x * (c2 / 3.0 + x * c3 / 4.0)))
                };
                let exact = prim(b) - prim(a);
                let got = simpson(&f, a, b, m).unwrap().value;
                prop_assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0));
            }
        }
    }
}
