//! Gradient-descent training of the link weights, plus an exact
//! least-squares solver used as its oracle.
//!
//! The loss is half the sum of squared residuals `eᵢ = f(xᵢ) − N′(xᵢ)` over
//! `k` interior sample points; its gradient in weight `j` is
//! `−Σᵢ eᵢ·Φⱼ′(xᵢ)`, and each full-batch update is `w ← w − η·∇E`. The loss
//! is quadratic in the weights, so the normal-equations solution is the
//! exact minimizer and gradient descent must approach it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::basis::{BasisError, BasisSet};
use crate::batch;
use crate::expr::{EvalError, Integrable};
use crate::integrator::TrainedNetwork;

/// Training aborts once the loss exceeds this, which signals a learning
/// rate above the stability bound or an ill-conditioned unscaled basis.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Auto learning rate is this multiple of `1/λ_max(AᵀA)`; descent on a
/// quadratic loss is monotone for any factor below 2.
const AUTO_ETA_FACTOR: f64 = 1.8;

const POWER_ITERATIONS: usize = 300;

/// Relative pivot threshold for the normal-equations elimination.
const PIVOT_TOLERANCE: f64 = 1e-12;

/// How the weight vector is initialized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightInit {
    Zeros,
    /// Uniform samples in `[lo, hi)` from a seeded generator.
    Uniform { lo: f64, hi: f64 },
}

impl Default for WeightInit {
    fn default() -> Self {
        WeightInit::Uniform { lo: -0.5, hi: 0.5 }
    }
}

/// Step size for the weight updates.
///
/// `Auto` estimates `λ_max(AᵀA)` by power iteration on the cached design
/// matrix and uses `1.8/λ_max`: safely below the `2/λ_max` stability bound
/// and scale-aware, unlike any fixed constant. The estimate is
/// deterministic (fixed start vector, fixed iteration count).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearningRate {
    Auto,
    Fixed(f64),
}

impl Default for LearningRate {
    fn default() -> Self {
        LearningRate::Auto
    }
}

/// Which links to build for a training domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    pub degree: usize,
    /// Remap the training interval onto `u ∈ (0, 1)` inside each link.
    pub scale_to_domain: bool,
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec {
            degree: 8,
            scale_to_domain: false,
        }
    }
}

impl BasisSpec {
    pub fn build(&self, a: f64, b: f64) -> Result<BasisSet, BasisError> {
        if self.scale_to_domain {
            BasisSet::scaled_monomials(self.degree, a, b)
        } else {
            BasisSet::monomials(self.degree)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    /// Number of interior training points.
    pub k: usize,
    pub eta: LearningRate,
    pub max_iterations: usize,
    /// Stop once the loss drops to this value.
    pub tolerance: f64,
    pub init: WeightInit,
    pub seed: u64,
    pub basis: BasisSpec,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            k: 10,
            eta: LearningRate::Auto,
            max_iterations: 1_000_000,
            tolerance: 1e-10,
            init: WeightInit::default(),
            seed: 0,
            basis: BasisSpec::default(),
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.k == 0 {
            return Err(TrainError::ZeroPoints);
        }
        if self.k < self.basis.degree {
            return Err(TrainError::TooFewPoints {
                k: self.k,
                n: self.basis.degree,
            });
        }
        if let LearningRate::Fixed(eta) = self.eta {
            if !(eta > 0.0) || !eta.is_finite() {
                return Err(TrainError::NonPositiveLearningRate(eta));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(TrainError::NonPositiveTolerance(self.tolerance));
        }
        if self.max_iterations == 0 {
            return Err(TrainError::ZeroIterations);
        }
        if let WeightInit::Uniform { lo, hi } = self.init {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(TrainError::InvalidInitRange { lo, hi });
            }
        }
        Ok(())
    }
}

/// Loss value per completed iteration, with the stop verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    /// One loss value per completed iteration, recorded after the update.
    pub errors: Vec<f64>,
    /// True iff the final loss reached the configured tolerance.
    pub converged: bool,
    pub iterations_run: usize,
    /// The step size actually used (the resolved value under `Auto`).
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("training interval must satisfy b > a, got [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("k must be at least 1")]
    ZeroPoints,
    #[error("k = {k} training points cannot determine n = {n} weights; need k >= n")]
    TooFewPoints { k: usize, n: usize },
    #[error("learning rate must be positive and finite, got {0}")]
    NonPositiveLearningRate(f64),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("max_iterations must be at least 1")]
    ZeroIterations,
    #[error("weight init range must satisfy lo < hi, got [{lo}, {hi})")]
    InvalidInitRange { lo: f64, hi: f64 },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(
        "training diverged at iteration {iteration} (E = {error:.3e}); \
         the learning rate exceeds the stability bound or the basis is \
         ill-conditioned; try domain scaling or a smaller eta"
    )]
    Diverged { error: f64, iteration: usize },
    #[error(
        "normal equations are rank-deficient: pivot {pivot:.3e} at column \
         {column} is below {PIVOT_TOLERANCE:e} of the row scale"
    )]
    RankDeficient { column: usize, pivot: f64 },
    #[error("power iteration failed to produce a positive spectral estimate ({0})")]
    SpectralEstimateFailed(f64),
}

/// The `k` interior grid points `xᵢ = a + i·(b−a)/(k+1)`, `i = 1..k`.
///
/// This spacing divides `[a, b]` into `k+1` equal sub-intervals, matching
/// the discretization the classical baselines use for the same `k`.
pub fn sample_points(a: f64, b: f64, k: usize) -> Result<Vec<f64>, TrainError> {
    if !(b > a) {
        return Err(TrainError::InvalidInterval { a, b });
    }
    if k == 0 {
        return Err(TrainError::ZeroPoints);
    }
    let h = (b - a) / (k + 1) as f64;
    Ok((1..=k).map(|i| a + i as f64 * h).collect())
}

fn dot(xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter().zip(ys).map(|(x, y)| x * y).sum()
}

/// `eᵢ = f(x) − N′(x)` for the given weights.
pub fn residual(
    f: &dyn Integrable,
    weights: &[f64],
    basis: &BasisSet,
    x: f64,
) -> Result<f64, EvalError> {
    assert_eq!(weights.len(), basis.degree(), "weight/link count mismatch");
    let derivative = basis.expand_derivative(x);
    Ok(f.eval_at(x)? - dot(weights, &derivative))
}

/// The loss `E = ½ Σᵢ eᵢ²` over the given points. Always non-negative.
pub fn loss(
    f: &dyn Integrable,
    weights: &[f64],
    basis: &BasisSet,
    points: &[f64],
) -> Result<f64, EvalError> {
    let residuals = batch::try_map(points, |&x| residual(f, weights, basis, x))?;
    Ok(0.5 * residuals.iter().map(|e| e * e).sum::<f64>())
}

/// The loss gradient: component `j` is `−Σᵢ eᵢ·Φⱼ′(xᵢ)`.
pub fn gradient(
    f: &dyn Integrable,
    weights: &[f64],
    basis: &BasisSet,
    points: &[f64],
) -> Result<Vec<f64>, EvalError> {
    let n = basis.degree();
    let rows = design_rows(basis, points);
    let residuals = batch::try_map(points, |&x| residual(f, weights, basis, x))?;
    let mut grad = vec![0.0; n];
    gradient_pass(&rows, &residuals, &mut grad);
    Ok(grad)
}

/// One descent update: `w − η·grad`, elementwise.
pub fn gd_step(weights: &[f64], grad: &[f64], eta: f64) -> Vec<f64> {
    assert_eq!(weights.len(), grad.len(), "weight/gradient length mismatch");
    weights
        .iter()
        .zip(grad)
        .map(|(w, g)| w - eta * g)
        .collect()
}

/// Flat row-major design matrix with `rows[i*n + j] = Φⱼ₊₁′(xᵢ)`.
fn design_rows(basis: &BasisSet, points: &[f64]) -> Vec<f64> {
    let n = basis.degree();
    let mut rows = vec![0.0; points.len() * n];
    #[cfg(feature = "parallel")]
    if points.len() >= batch::PAR_MIN_LEN {
        use rayon::prelude::*;
        rows.par_chunks_mut(n)
            .zip(points.par_iter())
            .for_each(|(row, &x)| basis.expand_derivative_into(x, row));
        return rows;
    }
    for (row, &x) in rows.chunks_mut(n).zip(points) {
        basis.expand_derivative_into(x, row);
    }
    rows
}

/// `resid[i] = targets[i] − rowᵢ·w`, in place.
fn residual_pass(rows: &[f64], targets: &[f64], weights: &[f64], resid: &mut [f64]) {
    let n = weights.len();
    batch::fill(resid, |i| targets[i] - dot(&rows[i * n..(i + 1) * n], weights));
}

/// Accumulate `grad[j] = −Σᵢ resid[i]·rows[i][j]`.
///
/// Points are summed in fixed index-order chunks and the chunk partials are
/// folded sequentially, so the result does not depend on the thread count.
fn gradient_pass(rows: &[f64], resid: &[f64], grad: &mut [f64]) {
    let n = grad.len();
    let k = resid.len();
    grad.fill(0.0);
    if k <= batch::PAR_MIN_LEN {
        for (i, &e) in resid.iter().enumerate() {
            let row = &rows[i * n..(i + 1) * n];
            for j in 0..n {
                grad[j] -= e * row[j];
            }
        }
        return;
    }
    let bounds: Vec<(usize, usize)> = (0..k)
        .step_by(batch::PAR_MIN_LEN)
        .map(|start| (start, (start + batch::PAR_MIN_LEN).min(k)))
        .collect();
    let partial_for = |&(start, end): &(usize, usize)| {
        let mut partial = vec![0.0; n];
        for i in start..end {
            let row = &rows[i * n..(i + 1) * n];
            let e = resid[i];
            for j in 0..n {
                partial[j] -= e * row[j];
            }
        }
        partial
    };
    #[cfg(feature = "parallel")]
    let partials = batch::map_par(&bounds, partial_for);
    #[cfg(not(feature = "parallel"))]
    let partials = batch::map_seq(&bounds, partial_for);
    for partial in partials {
        for j in 0..n {
            grad[j] += partial[j];
        }
    }
}

/// `λ_max(AᵀA)` by power iteration with a fixed start vector.
fn estimate_lambda_max(rows: &[f64], k: usize, n: usize) -> Result<f64, TrainError> {
    // Gram matrix G = AᵀA, n x n
    let mut gram = vec![0.0; n * n];
    for i in 0..k {
        let row = &rows[i * n..(i + 1) * n];
        for j in 0..n {
            for l in 0..n {
                gram[j * n + l] += row[j] * row[l];
            }
        }
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut gv = vec![0.0; n];
    for _ in 0..POWER_ITERATIONS {
        for j in 0..n {
            gv[j] = dot(&gram[j * n..(j + 1) * n], &v);
        }
        let norm = dot(&gv, &gv).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(TrainError::SpectralEstimateFailed(norm));
        }
        for j in 0..n {
            v[j] = gv[j] / norm;
        }
    }
    for j in 0..n {
        gv[j] = dot(&gram[j * n..(j + 1) * n], &v);
    }
    let lambda = dot(&v, &gv);
    if lambda.is_finite() && lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(TrainError::SpectralEstimateFailed(lambda))
    }
}

fn initial_weights(init: WeightInit, n: usize, seed: u64) -> Vec<f64> {
    match init {
        WeightInit::Zeros => vec![0.0; n],
        WeightInit::Uniform { lo, hi } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.gen_range(lo..hi)).collect()
        }
    }
}

/// Full-batch gradient descent over the interior sample points.
///
/// Each iteration updates the weights once and records the loss at the new
/// weights; the loop stops when the loss reaches `config.tolerance` or the
/// iteration budget runs out. Deterministic for a fixed config (the seed is
/// part of it).
pub fn train(
    f: &dyn Integrable,
    a: f64,
    b: f64,
    config: &TrainingConfig,
) -> Result<(TrainedNetwork, ConvergenceTrace), TrainError> {
    config.validate()?;
    if !(b > a) {
        return Err(TrainError::InvalidInterval { a, b });
    }
    let basis = config.basis.build(a, b)?;
    let n = basis.degree();
    let points = sample_points(a, b, config.k)?;
    let targets = batch::try_map(&points, |&x| f.eval_at(x))?;
    let rows = design_rows(&basis, &points);

    let eta = match config.eta {
        LearningRate::Fixed(eta) => eta,
        LearningRate::Auto => AUTO_ETA_FACTOR / estimate_lambda_max(&rows, config.k, n)?,
    };

    let mut weights = initial_weights(config.init, n, config.seed);
    let mut resid = vec![0.0; config.k];
    let mut grad = vec![0.0; n];
    let mut errors = Vec::with_capacity(config.max_iterations.min(1 << 20));
    let mut converged = false;

    residual_pass(&rows, &targets, &weights, &mut resid);
    for iteration in 1..=config.max_iterations {
        gradient_pass(&rows, &resid, &mut grad);
        for j in 0..n {
            weights[j] -= eta * grad[j];
        }
        residual_pass(&rows, &targets, &weights, &mut resid);
        let error = 0.5 * resid.iter().map(|e| e * e).sum::<f64>();
        errors.push(error);
        if !error.is_finite() || error > DIVERGENCE_LIMIT {
            return Err(TrainError::Diverged { error, iteration });
        }
        if error <= config.tolerance {
            converged = true;
            break;
        }
    }

    let final_error = *errors.last().expect("at least one iteration runs");
    let iterations_run = errors.len();
    let network = TrainedNetwork::new(weights, basis, (a, b), final_error)
        .expect("training output is internally consistent");
    Ok((
        network,
        ConvergenceTrace {
            errors,
            converged,
            iterations_run,
            eta,
        },
    ))
}

/// Exact minimizer of the loss: solves `(AᵀA)w = Aᵀy` by Gaussian
/// elimination with partial pivoting, where `Aᵢⱼ = Φⱼ′(xᵢ)` and
/// `yᵢ = f(xᵢ)`. Serves as the independent check on gradient descent.
pub fn solve_least_squares(
    f: &dyn Integrable,
    basis: &BasisSet,
    points: &[f64],
) -> Result<Vec<f64>, TrainError> {
    let n = basis.degree();
    let k = points.len();
    if k < n {
        return Err(TrainError::TooFewPoints { k, n });
    }
    let rows = design_rows(basis, points);
    let targets = batch::try_map(points, |&x| f.eval_at(x))?;

    // normal equations: gram = A^T A (n x n), rhs = A^T y
    let mut gram = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for i in 0..k {
        let row = &rows[i * n..(i + 1) * n];
        for j in 0..n {
            for l in 0..n {
                gram[j * n + l] += row[j] * row[l];
            }
            rhs[j] += row[j] * targets[i];
        }
    }

    let mut scales: Vec<f64> = (0..n)
        .map(|j| {
            gram[j * n..(j + 1) * n]
                .iter()
                .fold(0.0f64, |acc, v| acc.max(v.abs()))
        })
        .collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                gram[r * n + col]
                    .abs()
                    .total_cmp(&gram[s * n + col].abs())
            })
            .expect("non-empty pivot range");
        let pivot = gram[pivot_row * n + col];
        if pivot.abs() < PIVOT_TOLERANCE * scales[pivot_row].max(f64::MIN_POSITIVE) {
            return Err(TrainError::RankDeficient { column: col, pivot });
        }
        if pivot_row != col {
            for l in 0..n {
                gram.swap(col * n + l, pivot_row * n + l);
            }
            rhs.swap(col, pivot_row);
            scales.swap(col, pivot_row);
        }
        for r in (col + 1)..n {
            let factor = gram[r * n + col] / gram[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for l in col..n {
                gram[r * n + l] -= factor * gram[col * n + l];
            }
            rhs[r] -= factor * rhs[col];
        }
    }

    let mut weights = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for l in (col + 1)..n {
            acc -= gram[col * n + l] * weights[l];
        }
        weights[col] = acc / gram[col * n + col];
    }
    Ok(weights)
}

/// Package a least-squares solution as a trained network, using the same
/// sampling and basis rules as [`train`].
pub fn fit_least_squares(
    f: &dyn Integrable,
    a: f64,
    b: f64,
    config: &TrainingConfig,
) -> Result<TrainedNetwork, TrainError> {
    config.validate()?;
    if !(b > a) {
        return Err(TrainError::InvalidInterval { a, b });
    }
    let basis = config.basis.build(a, b)?;
    let points = sample_points(a, b, config.k)?;
    let weights = solve_least_squares(f, &basis, &points)?;
    let final_error = loss(f, &weights, &basis, &points)?;
    Ok(TrainedNetwork::new(weights, basis, (a, b), final_error)
        .expect("least-squares output is internally consistent"))
}
