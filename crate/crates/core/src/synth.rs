//! Synthetic ground truth and evaluation metrics.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64`, which is portable across
//! platforms. Stream layout of [`gen_balanced_er_graph`]: `n` polarity draws
//! (`random_bool(0.5)`, `true` meaning `-1`), then for every pair `i < j` in
//! row-major order one uniform edge draw, followed by one magnitude draw only
//! when the edge is present. [`sample_gmrf`] draws `K` blocks of `n` standard
//! normals, one block per observation.
//!
//! Independent streams are derived from a base seed with [`derive_seed`].

use nalgebra::{Cholesky, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::graph::{BalancedLaplacian, GeneralizedLaplacian, PolarityVector, SignedGraph};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `stream` of `seed`: `splitmix64(seed ^ splitmix64(stream))`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub p: f64,
    pub weight_range: (f64, f64),
    pub selfloop_factor: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n: 50,
            p: 0.2,
            weight_range: (0.01, 1.0),
            selfloop_factor: 2.5,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.weight_range;
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidInput(format!(
                "edge probability must lie in (0, 1), got {}",
                self.p
            )));
        }
        if !(lo > 0.0 && lo < hi) {
            return Err(Error::InvalidInput(format!(
                "weight range must satisfy 0 < lo < hi, got ({lo}, {hi})"
            )));
        }
        if !(self.selfloop_factor > 0.0) {
            return Err(Error::InvalidInput("selfloop_factor must be positive".into()));
        }
        Ok(())
    }
}

/// Balanced Erdos-Renyi graph with random polarities; every edge sign agrees
/// with its endpoints and each self-loop is `selfloop_factor` times the node's
/// total negative edge magnitude.
pub fn gen_balanced_er_graph(spec: &SynthSpec) -> Result<BalancedLaplacian> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let beta: Vec<i8> = (0..n)
        .map(|_| if rng.random_bool(0.5) { -1 } else { 1 })
        .collect();
    let magnitude = Uniform::new_inclusive(spec.weight_range.0, spec.weight_range.1)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < spec.p {
                let v = f64::from(beta[i] * beta[j]) * magnitude.sample(&mut rng);
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    for i in 0..n {
        let neg: f64 = (0..n).map(|j| (-w[(i, j)]).max(0.0)).sum();
        w[(i, i)] = spec.selfloop_factor * neg;
    }
    let laplacian = SignedGraph::new(w)?.laplacian();
    BalancedLaplacian::new(laplacian, PolarityVector::new(beta)?)
}

/// Smallest eigenvalue accepted as positive, relative to the largest.
pub const PD_REL_TOL: f64 = 1e-10;

/// Cholesky alone accepts exactly singular Laplacians whose zero pivot rounds
/// to a tiny positive number, so the spectrum is checked too.
pub fn is_positive_definite(l: &GeneralizedLaplacian) -> bool {
    if Cholesky::new(l.matrix().clone()).is_none() {
        return false;
    }
    let eig = l.matrix().clone().symmetric_eigenvalues();
    eig.min() > PD_REL_TOL * eig.amax().max(1.0)
}

/// Draws graphs with seeds `derive_seed(spec.seed, attempt)` for
/// `attempt = 0, 1, ...` until one has a positive definite Laplacian (an
/// isolated node or an all-positive component makes it singular). Returns the
/// graph and the attempt that produced it.
pub fn gen_pd_balanced_er_graph(
    spec: &SynthSpec,
    max_attempts: u64,
) -> Result<(BalancedLaplacian, u64)> {
    for attempt in 0..max_attempts {
        let g = gen_balanced_er_graph(&SynthSpec {
            seed: derive_seed(spec.seed, attempt),
            ..*spec
        })?;
        if is_positive_definite(g.laplacian()) {
            return Ok((g, attempt));
        }
    }
    Err(Error::NotPositiveDefinite)
}

/// `K` i.i.d. samples of `N(0, L^-1)` as the columns of an `n x K` matrix.
///
/// With `L = R^T R` (`R` upper triangular) each sample solves `R x = z` for a
/// standard normal `z`, so `cov(x) = R^-1 R^-T = L^-1`.
pub fn sample_gmrf(l: &GeneralizedLaplacian, k: usize, seed: u64) -> Result<DMatrix<f64>> {
    let n = l.n();
    let chol = Cholesky::new(l.matrix().clone()).ok_or(Error::NotPositiveDefinite)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = DMatrix::zeros(n, k);
    for col in 0..k {
        for row in 0..n {
            z[(row, col)] = StandardNormal.sample(&mut rng);
        }
    }
    // chol.l() is R^T, so R x = z is a transposed lower solve
    let lower = chol.l();
    lower
        .tr_solve_lower_triangular(&z)
        .ok_or(Error::NotPositiveDefinite)
}

fn support(m: &DMatrix<f64>, eps: f64) -> Vec<bool> {
    let n = m.nrows();
    let mut s = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            s.push(m[(i, j)].abs() > eps);
        }
    }
    s
}

/// F-measure of the recovered edge support (sign-agnostic, off-diagonal
/// pairs with `|L_ij| > eps`). Two empty supports score 1.
pub fn f_measure(est: &DMatrix<f64>, truth: &DMatrix<f64>, eps: f64) -> Result<f64> {
    check_dim(truth.nrows(), est.nrows())?;
    check_dim(truth.ncols(), est.ncols())?;
    let (se, st) = (support(est, eps), support(truth, eps));
    let predicted = se.iter().filter(|&&b| b).count();
    let actual = st.iter().filter(|&&b| b).count();
    if predicted == 0 && actual == 0 {
        return Ok(1.0);
    }
    let tp = se.iter().zip(&st).filter(|(&a, &b)| a && b).count();
    let precision = if predicted > 0 { tp as f64 / predicted as f64 } else { 0.0 };
    let recall = if actual > 0 { tp as f64 / actual as f64 } else { 0.0 };
    if precision + recall == 0.0 {
        Ok(0.0)
    } else {
        Ok(2.0 * precision * recall / (precision + recall))
    }
}

/// Default edge threshold for [`f_measure`].
pub const FM_EPS: f64 = 1e-6;

/// `||est - truth||_F / ||truth||_F`.
pub fn relative_error(est: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<f64> {
    check_dim(truth.nrows(), est.nrows())?;
    check_dim(truth.ncols(), est.ncols())?;
    let denom = truth.norm();
    if denom == 0.0 {
        return Err(Error::InvalidInput(
            "relative error against an all-zero reference".into(),
        ));
    }
    Ok((est - truth).norm() / denom)
}
