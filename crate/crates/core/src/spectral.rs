//! Graph Fourier basis and the ideal band-limited low-pass filter.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{check_dim, Error, Result};
use crate::graph::{positive_counterpart, transform_signal, BalancedLaplacian, GeneralizedLaplacian};

/// Default pass band is `[0, 0.3 lambda_max]`.
pub const DEFAULT_CUTOFF: f64 = 0.3;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralBasis {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0, f64::max)
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let u = &self.eigenvectors;
        u * DMatrix::from_diagonal(&self.eigenvalues) * u.transpose()
    }

    /// `U H U^T y` with `H_kk = 1` for `lambda_k <= cutoff_frac * lambda_max`.
    /// Returns `y` unchanged when `lambda_max` is zero.
    pub fn lowpass(&self, y: &DVector<f64>, cutoff_frac: f64) -> Result<DVector<f64>> {
        check_dim(self.eigenvalues.len(), y.len())?;
        if !(cutoff_frac > 0.0 && cutoff_frac <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "cutoff fraction must lie in (0, 1], got {cutoff_frac}"
            )));
        }
        let lambda_max = self.lambda_max();
        if lambda_max <= 0.0 {
            return Ok(y.clone());
        }
        let cutoff = cutoff_frac * lambda_max;
        let mut out = DVector::zeros(y.len());
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            if lambda <= cutoff {
                let u = self.eigenvectors.column(k);
                out.axpy(u.dot(y), &u, 1.0);
            }
        }
        Ok(out)
    }
}

pub fn spectral_decompose(l: &GeneralizedLaplacian) -> SpectralBasis {
    let eig = SymmetricEigen::new(l.matrix().clone());
    let n = l.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_fn(n, |k, _| eig.eigenvalues[order[k]]);
    let eigenvectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    SpectralBasis {
        eigenvalues,
        eigenvectors,
    }
}

pub fn lowpass_denoise(
    l_plus: &GeneralizedLaplacian,
    y: &DVector<f64>,
    cutoff_frac: f64,
) -> Result<DVector<f64>> {
    spectral_decompose(l_plus).lowpass(y, cutoff_frac)
}

/// Positive-graph filtering of a signal living on a balanced graph: the
/// signal is mapped through `T`, filtered on `T L T`, and mapped back.
#[derive(Debug, Clone)]
pub struct BalancedLowpass {
    basis: SpectralBasis,
    transform: crate::graph::SimilarityTransform,
}

impl BalancedLowpass {
    pub fn new(b: &BalancedLaplacian) -> Self {
        let (l_plus, transform) = positive_counterpart(b);
        Self {
            basis: spectral_decompose(&l_plus),
            transform,
        }
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn apply(&self, y: &DVector<f64>, cutoff_frac: f64) -> Result<DVector<f64>> {
        let yt = transform_signal(&self.transform, y)?;
        let filtered = self.basis.lowpass(&yt, cutoff_frac)?;
        transform_signal(&self.transform, &filtered)
    }
}
