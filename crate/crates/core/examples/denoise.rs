//! Low-pass denoising on a learned balanced graph. The clean signal lives in
//! the lowest graph frequencies.

use bgl::commands::{denoise_signals, mse};
use bgl::learn::{learn_balanced_laplacian, sample_covariance, LearnConfig};
use bgl::spectral::{spectral_decompose, DEFAULT_CUTOFF};
use bgl::synth::{gen_pd_balanced_er_graph, sample_gmrf, SynthSpec};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> bgl::Result<()> {
    let n = 30;
    let (truth, _) = gen_pd_balanced_er_graph(&SynthSpec { n, seed: 3, ..Default::default() }, 1000)?;
    let c = sample_covariance(&sample_gmrf(truth.laplacian(), 300, 4)?)?;
    let learned = learn_balanced_laplacian(&c, &LearnConfig::default())?.balanced;

    // smoothest eigenvector of the learned graph as the clean signal
    let basis = spectral_decompose(learned.laplacian());
    let clean: DVector<f64> = basis.eigenvectors().column(0) * (n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise = Normal::new(0.0, 0.3).unwrap();
    let noisy = DVector::from_fn(n, |i, _| clean[i] + noise.sample(&mut rng));

    let (out, shift) = denoise_signals(&learned, &DMatrix::from_column_slice(n, 1, noisy.as_slice()), DEFAULT_CUTOFF)?;
    if let Some(s) = shift {
        println!("shifted by {s:.2e} to make the Laplacian PSD");
    }
    println!("input MSE  {:.4}", mse(&noisy, &clean));
    println!("output MSE {:.4}", mse(&out.column(0).into_owned(), &clean));
    Ok(())
}
