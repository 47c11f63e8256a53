use bgl::graph::{positive_counterpart, transform_signal, BalancedLaplacian, SimilarityTransform};
use bgl::spectral::{lowpass_denoise, spectral_decompose, BalancedLowpass, DEFAULT_CUTOFF};
use bgl::synth::{gen_balanced_er_graph, SynthSpec};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_balanced(rng: &mut ChaCha8Rng) -> BalancedLaplacian {
    let n = rng.random_range(2..=50);
    gen_balanced_er_graph(&SynthSpec {
        n,
        p: rng.random_range(0.05..0.6),
        seed: rng.random(),
        ..Default::default()
    })
    .unwrap()
}

fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn counterpart_shares_spectrum_and_is_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..50 {
        let b = random_balanced(&mut rng);
        let (lp, t) = positive_counterpart(&b);
        let (l, m) = (b.laplacian().matrix(), lp.matrix());
        for (x, y) in sorted_eigenvalues(l).iter().zip(sorted_eigenvalues(m)) {
            assert!((x - y).abs() < 1e-8);
        }
        assert_eq!(&t.conjugate(l), m);
        for i in 0..b.n() {
            assert_eq!(l[(i, i)], m[(i, i)]);
            for j in 0..b.n() {
                if i != j {
                    assert!(m[(i, j)] <= 0.0);
                }
            }
        }
    }
}

#[test]
fn basis_is_orthonormal_and_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let b = random_balanced(&mut rng);
        let basis = spectral_decompose(b.laplacian());
        let u = basis.eigenvectors();
        let n = b.n();
        assert!((u.transpose() * u - DMatrix::identity(n, n)).amax() < 1e-8);
        assert!((basis.reconstruct() - b.laplacian().matrix()).norm() < 1e-8);
        let ev = basis.eigenvalues();
        assert!(ev.iter().zip(ev.iter().skip(1)).all(|(a, c)| a <= c));
    }
}

#[test]
fn filtering_commutes_with_the_similarity_transform() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..50 {
        let b = random_balanced(&mut rng);
        let n = b.n();
        let y = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let cutoff = rng.random_range(0.1..1.0);
        let via_positive = BalancedLowpass::new(&b).apply(&y, cutoff).unwrap();
        let direct = lowpass_denoise(b.laplacian(), &y, cutoff).unwrap();
        assert!((via_positive - direct).amax() < 1e-8);
    }
}

#[test]
fn global_polarity_flip_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..20 {
        let b = random_balanced(&mut rng);
        let flipped = BalancedLaplacian::new(b.laplacian().clone(), b.polarity().flipped()).unwrap();
        let y = DVector::from_fn(b.n(), |_, _| rng.random_range(-1.0..1.0));
        let a = BalancedLowpass::new(&b).apply(&y, DEFAULT_CUTOFF).unwrap();
        let c = BalancedLowpass::new(&flipped).apply(&y, DEFAULT_CUTOFF).unwrap();
        assert!((a - c).amax() < 1e-10);
    }
}

#[test]
fn lowpass_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for _ in 0..20 {
        let b = random_balanced(&mut rng);
        let (lp, _) = positive_counterpart(&b);
        let y = DVector::from_fn(b.n(), |_, _| rng.random_range(-1.0..1.0));
        let once = lowpass_denoise(&lp, &y, DEFAULT_CUTOFF).unwrap();
        let twice = lowpass_denoise(&lp, &once, DEFAULT_CUTOFF).unwrap();
        assert!((once - twice).amax() < 1e-8);
    }
}

#[test]
fn signal_transform_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let t = SimilarityTransform::from_polarity(&bgl::graph::PolarityVector::new(vec![1, 1, -1]).unwrap());
    let x = DVector::from_vec(vec![2.0, 3.0, 5.0]);
    assert_eq!(transform_signal(&t, &x).unwrap().as_slice(), &[2.0, 3.0, -5.0]);
    for _ in 0..10 {
        let b = random_balanced(&mut rng);
        let t = SimilarityTransform::from_polarity(b.polarity());
        let x = DVector::from_fn(b.n(), |_, _| rng.random_range(-1.0..1.0));
        assert_eq!(transform_signal(&t, &transform_signal(&t, &x).unwrap()).unwrap(), x);
    }
}
