#![allow(dead_code)]

use bgl::lp::HalfSpace;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Calls `f` on every `k`-subset of `0..m` in lexicographic order.
pub fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut p = k;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            if idx[p] != p + m - k {
                break;
            }
            if p == 0 {
                return;
            }
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Brute-force `min ||x||_1` over `{x : c.x <= c0}`.
///
/// On each orthant the objective is linear and the feasible piece is a pointed
/// polyhedron, so an optimum sits where `n` independent constraints drawn from
/// the half-spaces and the coordinate planes `x_j = 0` are active. Every such
/// point is computed and the feasible one of least l1 norm returned.
pub fn l1_vertex_oracle(hs: &[HalfSpace], n: usize) -> Option<(f64, DVector<f64>)> {
    let m = hs.len();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for_each_subset(m + n, n, |rows| {
        let mut a = DMatrix::zeros(n, n);
        let mut b = DVector::zeros(n);
        for (r, &k) in rows.iter().enumerate() {
            if k < m {
                a.set_row(r, &hs[k].normal().transpose());
                b[r] = hs[k].bound();
            } else {
                a[(r, k - m)] = 1.0;
            }
        }
        let lu = a.clone().lu();
        if lu.determinant().abs() < 1e-12 {
            return;
        }
        let Some(x) = lu.solve(&b) else { return };
        if (&a * &x - &b).amax() > 1e-9 {
            return;
        }
        if hs.iter().all(|h| h.slack(&x) <= 1e-9) {
            let obj = x.lp_norm(1);
            if best.as_ref().is_none_or(|(o, _)| obj < *o) {
                best = Some((obj, x));
            }
        }
    });
    if n == 0 {
        return Some((0.0, DVector::zeros(0)));
    }
    best
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 1e-3 {
            return v / norm;
        }
    }
}

/// Well-conditioned random SPD matrix `A A^T / n + I/2`, symmetrized exactly.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let m = &a * a.transpose() / n as f64 + DMatrix::identity(n, n) * 0.5;
    DMatrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] })
}

/// `m` random half-spaces all containing `x0` with slack drawn from `slack`.
pub fn halfspaces_around(
    rng: &mut ChaCha8Rng,
    x0: &DVector<f64>,
    m: usize,
    slack: std::ops::Range<f64>,
) -> Vec<HalfSpace> {
    (0..m)
        .map(|_| {
            let c = random_unit(rng, x0.len());
            let b = c.dot(x0) + rng.random_range(slack.clone());
            HalfSpace::new(c, b).unwrap()
        })
        .collect()
}

/// Node 0 has a negative edge to node 1 and a positive edge to node 2 while
/// nodes 1 and 2 share a polarity, so either choice for node 0 contradicts a
/// strong edge.
pub fn frustrated_covariance() -> DMatrix<f64> {
    let l = DMatrix::from_row_slice(3, 3, &[2.0, 0.9, -0.9, 0.9, 2.0, 0.0, -0.9, 0.0, 2.0]);
    let inv = l.try_inverse().unwrap();
    DMatrix::from_fn(3, 3, |i, j| if i <= j { inv[(i, j)] } else { inv[(j, i)] })
}
