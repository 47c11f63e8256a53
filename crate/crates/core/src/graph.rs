//! Signed graphs, generalized Laplacians and structural balance.
//!
//! A signed graph is stored as its symmetric weighted adjacency `W`, self-loops
//! on the diagonal. Its generalized Laplacian is `L = D - W + diag(W)` where
//! `D_ii` sums the whole row of `W` (self-loop included), so `L_ij = -W_ij`
//! off the diagonal and `L_ii = sum_j W_ij`.
//!
//! A graph is balanced when its nodes admit a polarity `beta_i in {-1, +1}`
//! such that positive edges join equal polarities and negative edges join
//! opposite ones. For such a graph `T = diag(beta)` maps the Laplacian to a
//! positive-graph Laplacian `T L T` with the same spectrum.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};

/// Entries with magnitude at or below this are treated as non-edges.
pub const EDGE_EPS: f64 = 1e-9;

fn is_edge(w: f64) -> bool {
    w.abs() > EDGE_EPS
}

fn ensure_square(m: &DMatrix<f64>) -> Result<()> {
    check_dim(m.nrows(), m.ncols())
}

fn ensure_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if m[(i, j)] != m[(j, i)] {
                return Err(Error::InvalidInput(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Symmetric weighted adjacency with non-negative self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    weights: DMatrix<f64>,
}

impl SignedGraph {
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        ensure_square(&weights)?;
        ensure_symmetric(&weights)?;
        for i in 0..weights.nrows() {
            let w = weights[(i, i)];
            if !(w >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "self-loop weight at node {i} is negative ({w})"
                )));
            }
        }
        Ok(Self { weights })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            weights: DMatrix::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Unordered edges `(i, j, w)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        edges_of(&self.weights, 1.0)
    }

    pub fn laplacian(&self) -> GeneralizedLaplacian {
        laplacian_from_adjacency(self)
    }
}

fn edges_of(m: &DMatrix<f64>, sign: f64) -> Vec<(usize, usize, f64)> {
    let n = m.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = sign * m[(i, j)];
            if is_edge(w) {
                out.push((i, j, w));
            }
        }
    }
    out
}

/// Symmetric generalized Laplacian `D - W + diag(W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedLaplacian {
    matrix: DMatrix<f64>,
}

impl GeneralizedLaplacian {
    /// Wraps a matrix, checking that it is square and exactly symmetric.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        ensure_square(&matrix)?;
        ensure_symmetric(&matrix)?;
        Ok(Self { matrix })
    }

    pub(crate) fn from_symmetric_unchecked(matrix: DMatrix<f64>) -> Self {
        debug_assert!(ensure_symmetric(&matrix).is_ok());
        Self { matrix }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// `D - W + diag(W)` for any symmetric `W`, including negative self-loops.
    pub fn from_adjacency(w: &DMatrix<f64>) -> Result<Self> {
        ensure_square(w)?;
        ensure_symmetric(w)?;
        let mut l = -w.clone();
        for i in 0..w.nrows() {
            l[(i, i)] = w.row(i).sum();
        }
        Ok(Self { matrix: l })
    }

    /// Recovers the adjacency: `W_ij = -L_ij` off the diagonal and the
    /// self-loop `W_ii = sum_j L_ij`. Self-loops may come out negative for
    /// Laplacians that were not built from a [`SignedGraph`].
    pub fn to_adjacency(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut w = -self.matrix.clone();
        for i in 0..n {
            w[(i, i)] = self.matrix.row(i).sum();
        }
        w
    }

    /// Unordered edges `(i, j, W_ij)` implied by the off-diagonal entries.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        edges_of(&self.matrix, -1.0)
    }

    /// Adds `shift` to every diagonal entry.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..self.n() {
            m[(i, i)] += shift;
        }
        Self { matrix: m }
    }
}

pub fn laplacian_from_adjacency(g: &SignedGraph) -> GeneralizedLaplacian {
    let w = g.weights();
    let n = g.n();
    let mut l = -w.clone();
    for i in 0..n {
        l[(i, i)] = w.row(i).sum();
    }
    GeneralizedLaplacian { matrix: l }
}

/// Per-node polarity labels in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolarityVector(Vec<i8>);

impl PolarityVector {
    pub fn new(beta: Vec<i8>) -> Result<Self> {
        if let Some(pos) = beta.iter().position(|&b| b != 1 && b != -1) {
            return Err(Error::InvalidInput(format!(
                "polarity at node {pos} is {}, expected -1 or +1",
                beta[pos]
            )));
        }
        Ok(Self(beta))
    }

    pub fn all_positive(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn sign(&self, i: usize) -> f64 {
        f64::from(self.0[i])
    }

    pub fn set(&mut self, i: usize, value: i8) {
        assert!(value == 1 || value == -1, "polarity must be -1 or +1");
        self.0[i] = value;
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|b| -b).collect())
    }
}

/// `true` iff `beta_i beta_j L_ij <= 0` for every `i != j`.
pub fn check_consistency(l: &GeneralizedLaplacian, beta: &PolarityVector) -> Result<bool> {
    check_dim(l.n(), beta.len())?;
    Ok(first_inconsistency(l.matrix(), beta).is_none())
}

fn first_inconsistency(l: &DMatrix<f64>, beta: &PolarityVector) -> Option<(usize, usize)> {
    let n = l.nrows();
    for i in 0..n {
        for j in 0..n {
            if i != j && beta.sign(i) * beta.sign(j) * l[(i, j)] > 0.0 {
                return Some((i, j));
            }
        }
    }
    None
}

/// A generalized Laplacian together with a polarity under which every edge
/// is consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedLaplacian {
    laplacian: GeneralizedLaplacian,
    polarity: PolarityVector,
}

impl BalancedLaplacian {
    pub fn new(laplacian: GeneralizedLaplacian, polarity: PolarityVector) -> Result<Self> {
        check_dim(laplacian.n(), polarity.len())?;
        if let Some((i, j)) = first_inconsistency(laplacian.matrix(), &polarity) {
            return Err(Error::Inconsistent { i, j });
        }
        Ok(Self {
            laplacian,
            polarity,
        })
    }

    pub fn n(&self) -> usize {
        self.laplacian.n()
    }

    pub fn laplacian(&self) -> &GeneralizedLaplacian {
        &self.laplacian
    }

    pub fn polarity(&self) -> &PolarityVector {
        &self.polarity
    }

    pub fn into_parts(self) -> (GeneralizedLaplacian, PolarityVector) {
        (self.laplacian, self.polarity)
    }
}

/// Diagonal `+-1` matrix `T`, stored as its diagonal. `T = T^-1 = T^T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityTransform {
    signs: Vec<i8>,
}

impl SimilarityTransform {
    pub fn from_polarity(beta: &PolarityVector) -> Self {
        Self {
            signs: beta.as_slice().to_vec(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self { signs: vec![1; n] }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Computes `T A T`.
    pub fn conjugate(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
            f64::from(self.signs[i] * self.signs[j]) * a[(i, j)]
        })
    }
}

pub fn transform_signal(t: &SimilarityTransform, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim(t.signs.len(), x.len())?;
    Ok(DVector::from_fn(x.len(), |i, _| f64::from(t.signs[i]) * x[i]))
}

/// Positive-graph counterpart `L+ = T L T` with `T = diag(beta)`.
///
/// Off-diagonal entries of `L+` are `-|W_ij|`; the diagonal is unchanged.
pub fn positive_counterpart(b: &BalancedLaplacian) -> (GeneralizedLaplacian, SimilarityTransform) {
    let t = SimilarityTransform::from_polarity(b.polarity());
    let m = t.conjugate(b.laplacian().matrix());
    (GeneralizedLaplacian { matrix: m }, t)
}

/// Self-loops of the positive counterpart from the balanced adjacency:
/// `W+_ii = W_ii - 2 sum_j [-W_ij]_+` over `j != i`.
pub fn positive_self_loops(w: &DMatrix<f64>) -> DVector<f64> {
    let n = w.nrows();
    DVector::from_fn(n, |i, _| {
        let neg: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| (-w[(i, j)]).max(0.0))
            .sum();
        w[(i, i)] - 2.0 * neg
    })
}

/// BFS 2-coloring over an edge weight accessor. Positive edges demand equal
/// labels, negative edges opposite ones. Each component is rooted at its
/// lowest-index node with label `+1`.
fn two_color(n: usize, weight: impl Fn(usize, usize) -> f64) -> Option<Vec<i8>> {
    let mut color = vec![0i8; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if v == u {
                    continue;
                }
                let w = weight(u, v);
                if !is_edge(w) {
                    continue;
                }
                let want = if w > 0.0 { color[u] } else { -color[u] };
                if color[v] == 0 {
                    color[v] = want;
                    queue.push_back(v);
                } else if color[v] != want {
                    return None;
                }
            }
        }
    }
    Some(color)
}

/// Returns a certifying polarity if `g` is balanced, `None` otherwise.
pub fn two_coloring_balance_check(g: &SignedGraph) -> Option<PolarityVector> {
    let w = g.weights();
    two_color(g.n(), |i, j| w[(i, j)]).map(PolarityVector)
}

/// Same as [`two_coloring_balance_check`] reading edges off a Laplacian.
pub fn laplacian_balance_check(l: &GeneralizedLaplacian) -> Option<PolarityVector> {
    let m = l.matrix();
    two_color(l.n(), |i, j| -m[(i, j)]).map(PolarityVector)
}

/// Greedy polarization: a random start node gets `+1`, then the lowest-index
/// node adjacent to the polarized set is labelled with whichever polarity
/// makes more of its edges into the set consistent (`+1` on ties). When the
/// frontier empties, the lowest-index unlabelled node starts a new component
/// at `+1`. Finally each component is flipped, if needed, so its lowest-index
/// node carries `+1`.
fn greedy_polarize(n: usize, weight: impl Fn(usize, usize) -> f64, seed: u64) -> Vec<i8> {
    if n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.random_range(0..n);
    let mut label = vec![0i8; n];
    label[start] = 1;
    let mut in_frontier = vec![false; n];
    let mark_neighbours = |u: usize, label: &[i8], in_frontier: &mut [bool]| {
        for v in 0..n {
            if v != u && label[v] == 0 && is_edge(weight(u, v)) {
                in_frontier[v] = true;
            }
        }
    };
    mark_neighbours(start, &label, &mut in_frontier);

    for _ in 1..n {
        let next = match in_frontier.iter().position(|&f| f) {
            Some(v) => {
                let (mut agree_pos, mut agree_neg) = (0usize, 0usize);
                #[allow(clippy::needless_range_loop)]
                for u in 0..n {
                    if label[u] == 0 || u == v {
                        continue;
                    }
                    let w = weight(u, v);
                    if !is_edge(w) {
                        continue;
                    }
                    // +1 is consistent with this edge iff beta_u * sign(w) = +1
                    if f64::from(label[u]) * w > 0.0 {
                        agree_pos += 1;
                    } else {
                        agree_neg += 1;
                    }
                }
                label[v] = if agree_neg > agree_pos { -1 } else { 1 };
                v
            }
            None => {
                let v = label.iter().position(|&b| b == 0).expect("unlabelled node");
                label[v] = 1;
                v
            }
        };
        in_frontier[next] = false;
        mark_neighbours(next, &label, &mut in_frontier);
    }

    // canonical orientation per connected component
    let mut comp_seen = vec![false; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if comp_seen[root] {
            continue;
        }
        let flip = label[root] == -1;
        comp_seen[root] = true;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            if flip {
                label[u] = -label[u];
            }
            #[allow(clippy::needless_range_loop)]
            for v in 0..n {
                if v != u && !comp_seen[v] && is_edge(weight(u, v)) {
                    comp_seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    label
}

/// Greedy balancing baseline on a signed graph: polarize greedily, then delete
/// every inconsistent edge from `W` and rebuild the Laplacian.
pub fn greedy_balance(g: &SignedGraph, seed: u64) -> BalancedLaplacian {
    let w = g.weights();
    let n = g.n();
    let label = greedy_polarize(n, |i, j| w[(i, j)], seed);
    let mut pruned = w.clone();
    for i in 0..n {
        for j in 0..n {
            if i != j && f64::from(label[i] * label[j]) * pruned[(i, j)] < 0.0 {
                pruned[(i, j)] = 0.0;
            }
        }
    }
    let laplacian = laplacian_from_adjacency(&SignedGraph { weights: pruned });
    BalancedLaplacian::new(laplacian, PolarityVector(label))
        .expect("greedy balancing yields consistent edges")
}

/// Greedy balancing applied to a Laplacian estimate: inconsistent off-diagonal
/// entries are zeroed and the diagonal is kept as estimated.
pub fn greedy_balance_laplacian(l: &GeneralizedLaplacian, seed: u64) -> BalancedLaplacian {
    let m = l.matrix();
    let n = l.n();
    let label = greedy_polarize(n, |i, j| -m[(i, j)], seed);
    let mut pruned = m.clone();
    for i in 0..n {
        for j in 0..n {
            if i != j && f64::from(label[i] * label[j]) * pruned[(i, j)] > 0.0 {
                pruned[(i, j)] = 0.0;
            }
        }
    }
    BalancedLaplacian::new(
        GeneralizedLaplacian { matrix: pruned },
        PolarityVector(label),
    )
    .expect("greedy balancing yields consistent edges")
}
