//! l1-minimization over a polyhedron given as half-spaces, and the CLIME
//! column programs built on it.
//!
//! `min ||x||_1  s.t.  c_r . x <= b_r` is reduced to a standard-form LP by
//! splitting `x = x+ - x-` with `x+, x- >= 0` and solved with a dense two-phase
//! tableau simplex. Half-spaces that only fix the sign of one coordinate
//! (`a x_k <= 0`) are not turned into rows; they drop the corresponding half
//! of the split instead.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};

/// Constraint feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-8;
/// Smallest pivot magnitude accepted by the ratio test.
pub const PIVOT_TOL: f64 = 1e-10;

const OPT_TOL: f64 = 1e-11;
const DEGENERATE_STREAK: usize = 50;
const MAX_ITERATIONS: usize = 100_000;

/// The half-space `c . x <= c0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    normal: DVector<f64>,
    bound: f64,
    norm_sq: f64,
}

impl HalfSpace {
    pub fn new(normal: DVector<f64>, bound: f64) -> Result<Self> {
        let norm_sq = normal.norm_squared();
        if norm_sq == 0.0 {
            return Err(Error::ZeroNormal);
        }
        Ok(Self {
            normal,
            bound,
            norm_sq,
        })
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn norm_squared(&self) -> f64 {
        self.norm_sq
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `c . x - c0`; positive means violated.
    pub fn slack(&self, x: &DVector<f64>) -> f64 {
        self.normal.dot(x) - self.bound
    }

    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        self.slack(x).max(0.0)
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.slack(x) <= tol
    }

    /// `Some((k, a))` if the normal has exactly one nonzero entry `a` at `k`.
    fn single_coordinate(&self) -> Option<(usize, f64)> {
        let mut found = None;
        for (k, &a) in self.normal.iter().enumerate() {
            if a != 0.0 {
                if found.is_some() {
                    return None;
                }
                found = Some((k, a));
            }
        }
        found
    }
}

pub fn max_violation(halfspaces: &[HalfSpace], x: &DVector<f64>) -> f64 {
    halfspaces
        .iter()
        .map(|h| h.violation(x))
        .fold(0.0, f64::max)
}

/// Constraint system of one CLIME column program.
#[derive(Debug, Clone)]
pub struct ColumnLp {
    pub halfspaces: Vec<HalfSpace>,
    pub rho: f64,
    pub node: usize,
}

fn validate_column_inputs(c: &DMatrix<f64>, i: usize, rho: f64) -> Result<()> {
    check_dim(c.nrows(), c.ncols())?;
    if i >= c.nrows() {
        return Err(Error::InvalidInput(format!(
            "node index {i} out of range for n = {}",
            c.nrows()
        )));
    }
    if !(rho > 0.0) {
        return Err(Error::NonPositiveRho(rho));
    }
    for j in 0..c.nrows() {
        if c.row(j).iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateRow(j));
        }
    }
    Ok(())
}

/// The `2n` half-spaces of `||C l - e_i||_inf <= rho`, two per row of `C`
/// (upper then lower bound), in row order.
fn box_halfspaces(c: &DMatrix<f64>, i: usize, rho: f64) -> Vec<HalfSpace> {
    let n = c.nrows();
    let mut out = Vec::with_capacity(3 * n);
    for j in 0..n {
        let row: DVector<f64> = c.row(j).transpose();
        let target = if j == i { 1.0 } else { 0.0 };
        out.push(HalfSpace {
            norm_sq: row.norm_squared(),
            bound: target + rho,
            normal: row.clone(),
        });
        out.push(HalfSpace {
            norm_sq: row.norm_squared(),
            bound: rho - target,
            normal: -row,
        });
    }
    out
}

fn sign_halfspace(n: usize, j: usize, s: i8) -> HalfSpace {
    let mut normal = DVector::zeros(n);
    normal[j] = f64::from(s);
    HalfSpace {
        normal,
        bound: 0.0,
        norm_sq: 1.0,
    }
}

/// Builds the `3n` half-spaces of the sign-constrained column program for node
/// `i`: the `2n` box constraints of `||C l - e_i||_inf <= rho` followed by
/// `s_j l_j <= 0` for every `j`. `signs[i]` must be `-1`.
pub fn build_column_constraints(
    c: &DMatrix<f64>,
    i: usize,
    rho: f64,
    signs: &[i8],
) -> Result<ColumnLp> {
    validate_column_inputs(c, i, rho)?;
    let n = c.nrows();
    check_dim(n, signs.len())?;
    if let Some(j) = signs.iter().position(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidInput(format!(
            "sign pattern entry {j} must be -1 or +1"
        )));
    }
    if signs[i] != -1 {
        return Err(Error::InvalidInput(
            "sign pattern must be -1 at the column's own node".into(),
        ));
    }
    let mut halfspaces = box_halfspaces(c, i, rho);
    halfspaces.extend((0..n).map(|j| sign_halfspace(n, j, signs[j])));
    Ok(ColumnLp {
        halfspaces,
        rho,
        node: i,
    })
}

/// The unconstrained CLIME column program (box constraints only, `2n` rows).
pub fn build_clime_constraints(c: &DMatrix<f64>, i: usize, rho: f64) -> Result<ColumnLp> {
    validate_column_inputs(c, i, rho)?;
    Ok(ColumnLp {
        halfspaces: box_halfspaces(c, i, rho),
        rho,
        node: i,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SignBound {
    Free,
    NonNeg,
    NonPos,
    Zero,
}

impl SignBound {
    fn restrict(self, nonneg: bool) -> Self {
        use SignBound::*;
        match (self, nonneg) {
            (Free, true) | (NonNeg, true) => NonNeg,
            (Free, false) | (NonPos, false) => NonPos,
            _ => Zero,
        }
    }
}

/// Dense simplex tableau. Row `m` holds the reduced costs; the last column
/// holds the right-hand side.
struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        let (before, rest) = self.data.split_at_mut(row * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= p;
        }
        prow[col] = 1.0;
        let eliminate = |chunk: &mut [f64]| {
            let f = chunk[col];
            if f != 0.0 {
                for (v, &pv) in chunk.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                chunk[col] = 0.0;
            }
        };
        before.chunks_exact_mut(w).for_each(eliminate);
        after.chunks_exact_mut(w).for_each(eliminate);
        for r in 0..self.m {
            let idx = r * w + w - 1;
            if self.data[idx] < 0.0 && self.data[idx] > -1e-11 {
                self.data[idx] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Loads `cost` into the objective row, priced out against the basis.
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.width;
        let m = self.m;
        let obj = m * w;
        self.data[obj..obj + w].fill(0.0);
        self.data[obj..obj + cost.len()].copy_from_slice(cost);
        for r in 0..m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    self.data[obj + c] -= cb * self.data[r * w + c];
                }
            }
        }
    }

    /// Runs primal simplex over columns `< allowed` until optimal.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let w = self.width;
        let obj = self.m * w;
        let mut bland = false;
        let mut streak = 0usize;
        for _ in 0..MAX_ITERATIONS {
            let entering = if bland {
                (0..allowed).find(|&c| self.data[obj + c] < -OPT_TOL)
            } else {
                let mut best = None;
                let mut best_val = -OPT_TOL;
                for c in 0..allowed {
                    let d = self.data[obj + c];
                    if d < best_val {
                        best_val = d;
                        best = Some(c);
                    }
                }
                best
            };
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = self.at(r, col);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12
                                || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::Unbounded);
            };
            if ratio <= 1e-12 {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(row, col);
        }
        Err(Error::IterationLimit(MAX_ITERATIONS))
    }
}

/// Minimizes `||x||_1` over the intersection of `halfspaces` in `R^n`.
pub fn solve_l1_lp(halfspaces: &[HalfSpace], n: usize) -> Result<DVector<f64>> {
    for h in halfspaces {
        check_dim(n, h.dim())?;
    }
    let mut bounds = vec![SignBound::Free; n];
    let mut rows: Vec<&HalfSpace> = Vec::new();
    for h in halfspaces {
        match h.single_coordinate() {
            Some((k, a)) if h.bound == 0.0 => bounds[k] = bounds[k].restrict(a < 0.0),
            _ => rows.push(h),
        }
    }

    // structural columns: (coordinate, +1 for x+ / -1 for x-)
    let mut columns: Vec<(usize, f64)> = Vec::with_capacity(2 * n);
    for (k, b) in bounds.iter().enumerate() {
        if matches!(b, SignBound::Free | SignBound::NonNeg) {
            columns.push((k, 1.0));
        }
        if matches!(b, SignBound::Free | SignBound::NonPos) {
            columns.push((k, -1.0));
        }
    }

    let m = rows.len();
    let p = columns.len();
    let artificial_rows: Vec<usize> = (0..m).filter(|&r| rows[r].bound < 0.0).collect();
    let n_art = artificial_rows.len();
    let width = p + m + n_art + 1;
    let mut t = Tableau {
        m,
        width,
        data: vec![0.0; (m + 1) * width],
        basis: vec![0; m],
    };
    let mut next_art = p + m;
    for (r, h) in rows.iter().enumerate() {
        let flip = if h.bound < 0.0 { -1.0 } else { 1.0 };
        let base = r * width;
        for (col, &(k, s)) in columns.iter().enumerate() {
            t.data[base + col] = flip * s * h.normal[k];
        }
        t.data[base + p + r] = flip;
        t.data[base + width - 1] = flip * h.bound;
        if flip < 0.0 {
            t.data[base + next_art] = 1.0;
            t.basis[r] = next_art;
            next_art += 1;
        } else {
            t.basis[r] = p + r;
        }
    }

    if n_art > 0 {
        let mut cost = vec![0.0; width - 1];
        cost[p + m..].fill(1.0);
        t.set_objective(&cost);
        t.optimize(width - 1)?;
        let infeasibility = -t.data[m * width + width - 1];
        let scale = artificial_rows
            .iter()
            .map(|&r| rows[r].bound.abs())
            .fold(1.0, f64::max);
        if infeasibility > FEAS_TOL * scale {
            return Err(Error::Infeasible);
        }
        // move zero-level artificials out of the basis where possible
        for r in 0..m {
            if t.basis[r] >= p + m {
                if let Some(col) = (0..p + m).find(|&c| t.at(r, c).abs() > PIVOT_TOL) {
                    t.pivot(r, col);
                }
            }
        }
    }

    let mut cost = vec![0.0; width - 1];
    cost[..p].fill(1.0);
    t.set_objective(&cost);
    t.optimize(p + m)?;

    let mut x = DVector::zeros(n);
    for r in 0..m {
        let col = t.basis[r];
        if col < p {
            let (k, s) = columns[col];
            x[k] += s * t.rhs(r).max(0.0);
        }
    }
    Ok(x)
}

/// Solves the column program for node `i`. With `signs = None` this is the
/// plain CLIME column problem, which is feasible for any `rho > 0` when `C`
/// is invertible.
pub fn solve_clime_column(
    c: &DMatrix<f64>,
    i: usize,
    rho: f64,
    signs: Option<&[i8]>,
) -> Result<DVector<f64>> {
    let lp = match signs {
        Some(s) => build_column_constraints(c, i, rho, s)?,
        None => build_clime_constraints(c, i, rho)?,
    };
    solve_l1_lp(&lp.halfspaces, c.nrows())
}
