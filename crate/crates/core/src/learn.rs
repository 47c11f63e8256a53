//! Balanced Laplacian learning by per-node sign-constrained CLIME columns.
//!
//! Each node is visited in turn. For both candidate polarities of the node the
//! column program is given sign constraints that make every edge of the node
//! consistent with the current polarities of its neighbours; `rho` is raised
//! along the schedule until POCS finds a feasible point for at least one
//! candidate, the feasible candidates are solved exactly, and the one with the
//! smaller l1 objective wins. The winning column overwrites both column and
//! row `i` of the running estimate, which keeps it symmetric.

use std::fmt;
use std::str::FromStr;

use log::{debug, warn};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::graph::{
    greedy_balance, BalancedLaplacian, GeneralizedLaplacian, PolarityVector, SignedGraph,
};
use crate::lp::{build_column_constraints, solve_clime_column, solve_l1_lp};
use crate::pocs::{initial_point, pocs_feasible, PocsConfig, PocsOutcome, RhoSchedule};

/// Objectives closer than this are a tie.
pub const TIE_TOL: f64 = 1e-9;
/// Eigenvalues below `-PSD_TOL` trigger diagonal loading before filtering.
pub const PSD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    AllOnes,
    CovarianceGreedy,
}

impl FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-ones" => Ok(InitMode::AllOnes),
            "covariance-greedy" => Ok(InitMode::CovarianceGreedy),
            other => Err(Error::InvalidInput(format!("unknown init mode '{other}'"))),
        }
    }
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMode::AllOnes => "all-ones",
            InitMode::CovarianceGreedy => "covariance-greedy",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub rho_schedule: RhoSchedule,
    pub pocs: PocsConfig,
    pub max_sweeps: usize,
    pub conv_tol: f64,
    pub seed: u64,
    pub init_mode: InitMode,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            rho_schedule: RhoSchedule::default(),
            pocs: PocsConfig::default(),
            max_sweeps: 20,
            conv_tol: 1e-4,
            seed: 0,
            init_mode: InitMode::CovarianceGreedy,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        self.rho_schedule.validate()?;
        self.pocs.validate()?;
        if self.max_sweeps == 0 || !(self.conv_tol > 0.0) {
            return Err(Error::InvalidInput(
                "max_sweeps must be >= 1 and conv_tol > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Symmetric covariance matrix with a strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCovariance {
    matrix: DMatrix<f64>,
}

impl SampleCovariance {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        check_dim(n, matrix.ncols())?;
        for i in 0..n {
            if !(matrix[(i, i)] > 0.0) {
                return Err(Error::ZeroVariance(i));
            }
            for j in (i + 1)..n {
                if matrix[(i, j)] != matrix[(j, i)] {
                    return Err(Error::InvalidInput(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { matrix })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Row-centred sample covariance `X X^T / (K - 1)` of an `n x K` data matrix
/// whose columns are observations.
pub fn sample_covariance(x: &DMatrix<f64>) -> Result<SampleCovariance> {
    let (n, k) = x.shape();
    if k <= n {
        return Err(Error::InsufficientSamples { n, k });
    }
    let mut centred = x.clone();
    for (i, mut row) in centred.row_iter_mut().enumerate() {
        let mean = row.sum() / k as f64;
        row.add_scalar_mut(-mean);
        if row.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroVariance(i));
        }
    }
    let scale = 1.0 / (k - 1) as f64;
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = centred.row(i).dot(&centred.row(j)) * scale;
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    SampleCovariance::new(c)
}

pub fn init_polarities(c: &SampleCovariance, mode: InitMode, seed: u64) -> PolarityVector {
    match mode {
        InitMode::AllOnes => PolarityVector::all_positive(c.n()),
        InitMode::CovarianceGreedy => {
            let mut w = c.matrix().clone();
            w.fill_diagonal(0.0);
            let g = SignedGraph::new(w).expect("covariance is symmetric");
            greedy_balance(&g, seed).polarity().clone()
        }
    }
}

/// Sign pattern for node `i` under hypothesis `beta_i = hypothesis`:
/// `s_j = beta_i beta_j` for `j != i` and `s_i = -1`.
pub fn sign_pattern(beta: &PolarityVector, i: usize, hypothesis: i8) -> Vec<i8> {
    (0..beta.len())
        .map(|j| if j == i { -1 } else { hypothesis * beta.get(j) })
        .collect()
}

/// Outcome of one node update.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnUpdate {
    pub polarity: i8,
    pub column: DVector<f64>,
    pub objective: f64,
    pub rho: f64,
}

/// Chooses the polarity and column for node `i` given the polarities of all
/// other nodes. Both hypotheses share one `rho`: the first value on the
/// schedule at which at least one of them is feasible.
pub fn optimize_column(
    c: &SampleCovariance,
    beta: &PolarityVector,
    i: usize,
    cfg: &LearnConfig,
) -> Result<ColumnUpdate> {
    let n = c.n();
    check_dim(n, beta.len())?;
    let hypotheses: [i8; 2] = [1, -1];
    let patterns = hypotheses.map(|h| sign_pattern(beta, i, h));
    let mut starts = patterns.clone().map(|s| initial_point(n, i, &s));

    for rho in cfg.rho_schedule.iter() {
        let mut solved: Vec<ColumnUpdate> = Vec::with_capacity(2);
        for (k, &h) in hypotheses.iter().enumerate() {
            let lp = build_column_constraints(c.matrix(), i, rho, &patterns[k])?;
            match pocs_feasible(&lp.halfspaces, &starts[k], &cfg.pocs) {
                PocsOutcome::Feasible(_) => match solve_l1_lp(&lp.halfspaces, n) {
                    Ok(column) => solved.push(ColumnUpdate {
                        polarity: h,
                        objective: column.lp_norm(1),
                        column,
                        rho,
                    }),
                    Err(Error::Infeasible) => {
                        debug!("node {i}, beta {h}: POCS accepted rho {rho} but the LP is infeasible")
                    }
                    Err(e) => return Err(e),
                },
                PocsOutcome::Infeasible(last) => starts[k] = last,
            }
        }
        let chosen = match solved.len() {
            0 => continue,
            1 => solved.pop(),
            _ => {
                let (a, b) = (&solved[0], &solved[1]);
                let idx = if (a.objective - b.objective).abs() <= TIE_TOL {
                    solved.iter().position(|u| u.polarity == beta.get(i))
                } else if a.objective < b.objective {
                    Some(0)
                } else {
                    Some(1)
                };
                idx.map(|k| solved.swap_remove(k))
            }
        };
        return Ok(chosen.expect("at least one solved hypothesis"));
    }
    Err(Error::BothInfeasible { node: i })
}

/// Learned balanced Laplacian with per-node diagnostics.
#[derive(Debug, Clone)]
pub struct LearnedGraph {
    pub balanced: BalancedLaplacian,
    /// `rho` used for each node's final column program.
    pub rhos: Vec<f64>,
    /// Each node's final column program solution, before later row overwrites.
    pub columns: Vec<DVector<f64>>,
    pub sweeps: usize,
    pub converged: bool,
    pub lambda_min: f64,
    pub warnings: Vec<String>,
}

pub fn learn_balanced_laplacian(c: &SampleCovariance, cfg: &LearnConfig) -> Result<LearnedGraph> {
    cfg.validate()?;
    let n = c.n();
    let mut beta = init_polarities(c, cfg.init_mode, cfg.seed);
    let mut l = DMatrix::<f64>::zeros(n, n);
    let mut rhos = vec![f64::NAN; n];
    let mut columns = vec![DVector::zeros(n); n];
    let mut sweeps = 0;
    let mut converged = false;

    for sweep in 1..=cfg.max_sweeps {
        let previous = l.clone();
        for i in 0..n {
            let upd = optimize_column(c, &beta, i, cfg)?;
            beta.set(i, upd.polarity);
            for j in 0..n {
                l[(j, i)] = upd.column[j];
                l[(i, j)] = upd.column[j];
            }
            rhos[i] = upd.rho;
            columns[i] = upd.column;
        }
        sweeps = sweep;
        let change = (&l - &previous).amax();
        debug!("sweep {sweep}: max entry change {change:e}");
        if change < cfg.conv_tol {
            converged = true;
            break;
        }
    }

    let mut warnings = Vec::new();
    if !converged {
        let msg = format!("did not converge within {} sweeps", cfg.max_sweeps);
        warn!("{msg}");
        warnings.push(msg);
    }
    let laplacian = GeneralizedLaplacian::from_symmetric_unchecked(l);
    let lambda_min = min_eigenvalue(&laplacian);
    if lambda_min < -PSD_TOL {
        let msg = format!(
            "learned Laplacian is indefinite (lambda_min = {lambda_min:e}); filtering applies diagonal loading"
        );
        warn!("{msg}");
        warnings.push(msg);
    }
    let balanced = BalancedLaplacian::new(laplacian, beta)?;
    Ok(LearnedGraph {
        balanced,
        rhos,
        columns,
        sweeps,
        converged,
        lambda_min,
        warnings,
    })
}

pub fn min_eigenvalue(l: &GeneralizedLaplacian) -> f64 {
    if l.n() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(l.matrix().clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Adds `(|lambda_min| + PSD_TOL) I` when `lambda_min < -PSD_TOL`, returning
/// the applied shift. Eigenvectors and edge signs are unchanged.
pub fn psd_guard(l: &GeneralizedLaplacian) -> (GeneralizedLaplacian, Option<f64>) {
    let lambda_min = min_eigenvalue(l);
    if lambda_min < -PSD_TOL {
        let shift = lambda_min.abs() + PSD_TOL;
        (l.shifted(shift), Some(shift))
    } else {
        (l.clone(), None)
    }
}

/// Plain CLIME with a single `rho`, symmetrized as `(L + L^T) / 2`.
pub fn clime_unconstrained(c: &SampleCovariance, rho: f64) -> Result<GeneralizedLaplacian> {
    if !(rho > 0.0) {
        return Err(Error::NonPositiveRho(rho));
    }
    let n = c.n();
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        let col = solve_clime_column(c.matrix(), i, rho, None)?;
        l.set_column(i, &col);
    }
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (l[(i, j)] + l[(j, i)]));
    Ok(GeneralizedLaplacian::from_symmetric_unchecked(sym))
}
