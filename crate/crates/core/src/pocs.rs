//! Cyclic projections onto half-spaces (POCS) as a cheap feasibility screen,
//! and the increasing-`rho` search built on it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{build_column_constraints, max_violation, HalfSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PocsConfig {
    pub max_cycles: usize,
    /// End-of-cycle iterates closer than this count as a repeating limit point.
    pub stagnation_tol: f64,
    pub violation_tol: f64,
}

impl Default for PocsConfig {
    fn default() -> Self {
        Self {
            max_cycles: 1000,
            stagnation_tol: 1e-9,
            violation_tol: 1e-7,
        }
    }
}

impl PocsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_cycles == 0 || !(self.stagnation_tol > 0.0) || !(self.violation_tol > 0.0) {
            return Err(Error::InvalidInput(
                "POCS limits and tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Geometric schedule `rho_init * growth^k` capped at `rho_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoSchedule {
    pub rho_init: f64,
    pub growth: f64,
    pub rho_max: f64,
}

impl Default for RhoSchedule {
    fn default() -> Self {
        Self {
            rho_init: 0.07,
            growth: 1.1,
            rho_max: 10.0,
        }
    }
}

impl RhoSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_init > 0.0) || !(self.rho_init < self.rho_max) || !(self.growth > 1.0) {
            return Err(Error::InvalidInput(format!(
                "invalid rho schedule: need 0 < rho_init < rho_max and growth > 1, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> {
        let RhoSchedule {
            rho_init,
            growth,
            rho_max,
        } = *self;
        let mut k = 0i32;
        std::iter::from_fn(move || {
            let rho = rho_init * growth.powi(k);
            k += 1;
            (rho <= rho_max).then_some(rho)
        })
    }
}

/// Euclidean projection onto `c . x <= c0`; feasible points are returned as is.
pub fn project_halfspace(x: &DVector<f64>, h: &HalfSpace) -> DVector<f64> {
    let mut y = x.clone();
    project_in_place(&mut y, h);
    y
}

/// Returns the positive slack removed, or 0 if `x` was already inside.
fn project_in_place(x: &mut DVector<f64>, h: &HalfSpace) -> f64 {
    let s = h.slack(x);
    if s > 0.0 {
        x.axpy(-s / h.norm_squared(), h.normal(), 1.0);
        s
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PocsOutcome {
    Feasible(DVector<f64>),
    /// Carries the last iterate, usable as a warm start.
    Infeasible(DVector<f64>),
}

impl PocsOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, PocsOutcome::Feasible(_))
    }

    pub fn point(&self) -> &DVector<f64> {
        match self {
            PocsOutcome::Feasible(x) | PocsOutcome::Infeasible(x) => x,
        }
    }

    pub fn into_point(self) -> DVector<f64> {
        match self {
            PocsOutcome::Feasible(x) | PocsOutcome::Infeasible(x) => x,
        }
    }
}

/// Cycles through `halfspaces` in order, projecting onto each violated one.
///
/// Stops with `Feasible` after a cycle in which no constraint was violated by
/// more than `violation_tol` (and the final point checks out), and with
/// `Infeasible` once consecutive end-of-cycle iterates stop moving while a
/// violation remains, or when `max_cycles` runs out.
pub fn pocs_feasible(halfspaces: &[HalfSpace], x0: &DVector<f64>, cfg: &PocsConfig) -> PocsOutcome {
    let mut x = x0.clone();
    if halfspaces.is_empty() {
        return PocsOutcome::Feasible(x);
    }
    let mut prev_end = x.clone();
    for _ in 0..cfg.max_cycles {
        let mut worst = 0.0f64;
        for h in halfspaces {
            worst = worst.max(project_in_place(&mut x, h));
        }
        if worst <= cfg.violation_tol && max_violation(halfspaces, &x) <= cfg.violation_tol {
            return PocsOutcome::Feasible(x);
        }
        if (&x - &prev_end).norm() < cfg.stagnation_tol {
            return PocsOutcome::Infeasible(x);
        }
        prev_end.copy_from(&x);
    }
    PocsOutcome::Infeasible(x)
}

/// `e_i` with entries zeroed where they would break the sign pattern.
pub fn initial_point(n: usize, i: usize, signs: &[i8]) -> DVector<f64> {
    let mut x = DVector::zeros(n);
    if signs[i] < 0 {
        x[i] = 1.0;
    }
    x
}

/// Result of a feasibility-driven `rho` search.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoFound {
    pub rho: f64,
    /// POCS point certifying feasibility at `rho`.
    pub point: DVector<f64>,
}

/// Walks the schedule and returns the first `rho` at which POCS finds a point
/// of the sign-constrained column system. Each attempt warm-starts from the
/// previous attempt's final iterate.
pub fn find_min_rho_with_point(
    c: &DMatrix<f64>,
    i: usize,
    signs: &[i8],
    sched: &RhoSchedule,
    cfg: &PocsConfig,
) -> Result<RhoFound> {
    sched.validate()?;
    cfg.validate()?;
    let n = c.nrows();
    let mut x = initial_point(n, i, signs);
    for rho in sched.iter() {
        let lp = build_column_constraints(c, i, rho, signs)?;
        match pocs_feasible(&lp.halfspaces, &x, cfg) {
            PocsOutcome::Feasible(point) => return Ok(RhoFound { rho, point }),
            PocsOutcome::Infeasible(last) => x = last,
        }
    }
    Err(Error::RhoExhausted {
        rho_max: sched.rho_max,
    })
}

pub fn find_min_rho(
    c: &DMatrix<f64>,
    i: usize,
    signs: &[i8],
    sched: &RhoSchedule,
    cfg: &PocsConfig,
) -> Result<f64> {
    find_min_rho_with_point(c, i, signs, sched, cfg).map(|f| f.rho)
}
