//! Projected gradient descent on the box-constrained objective.
//!
//! One iteration from (u, w): compute the reduced gradient g, then try step
//! sizes α = α_init, α_init/2, … and accept the first trial
//!
//! ```text
//!   u⁺ = clamp(u − α·g, −1, 1),   w⁺ from 𝕄w⁺ = 𝕊u⁺,
//! ```
//!
//! whose decrease beats the projected Armijo bound
//!
//! ```text
//!   𝓘(u⁺, w⁺) − 𝓘(u, w) < −(η/α²)·(u⁺−u)ᵀ𝕄(u⁺−u).
//! ```
//!
//! The search restarts from α_init every iteration, so the accepted step can
//! grow back after a cautious stretch. The stationarity measure
//! α⁻²‖u⁺−u‖²_𝕄 vanishes exactly when u is a fixed point of the projected
//! step; dropping below `tol` counts as converged. A projection that moves
//! nothing at all, or α shrinking past α_init·2⁻⁶⁰, is a stall: no further
//! progress is possible at this precision.

use crate::error::Result;
use crate::phase_field::{evaluate, gradient, solve_w_for, Evaluation, InverseProblem};

#[derive(Debug, Clone)]
pub struct DescentConfig {
    pub alpha_init: f64,
    /// Sufficient-decrease constant η.
    pub eta: f64,
    /// Stationarity threshold for convergence.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DescentConfig {
    fn default() -> Self {
        DescentConfig { alpha_init: 1e4, eta: 1e-5, tol: 1e-12, max_iter: 500 }
    }
}

impl DescentConfig {
    /// Smallest step the line search may reach before giving up.
    pub fn alpha_min(&self) -> f64 {
        self.alpha_init * 2f64.powi(-60)
    }
}

/// One accepted iteration, in the order the run history is written.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub k: usize,
    pub objective: f64,
    pub misfit: f64,
    pub regularizer: f64,
    pub alpha: f64,
    pub stationarity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Stationarity dropped below the tolerance.
    Converged,
    /// The projected step moved nothing, or the step size bottomed out.
    Stall,
    /// Iteration budget exhausted first.
    IterationCap,
}

pub struct DescentResult {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub history: Vec<IterationRecord>,
    pub stop: StopReason,
    pub final_eval: Evaluation,
}

pub fn run(pr: &InverseProblem, u0: Vec<f64>, cfg: &DescentConfig) -> Result<DescentResult> {
    run_with_observer(pr, u0, cfg, |_, _, _| {})
}

/// Like [`run`], invoking `observer(record, u, w)` after every accepted
/// iteration (for invariant checks and progress reporting).
pub fn run_with_observer(
    pr: &InverseProblem,
    mut u: Vec<f64>,
    cfg: &DescentConfig,
    mut observer: impl FnMut(&IterationRecord, &[f64], &[f64]),
) -> Result<DescentResult> {
    pr.mesh.apply_dirichlet(&mut u);
    let mut w = solve_w_for(pr, &u, None)?;
    let mut st = evaluate(pr, &u, &w)?;
    let mut history = Vec::new();
    let mut stop = StopReason::IterationCap;

    for k in 1..=cfg.max_iter {
        let g = gradient(pr, &u, &w, &st)?;
        let mut alpha = cfg.alpha_init;
        let mut accepted = None;
        loop {
            let u_trial: Vec<f64> =
                u.iter().zip(&g).map(|(&ui, &gi)| (ui - alpha * gi).clamp(-1.0, 1.0)).collect();
            let du: Vec<f64> = u_trial.iter().zip(&u).map(|(a, b)| a - b).collect();
            if du.iter().all(|&d| d == 0.0) {
                // The projection pins every coefficient; no α can move it.
                break;
            }
            let w_trial = solve_w_for(pr, &u_trial, Some(&w))?;
            let st_trial = evaluate(pr, &u_trial, &w_trial)?;
            let du_norm2 = pr.mass.quadratic_form(&du, &du);
            let decrease = st_trial.eval.objective - st.eval.objective;
            if decrease < -cfg.eta / (alpha * alpha) * du_norm2 {
                accepted = Some((u_trial, w_trial, st_trial, alpha, du_norm2));
                break;
            }
            alpha *= 0.5;
            if alpha < cfg.alpha_min() {
                break;
            }
        }
        let Some((u_new, w_new, st_new, alpha, du_norm2)) = accepted else {
            stop = StopReason::Stall;
            break;
        };
        u = u_new;
        w = w_new;
        st = st_new;
        let stationarity = du_norm2 / (alpha * alpha);
        let record = IterationRecord {
            k,
            objective: st.eval.objective,
            misfit: st.eval.misfit,
            regularizer: st.eval.regularizer,
            alpha,
            stationarity,
        };
        observer(&record, &u, &w);
        history.push(record);
        if stationarity < cfg.tol {
            stop = StopReason::Converged;
            break;
        }
    }

    Ok(DescentResult { u, w, history, stop, final_eval: st.eval })
}
