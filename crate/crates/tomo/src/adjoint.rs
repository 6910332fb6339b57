//! Traveltime misfit and the discrete adjoint of the upwind eikonal system.
//!
//! The forward solve fixes T at the source and enforces, at every other node
//! β, the upwind balance over the per-axis minima of its stencil:
//!
//! ```text
//!   G_β(T, s) = ½ Σ_axis [((T_β − m_axis)/h)⁺]² − ½ s_β² = 0,
//!   m_axis = min of T over the stencil members of β on that axis.
//! ```
//!
//! Differentiating the solved system gives a triangular adjoint: the Jacobian
//! entry from β to its active upwind member α is −c_{βα} with
//! c_{βα} = ((T_β − T_α)/h)⁺/h, and c_{βα} ≠ 0 requires T_α < T_β. Sweeping
//! nodes in decreasing time therefore solves (∂G/∂T)ᵀ P = load in one pass:
//! finalize P_β = (incoming_β + load_β) / D_β with D_β = Σ c_{βα}, then
//! scatter c_{βα}·P_β down to each active α. The load is ∂(misfit)/∂T, and
//! the slowness derivative of the misfit is then simply P_β·s_β because
//! ∂G_β/∂s_β = −s_β.
//!
//! Corner nodes carry equations fed by their two wall neighbors, so receiver
//! residuals at corners flow corner → wall → interior like any other.

use crate::eikonal::{FmmResult, StencilTable};
use crate::error::{Error, Result};
use crate::fem::BasisTable;
use crate::grid::{Grid, ReceiverSegment};

/// Weighted least-squares data misfit ½·ν⁻²·Σ_ρ w_ρ (T_ρ − T^obs_ρ)² over the
/// receiver path, with trapezoidal path weights w.
pub fn misfit(seg: &ReceiverSegment, times: &[f64], observed: &[f64], nu: f64) -> f64 {
    assert_eq!(seg.nodes.len(), observed.len(), "one observation per receiver");
    debug_assert!(nu > 0.0, "misfit weight requires a positive noise scale");
    let mut acc = 0.0;
    for ((&node, &w), &t_obs) in seg.nodes.iter().zip(&seg.weights).zip(observed) {
        let r = times[node] - t_obs;
        acc += w * r * r;
    }
    0.5 * acc / (nu * nu)
}

/// Adjoint load ∂(misfit)/∂T: ν⁻²·w_ρ·(T_ρ − T^obs_ρ) at receiver nodes, zero
/// elsewhere. Repeated receiver nodes accumulate.
pub fn misfit_rhs(
    seg: &ReceiverSegment,
    times: &[f64],
    observed: &[f64],
    nu: f64,
    n_nodes: usize,
) -> Vec<f64> {
    assert_eq!(seg.nodes.len(), observed.len(), "one observation per receiver");
    let mut rhs = vec![0.0; n_nodes];
    let inv_nu2 = 1.0 / (nu * nu);
    for ((&node, &w), &t_obs) in seg.nodes.iter().zip(&seg.weights).zip(observed) {
        rhs[node] += inv_nu2 * w * (times[node] - t_obs);
    }
    rhs
}

/// Active upwind members of `beta`: per axis, the stencil member with the
/// smallest time (first wins on ties, matching the forward solve) together
/// with its coupling c = ((T_β − T_α)/h)⁺/h, kept only when positive.
#[inline]
fn active_upwind(
    grid: &Grid,
    table: &StencilTable,
    times: &[f64],
    beta: usize,
) -> [Option<(usize, f64)>; 2] {
    let (_, j) = grid.ij(beta);
    let mut best: [Option<(usize, f64)>; 2] = [None, None];
    for &a in table.row(beta) {
        let (_, aj) = grid.ij(a);
        let axis = (aj != j) as usize;
        let t = times[a];
        if best[axis].is_none_or(|(_, bt)| t < bt) {
            best[axis] = Some((a, t));
        }
    }
    best.map(|slot| {
        slot.and_then(|(a, t)| {
            let c = (times[beta] - t) / (grid.h * grid.h);
            (c > 0.0).then_some((a, c))
        })
    })
}

/// Solves the transposed linearized system in one decreasing-time sweep.
///
/// `load` is ∂(objective)/∂T per node; the entry at the source node is
/// ignored (its time is pinned, there is no equation to transpose). Returns P
/// with P = 0 at the source. A node with no active upwind coupling can carry
/// no sensitivity; a nonzero load there is unanswerable and reported as
/// [`Error::ZeroAdjointDiagonal`].
pub fn solve_adjoint(
    grid: &Grid,
    table: &StencilTable,
    fmm: &FmmResult,
    load: &[f64],
) -> Result<Vec<f64>> {
    let n = grid.n_nodes();
    assert_eq!(load.len(), n, "adjoint load size mismatch");
    let source = fmm.order[0];
    debug_assert_eq!(fmm.times[source], 0.0, "first finalized node is the source");
    let mut p = vec![0.0; n];
    let mut incoming = vec![0.0; n];
    for &beta in fmm.order.iter().rev() {
        if beta == source {
            continue;
        }
        let total = incoming[beta] + load[beta];
        let active = active_upwind(grid, table, &fmm.times, beta);
        let diag: f64 = active.iter().flatten().map(|&(_, c)| c).sum();
        if diag <= 0.0 {
            if total == 0.0 {
                continue;
            }
            return Err(Error::ZeroAdjointDiagonal { index: beta });
        }
        let pb = total / diag;
        p[beta] = pb;
        for (a, c) in active.into_iter().flatten() {
            incoming[a] += c * pb;
        }
    }
    Ok(p)
}

/// Adds the misfit part of the control gradient: for each mesh coefficient m,
/// Σ_α P_α · s_α · ½(s_max − s_min) · φ_m(x_α), the chain through the affine
/// map from phase field to slowness. The caller masks pinned entries.
pub fn accumulate_misfit_gradient(
    p: &[f64],
    slowness: &[f64],
    basis: &BasisTable,
    s_min: f64,
    s_max: f64,
    out: &mut [f64],
) {
    let half_contrast = 0.5 * (s_max - s_min);
    for (alpha, (nodes, weights)) in basis.entries.iter().enumerate() {
        let f = p[alpha] * slowness[alpha] * half_contrast;
        if f != 0.0 {
            for k in 0..3 {
                out[nodes[k]] += f * weights[k];
            }
        }
    }
}
