//! Monotone upwind discretization of the eikonal equation |∇T| = s and two
//! solvers for it.
//!
//! At every node α other than the source, T satisfies
//!
//! ```text
//!   Σ_axis [ ((T_α − T_up) / h)^+ ]² = s_α²,    T_source = 0,
//! ```
//!
//! where T_up is the smaller axis-neighbor value and the neighbor sets come
//! from [`Grid::stencil`] (boundary nodes look inward only, so characteristics
//! leave the domain and never re-enter). The system has a unique nonnegative
//! solution; [`solve`] computes it in one Dijkstra-like pass (fast marching),
//! [`fixed_point_solve`] by brute-force sweeping to a fixed point. The two
//! agree to round-off and the sweeper exists as an independent check on the
//! single-pass logic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Traveltimes plus the order in which nodes were finalized.
///
/// `order` is a permutation of all node indices with T non-decreasing along
/// it and the source first; the adjoint solver consumes it in reverse.
#[derive(Debug, Clone)]
pub struct FmmResult {
    pub times: Vec<f64>,
    pub order: Vec<usize>,
}

/// One-node update: solves the upwind quadratic for the candidate time given
/// the per-axis upwind values (`f64::INFINITY` where an axis has no data).
///
/// The two-axis solution of (T−a)² + (T−b)² = (sh)² is kept only when the
/// discriminant is nonnegative and T exceeds both contributing values;
/// otherwise the update degenerates to the one-axis form min(a,b) + s·h.
/// Returns `f64::INFINITY` when both axes are empty.
pub fn local_update(upwind: [f64; 2], s: f64, h: f64) -> f64 {
    let (a, b) = if upwind[0] <= upwind[1] {
        (upwind[0], upwind[1])
    } else {
        (upwind[1], upwind[0])
    };
    if a == f64::INFINITY {
        return f64::INFINITY;
    }
    let sh = s * h;
    if b != f64::INFINITY {
        let disc = 2.0 * sh * sh - (b - a) * (b - a);
        if disc >= 0.0 {
            let t = 0.5 * (a + b + disc.sqrt());
            if t >= b {
                return t;
            }
        }
    }
    a + sh
}

/// Per-axis minima of `times` over the stencil members of `idx`.
#[inline]
fn upwind_values<F: Fn(usize) -> f64>(grid: &Grid, idx: usize, stencil: &[usize], time_of: F) -> [f64; 2] {
    let (_, j) = grid.ij(idx);
    let mut up = [f64::INFINITY; 2];
    for &n in stencil {
        let (_, nj) = grid.ij(n);
        let axis = (nj != j) as usize;
        let t = time_of(n);
        if t < up[axis] {
            up[axis] = t;
        }
    }
    up
}

fn validate_slowness(grid: &Grid, slowness: &[f64]) -> Result<()> {
    assert_eq!(slowness.len(), grid.n_nodes(), "slowness field size mismatch");
    for (index, &value) in slowness.iter().enumerate() {
        if !(value > 0.0) {
            return Err(Error::NonpositiveSlowness { index, value });
        }
    }
    Ok(())
}

/// A march can only leave the source if some other node's stencil reads it.
/// On any grid with interior nodes the four lattice corners fail this — their
/// values feed nobody — so a corner source would terminate immediately with
/// the rest of the grid unreached. Rejected up front in both solvers.
fn validate_source(grid: &Grid, table: &StencilTable, source: usize) -> Result<()> {
    assert!(source < grid.n_nodes(), "source index {source} out of range");
    if grid.n_nodes() > 1 && table.dependents(source).is_empty() {
        let (x, z) = grid.coords(source);
        return Err(Error::Config(format!(
            "source ({x}, {z}) sits at a lattice corner; corner values feed no other node, \
             so a wavefront cannot leave it"
        )));
    }
    Ok(())
}

/// Flat adjacency over all node stencils, plus its transpose (who listens to
/// whom). Built per solve; both solvers and the adjoint share it.
pub struct StencilTable {
    offsets: Vec<usize>,
    list: Vec<usize>,
    rev_offsets: Vec<usize>,
    rev_list: Vec<usize>,
}

impl StencilTable {
    pub fn new(grid: &Grid) -> StencilTable {
        let n = grid.n_nodes();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut list = Vec::with_capacity(4 * n);
        offsets.push(0);
        for idx in 0..n {
            list.extend(grid.stencil(idx));
            offsets.push(list.len());
        }
        // Transpose: rev_list[rev_offsets[m]..] = nodes whose stencil contains m.
        let mut counts = vec![0usize; n + 1];
        for &m in &list {
            counts[m + 1] += 1;
        }
        for k in 0..n {
            counts[k + 1] += counts[k];
        }
        let rev_offsets = counts.clone();
        let mut cursor = counts;
        let mut rev_list = vec![0usize; list.len()];
        for idx in 0..n {
            for &m in &list[offsets[idx]..offsets[idx + 1]] {
                rev_list[cursor[m]] = idx;
                cursor[m] += 1;
            }
        }
        StencilTable { offsets, list, rev_offsets, rev_list }
    }

    /// Upwind stencil of `idx`.
    #[inline]
    pub fn row(&self, idx: usize) -> &[usize] {
        &self.list[self.offsets[idx]..self.offsets[idx + 1]]
    }

    /// Nodes whose stencil contains `idx` (the dependents to re-examine when
    /// `idx` is finalized).
    #[inline]
    pub fn dependents(&self, idx: usize) -> &[usize] {
        &self.rev_list[self.rev_offsets[idx]..self.rev_offsets[idx + 1]]
    }
}

/// Min-heap entry; ties in time break toward the smaller node index so runs
/// are bitwise reproducible.
#[derive(PartialEq)]
struct Candidate {
    t: f64,
    node: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we pop the smallest time.
        other.t.total_cmp(&self.t).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Fast-marching solve: one pass over the grid, each node finalized exactly
/// once in non-decreasing time order. The source may be any node except a
/// lattice corner (corner values feed no other node, so nothing would move).
pub fn solve(grid: &Grid, slowness: &[f64], source: usize) -> Result<FmmResult> {
    validate_slowness(grid, slowness)?;
    let n = grid.n_nodes();
    let table = StencilTable::new(grid);
    validate_source(grid, &table, source)?;
    let mut times = vec![f64::INFINITY; n];
    let mut accepted = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::with_capacity(n);

    times[source] = 0.0;
    heap.push(Candidate { t: 0.0, node: source });

    while let Some(Candidate { t, node }) = heap.pop() {
        if accepted[node] {
            continue; // stale entry superseded by a smaller candidate
        }
        accepted[node] = true;
        debug_assert_eq!(t, times[node]);
        order.push(node);

        for &m in table.dependents(node) {
            if accepted[m] {
                continue;
            }
            let up = upwind_values(grid, m, table.row(m), |k| {
                if accepted[k] { times[k] } else { f64::INFINITY }
            });
            let cand = local_update(up, slowness[m], grid.h);
            if cand < times[m] {
                times[m] = cand;
                heap.push(Candidate { t: cand, node: m });
            }
        }
    }

    debug_assert_eq!(order.len(), n, "grid is connected; every node must be reached");
    Ok(FmmResult { times, order })
}

/// Reference solver: Gauss–Seidel sweeps of the upwind system until the
/// iterates stop changing. Starts from +∞ (except the source) and only ever
/// lowers values, so it converges monotonically to the same fixed point the
/// fast march computes. Slow, simple, and used to cross-check `solve`.
/// Rejects corner sources exactly as [`solve`] does.
pub fn fixed_point_solve(
    grid: &Grid,
    slowness: &[f64],
    source: usize,
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<f64>> {
    validate_slowness(grid, slowness)?;
    let n = grid.n_nodes();
    let table = StencilTable::new(grid);
    validate_source(grid, &table, source)?;
    let mut times = vec![f64::INFINITY; n];
    times[source] = 0.0;

    // Four sweep directions per round, as in fast sweeping; the fixed point
    // does not depend on the order, only the sweep count does.
    let mut residual = f64::INFINITY;
    for sweep in 0..max_sweeps {
        residual = 0.0;
        let reverse_i = sweep % 2 == 1;
        let reverse_j = (sweep / 2) % 2 == 1;
        for jj in 0..grid.nz {
            let j = if reverse_j { grid.nz - 1 - jj } else { jj };
            for ii in 0..grid.nx {
                let i = if reverse_i { grid.nx - 1 - ii } else { ii };
                let idx = grid.index(i, j);
                if idx == source {
                    continue;
                }
                let up = upwind_values(grid, idx, table.row(idx), |k| times[k]);
                let cand = local_update(up, slowness[idx], grid.h);
                if cand < times[idx] {
                    let drop = if times[idx] == f64::INFINITY { f64::INFINITY } else { times[idx] - cand };
                    residual = residual.max(drop);
                    times[idx] = cand;
                }
            }
        }
        if residual < tol {
            return Ok(times);
        }
    }
    Err(Error::NoConvergence { solver: "fixed-point eikonal sweeps", iterations: max_sweeps, residual })
}
