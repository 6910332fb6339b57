//! Double-obstacle phase-field energy in mixed form, and the assembled
//! objective of the inversion.
//!
//! The phase field u ∈ [−1, 1] encodes the unknown region through the affine
//! slowness map s = s_min + ½(s_max − s_min)(1 + u). Its interface energy uses
//! a curvature term carried by the auxiliary variable w, tied to u through the
//! mass/stiffness constraint 𝕄w = 𝕊u (w is the weak Laplacian of u):
//!
//! ```text
//!   𝓙(u, w) = γ·(ε³/2)·wᵀ𝕄w + (ε/2)·uᵀ𝕊u + (1/(2ε))·(|Ω| − uᵀ𝕄u)
//! ```
//!
//! For a field transitioning along the optimal 1-D profile across an
//! interface of length L, 𝓙 ≈ P·L where P is the profile's transition
//! energy, so 𝓙/P estimates perimeter. The full objective is
//! misfit + σ·𝓙 summed over sources, and its reduced gradient (w eliminated
//! through the constraint) is
//!
//! ```text
//!   g = g_misfit + σ·(𝕊(γε³w + εu) − (1/ε)𝕄u),
//! ```
//!
//! with entries at pinned (Dirichlet) coefficients zeroed: those carry known
//! boundary data, not unknowns.

use crate::adjoint;
use crate::eikonal::{self, FmmResult, StencilTable};
use crate::error::Result;
use crate::fem::{solve_w, BasisTable, Mesh};
use crate::grid::{Grid, ReceiverSegment};
use crate::sparse::CsrMatrix;

/// Physical and model constants of one inversion.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub s_min: f64,
    pub s_max: f64,
    /// Interface-width scale of the phase field.
    pub epsilon: f64,
    /// Weight of the curvature term inside 𝓙.
    pub gamma: f64,
    /// Weight of 𝓙 in the objective (already includes any noise rescaling).
    pub sigma: f64,
    /// Noise scale weighting the misfit.
    pub nu: f64,
}

/// Everything fixed during one inversion: discretizations, operators,
/// receivers, sources, and their observed times.
pub struct InverseProblem {
    pub grid: Grid,
    pub mesh: Mesh,
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
    pub basis: BasisTable,
    pub table: StencilTable,
    pub seg: ReceiverSegment,
    /// Grid node index of each source.
    pub sources: Vec<usize>,
    /// Per source, observed times aligned with `seg.nodes`.
    pub observed: Vec<Vec<f64>>,
    pub params: ModelParams,
}

impl InverseProblem {
    /// Assembles the operators a grid/mesh pair needs and packages the data.
    pub fn assemble(
        grid: Grid,
        mesh: Mesh,
        seg: ReceiverSegment,
        sources: Vec<usize>,
        observed: Vec<Vec<f64>>,
        params: ModelParams,
    ) -> InverseProblem {
        assert_eq!(sources.len(), observed.len(), "one time series per source");
        let mass = crate::fem::assemble_mass(&mesh);
        let stiffness = crate::fem::assemble_stiffness(&mesh);
        let basis = crate::fem::basis_at_grid_nodes(&mesh, &grid);
        let table = StencilTable::new(&grid);
        InverseProblem { grid, mesh, mass, stiffness, basis, table, seg, sources, observed, params }
    }
}

/// Objective value split into its parts; `objective = misfit + regularizer`
/// and `regularizer = σ·j_unscaled` exactly.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub objective: f64,
    pub misfit: f64,
    pub regularizer: f64,
    pub j_unscaled: f64,
}

/// State-dependent products kept so the gradient can reuse the forward
/// solves of the accepted evaluation.
pub struct StateEval {
    pub eval: Evaluation,
    pub slowness: Vec<f64>,
    pub fmms: Vec<FmmResult>,
}

/// Slowness at every grid node from the mesh coefficients of u.
pub fn slowness_from_u(basis: &BasisTable, u: &[f64], params: &ModelParams) -> Vec<f64> {
    let half = 0.5 * (params.s_max - params.s_min);
    basis
        .entries
        .iter()
        .map(|(nodes, weights)| {
            let ubar: f64 = (0..3).map(|k| weights[k] * u[nodes[k]]).sum();
            params.s_min + half * (1.0 + ubar)
        })
        .collect()
}

/// 𝓙(u, w) for given fields; `area` is |Ω|.
pub fn regularizer(
    mass: &CsrMatrix,
    stiffness: &CsrMatrix,
    area: f64,
    u: &[f64],
    w: &[f64],
    epsilon: f64,
    gamma: f64,
) -> f64 {
    let curvature = 0.5 * gamma * epsilon.powi(3) * mass.quadratic_form(w, w);
    let gradient = 0.5 * epsilon * stiffness.quadratic_form(u, u);
    let obstacle = 0.5 / epsilon * (area - mass.quadratic_form(u, u));
    curvature + gradient + obstacle
}

/// Solves the constraint 𝕄w = 𝕊u for the problem's boundary conditions.
pub fn solve_w_for(pr: &InverseProblem, u: &[f64], warm: Option<&[f64]>) -> Result<Vec<f64>> {
    solve_w(&pr.mass, &pr.stiffness, u, pr.mesh.bc.is_pure_neumann(), warm)
}

/// Full objective at (u, w): misfit summed over sources plus σ𝓙. Keeps the
/// per-source forward solves for gradient reuse.
pub fn evaluate(pr: &InverseProblem, u: &[f64], w: &[f64]) -> Result<StateEval> {
    assert_eq!(pr.sources.len(), pr.observed.len(), "one observation set per source");
    let slowness = slowness_from_u(&pr.basis, u, &pr.params);
    let mut misfit_total = 0.0;
    let mut fmms = Vec::with_capacity(pr.sources.len());
    for (&source, observed) in pr.sources.iter().zip(&pr.observed) {
        let fmm = eikonal::solve(&pr.grid, &slowness, source)?;
        misfit_total += adjoint::misfit(&pr.seg, &fmm.times, observed, pr.params.nu);
        fmms.push(fmm);
    }
    let j = regularizer(
        &pr.mass,
        &pr.stiffness,
        pr.mesh.domain_area(),
        u,
        w,
        pr.params.epsilon,
        pr.params.gamma,
    );
    let regularizer = pr.params.sigma * j;
    let eval = Evaluation {
        objective: misfit_total + regularizer,
        misfit: misfit_total,
        regularizer,
        j_unscaled: j,
    };
    Ok(StateEval { eval, slowness, fmms })
}

/// Reduced gradient of the objective at the state behind `st`, zeroed at
/// pinned coefficients.
pub fn gradient(pr: &InverseProblem, u: &[f64], w: &[f64], st: &StateEval) -> Result<Vec<f64>> {
    let n = pr.mesh.n_nodes();
    let mut g = vec![0.0; n];
    for (fmm, observed) in st.fmms.iter().zip(&pr.observed) {
        let load = adjoint::misfit_rhs(&pr.seg, &fmm.times, observed, pr.params.nu, pr.grid.n_nodes());
        let p = adjoint::solve_adjoint(&pr.grid, &pr.table, fmm, &load)?;
        adjoint::accumulate_misfit_gradient(
            &p,
            &st.slowness,
            &pr.basis,
            pr.params.s_min,
            pr.params.s_max,
            &mut g,
        );
    }
    let (eps, gamma, sigma) = (pr.params.epsilon, pr.params.gamma, pr.params.sigma);
    // σ·(𝕊(γε³w + εu) − (1/ε)𝕄u)
    let blend: Vec<f64> = w
        .iter()
        .zip(u)
        .map(|(&wi, &ui)| gamma * eps.powi(3) * wi + eps * ui)
        .collect();
    let s_blend = pr.stiffness.apply(&blend);
    let m_u = pr.mass.apply(u);
    for i in 0..n {
        g[i] += sigma * (s_blend[i] - m_u[i] / eps);
        if pr.mesh.dirichlet[i] {
            g[i] = 0.0;
        }
    }
    Ok(g)
}

/// Interface length implied by an energy value: 𝓙/P, with P the transition
/// energy of the 1-D profile at the same γ.
pub fn perimeter_estimate(j_unscaled: f64, p_gamma: f64) -> f64 {
    j_unscaled / p_gamma
}
