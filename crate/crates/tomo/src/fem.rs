//! Structured P1 triangulation of the rectangle and the mixed second-order
//! system.
//!
//! Every grid cell of side ħ is split along its bottom-left→top-right
//! diagonal, giving the classic mesh whose stiffness matrix reproduces the
//! 5-point Laplacian. The phase field u and its auxiliary variable w (a weak
//! Laplacian, 𝕄w = 𝕊u) live in the nodal P1 space; the auxiliary variable is
//! what lets a fourth-order energy term be assembled from C⁰ elements.
//!
//! Boundary conditions: each wall is either Dirichlet (u pinned to a fixed
//! value, optimizer never updates those coefficients) or Neumann (natural).
//! Corners shared by a Dirichlet and a Neumann wall count as Dirichlet, so
//! the pinned set is closed. The w-system is solved with the full test space:
//! its rows on pinned nodes extend the same mass relation, which is exactly
//! what the energy ∫w² requires.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sparse::{pcg_jacobi, CsrMatrix};

/// Snap tolerance for point location, relative to ħ.
const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallBc {
    Dirichlet(f64),
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcSpec {
    pub left: WallBc,
    pub right: WallBc,
    pub bottom: WallBc,
    pub top: WallBc,
}

impl BcSpec {
    pub fn all_dirichlet(value: f64) -> BcSpec {
        BcSpec {
            left: WallBc::Dirichlet(value),
            right: WallBc::Dirichlet(value),
            bottom: WallBc::Dirichlet(value),
            top: WallBc::Dirichlet(value),
        }
    }

    /// Crosswell layout: instrumented left/right walls pinned, free top and
    /// bottom.
    pub fn wells(value: f64) -> BcSpec {
        BcSpec {
            left: WallBc::Dirichlet(value),
            right: WallBc::Dirichlet(value),
            bottom: WallBc::Neumann,
            top: WallBc::Neumann,
        }
    }

    pub fn all_neumann() -> BcSpec {
        BcSpec { left: WallBc::Neumann, right: WallBc::Neumann, bottom: WallBc::Neumann, top: WallBc::Neumann }
    }

    pub fn is_pure_neumann(&self) -> bool {
        [self.left, self.right, self.bottom, self.top].iter().all(|bc| *bc == WallBc::Neumann)
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub lx: f64,
    pub lz: f64,
    pub hbar: f64,
    /// Node counts per axis (nodes, not cells).
    pub nx: usize,
    pub nz: usize,
    pub bc: BcSpec,
    /// Per-node pinned flag and pinned value (0 where free).
    pub dirichlet: Vec<bool>,
    pub dirichlet_value: Vec<f64>,
}

impl Mesh {
    pub fn structured(lx: f64, lz: f64, hbar: f64, bc: BcSpec) -> Result<Mesh> {
        let nx = axis_count(lx, hbar)?;
        let nz = axis_count(lz, hbar)?;
        let mut mesh = Mesh {
            lx,
            lz,
            hbar,
            nx,
            nz,
            bc,
            dirichlet: vec![false; nx * nz],
            dirichlet_value: vec![0.0; nx * nz],
        };
        let walls = [
            (bc.left, (0..nz).map(|j| mesh.index(0, j)).collect::<Vec<_>>()),
            (bc.right, (0..nz).map(|j| mesh.index(nx - 1, j)).collect()),
            (bc.bottom, (0..nx).map(|i| mesh.index(i, 0)).collect()),
            (bc.top, (0..nx).map(|i| mesh.index(i, nz - 1)).collect()),
        ];
        for (wall_bc, nodes) in walls {
            if let WallBc::Dirichlet(value) = wall_bc {
                for idx in nodes {
                    mesh.dirichlet[idx] = true;
                    mesh.dirichlet_value[idx] = value;
                }
            }
        }
        Ok(mesh)
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.nz
    }

    pub fn n_triangles(&self) -> usize {
        2 * (self.nx - 1) * (self.nz - 1)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.nz);
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.ij(idx);
        (i as f64 * self.hbar, j as f64 * self.hbar)
    }

    pub fn domain_area(&self) -> f64 {
        self.lx * self.lz
    }

    /// Vertex node indices of triangle `t`. Cell (ci, cj) owns triangles 2c
    /// (lower: BL, BR, TR) and 2c+1 (upper: BL, TR, TL), split along BL→TR.
    pub fn triangle(&self, t: usize) -> [usize; 3] {
        let cell = t / 2;
        let ci = cell % (self.nx - 1);
        let cj = cell / (self.nx - 1);
        let bl = self.index(ci, cj);
        let br = self.index(ci + 1, cj);
        let tr = self.index(ci + 1, cj + 1);
        let tl = self.index(ci, cj + 1);
        if t % 2 == 0 {
            [bl, br, tr]
        } else {
            [bl, tr, tl]
        }
    }

    /// Locates (x, z) and returns the three nodal basis values there.
    /// Points within a snap tolerance of a lattice node return that node
    /// exactly (weight 1), so coincident finite-difference/finite-element
    /// grids copy values without interpolation noise.
    pub fn eval_basis(&self, x: f64, z: f64) -> ([usize; 3], [f64; 3]) {
        let locate = |v: f64, cells: usize| -> (usize, f64) {
            let t = v / self.hbar;
            let nearest = t.round();
            if (t - nearest).abs() < SNAP_TOL {
                // On a lattice line: report the node exactly (frac 0, or 1 in
                // the last cell for the far boundary node).
                let k = (nearest.max(0.0) as usize).min(cells);
                return if k == cells { (cells - 1, 1.0) } else { (k, 0.0) };
            }
            let c = (t.floor().max(0.0) as usize).min(cells - 1);
            (c, t - c as f64)
        };
        let (ci, xi) = locate(x, self.nx - 1);
        let (cj, zeta) = locate(z, self.nz - 1);
        let bl = self.index(ci, cj);
        let br = self.index(ci + 1, cj);
        let tr = self.index(ci + 1, cj + 1);
        let tl = self.index(ci, cj + 1);
        if xi >= zeta {
            ([bl, br, tr], [1.0 - xi, xi - zeta, zeta])
        } else {
            ([bl, tr, tl], [1.0 - zeta, xi, zeta - xi])
        }
    }

    /// Evaluates the P1 function with coefficients `u` at (x, z).
    pub fn eval_p1(&self, u: &[f64], x: f64, z: f64) -> f64 {
        let (nodes, weights) = self.eval_basis(x, z);
        nodes.iter().zip(weights).map(|(&n, w)| u[n] * w).sum()
    }

    /// Writes the configured Dirichlet values into `u` (free nodes untouched).
    pub fn apply_dirichlet(&self, u: &mut [f64]) {
        for idx in 0..self.n_nodes() {
            if self.dirichlet[idx] {
                u[idx] = self.dirichlet_value[idx];
            }
        }
    }
}

fn axis_count(extent: f64, h: f64) -> Result<usize> {
    if !(extent > 0.0) || !(h > 0.0) {
        return Err(Error::NonCommensurate { extent, spacing: h });
    }
    let cells = extent / h;
    if (cells - cells.round()).abs() > 1e-12 * cells.max(1.0) || cells.round() < 1.0 {
        return Err(Error::NonCommensurate { extent, spacing: h });
    }
    Ok(cells.round() as usize + 1)
}

/// Exact P1 element matrices for an arbitrary triangle: consistent mass
/// (area/12 · [2 on the diagonal, 1 off]) and stiffness
/// (bᵢbⱼ + cᵢcⱼ)/(4·area) from the edge-vector coefficients.
pub fn element_matrices(p: [(f64, f64); 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let b = [p[1].1 - p[2].1, p[2].1 - p[0].1, p[0].1 - p[1].1];
    let c = [p[2].0 - p[1].0, p[0].0 - p[2].0, p[1].0 - p[0].0];
    let area = 0.5 * (b[0] * c[1] - b[1] * c[0]).abs();
    debug_assert!(area > 0.0);
    let mut mass = [[0.0; 3]; 3];
    let mut stiff = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            mass[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
            stiff[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
        }
    }
    (mass, stiff)
}

fn assemble(mesh: &Mesh, pick: fn(([[f64; 3]; 3], [[f64; 3]; 3])) -> [[f64; 3]; 3]) -> CsrMatrix {
    let mut triplets = Vec::with_capacity(9 * mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let nodes = mesh.triangle(t);
        let coords = nodes.map(|n| mesh.coords(n));
        let local = pick(element_matrices(coords));
        for i in 0..3 {
            for j in 0..3 {
                triplets.push((nodes[i], nodes[j], local[i][j]));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.n_nodes(), &triplets)
}

/// Consistent mass matrix 𝕄ᵢⱼ = ∫ φᵢ φⱼ.
pub fn assemble_mass(mesh: &Mesh) -> CsrMatrix {
    assemble(mesh, |(mass, _)| mass)
}

/// Stiffness matrix 𝕊ᵢⱼ = ∫ ∇φᵢ · ∇φⱼ.
pub fn assemble_stiffness(mesh: &Mesh) -> CsrMatrix {
    assemble(mesh, |(_, stiff)| stiff)
}

/// Row sums of the mass matrix: each node's lumped mass.
pub fn lumped_mass(mass: &CsrMatrix) -> Vec<f64> {
    (0..mass.n()).map(|i| mass.row(i).map(|(_, v)| v).sum()).collect()
}

/// P1 basis values at every finite-difference node, precomputed once.
/// When the grids coincide each entry is a single exact node.
pub struct BasisTable {
    pub entries: Vec<([usize; 3], [f64; 3])>,
}

pub fn basis_at_grid_nodes(mesh: &Mesh, grid: &Grid) -> BasisTable {
    let entries = (0..grid.n_nodes())
        .map(|idx| {
            let (x, z) = grid.coords(idx);
            mesh.eval_basis(x, z)
        })
        .collect();
    BasisTable { entries }
}

/// Relative CG tolerance for the mass system; the mass matrix is uniformly
/// well-conditioned so this is cheap to hit.
pub const W_SOLVE_RTOL: f64 = 1e-10;

/// Solves the mixed constraint 𝕄w = 𝕊u for w.
///
/// The same square SPD system serves every boundary condition: its rows on
/// free nodes are the constrained relation, its rows on pinned nodes the
/// extension that defines w there. Under pure Neumann conditions 𝕊u sums to
/// zero, so ∫w = 0 holds automatically; a final mean projection scrubs the
/// round-off so the invariant is exact to machine precision.
pub fn solve_w(
    mass: &CsrMatrix,
    stiffness: &CsrMatrix,
    u: &[f64],
    pure_neumann: bool,
    warm: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let rhs = stiffness.apply(u);
    let cap = 10 * mass.n();
    let mut w = pcg_jacobi(mass, &rhs, warm, W_SOLVE_RTOL, cap)?.x;
    if pure_neumann {
        let lumped = lumped_mass(mass);
        let area: f64 = lumped.iter().sum();
        let mean = lumped.iter().zip(&w).map(|(m, wi)| m * wi).sum::<f64>() / area;
        for wi in &mut w {
            *wi -= mean;
        }
    }
    Ok(w)
}
