//! Binary slowness recovery from first-arrival traveltimes.
//!
//! The forward model is the eikonal equation |∇T| = s on a rectangle: a point
//! source emits a wavefront whose first-arrival time is observed at boundary
//! receivers. The inverse problem looks for a two-valued slowness map
//! s ∈ {s_min, s_max} explaining the observations. A phase field u ∈ [−1, 1]
//! stands in for the indicator of the s_max region; its double-obstacle
//! interfacial energy (in a mixed finite-element form that avoids C¹
//! elements) penalizes interface length, and a projected descent scheme with
//! adjoint-state gradients minimizes misfit plus regularizer.
//!
//! Modules, in pipeline order:
//! - [`grid`]: finite-difference lattice, node classification, receiver paths;
//! - [`eikonal`]: upwind discretization, fast-marching and sweeping solvers;
//! - [`adjoint`]: misfit, reverse-order adjoint transport, misfit gradient;
//! - [`sparse`]: CSR matrices and Jacobi-preconditioned conjugate gradients;
//! - [`fem`]: structured P1 triangulation, mass/stiffness assembly, the
//!   mixed constraint 𝕄w = 𝕊u;
//! - [`profile`]: the 1-D optimal interface profile linking interface width,
//!   ε, and the energy-to-perimeter conversion factor;
//! - [`phase_field`]: objective, regularizer, full gradient, perimeter
//!   estimate;
//! - [`descent`]: projected gradient descent with backtracking;
//! - [`scenario`]: built-in truth geometries and source–receiver layouts;
//! - [`obs`]: synthetic observation generation on a refined grid with noise;
//! - [`config`], [`io`], [`cli`]: batch-driver plumbing.

pub mod adjoint;
pub mod cli;
pub mod config;
pub mod descent;
pub mod eikonal;
pub mod error;
pub mod fem;
pub mod grid;
pub mod io;
pub mod obs;
pub mod phase_field;
pub mod profile;
pub mod scenario;
pub mod sparse;

pub use error::{Error, Result};
