//! Built-in truth slowness fields and source–receiver layouts.
//!
//! A truth field is a binary slowness map: s_max inside a closed region given
//! by explicit inequalities, s_min outside. Each named geometry ships with
//! preset contrast values; both can be overridden. Experiments fix where
//! sources sit, which boundary nodes record arrivals, and which walls carry
//! Dirichlet data for the phase field (walls where the region content is
//! treated as known).

use crate::error::{Error, Result};
use crate::fem::{BcSpec, Mesh};
use crate::grid::{Grid, SegmentSpec, Wall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthName {
    CircularDisk,
    BandedLayers,
    RightAngle,
    ArbitraryShape,
    ShieldedDisk,
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct TruthField {
    pub name: TruthName,
    pub s_min: f64,
    pub s_max: f64,
}

impl TruthField {
    /// The named geometry with its preset contrast.
    pub fn preset(name: TruthName) -> TruthField {
        let (s_min, s_max) = match name {
            TruthName::CircularDisk => (2.0, 4.0),
            TruthName::ShieldedDisk => (1.0, 1.4),
            _ => (1.0, 1.1),
        };
        TruthField { name, s_min, s_max }
    }

    pub fn with_contrast(name: TruthName, s_min: f64, s_max: f64) -> Result<TruthField> {
        if !(s_min > 0.0 && s_max > s_min) {
            return Err(Error::Config(format!(
                "truth contrast requires 0 < s_min < s_max, got s_min={s_min}, s_max={s_max}"
            )));
        }
        Ok(TruthField { name, s_min, s_max })
    }

    /// True inside the s_max region.
    pub fn indicator(&self, x: f64, z: f64) -> bool {
        match self.name {
            TruthName::CircularDisk => sq(x - 0.5) + sq(z - 0.5) <= 0.0625,
            TruthName::BandedLayers => {
                // Two annular bands: sections of circles of radius 2.6/2
                // centered far below the unit square.
                let arc = (sq(2.6) - sq(2.0 * x - 1.0)).sqrt();
                let band = |lo: f64, hi: f64| 0.5 * (lo - arc) <= z && z <= 0.5 * (hi - arc);
                band(3.7, 4.1) || band(2.8, 3.2)
            }
            TruthName::RightAngle => z >= 2.0 / 3.0 * x + 0.4 || z >= -1.5 * x + 0.9,
            TruthName::ArbitraryShape => {
                sq(x - 2.0 / 3.0) + sq(z - 0.5) <= 1.0 / 25.0
                    || sq(x - 7.0 / 15.0) + sq(z - 0.7) <= 1.0 / 36.0
                    || sq(x - 7.0 / 15.0) + sq(z - 0.3) <= 1.0 / 64.0
            }
            TruthName::ShieldedDisk => {
                let core = sq(x - 2.0 / 3.0) + sq(z - 0.5);
                core <= 1.0 / 36.0
                    || (core <= sq(0.375) && sq(x - 4.0 / 9.0) + sq(z - 0.5) >= 0.0625)
            }
        }
    }

    /// Phase value of the truth: +1 inside the region, −1 outside.
    pub fn phase(&self, x: f64, z: f64) -> f64 {
        if self.indicator(x, z) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn value(&self, x: f64, z: f64) -> f64 {
        if self.indicator(x, z) {
            self.s_max
        } else {
            self.s_min
        }
    }

    /// Sharp nodal sampling on a grid (no smoothing across the interface).
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.n_nodes())
            .map(|idx| {
                let (x, z) = grid.coords(idx);
                self.value(x, z)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    FullBoundaryCenter,
    Wells,
    Random,
}

/// Source positions in physical coordinates (snapped to grid nodes at
/// assembly), the receiver set, and the wall conditions for the phase field.
/// Dirichlet wall values here are placeholders: assembly stamps the truth's
/// boundary phase onto every pinned node.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: ExperimentName,
    pub sources: Vec<(f64, f64)>,
    pub receivers: SegmentSpec,
    pub bc: BcSpec,
}

/// Ten fixed interior source positions on the 1/20 lattice, drawn once at
/// random and committed so every run and every grid spacing that divides 1/20
/// sees identical geometry.
pub const RANDOM_SOURCES: [(f64, f64); 10] = [
    (2.0 / 20.0, 16.0 / 20.0),
    (6.0 / 20.0, 14.0 / 20.0),
    (7.0 / 20.0, 14.0 / 20.0),
    (10.0 / 20.0, 11.0 / 20.0),
    (11.0 / 20.0, 3.0 / 20.0),
    (11.0 / 20.0, 18.0 / 20.0),
    (12.0 / 20.0, 2.0 / 20.0),
    (17.0 / 20.0, 6.0 / 20.0),
    (17.0 / 20.0, 8.0 / 20.0),
    (17.0 / 20.0, 16.0 / 20.0),
];

pub fn experiment(name: ExperimentName, lx: f64, lz: f64) -> Experiment {
    match name {
        ExperimentName::FullBoundaryCenter => Experiment {
            name,
            sources: vec![(0.5 * lx, 0.5 * lz)],
            receivers: SegmentSpec::FullBoundary,
            bc: BcSpec::all_dirichlet(-1.0),
        },
        ExperimentName::Wells => Experiment {
            name,
            // Ten sources spread along the left wall at z = i/11 of the
            // height; snapped to the nearest node when the grid is built.
            sources: (1..=10).map(|i| (0.0, i as f64 / 11.0 * lz)).collect(),
            receivers: SegmentSpec::Wall(Wall::Right),
            bc: BcSpec::wells(-1.0),
        },
        ExperimentName::Random => Experiment {
            name,
            sources: RANDOM_SOURCES.iter().map(|&(x, z)| (x * lx, z * lz)).collect(),
            receivers: SegmentSpec::FullBoundary,
            bc: BcSpec::all_dirichlet(-1.0),
        },
    }
}

/// Replaces the placeholder Dirichlet values with the truth's boundary phase,
/// so pinned coefficients state what is actually known there.
pub fn stamp_boundary_data(mesh: &mut Mesh, truth: &TruthField) {
    for idx in 0..mesh.n_nodes() {
        if mesh.dirichlet[idx] {
            let (x, z) = mesh.coords(idx);
            mesh.dirichlet_value[idx] = truth.phase(x, z);
        }
    }
}

/// Fraction of the domain area where `sign(u)` disagrees with the truth
/// phase, measured with the lumped mass (each node weighted by the area of
/// its basis-function hat).
pub fn misclassified_area(mesh: &Mesh, lumped: &[f64], u: &[f64], truth: &TruthField) -> f64 {
    assert_eq!(u.len(), mesh.n_nodes());
    assert_eq!(lumped.len(), mesh.n_nodes());
    let mut wrong = 0.0;
    for idx in 0..mesh.n_nodes() {
        let (x, z) = mesh.coords(idx);
        let inside = u[idx] >= 0.0;
        if inside != (truth.phase(x, z) > 0.0) {
            wrong += lumped[idx];
        }
    }
    wrong / mesh.domain_area()
}

#[inline]
fn sq(v: f64) -> f64 {
    v * v
}
