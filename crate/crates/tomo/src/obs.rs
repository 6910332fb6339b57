//! Synthetic observations: forward solves of a truth field on a refined grid,
//! read at the coarse receiver nodes, with optional Gaussian noise.
//!
//! Generating data on a finer grid than the inversion uses (default 8×) keeps
//! the discretization errors of the two solves distinct, so the inversion
//! cannot trivially reproduce its own forward operator's bias. The noise
//! stream is keyed by (seed, source index, receiver index): every receiver
//! draws from its own counter-mode stream, so results are independent of
//! evaluation order and bitwise reproducible.

use crate::eikonal;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scenario::{Experiment, TruthField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::path::Path;

/// Arrival times for one source, aligned with `receivers`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SourceObs {
    /// Source position (a coarse-grid node).
    pub source: (f64, f64),
    /// Receiver positions (coarse-grid boundary nodes).
    pub receivers: Vec<(f64, f64)>,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Observations {
    pub version: u32,
    /// Domain extents and the coarse spacing the receivers live on.
    pub lx: f64,
    pub lz: f64,
    pub h: f64,
    /// Fine-grid refinement factor used for the forward solves.
    pub refine: u32,
    /// Noise standard deviation added to each time.
    pub nu: f64,
    pub seed: u64,
    pub sources: Vec<SourceObs>,
}

/// One noise draw for receiver `ri` of source `si`.
fn noise_draw(seed: u64, si: usize, ri: usize, nu: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((si as u64) << 32) | ri as u64);
    let n: f64 = StandardNormal.sample(&mut rng);
    nu * n
}

/// Generates observations for every source of the experiment.
pub fn generate(
    truth: &TruthField,
    exp: &Experiment,
    lx: f64,
    lz: f64,
    h: f64,
    refine: u32,
    nu: f64,
    seed: u64,
) -> Result<Observations> {
    if refine < 1 {
        return Err(Error::Config(format!("data.refine must be >= 1, got {refine}")));
    }
    if !(nu >= 0.0) {
        return Err(Error::Config(format!("data.nu must be >= 0, got {nu}")));
    }
    let coarse = Grid::build(lx, lz, h, (0.0, 0.0))?;
    let hf = h / refine as f64;
    let fine = Grid::build(lx, lz, hf, (0.0, 0.0))?;
    let truth_fine = truth.sample(&fine);
    let seg = coarse.receiver_segment(exp.receivers);

    // Coarse node (i, j) sits at fine node (i·refine, j·refine) exactly.
    let to_fine = |coarse_idx: usize| {
        let (i, j) = coarse.ij(coarse_idx);
        fine.index(i * refine as usize, j * refine as usize)
    };
    let receiver_coords: Vec<(f64, f64)> = seg.nodes.iter().map(|&r| coarse.coords(r)).collect();
    let fine_receivers: Vec<usize> = seg.nodes.iter().map(|&r| to_fine(r)).collect();

    let sources = std::thread::scope(|scope| -> Result<Vec<SourceObs>> {
        let handles: Vec<_> = exp
            .sources
            .iter()
            .enumerate()
            .map(|(si, &(sx, sz))| {
                let (coarse, fine, truth_fine) = (&coarse, &fine, &truth_fine);
                let (receiver_coords, fine_receivers) = (&receiver_coords, &fine_receivers);
                scope.spawn(move || -> Result<SourceObs> {
                    let snapped = coarse.nearest_node(sx, sz);
                    let fmm = eikonal::solve(fine, truth_fine, to_fine(snapped))?;
                    let times = fine_receivers
                        .iter()
                        .enumerate()
                        .map(|(ri, &fr)| {
                            let t = fmm.times[fr];
                            if nu > 0.0 {
                                t + noise_draw(seed, si, ri, nu)
                            } else {
                                t
                            }
                        })
                        .collect();
                    Ok(SourceObs {
                        source: coarse.coords(snapped),
                        receivers: receiver_coords.clone(),
                        times,
                    })
                })
            })
            .collect();
        handles.into_iter().map(|handle| handle.join().expect("worker panicked")).collect()
    })?;

    Ok(Observations { version: 1, lx, lz, h, refine, nu, seed, sources })
}

impl Observations {
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::file(path, e))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Observations> {
        let file = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
        let obs: Observations = serde_json::from_reader(std::io::BufReader::new(file))?;
        if obs.version != 1 {
            return Err(Error::Incompatible(format!(
                "unsupported observations version {}",
                obs.version
            )));
        }
        Ok(obs)
    }

    /// Source node indices and per-source times aligned with `seg`, after
    /// checking the file actually matches the inversion layout.
    pub fn align(
        &self,
        grid: &Grid,
        seg: &crate::grid::ReceiverSegment,
    ) -> Result<(Vec<usize>, Vec<Vec<f64>>)> {
        let tol = 1e-9 * self.lx.max(self.lz);
        if (grid.lx - self.lx).abs() > tol
            || (grid.lz - self.lz).abs() > tol
            || (grid.h - self.h).abs() > tol
        {
            return Err(Error::Incompatible(format!(
                "observations were generated for a {}x{} domain at h={}, inversion grid has {}x{} at h={}",
                self.lx, self.lz, self.h, grid.lx, grid.lz, grid.h
            )));
        }
        let mut sources = Vec::with_capacity(self.sources.len());
        let mut times = Vec::with_capacity(self.sources.len());
        for (si, so) in self.sources.iter().enumerate() {
            if so.receivers.len() != seg.nodes.len() || so.times.len() != seg.nodes.len() {
                return Err(Error::Incompatible(format!(
                    "source {si}: {} receivers in file, inversion expects {}",
                    so.receivers.len(),
                    seg.nodes.len()
                )));
            }
            for (&(rx, rz), &node) in so.receivers.iter().zip(&seg.nodes) {
                let (nx, nz) = grid.coords(node);
                if (rx - nx).abs() > tol || (rz - nz).abs() > tol {
                    return Err(Error::Incompatible(format!(
                        "source {si}: receiver at ({rx}, {rz}) does not match inversion receiver at ({nx}, {nz})"
                    )));
                }
            }
            sources.push(grid.node_at(so.source.0, so.source.1)?);
            times.push(so.times.clone());
        }
        Ok((sources, times))
    }
}
