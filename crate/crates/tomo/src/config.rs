//! Run configuration: one JSON document shared by every subcommand, plus
//! dotted-path overrides and resolution into ready-to-use objects.
//!
//! Unknown keys are rejected — a typo silently reverting a parameter to its
//! default is the main hazard in long parameter studies. The weight actually
//! multiplying the interface energy may differ from `model.sigma`: with
//! `sigma_over_nu2` (default) it is σ̄/ν², tying regularization strength to
//! data confidence, and `sigma_contrast_rescale` multiplies by
//! 2/(s_max − s_min) to balance against the misfit's contrast sensitivity.
//! For noiseless data, leave ν = 1 so both the misfit weight and σ are taken
//! at face value.

use crate::descent::DescentConfig;
use crate::error::{Error, Result};
use crate::fem::Mesh;
use crate::grid::{Grid, ReceiverSegment};
use crate::phase_field::ModelParams;
use crate::profile;
use crate::scenario::{self, Experiment, ExperimentName, TruthField, TruthName};
use std::path::Path;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    /// Named truth with its preset contrast. Exactly one of `scenario` or
    /// `truth` must be present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<TruthName>,
    /// Truth with explicit contrast values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<TruthSection>,
    pub experiment: ExperimentName,
    /// Explicit source for single-source commands, overriding the
    /// experiment's source list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<(f64, f64)>,
    pub grid: GridSection,
    pub model: ModelSection,
    #[serde(default)]
    pub descent: DescentSection,
    #[serde(default)]
    pub data: DataSection,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthSection {
    pub name: TruthName,
    pub s_min: f64,
    pub s_max: f64,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_extent")]
    pub lx: f64,
    #[serde(default = "default_extent")]
    pub lz: f64,
    /// Finite-element spacing ħ.
    pub hbar: f64,
    /// Finite-difference spacing; defaults to ħ and must divide it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Interface scale. Exactly one of `epsilon` or `width` must be present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Interface width in units of ħ; converts to ε = width·ħ/(2δ).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    pub gamma: f64,
    pub sigma: f64,
    /// Noise scale weighting the misfit; 1 means unweighted.
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_true")]
    pub sigma_over_nu2: bool,
    #[serde(default)]
    pub sigma_contrast_rescale: bool,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(default)]
pub struct DescentSection {
    pub alpha_init: f64,
    pub eta: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DescentSection {
    fn default() -> Self {
        let d = DescentConfig::default();
        DescentSection { alpha_init: d.alpha_init, eta: d.eta, tol: d.tol, max_iter: d.max_iter }
    }
}

/// Synthetic-data generation parameters.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(default)]
pub struct DataSection {
    /// Fine-grid refinement for forward solves.
    pub refine: u32,
    /// Noise std added to generated observations (0 = noiseless).
    pub nu: f64,
    pub seed: u64,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection { refine: 8, nu: 0.0, seed: 0 }
    }
}

fn default_version() -> u32 {
    1
}
fn default_extent() -> f64 {
    1.0
}
fn default_nu() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}

/// Everything a subcommand needs, derived once from the validated config.
pub struct Resolved {
    pub config: RunConfig,
    pub truth: TruthField,
    pub experiment: Experiment,
    pub grid: Grid,
    pub mesh: Mesh,
    pub seg: ReceiverSegment,
    /// Snapped source nodes on `grid`, one per experiment source.
    pub sources: Vec<usize>,
    pub params: ModelParams,
    pub descent: DescentConfig,
    /// Profile half-width δ at `model.gamma`.
    pub delta: f64,
    /// Transition energy P of the 1-D profile at `model.gamma`.
    pub p_gamma: f64,
}

/// Applies one `key=value` override onto the raw JSON document. Keys are
/// dotted paths (`model.gamma`); values parse as JSON first, falling back to
/// a plain string (so `--set scenario=circular_disk` needs no quoting).
pub fn apply_override(doc: &mut serde_json::Value, key: &str, raw: &str) -> Result<()> {
    let parsed: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut slot = doc;
    for part in key.split('.') {
        if !slot.is_object() {
            return Err(Error::Config(format!(
                "override `{key}`: `{part}` does not address an object"
            )));
        }
        slot = slot
            .as_object_mut()
            .unwrap()
            .entry(part.to_string())
            .or_insert(serde_json::Value::Object(Default::default()));
    }
    *slot = parsed;
    Ok(())
}

/// Reads a config file and applies `key=value` overrides in order.
pub fn load(path: &Path, sets: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    let mut doc: serde_json::Value = serde_json::from_str(&text)?;
    for set in sets {
        let (key, raw) = set
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{set}` is not of the form key=value")))?;
        apply_override(&mut doc, key.trim(), raw.trim())?;
    }
    Ok(serde_json::from_value(doc)?)
}

impl RunConfig {
    /// The truth field after combining preset/explicit forms.
    pub fn truth_field(&self) -> Result<TruthField> {
        match (&self.scenario, &self.truth) {
            (Some(name), None) => Ok(TruthField::preset(*name)),
            (None, Some(t)) => TruthField::with_contrast(t.name, t.s_min, t.s_max),
            (Some(_), Some(_)) => Err(Error::Config(
                "scenario/truth: give exactly one of `scenario` or `truth`, not both".into(),
            )),
            (None, None) => Err(Error::Config(
                "scenario/truth: one of `scenario` or `truth` is required".into(),
            )),
        }
    }

    fn validated_h(&self) -> Result<f64> {
        let hbar = self.grid.hbar;
        if !(hbar > 0.0) {
            return Err(Error::Config(format!("grid.hbar must be > 0, got {hbar}")));
        }
        let h = self.grid.h.unwrap_or(hbar);
        if !(h > 0.0) {
            return Err(Error::Config(format!("grid.h must be > 0, got {h}")));
        }
        let ratio = hbar / h;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 - 1e-9 {
            return Err(Error::Config(format!(
                "grid.h: the difference spacing ({h}) must divide the element spacing ({hbar})"
            )));
        }
        Ok(h)
    }

    /// ε from whichever of `epsilon`/`width` is present.
    pub fn resolve_epsilon(&self) -> Result<f64> {
        match (self.model.epsilon, self.model.width) {
            (Some(e), None) => {
                if !(e > 0.0) {
                    return Err(Error::Config(format!("model.epsilon must be > 0, got {e}")));
                }
                Ok(e)
            }
            (None, Some(k)) => profile::epsilon_for_width(k, self.grid.hbar, self.model.gamma),
            (Some(_), Some(_)) => Err(Error::Config(
                "model.epsilon/model.width: give exactly one, not both".into(),
            )),
            (None, None) => Err(Error::Config(
                "model.epsilon/model.width: one of the two is required".into(),
            )),
        }
    }

    /// The σ that actually multiplies the interface energy.
    pub fn effective_sigma(&self, truth: &TruthField) -> Result<f64> {
        let m = &self.model;
        if !(m.sigma >= 0.0) {
            return Err(Error::Config(format!("model.sigma must be >= 0, got {}", m.sigma)));
        }
        if !(m.nu > 0.0) {
            return Err(Error::Config(format!("model.nu must be > 0, got {}", m.nu)));
        }
        let mut sigma = m.sigma;
        if m.sigma_over_nu2 {
            sigma /= m.nu * m.nu;
        }
        if m.sigma_contrast_rescale {
            sigma *= 2.0 / (truth.s_max - truth.s_min);
        }
        Ok(sigma)
    }

    pub fn resolve(self) -> Result<Resolved> {
        if self.version != 1 {
            return Err(Error::Config(format!("version: unsupported config version {}", self.version)));
        }
        let truth = self.truth_field()?;
        let h = self.validated_h()?;
        if !(self.model.gamma > 0.0) {
            return Err(Error::Config(format!("model.gamma must be > 0, got {}", self.model.gamma)));
        }
        let epsilon = self.resolve_epsilon()?;
        let sigma = self.effective_sigma(&truth)?;
        let delta = profile::delta(self.model.gamma)?;
        let p_gamma = profile::build(self.model.gamma)?.p_gamma;

        let experiment = scenario::experiment(self.experiment, self.grid.lx, self.grid.lz);
        let mut grid = Grid::build(self.grid.lx, self.grid.lz, h, (0.0, 0.0))?;
        let sources: Vec<usize> =
            experiment.sources.iter().map(|&(x, z)| grid.nearest_node(x, z)).collect();
        grid.source = sources[0];
        let seg = grid.receiver_segment(experiment.receivers);

        let mut mesh = Mesh::structured(self.grid.lx, self.grid.lz, self.grid.hbar, experiment.bc)?;
        scenario::stamp_boundary_data(&mut mesh, &truth);

        let params = ModelParams {
            s_min: truth.s_min,
            s_max: truth.s_max,
            epsilon,
            gamma: self.model.gamma,
            sigma,
            nu: self.model.nu,
        };
        let descent = DescentConfig {
            alpha_init: self.descent.alpha_init,
            eta: self.descent.eta,
            tol: self.descent.tol,
            max_iter: self.descent.max_iter,
        };
        if !(descent.alpha_init > 0.0 && descent.eta > 0.0 && descent.tol > 0.0) {
            return Err(Error::Config(
                "descent.alpha_init/eta/tol must all be > 0".into(),
            ));
        }
        Ok(Resolved {
            config: self,
            truth,
            experiment,
            grid,
            mesh,
            seg,
            sources,
            params,
            descent,
            delta,
            p_gamma,
        })
    }
}

impl Resolved {
    /// The single source for forward-style commands: the explicit `source`
    /// field if given, otherwise the experiment's sole source.
    pub fn single_source(&self) -> Result<usize> {
        if let Some((x, z)) = self.config.source {
            return Ok(self.grid.nearest_node(x, z));
        }
        match self.sources.as_slice() {
            [one] => Ok(*one),
            many => Err(Error::Config(format!(
                "source: this command needs exactly one source but the experiment has {}; set `source` explicitly",
                many.len()
            ))),
        }
    }

    /// Builds the inversion problem from loaded observations.
    pub fn problem(&self, observations: &crate::obs::Observations) -> Result<crate::phase_field::InverseProblem> {
        let (sources, observed) = observations.align(&self.grid, &self.seg)?;
        Ok(crate::phase_field::InverseProblem::assemble(
            self.grid.clone(),
            self.mesh.clone(),
            self.seg.clone(),
            sources,
            observed,
            self.params.clone(),
        ))
    }

    /// The all-background initial iterate u ≡ −1; boundary data is stamped
    /// by the descent loop before the first evaluation.
    pub fn initial_u(&self) -> Vec<f64> {
        vec![-1.0; self.mesh.n_nodes()]
    }

    /// Resolved provenance block for summaries: the config as given plus
    /// every derived quantity a reader needs to re-create the run.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "derived": {
                "truth": self.truth,
                "h": self.grid.h,
                "epsilon": self.params.epsilon,
                "delta": self.delta,
                "p_gamma": self.p_gamma,
                "sigma_effective": self.params.sigma,
                "sources": self.sources.iter().map(|&s| self.grid.coords(s)).collect::<Vec<_>>(),
                "n_receivers": self.seg.nodes.len(),
            },
        })
    }
}
