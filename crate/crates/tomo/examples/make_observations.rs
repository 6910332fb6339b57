//! Generate synthetic traveltime observations for the cross-well layout:
//! sources down the left wall, receivers along the right wall, banded-layer
//! medium. Data is computed on a refine-×4 fine grid with Gaussian noise and
//! saved to a JSON file that `invert` can consume.

use tomo::scenario::{experiment, ExperimentName, TruthField, TruthName};

fn main() -> tomo::Result<()> {
    let (lx, lz, h) = (1.0, 1.0, 1.0 / 40.0);
    let truth = TruthField::preset(TruthName::BandedLayers);
    let exp = experiment(ExperimentName::Wells, lx, lz);
    let obs = tomo::obs::generate(&truth, &exp, lx, lz, h, 4, 1e-3, 7)?;

    println!(
        "{} sources × {} receivers, fine step {} (refine ×{}), noise std {:.0e}",
        obs.sources.len(),
        obs.sources[0].times.len(),
        obs.h / obs.refine as f64,
        obs.refine,
        obs.nu
    );
    for s in obs.sources.iter().step_by(3) {
        let t_min = s.times.iter().cloned().fold(f64::INFINITY, f64::min);
        let t_max = s.times.iter().cloned().fold(0.0f64, f64::max);
        println!(
            "  source ({:.3}, {:.3}): first arrival {t_min:.4}, last {t_max:.4}",
            s.source.0, s.source.1
        );
    }

    let dir = std::env::temp_dir().join("tomo-make-observations");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("obs.json");
    obs.save(&path)?;
    println!("\nsaved {}", path.display());
    Ok(())
}
