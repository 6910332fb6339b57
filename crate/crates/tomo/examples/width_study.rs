//! Sweep the interface width (in mesh cells) on a small disk recovery and
//! tabulate the study figures: data misfit, perimeter-normalized penalty,
//! total objective, and the perimeter estimate. Once the transition spans a
//! few cells the recovered shape and total objective barely move — the width
//! mostly sets how smeared the binary jump is.

use tomo::config::RunConfig;

fn run(width: f64) -> tomo::Result<(f64, f64, f64, f64)> {
    let doc = serde_json::json!({
        "scenario": "circular_disk",
        "experiment": "full_boundary_center",
        "grid": { "hbar": 0.025 },
        "model": { "width": width, "gamma": 1e-2, "sigma": 1e-4 },
        "descent": { "alpha_init": 1e4, "eta": 1e-5, "tol": 1e-30, "max_iter": 6000 },
        "data": { "refine": 1, "nu": 0.0, "seed": 0 }
    });
    let cfg: RunConfig = serde_json::from_value(doc).map_err(tomo::Error::from)?;
    let r = cfg.resolve()?;
    let obs = tomo::obs::generate(
        &r.truth, &r.experiment, r.grid.lx, r.grid.lz, r.grid.h,
        r.config.data.refine, r.config.data.nu, r.config.data.seed,
    )?;
    let pr = r.problem(&obs)?;
    let res = tomo::descent::run(&pr, r.initial_u(), &r.descent)?;
    let penalty = res.final_eval.regularizer / r.p_gamma;
    let perim = tomo::phase_field::perimeter_estimate(res.final_eval.j_unscaled, r.p_gamma);
    Ok((res.final_eval.misfit, penalty, res.final_eval.misfit + penalty, perim))
}

fn main() -> tomo::Result<()> {
    println!(
        "{:>5} {:>14} {:>14} {:>14} {:>12}",
        "width", "misfit", "penalty", "objective", "perimeter"
    );
    for width in [6.0, 8.0, 10.0, 12.0] {
        let (misfit, penalty, objective, perim) = run(width)?;
        println!("{width:>5} {misfit:>14.6e} {penalty:>14.6e} {objective:>14.6e} {perim:>12.6}");
    }
    println!("\n π/2 = {:.6}", std::f64::consts::FRAC_PI_2);
    Ok(())
}
