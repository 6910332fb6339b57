//! End-to-end acceptance suite. Each test pins one externally observable
//! promise of the stack — forward accuracy, gradient correctness, interface
//! profile constants, descent invariants, and full recoveries on the disk
//! scenario — at the tolerance the library is expected to hold.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tomo::config::{Resolved, RunConfig};
use tomo::descent::StopReason;
use tomo::grid::Grid;
use tomo::scenario::{TruthField, TruthName};

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn resolved(doc: serde_json::Value) -> Resolved {
    let cfg: RunConfig = serde_json::from_value(doc).expect("config parses");
    cfg.resolve().expect("config resolves")
}

fn observations(r: &Resolved) -> tomo::obs::Observations {
    tomo::obs::generate(
        &r.truth,
        &r.experiment,
        r.grid.lx,
        r.grid.lz,
        r.grid.h,
        r.config.data.refine,
        r.config.data.nu,
        r.config.data.seed,
    )
    .expect("observations generate")
}

/// Shared scenario: circular disk, full-boundary receivers, centre source.
/// Same-resolution data; stationarity tolerance disabled so runs end at the
/// line-search floor (the mass-weighted measure is ~h² smaller than a
/// coefficient-space one, and a mid-run stop would leave the interface
/// half-collapsed).
fn disk_doc() -> serde_json::Value {
    serde_json::json!({
        "scenario": "circular_disk",
        "experiment": "full_boundary_center",
        "grid": { "hbar": 0.0125 },
        "model": { "width": 8.0, "gamma": 1e-2, "sigma": 1e-4 },
        "descent": { "alpha_init": 1e4, "eta": 1e-5, "tol": 1e-30, "max_iter": 20000 },
        "data": { "refine": 1, "nu": 0.0, "seed": 0 }
    })
}

struct RunOutcome {
    misfit: f64,
    /// Misfit plus the perimeter-normalized penalty σ𝒥/P — the figure the
    /// study tables report as the total objective.
    objective: f64,
    perimeter: f64,
    misclassified: f64,
    stop: StopReason,
}

fn run_inversion(doc: serde_json::Value) -> RunOutcome {
    let r = resolved(doc);
    let o = observations(&r);
    let pr = r.problem(&o).expect("problem assembles");
    let res = tomo::descent::run(&pr, r.initial_u(), &r.descent).expect("descent runs");
    let lumped = tomo::fem::lumped_mass(&pr.mass);
    let mis = tomo::scenario::misclassified_area(&pr.mesh, &lumped, &res.u, &r.truth);
    let perim = tomo::phase_field::perimeter_estimate(res.final_eval.j_unscaled, r.p_gamma);
    RunOutcome {
        misfit: res.final_eval.misfit,
        objective: res.final_eval.misfit + res.final_eval.regularizer / r.p_gamma,
        perimeter: perim,
        misclassified: mis,
        stop: res.stop,
    }
}

#[test]
fn uniform_slowness_march_converges_to_exact_distance_at_sqrt_h_rate() {
    let start = Instant::now();
    let mut pts = Vec::new();
    for k in [20usize, 40, 80, 160] {
        let h = 1.0 / k as f64;
        let grid = Grid::build(1.0, 1.0, h, (0.5, 0.5)).unwrap();
        let slowness = vec![1.0; grid.n_nodes()];
        let fmm = tomo::eikonal::solve(&grid, &slowness, grid.source).unwrap();
        let mut err = 0.0f64;
        for idx in 0..grid.n_nodes() {
            let (x, z) = grid.coords(idx);
            err = err.max((fmm.times[idx] - (x - 0.5).hypot(z - 0.5)).abs());
        }
        pts.push((h.ln(), err.ln()));
    }
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let order = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - xm) * (p.0 - xm)).sum::<f64>();
    assert!(
        (0.4..=1.1).contains(&order),
        "fitted convergence order {order:.3} outside [0.4, 1.1]"
    );
    assert!(start.elapsed().as_secs_f64() < 10.0, "refinement sweep too slow");
}

#[test]
fn fast_march_matches_gauss_seidel_fixed_point_on_random_media() {
    let start = Instant::now();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = Grid::build(1.0, 1.0, 1.0 / 6.0, (0.5, 0.5)).unwrap();
        let n = grid.n_nodes();
        let slowness: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
        // Any node can source the march except the four lattice corners,
        // which feed no other node and are rejected by both solvers.
        let source = loop {
            let c = rng.random_range(0..n);
            if !grid.is_corner(c) {
                break c;
            }
        };
        let fmm = tomo::eikonal::solve(&grid, &slowness, source).unwrap();
        let swept = tomo::eikonal::fixed_point_solve(&grid, &slowness, source, 1e-16, 400).unwrap();
        let diff = fmm
            .times
            .iter()
            .zip(&swept)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(diff <= 1e-12, "seed {seed}: march and sweep disagree by {diff:.3e}");
    }
    assert!(start.elapsed().as_secs_f64() < 5.0, "random-media comparison too slow");
}

#[test]
fn adjoint_gradient_matches_finite_differences_through_the_full_pipeline() {
    let start = Instant::now();
    let mut doc = disk_doc();
    doc["grid"]["hbar"] = serde_json::json!(0.025);
    doc["model"]["sigma"] = serde_json::json!(1e-3);
    doc["data"]["refine"] = serde_json::json!(2);
    let r = resolved(doc);
    let o = observations(&r);
    let pr = r.problem(&o).expect("problem assembles");
    let n = pr.mesh.n_nodes();

    // Smooth random field from a few Fourier modes, scaled inside the box and
    // stamped with the boundary data so it is a feasible iterate.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let amps: Vec<f64> = (0..9).map(|_| rng.random_range(-0.25..0.25)).collect();
    let mut u = vec![0.0; n];
    for idx in 0..n {
        let (x, z) = pr.mesh.coords(idx);
        for m in 0..3 {
            for l in 0..3 {
                u[idx] += amps[3 * m + l]
                    * ((m + 1) as f64 * PI * x).sin()
                    * ((l + 1) as f64 * PI * z).sin();
            }
        }
    }
    let peak = u.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    u.iter_mut().for_each(|v| *v *= 0.8 / peak);
    pr.mesh.apply_dirichlet(&mut u);

    let w = tomo::phase_field::solve_w_for(&pr, &u, None).unwrap();
    let st = tomo::phase_field::evaluate(&pr, &u, &w).unwrap();
    let g = tomo::phase_field::gradient(&pr, &u, &w, &st).unwrap();

    let objective = |u_pert: &[f64]| -> f64 {
        let w_pert = tomo::phase_field::solve_w_for(&pr, u_pert, Some(&w)).unwrap();
        tomo::phase_field::evaluate(&pr, u_pert, &w_pert).unwrap().eval.objective
    };

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut probes = std::collections::BTreeSet::new();
    while probes.len() < 50 {
        let i = rng.random_range(1..pr.mesh.nx - 1);
        let j = rng.random_range(1..pr.mesh.nz - 1);
        probes.insert(pr.mesh.index(i, j));
    }
    let step = 1e-5;
    let mut ok = 0usize;
    for &m in &probes {
        let mut up = u.clone();
        up[m] += step;
        let plus = objective(&up);
        up[m] = u[m] - step;
        let minus = objective(&up);
        let fd = (plus - minus) / (2.0 * step);
        let rel = (g[m] - fd).abs() / fd.abs().max(1e-12);
        if rel <= 1e-4 {
            ok += 1;
        }
    }
    assert!(ok >= 48, "only {ok}/50 probes matched finite differences to 1e-4");
    assert!(start.elapsed().as_secs_f64() < 120.0, "gradient check too slow");
}

#[test]
fn profile_half_width_and_energy_approach_pi_over_two_for_small_gamma() {
    let start = Instant::now();
    let pd = tomo::profile::build(1e-8).unwrap();
    assert!(
        (pd.delta - PI / 2.0).abs() <= 1e-3,
        "half-width {} away from π/2",
        pd.delta
    );
    assert!(
        (pd.p_gamma - PI / 2.0).abs() <= 1e-3,
        "transition energy {} away from π/2",
        pd.p_gamma
    );
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn profile_root_is_machine_accurate_and_the_clamp_is_c2() {
    let start = Instant::now();
    for gamma in [1e-6, 1e-4, 1e-2, 1.0] {
        let pd = tomo::profile::build(gamma).unwrap();
        let residual = tomo::profile::delta_residual(&pd);
        assert!(residual <= 1e-12, "gamma={gamma}: half-width residual {residual:.3e}");
        for sign in [1.0, -1.0] {
            let (z, dz, ddz) = tomo::profile::profile_eval(&pd, sign * pd.delta);
            assert!((z - sign).abs() <= 1e-9, "gamma={gamma}: value gap {:.3e}", z - sign);
            assert!(dz.abs() <= 1e-9, "gamma={gamma}: slope gap {dz:.3e}");
            assert!(ddz.abs() <= 1e-9, "gamma={gamma}: curvature gap {ddz:.3e}");
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn iterates_stay_in_the_box_and_satisfy_the_mixed_constraint() {
    let mut doc = disk_doc();
    doc["descent"]["max_iter"] = serde_json::json!(200);
    let r = resolved(doc);
    let o = observations(&r);
    let pr = r.problem(&o).expect("problem assembles");
    let mut seen = 0usize;
    let res = tomo::descent::run_with_observer(&pr, r.initial_u(), &r.descent, |_, u, w| {
        seen += 1;
        assert!(u.iter().all(|v| (-1.0..=1.0).contains(v)), "iterate left [−1,1]");
        let su = pr.stiffness.apply(u);
        let mw = pr.mass.apply(w);
        let gap: Vec<f64> = mw.iter().zip(&su).map(|(a, b)| a - b).collect();
        let bound = 1e-10 * l2(&su).max(1.0);
        assert!(
            l2(&gap) <= bound,
            "constraint residual {:.3e} above {:.3e}",
            l2(&gap),
            bound
        );
    })
    .expect("descent runs");
    assert_eq!(seen, 200, "observer saw {seen} accepted iterations");
    assert!(matches!(res.stop, StopReason::IterationCap));
    assert!(res.u.iter().all(|v| (-1.0..=1.0).contains(v)));
}

#[test]
fn every_accepted_step_passes_the_sufficient_decrease_test() {
    let mut doc = disk_doc();
    doc["grid"]["hbar"] = serde_json::json!(0.025);
    doc["descent"]["max_iter"] = serde_json::json!(150);
    let r = resolved(doc);
    let o = observations(&r);
    let pr = r.problem(&o).expect("problem assembles");

    // Reproduce the initial state the driver builds so the first step can be
    // checked against it too.
    let mut prev_u = r.initial_u();
    pr.mesh.apply_dirichlet(&mut prev_u);
    let w0 = tomo::phase_field::solve_w_for(&pr, &prev_u, None).unwrap();
    let mut prev_obj = tomo::phase_field::evaluate(&pr, &prev_u, &w0).unwrap().eval.objective;

    let eta = r.descent.eta;
    let res = tomo::descent::run_with_observer(&pr, r.initial_u(), &r.descent, |rec, u, _| {
        let du: Vec<f64> = u.iter().zip(&prev_u).map(|(a, b)| a - b).collect();
        let du_norm2 = pr.mass.quadratic_form(&du, &du);
        let decrease = rec.objective - prev_obj;
        assert!(
            decrease < -eta / (rec.alpha * rec.alpha) * du_norm2,
            "step {} fails the decrease test: {decrease:.6e} vs {:.6e}",
            rec.k,
            -eta / (rec.alpha * rec.alpha) * du_norm2
        );
        assert!(rec.objective < prev_obj, "objective rose at step {}", rec.k);
        prev_u.copy_from_slice(u);
        prev_obj = rec.objective;
    })
    .expect("descent runs");
    assert!(!res.history.is_empty());
    for pair in res.history.windows(2) {
        assert!(pair[1].objective < pair[0].objective, "history not strictly decreasing");
    }
}

#[test]
fn noiseless_disk_inversion_recovers_shape_and_perimeter_at_desk_scale() {
    let start = Instant::now();
    let out = run_inversion(disk_doc());
    assert!(
        out.misclassified <= 0.03,
        "misclassified area fraction {:.4} above 3%",
        out.misclassified
    );
    assert!(
        (out.perimeter - PI / 2.0).abs() <= 1e-2,
        "perimeter estimate {:.6} off π/2 by {:.3e}",
        out.perimeter,
        (out.perimeter - PI / 2.0).abs()
    );
    // The run ends at the line-search floor, not the stationarity test.
    assert!(matches!(out.stop, StopReason::Stall | StopReason::Converged));
    assert!(start.elapsed().as_secs_f64() < 900.0, "recovery exceeded its time budget");
}

#[test]
fn widening_the_interface_lowers_misfit_then_the_objective_plateaus() {
    let mut outcomes = Vec::new();
    for width in [4.0, 6.0, 8.0, 10.0, 12.0, 14.0] {
        let mut doc = disk_doc();
        doc["model"]["gamma"] = serde_json::json!(1e-4);
        doc["model"]["width"] = serde_json::json!(width);
        doc["descent"]["max_iter"] = serde_json::json!(40000);
        outcomes.push(run_inversion(doc));
    }
    assert!(
        outcomes[0].misfit >= outcomes[1].misfit && outcomes[1].misfit >= outcomes[2].misfit,
        "misfit not non-increasing over the narrow widths: {:.3e} {:.3e} {:.3e}",
        outcomes[0].misfit,
        outcomes[1].misfit,
        outcomes[2].misfit
    );
    let wide: Vec<f64> = outcomes[2..].iter().map(|o| o.objective).collect();
    let lo = wide.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = wide.iter().cloned().fold(0.0f64, f64::max);
    assert!(
        (hi - lo) / lo < 0.05,
        "objective varies {:.2}% across the wide interfaces",
        100.0 * (hi - lo) / lo
    );
}

#[test]
fn noisy_observations_still_recover_the_disk_perimeter() {
    for seed in [0u64, 1, 2] {
        let mut doc = disk_doc();
        doc["model"]["sigma"] = serde_json::json!(1e-3);
        doc["model"]["nu"] = serde_json::json!(1e-2);
        doc["data"]["nu"] = serde_json::json!(1e-2);
        doc["data"]["seed"] = serde_json::json!(seed);
        let out = run_inversion(doc);
        assert!(
            (out.perimeter - PI / 2.0).abs() <= 1e-2,
            "seed {seed}: perimeter {:.6} off π/2 by {:.3e}",
            out.perimeter,
            (out.perimeter - PI / 2.0).abs()
        );
    }
}

#[test]
fn strong_shielding_moves_the_latest_arrival_into_the_interior() {
    // Needs a fine march: the one-sided wall update overshoots by h·s, which
    // masks the interior shadow ridge (a ~2.7e-3 gap) on grids coarser than
    // about 1/960. The flip is stable from there on.
    let grid = Grid::build(1.0, 1.0, 1.0 / 1280.0, (0.0, 0.5)).unwrap();
    let source = grid.source;
    for (s_max, expect_interior) in [(2.6, true), (1.4, false)] {
        let truth = TruthField::with_contrast(TruthName::ShieldedDisk, 1.0, s_max).unwrap();
        let slowness = truth.sample(&grid);
        let (_, _, on_boundary) =
            tomo::cli::latest_arrival(&grid, &slowness, source).unwrap();
        assert_eq!(
            on_boundary, !expect_interior,
            "contrast with s_max={s_max}: latest arrival on_boundary={on_boundary}"
        );
    }
}
