//! Tabulate the one-dimensional interface profile constants across the
//! curvature weight γ: decay/oscillation rates λ₁, λ₂, the half-width δ of
//! the compactly supported transition, its energy P, and the accuracy of the
//! computed half-width. As γ → 0 both δ and P approach π/2, which is the
//! normalization that turns phase-field energy into interface length.

fn main() -> tomo::Result<()> {
    println!(
        "{:>8}  {:>10} {:>10} {:>10} {:>10} {:>12}",
        "gamma", "lambda1", "lambda2", "delta", "P", "residual"
    );
    for gamma in [1.0, 1e-2, 1e-4, 1e-6, 1e-8] {
        let pd = tomo::profile::build(gamma)?;
        println!(
            "{gamma:>8.0e}  {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>12.3e}",
            pd.lambda1,
            pd.lambda2,
            pd.delta,
            pd.p_gamma,
            tomo::profile::delta_residual(&pd)
        );
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    println!("\n π/2 = {half_pi:.6}");

    // A requested interface width of K mesh cells fixes ε = Kħ/(2δ).
    let hbar = 1.0 / 80.0;
    println!("\n ε for an 8-cell interface at ħ = 1/80:");
    for gamma in [1e-2, 1e-4] {
        let eps = tomo::profile::epsilon_for_width(8.0, hbar, gamma)?;
        println!("   γ = {gamma:>5.0e}: ε = {eps:.6}");
    }
    Ok(())
}
