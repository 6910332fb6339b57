//! The one-dimensional optimal interface profile of the double-obstacle
//! energy with a fourth-order term,
//!
//! ```text
//!   j(z) = ∫ ½γ(z″)² + ½(z′)² + ½(1 − z²) dt,
//! ```
//!
//! minimized over transitions from −1 to +1. The minimizer is compactly
//! supported: z(t) = C₁·sinh(λ₁t) + C₂·sin(λ₂t) on (−δ, δ), clamped to ±1
//! outside, where ±λ₁ and ±iλ₂ are the roots of the characteristic equation
//! γm⁴ − m² − 1 = 0 and the half-width δ is the first root of
//!
//! ```text
//!   λ₂·tan(λ₂δ) = −λ₁·tanh(λ₁δ)       in (π/(2λ₂), π/λ₂),
//! ```
//!
//! which makes the clamped extension C². Two consumers matter downstream:
//! `epsilon_for_width` converts a requested interface width K·ħ into the
//! model's ε = K·ħ/(2δ), and the transition energy P = j(z) converts
//! phase-field energy into interface length (energy ≈ P · perimeter).
//!
//! As γ → 0 the profile degenerates to z = sin(t) with δ → π/2 and P → π/2.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ProfileData {
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Half-width of the transition; support of z′ is (−δ, δ).
    pub delta: f64,
    /// Profile coefficients. Stored for inspection; evaluation uses
    /// overflow-safe ratio forms instead (sinh(λ₁δ) overflows f64 once
    /// λ₁δ ≳ 710, i.e. for γ ≲ 2e-7, and then c1 underflows to zero).
    pub c1: f64,
    pub c2: f64,
    /// Transition energy P = j(z).
    pub p_gamma: f64,
}

/// Characteristic roots: λ₁² and λ₂² are the positive/negative-of-negative
/// roots of γy² − y − 1 = 0. λ₂² is computed in the rationalized form
/// 2/(1 + √(1+4γ)), which is exact where the textbook (√(1+4γ) − 1)/(2γ)
/// cancels catastrophically for small γ.
pub fn lambdas(gamma: f64) -> Result<(f64, f64)> {
    if !(gamma > 0.0) {
        return Err(Error::Config(format!("model.gamma must be > 0, got {gamma}")));
    }
    let root = (1.0 + 4.0 * gamma).sqrt();
    let lambda1 = ((1.0 + root) / (2.0 * gamma)).sqrt();
    let lambda2 = (2.0 / (1.0 + root)).sqrt();
    Ok((lambda1, lambda2))
}

/// First root of the half-width equation, bracketed in (π/(2λ₂), π/λ₂).
///
/// Bisection runs on the cotangent form c(δ) = cot(λ₂δ) + (λ₂/λ₁)·coth(λ₁δ),
/// which decreases monotonically from +(λ₂/λ₁) to −∞ across the bracket and
/// keeps O(1) slope where the raw tan form blows up; two Newton steps then
/// polish to machine precision.
pub fn delta(gamma: f64) -> Result<f64> {
    let (l1, l2) = lambdas(gamma)?;
    let c = |d: f64| 1.0 / (l2 * d).tan() + (l2 / l1) / (l1 * d).tanh();
    let c_prime = |d: f64| {
        let s = (l2 * d).sin();
        let sh = (l1 * d).sinh();
        // sinh overflows for small gamma; its reciprocal is then exactly 0.
        let csch2 = if sh.is_finite() { 1.0 / (sh * sh) } else { 0.0 };
        -l2 * (1.0 / (s * s) + csch2)
    };
    let mut lo = std::f64::consts::FRAC_PI_2 / l2 * (1.0 + 1e-12);
    let mut hi = std::f64::consts::PI / l2 * (1.0 - 1e-12);
    debug_assert!(c(lo) > 0.0 && c(hi) < 0.0, "half-width bracket must straddle the root");
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if c(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut d = 0.5 * (lo + hi);
    for _ in 0..2 {
        let step = c(d) / c_prime(d);
        let next = d - step;
        if next > lo - 1e-13 && next < hi + 1e-13 {
            d = next;
        }
    }
    Ok(d)
}

/// Distance-to-root estimate |f/f′| of the raw equation
/// f(δ) = λ₂tan(λ₂δ) + λ₁tanh(λ₁δ). Near the root f′ ≈ λ₁² + λ₂², so the raw
/// residual of a perfectly rounded double is about (λ₁²+λ₂²)·ulp(δ); the
/// Newton-normalized form reports the achievable quantity, the error in δ
/// itself.
pub fn delta_residual(pd: &ProfileData) -> f64 {
    let (l1, l2, d) = (pd.lambda1, pd.lambda2, pd.delta);
    let tan = (l2 * d).tan();
    let tanh = (l1 * d).tanh();
    let f = l2 * tan + l1 * tanh;
    let f_prime = l2 * l2 * (1.0 + tan * tan) + l1 * l1 * (1.0 - tanh * tanh);
    (f / f_prime).abs()
}

/// z, z′, z″ at t. Analytic inside [−δ, δ] (so the matching defects at ±δ are
/// observable), clamped to (±1, 0, 0) strictly outside.
pub fn profile_eval(pd: &ProfileData, t: f64) -> (f64, f64, f64) {
    if t.abs() > pd.delta {
        return (t.signum(), 0.0, 0.0);
    }
    // Evaluate at |t| and reflect: z odd, z′ even, z″ odd.
    let (l1, l2, d) = (pd.lambda1, pd.lambda2, pd.delta);
    let x = t.abs();
    let denom = l1 * l1 + l2 * l2;
    let q1 = l2 * l2 / denom;
    let q2 = l1 * l1 / denom;
    // sinh(λ₁x)/sinh(λ₁δ) and cosh(λ₁x)/sinh(λ₁δ) without overflow.
    let em = (-2.0 * l1 * x).exp();
    let ed = (-2.0 * l1 * d).exp();
    let scale = (l1 * (x - d)).exp() / (1.0 - ed);
    let sinh_ratio = scale * (1.0 - em);
    let cosh_ratio = scale * (1.0 + em);
    let sin_ratio = (l2 * x).sin() / (l2 * d).sin();
    let cos_ratio = (l2 * x).cos() / (l2 * d).sin();
    let z = q1 * sinh_ratio + q2 * sin_ratio;
    let dz = q1 * l1 * cosh_ratio + q2 * l2 * cos_ratio;
    let ddz = (l1 * l1 * l2 * l2 / denom) * (sinh_ratio - sin_ratio);
    if t >= 0.0 {
        (z, dz, ddz)
    } else {
        (-z, dz, -ddz)
    }
}

/// P = j(z) by adaptive composite Simpson: panels double until two successive
/// values agree to 1e-10. The integrand is even, so integrate 2·(0, δ).
pub fn transition_energy(pd: &ProfileData) -> f64 {
    let integrand = |t: f64| {
        let (z, dz, ddz) = profile_eval(pd, t);
        0.5 * pd.gamma * ddz * ddz + 0.5 * dz * dz + 0.5 * (1.0 - z * z)
    };
    let simpson = |n: usize| {
        let h = pd.delta / n as f64;
        let mut acc = integrand(0.0) + integrand(pd.delta);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * integrand(k as f64 * h);
        }
        2.0 * acc * h / 3.0
    };
    let mut n = 64;
    let mut value = simpson(n);
    loop {
        n *= 2;
        let next = simpson(n);
        let done = (next - value).abs() < 1e-10 || n >= 1 << 22;
        value = next;
        if done {
            return value;
        }
    }
}

/// Builds the full profile record for γ: roots, half-width, coefficients,
/// transition energy.
pub fn build(gamma: f64) -> Result<ProfileData> {
    let (lambda1, lambda2) = lambdas(gamma)?;
    let d = delta(gamma)?;
    let denom = lambda1 * lambda1 + lambda2 * lambda2;
    let c1 = lambda2 * lambda2 / (denom * (lambda1 * d).sinh());
    let c2 = lambda1 * lambda1 / (denom * (lambda2 * d).sin());
    let mut pd = ProfileData { gamma, lambda1, lambda2, delta: d, c1, c2, p_gamma: 0.0 };
    pd.p_gamma = transition_energy(&pd);
    Ok(pd)
}

/// ε producing an interface of width K·ħ (the phase field transitions over
/// 2δ·ε, so ε = K·ħ/(2δ)).
pub fn epsilon_for_width(k: f64, hbar: f64, gamma: f64) -> Result<f64> {
    if !(k >= 1.0) {
        return Err(Error::Config(format!("model.width must be >= 1 grid cell, got {k}")));
    }
    if !(hbar > 0.0) {
        return Err(Error::Config(format!("grid spacing must be > 0, got {hbar}")));
    }
    Ok(k * hbar / (2.0 * delta(gamma)?))
}
