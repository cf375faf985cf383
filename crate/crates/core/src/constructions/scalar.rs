//! Closed-form scalar functions attached to the extremal constructions.

use crate::error::{GeomError, Result};

const EDGE: f64 = 1e-12;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(GeomError::DomainError(what()))
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    check(n >= 2 && k >= 1 && k < n, || format!("need 1 <= k < n, got n={n}, k={k}"))
}

/// Asymmetry at which the ball-of-faces bound takes over:
/// `2(n+1)/(k+1) - 1`.
pub fn s_threshold(n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    Ok(2.0 * (n + 1) as f64 / (k + 1) as f64 - 1.0)
}

fn check_planar_s(s: f64) -> Result<()> {
    check((1.0 - EDGE..=2.0 + EDGE).contains(&s), || format!("s must lie in [1, 2], got {s}"))
}

fn planar_root(s: f64) -> f64 {
    (4.0 * (2.0 - s).powi(2) + (s * s - 1.0).powi(2)).sqrt()
}

/// Sharp planar diameter bound for John asymmetry `s ∈ [1, 2]`.
pub fn d_s(s: f64) -> Result<f64> {
    check_planar_s(s)?;
    Ok((s * s + 5.0 + planar_root(s)).sqrt())
}

/// Maximizer of `f_s` on `(s, √(2s)]`, equal to `√(D_s²/2 - 2)`.
pub fn xi_star(s: f64) -> Result<f64> {
    check_planar_s(s)?;
    Ok(((s * s + 1.0 + planar_root(s)) / 2.0).sqrt())
}

/// `ξ² + (2 - s)²/(ξ² - s²)` for `ξ > s`.
pub fn f_s(s: f64, xi: f64) -> Result<f64> {
    check_planar_s(s)?;
    check(xi > s, || format!("f_s needs xi > s, got xi={xi}, s={s}"))?;
    Ok(xi * xi + (2.0 - s).powi(2) / (xi * xi - s * s))
}

fn check_small_s(n: usize, s: f64) -> Result<()> {
    let hi = 1.0 + 2.0 / n as f64;
    check((1.0 - EDGE..=hi + EDGE).contains(&s), || format!("s must lie in [1, {hi}], got {s}"))
}

pub fn zeta(n: usize, k: usize, s: f64) -> Result<f64> {
    check_nk(n, k)?;
    check_small_s(n, s)?;
    let nf = n as f64;
    let g = 1.0 + 2.0 / nf - s;
    let q = s * s - 1.0;
    let inner = (2.0 * g - q).powi(2) + 8.0 * g * q * (n - k) as f64 / nf;
    Ok(inner.max(0.0).sqrt())
}

/// Squared inscribed-ball parameter of the small-asymmetry family.
pub fn mu(n: usize, k: usize, s: f64) -> Result<f64> {
    let z = zeta(n, k, s)?;
    let (nf, kf) = (n as f64, k as f64);
    Ok(nf / (8.0 * (kf + 1.0)) * (nf * (s - 1.0).powi(2) + 4.0 * kf * (s + 1.0) + 4.0 + nf * z))
}

fn check_mu(n: usize, m: f64) -> Result<()> {
    let nf = n as f64;
    check((nf - EDGE..=nf + 1.0 + EDGE).contains(&m), || {
        format!("mu must lie in [{n}, {}], got {m}", n + 1)
    })
}

/// Nonnegative root of `(t√(μ-n) - 1)² = μ(1 - t²)/k`.
pub fn tau(n: usize, k: usize, m: f64) -> Result<f64> {
    check_nk(n, k)?;
    check_mu(n, m)?;
    let (nf, kf) = (n as f64, k as f64);
    let g = (m - nf).max(0.0);
    let den = kf * g + m;
    let disc = ((kf * g + m - kf) * m).max(0.0);
    Ok((kf * g.sqrt() + disc.sqrt()) / den)
}

/// The other root of the same quadratic.
pub fn tau_other_root(n: usize, k: usize, m: f64) -> Result<f64> {
    check_nk(n, k)?;
    check_mu(n, m)?;
    let (nf, kf) = (n as f64, k as f64);
    let g = (m - nf).max(0.0);
    let den = kf * g + m;
    let disc = ((kf * g + m - kf) * m).max(0.0);
    Ok((kf * g.sqrt() - disc.sqrt()) / den)
}

/// `(t√(μ-n) - 1)² - μ(1 - t²)/k`.
pub fn tau_equation(n: usize, k: usize, m: f64, t: f64) -> f64 {
    let g = (m - n as f64).max(0.0);
    (t * g.sqrt() - 1.0).powi(2) - m * (1.0 - t * t) / k as f64
}
