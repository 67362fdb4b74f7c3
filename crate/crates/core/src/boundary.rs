//! Closed-form mathematics of the boundary curve of the diagonal-product image.
//!
//! For `n ≥ 1` the curve is
//!
//! ```text
//! γ(α) = e^{iα} (1 − (1 − e^{−iα}) / n)^n,      α ∈ [−π, π].
//! ```
//!
//! For `n ≥ 3` its polar angle `θ(α) = α − n·atan(sin α / (n − 1 + cos α))` is a
//! strictly increasing odd bijection of `[−π, π]`, so the enclosed region is
//! star-shaped about the origin with radius `r(θ) = |γ(α(θ))|`.
//!
//! The two-parameter family `Γ(α, y) = e^{iyα}(1 − (1 − e^{−iα}) y/n)^n` on
//! `[−π, π] × [1, n−1]` interpolates between `γ(α)` (at `y = 1`) and `γ(−α)`
//! (at `y = n − 1`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::BoundaryError;
use crate::matrix::ComplexValue;

/// Default number of cached `(α, θ(α))` samples in a [`BoundaryModel`].
pub const DEFAULT_CACHE_RESOLUTION: usize = 4096;

/// Tolerance used when callers do not supply one to the angle inverse.
pub const DEFAULT_INVERSE_TOL: f64 = 1e-13;

/// Point of the boundary in polar form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarPoint {
    pub theta: f64,
    pub r: f64,
}

/// Reduces an angle to `[−π, π]`. Values already in range (including `−π`)
/// are returned unchanged.
pub fn normalize_angle(a: f64) -> f64 {
    if (-PI..=PI).contains(&a) {
        return a;
    }
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Integer power by repeated squaring.
pub(crate) fn cpowi(base: Complex64, mut exp: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}

#[inline]
fn one_minus_conj_phase(alpha: f64) -> Complex64 {
    // 1 − e^{−iα} = 2 sin²(α/2) + i sin α, accurate for small α
    let h = (0.5 * alpha).sin();
    Complex64::new(2.0 * h * h, alpha.sin())
}

fn require_n(n: usize, min: usize) -> Result<(), BoundaryError> {
    if n < min {
        Err(BoundaryError::DimensionTooSmall { n, min })
    } else {
        Ok(())
    }
}

/// The boundary curve `γ(α)`.
pub fn gamma(n: usize, alpha: f64) -> ComplexValue {
    assert!(n >= 1, "n must be positive");
    if n == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let a = normalize_angle(alpha);
    let inner = Complex64::new(1.0, 0.0) - one_minus_conj_phase(a) / n as f64;
    Complex64::from_polar(1.0, a) * cpowi(inner, n as u32)
}

/// `∂γ/∂α = i(1 − 1/n)(1 − e^{−iα}) e^{iα} (1 − (1 − e^{−iα})/n)^{n−1}`.
pub fn gamma_derivative(n: usize, alpha: f64) -> Result<ComplexValue, BoundaryError> {
    require_n(n, 2)?;
    let a = normalize_angle(alpha);
    let nf = n as f64;
    let c = one_minus_conj_phase(a);
    let inner = Complex64::new(1.0, 0.0) - c / nf;
    Ok(Complex64::new(0.0, 1.0 - 1.0 / nf)
        * c
        * Complex64::from_polar(1.0, a)
        * cpowi(inner, (n - 1) as u32))
}

/// `|γ(α)| = (1 − 4(n−1)/n² · sin²(α/2))^{n/2}`.
pub fn gamma_modulus(n: usize, alpha: f64) -> f64 {
    assert!(n >= 1, "n must be positive");
    let nf = n as f64;
    let s = (0.5 * normalize_angle(alpha)).sin();
    let base = (1.0 - 4.0 * (nf - 1.0) / (nf * nf) * s * s).max(0.0);
    base.powf(0.5 * nf)
}

/// Polar angle of `γ(α)`.
pub fn theta_of_alpha(n: usize, alpha: f64) -> Result<f64, BoundaryError> {
    require_n(n, 3)?;
    Ok(theta_unchecked(n, normalize_angle(alpha)))
}

fn theta_unchecked(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    alpha - nf * (alpha.sin() / (nf - 1.0 + alpha.cos())).atan()
}

/// `θ'(α) = 2(n−1)(n−2) sin²(α/2) / ((n−2)² + 4(n−1) cos²(α/2))`.
pub fn theta_derivative(n: usize, alpha: f64) -> Result<f64, BoundaryError> {
    require_n(n, 3)?;
    Ok(theta_derivative_unchecked(n, alpha))
}

fn theta_derivative_unchecked(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let (s, c) = (0.5 * alpha).sin_cos();
    2.0 * (nf - 1.0) * (nf - 2.0) * s * s / ((nf - 2.0).powi(2) + 4.0 * (nf - 1.0) * c * c)
}

const BISECTION_WIDTH: f64 = 1e-6;
const NEWTON_MIN_SLOPE: f64 = 1e-12;
const MAX_INVERSE_ITERATIONS: usize = 200;

/// Solves `θ(α) = target` for `α ∈ [lo, hi] ⊆ [0, π]`, `target ∈ [θ(lo), θ(hi)]`.
///
/// Bisection down to a bracket of width 1e-6, then Newton steps with the
/// explicit derivative; a step is rejected (and bisection resumes) when the
/// slope is below 1e-12 or the iterate would leave the bracket.
fn invert_theta_on(n: usize, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if theta_unchecked(n, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let f = theta_unchecked(n, x) - target;
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = theta_derivative_unchecked(n, x);
        let newton = if slope.abs() >= NEWTON_MIN_SLOPE {
            Some(x - f / slope)
        } else {
            None
        };
        let next = match newton {
            Some(c) if c > lo && c < hi => c,
            _ => 0.5 * (lo + hi),
        };
        if next == x || (hi - lo) <= f64::EPSILON * hi.abs().max(1.0) {
            // bracket exhausted: return the better endpoint
            return best_of(n, target, &[x, lo, hi]);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE)
            && (theta_unchecked(n, x) - target).abs() <= tol
        {
            return x;
        }
    }
    best_of(n, target, &[x, lo, hi])
}

fn best_of(n: usize, target: f64, candidates: &[f64]) -> f64 {
    candidates
        .iter()
        .copied()
        .min_by(|a, b| {
            let fa = (theta_unchecked(n, *a) - target).abs();
            let fb = (theta_unchecked(n, *b) - target).abs();
            fa.total_cmp(&fb)
        })
        .expect("non-empty candidates")
}

/// Inverse of [`theta_of_alpha`]; odd in `theta`.
pub fn alpha_of_theta(n: usize, theta: f64, tol: f64) -> Result<f64, BoundaryError> {
    require_n(n, 3)?;
    if !(tol > 0.0) {
        return Err(BoundaryError::BadTolerance(tol));
    }
    if !theta.is_finite() {
        return Err(BoundaryError::NonFinite);
    }
    Ok(alpha_of_theta_bracketed(n, normalize_angle(theta), 0.0, PI, tol))
}

fn alpha_of_theta_bracketed(n: usize, theta: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let t = theta.abs();
    if t == 0.0 {
        return 0.0;
    }
    if t == PI {
        return theta.signum() * PI;
    }
    theta.signum() * invert_theta_on(n, t, lo, hi, tol)
}

/// Polar radius of the boundary at polar angle `theta`.
pub fn radius_of_theta(n: usize, theta: f64) -> Result<PolarPoint, BoundaryError> {
    let theta = normalize_angle(theta);
    let alpha = alpha_of_theta(n, theta, DEFAULT_INVERSE_TOL)?;
    Ok(PolarPoint {
        theta,
        r: gamma_modulus(n, alpha),
    })
}

/// `Γ(α, y) = e^{iyα} (1 − (1 − e^{−iα}) y/n)^n` for `y ∈ [1, n−1]`.
pub fn big_gamma(n: usize, alpha: f64, y: f64) -> Result<ComplexValue, BoundaryError> {
    require_n(n, 3)?;
    check_y(n, y)?;
    Ok(big_gamma_unchecked(n, alpha, y))
}

fn check_y(n: usize, y: f64) -> Result<(), BoundaryError> {
    let max = (n - 1) as f64;
    if !(1.0..=max).contains(&y) {
        return Err(BoundaryError::YOutOfRange { y, max });
    }
    Ok(())
}

pub(crate) fn big_gamma_unchecked(n: usize, alpha: f64, y: f64) -> Complex64 {
    let inner = Complex64::new(1.0, 0.0) - one_minus_conj_phase(alpha) * (y / n as f64);
    Complex64::from_polar(1.0, y * alpha) * cpowi(inner, n as u32)
}

/// `2 − 2cos α − α sin α`, with a series near zero where the terms cancel.
fn jacobian_angle_factor(alpha: f64) -> f64 {
    if alpha.abs() < 0.25 {
        // α⁴/12 − α⁶/180 + α⁸/6720 − α¹⁰/453600 + α¹²/47900160 − …
        let a2 = alpha * alpha;
        let a4 = a2 * a2;
        a4 * (1.0 / 12.0
            - a2 * (1.0 / 180.0 - a2 * (1.0 / 6720.0 - a2 * (1.0 / 453_600.0 - a2 / 47_900_160.0))))
    } else {
        2.0 - 2.0 * alpha.cos() - alpha * alpha.sin()
    }
}

/// Jacobian determinant of `(α, y) ↦ (Re Γ, Im Γ)`:
/// `|B|^{2n−2} · y(1 − y/n) · (2 − 2cos α − α sin α)` with
/// `B = 1 − (1 − e^{−iα}) y/n`, so that `|Γ| = |B|^n`.
pub fn jacobian_big_gamma(n: usize, alpha: f64, y: f64) -> Result<f64, BoundaryError> {
    require_n(n, 3)?;
    check_y(n, y)?;
    let nf = n as f64;
    let base = (Complex64::new(1.0, 0.0) - one_minus_conj_phase(alpha) * (y / nf)).norm();
    Ok(base.powi(2 * n as i32 - 2) * y * (1.0 - y / nf) * jacobian_angle_factor(alpha))
}

/// Per-`n` boundary description with a cached `(α, θ(α))` table used to
/// bracket the angle inverse.
#[derive(Clone, Debug)]
pub struct BoundaryModel {
    n: usize,
    /// `(α_k, θ(α_k))` for `α_k` uniform on `[0, π]`; empty for `n < 3`.
    table: Vec<(f64, f64)>,
}

impl BoundaryModel {
    pub fn new(n: usize) -> Self {
        Self::with_resolution(n, DEFAULT_CACHE_RESOLUTION)
    }

    pub fn with_resolution(n: usize, resolution: usize) -> Self {
        assert!(n >= 1, "n must be positive");
        let table = if n >= 3 && resolution >= 2 {
            (0..resolution)
                .map(|k| {
                    let a = PI * k as f64 / (resolution - 1) as f64;
                    let a = if k + 1 == resolution { PI } else { a };
                    (a, theta_unchecked(n, a))
                })
                .collect()
        } else {
            Vec::new()
        };
        Self { n, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cache_len(&self) -> usize {
        self.table.len()
    }

    pub fn gamma(&self, alpha: f64) -> ComplexValue {
        gamma(self.n, alpha)
    }

    pub fn theta_of_alpha(&self, alpha: f64) -> Result<f64, BoundaryError> {
        theta_of_alpha(self.n, alpha)
    }

    pub fn alpha_of_theta(&self, theta: f64, tol: f64) -> Result<f64, BoundaryError> {
        require_n(self.n, 3)?;
        if !(tol > 0.0) {
            return Err(BoundaryError::BadTolerance(tol));
        }
        if !theta.is_finite() {
            return Err(BoundaryError::NonFinite);
        }
        let theta = normalize_angle(theta);
        if self.table.len() < 2 {
            return Ok(alpha_of_theta_bracketed(self.n, theta, 0.0, PI, tol));
        }
        let t = theta.abs();
        // first cached θ ≥ t
        let idx = self.table.partition_point(|&(_, th)| th < t);
        let (lo, hi) = match idx {
            0 => (0.0, self.table[1].0),
            i if i >= self.table.len() => (self.table[self.table.len() - 2].0, PI),
            i => (self.table[i - 1].0, self.table[i].0),
        };
        Ok(alpha_of_theta_bracketed(self.n, theta, lo, hi, tol))
    }

    pub fn radius_of_theta(&self, theta: f64) -> Result<PolarPoint, BoundaryError> {
        let theta = normalize_angle(theta);
        let alpha = self.alpha_of_theta(theta, DEFAULT_INVERSE_TOL)?;
        Ok(PolarPoint {
            theta,
            r: gamma_modulus(self.n, alpha),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn gamma_at_zero_is_exactly_one() {
        for n in 1..20 {
            assert_eq!(gamma(n, 0.0), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn gamma_n2_is_cos_squared() {
        for k in 0..=200 {
            let a = -PI + 2.0 * PI * k as f64 / 200.0;
            let expected = (a / 2.0).cos().powi(2);
            assert!(close(gamma(2, a), Complex64::new(expected, 0.0), 1e-15));
        }
    }

    #[test]
    fn gamma_n3_at_pi() {
        let g = gamma(3, PI);
        assert!(close(g, Complex64::new(-1.0 / 27.0, 0.0), 1e-15));
        assert!(close(gamma(3, -PI), g, 1e-15));
    }

    #[test]
    fn gamma_reduces_angles() {
        assert!(close(gamma(4, 1.0 + 2.0 * PI), gamma(4, 1.0), 1e-13));
        assert!(close(gamma(4, -1.0 - 4.0 * PI), gamma(4, -1.0), 1e-13));
    }

    fn central_difference(n: usize, a: f64, h: f64) -> Complex64 {
        (gamma(n, a + h) - gamma(n, a - h)) / (2.0 * h)
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(gamma_derivative(5, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        let d = gamma_derivative(3, 0.7).unwrap();
        assert!(close(d, central_difference(3, 0.7, 1e-6), 1e-8));
        let d = gamma_derivative(2, PI / 2.0).unwrap();
        assert!(close(d, central_difference(2, PI / 2.0, 1e-6), 1e-8));
        // n = 2: γ = cos²(α/2), γ' = −sin(α)/2
        assert!(close(d, Complex64::new(-0.5, 0.0), 1e-14));
        assert!(gamma_derivative(1, 0.3).is_err());
    }

    #[test]
    fn derivative_vanishes_only_at_zero() {
        for n in 2..10 {
            for k in 1..=100 {
                let a = PI * k as f64 / 100.0;
                assert!(gamma_derivative(n, a).unwrap().norm() > 0.0);
                assert!(gamma_derivative(n, -a).unwrap().norm() > 0.0);
            }
        }
    }

    /// Composite Simpson's rule on θ'(α).
    fn integrate_theta_prime(n: usize, a: f64, panels: usize) -> f64 {
        let h = a / panels as f64;
        let f = |x: f64| theta_derivative(n, x).unwrap();
        let mut s = f(0.0) + f(a);
        for k in 1..panels {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(k as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn theta_examples() {
        for n in 3..10 {
            assert_eq!(theta_of_alpha(n, 0.0).unwrap(), 0.0);
            assert!((theta_of_alpha(n, PI).unwrap() - PI).abs() < 1e-15);
        }
        let quad = integrate_theta_prime(3, 1.0, 2000);
        assert!((theta_of_alpha(3, 1.0).unwrap() - quad).abs() < 1e-8);
        assert!(theta_of_alpha(2, 1.0).is_err());
    }

    #[test]
    fn alpha_of_theta_examples() {
        for n in 3..10 {
            assert_eq!(alpha_of_theta(n, 0.0, 1e-12).unwrap(), 0.0);
            assert_eq!(alpha_of_theta(n, PI, 1e-12).unwrap(), PI);
            assert_eq!(alpha_of_theta(n, -PI, 1e-12).unwrap(), -PI);
        }
        let a = alpha_of_theta(4, 0.5, 1e-12).unwrap();
        assert!((theta_of_alpha(4, a).unwrap() - 0.5).abs() <= 1e-10);
        let b = alpha_of_theta(4, -0.5, 1e-12).unwrap();
        assert_eq!(a, -b);
        assert!(alpha_of_theta(4, 0.5, 0.0).is_err());
    }

    #[test]
    fn inverse_resolves_tiny_angles() {
        // θ ≈ (n−1)(n−2)α³/(6n²) near zero
        for &a in &[1e-3, 3e-4, 1e-2] {
            let t = theta_of_alpha(3, a).unwrap();
            let back = alpha_of_theta(3, t, 1e-18).unwrap();
            assert!((back - a).abs() < 1e-9, "{a} -> {t} -> {back}");
        }
    }

    #[test]
    fn radius_examples() {
        for n in 3..8 {
            assert_eq!(radius_of_theta(n, 0.0).unwrap().r, 1.0);
        }
        let r = radius_of_theta(3, PI).unwrap().r;
        assert!((r - 1.0 / 27.0).abs() < 1e-15);
        let a = alpha_of_theta(5, 1.2, DEFAULT_INVERSE_TOL).unwrap();
        let p = radius_of_theta(5, 1.2).unwrap();
        assert!((p.r - gamma(5, a).norm()).abs() < 1e-12);
        assert_eq!(p.theta, 1.2);
    }

    #[test]
    fn big_gamma_examples() {
        for n in 3..9 {
            for &a in &[-2.0, -0.3, 0.0, 1.1, PI] {
                assert!(close(big_gamma(n, a, 1.0).unwrap(), gamma(n, a), 1e-14));
            }
            for &y in &[1.0, 1.5, (n - 1) as f64] {
                assert_eq!(big_gamma(n, 0.0, y).unwrap(), Complex64::new(1.0, 0.0));
            }
        }
        let v = big_gamma(6, PI, 2.0).unwrap();
        assert!(close(v, Complex64::new(3f64.powi(-6), 0.0), 1e-15));
        assert!(big_gamma(6, 1.0, 0.5).is_err());
        assert!(big_gamma(6, 1.0, 5.5).is_err());
    }

    fn fd_jacobian(n: usize, a: f64, y: f64, h: f64) -> f64 {
        let da = (big_gamma_unchecked(n, a + h, y) - big_gamma_unchecked(n, a - h, y)) / (2.0 * h);
        let dy = (big_gamma_unchecked(n, a, y + h) - big_gamma_unchecked(n, a, y - h)) / (2.0 * h);
        da.re * dy.im - da.im * dy.re
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(jacobian_big_gamma(5, 0.0, 2.0).unwrap(), 0.0);
        let j = jacobian_big_gamma(4, 1.0, 1.5).unwrap();
        assert!(j > 0.0);
        let fd = fd_jacobian(4, 1.0, 1.5, 1e-5);
        assert!((j - fd).abs() < 1e-6, "closed form {j}, finite differences {fd}");
        assert!(jacobian_big_gamma(4, PI, 2.0).unwrap().abs() < 1e-30);
    }

    #[test]
    fn jacobian_series_matches_direct_form() {
        for &a in &[0.1, 0.2, 0.249] {
            let direct = 2.0 - 2.0 * f64::cos(a) - a * f64::sin(a);
            assert!((jacobian_angle_factor(a) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn model_matches_free_functions() {
        for n in 3..8 {
            let m = BoundaryModel::with_resolution(n, 257);
            for k in 0..=50 {
                let t = -PI + 2.0 * PI * k as f64 / 50.0;
                let direct = alpha_of_theta(n, t, 1e-14).unwrap();
                let cached = m.alpha_of_theta(t, 1e-14).unwrap();
                assert!((direct - cached).abs() < 1e-11, "n={n} t={t}");
            }
        }
        let small = BoundaryModel::new(2);
        assert_eq!(small.cache_len(), 0);
        assert!(small.alpha_of_theta(0.1, 1e-12).is_err());
    }

    #[test]
    fn normalize_angle_keeps_range() {
        assert_eq!(normalize_angle(-PI), -PI);
        assert_eq!(normalize_angle(PI), PI);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-15);
        assert!((normalize_angle(-0.5 - 2.0 * PI) + 0.5).abs() < 1e-15);
    }
}
