//! Membership tests for the diagonal-product images of SU(n), U(n) and SO(n).
//!
//! Two independent routes decide SU(n) membership for `n ≥ 3`: the polar test
//! compares `|z|` against the star-shaped profile `r(arg z)`, and the winding
//! test counts turns of a sampled polyline of the curve around `z`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::boundary::{self, BoundaryModel};
use crate::matrix::ComplexValue;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_WINDING_SAMPLES: usize = 8192;
pub const MIN_WINDING_SAMPLES: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MembershipStatus {
    Inside,
    OnBoundary,
    Outside,
}

impl MembershipStatus {
    /// Inside or on the boundary.
    pub fn is_member(self) -> bool {
        !matches!(self, MembershipStatus::Outside)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MembershipStatus::Inside => "Inside",
            MembershipStatus::OnBoundary => "OnBoundary",
            MembershipStatus::Outside => "Outside",
        }
    }
}

impl std::fmt::Display for MembershipStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict plus a signed margin (positive inside).
///
/// `status` is `OnBoundary` exactly when `|signed_margin| ≤ tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    pub signed_margin: f64,
}

impl MembershipVerdict {
    fn from_margin(margin: f64, tol: f64) -> Self {
        let status = if margin.abs() <= tol {
            MembershipStatus::OnBoundary
        } else if margin > 0.0 {
            MembershipStatus::Inside
        } else {
            MembershipStatus::Outside
        };
        Self {
            status,
            signed_margin: margin,
        }
    }
}

fn distance_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a).re * ab.re + (z - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Membership in the diagonal-product image of SU(n).
///
/// For `n = 1` (the point `1`) and `n = 2` (the segment `[0, 1]`) the image has
/// empty interior: members are `OnBoundary` with margin `−distance`.
pub fn su_region_contains(n: usize, z: ComplexValue, tol: f64) -> MembershipVerdict {
    match n {
        0 => panic!("n must be positive"),
        1 => MembershipVerdict::from_margin(-(z - 1.0).norm(), tol),
        2 => {
            let d = distance_to_segment(z, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            MembershipVerdict::from_margin(-d, tol)
        }
        _ => {
            let r = z.norm();
            let theta = if r <= tol { 0.0 } else { z.arg() };
            let profile = boundary::radius_of_theta(n, theta).expect("n >= 3").r;
            MembershipVerdict::from_margin(profile - r, tol)
        }
    }
}

/// Same as [`su_region_contains`] for `n ≥ 3`, using a cached model.
pub fn su_region_contains_with(model: &BoundaryModel, z: ComplexValue, tol: f64) -> MembershipVerdict {
    if model.n() < 3 {
        return su_region_contains(model.n(), z, tol);
    }
    let r = z.norm();
    let theta = if r <= tol { 0.0 } else { z.arg() };
    let profile = model.radius_of_theta(theta).expect("n >= 3").r;
    MembershipVerdict::from_margin(profile - r, tol)
}

/// Closed polyline through `samples` points `γ(α_k)`, `α_k = −π + 2πk/samples`.
pub fn boundary_polyline(n: usize, samples: usize) -> Vec<Complex64> {
    (0..samples)
        .map(|k| boundary::gamma(n, -PI + 2.0 * PI * k as f64 / samples as f64))
        .collect()
}

/// Winding-number oracle over a sampled polyline of the curve. Only uses `γ`.
///
/// Returns `None` when `n < 3` or `samples < 1024`.
pub fn su_region_contains_winding(
    n: usize,
    z: ComplexValue,
    samples: usize,
    tol: f64,
) -> Option<MembershipVerdict> {
    if n < 3 || samples < MIN_WINDING_SAMPLES {
        return None;
    }
    Some(winding_verdict(&boundary_polyline(n, samples), z, tol))
}

/// Winding verdict against a precomputed closed polyline.
pub fn winding_verdict(poly: &[Complex64], z: ComplexValue, tol: f64) -> MembershipVerdict {
    let m = poly.len();
    let edges = || (0..m).map(|k| (poly[k], poly[(k + 1) % m]));
    let dist = edges()
        .map(|(a, b)| distance_to_segment(z, a, b))
        .fold(f64::INFINITY, f64::min);
    if dist <= tol {
        return MembershipVerdict {
            status: MembershipStatus::OnBoundary,
            signed_margin: dist,
        };
    }
    let turn: f64 = edges().map(|(a, b)| ((b - z) / (a - z)).arg()).sum();
    if winding_number(turn).abs() == 1 {
        MembershipVerdict {
            status: MembershipStatus::Inside,
            signed_margin: dist,
        }
    } else {
        MembershipVerdict {
            status: MembershipStatus::Outside,
            signed_margin: -dist,
        }
    }
}

fn winding_number(total_turn: f64) -> i64 {
    (total_turn / (2.0 * PI)).round() as i64
}

/// Membership in the closed unit disk, the image of U(n) for `n ≥ 2`.
pub fn u_region_contains(n: usize, z: ComplexValue, tol: f64) -> MembershipVerdict {
    assert!(n >= 2, "the U(n) image is the unit disk only for n >= 2");
    MembershipVerdict::from_margin(1.0 - z.norm(), tol)
}

/// `Π_d(SO(n)) = [−(1 − 2/n)^n, 1]`.
pub fn so_interval(n: usize) -> (f64, f64) {
    assert!(n >= 1, "n must be positive");
    let nf = n as f64;
    let low = -(1.0 - 2.0 / nf).powi(n as i32);
    // −0.0 for n = 2
    (low + 0.0, 1.0)
}
