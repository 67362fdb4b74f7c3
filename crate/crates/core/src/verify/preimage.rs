//! Explicit SU(n) preimages of points of the region.
//!
//! Solves `Π_d(A(α, ω)) = z` on `[−π, π] × [0, arctan √(n−1)]`: a grid scan
//! picks starting nodes, damped Newton with a finite-difference Jacobian
//! polishes them, and a shrinking local grid takes over if Newton stalls.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

use super::{map_trials, DetailRecord, ReportKind, VerificationReport};
use crate::constructors::{build_homotopy_matrix, homotopy_diag_product, homotopy_omega_max};
use crate::error::VerifyError;
use crate::haar::RngSeed;
use crate::matrix::{diag_product, is_special_unitary, CMatrix, ComplexValue, GROUP_TOL};
use crate::region::{su_region_contains, MembershipStatus};

const FD_STEP: f64 = 1e-7;
const REFINE_LEVELS: usize = 40;
const REFINE_NODES: usize = 17;

#[derive(Clone, Debug, PartialEq)]
pub struct PreimageConfig {
    pub tol: f64,
    pub grid_alpha: usize,
    pub grid_omega: usize,
    /// Grid nodes handed to Newton, best first.
    pub starts: usize,
    pub max_newton: usize,
}

impl Default for PreimageConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            grid_alpha: 256,
            grid_omega: 128,
            starts: 4,
            max_newton: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreimageSolution {
    pub matrix: CMatrix,
    pub alpha: f64,
    pub omega: f64,
    /// `|Π_d(matrix) − z|`, measured on the matrix itself.
    pub residual: f64,
}

struct Problem {
    n: usize,
    z: Complex64,
    omega_max: f64,
}

impl Problem {
    fn residual(&self, a: f64, w: f64) -> Complex64 {
        homotopy_diag_product(self.n, a, w) - self.z
    }

    fn clamp(&self, a: f64, w: f64) -> (f64, f64) {
        (a.clamp(-PI, PI), w.clamp(0.0, self.omega_max))
    }

    /// Columns `∂/∂α` and `∂/∂ω` by central differences, one-sided at the ω ends.
    fn jacobian(&self, a: f64, w: f64) -> (Complex64, Complex64) {
        let h = FD_STEP;
        let da = (self.residual(a + h, w) - self.residual(a - h, w)) / (2.0 * h);
        let dw = if w - h < 0.0 {
            (self.residual(a, w + h) - self.residual(a, w)) / h
        } else if w + h > self.omega_max {
            (self.residual(a, w) - self.residual(a, w - h)) / h
        } else {
            (self.residual(a, w + h) - self.residual(a, w - h)) / (2.0 * h)
        };
        (da, dw)
    }

    /// Damped Newton with Levenberg fallback; returns the best point found.
    fn newton(&self, mut a: f64, mut w: f64, target: f64, max_iter: usize) -> (f64, f64, f64) {
        let mut r = self.residual(a, w).norm();
        for _ in 0..max_iter {
            if r <= target {
                break;
            }
            let res = self.residual(a, w);
            let (ja, jw) = self.jacobian(a, w);
            let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(4);
            // full Newton step: [Re ja, Re jw; Im ja, Im jw] δ = −res
            let det = ja.re * jw.im - jw.re * ja.im;
            if det.abs() > 1e-300 {
                let da = -(jw.im * res.re - jw.re * res.im) / det;
                let dw = -(-ja.im * res.re + ja.re * res.im) / det;
                candidates.push((da, dw));
            }
            // Levenberg step
            let jtj = [
                ja.norm_sqr(),
                ja.re * jw.re + ja.im * jw.im,
                jw.norm_sqr(),
            ];
            let jtr = [ja.re * res.re + ja.im * res.im, jw.re * res.re + jw.im * res.im];
            let nu = 1e-3 * (jtj[0] + jtj[2]).max(1e-300);
            let (m00, m01, m11) = (jtj[0] + nu, jtj[1], jtj[2] + nu);
            let dl = m00 * m11 - m01 * m01;
            candidates.push((-(m11 * jtr[0] - m01 * jtr[1]) / dl, -(-m01 * jtr[0] + m00 * jtr[1]) / dl));
            // α alone, for when ω sits on a bound
            if ja.norm_sqr() > 0.0 {
                candidates.push((-jtr[0] / ja.norm_sqr(), 0.0));
            }

            let mut improved = false;
            'outer: for (da, dw) in candidates {
                if !(da.is_finite() && dw.is_finite()) {
                    continue;
                }
                let mut t = 1.0;
                while t > 1e-6 {
                    let (na, nw) = self.clamp(a + t * da, w + t * dw);
                    let nr = self.residual(na, nw).norm();
                    if nr < r {
                        a = na;
                        w = nw;
                        r = nr;
                        improved = true;
                        break 'outer;
                    }
                    t *= 0.5;
                }
            }
            if !improved {
                break;
            }
        }
        (a, w, r)
    }

    /// Repeated local grids, shrinking by 4 around the best node.
    fn refine(&self, mut a: f64, mut w: f64) -> (f64, f64, f64) {
        let mut r = self.residual(a, w).norm();
        let mut half_a = 2.0 * PI / 256.0;
        let mut half_w = self.omega_max / 128.0;
        for _ in 0..REFINE_LEVELS {
            let (ca, cw) = (a, w);
            for i in 0..REFINE_NODES {
                for j in 0..REFINE_NODES {
                    let fa = -1.0 + 2.0 * i as f64 / (REFINE_NODES - 1) as f64;
                    let fw = -1.0 + 2.0 * j as f64 / (REFINE_NODES - 1) as f64;
                    let (na, nw) = self.clamp(ca + fa * half_a, cw + fw * half_w);
                    let nr = self.residual(na, nw).norm();
                    if nr < r {
                        a = na;
                        w = nw;
                        r = nr;
                    }
                }
            }
            half_a /= 4.0;
            half_w /= 4.0;
        }
        (a, w, r)
    }
}

/// `A(α*, ω*)` with `|Π_d − z| ≤ tol`.
pub fn preimage(n: usize, z: ComplexValue, tol: f64) -> Result<CMatrix, VerifyError> {
    let config = PreimageConfig {
        tol,
        ..PreimageConfig::default()
    };
    preimage_with(n, z, &config).map(|s| s.matrix)
}

pub fn preimage_with(n: usize, z: ComplexValue, config: &PreimageConfig) -> Result<PreimageSolution, VerifyError> {
    if n < 3 {
        return Err(VerifyError::DimensionTooSmall { n, min: 3 });
    }
    if !(config.tol.is_finite() && config.tol > 0.0) {
        return Err(VerifyError::BadConfig("tolerance must be positive"));
    }
    if config.grid_alpha < 2 || config.grid_omega < 2 || config.starts == 0 {
        return Err(VerifyError::BadConfig("grid needs at least 2x2 nodes and one start"));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(VerifyError::BadConfig("target must be finite"));
    }
    let verdict = su_region_contains(n, z, config.tol);
    if verdict.status == MembershipStatus::Outside {
        return Err(VerifyError::OutsideRegion {
            margin: verdict.signed_margin,
        });
    }
    let problem = Problem {
        n,
        z,
        omega_max: homotopy_omega_max(n),
    };
    // aim below tol so the matrix evaluation keeps the bound
    let target = (0.25 * config.tol).max(1e-15);

    let mut nodes: Vec<(f64, f64, f64)> = Vec::with_capacity(config.grid_alpha * config.grid_omega);
    for i in 0..config.grid_alpha {
        let a = -PI + 2.0 * PI * i as f64 / (config.grid_alpha - 1) as f64;
        for j in 0..config.grid_omega {
            let w = problem.omega_max * j as f64 / (config.grid_omega - 1) as f64;
            nodes.push((problem.residual(a, w).norm(), a, w));
        }
    }
    nodes.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.total_cmp(&y.2)));

    let mut best = (f64::INFINITY, 0.0, 0.0);
    let mut consider = |a: f64, w: f64| -> Option<PreimageSolution> {
        let matrix = build_homotopy_matrix(n, a, w).ok()?;
        let residual = (diag_product(&matrix) - z).norm();
        if residual < best.0 {
            best = (residual, a, w);
        }
        (residual <= config.tol && is_special_unitary(&matrix, GROUP_TOL)).then_some(PreimageSolution {
            matrix,
            alpha: a,
            omega: w,
            residual,
        })
    };

    for &(_, a0, w0) in nodes.iter().take(config.starts) {
        let (a, w, _) = problem.newton(a0, w0, target, config.max_newton);
        if let Some(s) = consider(a, w) {
            return Ok(s);
        }
    }
    for &(_, a0, w0) in nodes.iter().take(config.starts) {
        let (a, w, _) = problem.refine(a0, w0);
        let (a, w, _) = problem.newton(a, w, target, config.max_newton);
        if let Some(s) = consider(a, w) {
            return Ok(s);
        }
    }
    Err(VerifyError::NonConvergence { best_residual: best.0 })
}

/// Rejection sample from the unit disk until the point is `Inside` the region.
pub fn sample_interior_point<R: Rng + ?Sized>(n: usize, rng: &mut R, tol: f64) -> Complex64 {
    loop {
        let z = Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        if z.norm() <= 1.0 && su_region_contains(n, z, tol).status == MembershipStatus::Inside {
            return z;
        }
    }
}

/// Preimages of `points` interior points drawn with per-point derived seeds.
pub fn verify_preimages(n: usize, points: u64, seed: RngSeed, tol: f64) -> Result<VerificationReport, VerifyError> {
    if n < 3 {
        return Err(VerifyError::DimensionTooSmall { n, min: 3 });
    }
    let start = Instant::now();
    let outcomes = map_trials(points, |i| {
        let mut rng = seed.derive(i).rng();
        let z = sample_interior_point(n, &mut rng, 1e-9);
        (i, z, preimage_with(n, z, &PreimageConfig { tol, ..PreimageConfig::default() }))
    });
    let mut report = VerificationReport::new(ReportKind::Preimage, n, seed);
    report.trials = points;
    for (i, z, result) in outcomes {
        let input = format!("point {i}: z = {:.17e}{:+.17e}i", z.re, z.im);
        match result {
            Ok(sol) => {
                report.observe_margin(tol - sol.residual);
                let su = is_special_unitary(&sol.matrix, GROUP_TOL);
                if sol.residual > tol || !su {
                    report.record_failure(DetailRecord {
                        index: i,
                        input,
                        measured: sol.residual,
                        expected: tol,
                        error: sol.residual - tol,
                    });
                }
            }
            Err(e) => {
                let best = match e {
                    VerifyError::NonConvergence { best_residual } => best_residual,
                    _ => f64::INFINITY,
                };
                report.observe_margin(tol - best);
                report.record_failure(DetailRecord {
                    index: i,
                    input: format!("{input}: {e}"),
                    measured: best,
                    expected: tol,
                    error: best - tol,
                });
            }
        }
    }
    Ok(report.finish(start))
}
