//! Direct numerical maximization of `Re(e^{−iθ} Π_d(U))` subject to
//! `Im(e^{−iθ} Π_d(U)) = 0` over SU(n).
//!
//! Moves act on the left through the Givens factors `exp(s X_jk)` and
//! `exp(t Y_jk)`, applied as a product (coordinates of the second kind).
//! Right multiplication by a diagonal with zero phase sum leaves `Π_d`
//! unchanged, so it is used only to keep the diagonal arguments equal.
//! The constraint is handled by an augmented Lagrangian with an escalating
//! quadratic penalty. Inner steps are Levenberg-damped Newton steps built from
//! finite differences of `Π_d` in the chart.

use std::time::Instant;

use num_complex::Complex64;

use super::{map_trials, DetailRecord, ReportKind, VerificationReport};
use crate::boundary;
use crate::constructors::{recognize_extremal, ExtremalDecomposition};
use crate::error::VerifyError;
use crate::haar::{haar_special_unitary, RngSeed};
use crate::matrix::{diag_product, CMatrix};

const GRAD_STEP: f64 = 1e-6;
const HESS_STEP: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;
const MAX_STAGES: usize = 20;
/// Feasibility threshold used to rank restarts.
const FEASIBLE: f64 = 1e-6;
/// Tolerance handed to `recognize_extremal` on the maximizer.
pub const RECOGNITION_TOL: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Newton iterations per restart, summed over penalty stages.
    pub max_iterations: usize,
    /// Largest coordinate change of the first trial step.
    pub step_init: f64,
    pub constraint_penalty_init: f64,
    pub penalty_growth: f64,
    pub max_escalations: usize,
    /// Inner loop stops when a step gains less than this.
    pub tol_value: f64,
    pub tol_constraint: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iterations: 2000,
            step_init: 0.5,
            constraint_penalty_init: 10.0,
            penalty_growth: 10.0,
            max_escalations: 6,
            tol_value: 1e-14,
            tol_constraint: 1e-9,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if self.restarts == 0 {
            return Err(VerifyError::BadConfig("restarts must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(VerifyError::BadConfig("max_iterations must be positive"));
        }
        if !positive(self.step_init) {
            return Err(VerifyError::BadConfig("step_init must be positive"));
        }
        if !positive(self.constraint_penalty_init) {
            return Err(VerifyError::BadConfig("constraint_penalty_init must be positive"));
        }
        if !(self.penalty_growth.is_finite() && self.penalty_growth > 1.0) {
            return Err(VerifyError::BadConfig("penalty_growth must exceed 1"));
        }
        if !positive(self.tol_value) || !positive(self.tol_constraint) {
            return Err(VerifyError::BadConfig("tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    pub value: f64,
    /// `|G|` at the end of the restart.
    pub constraint: f64,
    pub iterations: usize,
    pub stages: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstrainedOptimum {
    pub theta: f64,
    /// `|γ(α(θ))|`.
    pub target: f64,
    pub best_value: f64,
    pub best_restart: usize,
    pub constraint_residual: f64,
    pub maximizer: CMatrix,
    pub restarts: Vec<RestartOutcome>,
    /// `recognize_extremal` on the maximizer at [`RECOGNITION_TOL`].
    pub recognized: Option<ExtremalDecomposition>,
}

/// Accuracy demanded of the maximum; looser near the cusp at `θ = 0`.
pub fn constrained_max_tolerance(theta: f64) -> f64 {
    if theta.abs() < 0.1 {
        1e-3
    } else {
        1e-4
    }
}

/// Left Givens chart around a base point.
struct Chart {
    pairs: Vec<(usize, usize)>,
}

impl Chart {
    fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        for j in 0..n {
            for k in j + 1..n {
                pairs.push((j, k));
            }
        }
        Self { pairs }
    }

    fn dim(&self) -> usize {
        2 * self.pairs.len()
    }

    /// `∏ exp(s X_jk) exp(t Y_jk) · U`, factors applied in a fixed order.
    fn apply(&self, x: &[f64], u: &CMatrix) -> CMatrix {
        let mut m = u.clone();
        let n = m.n();
        for (p, &(j, k)) in self.pairs.iter().enumerate() {
            let s = x[2 * p];
            if s != 0.0 {
                let (sn, cs) = s.sin_cos();
                for col in 0..n {
                    let a = m[(j, col)];
                    let b = m[(k, col)];
                    m[(j, col)] = a * cs - b * sn;
                    m[(k, col)] = a * sn + b * cs;
                }
            }
            let t = x[2 * p + 1];
            if t != 0.0 {
                let (sn, cs) = t.sin_cos();
                let isn = Complex64::new(0.0, sn);
                for col in 0..n {
                    let a = m[(j, col)];
                    let b = m[(k, col)];
                    m[(j, col)] = a * cs + b * isn;
                    m[(k, col)] = a * isn + b * cs;
                }
            }
        }
        m
    }
}

/// Right-multiplies by zero-sum phases so all diagonal arguments agree.
fn equalize_diagonal_phases(u: &mut CMatrix) {
    let n = u.n();
    let args: Vec<f64> = u.diagonal().iter().map(|x| x.arg()).collect();
    let mean = args.iter().sum::<f64>() / n as f64;
    for (j, a) in args.iter().enumerate() {
        u.scale_column(j, Complex64::from_polar(1.0, mean - a));
    }
}

/// Local model of `p(x) = e^{−iθ} Π_d(chart(x)·U)` at `x = 0`.
struct LocalModel {
    p0: Complex64,
    grad: Vec<Complex64>,
    /// Row-major, symmetric.
    hess: Vec<Complex64>,
}

fn local_model(chart: &Chart, u: &CMatrix, rot: Complex64) -> LocalModel {
    let m = chart.dim();
    let eval = |x: &[f64]| rot * diag_product(&chart.apply(x, u));
    let mut x = vec![0.0; m];
    let p0 = eval(&x);

    let mut grad = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..m {
        x[i] = GRAD_STEP;
        let up = eval(&x);
        x[i] = -GRAD_STEP;
        let down = eval(&x);
        x[i] = 0.0;
        grad[i] = (up - down) / (2.0 * GRAD_STEP);
    }

    let h = HESS_STEP;
    let mut hess = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        x[i] = h;
        let up = eval(&x);
        x[i] = -h;
        let down = eval(&x);
        x[i] = 0.0;
        hess[i * m + i] = (up - 2.0 * p0 + down) / (h * h);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                x[i] = si * h;
                x[j] = sj * h;
                let v = eval(&x);
                x[i] = 0.0;
                x[j] = 0.0;
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                / (4.0 * h * h);
            hess[i * m + j] = v;
            hess[j * m + i] = v;
        }
    }
    LocalModel { p0, grad, hess }
}

/// Solves `A x = b` for symmetric positive definite `A`; `None` if not SPD.
fn cholesky_solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let mut l = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * m + i] = s.sqrt();
            } else {
                l[i * m + j] = s / l[j * m + j];
            }
        }
    }
    let mut y = vec![0.0; m];
    for i in 0..m {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * m + k] * y[k];
        }
        y[i] = s / l[i * m + i];
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = y[i];
        for k in i + 1..m {
            s -= l[k * m + i] * x[k];
        }
        x[i] = s / l[i * m + i];
    }
    Some(x)
}

struct Penalty {
    lambda: f64,
    mu: f64,
}

impl Penalty {
    fn value(&self, p: Complex64) -> f64 {
        p.re + self.lambda * p.im - self.mu * p.im * p.im
    }
}

/// Newton ascent on the penalized objective; returns iterations used.
fn inner_ascent(
    chart: &Chart,
    u: &mut CMatrix,
    rot: Complex64,
    pen: &Penalty,
    config: &OptimizerConfig,
    budget: usize,
) -> usize {
    let m = chart.dim();
    let mut iterations = 0;
    while iterations < budget {
        iterations += 1;
        let model = local_model(chart, u, rot);
        let g0 = model.p0.im;
        let grad: Vec<f64> = model
            .grad
            .iter()
            .map(|d| d.re + pen.lambda * d.im - 2.0 * pen.mu * g0 * d.im)
            .collect();
        // negative Hessian of the penalized objective
        let mut neg_h = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let hp = model.hess[i * m + j];
                let gi = model.grad[i].im;
                let gj = model.grad[j].im;
                let h = hp.re + pen.lambda * hp.im - 2.0 * pen.mu * (gi * gj + g0 * hp.im);
                neg_h[i * m + j] = -h;
            }
        }
        let scale = (0..m).map(|i| neg_h[i * m + i].abs()).fold(1.0, f64::max);
        let mut nu = 0.0;
        let dir = loop {
            let mut a = neg_h.clone();
            for i in 0..m {
                a[i * m + i] += nu;
            }
            if let Some(d) = cholesky_solve(&a, &grad) {
                break d;
            }
            nu = if nu == 0.0 { 1e-10 * scale } else { nu * 10.0 };
        };
        let dmax = dir.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
        if !(dmax > 0.0) || !dmax.is_finite() {
            break;
        }
        let f0 = pen.value(model.p0);
        let mut t = (config.step_init / dmax).min(1.0);
        let mut accepted = None;
        while t * dmax >= MIN_STEP {
            let x: Vec<f64> = dir.iter().map(|d| d * t).collect();
            let cand = chart.apply(&x, u);
            let f1 = pen.value(rot * diag_product(&cand));
            if f1 > f0 {
                accepted = Some((cand, f1 - f0));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, gain)) => {
                *u = cand;
                if gain <= config.tol_value {
                    break;
                }
            }
            None => break,
        }
    }
    iterations
}

fn run_restart(
    n: usize,
    theta: f64,
    config: &OptimizerConfig,
    seed: RngSeed,
    index: usize,
) -> (RestartOutcome, CMatrix) {
    let chart = Chart::new(n);
    let rot = Complex64::from_polar(1.0, -theta);
    let mut u = haar_special_unitary(n, seed.derive(index as u64));
    equalize_diagonal_phases(&mut u);
    let mut pen = Penalty {
        lambda: 0.0,
        mu: config.constraint_penalty_init,
    };
    let mut iterations = 0;
    let mut escalations = 0;
    let mut prev_g = f64::INFINITY;
    let mut stages = 0;
    while stages < MAX_STAGES && iterations < config.max_iterations {
        stages += 1;
        iterations += inner_ascent(&chart, &mut u, rot, &pen, config, config.max_iterations - iterations);
        equalize_diagonal_phases(&mut u);
        let g = (rot * diag_product(&u)).im;
        if g.abs() <= config.tol_constraint {
            break;
        }
        pen.lambda -= 2.0 * pen.mu * g;
        if g.abs() > 0.25 * prev_g && escalations < config.max_escalations {
            pen.mu *= config.penalty_growth;
            escalations += 1;
        }
        prev_g = g.abs();
    }
    let p = rot * diag_product(&u);
    let outcome = RestartOutcome {
        index,
        value: p.re,
        constraint: p.im.abs(),
        iterations,
        stages,
        converged: p.im.abs() <= config.tol_constraint,
    };
    (outcome, u)
}

/// Multi-start maximization of `F(U) = Re(e^{−iθ} Π_d(U))` on `G(U) = 0`.
///
/// `trials` counts restarts. There is one detail record per restart; a
/// failure is added when the best value misses `|γ(α(θ))|` by more than
/// [`constrained_max_tolerance`], exceeds it by more than `1e-6`, or the
/// maximizer is not recognized as extremal.
pub fn constrained_max_numeric(
    n: usize,
    theta: f64,
    config: &OptimizerConfig,
    seed: RngSeed,
) -> Result<VerificationReport, VerifyError> {
    if n < 3 {
        return Err(VerifyError::DimensionTooSmall { n, min: 3 });
    }
    config.validate()?;
    if !theta.is_finite() {
        return Err(VerifyError::BadConfig("theta must be finite"));
    }
    let start = Instant::now();
    let theta = boundary::normalize_angle(theta);
    let target = boundary::radius_of_theta(n, theta).expect("n >= 3").r;

    let runs = map_trials(config.restarts as u64, |i| run_restart(n, theta, config, seed, i as usize));

    let mut report = VerificationReport::new(ReportKind::ConstrainedMax, n, seed);
    report.trials = config.restarts as u64;
    let mut best: Option<usize> = None;
    for (i, (o, _)) in runs.iter().enumerate() {
        report.details.push(DetailRecord {
            index: o.index as u64,
            input: format!(
                "restart {}: theta {theta:.17e}, {} iterations, {} stages, |G| {:.3e}",
                o.index, o.iterations, o.stages, o.constraint
            ),
            measured: o.value,
            expected: target,
            error: o.value - target,
        });
        let better = match best {
            None => true,
            Some(b) => {
                let cur = &runs[b].0;
                let (fi, fb) = (o.constraint <= FEASIBLE, cur.constraint <= FEASIBLE);
                match (fi, fb) {
                    (true, false) => true,
                    (false, true) => false,
                    (true, true) => o.value > cur.value,
                    (false, false) => o.constraint < cur.constraint,
                }
            }
        };
        if better {
            best = Some(i);
        }
    }
    let b = best.expect("at least one restart");
    let outcomes: Vec<RestartOutcome> = runs.iter().map(|(o, _)| o.clone()).collect();
    let (outcome, maximizer) = runs.into_iter().nth(b).expect("index in range");
    let recognized = recognize_extremal(&maximizer, RECOGNITION_TOL).ok().flatten();

    let tol = constrained_max_tolerance(theta);
    let gap = outcome.value - target;
    report.worst_margin = tol - gap.abs();
    let index = config.restarts as u64;
    if gap > 1e-6 || gap.abs() > tol || outcome.constraint > FEASIBLE {
        report.failures += 1;
        report.details.push(DetailRecord {
            index,
            input: format!("best value vs |gamma(alpha(theta))|, theta {theta:.17e}"),
            measured: outcome.value,
            expected: target,
            error: gap,
        });
    }
    if recognized.is_none() {
        report.failures += 1;
        report.details.push(DetailRecord {
            index: index + 1,
            input: "maximizer not recognized as extremal".into(),
            measured: outcome.value,
            expected: target,
            error: gap,
        });
    }
    report.optimum = Some(ConstrainedOptimum {
        theta,
        target,
        best_value: outcome.value,
        best_restart: outcome.index,
        constraint_residual: outcome.constraint,
        maximizer,
        restarts: outcomes,
        recognized,
    });
    Ok(report.finish(start))
}
