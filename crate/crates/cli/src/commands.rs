use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::Value;

use sudiag_core::boundary::{self, big_gamma, gamma, jacobian_big_gamma};
use sudiag_core::constructors::{build_extremal, build_u_theta, ExtremalDecomposition};
use sudiag_core::matrix::{diag_product, CMatrix};
use sudiag_core::region::{su_region_contains, su_region_contains_winding, MembershipStatus};
use sudiag_core::verify::{
    constrained_max_numeric, monte_carlo_containment, preimage_with, verify_preimages,
    verify_proposition1, verify_so_interval, PreimageConfig, VerificationReport,
};
use sudiag_core::{OptimizerConfig, RngSeed, VerifyError};

use crate::output::{num, OutputRecord};
use crate::CliError;

pub fn boundary_curve(n: usize, samples: usize) -> Result<OutputRecord, CliError> {
    if samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let mut rec = OutputRecord::new("boundary", &["alpha", "re", "im", "theta", "r"]);
    rec.param("n", n).param("samples", samples);
    for k in 0..samples {
        // the closed curve: −π is included, +π would repeat it
        let a = -PI + 2.0 * PI * k as f64 / samples as f64;
        let g = gamma(n, a);
        let theta = if n >= 3 {
            boundary::theta_of_alpha(n, a).expect("n >= 3")
        } else {
            g.arg()
        };
        rec.push(vec![a, g.re, g.im, theta, g.norm()]);
    }
    Ok(rec)
}

pub fn gamma_image(n: usize, alpha_samples: usize, y_samples: usize) -> Result<OutputRecord, CliError> {
    if n < 3 {
        return Err(CliError::Usage("gamma-image requires --n >= 3".into()));
    }
    if alpha_samples < 2 || y_samples < 2 {
        return Err(CliError::Usage("sample counts must be at least 2".into()));
    }
    let nf = n as f64;
    let mut rec = OutputRecord::new("gamma-image", &["alpha", "y", "re", "im", "jacobian"]);
    rec.param("n", n)
        .param("alpha_samples", alpha_samples)
        .param("y_samples", y_samples)
        .param("reference_radius", num((1.0 - 2.0 / nf).powi(n as i32)));
    for i in 0..alpha_samples {
        let a = if i == alpha_samples - 1 { PI } else { PI * i as f64 / (alpha_samples - 1) as f64 };
        for j in 0..y_samples {
            let y = if j == y_samples - 1 {
                nf - 1.0
            } else {
                1.0 + (nf - 2.0) * j as f64 / (y_samples - 1) as f64
            };
            let g = big_gamma(n, a, y).expect("y in range");
            let jac = jacobian_big_gamma(n, a, y).expect("y in range");
            rec.push(vec![a, y, g.re, g.im, jac]);
        }
    }
    Ok(rec)
}

pub struct MembershipLine {
    pub line: String,
    pub member: bool,
}

pub fn membership(n: usize, z: Complex64, tol: f64, samples: usize) -> Result<MembershipLine, CliError> {
    check_tol(tol)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(CliError::Usage("--re and --im must be finite".into()));
    }
    let polar = su_region_contains(n, z, tol);
    let mut line = format!(
        "n={n} z={:.17e}{:+.17e}i status={} margin={:.17e}",
        z.re, z.im, polar.status, polar.signed_margin
    );
    match su_region_contains_winding(n, z, samples, tol) {
        Some(w) => line.push_str(&format!(
            " winding_status={} winding_margin={:.17e}",
            w.status, w.signed_margin
        )),
        None => line.push_str(" winding_status=n/a"),
    }
    Ok(MembershipLine {
        line,
        member: polar.status != MembershipStatus::Outside,
    })
}

fn matrix_columns(n: usize) -> Vec<String> {
    (1..=n).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect()
}

fn push_matrix(rec: &mut OutputRecord, m: &CMatrix) {
    for i in 0..m.n() {
        rec.push(m.row(i).iter().flat_map(|z| [z.re, z.im]).collect());
    }
}

fn matrix_record(command: &str, m: &CMatrix) -> OutputRecord {
    let cols = matrix_columns(m.n());
    let refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
    let mut rec = OutputRecord::new(command, &refs);
    push_matrix(&mut rec, m);
    rec
}

pub enum ExtremalInput {
    Theta(f64),
    Alpha(f64),
}

pub fn extremal(n: usize, input: ExtremalInput, seed: RngSeed) -> Result<OutputRecord, CliError> {
    let (m, alpha, given) = match input {
        ExtremalInput::Theta(theta) => {
            if n < 3 {
                return Err(CliError::Usage("--theta requires --n >= 3".into()));
            }
            finite(theta, "--theta")?;
            let alpha = boundary::alpha_of_theta(n, theta, boundary::DEFAULT_INVERSE_TOL)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let m = build_u_theta(n, theta).map_err(|e| CliError::Usage(e.to_string()))?;
            (m, alpha, ("theta", theta))
        }
        ExtremalInput::Alpha(alpha) => {
            finite(alpha, "--alpha")?;
            let d = ExtremalDecomposition::random(n, alpha, &mut seed.rng());
            let m = build_extremal(&d).map_err(|e| CliError::Usage(e.to_string()))?;
            (m, d.alpha, ("alpha", alpha))
        }
    };
    let p = diag_product(&m);
    let g = gamma(n, alpha);
    let mut rec = matrix_record("extremal", &m);
    rec.param("n", n)
        .param(given.0, num(given.1))
        .param("seed", seed.0)
        .param("alpha_used", num(alpha))
        .param("diag_product_re", num(p.re))
        .param("diag_product_im", num(p.im))
        .param("gamma_re", num(g.re))
        .param("gamma_im", num(g.im))
        .param("error", num((p - g).norm()));
    Ok(rec)
}

pub fn preimage(n: usize, z: Complex64, tol: f64) -> Result<OutputRecord, CliError> {
    check_tol(tol)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(CliError::Usage("--re and --im must be finite".into()));
    }
    let config = PreimageConfig {
        tol,
        ..PreimageConfig::default()
    };
    let sol = preimage_with(n, z, &config).map_err(|e| match e {
        VerifyError::OutsideRegion { margin } => CliError::Negative(format!(
            "z lies outside the region (margin {margin:.3e}); no SU({n}) preimage exists"
        )),
        VerifyError::NonConvergence { best_residual } => CliError::NonConvergence(best_residual),
        other => CliError::Usage(other.to_string()),
    })?;
    let mut rec = matrix_record("preimage", &sol.matrix);
    rec.param("n", n)
        .param("re", num(z.re))
        .param("im", num(z.im))
        .param("tol", num(tol))
        .param("alpha", num(sol.alpha))
        .param("omega", num(sol.omega))
        .param("residual", num(sol.residual));
    Ok(rec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyKind {
    Montecarlo,
    Preimage,
    ConstrainedMax,
    Prop1,
    So,
}

pub struct VerifyParams {
    pub kind: VerifyKind,
    pub n: usize,
    pub trials: u64,
    pub grid: usize,
    pub sweep: usize,
    pub points: u64,
    pub theta: Option<f64>,
    pub restarts: usize,
    pub tol: f64,
    pub seed: RngSeed,
}

pub fn verify(p: &VerifyParams) -> Result<VerificationReport, CliError> {
    check_tol(p.tol)?;
    let need = |min: usize| {
        if p.n < min {
            Err(CliError::Usage(format!("this kind requires --n >= {min}")))
        } else {
            Ok(())
        }
    };
    let report = match p.kind {
        VerifyKind::Montecarlo => monte_carlo_containment(p.n, p.trials, p.seed, p.tol),
        VerifyKind::Prop1 => {
            need(2)?;
            verify_proposition1(p.n, p.trials, p.seed, p.grid)
        }
        VerifyKind::So => {
            need(2)?;
            if p.sweep == 0 {
                return Err(CliError::Usage("--sweep must be positive".into()));
            }
            verify_so_interval(p.n, p.sweep, p.trials, p.seed)
        }
        VerifyKind::Preimage => {
            need(3)?;
            verify_preimages(p.n, p.points, p.seed, p.tol).map_err(|e| CliError::Usage(e.to_string()))?
        }
        VerifyKind::ConstrainedMax => {
            need(3)?;
            let theta = p
                .theta
                .ok_or_else(|| CliError::Usage("--kind constrained-max requires --theta".into()))?;
            finite(theta, "--theta")?;
            let config = OptimizerConfig {
                restarts: p.restarts,
                ..OptimizerConfig::default()
            };
            constrained_max_numeric(p.n, theta, &config, p.seed).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    Ok(report)
}

pub fn report_record(report: &VerificationReport, p: &VerifyParams) -> OutputRecord {
    let mut rec = OutputRecord::new("verify", &["index", "measured", "expected", "error"]);
    rec.param("kind", report.kind.as_str())
        .param("n", report.n)
        .param("seed", report.seed.0)
        .param("trials", report.trials)
        .param("failures", report.failures)
        .param("worst_margin", num(report.worst_margin))
        .param("passed", report.passed())
        .param("tol", num(p.tol));
    match p.kind {
        VerifyKind::Prop1 => {
            rec.param("grid", p.grid);
        }
        VerifyKind::So => {
            rec.param("sweep", p.sweep);
        }
        _ => {}
    }
    if let Some(opt) = &report.optimum {
        rec.param("theta", num(opt.theta))
            .param("target", num(opt.target))
            .param("best_value", num(opt.best_value))
            .param("best_restart", opt.best_restart)
            .param("constraint_residual", num(opt.constraint_residual))
            .param("recognized", opt.recognized.is_some());
        if let Some(d) = &opt.recognized {
            rec.param("recognized_alpha", num(d.alpha));
        }
        let entries: Vec<Value> = opt
            .maximizer
            .as_slice()
            .iter()
            .flat_map(|z| [num(z.re), num(z.im)])
            .collect();
        rec.param("maximizer_row_major_re_im", Value::Array(entries));
    }
    let mut labels = Vec::with_capacity(report.details.len());
    for d in &report.details {
        rec.push(vec![d.index as f64, d.measured, d.expected, d.error]);
        labels.push(d.input.clone());
    }
    rec.labels = Some(labels);
    rec
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage("--tol must be positive".into()))
    }
}

fn finite(x: f64, flag: &str) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{flag} must be finite")))
    }
}
