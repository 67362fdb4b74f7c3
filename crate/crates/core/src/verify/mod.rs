//! Numerical checks of the structure of the diagonal-product images.
//!
//! Every routine returns a [`VerificationReport`]. Randomized routines draw
//! trial `i` from `seed.derive(i)`, and aggregation is order-independent, so a
//! report is identical whether trials run serially or on the rayon pool.

mod optimizer;
mod preimage;

use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::boundary::BoundaryModel;
use crate::constructors::{build_homotopy_matrix, build_u_z, homotopy_omega_max};
use crate::haar::{haar_special_orthogonal, haar_special_unitary, haar_unitary, RngSeed};
use crate::matrix::{diag_product, is_special_orthogonal, is_unitary, CMatrix, GROUP_TOL};
use crate::region::{so_interval, su_region_contains_with, MembershipStatus};

pub use optimizer::{
    constrained_max_numeric, constrained_max_tolerance, ConstrainedOptimum, OptimizerConfig,
    RestartOutcome,
};
pub use preimage::{preimage, preimage_with, sample_interior_point, verify_preimages, PreimageConfig, PreimageSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReportKind {
    MonteCarlo,
    Preimage,
    ConstrainedMax,
    Proposition1,
    SoInterval,
}

impl ReportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportKind::MonteCarlo => "montecarlo",
            ReportKind::Preimage => "preimage",
            ReportKind::ConstrainedMax => "constrained-max",
            ReportKind::Proposition1 => "prop1",
            ReportKind::SoInterval => "so",
        }
    }
}

/// One checked case: what went in, what came out, what was expected.
#[derive(Clone, Debug, PartialEq)]
pub struct DetailRecord {
    pub index: u64,
    pub input: String,
    pub measured: f64,
    pub expected: f64,
    pub error: f64,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub kind: ReportKind,
    pub n: usize,
    pub trials: u64,
    pub failures: u64,
    /// Smallest signed margin seen; negative means a violation.
    pub worst_margin: f64,
    /// Sorted by `index`. Holds every failure, plus per-restart records for
    /// the constrained maximization.
    pub details: Vec<DetailRecord>,
    pub seed: RngSeed,
    pub elapsed: Duration,
    pub optimum: Option<ConstrainedOptimum>,
}

impl VerificationReport {
    fn new(kind: ReportKind, n: usize, seed: RngSeed) -> Self {
        Self {
            kind,
            n,
            trials: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
            details: Vec::new(),
            seed,
            elapsed: Duration::ZERO,
            optimum: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record_failure(&mut self, d: DetailRecord) {
        self.failures += 1;
        self.details.push(d);
    }

    fn observe_margin(&mut self, m: f64) {
        if m < self.worst_margin {
            self.worst_margin = m;
        }
    }

    fn finish(mut self, start: Instant) -> Self {
        self.details.sort_by(|a, b| a.index.cmp(&b.index).then(a.input.cmp(&b.input)));
        if self.worst_margin == f64::INFINITY {
            self.worst_margin = 0.0;
        }
        self.elapsed = start.elapsed();
        self
    }
}

/// Equality of results; wall-clock time is ignored.
impl PartialEq for VerificationReport {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.n == other.n
            && self.trials == other.trials
            && self.failures == other.failures
            && self.worst_margin.to_bits() == other.worst_margin.to_bits()
            && self.details == other.details
            && self.seed == other.seed
            && self.optimum == other.optimum
    }
}

#[cfg(feature = "parallel")]
pub(crate) fn map_trials<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_trials<T, F>(count: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..count).map(f).collect()
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.17e}{:+.17e}i", z.re, z.im)
}

/// Classifies the diagonal products of Haar SU(n) samples; `Outside` is a failure.
pub fn monte_carlo_containment(n: usize, trials: u64, seed: RngSeed, tol: f64) -> VerificationReport {
    assert!(n >= 1, "n must be positive");
    let start = Instant::now();
    let model = BoundaryModel::new(n);
    let outcomes = map_trials(trials, |i| {
        let u = haar_special_unitary(n, seed.derive(i));
        let p = diag_product(&u);
        (i, p, su_region_contains_with(&model, p, tol))
    });
    let mut report = VerificationReport::new(ReportKind::MonteCarlo, n, seed);
    report.trials = trials;
    for (i, p, verdict) in outcomes {
        report.observe_margin(verdict.signed_margin);
        if verdict.status == MembershipStatus::Outside {
            report.record_failure(DetailRecord {
                index: i,
                input: format!("trial {i}: diag product {}", fmt_c(p)),
                measured: p.norm(),
                expected: p.norm() + verdict.signed_margin,
                error: -verdict.signed_margin,
            });
        }
    }
    report.finish(start)
}

/// Unit-disk image of U(n): sampled bound, lattice of explicit preimages, and
/// the strict bound for visibly non-diagonal samples.
pub fn verify_proposition1(n: usize, trials: u64, seed: RngSeed, grid: usize) -> VerificationReport {
    assert!(n >= 2, "n must be at least 2");
    let start = Instant::now();
    let mut report = VerificationReport::new(ReportKind::Proposition1, n, seed);

    let samples = map_trials(trials, |i| {
        let u = haar_unitary(n, seed.derive(i));
        (i, diag_product(&u).norm(), u.max_off_diagonal())
    });
    for (i, modulus, off) in samples {
        report.trials += 1;
        report.observe_margin(1.0 - modulus);
        if modulus > 1.0 + 1e-12 {
            report.record_failure(DetailRecord {
                index: i,
                input: format!("sample {i}: |diag product| exceeds 1"),
                measured: modulus,
                expected: 1.0,
                error: modulus - 1.0,
            });
        } else if off > 1e-3 && modulus >= 1.0 - 1e-9 {
            report.record_failure(DetailRecord {
                index: i,
                input: format!("sample {i}: off-diagonal {off:.3e} but |diag product| near 1"),
                measured: modulus,
                expected: 1.0 - 1e-9,
                error: modulus - (1.0 - 1e-9),
            });
        }
    }

    if grid >= 2 {
        let base = trials;
        for a in 0..grid {
            for b in 0..grid {
                let x = -1.0 + 2.0 * a as f64 / (grid - 1) as f64;
                let y = -1.0 + 2.0 * b as f64 / (grid - 1) as f64;
                let z = Complex64::new(x, y);
                if z.norm() > 1.0 {
                    continue;
                }
                report.trials += 1;
                let index = base + (a * grid + b) as u64;
                let u = build_u_z(n, z).expect("|z| <= 1");
                let err = (diag_product(&u) - z).norm();
                let unitary = is_unitary(&u, 1e-12);
                if err > 1e-12 || !unitary {
                    report.record_failure(DetailRecord {
                        index,
                        input: format!("lattice z = {}", fmt_c(z)),
                        measured: diag_product(&u).norm(),
                        expected: z.norm(),
                        error: err,
                    });
                }
            }
        }
        // points of the unit circle come from diagonal matrices
        for k in 0..grid {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / grid as f64);
            report.trials += 1;
            let u = build_u_z(n, z).expect("unit circle");
            let off = u.max_off_diagonal();
            if off > 0.0 || (diag_product(&u) - z).norm() > 1e-12 {
                report.record_failure(DetailRecord {
                    index: base + (grid * grid + k) as u64,
                    input: format!("unit circle z = {}", fmt_c(z)),
                    measured: off,
                    expected: 0.0,
                    error: off,
                });
            }
        }
    }
    report.finish(start)
}

/// Sweep of `Π_d(A(π, ω))` over `sweep` steps: `sweep + 1` real values.
pub fn so_sweep_values(n: usize, sweep: usize) -> Vec<Complex64> {
    let max = homotopy_omega_max(n);
    (0..=sweep)
        .map(|k| {
            let omega = if k == sweep { max } else { max * k as f64 / sweep as f64 };
            diag_product(&build_homotopy_matrix(n, std::f64::consts::PI, omega).expect("in range"))
        })
        .collect()
}

/// Largest gap between consecutive sorted values, including both interval ends.
pub fn coverage_gap(values: &[f64], low: f64, high: f64) -> f64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut gap: f64 = 0.0;
    let mut prev = low;
    for v in sorted {
        gap = gap.max(v - prev);
        prev = v;
    }
    gap.max(high - prev)
}

/// `(I − 2uuᵀ)·diag(σ)` with `u_k = ±1/√n`.
pub fn reflection_extremizer(u_signs: &[f64], sigma: &[f64]) -> CMatrix {
    let n = u_signs.len();
    let s = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new((delta - 2.0 * u_signs[i] * u_signs[j] * s * s) * sigma[j], 0.0)
    })
}

/// `Π_d(SO(n))`: coverage by the real homotopy family, Haar SO(n) samples,
/// and both endpoint extremizers.
pub fn verify_so_interval(n: usize, sweep: usize, trials: u64, seed: RngSeed) -> VerificationReport {
    assert!(n >= 2, "n must be at least 2");
    assert!(sweep >= 1, "sweep must be positive");
    let start = Instant::now();
    let (low, high) = so_interval(n);
    let width = high - low;
    let mut report = VerificationReport::new(ReportKind::SoInterval, n, seed);
    let mut index = 0u64;

    // (a) real sweep
    let values = so_sweep_values(n, sweep);
    for v in &values {
        report.trials += 1;
        if v.im.abs() > 1e-12 {
            report.record_failure(DetailRecord {
                index,
                input: "sweep value not real".into(),
                measured: v.im,
                expected: 0.0,
                error: v.im.abs(),
            });
        }
        index += 1;
    }
    let reals: Vec<f64> = values.iter().map(|v| v.re).collect();
    let gap = coverage_gap(&reals, low, high);
    let allowed = 2.0 * width / sweep as f64;
    report.trials += 1;
    report.observe_margin(allowed - gap);
    if !(gap < allowed) {
        report.record_failure(DetailRecord {
            index,
            input: format!("sweep coverage gap ({sweep} steps)"),
            measured: gap,
            expected: allowed,
            error: gap - allowed,
        });
    }
    index += 1;
    for (what, got, want) in [("sweep start", reals[0], high), ("sweep end", reals[sweep], low)] {
        report.trials += 1;
        if (got - want).abs() > 1e-12 {
            report.record_failure(DetailRecord {
                index,
                input: what.into(),
                measured: got,
                expected: want,
                error: (got - want).abs(),
            });
        }
        index += 1;
    }

    // (b) Haar SO(n)
    let base = index;
    let samples = map_trials(trials, |i| {
        let u = haar_special_orthogonal(n, seed.derive(i));
        (i, diag_product(&u))
    });
    for (i, p) in samples {
        report.trials += 1;
        let inside = (p.re - low).min(high - p.re);
        report.observe_margin(inside);
        if p.im.abs() > 1e-12 || inside < -1e-9 {
            report.record_failure(DetailRecord {
                index: base + i,
                input: format!("SO sample {i}: diag product {}", fmt_c(p)),
                measured: p.re,
                expected: p.re.clamp(low, high),
                error: (-inside).max(p.im.abs()),
            });
        }
    }
    index = base + trials;

    // (c) extremizers; enumerate sign patterns for small n, a fixed family otherwise
    let patterns: Vec<u64> = if n <= 12 {
        (0..1u64 << n).collect()
    } else {
        (0..4096u64).map(crate::haar::splitmix64).collect()
    };
    for bits in patterns {
        let sigma: Vec<f64> = (0..n)
            .map(|j| if bits >> (j % 64) & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let negatives = sigma.iter().filter(|s| **s < 0.0).count();
        let (u, want) = if negatives % 2 == 0 {
            let d: Vec<_> = sigma.iter().map(|&s| Complex64::new(s, 0.0)).collect();
            (CMatrix::from_diagonal(&d), high)
        } else {
            // vary the reflection vector's signs with the pattern
            let u_signs: Vec<f64> = (0..n)
                .map(|j| if (bits.rotate_left(7) >> (j % 64)) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            (reflection_extremizer(&u_signs, &sigma), low)
        };
        report.trials += 1;
        let p = diag_product(&u);
        let err = (p - want).norm();
        if err > 1e-12 || !is_special_orthogonal(&u, GROUP_TOL) {
            report.record_failure(DetailRecord {
                index,
                input: format!("extremizer sign pattern {bits:#b}"),
                measured: p.re,
                expected: want,
                error: err,
            });
        }
        index += 1;
    }
    report.finish(start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_small_runs() {
        for n in 1..6 {
            let r = monte_carlo_containment(n, 2000, RngSeed(1), 1e-9);
            assert_eq!(r.failures, 0, "n={n}: {:?}", r.details.first());
            assert_eq!(r.trials, 2000);
        }
    }

    #[test]
    fn su1_products_are_exactly_one() {
        for i in 0..100 {
            let u = haar_special_unitary(1, RngSeed(5).derive(i));
            assert_eq!(diag_product(&u), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn su2_products_lie_on_unit_segment() {
        let tol = 1e-9;
        for i in 0..10_000 {
            let p = diag_product(&haar_special_unitary(2, RngSeed(8).derive(i)));
            assert!(p.im.abs() <= tol);
            assert!(p.re >= -tol && p.re <= 1.0 + tol);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = monte_carlo_containment(4, 500, RngSeed(42), 1e-9);
        let b = monte_carlo_containment(4, 500, RngSeed(42), 1e-9);
        assert_eq!(a, b);
        let serial: Vec<_> = (0..500)
            .map(|i| diag_product(&haar_special_unitary(4, RngSeed(42).derive(i))))
            .collect();
        let model = BoundaryModel::new(4);
        let worst = serial
            .iter()
            .map(|p| su_region_contains_with(&model, *p, 1e-9).signed_margin)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(worst.to_bits(), a.worst_margin.to_bits());
    }

    #[test]
    fn unit_disk_small() {
        let r = verify_proposition1(4, 2000, RngSeed(3), 21);
        assert!(r.passed(), "{:?}", r.details.first());
        assert!(r.trials > 2000);
    }

    #[test]
    fn so_interval_small() {
        for n in 2..7 {
            let r = verify_so_interval(n, 1000, 500, RngSeed(9));
            assert!(r.passed(), "n={n}: {:?}", r.details.first());
        }
    }

    #[test]
    fn so_examples() {
        let (lo, hi) = so_interval(3);
        let vals = so_sweep_values(3, 10);
        assert!((vals[0].re - hi).abs() < 1e-12);
        assert!((vals[10].re - lo).abs() < 1e-12);
        let d = CMatrix::from_diagonal(&[
            Complex64::new(-1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        assert_eq!(diag_product(&d), Complex64::new(1.0, 0.0));
        let refl = reflection_extremizer(&[1.0, 1.0, 1.0], &[-1.0, 1.0, 1.0]);
        assert!((diag_product(&refl) - Complex64::new(-1.0 / 27.0, 0.0)).norm() < 1e-12);
        assert!(is_special_orthogonal(&refl, GROUP_TOL));
    }

    #[test]
    fn coverage_gap_counts_ends() {
        assert_eq!(coverage_gap(&[0.5], 0.0, 1.0), 0.5);
        assert!((coverage_gap(&[0.1, 0.9, 0.5], 0.0, 1.0) - 0.4).abs() < 1e-15);
    }
}
