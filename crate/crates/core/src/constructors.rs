//! Explicit matrix families and recognition of boundary-attaining matrices.
//!
//! Every matrix in SU(n) whose diagonal product lies on the boundary curve has
//! the form
//!
//! ```text
//! U = (I − (1 − e^{−iα}) v v†) · diag(e^{iα_1}, …, e^{iα_n}),
//! |v_k| = 1/√n,   e^{i Σ α_k} = e^{iα},
//! ```
//!
//! and then `Π_d(U) = γ(α)`. [`build_extremal`] goes forward,
//! [`recognize_extremal`] goes back.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::boundary::{self, normalize_angle, DEFAULT_INVERSE_TOL};
use crate::error::ConstructError;
use crate::matrix::{diag_product, is_unitary, CMatrix, ComplexValue};
use crate::region::{su_region_contains, MembershipStatus};

/// Tolerance for the invariants of [`ExtremalDecomposition`].
pub const DECOMPOSITION_TOL: f64 = 1e-10;

const POWER_ITERATIONS: usize = 100;
const ALPHA_REFINE_STEPS: usize = 8;

/// Data `(α, v, α_1…α_n)` of a boundary-attaining matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalDecomposition {
    /// In `(−π, π]`.
    pub alpha: f64,
    pub v: Vec<Complex64>,
    /// Principal values; only `e^{i Σ α_k}` is constrained.
    pub diag_phases: Vec<f64>,
}

impl ExtremalDecomposition {
    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// Checks `|v_k| = 1/√n` and `e^{iΣα_k} = e^{iα}` within `tol`.
    pub fn validate(&self, tol: f64) -> Result<(), ConstructError> {
        let n = self.v.len();
        if n == 0 {
            return Err(ConstructError::DimensionTooSmall { n, min: 1 });
        }
        if self.diag_phases.len() != n {
            return Err(ConstructError::Length {
                what: "diagonal phases",
                got: self.diag_phases.len(),
                expected: n,
            });
        }
        if !self.alpha.is_finite()
            || self.v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite())
            || self.diag_phases.iter().any(|p| !p.is_finite())
        {
            return Err(ConstructError::NonFinite);
        }
        let expected = 1.0 / (n as f64).sqrt();
        for (index, vk) in self.v.iter().enumerate() {
            let modulus = vk.norm();
            if (modulus - expected).abs() > tol {
                return Err(ConstructError::VectorModulus {
                    index,
                    modulus,
                    expected,
                });
            }
        }
        let sum: f64 = self.diag_phases.iter().sum();
        let mismatch =
            (Complex64::from_polar(1.0, sum) - Complex64::from_polar(1.0, self.alpha)).norm();
        if mismatch > tol {
            return Err(ConstructError::PhaseSum { mismatch });
        }
        Ok(())
    }

    /// The rank-one projector `v v†`.
    pub fn projector(&self) -> CMatrix {
        CMatrix::from_fn(self.n(), |i, j| self.v[i] * self.v[j].conj())
    }

    /// Random valid decomposition with the given `α`: uniform phases for `v`
    /// and for the first `n − 1` diagonal angles, the last one fixing the sum.
    pub fn random<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Self {
        assert!(n >= 1, "n must be positive");
        let alpha = principal_angle(alpha);
        let scale = 1.0 / (n as f64).sqrt();
        let v = (0..n)
            .map(|_| Complex64::from_polar(scale, rng.random_range(-PI..PI)))
            .collect();
        let mut diag_phases: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-PI..PI)).collect();
        let rest: f64 = diag_phases.iter().sum();
        diag_phases.push(principal_angle(alpha - rest));
        Self {
            alpha,
            v,
            diag_phases,
        }
    }

    /// Phase gauge: first nonzero component of `v` real and nonnegative.
    fn fix_gauge(&mut self) {
        if let Some(k) = self.v.iter().position(|x| x.norm() > 0.0) {
            let first = self.v[k];
            let rot = first.conj() / first.norm();
            for x in &mut self.v {
                *x *= rot;
            }
            self.v[k] = Complex64::new(first.norm(), 0.0);
        }
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn principal_angle(a: f64) -> f64 {
    let r = normalize_angle(a);
    if r == -PI {
        PI
    } else {
        r
    }
}

#[inline]
fn rank_one_coefficient(alpha: f64) -> Complex64 {
    // 1 − e^{−iα}
    let h = (0.5 * alpha).sin();
    Complex64::new(2.0 * h * h, alpha.sin())
}

/// `(I − c·v w†) · diag(d)` with `c = 1 − e^{−iα}`.
fn rank_one_update_times_diag(
    alpha: f64,
    v: &[Complex64],
    w: &[Complex64],
    diag: &[Complex64],
) -> CMatrix {
    let c = rank_one_coefficient(alpha);
    CMatrix::from_fn(v.len(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        (Complex64::new(delta, 0.0) - c * v[i] * w[j].conj()) * diag[j]
    })
}

/// Builds `(I − (1 − e^{−iα}) v v†) · diag(e^{iα_k})`.
pub fn build_extremal(d: &ExtremalDecomposition) -> Result<CMatrix, ConstructError> {
    d.validate(DECOMPOSITION_TOL)?;
    let phases: Vec<_> = d
        .diag_phases
        .iter()
        .map(|&p| Complex64::from_polar(1.0, p))
        .collect();
    Ok(rank_one_update_times_diag(d.alpha, &d.v, &d.v, &phases))
}

/// `(I − (1 − e^{−iα}) V V†) · diag(e^{iα_k})` for a matrix `V` with
/// orthonormal columns, given as a list of columns.
///
/// With `m` columns whose rows all have squared norm `m/n`, and
/// `e^{iΣα_k} = e^{imα}`, the diagonal product is `Γ(α, m)`.
pub fn build_projector_family(
    alpha: f64,
    columns: &[Vec<Complex64>],
    diag_phases: &[f64],
) -> Result<CMatrix, ConstructError> {
    let n = diag_phases.len();
    if n == 0 {
        return Err(ConstructError::DimensionTooSmall { n, min: 1 });
    }
    if let Some(col) = columns.iter().find(|c| c.len() != n) {
        return Err(ConstructError::Length {
            what: "column entries",
            got: col.len(),
            expected: n,
        });
    }
    let c = rank_one_coefficient(alpha);
    Ok(CMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        let vv: Complex64 = columns.iter().map(|col| col[i] * col[j].conj()).sum();
        (Complex64::new(delta, 0.0) - c * vv) * Complex64::from_polar(1.0, diag_phases[j])
    }))
}

/// `U_θ = e^{iα(θ)/n} (I − (1 − e^{−iα(θ)}) v vᵀ)` with `v_k = 1/√n`.
///
/// Its diagonal product is `e^{iθ} |γ(α(θ))|`.
pub fn build_u_theta(n: usize, theta: f64) -> Result<CMatrix, ConstructError> {
    if n < 3 {
        return Err(ConstructError::DimensionTooSmall { n, min: 3 });
    }
    let alpha = boundary::alpha_of_theta(n, theta, DEFAULT_INVERSE_TOL)
        .map_err(|_| ConstructError::NonFinite)?;
    let nf = n as f64;
    let c = rank_one_coefficient(alpha);
    let global = Complex64::from_polar(1.0, alpha / nf);
    Ok(CMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        global * (Complex64::new(delta, 0.0) - c / nf)
    }))
}

/// Upper end `arctan √(n−1)` of the homotopy parameter.
pub fn homotopy_omega_max(n: usize) -> f64 {
    ((n - 1) as f64).sqrt().atan()
}

/// Closed form of `Π_d(A(α, ω))`:
/// `e^{iα} [1 − (1−e^{−iα}) cos²ω] [1 − (1−e^{−iα}) sin²ω/(n−1)]^{n−1}`.
pub fn homotopy_diag_product(n: usize, alpha: f64, omega: f64) -> ComplexValue {
    assert!(n >= 2, "n must be at least 2");
    let c = rank_one_coefficient(alpha);
    let (s, co) = omega.sin_cos();
    let one = Complex64::new(1.0, 0.0);
    let head = one - c * (co * co);
    let tail = one - c * (s * s / (n - 1) as f64);
    Complex64::from_polar(1.0, alpha) * head * boundary::cpowi(tail, (n - 1) as u32)
}

/// `A(α, ω) = (I − (1 − e^{−iα}) v(ω) v(ω)†) · diag(e^{iα}, 1, …, 1)` with
/// `v(ω) = (cos ω, sin ω/√(n−1), …, sin ω/√(n−1))`.
pub fn build_homotopy_matrix(n: usize, alpha: f64, omega: f64) -> Result<CMatrix, ConstructError> {
    if n < 2 {
        return Err(ConstructError::DimensionTooSmall { n, min: 2 });
    }
    let max = homotopy_omega_max(n);
    if !(omega >= -1e-12 && omega <= max + 1e-12) {
        return Err(ConstructError::OmegaOutOfRange { omega, max });
    }
    let omega = omega.clamp(0.0, max);
    let (s, co) = omega.sin_cos();
    let tail = s / ((n - 1) as f64).sqrt();
    let v: Vec<_> = (0..n)
        .map(|k| Complex64::new(if k == 0 { co } else { tail }, 0.0))
        .collect();
    let mut diag = vec![Complex64::new(1.0, 0.0); n];
    diag[0] = Complex64::from_polar(1.0, alpha);
    let mut a = rank_one_update_times_diag(alpha, &v, &v, &diag);
    if alpha == PI || alpha == -PI {
        // the real family; drop the sin(π) residue
        for i in 0..n {
            for j in 0..n {
                a[(i, j)].im = 0.0;
            }
        }
    }
    Ok(a)
}

/// Complex signum with `sgn 0 = 0`.
pub fn csgn(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z / r
    }
}

/// `U_z ⊕ I_{n−2}`, a unitary matrix with diagonal product `z` for `|z| ≤ 1`.
pub fn build_u_z(n: usize, z: ComplexValue) -> Result<CMatrix, ConstructError> {
    if n < 2 {
        return Err(ConstructError::DimensionTooSmall { n, min: 2 });
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(ConstructError::NonFinite);
    }
    let modulus = z.norm();
    if modulus > 1.0 + 1e-12 {
        return Err(ConstructError::OutsideUnitDisk { modulus });
    }
    // |z| = 1 up to roundoff must give a diagonal matrix
    let m = if modulus >= 1.0 - 4.0 * f64::EPSILON { 1.0 } else { modulus };
    let a = m.sqrt();
    let b = (1.0 - m).sqrt();
    // any unit phase works at z = 0; sgn 0 = 0 would break unitarity
    let s = if modulus == 0.0 { Complex64::new(1.0, 0.0) } else { csgn(z) };
    let mut u = CMatrix::identity(n);
    u[(0, 0)] = s * a;
    u[(0, 1)] = Complex64::new(-b, 0.0);
    u[(1, 0)] = s * b;
    u[(1, 1)] = Complex64::new(a, 0.0);
    Ok(u)
}

/// Writes `[[z, −w̄], [w, z̄]] ∈ SU(2)` in extremal form, case by case:
/// `w = 0`, `z = 0`, or both nonzero.
pub fn decompose_su2(z: ComplexValue, w: ComplexValue) -> Result<ExtremalDecomposition, ConstructError> {
    let norm = z.norm_sqr() + w.norm_sqr();
    if !norm.is_finite() {
        return Err(ConstructError::NonFinite);
    }
    if (norm - 1.0).abs() > 1e-12 {
        return Err(ConstructError::NotNormalized { norm });
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    let (e1, e2, v) = if w == zero {
        // any v works here
        (z, z.conj(), vec![Complex64::new(h, 0.0); 2])
    } else if z == zero {
        (
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            vec![Complex64::new(h, 0.0), w * h],
        )
    } else {
        let zeta = Complex64::new(z.norm(), w.norm());
        (
            zeta * csgn(z),
            zeta * csgn(z.conj()),
            vec![csgn(z) * h, Complex64::new(0.0, 1.0) * csgn(w) * h],
        )
    };
    Ok(ExtremalDecomposition {
        alpha: principal_angle((e1 * e2).arg()),
        v,
        diag_phases: vec![e1.arg(), e2.arg()],
    })
}

/// Recovers `(α, v, α_k)` from a boundary-attaining SU(n) matrix.
///
/// Returns `Ok(None)` when the diagonal product is not on the boundary within
/// `tol`, or when the recovered projector fails the structure checks
/// (Hermitian, idempotent, trace 1, diagonal `1/n`). `v` is returned with its
/// first component real and nonnegative.
pub fn recognize_extremal(
    u: &CMatrix,
    tol: f64,
) -> Result<Option<ExtremalDecomposition>, ConstructError> {
    if !u.is_finite() {
        return Err(ConstructError::NonFinite);
    }
    if !is_unitary(u, tol) {
        return Err(ConstructError::NotUnitary { tol });
    }
    let n = u.n();
    if (u.det() - 1.0).norm() > tol {
        return Ok(None);
    }
    if n == 1 {
        return Ok(Some(ExtremalDecomposition {
            alpha: 0.0,
            v: vec![Complex64::new(1.0, 0.0)],
            diag_phases: vec![u[(0, 0)].arg()],
        }));
    }
    if n == 2 {
        let mut d = decompose_su2(u[(0, 0)], u[(1, 0)]).or_else(|_| {
            // renormalize the first column when it is only unit within tol
            let norm = (u[(0, 0)].norm_sqr() + u[(1, 0)].norm_sqr()).sqrt();
            decompose_su2(u[(0, 0)] / norm, u[(1, 0)] / norm)
        })?;
        d.fix_gauge();
        return Ok(Some(d));
    }

    let p = diag_product(u);
    if su_region_contains(n, p, tol).status != MembershipStatus::OnBoundary {
        return Ok(None);
    }
    let nf = n as f64;
    let uniform = 1.0 / nf.sqrt();

    if u.max_off_diagonal() <= tol {
        let mut d = ExtremalDecomposition {
            alpha: 0.0,
            v: vec![Complex64::new(uniform, 0.0); n],
            diag_phases: u.diagonal().iter().map(|x| x.arg()).collect(),
        };
        spread_phase_error(&mut d);
        return Ok(Some(d));
    }

    let alpha = recover_alpha(n, p);
    let c = rank_one_coefficient(alpha);
    let entry_factor = Complex64::new(1.0, 0.0) - c / nf;
    let diag_phases: Vec<f64> = u
        .diagonal()
        .iter()
        .map(|x| principal_angle(x.arg() - entry_factor.arg()))
        .collect();
    // P = (I − U·diag(e^{−iα_j})) / c
    let undo: Vec<_> = diag_phases
        .iter()
        .map(|&a| Complex64::from_polar(1.0, -a))
        .collect();
    let m = u.mul_diagonal(&undo);
    let proj = CMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        (Complex64::new(delta, 0.0) - m[(i, j)]) / c
    });
    if !is_rank_one_projector(&proj, tol) {
        return Ok(None);
    }

    let v = dominant_vector(&proj, tol);
    let mut d = ExtremalDecomposition {
        alpha,
        v: v.iter().map(|x| csgn(*x) * uniform).collect(),
        diag_phases,
    };
    d.fix_gauge();
    spread_phase_error(&mut d);
    Ok(Some(d))
}

/// `α` with `γ(α) = p`: the angle inverse gives the start, Gauss-Newton on the
/// complex residual sharpens it where `θ'(α)` is small.
fn recover_alpha(n: usize, p: Complex64) -> f64 {
    let theta = p.arg();
    let mut alpha = boundary::alpha_of_theta(n, theta, DEFAULT_INVERSE_TOL).unwrap_or(0.0);
    let mut residual = (boundary::gamma(n, alpha) - p).norm();
    for _ in 0..ALPHA_REFINE_STEPS {
        let d = boundary::gamma_derivative(n, alpha).expect("n >= 3");
        let d2 = d.norm_sqr();
        if d2 == 0.0 {
            break;
        }
        let r = boundary::gamma(n, alpha) - p;
        let step = (d.conj() * r).re / d2;
        let candidate = principal_angle(alpha - step);
        let cand_res = (boundary::gamma(n, candidate) - p).norm();
        if cand_res >= residual {
            break;
        }
        alpha = candidate;
        residual = cand_res;
    }
    principal_angle(alpha)
}

fn is_rank_one_projector(p: &CMatrix, tol: f64) -> bool {
    let n = p.n();
    let inv_n = 1.0 / n as f64;
    let hermitian = p.max_abs_diff(&p.adjoint()) <= tol;
    let idempotent = (&(p * p) - p).max_abs() <= tol;
    let trace = (p.trace() - 1.0).norm() <= tol;
    let diag = p.diagonal().iter().all(|d| (d - inv_n).norm() <= tol);
    hermitian && idempotent && trace && diag
}

/// Unit dominant eigenvector of a near rank-one projector by power iteration
/// started from its largest-diagonal column.
fn dominant_vector(p: &CMatrix, tol: f64) -> Vec<Complex64> {
    let n = p.n();
    let start = (0..n)
        .max_by(|&a, &b| p[(a, a)].re.total_cmp(&p[(b, b)].re))
        .unwrap_or(0);
    let mut x: Vec<Complex64> = (0..n).map(|i| p[(i, start)]).collect();
    normalize(&mut x);
    for _ in 0..POWER_ITERATIONS {
        let mut y: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|j| p[(i, j)] * x[j]).sum())
            .collect();
        normalize(&mut y);
        // compare up to phase
        let overlap: Complex64 = x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
        let phase = csgn(overlap);
        let change = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max);
        x = y;
        if change < tol {
            break;
        }
    }
    x
}

fn normalize(x: &mut [Complex64]) {
    let norm = x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in x {
            *a /= norm;
        }
    }
}

/// Distributes `α − Σα_k` (wrapped) evenly so the phase sum matches exactly.
fn spread_phase_error(d: &mut ExtremalDecomposition) {
    let sum: f64 = d.diag_phases.iter().sum();
    let err = principal_angle(d.alpha - sum);
    let share = err / d.diag_phases.len() as f64;
    for p in &mut d.diag_phases {
        *p = principal_angle(*p + share);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::RngSeed;
    use crate::matrix::{is_special_orthogonal, is_special_unitary, GROUP_TOL};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn extremal_alpha_zero_is_diagonal() {
        let mut rng = RngSeed(3).rng();
        for n in 2..7 {
            let d = ExtremalDecomposition::random(n, 0.0, &mut rng);
            let u = build_extremal(&d).unwrap();
            assert!(u.max_off_diagonal() < 1e-15);
            assert!((diag_product(&u) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn extremal_alpha_pi_is_real_reflection() {
        for n in 2..8 {
            let mut phases = vec![0.0; n];
            phases[0] = PI;
            let d = ExtremalDecomposition {
                alpha: PI,
                v: vec![c(1.0 / (n as f64).sqrt(), 0.0); n],
                diag_phases: phases,
            };
            let u = build_extremal(&d).unwrap();
            assert!(u.is_real(1e-15));
            let expected = -(1.0 - 2.0 / n as f64).powi(n as i32);
            assert!((diag_product(&u) - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn extremal_matches_gamma() {
        let s3 = 1.0 / 3f64.sqrt();
        let d = ExtremalDecomposition {
            alpha: 1.0,
            v: (1..=3).map(|k| Complex64::from_polar(s3, k as f64)).collect(),
            diag_phases: vec![1.0, 0.0, 0.0],
        };
        let u = build_extremal(&d).unwrap();
        assert!((diag_product(&u) - boundary::gamma(3, 1.0)).norm() < 1e-12);
        assert!(is_special_unitary(&u, GROUP_TOL));
    }

    #[test]
    fn extremal_diagonal_has_equal_moduli() {
        let mut rng = RngSeed(11).rng();
        for n in 2..8 {
            for _ in 0..20 {
                let alpha = rng.random_range(-PI..PI);
                let u = build_extremal(&ExtremalDecomposition::random(n, alpha, &mut rng)).unwrap();
                let expected = (c(1.0, 0.0) - rank_one_coefficient(alpha) / n as f64).norm();
                for x in u.diagonal() {
                    assert!((x.norm() - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn invalid_decompositions_are_rejected() {
        let good = ExtremalDecomposition {
            alpha: 0.5,
            v: vec![c(0.5f64.sqrt(), 0.0); 2],
            diag_phases: vec![0.25, 0.25],
        };
        assert!(build_extremal(&good).is_ok());
        let mut bad = good.clone();
        bad.v[1] = c(0.9, 0.0);
        assert!(matches!(
            build_extremal(&bad),
            Err(ConstructError::VectorModulus { index: 1, .. })
        ));
        let mut bad = good.clone();
        bad.diag_phases[0] = 0.3;
        assert!(matches!(build_extremal(&bad), Err(ConstructError::PhaseSum { .. })));
        let mut bad = good.clone();
        bad.diag_phases.pop();
        assert!(matches!(build_extremal(&bad), Err(ConstructError::Length { .. })));
        // congruent modulo 2π is accepted
        let mut shifted = good;
        shifted.diag_phases[0] += 2.0 * PI;
        assert!(build_extremal(&shifted).is_ok());
    }

    #[test]
    fn u_theta_examples() {
        for n in 3..7 {
            let u = build_u_theta(n, 0.0).unwrap();
            assert!(u.max_abs_diff(&CMatrix::identity(n)) < 1e-15);
        }
        let u = build_u_theta(3, PI).unwrap();
        assert!(is_special_unitary(&u, GROUP_TOL));
        assert!((diag_product(&u) - c(-1.0 / 27.0, 0.0)).norm() < 1e-10);

        let u = build_u_theta(4, 0.8).unwrap();
        assert!(is_special_unitary(&u, GROUP_TOL));
        assert!((diag_product(&u).arg() - 0.8).abs() < 1e-9);
        let r = boundary::radius_of_theta(4, 0.8).unwrap().r;
        assert!((diag_product(&u) - Complex64::from_polar(r, 0.8)).norm() < 1e-9);
        assert!(build_u_theta(2, 0.1).is_err());
    }

    #[test]
    fn homotopy_examples() {
        for n in 2..8 {
            let max = homotopy_omega_max(n);
            for k in 0..=12 {
                let alpha = -PI + 2.0 * PI * k as f64 / 12.0;
                let a0 = build_homotopy_matrix(n, alpha, 0.0).unwrap();
                assert!((diag_product(&a0) - 1.0).norm() < 1e-12);
                let a1 = build_homotopy_matrix(n, alpha, max).unwrap();
                assert!(is_special_unitary(&a1, GROUP_TOL));
                assert!((diag_product(&a1) - boundary::gamma(n, alpha)).norm() < 1e-12);
                for j in 0..=6 {
                    let omega = max * j as f64 / 6.0;
                    let a = build_homotopy_matrix(n, alpha, omega).unwrap();
                    let closed = homotopy_diag_product(n, alpha, omega);
                    assert!((diag_product(&a) - closed).norm() < 1e-12);
                }
            }
        }
        for j in 0..=8 {
            let omega = homotopy_omega_max(4) * j as f64 / 8.0;
            assert!(is_special_orthogonal(&build_homotopy_matrix(4, PI, omega).unwrap(), GROUP_TOL));
        }
        assert!(build_homotopy_matrix(4, 0.3, -0.1).is_err());
        assert!(build_homotopy_matrix(4, 0.3, 1.3).is_err());
    }

    #[test]
    fn u_z_examples() {
        let u = build_u_z(3, c(1.0, 0.0)).unwrap();
        assert!(u.max_abs_diff(&CMatrix::identity(3)) < 1e-15);
        let u = build_u_z(4, c(0.0, 0.0)).unwrap();
        assert_eq!(u[(0, 0)], c(0.0, 0.0));
        assert_eq!(diag_product(&u), c(0.0, 0.0));
        assert!(is_unitary(&u, 1e-12));
        let z = Complex64::from_polar(0.3, 2.1);
        let u = build_u_z(5, z).unwrap();
        assert!(is_unitary(&u, 1e-12));
        assert!((diag_product(&u) - z).norm() < 1e-12);
        assert!(build_u_z(3, c(1.1, 0.0)).is_err());
        assert!(build_u_z(1, c(0.5, 0.0)).is_err());
    }

    fn su2(z: Complex64, w: Complex64) -> CMatrix {
        CMatrix::from_rows(&[vec![z, -w.conj()], vec![w, z.conj()]]).unwrap()
    }

    #[test]
    fn su2_cases() {
        let d = decompose_su2(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(d.diag_phases, vec![0.0, 0.0]);
        assert_eq!(d.alpha, 0.0);

        let d = decompose_su2(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(d.diag_phases, vec![PI, 0.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(d.v, vec![c(h, 0.0), c(h, 0.0)]);
        assert!(build_extremal(&d).unwrap().max_abs_diff(&su2(c(0.0, 0.0), c(1.0, 0.0))) < 1e-15);

        let d = decompose_su2(c(h, 0.0), c(h, 0.0)).unwrap();
        let expected =
            CMatrix::from_rows(&[vec![c(h, 0.0), c(-h, 0.0)], vec![c(h, 0.0), c(h, 0.0)]]).unwrap();
        assert!(build_extremal(&d).unwrap().max_abs_diff(&expected) < 1e-12);

        assert!(decompose_su2(c(0.5, 0.0), c(0.5, 0.0)).is_err());
    }

    #[test]
    fn su2_reconstructs_random_matrices() {
        let mut rng = RngSeed(5).rng();
        for _ in 0..200 {
            let u = crate::haar::haar_special_unitary_with(2, &mut rng);
            let (z, w) = (u[(0, 0)], u[(1, 0)]);
            let scale = (z.norm_sqr() + w.norm_sqr()).sqrt();
            let (z, w) = (z / scale, w / scale);
            let d = decompose_su2(z, w).unwrap();
            let rebuilt = build_extremal(&d).unwrap();
            assert!(rebuilt.max_abs_diff(&su2(z, w)) < 1e-10);
            assert!((diag_product(&rebuilt) - boundary::gamma(2, d.alpha)).norm() < 1e-10);
        }
    }

    #[test]
    fn recognition_round_trip() {
        let mut rng = RngSeed(17).rng();
        for n in 2..7 {
            for _ in 0..50 {
                let mut alpha = rng.random_range(-PI..PI);
                if alpha.abs() < 1e-3 {
                    alpha = 0.5;
                }
                let d = ExtremalDecomposition::random(n, alpha, &mut rng);
                let u = build_extremal(&d).unwrap();
                let r = recognize_extremal(&u, 1e-9).unwrap().expect("boundary matrix");
                let dist = principal_angle(r.alpha - d.alpha).abs();
                if n == 2 {
                    // γ is even for n = 2: recognition returns |α|
                    assert!((r.alpha - d.alpha.abs()).abs() < 1e-9);
                } else {
                    assert!(dist < 1e-9, "n={n} alpha={alpha} got {}", r.alpha);
                    assert!(r.projector().max_abs_diff(&d.projector()) < 1e-9);
                }
                assert!(r.validate(1e-10).is_ok());
                assert!(build_extremal(&r).unwrap().max_abs_diff(&u) < 1e-9);
                assert!(r.v[0].im == 0.0 && r.v[0].re >= 0.0);
            }
        }
    }

    #[test]
    fn recognition_of_identity_and_interior() {
        for n in 3..6 {
            let d = recognize_extremal(&CMatrix::identity(n), 1e-9).unwrap().unwrap();
            assert_eq!(d.alpha, 0.0);
            assert!(d.v.iter().all(|x| (x.re - 1.0 / (n as f64).sqrt()).abs() < 1e-15));
        }
        let mut interior = 0;
        for s in 0..50u64 {
            let u = crate::haar::haar_special_unitary(3, RngSeed(s));
            if recognize_extremal(&u, 1e-9).unwrap().is_none() {
                interior += 1;
            }
        }
        assert_eq!(interior, 50);
        let not_unitary = CMatrix::from_diagonal(&[c(2.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)]);
        assert!(recognize_extremal(&not_unitary, 1e-9).is_err());
    }

    #[test]
    fn recognition_near_pi_wraps() {
        let mut rng = RngSeed(23).rng();
        for n in 3..6 {
            for &alpha in &[PI, -PI + 1e-12, PI - 1e-9] {
                let d = ExtremalDecomposition::random(n, alpha, &mut rng);
                let u = build_extremal(&d).unwrap();
                let r = recognize_extremal(&u, 1e-9).unwrap().unwrap();
                assert!(principal_angle(r.alpha - d.alpha).abs() < 1e-9);
                assert!(r.projector().max_abs_diff(&d.projector()) < 1e-9);
            }
        }
    }

    /// Orthonormal basis of the complement of `v`, by Gram-Schmidt on e_1…e_n.
    fn complement_basis(v: &[Complex64]) -> Vec<Vec<Complex64>> {
        let n = v.len();
        let mut basis: Vec<Vec<Complex64>> = vec![v.to_vec()];
        for k in 0..n {
            let mut e = vec![c(0.0, 0.0); n];
            e[k] = c(1.0, 0.0);
            for b in &basis {
                let dot: Complex64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                for (ei, bi) in e.iter_mut().zip(b) {
                    *ei -= dot * bi;
                }
            }
            let norm = e.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                basis.push(e.iter().map(|x| x / norm).collect());
            }
            if basis.len() == n {
                break;
            }
        }
        basis.remove(0);
        basis
    }

    #[test]
    fn complementary_projector_form_agrees() {
        // (I − (1−e^{−iα})VV†)·diag(e^{iα_k}) with VV† = I − vv† equals the
        // rank-one form at −α with phases α_k − α.
        let mut rng = RngSeed(29).rng();
        for n in 3..8 {
            for _ in 0..10 {
                let alpha = rng.random_range(-PI..PI);
                let base = ExtremalDecomposition::random(n, alpha, &mut rng);
                let cols = complement_basis(&base.v);
                assert_eq!(cols.len(), n - 1);
                let mut phases = base.diag_phases.clone();
                // e^{iΣα_k} = e^{i(n−1)α}
                let extra = (n as f64 - 2.0) * alpha;
                phases[0] += extra;
                let lhs = build_projector_family(alpha, &cols, &phases).unwrap();
                let tilde = ExtremalDecomposition {
                    alpha: principal_angle(-alpha),
                    v: base.v.clone(),
                    diag_phases: phases.iter().map(|p| p - alpha).collect(),
                };
                let rhs = build_extremal(&tilde).unwrap();
                assert!(lhs.max_abs_diff(&rhs) < 1e-12);
                assert!((diag_product(&lhs) - boundary::gamma(n, -alpha)).norm() < 1e-12);
                let gm = boundary::big_gamma(n, alpha, (n - 1) as f64).unwrap();
                assert!((diag_product(&lhs) - gm).norm() < 1e-12);
            }
        }
    }
}
