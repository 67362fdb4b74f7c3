//! Dense complex matrices, group-membership predicates and the diagonal product.
//!
//! Sizes here are small (a few dozen at most), so everything is a direct
//! O(n³) method over a row-major `Vec<Complex64>`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::MatrixError;

/// Complex scalar used throughout the crate.
pub type ComplexValue = Complex64;

/// Default tolerance for the group predicates.
pub const GROUP_TOL: f64 = 1e-10;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix size must be positive");
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from nested rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(MatrixError::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Row-major entries; `data.len()` must be a perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self, MatrixError> {
        let n = (data.len() as f64).sqrt().round() as usize;
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        if n * n != data.len() {
            return Err(MatrixError::NotSquare {
                rows: n,
                cols: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// `diag(e^{i φ_1}, …, e^{i φ_n})`.
    pub fn from_phases(phases: &[f64]) -> Self {
        let d: Vec<_> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        Self::from_diagonal(&d)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest off-diagonal entry modulus.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(self[(i, j)].norm());
                }
            }
        }
        m
    }

    /// Entrywise max-norm distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "size mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.im.abs() <= tol)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Multiplies column `j` by `s` in place.
    pub fn scale_column(&mut self, j: usize, s: Complex64) {
        for i in 0..self.n {
            self[(i, j)] *= s;
        }
    }

    /// `self · diag(d)`.
    pub fn mul_diagonal(&self, d: &[Complex64]) -> Self {
        assert_eq!(d.len(), self.n, "size mismatch");
        Self::from_fn(self.n, |i, j| self[(i, j)] * d[j])
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let factor = a[i * n + k] / pivot;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let upd = factor * a[k * n + j];
                    a[i * n + j] -= upd;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "size mismatch");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "size mismatch");
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "size mismatch");
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Product of the diagonal entries.
pub fn diag_product(m: &CMatrix) -> ComplexValue {
    (0..m.n()).map(|i| m[(i, i)]).product()
}

/// `max |(M†M − I)_ij| ≤ tol`.
pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    let n = m.n();
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                s += m[(k, i)].conj() * m[(k, j)];
            }
            if i == j {
                s -= 1.0;
            }
            if !(s.norm() <= tol) {
                return false;
            }
        }
    }
    true
}

pub fn is_special_unitary(m: &CMatrix, tol: f64) -> bool {
    is_unitary(m, tol) && (m.det() - 1.0).norm() <= tol
}

pub fn is_special_orthogonal(m: &CMatrix, tol: f64) -> bool {
    m.is_real(tol) && is_special_unitary(m, tol)
}

pub fn is_skew_hermitian(m: &CMatrix, tol: f64) -> bool {
    let n = m.n();
    (0..n).all(|i| (i..n).all(|j| (m[(i, j)] + m[(j, i)].conj()).norm() <= tol))
}

fn check_generator_indices(n: usize, j: usize, k: usize) -> Result<(), MatrixError> {
    if j == 0 || j >= k || k > n {
        return Err(MatrixError::GeneratorIndex { n, j, k });
    }
    Ok(())
}

/// Real antisymmetric generator: entry `(j,k)` is −1 and `(k,j)` is 1.
///
/// Indices are 1-based with `1 ≤ j < k ≤ n`.
pub fn generator_x(n: usize, j: usize, k: usize) -> Result<CMatrix, MatrixError> {
    check_generator_indices(n, j, k)?;
    let mut m = CMatrix::zeros(n);
    m[(j - 1, k - 1)] = Complex64::new(-1.0, 0.0);
    m[(k - 1, j - 1)] = Complex64::new(1.0, 0.0);
    Ok(m)
}

/// Imaginary symmetric generator: entries `(j,k)` and `(k,j)` are `i`.
pub fn generator_y(n: usize, j: usize, k: usize) -> Result<CMatrix, MatrixError> {
    check_generator_indices(n, j, k)?;
    let mut m = CMatrix::zeros(n);
    m[(j - 1, k - 1)] = Complex64::new(0.0, 1.0);
    m[(k - 1, j - 1)] = Complex64::new(0.0, 1.0);
    Ok(m)
}

/// Eigendecomposition `H = V diag(λ) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi. Only the Hermitian part of `h` is used.
pub fn hermitian_eigen(h: &CMatrix) -> HermitianEigen {
    let n = h.n();
    let mut a = h.clone();
    // symmetrize so roundoff in the input cannot stall the sweeps
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let beta = b.norm();
                if beta <= 1e-300 {
                    continue;
                }
                let phase = b / beta;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(e^{iφ}, 1) · [[c, s], [−s, c]] restricted to (p, q)
                let g00 = phase * c;
                let g01 = phase * s;
                let g10 = Complex64::new(-s, 0.0);
                let g11 = Complex64::new(c, 0.0);
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g00 + akq * g10;
                    a[(k, q)] = akp * g01 + akq * g11;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
                    a[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g00 + vkq * g10;
                    v[(k, q)] = vkp * g01 + vkq * g11;
                }
            }
        }
    }
    HermitianEigen {
        values: (0..n).map(|i| a[(i, i)].re).collect(),
        vectors: v,
    }
}

/// Skew-Hermitian tolerance accepted by [`exp_skew_hermitian`].
pub const SKEW_TOL: f64 = 1e-10;

/// `exp(A)` for skew-Hermitian `A`, via the eigendecomposition of `iA`.
///
/// The result is unitary to roundoff.
pub fn exp_skew_hermitian(a: &CMatrix) -> Result<CMatrix, MatrixError> {
    if !is_skew_hermitian(a, SKEW_TOL) {
        return Err(MatrixError::NotSkewHermitian);
    }
    let h = a.scale(Complex64::new(0.0, 1.0));
    let eig = hermitian_eigen(&h);
    // A = −iH, so exp(A) = V diag(e^{−iλ}) V†
    let phases: Vec<_> = eig
        .values
        .iter()
        .map(|&l| Complex64::from_polar(1.0, -l))
        .collect();
    let vd = eig.vectors.mul_diagonal(&phases);
    Ok(&vd * &eig.vectors.adjoint())
}

/// Householder QR. Returns `Q` (unitary) and the diagonal of `R`.
pub fn qr_householder(a: &CMatrix) -> (CMatrix, Vec<Complex64>) {
    let n = a.n();
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut r_diag = Vec::with_capacity(n);

    for k in 0..n {
        let norm_x = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let x0 = r[(k, k)];
        if norm_x == 0.0 {
            reflectors.push(Vec::new());
            r_diag.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            reflectors.push(Vec::new());
            r_diag.push(x0);
            continue;
        }
        // R ← (I − 2vv†/‖v‖²) R on rows k..n
        for j in k..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * r[(k + t, j)])
                .sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vt) in v.iter().enumerate() {
                r[(k + t, j)] -= vt * f;
            }
        }
        r_diag.push(r[(k, k)]);
        reflectors.push(v);
    }

    // Q = H_0 H_1 … H_{n-1}, accumulated right to left onto the identity
    let mut q = CMatrix::identity(n);
    for k in (0..n).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        let vnorm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * q[(k + t, j)])
                .sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vt) in v.iter().enumerate() {
                q[(k + t, j)] -= vt * f;
            }
        }
    }
    (q, r_diag)
}
