//! Haar-distributed samples from U(n), SU(n) and SO(n).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{qr_householder, CMatrix};

/// Seed for every randomized routine. Same seed, same parameters, same bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Per-trial seed: splitmix64 of the base seed offset by the index.
    pub fn derive(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(
            self.0 ^ splitmix64(index.wrapping_add(0x6a09_e667_f3bc_c909)),
        ))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// QR of a complex Gaussian matrix with the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, |_, _| complex_gaussian(rng));
    let (mut q, r_diag) = qr_householder(&g);
    for (j, r) in r_diag.iter().enumerate() {
        let m = r.norm();
        if m > 0.0 {
            q.scale_column(j, r / m);
        }
    }
    q
}

pub fn haar_special_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    if n == 1 {
        return CMatrix::identity(1);
    }
    let mut u = haar_unitary_with(n, rng);
    let det = u.det();
    u.scale_column(0, (det / det.norm()).conj());
    u
}

pub fn haar_special_orthogonal_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, |_, _| Complex64::new(rng.sample(StandardNormal), 0.0));
    let (mut q, r_diag) = qr_householder(&g);
    for (j, r) in r_diag.iter().enumerate() {
        if r.re < 0.0 {
            q.scale_column(j, Complex64::new(-1.0, 0.0));
        }
    }
    if q.det().re < 0.0 {
        q.scale_column(0, Complex64::new(-1.0, 0.0));
    }
    // Householder on real input stays real up to signed zeros
    for i in 0..n {
        for j in 0..n {
            q[(i, j)].im = 0.0;
        }
    }
    q
}

pub fn haar_unitary(n: usize, seed: RngSeed) -> CMatrix {
    haar_unitary_with(n, &mut seed.rng())
}

pub fn haar_special_unitary(n: usize, seed: RngSeed) -> CMatrix {
    haar_special_unitary_with(n, &mut seed.rng())
}

pub fn haar_special_orthogonal(n: usize, seed: RngSeed) -> CMatrix {
    haar_special_orthogonal_with(n, &mut seed.rng())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{is_special_orthogonal, is_special_unitary, is_unitary, GROUP_TOL};

    #[test]
    fn su1_is_trivial() {
        let u = haar_special_unitary(1, RngSeed(99));
        assert!((u[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn samples_pass_group_predicates() {
        for n in 1..=8 {
            for s in 0..20u64 {
                let seed = RngSeed(s).derive(n as u64);
                assert!(is_unitary(&haar_unitary(n, seed), GROUP_TOL));
                let su = haar_special_unitary(n, seed);
                assert!(is_special_unitary(&su, GROUP_TOL));
                assert!((su.det() - 1.0).norm() < 1e-10);
                assert!(is_special_orthogonal(&haar_special_orthogonal(n, seed), GROUP_TOL));
            }
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = haar_special_unitary(5, RngSeed(7));
        let b = haar_special_unitary(5, RngSeed(7));
        assert_eq!(a, b);
        let c = haar_special_unitary(5, RngSeed(8));
        assert_ne!(a, c);
        assert_ne!(RngSeed(1).derive(0), RngSeed(1).derive(1));
    }

    #[test]
    fn first_entry_second_moment() {
        // E|U_11|^2 = 1/n under Haar measure
        let trials = 100_000;
        let mut rng = RngSeed(2024).rng();
        let mean: f64 = (0..trials)
            .map(|_| haar_unitary_with(3, &mut rng)[(0, 0)].norm_sqr())
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 1.0 / 3.0).abs() < 0.01, "mean = {mean}");
    }
}
