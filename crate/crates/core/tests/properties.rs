use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use sudiag_core::boundary::{
    alpha_of_theta, big_gamma, gamma, gamma_derivative, jacobian_big_gamma, radius_of_theta,
    theta_derivative, theta_of_alpha, DEFAULT_INVERSE_TOL,
};
use sudiag_core::constructors::{
    build_extremal, build_homotopy_matrix, build_u_z, decompose_su2, homotopy_diag_product,
    homotopy_omega_max, principal_angle, recognize_extremal,
};
use sudiag_core::haar::{haar_special_orthogonal, haar_special_unitary, haar_unitary};
use sudiag_core::matrix::{
    diag_product, exp_skew_hermitian, is_special_orthogonal, is_special_unitary, is_unitary,
    CMatrix, GROUP_TOL,
};
use sudiag_core::region::{so_interval, su_region_contains, u_region_contains, MembershipStatus};
use sudiag_core::verify::preimage;
use sudiag_core::{ExtremalDecomposition, RngSeed};

fn angle() -> impl Strategy<Value = f64> {
    -PI..=PI
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn curve_is_conjugate_symmetric_and_in_disk(n in 1usize..16, a in angle()) {
        let g = gamma(n, a);
        prop_assert!(g.norm() <= 1.0 + 1e-15);
        prop_assert!((gamma(n, -a) - g.conj()).norm() <= 1e-15);
    }

    #[test]
    fn derivative_matches_differences(n in 2usize..12, a in -3.0f64..3.0) {
        let h = 1e-6;
        let fd = (gamma(n, a + h) - gamma(n, a - h)) / (2.0 * h);
        prop_assert!((gamma_derivative(n, a).unwrap() - fd).norm() < 1e-7);
    }

    #[test]
    fn angle_map_is_increasing(n in 3usize..12, a in -3.1f64..3.1, step in 1e-6f64..0.03) {
        let t0 = theta_of_alpha(n, a).unwrap();
        let t1 = theta_of_alpha(n, a + step).unwrap();
        prop_assert!(t1 > t0 || (a.abs() < 1e-2 && t1 >= t0));
        prop_assert!(theta_derivative(n, a).unwrap() >= 0.0);
    }

    #[test]
    fn angle_inverse_round_trips(n in 3usize..12, a in angle()) {
        prop_assume!(a.abs() > 1e-3);
        let t = theta_of_alpha(n, a).unwrap();
        let back = alpha_of_theta(n, t, DEFAULT_INVERSE_TOL).unwrap();
        prop_assert!((back - a).abs() < 1e-8, "alpha {a} back {back}");
        prop_assert!((radius_of_theta(n, t).unwrap().r - gamma(n, a).norm()).abs() < 1e-12);
    }

    #[test]
    fn big_gamma_symmetry(n in 3usize..12, a in angle(), s in 0.0f64..=1.0) {
        let nf = n as f64;
        let y = 1.0 + s * (nf - 2.0);
        let g = big_gamma(n, a, y).unwrap();
        prop_assert!((big_gamma(n, a, nf - y).unwrap() - g.conj()).norm() < 1e-12);
        prop_assert!((big_gamma(n, -a, y).unwrap() - g.conj()).norm() < 1e-12);
        prop_assert!((big_gamma(n, a, 1.0).unwrap() - gamma(n, a)).norm() < 1e-14);
    }

    #[test]
    fn jacobian_positive_inside(n in 3usize..12, a in 1e-3f64..3.14, s in 1e-3f64..0.999) {
        let y = 1.0 + s * (n as f64 - 2.0);
        prop_assert!(jacobian_big_gamma(n, a, y).unwrap() > 0.0);
    }

    #[test]
    fn verdict_status_follows_margin(n in 1usize..9, re in -1.5f64..1.5, im in -1.5f64..1.5, tol in 1e-12f64..1e-2) {
        let v = su_region_contains(n, Complex64::new(re, im), tol);
        prop_assert_eq!(v.status == MembershipStatus::OnBoundary, v.signed_margin.abs() <= tol);
        prop_assert_eq!(v.status == MembershipStatus::Inside, v.signed_margin > tol);
    }

    #[test]
    fn scaling_toward_zero_stays_inside(n in 3usize..10, a in angle(), s in 0.0f64..0.999) {
        let z = gamma(n, a) * s;
        prop_assert!(su_region_contains(n, z, 1e-9).status.is_member());
        let beyond = gamma(n, a) * 1.01;
        prop_assert!(a.abs() < 1e-2 || su_region_contains(n, beyond, 1e-9).status == MembershipStatus::Outside);
    }

    #[test]
    fn haar_samples_respect_images(n in 2usize..8, seed in any::<u64>()) {
        let su = haar_special_unitary(n, RngSeed(seed));
        prop_assert!(is_special_unitary(&su, GROUP_TOL));
        prop_assert!(su_region_contains(n, diag_product(&su), 1e-9).status.is_member());
        let u = haar_unitary(n, RngSeed(seed));
        prop_assert!(u_region_contains(n, diag_product(&u), 1e-12).status.is_member());
        let so = haar_special_orthogonal(n, RngSeed(seed));
        prop_assert!(is_special_orthogonal(&so, GROUP_TOL));
        let p = diag_product(&so);
        let (lo, hi) = so_interval(n);
        prop_assert!(p.im == 0.0 && p.re >= lo - 1e-9 && p.re <= hi + 1e-9);
    }

    #[test]
    fn extremal_build_and_recognize(n in 3usize..8, a in angle(), seed in any::<u64>()) {
        prop_assume!(a.abs() >= 1e-3);
        let d = ExtremalDecomposition::random(n, a, &mut RngSeed(seed).rng());
        let u = build_extremal(&d).unwrap();
        prop_assert!(is_special_unitary(&u, GROUP_TOL));
        prop_assert!((diag_product(&u) - gamma(n, d.alpha)).norm() < 1e-10);
        let r = recognize_extremal(&u, 1e-9).unwrap().unwrap();
        prop_assert!(principal_angle(r.alpha - d.alpha).abs() < 1e-9);
        prop_assert!(build_extremal(&r).unwrap().max_abs_diff(&u) < 1e-9);
    }

    #[test]
    fn su2_decomposition_rebuilds(t in 0.0f64..=std::f64::consts::FRAC_PI_2, p in angle(), q in angle()) {
        let z = Complex64::from_polar(t.cos(), p);
        let w = Complex64::from_polar(t.sin(), q);
        let d = decompose_su2(z, w).unwrap();
        let u = build_extremal(&d).unwrap();
        let expected = CMatrix::from_rows(&[vec![z, -w.conj()], vec![w, z.conj()]]).unwrap();
        prop_assert!(u.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn u_z_reproduces_z(n in 2usize..8, r in 0.0f64..=1.0, p in angle()) {
        let z = Complex64::from_polar(r, p);
        let u = build_u_z(n, z).unwrap();
        prop_assert!(is_unitary(&u, 1e-12));
        prop_assert!((diag_product(&u) - z).norm() < 1e-12);
    }

    #[test]
    fn homotopy_closed_form(n in 2usize..9, a in angle(), s in 0.0f64..=1.0) {
        let w = s * homotopy_omega_max(n);
        let m = build_homotopy_matrix(n, a, w).unwrap();
        prop_assert!(is_special_unitary(&m, GROUP_TOL));
        prop_assert!((diag_product(&m) - homotopy_diag_product(n, a, w)).norm() < 1e-13);
    }

    #[test]
    fn skew_exponential_is_unitary(n in 1usize..7, entries in prop::collection::vec(-2.0f64..2.0, 72)) {
        let mut a = CMatrix::zeros(n);
        for i in 0..n {
            a[(i, i)] = Complex64::new(0.0, entries[i]);
            for j in i + 1..n {
                let z = Complex64::new(entries[8 + 8 * i + j], entries[40 + (8 * i + j) % 32]);
                a[(i, j)] = z;
                a[(j, i)] = -z.conj();
            }
        }
        let e = exp_skew_hermitian(&a).unwrap();
        prop_assert!(is_unitary(&e, 1e-12));
        prop_assert!((e.det() - a.trace().exp()).norm() < 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn preimages_hit_their_targets(n in 3usize..6, a in angle(), s in 0.0f64..0.98) {
        let z = gamma(n, a) * s;
        let u = preimage(n, z, 1e-9).unwrap();
        prop_assert!(is_special_unitary(&u, GROUP_TOL));
        prop_assert!((diag_product(&u) - z).norm() <= 1e-9);
    }
}
