//! Browser bindings for the demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain function so the logic runs
//! under `cargo test` on the host as well.

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use sudiag_core::boundary::gamma;
use sudiag_core::haar::haar_special_unitary;
use sudiag_core::matrix::diag_product;
use sudiag_core::region::{su_region_contains, su_region_contains_winding, DEFAULT_TOL};
use sudiag_core::verify::{preimage_with, PreimageConfig};
use sudiag_core::{RngSeed, VerifyError};

const MAX_N: usize = 64;

fn clamp_n(n: u32) -> usize {
    (n as usize).clamp(1, MAX_N)
}

/// `γ(α_k)` at `α_k = −π + 2πk/samples`, interleaved as re, im.
pub fn curve_points(n: usize, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    (0..samples)
        .flat_map(|k| {
            let a = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            let g = gamma(n, a);
            [g.re, g.im]
        })
        .collect()
}

/// Diagonal products of `count` Haar SU(n) samples, interleaved as re, im.
pub fn sample_points(n: usize, count: usize, seed: u64) -> Vec<f64> {
    let seed = RngSeed(seed);
    (0..count as u64)
        .flat_map(|i| {
            let p = diag_product(&haar_special_unitary(n, seed.derive(i)));
            [p.re, p.im]
        })
        .collect()
}

#[wasm_bindgen]
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    status: String,
    margin: f64,
    winding: Option<String>,
}

#[wasm_bindgen]
impl Verdict {
    #[wasm_bindgen(getter)]
    pub fn status(&self) -> String {
        self.status.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Winding-number verdict, absent for `n < 3`.
    #[wasm_bindgen(getter)]
    pub fn winding(&self) -> Option<String> {
        self.winding.clone()
    }
}

pub fn verdict(n: usize, re: f64, im: f64) -> Verdict {
    let z = Complex64::new(re, im);
    let polar = su_region_contains(n, z, DEFAULT_TOL);
    Verdict {
        status: polar.status.to_string(),
        margin: polar.signed_margin,
        winding: su_region_contains_winding(n, z, 4096, DEFAULT_TOL).map(|w| w.status.to_string()),
    }
}

#[wasm_bindgen]
#[derive(Clone, Debug, PartialEq)]
pub struct Preimage {
    entries: Vec<f64>,
    residual: f64,
    alpha: f64,
    omega: f64,
    error: Option<String>,
}

#[wasm_bindgen]
impl Preimage {
    /// Row-major entries, interleaved as re, im; empty on failure.
    #[wasm_bindgen(getter)]
    pub fn entries(&self) -> Vec<f64> {
        self.entries.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.residual
    }

    #[wasm_bindgen(getter)]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[wasm_bindgen(getter)]
    pub fn omega(&self) -> f64 {
        self.omega
    }

    #[wasm_bindgen(getter)]
    pub fn error(&self) -> Option<String> {
        self.error.clone()
    }
}

pub fn solve_preimage(n: usize, re: f64, im: f64) -> Preimage {
    let failed = |msg: String| Preimage {
        entries: Vec::new(),
        residual: f64::NAN,
        alpha: f64::NAN,
        omega: f64::NAN,
        error: Some(msg),
    };
    let config = PreimageConfig {
        tol: 1e-10,
        ..PreimageConfig::default()
    };
    match preimage_with(n, Complex64::new(re, im), &config) {
        Ok(s) => Preimage {
            entries: s.matrix.as_slice().iter().flat_map(|z| [z.re, z.im]).collect(),
            residual: s.residual,
            alpha: s.alpha,
            omega: s.omega,
            error: None,
        },
        Err(VerifyError::OutsideRegion { .. }) => failed("outside the region".into()),
        Err(e) => failed(e.to_string()),
    }
}

#[wasm_bindgen]
pub fn boundary_curve(n: u32, samples: u32) -> Vec<f64> {
    curve_points(clamp_n(n), samples as usize)
}

#[wasm_bindgen]
pub fn haar_samples(n: u32, count: u32, seed: u32) -> Vec<f64> {
    sample_points(clamp_n(n), count.min(200_000) as usize, seed as u64)
}

#[wasm_bindgen]
pub fn classify(n: u32, re: f64, im: f64) -> Verdict {
    verdict(clamp_n(n), re, im)
}

#[wasm_bindgen]
pub fn preimage(n: u32, re: f64, im: f64) -> Preimage {
    solve_preimage(clamp_n(n), re, im)
}
