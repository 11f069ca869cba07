//! Shared oracle machinery for the integration suites. Everything here is
//! deliberately independent of the library's computation paths: exact
//! integer/rational arithmetic, direct enumeration, and quadrature.
//!
//! Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

pub fn exact_binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact truncated first moment `sum_{k<=m} C(n,k) p^k (1-p)^{n-k} (np - k)`
/// for `p = tenths / 10`, evaluated in integer arithmetic and converted to
/// f64 at the very end.
pub fn de_moivre_lhs_exact(n: u64, m: u64, tenths: u32) -> f64 {
    let a = BigInt::from(tenths);
    let b = BigInt::from(10 - tenths);
    let mut acc = BigInt::from(0);
    for k in 0..=m.min(n) {
        let term = exact_binomial_big(n, k)
            * a.pow(k as u32)
            * b.pow((n - k) as u32)
            * (BigInt::from(n) * &a - BigInt::from(10 * k));
        acc += term;
    }
    // The sum above is the numerator over 10^(n+1).
    acc.to_f64().expect("finite") / 10f64.powi(n as i32 + 1)
}

/// Random probability vector with all entries at least `floor`.
pub fn random_simplex(rng: &mut ChaCha12Rng, k: usize, floor: f64) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|w| w / total).collect();
        if probs.iter().all(|p| *p >= floor) {
            return probs;
        }
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    (-z * z / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Total variation distance between `N(0,1)` and `N(mean, var)` in one
/// dimension, by quadrature, with absolute error well below `1e-8`.
pub fn normal_tv_by_quadrature(mean: f64, var: f64) -> f64 {
    let lo = mean.min(0.0) - 14.0 * var.sqrt().max(1.0);
    let hi = mean.max(0.0) + 14.0 * var.sqrt().max(1.0);
    0.5 * adaptive_simpson(
        |x| (normal_pdf(x, 0.0, 1.0) - normal_pdf(x, mean, var)).abs(),
        lo,
        hi,
        1e-11,
    )
}
