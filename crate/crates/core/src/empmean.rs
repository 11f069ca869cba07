//! Security lower bounds for learning procedures that are functions of
//! empirical means, and the Gaussian total-variation bound they rest on.

use crate::divergence::ClampedBound;
use crate::exec::ordered_chunk_map;
use crate::numerics::CompensatedSum;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// `TV( N(0, I_d), N(beta / sqrt(n), (n-1)/n I_d) ) <= sqrt(d)/(2n) + |beta| / (2 sqrt(n))`.
///
/// Requires `n >= 2` (the log inequality behind the variance term needs
/// `(n-1)/n >= 1/3`).
pub fn gaussian_tv_bound(n: u64, d: u32, beta_norm: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "gaussian tv bound requires n >= 2, got {n}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if beta_norm.is_nan() || beta_norm < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "shift norm must be nonnegative, got {beta_norm}"
        )));
    }
    let nf = n as f64;
    Ok((d as f64).sqrt() / (2.0 * nf) + beta_norm / (2.0 * nf.sqrt()))
}

/// Whether the constant in the bound was supplied directly or assembled
/// from standardized moments and an external normal-approximation
/// constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSource {
    Direct,
    Assembled,
}

/// Inputs for the empirical-mean security bound. Exactly one of
/// `c_lp` or (`moments` plus `c_d`) must be supplied: the constant can be
/// given directly, or assembled as `c_d (1 + m3) + m1 / 2` from the
/// standardized moments of the summand. `c_d` is an absolute constant of
/// an external normal-approximation theorem with no published numeric
/// value; any bound assembled from it is conditional on the supplied
/// number.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmpMeanBoundInput {
    pub n: u64,
    pub d: u32,
    pub gamma: f64,
    pub c_lp: Option<f64>,
    pub moments: Option<Moments>,
    pub c_d: Option<f64>,
}

/// First and third moments of the norm of the whitened summand.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Moments {
    pub m1: f64,
    pub m3: f64,
    /// Sample count behind the estimates (0 when supplied analytically).
    pub n_samples: usize,
}

/// The empirical-mean security bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EmpMeanBound {
    pub bound: ClampedBound,
    pub constant: f64,
    pub constant_source: ConstantSource,
}

/// Lower bound on security for a procedure of the form
/// `F(mean of L(z_j))`:
/// `1 - max(1, gamma) (c + sqrt(d) / (2 sqrt(n))) n^{-1/2}`.
pub fn empmean_security_bound(input: &EmpMeanBoundInput) -> Result<EmpMeanBound> {
    if input.n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if input.d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(input.gamma > 0.0 && input.gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be a positive real, got {}",
            input.gamma
        )));
    }
    let (constant, source) = match (input.c_lp, &input.moments, input.c_d) {
        (Some(c), None, None) => (c, ConstantSource::Direct),
        (None, Some(m), Some(cd)) => (cd * (1.0 + m.m3) + m.m1 / 2.0, ConstantSource::Assembled),
        _ => {
            return Err(Error::InvalidParameter(
                "supply exactly one of c_lp, or moments together with c_d".into(),
            ))
        }
    };
    if !constant.is_finite() || constant <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "assembled constant must be positive, got {constant}"
        )));
    }
    let nf = input.n as f64;
    let raw = 1.0
        - input.gamma.max(1.0) * (constant + (input.d as f64).sqrt() / (2.0 * nf.sqrt()))
            / nf.sqrt();
    Ok(EmpMeanBound {
        bound: ClampedBound {
            value: raw.clamp(0.0, 1.0),
            vacuous: !(0.0..=1.0).contains(&raw),
        },
        constant,
        constant_source: source,
    })
}

/// Sufficient sample count for the bound deficit to fall below `eps`:
/// `ceil( eps^-2 c^2 (1 + sqrt(d)/c^2)^(3/2) )`.
///
/// This is the closed-form sufficient condition; the exact threshold of
/// the underlying inequality is [`min_n_exact_threshold`].
pub fn min_n_epsilon(c: f64, d: u32, eps: f64) -> Result<u64> {
    check_min_n_args(c, d, eps)?;
    let df = d as f64;
    let n = eps.powi(-2) * c * c * (1.0 + df.sqrt() / (c * c)).powf(1.5);
    Ok(n.ceil().max(1.0) as u64)
}

/// Smallest integer `n` with `c n^{-1/2} + (sqrt(d)/2) n^{-1} <= eps`,
/// from the quadratic root in `n^{-1/2}`.
pub fn min_n_exact_threshold(c: f64, d: u32, eps: f64) -> Result<u64> {
    check_min_n_args(c, d, eps)?;
    let half_sqrt_d = (d as f64).sqrt() / 2.0;
    // x := n^{-1/2} solves half_sqrt_d x^2 + c x - eps = 0.
    let x = (-c + (c * c + 4.0 * half_sqrt_d * eps).sqrt()) / (2.0 * half_sqrt_d);
    let mut n = (1.0 / (x * x)).floor().max(1.0) as u64;
    while c / (n as f64).sqrt() + half_sqrt_d / n as f64 > eps {
        n += 1;
    }
    Ok(n)
}

fn check_min_n_args(c: f64, d: u32, eps: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "constant must be positive, got {c}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0,1), got {eps}"
        )));
    }
    Ok(())
}

/// Monte Carlo estimates of the first and third moments of the norm of
/// the whitened samples `C^{-1/2} (x - mean)`.
///
/// Whitening uses the symmetric inverse square root of the sample
/// covariance with a relative eigenvalue cutoff of `1e-10`; degenerate
/// sample clouds are rejected with the deficient rank.
pub fn standardized_moments(samples: &[Vec<f64>]) -> Result<Moments> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let d = samples[0].len();
    if d == 0 {
        return Err(Error::InvalidParameter("zero-dimensional samples".into()));
    }
    if samples.iter().any(|s| s.len() != d) {
        return Err(Error::InvalidParameter(
            "samples have inconsistent dimensions".into(),
        ));
    }
    if n < d + 1 {
        return Err(Error::InvalidParameter(format!(
            "need at least d+1 = {} samples, got {n}",
            d + 1
        )));
    }

    let mut mean = vec![0.0; d];
    for (j, m) in mean.iter_mut().enumerate() {
        *m = crate::numerics::compensated_sum(samples.iter().map(|s| s[j])) / n as f64;
    }

    let mut cov = DMatrix::<f64>::zeros(d, d);
    for s in samples {
        let v = DVector::from_iterator(d, s.iter().zip(&mean).map(|(x, m)| x - m));
        cov += &v * v.transpose();
    }
    cov /= (n - 1) as f64;

    let eigen = cov.symmetric_eigen();
    let max_eig = eigen.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = 1e-10 * max_eig;
    let deficient = eigen.eigenvalues.iter().filter(|l| **l <= cutoff).count();
    if deficient > 0 || max_eig <= 0.0 {
        return Err(Error::SingularCovariance {
            deficient: if max_eig <= 0.0 { d } else { deficient },
            dim: d,
        });
    }
    let inv_sqrt = DMatrix::from_diagonal(&eigen.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let whitener = &eigen.eigenvectors * inv_sqrt * eigen.eigenvectors.transpose();

    let partials = ordered_chunk_map(n, 4096, |_, range| {
        let mut m1 = CompensatedSum::new();
        let mut m3 = CompensatedSum::new();
        for s in &samples[range] {
            let v = DVector::from_iterator(d, s.iter().zip(&mean).map(|(x, m)| x - m));
            let norm = (&whitener * v).norm();
            m1.add(norm);
            m3.add(norm * norm * norm);
        }
        (m1.value(), m3.value())
    });
    let mut m1 = CompensatedSum::new();
    let mut m3 = CompensatedSum::new();
    for (a, b) in partials {
        m1.add(a);
        m3.add(b);
    }
    Ok(Moments {
        m1: m1.value() / n as f64,
        m3: m3.value() / n as f64,
        n_samples: n,
    })
}
