//! The two-parameter divergence family behind membership inference
//! security, and the bounds that relate it to mutual information and
//! differential privacy.
//!
//! For densities `p`, `q` on a shared finite index set and `alpha > 0`:
//!
//! ```text
//! D~_alpha(P, Q) = (1 / 2 alpha) * sum_i |alpha p_i - q_i|  +  (1 - 1/alpha) / 2
//! D_alpha(P, Q)  = max(1, alpha) * [ D~_alpha(P, Q) - (1 - 1/alpha)_+ ]
//! ```
//!
//! `D_alpha` is an f-divergence with generator
//! `f_alpha(x) = max(1, alpha) (|x - 1/alpha| - |1 - 1/alpha|) / 2`; it
//! ranges over `[0, 1]`, coincides with total variation at `alpha = 1`,
//! and vanishes iff `P = Q`.
//!
//! With the trade-off weight `gamma` of an [`AttackWeights`], the central
//! security quantity of a learning procedure is
//! `delta = D_gamma(j0, j1)` where `j0` is the joint law of (parameters,
//! fresh sample) and `j1` the joint law of (parameters, training sample).
//! The best attack accuracy is then `lambda (1-nu) + nu D~_gamma(j0, j1)`
//! and the security score is `1 - delta`.

use crate::numerics::CompensatedSum;
use crate::types::{AttackWeights, JointDistribution};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be a positive real, got {alpha}"
        )));
    }
    Ok(())
}

fn check_densities(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    if let Some(bad) = p.iter().chain(q).find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "density entries must be finite and nonnegative, got {bad}"
        )));
    }
    Ok(())
}

/// The divergence generator `f_alpha(x)`; convex with `f_alpha(1) = 0`.
pub fn f_generator(alpha: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "generator argument must be nonnegative, got {x}"
        )));
    }
    let inv = 1.0 / alpha;
    Ok(0.5 * alpha.max(1.0) * ((x - inv).abs() - (1.0 - inv).abs()))
}

/// `D~_alpha(P, Q)` on a shared finite index set.
///
/// Lies in `[(1 - 1/alpha)_+, 1]` for probability vectors and equals the
/// total variation distance at `alpha = 1`.
pub fn tilde_d(alpha: f64, p: &[f64], q: &[f64]) -> Result<f64> {
    check_alpha(alpha)?;
    check_densities(p, q)?;
    let mut acc = CompensatedSum::new();
    for (pi, qi) in p.iter().zip(q) {
        acc.add((alpha * pi - qi).abs());
    }
    Ok(acc.value() / (2.0 * alpha) + 0.5 * (1.0 - 1.0 / alpha))
}

/// `D_alpha(P, Q)`, clamped to its exact range `[0, 1]`.
pub fn d_alpha(alpha: f64, p: &[f64], q: &[f64]) -> Result<f64> {
    let tilde = tilde_d(alpha, p, q)?;
    let slack = (1.0 - 1.0 / alpha).max(0.0);
    Ok((alpha.max(1.0) * (tilde - slack)).clamp(0.0, 1.0))
}

/// Total variation distance; `D_alpha` at `alpha = 1`.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    d_alpha(1.0, p, q)
}

fn check_joint_pair(j0: &JointDistribution, j1: &JointDistribution) -> Result<()> {
    if !j0.same_cells(j1) {
        return Err(Error::MismatchedCells);
    }
    Ok(())
}

/// The central quantity `delta = D_gamma(j0, j1)` for the joint laws of
/// (parameters, fresh sample) and (parameters, training sample).
pub fn delta_from_joints(
    weights: &AttackWeights,
    j0: &JointDistribution,
    j1: &JointDistribution,
) -> Result<f64> {
    check_joint_pair(j0, j1)?;
    d_alpha(weights.gamma(), j0.mass(), j1.mass())
}

/// Best attainable attack accuracy,
/// `lambda (1-nu) + nu D~_gamma(j0, j1)`.
pub fn sup_accuracy(
    weights: &AttackWeights,
    j0: &JointDistribution,
    j1: &JointDistribution,
) -> Result<f64> {
    check_joint_pair(j0, j1)?;
    let tilde = tilde_d(weights.gamma(), j0.mass(), j1.mass())?;
    Ok(weights.accuracy_floor_accept() + weights.nu() * tilde)
}

/// Security score from the central quantity.
pub fn sec_from_delta(delta: f64) -> f64 {
    1.0 - delta
}

/// Security score implied by an attack accuracy: the normalized gap to
/// the perfect-attack ceiling,
/// `(nu + lambda (1-nu) - accuracy) / min(nu, lambda (1-nu))`.
///
/// Applied to the best attainable accuracy this equals `1 - delta`; for
/// any weaker attack it upper-bounds the true score.
pub fn sec_from_accuracy(weights: &AttackWeights, accuracy: f64) -> f64 {
    let accept = weights.accuracy_floor_accept();
    (weights.nu() + accept - accuracy) / weights.nu().min(accept)
}

/// Accuracy of the attack that answers "member" exactly on the given set
/// of (parameter, atom) cells: `nu (1 - j0(B)) + lambda (1-nu) j1(B)`.
///
/// The empty set scores `nu`, the full set `lambda (1-nu)`.
pub fn accuracy_of_attack(
    decision_set: &[(usize, usize)],
    weights: &AttackWeights,
    j0: &JointDistribution,
    j1: &JointDistribution,
) -> Result<f64> {
    check_joint_pair(j0, j1)?;
    let mut mass0 = CompensatedSum::new();
    let mut mass1 = CompensatedSum::new();
    for &(t, z) in decision_set {
        mass0.add(j0.cell(t, z)?);
        mass1.add(j1.cell(t, z)?);
    }
    Ok(weights.nu() * (1.0 - mass0.value()) + weights.accuracy_floor_accept() * mass1.value())
}

/// The pointwise-optimal decision set `{cells: q >= gamma p}`.
///
/// Cells with `q = gamma p` exactly are included; the attained accuracy is
/// unaffected by that choice.
pub fn optimal_decision_set(
    weights: &AttackWeights,
    j0: &JointDistribution,
    j1: &JointDistribution,
) -> Result<Vec<(usize, usize)>> {
    check_joint_pair(j0, j1)?;
    let gamma = weights.gamma();
    let nz = j0.n_z();
    Ok(j0
        .mass()
        .iter()
        .zip(j1.mass())
        .enumerate()
        .filter(|(_, (p, q))| **q >= gamma * **p)
        .map(|(i, _)| (i / nz, i % nz))
        .collect())
}

/// Both sides of the conditional decomposition identity, for `D~` and `D`:
/// the divergence between the product of marginals and the joint equals
/// the column-weighted average of the divergences between the parameter
/// marginal and the per-column conditionals.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecompositionCheck {
    pub tilde_lhs: f64,
    pub tilde_rhs: f64,
    pub d_lhs: f64,
    pub d_rhs: f64,
}

pub fn conditional_decomposition_check(
    alpha: f64,
    joint: &JointDistribution,
) -> Result<DecompositionCheck> {
    check_alpha(alpha)?;
    let z_marg = joint.z_marginal();
    if let Some(j) = z_marg.iter().position(|m| *m <= 0.0) {
        return Err(Error::ZeroMassColumn(j));
    }
    let theta_marg = joint.theta_marginal();
    let product = joint.product_of_marginals();

    let tilde_lhs = tilde_d(alpha, product.mass(), joint.mass())?;
    let d_lhs = d_alpha(alpha, product.mass(), joint.mass())?;

    let nz = joint.n_z();
    let mut tilde_rhs = CompensatedSum::new();
    let mut d_rhs = CompensatedSum::new();
    for (j, mj) in z_marg.iter().enumerate() {
        let conditional: Vec<f64> = (0..joint.n_theta())
            .map(|t| joint.mass()[t * nz + j] / mj)
            .collect();
        tilde_rhs.add(mj * tilde_d(alpha, &theta_marg, &conditional)?);
        d_rhs.add(mj * d_alpha(alpha, &theta_marg, &conditional)?);
    }
    Ok(DecompositionCheck {
        tilde_lhs,
        tilde_rhs: tilde_rhs.value(),
        d_lhs,
        d_rhs: d_rhs.value(),
    })
}

/// Mutual information (nats) between the two coordinates of a joint law;
/// zero iff the joint is the product of its marginals. `0 ln 0 := 0`.
pub fn mutual_information(joint: &JointDistribution) -> f64 {
    let rows = joint.theta_marginal();
    let cols = joint.z_marginal();
    let nz = joint.n_z();
    let mut acc = CompensatedSum::new();
    for (i, m) in joint.mass().iter().enumerate() {
        if *m > 0.0 {
            acc.add(m * (m / (rows[i / nz] * cols[i % nz])).ln());
        }
    }
    acc.value().max(0.0)
}

/// A lower bound clamped into `[0, 1]`; `vacuous` is set when the raw
/// formula fell outside and the clamp carries no information.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ClampedBound {
    pub value: f64,
    pub vacuous: bool,
}

impl ClampedBound {
    fn from_raw(raw: f64) -> Self {
        ClampedBound {
            value: raw.clamp(0.0, 1.0),
            vacuous: !(0.0..=1.0).contains(&raw),
        }
    }
}

/// Security lower bound from the mutual information `I` (nats) between
/// parameters and one training sample: `1 - max(1, gamma) sqrt(I / 2)`.
///
/// Typically loose; it goes vacuous quickly as `I` grows.
pub fn pinsker_security_bound(gamma: f64, mutual_info_nats: f64) -> Result<ClampedBound> {
    if mutual_info_nats.is_nan() || mutual_info_nats < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "mutual information must be nonnegative, got {mutual_info_nats}"
        )));
    }
    check_alpha(gamma)?;
    Ok(ClampedBound::from_raw(
        1.0 - gamma.max(1.0) * (mutual_info_nats / 2.0).sqrt(),
    ))
}

/// Security lower bound when the learning procedure is composed with an
/// `(eps, dp_delta)`-differentially-private mechanism:
/// `1 - max(1, gamma) [ (e^eps - 1/gamma)_+ - (1 - 1/gamma)_+ + dp_delta ]`.
pub fn dp_security_bound(weights: &AttackWeights, eps: f64, dp_delta: f64) -> Result<ClampedBound> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be nonnegative, got {eps}"
        )));
    }
    if !(0.0..=1.0).contains(&dp_delta) {
        return Err(Error::InvalidParameter(format!(
            "dp delta must lie in [0,1], got {dp_delta}"
        )));
    }
    let gamma = weights.gamma();
    let inv = 1.0 / gamma;
    let raw = 1.0 - gamma.max(1.0) * ((eps.exp() - inv).max(0.0) - (1.0 - inv).max(0.0) + dp_delta);
    Ok(ClampedBound::from_raw(raw))
}

/// Largest central quantity attainable by any `(eps, dp_delta)`-private
/// procedure in the balanced `gamma = 1` case:
/// `dp_delta + (1 - dp_delta) tanh(eps / 2)`.
pub fn ldp_delta_sup(eps: f64, dp_delta: f64) -> Result<f64> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be nonnegative, got {eps}"
        )));
    }
    if !(0.0..=1.0).contains(&dp_delta) {
        return Err(Error::InvalidParameter(format!(
            "dp delta must lie in [0,1], got {dp_delta}"
        )));
    }
    Ok(dp_delta + (1.0 - dp_delta) * (eps / 2.0).tanh())
}
