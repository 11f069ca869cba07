//! Exact closed forms for discrete data laws: the truncated binomial
//! first-moment function `psi`, the exact binomial mean absolute
//! deviation, the worst-case security over all learning procedures, the
//! diversity index `C_K(P)`, and sample-size calculators.

use crate::exec::ordered_map;
use crate::numerics::{binomial_cdf, compensated_sum, log_binomial};
use crate::types::{AttackWeights, DiscreteDistribution};
use crate::{Error, Result};
use serde::Serialize;

/// Universal lower constant of the `psi` envelope (`0.29 sqrt(n p (1-p))`).
pub const STIRLING_LOWER: f64 = 0.29;
/// Universal upper constant of the `psi` envelope.
pub const STIRLING_UPPER: f64 = 0.44;

fn check_prob_open(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "probability must lie in (0,1), got {p}"
        )));
    }
    Ok(())
}

/// `psi(m, p) = C(n, m+1) (m+1) p^(m+1) (1-p)^(n-m)` for a fixed trial
/// count `n`, evaluated in log space.
///
/// Equals the truncated first moment `E[(np - B) 1{B <= m}]` of
/// `B ~ Binomial(n, p)` (de Moivre's identity); `m = n` gives 0 through
/// the `C(n, n+1) = 0` convention.
pub fn psi(n: u64, m: u64, p: f64) -> Result<f64> {
    check_prob_open(p)?;
    if n == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "psi requires 1 <= n and 0 <= m <= n, got n={n}, m={m}"
        )));
    }
    Ok(psi_saturating(n, m, p))
}

/// `psi` extended by 0 for `m >= n`; callers guarantee `p` in `(0,1)`.
fn psi_saturating(n: u64, m: u64, p: f64) -> f64 {
    if m >= n {
        return 0.0;
    }
    let ln = log_binomial(n, m + 1)
        + ((m + 1) as f64).ln()
        + (m + 1) as f64 * p.ln()
        + (n - m) as f64 * (1.0 - p).ln();
    ln.exp()
}

/// Exact mean absolute deviation `E |B/n - gamma p|` for
/// `B ~ Binomial(n, p)`.
///
/// Evaluated through the identity
/// `E |B - gamma n p| = 2 psi(m, p) + (gamma - 1) n p (2 P(B <= m) - 1)`
/// with `m = floor(gamma n p)`; no asymptotic simplification is involved,
/// so the value is exact at every `n`.
pub fn binomial_mad_gamma(n: u64, p: f64, gamma: f64) -> Result<f64> {
    check_prob_open(p)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be a positive real, got {gamma}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("mad requires n >= 1".into()));
    }
    let np = n as f64 * p;
    // When gamma*n*p lands exactly on an integer the kink of |.| sits on an
    // atom and either flooring choice yields the same value.
    let m = (gamma * np).floor();
    let m = if m >= n as f64 { n } else { m as u64 };
    let cdf = if m >= n { 1.0 } else { binomial_cdf(n, m, p)? };
    let e_abs = 2.0 * psi_saturating(n, m, p) + (gamma - 1.0) * np * (2.0 * cdf - 1.0);
    Ok((e_abs / n as f64).max(0.0))
}

/// Worst-case security of a discrete data law: the minimum over all
/// learning procedures of the security score, together with the exact
/// per-atom deviations that produce it.
#[derive(Clone, Debug, Serialize)]
pub struct WorstCaseResult {
    /// `min_A Sec = 1 - max(1,gamma) [ sum_k mad_k / (2 gamma) - |1 - 1/gamma| / 2 ]`.
    pub min_sec: f64,
    /// `1 - min_sec`; at `gamma = 1` this is the `epsilon_n` of the
    /// diversity sandwich.
    pub epsilon_n: f64,
    /// `E |B_k/n - gamma p_k|` per atom.
    pub per_atom_mad: Vec<f64>,
    pub gamma: f64,
    pub n: u64,
    pub notes: String,
}

/// Minimum security over all learning procedures for `n` samples of the
/// given law.
pub fn min_sec_discrete(
    dist: &DiscreteDistribution,
    n: u64,
    weights: &AttackWeights,
) -> Result<WorstCaseResult> {
    if let Some(p) = dist.probs().iter().find(|p| **p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "worst-case security needs every atom probability below 1, got {p}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let gamma = weights.gamma();
    let per_atom_mad: Vec<f64> = ordered_map(dist.probs(), |p| binomial_mad_gamma(n, *p, gamma))
        .into_iter()
        .collect::<Result<_>>()?;
    let mad_sum = compensated_sum(per_atom_mad.iter().copied());
    let delta_max =
        gamma.max(1.0) * (mad_sum / (2.0 * gamma) - 0.5 * (1.0 - 1.0 / gamma).abs());
    Ok(WorstCaseResult {
        min_sec: 1.0 - delta_max,
        epsilon_n: delta_max,
        per_atom_mad,
        gamma,
        n,
        notes: "minimum over all learning procedures; attained by deterministic \
                procedures assigning a distinct parameter to every empirical count vector"
            .into(),
    })
}

/// Diversity index `C_K(P) = sum_k sqrt(p_k (1 - p_k))`; zero only for a
/// point mass, maximal (`sqrt(K-1)`) at the uniform law.
pub fn c_k(dist: &DiscreteDistribution) -> f64 {
    compensated_sum(dist.probs().iter().map(|p| (p * (1.0 - p)).sqrt()))
}

/// Upper bound on the central quantity from the diversity index:
/// `C_K(P) / (2 sqrt(n))`. Valid for every learning procedure.
pub fn delta_bound_from_ck(ck: f64, n: u64) -> f64 {
    ck / (2.0 * (n as f64).sqrt())
}

/// Diversity measures of a law and the comparison inequalities between
/// them; every flag must hold for any valid distribution.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiversityReport {
    pub gini_simpson: f64,
    pub shannon_nats: f64,
    pub ck: f64,
    /// `C_K / 2 >= Gini-Simpson`.
    pub ck_half_ge_gini_simpson: bool,
    /// `C_K / K <= sqrt(Gini-Simpson / K)`.
    pub ck_mean_le_sqrt_gini_simpson_mean: bool,
    /// `Shannon <= C_K`.
    pub shannon_le_ck: bool,
    /// `C_K <= sqrt(K) sqrt(Shannon)`.
    pub ck_le_sqrt_k_shannon: bool,
}

impl DiversityReport {
    pub fn all_hold(&self) -> bool {
        self.ck_half_ge_gini_simpson
            && self.ck_mean_le_sqrt_gini_simpson_mean
            && self.shannon_le_ck
            && self.ck_le_sqrt_k_shannon
    }
}

/// Gini-Simpson index, Shannon entropy (nats), `C_K`, and the sandwich
/// inequalities relating them.
pub fn diversity_bounds(dist: &DiscreteDistribution) -> DiversityReport {
    let k = dist.k() as f64;
    let gini_simpson = 1.0 - compensated_sum(dist.probs().iter().map(|p| p * p));
    let shannon_nats = -compensated_sum(dist.probs().iter().map(|p| p * p.ln()));
    let ck = c_k(dist);
    let slack = 1e-12;
    DiversityReport {
        gini_simpson,
        shannon_nats,
        ck,
        ck_half_ge_gini_simpson: ck / 2.0 >= gini_simpson - slack,
        ck_mean_le_sqrt_gini_simpson_mean: ck / k <= (gini_simpson / k).sqrt() + slack,
        shannon_le_ck: shannon_nats <= ck + slack,
        ck_le_sqrt_k_shannon: ck <= (k * shannon_nats).sqrt() + slack,
    }
}

/// Extremes of `C_K` over laws on `K` atoms whose largest probability is
/// pinned at `delta`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CkExtremes {
    pub max: f64,
    pub inf: f64,
}

pub fn ck_constrained_extremes(k: usize, delta: f64) -> Result<CkExtremes> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "constrained extremes need K >= 2, got {k}"
        )));
    }
    let kf = k as f64;
    if !(delta >= 1.0 / kf && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "max probability must lie in [1/K, 1), got {delta} for K={k}"
        )));
    }
    let max = (delta * (1.0 - delta)).sqrt() + ((1.0 - delta) * (kf - 2.0 + delta)).sqrt();
    let floor_inv = (1.0 / delta).floor();
    let rem = 1.0 - delta * floor_inv;
    let inf = (delta * (1.0 - delta)).sqrt() * floor_inv + (delta * floor_inv * rem.max(0.0)).sqrt();
    Ok(CkExtremes { max, inf })
}

/// The `epsilon_n` sandwich at the minimizing weights, when the
/// sample-size preconditions hold, plus the universally valid security
/// floor `1 - C_K / (2 sqrt(n))`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SandwichResult {
    /// `n >= 5` and `n > 1/p_k` for every atom.
    pub preconditions_met: bool,
    /// `0.29 C_K n^{-1/2}`, when preconditions hold.
    pub epsilon_lower: Option<f64>,
    /// `0.44 C_K n^{-1/2}`, when preconditions hold.
    pub epsilon_upper: Option<f64>,
    /// `1 - C_K / (2 sqrt(n))`; valid with or without the preconditions.
    pub sec_lower_bound: f64,
}

pub fn worst_case_sandwich(dist: &DiscreteDistribution, n: u64) -> SandwichResult {
    let ck = c_k(dist);
    let nf = n as f64;
    let preconditions_met = n >= 5 && dist.probs().iter().all(|p| nf > 1.0 / p);
    let scale = ck / nf.sqrt();
    SandwichResult {
        preconditions_met,
        epsilon_lower: preconditions_met.then_some(STIRLING_LOWER * scale),
        epsilon_upper: preconditions_met.then_some(STIRLING_UPPER * scale),
        sec_lower_bound: 1.0 - delta_bound_from_ck(ck, n),
    }
}

/// Smallest `n` guaranteeing security at least `1 - eps` for every
/// learning procedure and every `nu`: `ceil((C_K / 2 eps)^2)`.
pub fn min_n_for_security(dist: &DiscreteDistribution, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0,1), got {eps}"
        )));
    }
    let c = c_k(dist);
    Ok(((c / (2.0 * eps)).powi(2)).ceil().max(1.0) as u64)
}

/// Split of `epsilon_n` into frequent-atom and rare-atom contributions
/// when `n` is below some atoms' expected first-appearance time.
#[derive(Clone, Debug, Serialize)]
pub struct SmallNCorrection {
    /// Number of atoms with `p_k >= 1/n` (after sorting descending).
    pub k_n: usize,
    /// `sum_{k > k_n} p_k (1 - p_k)^n`: the rare atoms' exact share.
    pub tail_term: f64,
    /// `0.29 n^{-1/2} C_{k_n}` over the frequent atoms.
    pub head_lower: f64,
    /// `0.44 n^{-1/2} C_{k_n}` over the frequent atoms.
    pub head_upper: f64,
}

pub fn small_n_correction(dist: &DiscreteDistribution, n: u64) -> Result<SmallNCorrection> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!(
            "small-n split requires n >= 5, got {n}"
        )));
    }
    let mut probs = dist.probs().to_vec();
    probs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let nf = n as f64;
    let k_n = probs.iter().take_while(|p| **p >= 1.0 / nf).count();
    let tail_term = compensated_sum(
        probs[k_n..]
            .iter()
            .map(|p| p * ((1.0 - p).ln() * nf).exp()),
    );
    let head_ck = compensated_sum(probs[..k_n].iter().map(|p| (p * (1.0 - p)).sqrt()));
    Ok(SmallNCorrection {
        k_n,
        tail_term,
        head_lower: STIRLING_LOWER * head_ck / nf.sqrt(),
        head_upper: STIRLING_UPPER * head_ck / nf.sqrt(),
    })
}

/// Exact central quantity of the "largest observed value" estimator on a
/// Bernoulli(`p`) law: `theta = max_j z_j` over `n` samples.
///
/// Assembled from the conditional laws of the estimator given one pinned
/// sample, with no asymptotic collapse, so it is exact at every `n` and
/// decays at the geometric rate `(1-p)^n`.
pub fn bernoulli_max_delta(p: f64, n: u64, weights: &AttackWeights) -> Result<f64> {
    check_prob_open(p)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let gamma = weights.gamma();
    let q = ((1.0 - p).ln() * n as f64).exp();
    let r = ((1.0 - p).ln() * (n - 1) as f64).exp();
    // Integrated |gamma p_theta - p_theta|z1| for the pinned sample being
    // 1 (weight p) and 0 (weight 1-p).
    let seen = gamma * q + (gamma * q - (gamma - 1.0)).abs();
    let unseen = q * (gamma - 1.0 / (1.0 - p)).abs() + (gamma * q - (gamma - 1.0) - r).abs();
    let expected = p * seen + (1.0 - p) * unseen;
    let tilde = expected / (2.0 * gamma) + 0.5 * (1.0 - 1.0 / gamma);
    Ok((gamma.max(1.0) * (tilde - (1.0 - 1.0 / gamma).max(0.0))).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::binomial_pmf;

    fn weights_gamma(gamma: f64) -> AttackWeights {
        AttackWeights::from_gamma(gamma).unwrap()
    }

    /// Exhaustive E|B/n - gamma p| by direct enumeration of all outcomes.
    fn mad_by_enumeration(n: u64, p: f64, gamma: f64) -> f64 {
        (0..=n)
            .map(|k| binomial_pmf(n, k, p).unwrap() * (k as f64 / n as f64 - gamma * p).abs())
            .sum()
    }

    #[test]
    fn psi_base_case_m_zero() {
        // m = 0 reduces to n p (1-p)^n.
        let n = 5;
        let p = 0.3;
        let expect = 5.0 * 0.3 * (0.7f64).powi(5);
        assert!((psi(n, 0, p).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn psi_hand_value() {
        assert!((psi(2, 1, 0.5).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn psi_vanishes_at_m_equals_n() {
        assert_eq!(psi(7, 7, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn psi_domain_errors() {
        assert!(psi(5, 6, 0.4).is_err());
        assert!(psi(5, 2, 0.0).is_err());
        assert!(psi(5, 2, 1.0).is_err());
    }

    #[test]
    fn mad_hand_value_balanced() {
        // n=2, p=1/2, gamma=1: E|B-1|/2 = (1/4 + 1/4) / 2.
        assert!((binomial_mad_gamma(2, 0.5, 1.0).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn mad_balanced_equals_two_psi_over_n() {
        for &(n, p) in &[(4u64, 0.3), (11, 0.5), (30, 0.85), (57, 0.07)] {
            let lhs = binomial_mad_gamma(n, p, 1.0).unwrap();
            let m = (n as f64 * p).floor() as u64;
            let rhs = 2.0 * psi(n, m, p).unwrap() / n as f64;
            assert!((lhs - rhs).abs() < 1e-13, "n={n} p={p}");
        }
    }

    #[test]
    fn mad_matches_enumeration_skewed() {
        let got = binomial_mad_gamma(3, 0.3, 2.0).unwrap();
        let want = mad_by_enumeration(3, 0.3, 2.0);
        assert!((got - want).abs() < 1e-13, "got {got}, want {want}");
    }

    #[test]
    fn mad_enumeration_grid() {
        for n in [1u64, 2, 5, 17, 33, 60] {
            for p in [0.05, 0.3, 0.5, 0.77] {
                for gamma in [0.5, 1.0, 2.0, 7.5] {
                    let got = binomial_mad_gamma(n, p, gamma).unwrap();
                    let want = mad_by_enumeration(n, p, gamma);
                    assert!(
                        (got - want).abs() < 1e-10,
                        "n={n} p={p} gamma={gamma}: got {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn mad_saturates_when_gamma_np_exceeds_n() {
        // gamma n p >= n: |B - gamma n p| = gamma n p - B identically.
        let got = binomial_mad_gamma(4, 0.9, 2.0).unwrap();
        let want = (2.0 - 1.0) * 0.9;
        assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn min_sec_fair_two_atoms() {
        let d = DiscreteDistribution::from_probs(vec![0.5, 0.5]).unwrap();
        let r = min_sec_discrete(&d, 2, &weights_gamma(1.0)).unwrap();
        assert!((r.min_sec - 0.75).abs() < 1e-13);
        assert!((r.epsilon_n - 0.25).abs() < 1e-13);
        // Internal consistency of the reported pieces.
        let recon = 1.0
            - r.gamma.max(1.0)
                * (r.per_atom_mad.iter().sum::<f64>() / (2.0 * r.gamma)
                    - 0.5 * (1.0 - 1.0 / r.gamma).abs());
        assert!((r.min_sec - recon).abs() < 1e-12);
    }

    #[test]
    fn min_sec_rejects_point_mass() {
        let d = DiscreteDistribution::from_probs(vec![1.0]).unwrap();
        assert!(min_sec_discrete(&d, 2, &weights_gamma(1.0)).is_err());
    }

    #[test]
    fn min_sec_balanced_equals_psi_sum() {
        // At gamma = 1: epsilon_n = (1/n) sum_k psi(floor(n p_k), p_k).
        let d = DiscreteDistribution::from_probs(vec![0.5, 0.3, 0.2]).unwrap();
        let n = 7;
        let r = min_sec_discrete(&d, n, &weights_gamma(1.0)).unwrap();
        let psi_sum: f64 = d
            .probs()
            .iter()
            .map(|p| psi(n, (n as f64 * p).floor() as u64, *p).unwrap())
            .sum();
        assert!((r.epsilon_n - psi_sum / n as f64).abs() < 1e-12);
    }

    #[test]
    fn ck_known_values() {
        let uniform4 = DiscreteDistribution::uniform(4).unwrap();
        assert!((c_k(&uniform4) - 3f64.sqrt()).abs() < 1e-13);
        let bern = DiscreteDistribution::from_probs(vec![0.5, 0.5]).unwrap();
        assert!((c_k(&bern) - 1.0).abs() < 1e-15);
        let d = DiscreteDistribution::from_probs(vec![0.7, 0.2, 0.1]).unwrap();
        let want = 0.21f64.sqrt() + 0.16f64.sqrt() + 0.09f64.sqrt();
        assert!((c_k(&d) - want).abs() < 1e-13);
        assert!((want - 1.15826).abs() < 1e-5);
    }

    #[test]
    fn diversity_uniform_two() {
        let d = DiscreteDistribution::uniform(2).unwrap();
        let r = diversity_bounds(&d);
        assert!((r.gini_simpson - 0.5).abs() < 1e-15);
        assert!((r.shannon_nats - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((r.ck - 1.0).abs() < 1e-15);
        assert!(r.all_hold());
    }

    #[test]
    fn diversity_near_point_mass() {
        let d = DiscreteDistribution::from_probs(vec![0.999, 0.001]).unwrap();
        let r = diversity_bounds(&d);
        assert!(r.ck < 0.07 && r.gini_simpson < 0.01 && r.shannon_nats < 0.01);
        assert!(r.all_hold());
    }

    #[test]
    fn ck_extremes_known_values() {
        let e = ck_constrained_extremes(4, 0.25).unwrap();
        assert!((e.max - 3f64.sqrt()).abs() < 1e-13);
        let e = ck_constrained_extremes(5, 0.5).unwrap();
        assert!((e.inf - 1.0).abs() < 1e-13);
        let e = ck_constrained_extremes(3, 0.5).unwrap();
        assert!((e.max - (0.25f64.sqrt() + 0.75f64.sqrt())).abs() < 1e-13);
        assert!((e.max - 1.36603).abs() < 1e-5);
    }

    #[test]
    fn ck_extremes_domain() {
        assert!(ck_constrained_extremes(1, 0.5).is_err());
        assert!(ck_constrained_extremes(4, 0.2).is_err());
        assert!(ck_constrained_extremes(4, 1.0).is_err());
    }

    #[test]
    fn sandwich_guard_path() {
        let d = DiscreteDistribution::uniform(4).unwrap();
        let s = worst_case_sandwich(&d, 4);
        assert!(!s.preconditions_met);
        assert!(s.epsilon_lower.is_none());
        assert!((s.sec_lower_bound - (1.0 - 3f64.sqrt() / 4.0)).abs() < 1e-13);
    }

    #[test]
    fn sandwich_contains_exact_epsilon() {
        let d = DiscreteDistribution::uniform(4).unwrap();
        let s = worst_case_sandwich(&d, 100);
        assert!(s.preconditions_met);
        let eps = min_sec_discrete(&d, 100, &weights_gamma(1.0))
            .unwrap()
            .epsilon_n;
        assert!(s.epsilon_lower.unwrap() <= eps && eps <= s.epsilon_upper.unwrap());
    }

    #[test]
    fn min_n_hand_values() {
        let bern = DiscreteDistribution::from_probs(vec![0.5, 0.5]).unwrap();
        // C=1: (1/0.1)^2 = 100.
        assert_eq!(min_n_for_security(&bern, 0.05).unwrap(), 100);
        assert_eq!(min_n_for_security(&bern, 0.5).unwrap(), 1);
        assert!(min_n_for_security(&bern, 0.0).is_err());
    }

    #[test]
    fn small_n_split_hand_values() {
        let d = DiscreteDistribution::from_probs(vec![0.9, 0.05, 0.05]).unwrap();
        let s = small_n_correction(&d, 10).unwrap();
        assert_eq!(s.k_n, 1);
        let want_tail = 2.0 * 0.05 * (0.95f64).powi(10);
        assert!((s.tail_term - want_tail).abs() < 1e-14);
        // All atoms frequent: the tail vanishes.
        let u = DiscreteDistribution::uniform(3).unwrap();
        let s = small_n_correction(&u, 10).unwrap();
        assert_eq!(s.k_n, 3);
        assert_eq!(s.tail_term, 0.0);
        assert!(small_n_correction(&u, 4).is_err());
    }

    #[test]
    fn small_n_split_consistent_with_exact_worst_case() {
        // When every frequent atom has floor(n p) in [1, n-2], the exact
        // balanced epsilon_n minus the rare-atom tail sits inside the
        // head envelope with no slack.
        let cases: [(&[f64], u64); 3] = [
            (&[0.5, 0.3, 0.15, 0.03, 0.02], 10),
            (&[0.4, 0.4, 0.13, 0.04, 0.03], 20),
            (&[0.6, 0.2, 0.1, 0.06, 0.02, 0.02], 30),
        ];
        for (probs, n) in cases {
            let d = DiscreteDistribution::from_probs(probs.to_vec()).unwrap();
            let s = small_n_correction(&d, n).unwrap();
            let nf = n as f64;
            assert!(probs
                .iter()
                .filter(|p| **p >= 1.0 / nf)
                .all(|p| (nf * p).floor() >= 1.0 && (nf * p).floor() <= nf - 2.0));
            let eps = min_sec_discrete(&d, n, &weights_gamma(1.0)).unwrap().epsilon_n;
            let head = eps - s.tail_term;
            assert!(
                s.head_lower <= head + 1e-12 && head <= s.head_upper + 1e-12,
                "n={n} probs={probs:?}: head {head} outside [{}, {}]",
                s.head_lower,
                s.head_upper
            );
        }
    }

    #[test]
    fn bernoulli_max_single_sample() {
        // n=1: delta = E_z1 TV(law(theta), law(theta|z1)) = 2 p (1-p).
        for p in [0.2, 0.5, 0.8] {
            let got = bernoulli_max_delta(p, 1, &weights_gamma(1.0)).unwrap();
            assert!((got - 2.0 * p * (1.0 - p)).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn bernoulli_max_balanced_closed_form() {
        // gamma=1 the expression collapses to 2 p (1-p)^n.
        for n in [2u64, 5, 12] {
            for p in [0.1, 0.5, 0.9] {
                let got = bernoulli_max_delta(p, n, &weights_gamma(1.0)).unwrap();
                let want = 2.0 * p * (1.0 - p).powi(n as i32);
                assert!((got - want).abs() < 1e-13, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn bernoulli_max_decay_rate_bounded() {
        for gamma in [0.5, 1.0, 2.0] {
            let w = weights_gamma(gamma);
            let ratios: Vec<f64> = (5..=30)
                .map(|n| {
                    bernoulli_max_delta(0.5, n, &w).unwrap() / (0.5f64).powi(n as i32)
                })
                .collect();
            let first = ratios[0];
            for r in &ratios {
                assert!(r.is_finite() && *r <= first * 1.25 + 1e-9, "gamma={gamma}");
            }
        }
    }

    #[test]
    fn stirling_envelope_on_small_grid() {
        for n in 5..=40u64 {
            for i in 1..20 {
                let p = i as f64 * 0.05;
                let m = (n as f64 * p).floor() as u64;
                if m < 1 || m > n - 2 {
                    continue;
                }
                let v = psi(n, m, p).unwrap();
                let scale = (n as f64).sqrt() * (p * (1.0 - p)).sqrt();
                assert!(
                    STIRLING_LOWER * scale <= v && v <= STIRLING_UPPER * scale,
                    "n={n} p={p}: psi={v}, scale={scale}"
                );
            }
        }
    }
}
