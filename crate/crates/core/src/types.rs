//! Shared domain types. All of them are immutable values after
//! construction and validate their invariants loudly.

use crate::numerics::compensated_sum;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

const MASS_TOLERANCE: f64 = 1e-12;

/// A finite data law `P = sum_k p_k delta_{u_k}` over opaque atom labels.
///
/// Zero-mass atoms are dropped at construction (the one documented
/// normalization); all remaining probabilities are strictly positive and
/// sum to 1 within `1e-12`. Atom labels are opaque — only indices matter
/// to the math.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(try_from = "RawDistribution")]
pub struct DiscreteDistribution {
    atoms: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    atoms: Vec<String>,
    probs: Vec<f64>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;
    fn try_from(raw: RawDistribution) -> Result<Self> {
        DiscreteDistribution::new(raw.atoms, raw.probs)
    }
}

impl<'de> Deserialize<'de> for DiscreteDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDistribution::deserialize(deserializer)?;
        DiscreteDistribution::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if atoms.len() != probs.len() {
            return Err(Error::DimensionMismatch(atoms.len(), probs.len()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "probabilities must be finite and nonnegative, got {bad}"
            )));
        }
        // Zero-mass atoms carry no information for any of the closed forms.
        let (atoms, probs): (Vec<_>, Vec<_>) = atoms
            .into_iter()
            .zip(probs)
            .filter(|(_, p)| *p > 0.0)
            .unzip();
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution(
                "no atoms with positive mass".into(),
            ));
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::InvalidDistribution(format!("duplicate atom {a:?}")));
            }
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1 within {MASS_TOLERANCE}"
            )));
        }
        Ok(Self { atoms, probs })
    }

    /// Distribution from bare probabilities; atoms are labeled by index.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let atoms = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(atoms, probs)
    }

    /// Uniform distribution over `k` atoms.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("uniform over 0 atoms".into()));
        }
        Self::from_probs(vec![1.0 / k as f64; k])
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of atoms `K`.
    pub fn k(&self) -> usize {
        self.probs.len()
    }
}

/// The attack-evaluation weights: `nu` is the probability that the test
/// point is a fresh (non-member) draw, `lambda` the importance of the
/// true-positive rate. The trade-off weight `gamma = nu / (lambda (1-nu))`
/// is always recomputed from the pair, never stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(try_from = "RawWeights")]
pub struct AttackWeights {
    nu: f64,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawWeights {
    nu: f64,
    lambda: f64,
}

impl TryFrom<RawWeights> for AttackWeights {
    type Error = Error;
    fn try_from(raw: RawWeights) -> Result<Self> {
        AttackWeights::new(raw.nu, raw.lambda)
    }
}

impl<'de> Deserialize<'de> for AttackWeights {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawWeights::deserialize(deserializer)?;
        AttackWeights::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl AttackWeights {
    pub fn new(nu: f64, lambda: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "nu must lie in (0,1), got {nu}"
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be a positive real, got {lambda}"
            )));
        }
        Ok(Self { nu, lambda })
    }

    /// Weights with `lambda = 1` realizing a target `gamma` via
    /// `nu = gamma / (1 + gamma)`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be a positive real, got {gamma}"
            )));
        }
        Self::new(gamma / (1.0 + gamma), 1.0)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `gamma = nu / (lambda (1 - nu))`; equals 1 exactly when
    /// `nu = lambda / (1 + lambda)`.
    pub fn gamma(&self) -> f64 {
        self.nu / (self.lambda * (1.0 - self.nu))
    }

    /// Accuracy of the constant reject-all attack.
    pub fn accuracy_floor_reject(&self) -> f64 {
        self.nu
    }

    /// Accuracy of the constant accept-all attack.
    pub fn accuracy_floor_accept(&self) -> f64 {
        self.lambda * (1.0 - self.nu)
    }
}

/// A finite joint law over (parameter id, atom id) cells, stored row-major
/// with one row per parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(into = "RawJoint")]
pub struct JointDistribution {
    theta_ids: Vec<String>,
    z_ids: Vec<String>,
    mass: Vec<f64>,
}

#[derive(Serialize, Deserialize, Clone)]
struct RawJoint {
    theta_ids: Vec<String>,
    z_ids: Vec<String>,
    mass: Vec<Vec<f64>>,
}

impl From<JointDistribution> for RawJoint {
    fn from(j: JointDistribution) -> Self {
        let mass = j
            .mass
            .chunks(j.z_ids.len())
            .map(|row| row.to_vec())
            .collect();
        RawJoint {
            theta_ids: j.theta_ids,
            z_ids: j.z_ids,
            mass,
        }
    }
}

impl<'de> Deserialize<'de> for JointDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawJoint::deserialize(deserializer)?;
        JointDistribution::new(raw.theta_ids, raw.z_ids, raw.mass).map_err(serde::de::Error::custom)
    }
}

impl JointDistribution {
    pub fn new(theta_ids: Vec<String>, z_ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != theta_ids.len() {
            return Err(Error::DimensionMismatch(rows.len(), theta_ids.len()));
        }
        let mut mass = Vec::with_capacity(theta_ids.len() * z_ids.len());
        for row in &rows {
            if row.len() != z_ids.len() {
                return Err(Error::DimensionMismatch(row.len(), z_ids.len()));
            }
            mass.extend_from_slice(row);
        }
        Self::from_flat(theta_ids, z_ids, mass)
    }

    /// Build from a row-major flat mass vector.
    pub fn from_flat(theta_ids: Vec<String>, z_ids: Vec<String>, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != theta_ids.len() * z_ids.len() {
            return Err(Error::DimensionMismatch(
                mass.len(),
                theta_ids.len() * z_ids.len(),
            ));
        }
        if let Some(bad) = mass.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "joint mass must be finite and nonnegative, got {bad}"
            )));
        }
        let total = compensated_sum(mass.iter().copied());
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "joint mass sums to {total}, expected 1 within {MASS_TOLERANCE}"
            )));
        }
        Ok(Self {
            theta_ids,
            z_ids,
            mass,
        })
    }

    pub fn theta_ids(&self) -> &[String] {
        &self.theta_ids
    }

    pub fn z_ids(&self) -> &[String] {
        &self.z_ids
    }

    pub fn n_theta(&self) -> usize {
        self.theta_ids.len()
    }

    pub fn n_z(&self) -> usize {
        self.z_ids.len()
    }

    /// Row-major flat view of the cell masses.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn cell(&self, theta: usize, z: usize) -> Result<f64> {
        if theta >= self.n_theta() || z >= self.n_z() {
            return Err(Error::UnknownCell(theta, z));
        }
        Ok(self.mass[theta * self.n_z() + z])
    }

    /// Marginal law of the parameter coordinate.
    pub fn theta_marginal(&self) -> Vec<f64> {
        self.mass
            .chunks(self.n_z())
            .map(|row| compensated_sum(row.iter().copied()))
            .collect()
    }

    /// Marginal law of the atom coordinate.
    pub fn z_marginal(&self) -> Vec<f64> {
        let nz = self.n_z();
        let mut out = vec![0.0; nz];
        for (j, out_j) in out.iter_mut().enumerate() {
            *out_j = compensated_sum(self.mass.iter().skip(j).step_by(nz).copied());
        }
        out
    }

    /// Independent coupling of the two marginals, on the same cells.
    pub fn product_of_marginals(&self) -> JointDistribution {
        let rows = self.theta_marginal();
        let cols = self.z_marginal();
        let mass: Vec<f64> = rows
            .iter()
            .flat_map(|r| cols.iter().map(move |c| r * c))
            .collect();
        // Renormalization is unnecessary: marginals each sum to the total.
        JointDistribution {
            theta_ids: self.theta_ids.clone(),
            z_ids: self.z_ids.clone(),
            mass,
        }
    }

    /// True when both joints are indexed by the same cells.
    pub fn same_cells(&self, other: &JointDistribution) -> bool {
        self.theta_ids == other.theta_ids && self.z_ids == other.z_ids
    }
}

/// Sample counts per atom; the empirical distribution of a dataset of size
/// `n = sum(counts)` over `K = counts.len()` atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountVector(pub Vec<u64>);

impl CountVector {
    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    /// Total sample count `n`.
    pub fn n(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }
}

/// How a reported number was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    BruteForce,
    UpperBound,
    LowerBound,
}

/// A security assessment: the central divergence `delta`, the security
/// score `sec = 1 - delta`, the best attainable attack accuracy, and the
/// provenance of the numbers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecurityReport {
    pub delta: f64,
    pub sec: f64,
    pub sup_accuracy: f64,
    pub method: Method,
    pub notes: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_drops_zero_mass_atoms() {
        let d = DiscreteDistribution::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![0.5, 0.0, 0.5],
        )
        .unwrap();
        assert_eq!(d.k(), 2);
        assert_eq!(d.atoms(), ["a".to_string(), "c".to_string()]);
    }

    #[test]
    fn distribution_rejects_bad_sum() {
        assert!(DiscreteDistribution::from_probs(vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn distribution_rejects_duplicate_atoms() {
        let r = DiscreteDistribution::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]);
        assert!(r.is_err());
    }

    #[test]
    fn distribution_rejects_negative_mass() {
        assert!(DiscreteDistribution::from_probs(vec![1.2, -0.2]).is_err());
    }

    #[test]
    fn point_mass_is_constructible() {
        // Allowed by the type; operations needing p < 1 reject it themselves.
        let d = DiscreteDistribution::from_probs(vec![1.0]).unwrap();
        assert_eq!(d.k(), 1);
    }

    #[test]
    fn weights_gamma_is_recomputed() {
        let w = AttackWeights::new(0.5, 1.0).unwrap();
        assert_eq!(w.gamma(), 1.0);
        let w = AttackWeights::from_gamma(2.0).unwrap();
        assert!((w.gamma() - 2.0).abs() < 1e-14);
        let w = AttackWeights::from_gamma(0.5).unwrap();
        assert!((w.gamma() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn weights_gamma_one_at_balanced_nu() {
        // gamma = 1 exactly when nu = lambda/(1+lambda); for lambda = 1
        // that is nu = 1/(1+lambda) = 1/2 as well.
        for lambda in [0.25, 1.0, 3.0] {
            let w = AttackWeights::new(lambda / (1.0 + lambda), lambda).unwrap();
            assert!((w.gamma() - 1.0).abs() < 1e-12, "lambda={lambda}");
        }
    }

    #[test]
    fn weights_reject_out_of_range() {
        assert!(AttackWeights::new(0.0, 1.0).is_err());
        assert!(AttackWeights::new(1.0, 1.0).is_err());
        assert!(AttackWeights::new(0.5, 0.0).is_err());
    }

    #[test]
    fn joint_marginals_sum_to_one() {
        let j = JointDistribution::new(
            vec!["t0".into(), "t1".into()],
            vec!["z0".into(), "z1".into(), "z2".into()],
            vec![vec![0.1, 0.2, 0.1], vec![0.3, 0.2, 0.1]],
        )
        .unwrap();
        assert!((j.theta_marginal().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((j.z_marginal().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let p = j.product_of_marginals();
        assert!((p.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(j.same_cells(&p));
    }

    #[test]
    fn joint_rejects_bad_total() {
        let r = JointDistribution::new(
            vec!["t".into()],
            vec!["z0".into(), "z1".into()],
            vec![vec![0.6, 0.6]],
        );
        assert!(r.is_err());
    }

    #[test]
    fn distribution_json_round_trip() {
        let d = DiscreteDistribution::from_probs(vec![0.25, 0.75]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"atoms\""));
        let back: DiscreteDistribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        // Invalid payloads are rejected at deserialization time.
        let bad: std::result::Result<DiscreteDistribution, _> =
            serde_json::from_str(r#"{"atoms":["a","b"],"probs":[0.9,0.2]}"#);
        assert!(bad.is_err());
    }
}
