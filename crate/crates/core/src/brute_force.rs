//! Independent exact oracle for small `(K, n)`: enumerate every
//! multinomial training outcome, build the joint laws of (parameters,
//! fresh sample) and (parameters, training sample) for an arbitrary
//! learning procedure given as a function of the empirical distribution,
//! and evaluate the central quantity on them with no closed form in the
//! loop.

use crate::divergence::{delta_from_joints, sec_from_delta, sup_accuracy};
use crate::exec::ordered_map;
use crate::numerics::ln_factorial;
use crate::types::{
    AttackWeights, CountVector, DiscreteDistribution, JointDistribution, Method, SecurityReport,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Hard cap on the number of enumerated count vectors.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// Hard cap on total stored cells (`outcomes * K`); the count guard alone
/// would admit many-atom instances whose vectors do not fit in memory.
pub const CELL_GUARD: u128 = 100_000_000;

/// Hard cap on the cell count for exhaustive subset search.
pub const SUBSET_GUARD: usize = 20;

/// A learning procedure expressed on empirical count vectors. Randomized
/// procedures are expanded into exact mixtures; nothing is sampled.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Procedure {
    /// Every count vector maps to its own parameter id: the procedure
    /// leaking the most, and the one attaining the worst-case closed form.
    Injective,
    /// Every count vector maps to one parameter id: leaks nothing.
    Constant,
    /// Parameter is the largest atom index present in the sample; on a
    /// two-atom law this is the "largest observed value" estimator.
    MaxAtom,
    /// Explicit table from count vectors (comma-joined counts) to a
    /// parameter id or a distribution over ids.
    Table { table: BTreeMap<String, TableEntry> },
    /// Randomized-response wrapper: keep the inner parameter with
    /// probability `e^eps / (e^eps + M - 1)`, otherwise emit one of the
    /// other `M - 1` ids uniformly. The composite procedure is `eps`-DP.
    RandomizedResponse { eps: f64, inner: Box<Procedure> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableEntry {
    Deterministic(String),
    Randomized(BTreeMap<String, f64>),
}

/// Per-outcome distribution over canonical parameter indices.
type Assignment = Vec<(usize, f64)>;

struct ResolvedProcedure {
    theta_ids: Vec<String>,
    /// One sparse assignment per enumerated outcome, in enumeration order.
    assignments: Vec<Assignment>,
}

fn canonicalize(raw: Vec<Vec<(String, f64)>>) -> ResolvedProcedure {
    let mut theta_ids: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut assignments = Vec::with_capacity(raw.len());
    for labeled in raw {
        let mut assign = Vec::with_capacity(labeled.len());
        for (label, weight) in labeled {
            let idx = *index.entry(label.clone()).or_insert_with(|| {
                theta_ids.push(label);
                theta_ids.len() - 1
            });
            assign.push((idx, weight));
        }
        assignments.push(assign);
    }
    ResolvedProcedure {
        theta_ids,
        assignments,
    }
}

impl Procedure {
    /// Resolve to canonical integer parameter ids, assigned in first-seen
    /// count-vector order over the given enumeration.
    fn resolve(&self, outcomes: &[CountVector]) -> Result<ResolvedProcedure> {
        match self {
            Procedure::Injective => Ok(canonicalize(
                (0..outcomes.len())
                    .map(|i| vec![(i.to_string(), 1.0)])
                    .collect(),
            )),
            Procedure::Constant => Ok(canonicalize(
                outcomes.iter().map(|_| vec![("0".into(), 1.0)]).collect(),
            )),
            Procedure::MaxAtom => Ok(canonicalize(
                outcomes
                    .iter()
                    .map(|o| {
                        let top = o
                            .counts()
                            .iter()
                            .rposition(|c| *c > 0)
                            .expect("count vectors sum to n >= 1");
                        vec![(top.to_string(), 1.0)]
                    })
                    .collect(),
            )),
            Procedure::Table { table } => {
                let mut raw = Vec::with_capacity(outcomes.len());
                for o in outcomes {
                    let key = o
                        .counts()
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    let entry = table
                        .get(&key)
                        .ok_or_else(|| Error::MissingTableEntry(o.counts().to_vec()))?;
                    match entry {
                        TableEntry::Deterministic(id) => raw.push(vec![(id.clone(), 1.0)]),
                        TableEntry::Randomized(dist) => {
                            let total: f64 = dist.values().sum();
                            if (total - 1.0).abs() > 1e-9 || dist.values().any(|w| *w < 0.0) {
                                return Err(Error::InvalidDistribution(format!(
                                    "randomized table entry for {key:?} sums to {total}"
                                )));
                            }
                            raw.push(dist.iter().map(|(k, v)| (k.clone(), *v)).collect());
                        }
                    }
                }
                Ok(canonicalize(raw))
            }
            Procedure::RandomizedResponse { eps, inner } => {
                if eps.is_nan() || *eps < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "randomized response eps must be nonnegative, got {eps}"
                    )));
                }
                let base = inner.resolve(outcomes)?;
                let m = base.theta_ids.len();
                if m == 1 {
                    return Ok(base);
                }
                let denom = eps.exp() + (m - 1) as f64;
                let keep = eps.exp() / denom;
                let flip = 1.0 / denom;
                let assignments = base
                    .assignments
                    .iter()
                    .map(|assign| {
                        let mut dense = vec![0.0; m];
                        for &(idx, w) in assign {
                            for (j, d) in dense.iter_mut().enumerate() {
                                *d += w * if j == idx { keep } else { flip };
                            }
                        }
                        dense.into_iter().enumerate().collect()
                    })
                    .collect();
                Ok(ResolvedProcedure {
                    theta_ids: base.theta_ids,
                    assignments,
                })
            }
        }
    }
}

/// Number of count vectors for `K` atoms and `n` samples:
/// `C(n + K - 1, K - 1)`, saturating above the guard.
pub fn count_outcomes(k: usize, n: u64) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=(k as u64 - 1) {
        match acc.checked_mul((n + i) as u128) {
            Some(v) => acc = v / i as u128,
            None => return u128::MAX,
        }
    }
    acc
}

/// All count vectors over `K` atoms summing to `n`, each exactly once, in
/// lexicographic order.
pub fn enumerate_outcomes(k: usize, n: u64) -> Result<Vec<CountVector>> {
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one atom".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let total = count_outcomes(k, n);
    if total > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard {
            k,
            n,
            outcomes: total,
            limit: ENUMERATION_GUARD,
        });
    }
    if total.saturating_mul(k as u128) > CELL_GUARD {
        return Err(Error::EnumerationGuard {
            k,
            n,
            outcomes: total,
            limit: CELL_GUARD / k as u128,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut current = vec![0u64; k];
    fill(&mut out, &mut current, 0, n);
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}

fn fill(out: &mut Vec<CountVector>, current: &mut Vec<u64>, pos: usize, remaining: u64) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(CountVector(current.clone()));
        return;
    }
    for c in 0..=remaining {
        current[pos] = c;
        fill(out, current, pos + 1, remaining - c);
    }
}

/// Multinomial probability of observing exactly these counts under the
/// given law, in log space.
pub fn multinomial_pmf(counts: &CountVector, dist: &DiscreteDistribution) -> f64 {
    let mut ln = ln_factorial(counts.n());
    for (c, p) in counts.counts().iter().zip(dist.probs()) {
        ln += *c as f64 * p.ln() - ln_factorial(*c);
    }
    ln.exp()
}

/// Probability of these counts when one of the `n` samples is pinned to
/// atom `k` and the remaining `n - 1` are drawn fresh:
/// `(counts_k / (n p_k)) * multinomial_pmf(counts)`. Zero when the pinned
/// atom has no count.
pub fn leave_one_in_pmf(counts: &CountVector, dist: &DiscreteDistribution, atom: usize) -> f64 {
    let ck = counts.counts()[atom];
    if ck == 0 {
        return 0.0;
    }
    ck as f64 / (counts.n() as f64 * dist.probs()[atom]) * multinomial_pmf(counts, dist)
}

/// The joint laws `(parameters, fresh sample)` and `(parameters, training
/// sample)` of the procedure on `n` samples.
///
/// The fresh-sample joint is the product of the parameter marginal with
/// the data law; the training-sample joint weights atom `k` by
/// `p_k * leave_one_in_pmf`. Per-outcome terms are computed in parallel
/// and merged in enumeration order, so the matrices are bit-reproducible
/// for any worker count.
pub fn joint_distributions(
    dist: &DiscreteDistribution,
    n: u64,
    proc: &Procedure,
) -> Result<(JointDistribution, JointDistribution)> {
    let outcomes = enumerate_outcomes(dist.k(), n)?;
    let resolved = proc.resolve(&outcomes)?;
    let n_theta = resolved.theta_ids.len();
    let k = dist.k();
    let nf = n as f64;

    let pmfs: Vec<f64> = ordered_map(&outcomes, |o| multinomial_pmf(o, dist));

    let mut theta_marg = vec![0.0; n_theta];
    let mut j1 = vec![0.0; n_theta * k];
    for ((outcome, pmf), assign) in outcomes.iter().zip(&pmfs).zip(&resolved.assignments) {
        for &(theta, w) in assign {
            let mass = pmf * w;
            theta_marg[theta] += mass;
            let row = &mut j1[theta * k..(theta + 1) * k];
            for (rk, c) in row.iter_mut().zip(outcome.counts()) {
                // p_k * leave_one_in = (counts_k / n) * multinomial_pmf.
                *rk += mass * *c as f64 / nf;
            }
        }
    }

    let j0_mass: Vec<f64> = theta_marg
        .iter()
        .flat_map(|t| dist.probs().iter().map(move |p| t * p))
        .collect();

    let z_ids = dist.atoms().to_vec();
    let j0 = JointDistribution::from_flat(resolved.theta_ids.clone(), z_ids.clone(), j0_mass)?;
    let j1 = JointDistribution::from_flat(resolved.theta_ids, z_ids, j1)?;
    Ok((j0, j1))
}

/// Exact security assessment of the procedure by full enumeration.
pub fn delta_bruteforce(
    dist: &DiscreteDistribution,
    n: u64,
    weights: &AttackWeights,
    proc: &Procedure,
) -> Result<SecurityReport> {
    let (j0, j1) = joint_distributions(dist, n, proc)?;
    let delta = delta_from_joints(weights, &j0, &j1)?;
    Ok(SecurityReport {
        delta,
        sec: sec_from_delta(delta),
        sup_accuracy: sup_accuracy(weights, &j0, &j1)?,
        method: Method::BruteForce,
        notes: format!(
            "exact enumeration of {} count vectors (K={}, n={})",
            count_outcomes(dist.k(), n),
            dist.k(),
            n
        ),
    })
}

/// Largest attainable central quantity over all learning procedures,
/// realized by mapping each count vector to a distinct parameter.
pub fn max_delta_injective(
    dist: &DiscreteDistribution,
    n: u64,
    weights: &AttackWeights,
) -> Result<f64> {
    let (j0, j1) = joint_distributions(dist, n, &Procedure::Injective)?;
    delta_from_joints(weights, &j0, &j1)
}

/// Outcome of exhaustively testing a raw tuple-indexed procedure for
/// permutation invariance and redundancy invariance.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub symmetric: bool,
    pub redundancy_invariant: bool,
    /// Human-readable witness of the first violated identity, if any.
    pub first_violation: Option<String>,
}

impl SymmetryReport {
    /// Both properties hold, so the map factors through the empirical
    /// distribution (up to the tested lengths).
    pub fn factors_through_empirical(&self) -> bool {
        self.symmetric && self.redundancy_invariant
    }
}

/// Exhaustively test a procedure on ordered tuples of atom indices:
/// permutation invariance on every tuple of length `<= n_max` (via
/// adjacent transpositions, which generate all permutations) and
/// redundancy invariance `f(a) = f(a, ..., a)` for every repetition count
/// that fits under the cap.
pub fn check_symmetry_redundancy<F>(proc_raw: F, k: usize, n_max: usize) -> Result<SymmetryReport>
where
    F: Fn(&[usize]) -> u64,
{
    if k == 0 || k > 4 || n_max == 0 || n_max > 8 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive symmetry check capped at K <= 4, n_max <= 8; got K={k}, n_max={n_max}"
        )));
    }
    let mut symmetric = true;
    let mut redundancy = true;
    let mut witness: Option<String> = None;

    for len in 1..=n_max {
        let mut tuple = vec![0usize; len];
        loop {
            let base = proc_raw(&tuple);
            if symmetric {
                for i in 0..len.saturating_sub(1) {
                    let mut swapped = tuple.clone();
                    swapped.swap(i, i + 1);
                    if proc_raw(&swapped) != base {
                        symmetric = false;
                        witness.get_or_insert_with(|| {
                            format!("f{tuple:?} != f{swapped:?} (transposition at {i})")
                        });
                        break;
                    }
                }
            }
            if redundancy {
                let mut repeated = tuple.clone();
                loop {
                    repeated.extend_from_slice(&tuple);
                    if repeated.len() > n_max {
                        break;
                    }
                    if proc_raw(&repeated) != base {
                        redundancy = false;
                        witness.get_or_insert_with(|| {
                            format!("f{tuple:?} != f applied to {}x repetition", repeated.len() / len)
                        });
                        break;
                    }
                }
            }
            // Odometer over {0..k}^len.
            let mut pos = 0;
            loop {
                if pos == len {
                    break;
                }
                tuple[pos] += 1;
                if tuple[pos] < k {
                    break;
                }
                tuple[pos] = 0;
                pos += 1;
            }
            if pos == len {
                break;
            }
        }
    }
    Ok(SymmetryReport {
        symmetric,
        redundancy_invariant: redundancy,
        first_violation: witness,
    })
}

/// Best attack accuracy by exhaustive search over all `2^cells` decision
/// subsets. Independent of the pointwise optimality rule; used to certify
/// it.
pub fn sup_accuracy_subset_bruteforce(
    j0: &JointDistribution,
    j1: &JointDistribution,
    weights: &AttackWeights,
) -> Result<f64> {
    if !j0.same_cells(j1) {
        return Err(Error::MismatchedCells);
    }
    let cells = j0.mass().len();
    if cells > SUBSET_GUARD {
        return Err(Error::SubsetGuard(cells, SUBSET_GUARD));
    }
    let accept = weights.accuracy_floor_accept();
    let nu = weights.nu();
    // Accuracy of subset B is nu + sum_{c in B} (accept*j1[c] - nu*j0[c]);
    // walk all subsets in Gray-code order updating one cell at a time.
    let contrib: Vec<f64> = j0
        .mass()
        .iter()
        .zip(j1.mass())
        .map(|(p, q)| accept * q - nu * p)
        .collect();
    let mut best = nu;
    let mut acc = nu;
    let mut prev_gray: u64 = 0;
    for i in 1u64..(1u64 << cells) {
        let gray = i ^ (i >> 1);
        let flipped = (gray ^ prev_gray).trailing_zeros() as usize;
        if gray & (1 << flipped) != 0 {
            acc += contrib[flipped];
        } else {
            acc -= contrib[flipped];
        }
        if acc > best {
            best = acc;
        }
        prev_gray = gray;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::compensated_sum;

    fn dist(probs: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::from_probs(probs.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_small_cases() {
        let got = enumerate_outcomes(2, 2).unwrap();
        let want = vec![
            CountVector(vec![0, 2]),
            CountVector(vec![1, 1]),
            CountVector(vec![2, 0]),
        ];
        assert_eq!(got, want);
        assert_eq!(enumerate_outcomes(3, 2).unwrap().len(), 6);
        assert_eq!(enumerate_outcomes(4, 8).unwrap().len(), 165);
        assert_eq!(count_outcomes(4, 8), 165);
    }

    #[test]
    fn enumeration_guard_names_count() {
        let err = enumerate_outcomes(8, 1000).unwrap_err();
        match err {
            Error::EnumerationGuard { outcomes, .. } => assert!(outcomes > ENUMERATION_GUARD),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn cell_guard_rejects_wide_instances() {
        // 4.5e6 outcomes pass the count guard but the stored vectors
        // would need ~100 GB.
        assert!(matches!(
            enumerate_outcomes(3000, 2),
            Err(Error::EnumerationGuard { .. })
        ));
    }

    #[test]
    fn multinomial_pmf_hand_values() {
        let d = dist(&[0.5, 0.5]);
        assert!((multinomial_pmf(&CountVector(vec![1, 1]), &d) - 0.5).abs() < 1e-13);
        let d3 = dist(&[0.5, 0.3, 0.2]);
        let got = multinomial_pmf(&CountVector(vec![1, 1, 1]), &d3);
        assert!((got - 6.0 * 0.03).abs() < 1e-13);
    }

    #[test]
    fn multinomial_pmf_sums_to_one() {
        for (k, n, probs) in [
            (2, 5u64, vec![0.3, 0.7]),
            (3, 4, vec![0.5, 0.3, 0.2]),
            (4, 6, vec![0.4, 0.3, 0.2, 0.1]),
        ] {
            let d = dist(&probs);
            let total = compensated_sum(
                enumerate_outcomes(k, n)
                    .unwrap()
                    .iter()
                    .map(|o| multinomial_pmf(o, &d)),
            );
            assert!((total - 1.0).abs() < 1e-12, "k={k} n={n}");
        }
    }

    #[test]
    fn leave_one_in_rows_are_stochastic() {
        let d = dist(&[0.5, 0.3, 0.2]);
        let outcomes = enumerate_outcomes(3, 5).unwrap();
        for atom in 0..3 {
            let total =
                compensated_sum(outcomes.iter().map(|o| leave_one_in_pmf(o, &d, atom)));
            assert!((total - 1.0).abs() < 1e-12, "atom={atom}");
        }
    }

    #[test]
    fn leave_one_in_zero_count_is_zero() {
        let d = dist(&[0.5, 0.5]);
        assert_eq!(leave_one_in_pmf(&CountVector(vec![0, 2]), &d, 0), 0.0);
    }

    #[test]
    fn constant_procedure_leaks_nothing() {
        let d = dist(&[0.6, 0.4]);
        let w = AttackWeights::new(0.5, 1.0).unwrap();
        let (j0, j1) = joint_distributions(&d, 4, &Procedure::Constant).unwrap();
        assert_eq!(j0.mass(), j1.mass());
        let report = delta_bruteforce(&d, 4, &w, &Procedure::Constant).unwrap();
        assert!(report.delta.abs() < 1e-12);
        assert!((report.sec - 1.0).abs() < 1e-12);
    }

    #[test]
    fn injective_two_atoms_two_samples() {
        let d = dist(&[0.5, 0.5]);
        let w = AttackWeights::new(0.5, 1.0).unwrap();
        let delta = max_delta_injective(&d, 2, &w).unwrap();
        assert!((delta - 0.25).abs() < 1e-13);
        let report = delta_bruteforce(&d, 2, &w, &Procedure::Injective).unwrap();
        assert!((report.sec - 0.75).abs() < 1e-13);
    }

    #[test]
    fn joints_sum_to_one_and_share_marginals() {
        let d = dist(&[0.5, 0.3, 0.2]);
        for proc in [Procedure::Injective, Procedure::MaxAtom] {
            let (j0, j1) = joint_distributions(&d, 4, &proc).unwrap();
            assert!((compensated_sum(j0.mass().iter().copied()) - 1.0).abs() < 1e-12);
            assert!((compensated_sum(j1.mass().iter().copied()) - 1.0).abs() < 1e-12);
            // Fresh-sample joint is the product of the training joint's marginals.
            let prod = j1.product_of_marginals();
            for (a, b) in j0.mass().iter().zip(prod.mass()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn randomized_mixture_lies_between_extremes() {
        let d = dist(&[0.5, 0.5]);
        let w = AttackWeights::new(0.5, 1.0).unwrap();
        // Mix the injective labels with a coin flip toward a single label.
        let outcomes = enumerate_outcomes(2, 2).unwrap();
        let mut table = BTreeMap::new();
        for (i, o) in outcomes.iter().enumerate() {
            let key = format!("{},{}", o.counts()[0], o.counts()[1]);
            let mut mix = BTreeMap::new();
            mix.insert("shared".to_string(), 0.5);
            mix.insert(format!("own{i}"), 0.5);
            table.insert(key, TableEntry::Randomized(mix));
        }
        let mixed = delta_bruteforce(&d, 2, &w, &Procedure::Table { table })
            .unwrap()
            .delta;
        let injective = max_delta_injective(&d, 2, &w).unwrap();
        assert!(mixed > 1e-6 && mixed < injective - 1e-6, "mixed={mixed}");
    }

    #[test]
    fn table_missing_entry_is_reported() {
        let d = dist(&[0.5, 0.5]);
        let r = joint_distributions(
            &d,
            2,
            &Procedure::Table {
                table: BTreeMap::new(),
            },
        );
        assert!(matches!(r, Err(Error::MissingTableEntry(_))));
    }

    #[test]
    fn max_atom_matches_bernoulli_closed_form() {
        let w = AttackWeights::new(0.5, 1.0).unwrap();
        for p in [0.2, 0.5, 0.8] {
            let d = dist(&[1.0 - p, p]);
            let brute = delta_bruteforce(&d, 6, &w, &Procedure::MaxAtom)
                .unwrap()
                .delta;
            let closed = crate::discrete::bernoulli_max_delta(p, 6, &w).unwrap();
            assert!((brute - closed).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn randomized_response_caps_delta() {
        let d = dist(&[0.5, 0.5]);
        let w = AttackWeights::new(0.5, 1.0).unwrap();
        let eps = 1.0;
        let wrapped = Procedure::RandomizedResponse {
            eps,
            inner: Box::new(Procedure::Injective),
        };
        let delta = delta_bruteforce(&d, 3, &w, &wrapped).unwrap().delta;
        let cap = crate::divergence::ldp_delta_sup(eps, 0.0).unwrap();
        assert!(delta <= cap + 1e-12, "delta={delta} cap={cap}");
        // Wrapping can only reduce leakage.
        assert!(delta <= max_delta_injective(&d, 3, &w).unwrap() + 1e-12);
    }

    #[test]
    fn symmetry_check_sample_mean() {
        let mean = |t: &[usize]| (t.iter().sum::<usize>() / t.len()) as u64;
        let r = check_symmetry_redundancy(mean, 3, 6).unwrap();
        assert!(r.symmetric && r.redundancy_invariant);
        assert!(r.factors_through_empirical());
    }

    #[test]
    fn symmetry_check_first_element() {
        let first = |t: &[usize]| t[0] as u64;
        let r = check_symmetry_redundancy(first, 3, 5).unwrap();
        assert!(!r.symmetric);
        assert!(r.first_violation.is_some());
    }

    #[test]
    fn symmetry_check_dataset_size() {
        let size = |t: &[usize]| t.len() as u64;
        let r = check_symmetry_redundancy(size, 2, 6).unwrap();
        assert!(r.symmetric && !r.redundancy_invariant);
    }

    #[test]
    fn symmetry_check_guard() {
        assert!(check_symmetry_redundancy(|_| 0, 5, 3).is_err());
        assert!(check_symmetry_redundancy(|_| 0, 2, 9).is_err());
    }

    #[test]
    fn subset_bruteforce_two_cells() {
        let j0 = JointDistribution::new(
            vec!["t".into()],
            vec!["a".into(), "b".into()],
            vec![vec![0.7, 0.3]],
        )
        .unwrap();
        let j1 = JointDistribution::new(
            vec!["t".into()],
            vec!["a".into(), "b".into()],
            vec![vec![0.2, 0.8]],
        )
        .unwrap();
        let w = AttackWeights::new(0.5, 1.0).unwrap();
        // Four subsets by hand: {} -> .5, {a} -> .25, {b} -> .75, {a,b} -> .5.
        let best = sup_accuracy_subset_bruteforce(&j0, &j1, &w).unwrap();
        assert!((best - 0.75).abs() < 1e-12);
        let sup = sup_accuracy(&w, &j0, &j1).unwrap();
        assert!((best - sup).abs() < 1e-12);
    }

    #[test]
    fn subset_bruteforce_equal_joints() {
        let j = JointDistribution::new(
            vec!["t".into()],
            vec!["a".into(), "b".into()],
            vec![vec![0.5, 0.5]],
        )
        .unwrap();
        for (nu, lambda) in [(0.3, 1.0), (0.5, 1.0), (0.7, 0.5)] {
            let w = AttackWeights::new(nu, lambda).unwrap();
            let best = sup_accuracy_subset_bruteforce(&j, &j, &w).unwrap();
            let floor = nu.max(lambda * (1.0 - nu));
            assert!((best - floor).abs() < 1e-12);
        }
    }

    #[test]
    fn subset_guard_enforced() {
        let n = 3;
        let mass = vec![vec![1.0 / 21.0; 7]; n];
        let j = JointDistribution::new(
            (0..n).map(|i| i.to_string()).collect(),
            (0..7).map(|i| i.to_string()).collect(),
            mass,
        )
        .unwrap();
        let w = AttackWeights::new(0.5, 1.0).unwrap();
        assert!(matches!(
            sup_accuracy_subset_bruteforce(&j, &j, &w),
            Err(Error::SubsetGuard(21, SUBSET_GUARD))
        ));
    }
}
