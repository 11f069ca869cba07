//! Desk-scale overfitting experiments with exactly solvable interpolators:
//! minimum-norm linear regression (zero training loss once parameters
//! outnumber samples) and 1-nearest-neighbor regression (zero training
//! loss by construction). A loss-threshold attack separates train from
//! validation almost perfectly in that regime, which is exactly what the
//! security bound for overfitting procedures predicts.

use crate::exec::{ordered_chunk_map, ordered_map};
use crate::numerics::compensated_sum;
use crate::types::AttackWeights;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

const MC_CHUNK: usize = 4096;

/// Derive an independent RNG stream from a base seed and a role tag.
/// SplitMix64 mixing keeps streams decorrelated for any tag choice.
fn rng_for(seed: u64, tag: u64) -> ChaCha12Rng {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha12Rng::seed_from_u64(z ^ (z >> 31))
}

const TAG_TRAIN_X: u64 = 1;
const TAG_TRAIN_NOISE: u64 = 2;
const TAG_VAL_X: u64 = 3;
const TAG_VAL_NOISE: u64 = 4;
const TAG_MC_FRESH: u64 = 5;
const TAG_MC_MEMBER: u64 = 6;

/// Regression target applied to `beta . x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// `y = beta . x + noise`.
    Linear,
    /// `y = sin(pi beta . x) + noise`.
    Sine,
}

/// A synthetic regression task: inputs uniform on the unit sphere,
/// responses from a fixed unit-norm direction plus Gaussian noise.
#[derive(Clone, Debug, Serialize)]
pub struct RegressionTask {
    pub d: usize,
    pub n_train: usize,
    pub n_val: usize,
    beta: Vec<f64>,
    pub noise_std: f64,
    pub target: TargetKind,
    pub seed: u64,
}

#[derive(Deserialize)]
struct RawTask {
    d: usize,
    n_train: usize,
    n_val: usize,
    #[serde(default)]
    beta: Option<Vec<f64>>,
    noise_std: f64,
    target: TargetKind,
    seed: u64,
}

impl<'de> Deserialize<'de> for RegressionTask {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawTask::deserialize(deserializer)?;
        let beta = raw
            .beta
            .unwrap_or_else(|| RegressionTask::axis_beta(raw.d));
        RegressionTask::new(
            raw.d,
            raw.n_train,
            raw.n_val,
            beta,
            raw.noise_std,
            raw.target,
            raw.seed,
        )
        .map_err(serde::de::Error::custom)
    }
}

impl RegressionTask {
    pub fn new(
        d: usize,
        n_train: usize,
        n_val: usize,
        beta: Vec<f64>,
        noise_std: f64,
        target: TargetKind,
        seed: u64,
    ) -> Result<Self> {
        if d == 0 || n_train == 0 || n_val == 0 {
            return Err(Error::InvalidParameter(
                "need positive dimension and split sizes".into(),
            ));
        }
        if beta.len() != d {
            return Err(Error::DimensionMismatch(beta.len(), d));
        }
        let norm = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "beta must have unit norm, got {norm}"
            )));
        }
        if noise_std.is_nan() || noise_std < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise std must be nonnegative, got {noise_std}"
            )));
        }
        Ok(Self {
            d,
            n_train,
            n_val,
            beta,
            noise_std,
            target,
            seed,
        })
    }

    /// The first coordinate axis; the input law is rotation invariant, so
    /// nothing is lost by fixing the direction.
    pub fn axis_beta(d: usize) -> Vec<f64> {
        let mut beta = vec![0.0; d];
        if d > 0 {
            beta[0] = 1.0;
        }
        beta
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    fn signal(&self, x: &[f64]) -> f64 {
        let t: f64 = self.beta.iter().zip(x).map(|(b, v)| b * v).sum();
        match self.target {
            TargetKind::Linear => t,
            TargetKind::Sine => (std::f64::consts::PI * t).sin(),
        }
    }
}

/// Feature rows and responses.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Independent train and validation splits of a task.
#[derive(Clone, Debug)]
pub struct GeneratedTask {
    pub train: Dataset,
    pub validation: Dataset,
}

fn sample_sphere(rng: &mut ChaCha12Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Draw the train and validation splits; reproducible from the task seed,
/// with independent streams for inputs and noise.
pub fn generate_task(task: &RegressionTask) -> GeneratedTask {
    let draw = |n: usize, x_tag: u64, noise_tag: u64| {
        let mut x_rng = rng_for(task.seed, x_tag);
        let mut noise_rng = rng_for(task.seed, noise_tag);
        let x: Vec<Vec<f64>> = (0..n).map(|_| sample_sphere(&mut x_rng, task.d)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|xi| {
                let noise: f64 = StandardNormal.sample(&mut noise_rng);
                task.signal(xi) + task.noise_std * noise
            })
            .collect();
        Dataset { x, y }
    };
    GeneratedTask {
        train: draw(task.n_train, TAG_TRAIN_X, TAG_TRAIN_NOISE),
        validation: draw(task.n_val, TAG_VAL_X, TAG_VAL_NOISE),
    }
}

/// A fitted regressor.
#[derive(Clone, Debug)]
pub enum Predictor {
    MinNormLinear { coef: Vec<f64> },
    OneNearestNeighbor { x: Vec<Vec<f64>>, y: Vec<f64> },
}

impl Predictor {
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Predictor::MinNormLinear { coef } => coef.iter().zip(x).map(|(c, v)| c * v).sum(),
            Predictor::OneNearestNeighbor { x: xs, y } => {
                // Strict inequality keeps the lowest index on distance ties.
                let mut best = 0;
                let mut best_d2 = f64::INFINITY;
                for (i, xi) in xs.iter().enumerate() {
                    let d2: f64 = xi.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 < best_d2 {
                        best_d2 = d2;
                        best = i;
                    }
                }
                y[best]
            }
        }
    }

    pub fn squared_loss(&self, x: &[f64], y: f64) -> f64 {
        let e = self.predict(x) - y;
        e * e
    }
}

/// Minimum-norm least-squares fit.
///
/// With more parameters than samples and inputs in general position this
/// interpolates: every training loss is at numerical zero. With fewer
/// parameters than samples it coincides with ordinary least squares.
/// Rank deficiency (duplicated points included) is absorbed by the
/// pseudo-inverse with relative singular-value cutoff `1e-12`.
pub fn fit_minnorm_linreg(train: &Dataset) -> Result<Predictor> {
    if train.is_empty() {
        return Err(Error::InvalidParameter("empty training set".into()));
    }
    let n = train.len();
    let d = train.x[0].len();
    let x = DMatrix::from_fn(n, d, |i, j| train.x[i][j]);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "design matrix has nonfinite entries".into(),
        ));
    }
    let y = DVector::from_column_slice(&train.y);
    let svd = x.svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let coef = svd
        .solve(&y, 1e-12 * max_sv.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(Predictor::MinNormLinear {
        coef: coef.iter().cloned().collect(),
    })
}

/// 1-nearest-neighbor regressor; training loss is zero by construction.
pub fn fit_1nn(train: &Dataset) -> Result<Predictor> {
    if train.is_empty() {
        return Err(Error::InvalidParameter("empty training set".into()));
    }
    Ok(Predictor::OneNearestNeighbor {
        x: train.x.clone(),
        y: train.y.clone(),
    })
}

/// The loss-threshold attack: declare "member" iff the squared error at
/// the point is at most `eps` (boundary included).
pub fn loss_threshold_attack(eps: f64, predictor: &Predictor, x: &[f64], y: f64) -> bool {
    predictor.squared_loss(x, y) <= eps
}

/// Fraction of the dataset whose loss is at most each threshold;
/// nondecreasing in the threshold.
pub fn fraction_below(predictor: &Predictor, data: &Dataset, eps_list: &[f64]) -> Vec<f64> {
    let points: Vec<(usize, f64)> = data.y.iter().cloned().enumerate().collect();
    let losses = ordered_map(&points, |(i, y)| predictor.squared_loss(&data.x[*i], *y));
    eps_list
        .iter()
        .map(|eps| losses.iter().filter(|l| **l <= *eps).count() as f64 / losses.len() as f64)
        .collect()
}

/// An attack under evaluation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Attack {
    /// Always answer `member`/`non-member`.
    Constant(bool),
    /// Loss-threshold attack with the given threshold.
    LossThreshold(f64),
}

impl Attack {
    fn decides_member(&self, predictor: &Predictor, x: &[f64], y: f64) -> bool {
        match self {
            Attack::Constant(b) => *b,
            Attack::LossThreshold(eps) => loss_threshold_attack(*eps, predictor, x, y),
        }
    }
}

/// Monte Carlo accuracy estimate with a binomial normal-approximation
/// confidence interval.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AccuracyEstimate {
    pub accuracy: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_draws: u64,
    pub seed: u64,
}

/// Estimate the weighted attack accuracy
/// `nu P(attack = 0 on fresh) + lambda (1-nu) P(attack = 1 on member)`
/// with `n_draws` Monte Carlo draws for each of the two terms. Fresh
/// points are drawn uniformly from `holdout`, members uniformly from
/// `train`. Draw chunks carry pre-split RNG streams, so the estimate does
/// not depend on the worker count.
pub fn empirical_attack_accuracy(
    weights: &AttackWeights,
    predictor: &Predictor,
    train: &Dataset,
    holdout: &Dataset,
    attack: Attack,
    n_draws: u64,
    seed: u64,
) -> Result<AccuracyEstimate> {
    if train.is_empty() || holdout.is_empty() {
        return Err(Error::InvalidParameter(
            "train and holdout pools must be nonempty".into(),
        ));
    }
    if n_draws == 0 {
        return Err(Error::InvalidParameter("n_draws must be positive".into()));
    }
    let count_hits = |pool: &Dataset, tag: u64, want_member: bool| -> u64 {
        let partials = ordered_chunk_map(n_draws as usize, MC_CHUNK, |chunk_idx, range| {
            let mut rng = rng_for(seed, tag ^ ((chunk_idx as u64) << 8));
            let mut hits = 0u64;
            for _ in range {
                let i = rng.random_range(0..pool.len());
                let decided = attack.decides_member(predictor, &pool.x[i], pool.y[i]);
                if decided == want_member {
                    hits += 1;
                }
            }
            hits
        });
        partials.into_iter().sum()
    };
    let p0 = count_hits(holdout, TAG_MC_FRESH, false) as f64 / n_draws as f64;
    let p1 = count_hits(train, TAG_MC_MEMBER, true) as f64 / n_draws as f64;
    let accept = weights.accuracy_floor_accept();
    let accuracy = weights.nu() * p0 + accept * p1;
    let var = (weights.nu().powi(2) * p0 * (1.0 - p0) + accept.powi(2) * p1 * (1.0 - p1))
        / n_draws as f64;
    let std_error = var.sqrt();
    Ok(AccuracyEstimate {
        accuracy,
        std_error,
        ci_low: accuracy - 1.96 * std_error,
        ci_high: accuracy + 1.96 * std_error,
        n_draws,
        seed,
    })
}

/// Security upper bound for a procedure whose training losses are below
/// `eps` with probability at least `1 - alpha`:
/// `max(1, 1/gamma) (alpha + gamma p_loss_below_eps)`.
pub fn overfit_security_upper_bound(alpha: f64, gamma: f64, p_loss_below_eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&p_loss_below_eps) {
        return Err(Error::InvalidParameter(
            "alpha and the loss probability must lie in [0,1]".into(),
        ));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be a positive real, got {gamma}"
        )));
    }
    Ok((1.0f64).max(1.0 / gamma) * (alpha + gamma * p_loss_below_eps))
}

/// Loss threshold, residual probability, and the stopping level
/// `eta = epsilon * alpha` that guarantees the threshold is met on a
/// `1 - alpha` fraction of the training set.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OverfitParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub eta: f64,
}

impl OverfitParams {
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be nonnegative, got {epsilon}"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        Ok(Self {
            epsilon,
            alpha,
            eta: epsilon * alpha,
        })
    }
}

/// Result of the stopping-rule check on a vector of per-sample training
/// losses.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StoppingCheck {
    pub mean_loss: f64,
    /// Mean training loss at most `eps * alpha` (the stopping rule fired).
    pub mean_le_eta: bool,
    pub fraction_below_eps: f64,
    /// At least a `1 - alpha` fraction of losses is at most `eps`.
    pub fraction_ok: bool,
    /// `mean_le_eta` implies `fraction_ok`; counting makes this exact, so
    /// it can never be false.
    pub implication_holds: bool,
}

/// Check the stopping rule `mean loss <= eps * alpha` and, independently,
/// the `(eps, 1-alpha)`-overfitting count it guarantees.
pub fn check_stopping_overfit(losses: &[f64], eps: f64, alpha: f64) -> Result<StoppingCheck> {
    if losses.is_empty() {
        return Err(Error::InvalidParameter("no losses supplied".into()));
    }
    if losses.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::InvalidParameter(
            "losses must be finite and nonnegative".into(),
        ));
    }
    let params = OverfitParams::new(eps, alpha)?;
    let n = losses.len() as f64;
    let mean_loss = compensated_sum(losses.iter().copied()) / n;
    let below = losses.iter().filter(|l| **l <= eps).count() as f64;
    let mean_le_eta = mean_loss <= params.eta;
    let fraction_ok = below >= n * (1.0 - alpha);
    Ok(StoppingCheck {
        mean_loss,
        mean_le_eta,
        fraction_below_eps: below / n,
        fraction_ok,
        implication_holds: !mean_le_eta || fraction_ok,
    })
}

/// Training losses of a predictor over a dataset.
pub fn training_losses(predictor: &Predictor, data: &Dataset) -> Vec<f64> {
    let points: Vec<(usize, f64)> = data.y.iter().cloned().enumerate().collect();
    ordered_map(&points, |(i, y)| predictor.squared_loss(&data.x[*i], *y))
}

/// Default loss-threshold grid used by the fraction curves.
pub fn default_eps_grid() -> Vec<f64> {
    vec![1e-6, 1e-4, 1e-2, 1.0]
}
