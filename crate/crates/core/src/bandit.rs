//! Bayesian linear surrogate used to order candidate evaluations.

use nalgebra::{SMatrix, SVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::compiler::{LayoutMethod, RoutingMethod, StrategySpec};

pub const FEATURE_DIM: usize = 12;
pub const POSTERIOR_FORMAT_VERSION: u32 = 1;

pub type FeatureVector = SVector<f64, FEATURE_DIM>;
type Matrix = SMatrix<f64, FEATURE_DIM, FEATURE_DIM>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BanditError {
    #[error("observation must be finite, got {0}")]
    NonFiniteObservation(f64),
    #[error("hyperparameters must be finite and positive")]
    BadHyperparameters,
    #[error("posterior precision is not positive definite")]
    NotPositiveDefinite,
    #[error("unsupported posterior format version {0}")]
    Version(u32),
    #[error("malformed posterior state: {0}")]
    Malformed(String),
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Fixed 12-slot encoding of a strategy; seeds are not featurized.
pub fn featurize(s: &StrategySpec) -> FeatureVector {
    let c = s.compilation();
    let sup = s.suppression();
    let m = s.mitigation();
    FeatureVector::from([
        1.0,
        c.optimization_level as f64 / 3.0,
        flag(c.routing_method == RoutingMethod::Lookahead),
        flag(c.layout_method == LayoutMethod::NoiseAware),
        flag(c.layout_method == LayoutMethod::Trivial),
        flag(sup.pauli_twirling),
        flag(sup.dynamical_decoupling),
        flag(sup.measurement_twirling),
        flag(m.readout_mitigation),
        flag(m.zne),
        flag(s.cutting().cutting),
        sup.num_twirls as f64 / 8.0,
    ])
}

/// Gaussian posterior over linear weights with prior `N(0, alpha^-1 I)` and
/// observation noise `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPosterior {
    alpha: f64,
    sigma: f64,
    precision: Matrix,
    /// `X^T X`
    xtx: Matrix,
    /// `X^T y`
    xty: FeatureVector,
    mean: FeatureVector,
    t: u64,
}

impl Default for LinearPosterior {
    fn default() -> Self {
        LinearPosterior::new(1.0, 1.0).expect("valid defaults")
    }
}

impl LinearPosterior {
    pub fn new(alpha: f64, sigma: f64) -> Result<Self, BanditError> {
        if !(alpha.is_finite() && alpha > 0.0 && sigma.is_finite() && sigma > 0.0) {
            return Err(BanditError::BadHyperparameters);
        }
        Ok(LinearPosterior {
            alpha,
            sigma,
            precision: Matrix::identity() * alpha,
            xtx: Matrix::zeros(),
            xty: FeatureVector::zeros(),
            mean: FeatureVector::zeros(),
            t: 0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn precision(&self) -> &Matrix {
        &self.precision
    }
    pub fn mean(&self) -> &FeatureVector {
        &self.mean
    }
    pub fn observations(&self) -> u64 {
        self.t
    }

    fn rebuilt_precision(&self) -> Matrix {
        Matrix::identity() * self.alpha + self.xtx / (self.sigma * self.sigma)
    }

    pub fn update(&mut self, phi: &FeatureVector, y: f64) -> Result<(), BanditError> {
        if !y.is_finite() {
            return Err(BanditError::NonFiniteObservation(y));
        }
        let s2 = self.sigma * self.sigma;
        self.xtx += phi * phi.transpose();
        self.xty += phi * y;
        self.precision += phi * phi.transpose() / s2;
        let rhs = self.xty / s2;
        self.mean = match self.precision.cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => {
                self.precision = self.rebuilt_precision();
                self.precision.cholesky().ok_or(BanditError::NotPositiveDefinite)?.solve(&rhs)
            }
        };
        self.t += 1;
        Ok(())
    }

    /// `mu + L^-T z` where `Lambda = L L^T` and `z` is the given noise.
    pub fn sample_with(&self, z: &FeatureVector) -> Result<FeatureVector, BanditError> {
        let ch = match self.precision.cholesky() {
            Some(ch) => ch,
            None => self.rebuilt_precision().cholesky().ok_or(BanditError::NotPositiveDefinite)?,
        };
        let lt = ch.l().transpose();
        let offset = lt.solve_upper_triangular(z).ok_or(BanditError::NotPositiveDefinite)?;
        Ok(self.mean + offset)
    }

    pub fn sample_weights(&self, seed: u64) -> Result<FeatureVector, BanditError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = FeatureVector::from_fn(|_, _| StandardNormal.sample(&mut rng));
        self.sample_with(&z)
    }

    /// Evaluation order over `candidates`: a seeded shuffle during warmup
    /// (fewer than 12 observations), then ascending sampled score with ties
    /// broken by index.
    pub fn propose_order(&self, candidates: &[StrategySpec], seed: u64) -> Result<Vec<usize>, BanditError> {
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        if self.t < FEATURE_DIM as u64 {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            return Ok(order);
        }
        let w = self.sample_weights(seed)?;
        Ok(order_by_weights(candidates, &w))
    }

    pub fn to_state(&self) -> PosteriorState {
        PosteriorState {
            version: POSTERIOR_FORMAT_VERSION,
            alpha: self.alpha,
            sigma: self.sigma,
            precision: self.precision.transpose().iter().copied().collect(),
            xtx: self.xtx.transpose().iter().copied().collect(),
            xty: self.xty.iter().copied().collect(),
            mean: self.mean.iter().copied().collect(),
            t: self.t,
        }
    }

    pub fn from_state(s: &PosteriorState) -> Result<Self, BanditError> {
        if s.version != POSTERIOR_FORMAT_VERSION {
            return Err(BanditError::Version(s.version));
        }
        let d = FEATURE_DIM;
        if s.precision.len() != d * d || s.xtx.len() != d * d || s.xty.len() != d || s.mean.len() != d {
            return Err(BanditError::Malformed("wrong dimensions".into()));
        }
        let mut p = LinearPosterior::new(s.alpha, s.sigma)?;
        p.precision = Matrix::from_row_slice(&s.precision);
        p.xtx = Matrix::from_row_slice(&s.xtx);
        p.xty = FeatureVector::from_column_slice(&s.xty);
        p.mean = FeatureVector::from_column_slice(&s.mean);
        p.t = s.t;
        Ok(p)
    }
}

/// Candidate indices sorted by `phi(s)^T w` ascending, ties by index.
pub fn order_by_weights(candidates: &[StrategySpec], w: &FeatureVector) -> Vec<usize> {
    let scores: Vec<f64> = candidates.iter().map(|s| featurize(s).dot(w)).collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    order
}

/// JSON form of a posterior; matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorState {
    pub version: u32,
    pub alpha: f64,
    pub sigma: f64,
    pub precision: Vec<f64>,
    pub xtx: Vec<f64>,
    pub xty: Vec<f64>,
    pub mean: Vec<f64>,
    pub t: u64,
}
