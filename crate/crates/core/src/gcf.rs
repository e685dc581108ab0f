//! Combination-ratio selection with a UCB bandit, and per-cluster fusion.
//!
//! Each arm is a candidate weight `λ` for the structural branch. After a
//! ratio has been used, its cumulative reward decays by 0.9 and gains
//! `e^(β Δ) − 0.99`, where `Δ` is the relative change of the round's test
//! accuracy against the best accuracy seen so far (mirrored for drops).
//! Selection runs a randomized warm-up over `M + 1` rounds, then picks the
//! arm maximizing `R̂/N̂ + sqrt(2 ln t / N̂)`.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gnn::{DualBranchModel, ModelParams};

/// Decay applied to an arm's cumulative reward on every update.
pub const REWARD_DECAY: f64 = 0.9;
/// Offset subtracted from the exponential reward term.
pub const REWARD_OFFSET: f64 = 0.99;
/// Floor for the best accuracy when nothing positive has been observed yet.
pub const BEST_ACC_FLOOR: f64 = 1e-6;

/// Structural-branch weights for the ratios 9:1, 7:3, 5:5, 3:7 and 1:9.
pub fn default_arms() -> Vec<f64> {
    [(9, 1), (7, 3), (5, 5), (3, 7), (1, 9)]
        .into_iter()
        .map(|(s, n)| ratio_from_parts(s, n))
        .collect()
}

/// `structural : node` parts as the structural weight `λ`.
pub fn ratio_from_parts(structural: u32, node: u32) -> f64 {
    f64::from(structural) / f64::from(structural + node)
}

/// One application of the decayed cumulative reward update.
pub fn reward_update(cumulative: f64, observed: f64, best: f64, beta: f64) -> f64 {
    if observed >= best {
        cumulative * REWARD_DECAY + (libm::exp(beta * (observed - best) / best) - REWARD_OFFSET)
    } else {
        cumulative * REWARD_DECAY - (libm::exp(beta * (best - observed) / best) - REWARD_OFFSET)
    }
}

/// Mean reward plus exploration bonus; unplayed arms score `+∞`.
pub fn ucb_score(cumulative: f64, count: u64, t: u64) -> f64 {
    if count == 0 {
        return f64::INFINITY;
    }
    let n = count as f64;
    cumulative / n + libm::sqrt(2.0 * libm::log(t as f64) / n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioArm {
    pub lambda: f64,
    pub reward: f64,
    pub count: u64,
}

/// Arms, round counter, best accuracy and the warm-up schedule.
#[derive(Debug, Clone)]
pub struct BanditState {
    arms: Vec<RatioArm>,
    t: u64,
    best_acc: f64,
    last_selected: Option<usize>,
    beta: f64,
    first_pick: usize,
    warmup: Vec<usize>,
}

impl BanditState {
    pub fn new(lambdas: &[f64], beta: f64, seed: u64) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::Config("bandit needs at least one ratio".into()));
        }
        for (i, &l) in lambdas.iter().enumerate() {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::Config(format!("ratio {l} outside [0, 1]")));
            }
            if lambdas[..i].contains(&l) {
                return Err(Error::Config(format!("duplicate ratio {l}")));
            }
        }
        if beta.is_nan() || beta <= 0.0 {
            return Err(Error::Config(format!("beta must be > 0, got {beta}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let first_pick = rng.random_range(0..lambdas.len());
        let mut warmup: Vec<usize> = (0..lambdas.len()).collect();
        warmup.shuffle(&mut rng);
        Ok(Self {
            arms: lambdas
                .iter()
                .map(|&lambda| RatioArm {
                    lambda,
                    reward: 0.0,
                    count: 0,
                })
                .collect(),
            t: 0,
            best_acc: 0.0,
            last_selected: None,
            beta,
            first_pick,
            warmup,
        })
    }

    /// Seeds the best accuracy, typically from evaluating the initial model.
    pub fn with_best_acc(mut self, acc: f64) -> Self {
        self.best_acc = acc;
        self
    }

    pub fn arms(&self) -> &[RatioArm] {
        &self.arms
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn best_acc(&self) -> f64 {
        self.best_acc
    }

    pub fn last_selected(&self) -> Option<usize> {
        self.last_selected
    }

    pub fn warmup_rounds(&self) -> u64 {
        self.arms.len() as u64 + 1
    }

    /// Scores of every arm at round `t`.
    pub fn scores_at(&self, t: u64) -> Vec<f64> {
        self.arms.iter().map(|a| ucb_score(a.reward, a.count, t)).collect()
    }

    /// Picks the arm for the next round and returns its index.
    ///
    /// Round 1 picks uniformly at random; rounds `2..=M+1` play every arm
    /// once in a seeded random order; later rounds take the best score,
    /// lowest index on ties.
    pub fn select(&mut self) -> usize {
        let t = self.t + 1;
        let m = self.arms.len() as u64;
        let pick = if t == 1 {
            self.first_pick
        } else if t <= m + 1 {
            self.warmup[(t - 2) as usize]
        } else {
            let scores = self.scores_at(t);
            let mut best = 0;
            for (i, &s) in scores.iter().enumerate().skip(1) {
                if s > scores[best] {
                    best = i;
                }
            }
            best
        };
        self.t = t;
        self.arms[pick].count += 1;
        self.last_selected = Some(pick);
        pick
    }

    /// Like [`select`](Self::select) but returns the chosen `λ`.
    pub fn select_ratio(&mut self) -> f64 {
        let i = self.select();
        self.arms[i].lambda
    }

    /// Credits the last selected arm with accuracy `observed`, then raises
    /// the best accuracy if it was beaten.
    pub fn update_reward(&mut self, observed: f64) -> Result<()> {
        let Some(arm) = self.last_selected else {
            return Err(Error::Contract("reward update before any ratio was selected".into()));
        };
        if self.best_acc <= 0.0 {
            self.best_acc = observed.max(BEST_ACC_FLOOR);
        }
        let a = &mut self.arms[arm];
        a.reward = reward_update(a.reward, observed, self.best_acc, self.beta);
        self.best_acc = self.best_acc.max(observed);
        Ok(())
    }
}

/// One fused model per cluster, all sharing the common node model and `λ`.
pub fn fuse(shared: &[ModelParams], common: &ModelParams, lambda: f64) -> Result<Vec<DualBranchModel>> {
    if shared.is_empty() {
        return Err(Error::Contract("fusion needs at least one cluster model".into()));
    }
    shared
        .iter()
        .map(|s| DualBranchModel::new(common.clone(), s.clone(), lambda))
        .collect()
}
