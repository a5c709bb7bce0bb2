//! Forward-model interface: terminal outcomes, budget-metered transitions and
//! deterministic, splittable randomness.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Terminal status of an episode. `Lost < Playing < Won`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GameStatus {
    Lost,
    Playing,
    Won,
}

impl fmt::Display for GameStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameStatus::Lost => write!(f, "lost"),
            GameStatus::Playing => write!(f, "playing"),
            GameStatus::Won => write!(f, "won"),
        }
    }
}

/// Result of evaluating a state: win status first, score as tie-breaker.
///
/// Any `Won` beats any `Playing`, which beats any `Lost`, regardless of the
/// score. Scores must be finite; `new` rejects NaN and infinities so the
/// ordering is total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    status: GameStatus,
    score: f64,
}

impl Outcome {
    pub fn new(status: GameStatus, score: f64) -> Self {
        assert!(score.is_finite(), "outcome score must be finite, got {score}");
        // Collapse -0.0 so equal-comparing outcomes are interchangeable keys.
        let score = if score == 0.0 { 0.0 } else { score };
        Outcome { status, score }
    }

    pub fn status(&self) -> GameStatus {
        self.status
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn is_win(&self) -> bool {
        self.status == GameStatus::Won
    }
}

impl Eq for Outcome {}

impl PartialOrd for Outcome {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Outcome {
    fn cmp(&self, other: &Self) -> Ordering {
        self.status.cmp(&other.status).then_with(|| {
            // Finite by construction, so partial_cmp cannot fail.
            self.score
                .partial_cmp(&other.score)
                .expect("outcome scores are finite")
        })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.status, self.score)
    }
}

/// Total order on outcomes: status first, then score.
pub fn compare_outcomes(a: &Outcome, b: &Outcome) -> Ordering {
    a.cmp(b)
}

/// Index of an action in an environment's action set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionId(pub usize);

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("action {0} is not available in this state")]
    IllegalAction(ActionId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MeterError {
    #[error("forward-model call budget exhausted")]
    BudgetExhausted,
    #[error("action {0} is not available in this state")]
    IllegalAction(ActionId),
}

impl From<EnvError> for MeterError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::IllegalAction(a) => MeterError::IllegalAction(a),
        }
    }
}

/// A generative model of a stochastic decision process.
///
/// States are immutable values; `step` samples a successor using the caller's
/// [`RandomSource`], so replaying with an equally-seeded source reproduces the
/// transition exactly. Nonterminal states must offer at least one action.
/// `outcome` is defined for every state: nonterminal states report
/// [`GameStatus::Playing`] with the running score, which is what a rollout
/// cut off mid-episode gets evaluated on.
pub trait EnvironmentModel {
    type State: Clone;

    fn initial_state(&self) -> Self::State;
    fn available_actions(&self, state: &Self::State) -> Vec<ActionId>;
    fn step(
        &self,
        state: &Self::State,
        action: ActionId,
        rng: &mut RandomSource,
    ) -> Result<Self::State, EnvError>;
    fn is_terminal(&self, state: &Self::State) -> bool;
    fn outcome(&self, state: &Self::State) -> Outcome;
    /// Inclusive range every reachable score lies in.
    fn score_bounds(&self) -> (f64, f64);
}

impl<M: EnvironmentModel> EnvironmentModel for &M {
    type State = M::State;

    fn initial_state(&self) -> Self::State {
        (**self).initial_state()
    }
    fn available_actions(&self, state: &Self::State) -> Vec<ActionId> {
        (**self).available_actions(state)
    }
    fn step(
        &self,
        state: &Self::State,
        action: ActionId,
        rng: &mut RandomSource,
    ) -> Result<Self::State, EnvError> {
        (**self).step(state, action, rng)
    }
    fn is_terminal(&self, state: &Self::State) -> bool {
        (**self).is_terminal(state)
    }
    fn outcome(&self, state: &Self::State) -> Outcome {
        (**self).outcome(state)
    }
    fn score_bounds(&self) -> (f64, f64) {
        (**self).score_bounds()
    }
}

/// Wraps a model and counts transitions against a hard call budget.
///
/// Only `step` is metered; terminal tests and outcome evaluations are free.
/// `calls_used <= budget` always holds, and the counter advances by exactly
/// one per successful transition.
pub struct MeteredModel<M> {
    model: M,
    budget: u64,
    used: u64,
}

impl<M: EnvironmentModel> MeteredModel<M> {
    pub fn new(model: M, budget: u64) -> Self {
        MeteredModel { model, budget, used: 0 }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn calls_used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.used
    }

    /// The wrapped model, for unmetered queries (actions, terminal, outcome).
    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn step(
        &mut self,
        state: &M::State,
        action: ActionId,
        rng: &mut RandomSource,
    ) -> Result<M::State, MeterError> {
        if self.used == self.budget {
            return Err(MeterError::BudgetExhausted);
        }
        let next = self.model.step(state, action, rng)?;
        self.used += 1;
        Ok(next)
    }
}

/// Deterministic random stream with hierarchical splitting.
///
/// A 64-bit seed fully determines the stream on every platform. `derive`
/// produces an independent child stream from an index without consuming
/// entropy from the parent, so a master seed can fan out per-episode and
/// per-search streams that are stable regardless of evaluation order.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        RandomSource { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream `index` of this source. Pure function of `(seed, index)`.
    pub fn derive(&self, index: u64) -> RandomSource {
        RandomSource::from_seed(splitmix64(self.seed ^ splitmix64(index.wrapping_add(1))))
    }

    /// Uniform draw from `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// `true` with probability `p` (clamped to `[0, 1]`).
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "cannot draw from an empty range");
        self.rng.gen_range(0..n)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.rng.gen_range(0..=i);
            items.swap(i, j);
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
