//! A one-decision bandit that separates mean-reward and rank-based play.
//!
//! The `circle` arm always pays `safe`. The `star` arm pays `hi` with
//! probability `q` and `lo` otherwise. Under the defaults the star's mean
//! (0.45) is below the circle's 0.5, yet the star's draw beats the circle's
//! in 70% of plays — a mean-maximiser and a rank-maximiser disagree about
//! which arm is better. Either way the episode ends won after one step with
//! the drawn payout as score.

use std::fmt;

use crate::games::{parse_num, GameError};
use crate::mdp::{ActionId, EnvError, EnvironmentModel, GameStatus, Outcome, RandomSource};

pub const CIRCLE: ActionId = ActionId(0);
pub const STAR: ActionId = ActionId(1);

#[derive(Debug, Clone, PartialEq)]
pub struct TwoArmConfig {
    pub safe: f64,
    pub hi: f64,
    pub lo: f64,
    pub q: f64,
}

impl Default for TwoArmConfig {
    fn default() -> Self {
        TwoArmConfig { safe: 0.5, hi: 0.6, lo: 0.1, q: 0.7 }
    }
}

impl fmt::Display for TwoArmConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "safe={},hi={},lo={},q={}", self.safe, self.hi, self.lo, self.q)
    }
}

impl TwoArmConfig {
    pub(crate) fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, GameError> {
        let mut cfg = TwoArmConfig::default();
        for (k, v) in pairs {
            match *k {
                "safe" => cfg.safe = parse_num(k, v)?,
                "hi" => cfg.hi = parse_num(k, v)?,
                "lo" => cfg.lo = parse_num(k, v)?,
                "q" => cfg.q = parse_num(k, v)?,
                other => {
                    return Err(GameError::InvalidConfig(format!("unknown twoarm key `{other}`")))
                }
            }
        }
        Ok(cfg)
    }

    /// Exact mean payout of the star arm.
    pub fn star_mean(&self) -> f64 {
        self.q * self.hi + (1.0 - self.q) * self.lo
    }

    /// Exact probability that one star draw beats one circle draw, ties half.
    pub fn star_beats_circle(&self) -> f64 {
        let win = |v: f64| {
            if v > self.safe {
                1.0
            } else if v == self.safe {
                0.5
            } else {
                0.0
            }
        };
        self.q * win(self.hi) + (1.0 - self.q) * win(self.lo)
    }
}

/// `None` before the single decision, `Some(payout)` after.
pub type TwoArmState = Option<f64>;

#[derive(Debug, Clone)]
pub struct TwoArmDilemma {
    cfg: TwoArmConfig,
}

impl TwoArmDilemma {
    pub fn new(cfg: TwoArmConfig) -> Result<Self, GameError> {
        for (name, v) in [("safe", cfg.safe), ("hi", cfg.hi), ("lo", cfg.lo)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(GameError::InvalidConfig(format!(
                    "twoarm {name} must be in [0, 1], got {v}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&cfg.q) {
            return Err(GameError::InvalidConfig(format!(
                "twoarm q must be in [0, 1], got {}",
                cfg.q
            )));
        }
        Ok(TwoArmDilemma { cfg })
    }

    pub fn config(&self) -> &TwoArmConfig {
        &self.cfg
    }
}

impl EnvironmentModel for TwoArmDilemma {
    type State = TwoArmState;

    fn initial_state(&self) -> TwoArmState {
        None
    }

    fn available_actions(&self, _: &TwoArmState) -> Vec<ActionId> {
        vec![CIRCLE, STAR]
    }

    fn step(
        &self,
        state: &TwoArmState,
        action: ActionId,
        rng: &mut RandomSource,
    ) -> Result<TwoArmState, EnvError> {
        debug_assert!(state.is_none(), "step on a terminal state");
        match action {
            CIRCLE => Ok(Some(self.cfg.safe)),
            STAR => Ok(Some(if rng.chance(self.cfg.q) { self.cfg.hi } else { self.cfg.lo })),
            a => Err(EnvError::IllegalAction(a)),
        }
    }

    fn is_terminal(&self, state: &TwoArmState) -> bool {
        state.is_some()
    }

    fn outcome(&self, state: &TwoArmState) -> Outcome {
        match state {
            Some(payout) => Outcome::new(GameStatus::Won, *payout),
            None => Outcome::new(GameStatus::Playing, 0.0),
        }
    }

    fn score_bounds(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}
