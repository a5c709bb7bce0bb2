//! A one-dimensional strip with deadly gaps.
//!
//! The agent starts at cell 0 and wants to reach cell `len`. `walk` advances
//! one cell but refuses to enter a gap; `jump` clears two cells, succeeding
//! over a gap only with probability `p` (a failed jump is fatal); `stay` does
//! nothing. Reaching the end wins, falling loses, and running out the turn
//! cap loses too. The score is the rightmost cell ever reached, so even a
//! fatal run keeps credit for its progress.

use std::collections::BTreeSet;
use std::fmt;

use crate::games::{parse_num, GameError};
use crate::mdp::{ActionId, EnvError, EnvironmentModel, GameStatus, Outcome, RandomSource};

pub const STAY: ActionId = ActionId(0);
pub const WALK: ActionId = ActionId(1);
pub const JUMP: ActionId = ActionId(2);

#[derive(Debug, Clone, PartialEq)]
pub struct GapWorldConfig {
    pub len: u32,
    pub gaps: BTreeSet<u32>,
    pub p_jump: f64,
    pub max_turns: u32,
}

impl Default for GapWorldConfig {
    fn default() -> Self {
        // Both gaps on odd cells: an all-jump line (landing on even cells)
        // leaps them and never lands in one.
        GapWorldConfig {
            len: 12,
            gaps: BTreeSet::from([5, 9]),
            p_jump: 0.8,
            max_turns: 30,
        }
    }
}

impl fmt::Display for GapWorldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gaps: Vec<String> = self.gaps.iter().map(|g| g.to_string()).collect();
        write!(
            f,
            "len={},gaps={},p={},turns={}",
            self.len,
            gaps.join(";"),
            self.p_jump,
            self.max_turns
        )
    }
}

impl GapWorldConfig {
    pub(crate) fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, GameError> {
        let mut cfg = GapWorldConfig::default();
        for (k, v) in pairs {
            match *k {
                "len" => cfg.len = parse_num(k, v)?,
                "p" => cfg.p_jump = parse_num(k, v)?,
                "turns" => cfg.max_turns = parse_num(k, v)?,
                "gaps" => {
                    cfg.gaps = v
                        .split(';')
                        .filter(|p| !p.is_empty())
                        .map(|p| parse_num("gaps", p))
                        .collect::<Result<_, _>>()?;
                }
                other => {
                    return Err(GameError::InvalidConfig(format!("unknown gapworld key `{other}`")))
                }
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapWorldState {
    pub pos: u32,
    /// Rightmost cell reached: the running score.
    pub best: u32,
    pub turn: u32,
    pub status: GameStatus,
}

#[derive(Debug, Clone)]
pub struct GapWorld {
    cfg: GapWorldConfig,
}

impl GapWorld {
    pub fn new(cfg: GapWorldConfig) -> Result<Self, GameError> {
        if cfg.len < 2 {
            return Err(GameError::InvalidConfig("gapworld len must be >= 2".into()));
        }
        if cfg.max_turns == 0 {
            return Err(GameError::InvalidConfig("gapworld turns must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&cfg.p_jump) {
            return Err(GameError::InvalidConfig(format!(
                "gapworld p must be in [0, 1], got {}",
                cfg.p_jump
            )));
        }
        if cfg.gaps.iter().any(|g| *g == 0 || *g >= cfg.len) {
            return Err(GameError::InvalidConfig("gapworld gaps must lie strictly inside the strip".into()));
        }
        Ok(GapWorld { cfg })
    }

    pub fn config(&self) -> &GapWorldConfig {
        &self.cfg
    }

    fn is_gap(&self, cell: u32) -> bool {
        self.cfg.gaps.contains(&cell)
    }
}

impl EnvironmentModel for GapWorld {
    type State = GapWorldState;

    fn initial_state(&self) -> GapWorldState {
        GapWorldState { pos: 0, best: 0, turn: 0, status: GameStatus::Playing }
    }

    fn available_actions(&self, _: &GapWorldState) -> Vec<ActionId> {
        vec![STAY, WALK, JUMP]
    }

    fn step(
        &self,
        state: &GapWorldState,
        action: ActionId,
        rng: &mut RandomSource,
    ) -> Result<GapWorldState, EnvError> {
        let mut s = *state;
        debug_assert_eq!(s.status, GameStatus::Playing, "step on a terminal state");
        s.turn += 1;
        match action {
            STAY => {}
            WALK => {
                let next = s.pos + 1;
                // Nobody walks into an open pit; the move is simply refused.
                if !self.is_gap(next) {
                    s.pos = next;
                }
            }
            JUMP => {
                let over = s.pos + 1;
                let land = (s.pos + 2).min(self.cfg.len);
                // Failing the jump over a pit and landing in one are both fatal.
                if (self.is_gap(over) && !rng.chance(self.cfg.p_jump))
                    || (land < self.cfg.len && self.is_gap(land))
                {
                    s.status = GameStatus::Lost;
                } else {
                    s.pos = land;
                }
            }
            a => return Err(EnvError::IllegalAction(a)),
        }
        if s.status == GameStatus::Playing {
            s.best = s.best.max(s.pos);
            if s.pos >= self.cfg.len {
                s.status = GameStatus::Won;
            } else if s.turn >= self.cfg.max_turns {
                s.status = GameStatus::Lost;
            }
        }
        Ok(s)
    }

    fn is_terminal(&self, state: &GapWorldState) -> bool {
        state.status != GameStatus::Playing
    }

    fn outcome(&self, state: &GapWorldState) -> Outcome {
        Outcome::new(state.status, f64::from(state.best))
    }

    fn score_bounds(&self) -> (f64, f64) {
        (0.0, f64::from(self.cfg.len))
    }
}
