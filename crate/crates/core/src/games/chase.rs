//! Grid pursuit: catch fleeing targets before the clock runs out, and don't
//! get caught yourself.
//!
//! Targets mostly run from the agent (probability `flee`, otherwise a random
//! step). Each catch leaves the caught target's cell marked; the first
//! fleeing target to wander onto such a cell turns angry and becomes a
//! chaser that hunts the agent. Chaser contact loses. The game is won the
//! moment no fleeing targets remain, and lost at the turn cap. Score is the
//! number of targets caught either way.

use std::fmt;

use crate::games::{parse_num, GameError};
use crate::mdp::{ActionId, EnvError, EnvironmentModel, GameStatus, Outcome, RandomSource};

type Cell = (i32, i32);

const DIRS: [(i32, i32); 4] = [(0, 1), (0, -1), (-1, 0), (1, 0)];

#[derive(Debug, Clone, PartialEq)]
pub struct ChaseLiteConfig {
    pub size: i32,
    pub targets: usize,
    pub max_turns: u32,
    pub flee_p: f64,
}

impl Default for ChaseLiteConfig {
    fn default() -> Self {
        ChaseLiteConfig { size: 7, targets: 3, max_turns: 60, flee_p: 0.8 }
    }
}

impl fmt::Display for ChaseLiteConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "size={},targets={},turns={},flee={}",
            self.size, self.targets, self.max_turns, self.flee_p
        )
    }
}

impl ChaseLiteConfig {
    pub(crate) fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, GameError> {
        let mut cfg = ChaseLiteConfig::default();
        for (k, v) in pairs {
            match *k {
                "size" => cfg.size = parse_num(k, v)?,
                "targets" => cfg.targets = parse_num(k, v)?,
                "turns" => cfg.max_turns = parse_num(k, v)?,
                "flee" => cfg.flee_p = parse_num(k, v)?,
                other => {
                    return Err(GameError::InvalidConfig(format!("unknown chase key `{other}`")))
                }
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChaseLiteState {
    pub agent: Cell,
    pub fleeing: Vec<Cell>,
    /// Cells where a target was caught; stepping here turns a target angry.
    pub corpses: Vec<Cell>,
    pub chaser: Option<Cell>,
    pub caught: u32,
    pub turn: u32,
    pub status: GameStatus,
}

#[derive(Debug, Clone)]
pub struct ChaseLite {
    cfg: ChaseLiteConfig,
}

fn manhattan(a: Cell, b: Cell) -> i32 {
    (a.0 - b.0).abs() + (a.1 - b.1).abs()
}

impl ChaseLite {
    pub fn new(cfg: ChaseLiteConfig) -> Result<Self, GameError> {
        if cfg.size < 3 {
            return Err(GameError::InvalidConfig("chase size must be >= 3".into()));
        }
        if cfg.max_turns == 0 {
            return Err(GameError::InvalidConfig("chase turns must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&cfg.flee_p) {
            return Err(GameError::InvalidConfig(format!(
                "chase flee must be in [0, 1], got {}",
                cfg.flee_p
            )));
        }
        if cfg.targets == 0 || cfg.targets > Self::spawn_cells(cfg.size).len() {
            return Err(GameError::InvalidConfig(format!(
                "chase targets must be 1..={}, got {}",
                Self::spawn_cells(cfg.size).len(),
                cfg.targets
            )));
        }
        Ok(ChaseLite { cfg })
    }

    pub fn config(&self) -> &ChaseLiteConfig {
        &self.cfg
    }

    fn spawn_cells(size: i32) -> Vec<Cell> {
        let e = size - 1;
        let m = size / 2;
        vec![(0, 0), (e, e), (0, e), (e, 0), (m, 0), (0, m), (m, e), (e, m)]
    }

    fn in_grid(&self, c: Cell) -> bool {
        c.0 >= 0 && c.0 < self.cfg.size && c.1 >= 0 && c.1 < self.cfg.size
    }

    /// In-grid 4-neighbourhood plus staying put, minus excluded cells.
    fn moves_from(&self, from: Cell, excluded: &[Cell]) -> Vec<Cell> {
        let mut out = Vec::with_capacity(5);
        for (dx, dy) in DIRS {
            let c = (from.0 + dx, from.1 + dy);
            if self.in_grid(c) && !excluded.contains(&c) {
                out.push(c);
            }
        }
        if !excluded.contains(&from) {
            out.push(from);
        }
        out
    }

    /// Uniform pick among the candidates scoring best under `key`.
    fn pick_best(
        candidates: &[Cell],
        rng: &mut RandomSource,
        key: impl Fn(Cell) -> i32,
        maximise: bool,
    ) -> Cell {
        let best = candidates
            .iter()
            .map(|c| key(*c))
            .reduce(|a, b| if maximise { a.max(b) } else { a.min(b) })
            .expect("candidates are never empty");
        let tied: Vec<Cell> = candidates.iter().copied().filter(|c| key(*c) == best).collect();
        tied[rng.index(tied.len())]
    }
}

impl EnvironmentModel for ChaseLite {
    type State = ChaseLiteState;

    fn initial_state(&self) -> ChaseLiteState {
        let m = self.cfg.size / 2;
        ChaseLiteState {
            agent: (m, m),
            fleeing: Self::spawn_cells(self.cfg.size)[..self.cfg.targets].to_vec(),
            corpses: Vec::new(),
            chaser: None,
            caught: 0,
            turn: 0,
            status: GameStatus::Playing,
        }
    }

    fn available_actions(&self, _: &ChaseLiteState) -> Vec<ActionId> {
        (0..DIRS.len()).map(ActionId).collect()
    }

    fn step(
        &self,
        state: &ChaseLiteState,
        action: ActionId,
        rng: &mut RandomSource,
    ) -> Result<ChaseLiteState, EnvError> {
        let (dx, dy) = *DIRS.get(action.0).ok_or(EnvError::IllegalAction(action))?;
        debug_assert_eq!(state.status, GameStatus::Playing, "step on a terminal state");
        let mut s = state.clone();
        s.turn += 1;

        let moved = (s.agent.0 + dx, s.agent.1 + dy);
        if self.in_grid(moved) {
            s.agent = moved;
        }
        if let Some(i) = s.fleeing.iter().position(|t| *t == s.agent) {
            let cell = s.fleeing.remove(i);
            s.corpses.push(cell);
            s.caught += 1;
        }
        if s.chaser == Some(s.agent) {
            s.status = GameStatus::Lost;
            return Ok(s);
        }
        if s.fleeing.is_empty() {
            s.status = GameStatus::Won;
            return Ok(s);
        }

        let mut turned_angry: Option<usize> = None;
        for i in 0..s.fleeing.len() {
            let candidates = self.moves_from(s.fleeing[i], &[s.agent]);
            let agent = s.agent;
            s.fleeing[i] = if rng.chance(self.cfg.flee_p) {
                Self::pick_best(&candidates, rng, |c| manhattan(c, agent), true)
            } else {
                candidates[rng.index(candidates.len())]
            };
            if turned_angry.is_none()
                && s.chaser.is_none()
                && s.corpses.contains(&s.fleeing[i])
            {
                turned_angry = Some(i);
            }
        }
        if let Some(i) = turned_angry {
            s.chaser = Some(s.fleeing.remove(i));
        }
        if s.fleeing.is_empty() {
            s.status = GameStatus::Won;
            return Ok(s);
        }

        if let Some(c) = s.chaser {
            let candidates = self.moves_from(c, &[]);
            let agent = s.agent;
            let next = Self::pick_best(&candidates, rng, |c| manhattan(c, agent), false);
            s.chaser = Some(next);
            if next == s.agent {
                s.status = GameStatus::Lost;
                return Ok(s);
            }
        }

        if s.turn >= self.cfg.max_turns {
            s.status = GameStatus::Lost;
        }
        Ok(s)
    }

    fn is_terminal(&self, state: &ChaseLiteState) -> bool {
        state.status != GameStatus::Playing
    }

    fn outcome(&self, state: &ChaseLiteState) -> Outcome {
        Outcome::new(state.status, f64::from(state.caught))
    }

    fn score_bounds(&self) -> (f64, f64) {
        (0.0, self.cfg.targets as f64)
    }
}
