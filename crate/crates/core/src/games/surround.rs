//! Trail survival: move to score, quit to bank the win.
//!
//! Both the agent and a randomly wandering enemy leave permanent trails.
//! Stepping into any trail or into the enemy loses. The `quit` action ends
//! the episode won on the spot, as does surviving to the turn cap; the score
//! is the number of moves made while alive. So there is always a zero-risk
//! way to win, and every extra point of score is bought with risk.

use std::collections::BTreeSet;
use std::fmt;

use crate::games::{parse_num, GameError};
use crate::mdp::{ActionId, EnvError, EnvironmentModel, GameStatus, Outcome, RandomSource};

type Cell = (i32, i32);

const DIRS: [(i32, i32); 4] = [(0, 1), (0, -1), (-1, 0), (1, 0)];

/// The fifth action: stop playing and take the win.
pub const QUIT: ActionId = ActionId(4);

#[derive(Debug, Clone, PartialEq)]
pub struct SurroundLiteConfig {
    pub size: i32,
    pub max_turns: u32,
}

impl Default for SurroundLiteConfig {
    fn default() -> Self {
        SurroundLiteConfig { size: 7, max_turns: 50 }
    }
}

impl fmt::Display for SurroundLiteConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size={},turns={}", self.size, self.max_turns)
    }
}

impl SurroundLiteConfig {
    pub(crate) fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, GameError> {
        let mut cfg = SurroundLiteConfig::default();
        for (k, v) in pairs {
            match *k {
                "size" => cfg.size = parse_num(k, v)?,
                "turns" => cfg.max_turns = parse_num(k, v)?,
                other => {
                    return Err(GameError::InvalidConfig(format!("unknown surround key `{other}`")))
                }
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurroundLiteState {
    pub agent: Cell,
    pub enemy: Cell,
    pub trails: BTreeSet<Cell>,
    pub moves: u32,
    pub turn: u32,
    pub status: GameStatus,
}

#[derive(Debug, Clone)]
pub struct SurroundLite {
    cfg: SurroundLiteConfig,
}

impl SurroundLite {
    pub fn new(cfg: SurroundLiteConfig) -> Result<Self, GameError> {
        if cfg.size < 4 {
            return Err(GameError::InvalidConfig("surround size must be >= 4".into()));
        }
        if cfg.max_turns == 0 {
            return Err(GameError::InvalidConfig("surround turns must be >= 1".into()));
        }
        Ok(SurroundLite { cfg })
    }

    pub fn config(&self) -> &SurroundLiteConfig {
        &self.cfg
    }

    fn in_grid(&self, c: Cell) -> bool {
        c.0 >= 0 && c.0 < self.cfg.size && c.1 >= 0 && c.1 < self.cfg.size
    }
}

impl EnvironmentModel for SurroundLite {
    type State = SurroundLiteState;

    fn initial_state(&self) -> SurroundLiteState {
        let m = self.cfg.size / 2;
        SurroundLiteState {
            agent: (1, m),
            enemy: (self.cfg.size - 2, m),
            trails: BTreeSet::new(),
            moves: 0,
            turn: 0,
            status: GameStatus::Playing,
        }
    }

    fn available_actions(&self, _: &SurroundLiteState) -> Vec<ActionId> {
        (0..=DIRS.len()).map(ActionId).collect()
    }

    fn step(
        &self,
        state: &SurroundLiteState,
        action: ActionId,
        rng: &mut RandomSource,
    ) -> Result<SurroundLiteState, EnvError> {
        debug_assert_eq!(state.status, GameStatus::Playing, "step on a terminal state");
        let mut s = state.clone();
        s.turn += 1;

        if action == QUIT {
            s.status = GameStatus::Won;
            return Ok(s);
        }
        let (dx, dy) = *DIRS.get(action.0).ok_or(EnvError::IllegalAction(action))?;
        let target = (s.agent.0 + dx, s.agent.1 + dy);
        if self.in_grid(target) {
            if s.trails.contains(&target) || target == s.enemy {
                s.status = GameStatus::Lost;
                return Ok(s);
            }
            s.trails.insert(s.agent);
            s.agent = target;
            s.moves += 1;
        }
        // Wall bumps are a no-op: no move scored, no trail laid.

        let candidates: Vec<Cell> = DIRS
            .iter()
            .map(|(dx, dy)| (s.enemy.0 + dx, s.enemy.1 + dy))
            .filter(|c| self.in_grid(*c) && !s.trails.contains(c) && *c != s.agent)
            .collect();
        if !candidates.is_empty() {
            let next = candidates[rng.index(candidates.len())];
            s.trails.insert(s.enemy);
            s.enemy = next;
        }

        if s.turn >= self.cfg.max_turns {
            s.status = GameStatus::Won;
        }
        Ok(s)
    }

    fn is_terminal(&self, state: &SurroundLiteState) -> bool {
        state.status != GameStatus::Playing
    }

    fn outcome(&self, state: &SurroundLiteState) -> Outcome {
        Outcome::new(state.status, f64::from(state.moves))
    }

    fn score_bounds(&self) -> (f64, f64) {
        (0.0, f64::from(self.cfg.max_turns))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game() -> SurroundLite {
        SurroundLite::new(SurroundLiteConfig::default()).unwrap()
    }

    #[test]
    fn quitting_banks_an_immediate_win() {
        let g = game();
        let mut rng = RandomSource::from_seed(1);
        let s = g.step(&g.initial_state(), QUIT, &mut rng).unwrap();
        assert_eq!(s.status, GameStatus::Won);
        assert_eq!(g.outcome(&s), Outcome::new(GameStatus::Won, 0.0));
    }

    #[test]
    fn moves_score_and_lay_trails() {
        let g = game();
        let mut rng = RandomSource::from_seed(1);
        let s0 = g.initial_state();
        let s1 = g.step(&s0, ActionId(0), &mut rng).unwrap(); // up
        assert_eq!(s1.moves, 1);
        assert!(s1.trails.contains(&s0.agent), "old cell left a trail");
        let s2 = g.step(&s1, QUIT, &mut rng).unwrap();
        assert_eq!(g.outcome(&s2).score(), 1.0);
    }

    #[test]
    fn stepping_back_into_the_own_trail_loses() {
        let g = game();
        let mut rng = RandomSource::from_seed(1);
        let s0 = g.initial_state();
        let s1 = g.step(&s0, ActionId(3), &mut rng).unwrap(); // right
        let s2 = g.step(&s1, ActionId(2), &mut rng).unwrap(); // back left
        assert_eq!(s2.status, GameStatus::Lost);
        assert_eq!(g.outcome(&s2).score(), 1.0, "the fatal move does not score");
    }

    #[test]
    fn walking_into_the_enemy_loses() {
        let g = game();
        let mut rng = RandomSource::from_seed(1);
        let s = SurroundLiteState {
            agent: (2, 3),
            enemy: (3, 3),
            trails: BTreeSet::new(),
            moves: 5,
            turn: 5,
            status: GameStatus::Playing,
        };
        let dead = g.step(&s, ActionId(3), &mut rng).unwrap();
        assert_eq!(dead.status, GameStatus::Lost);
    }

    #[test]
    fn wall_bumps_neither_score_nor_kill() {
        let g = game();
        let mut rng = RandomSource::from_seed(1);
        let mut s = g.initial_state();
        s.agent = (0, 0);
        let bumped = g.step(&s, ActionId(2), &mut rng).unwrap(); // left into the wall
        assert_eq!(bumped.agent, (0, 0));
        assert_eq!(bumped.moves, 0);
        assert_eq!(bumped.status, GameStatus::Playing);
    }

    #[test]
    fn surviving_to_the_cap_wins() {
        let g = SurroundLite::new(SurroundLiteConfig { size: 7, max_turns: 8 }).unwrap();
        for seed in 0..10 {
            let mut rng = RandomSource::from_seed(seed);
            let mut s = g.initial_state();
            // Bump the left wall until the clock runs out.
            s.agent = (0, 3);
            while !g.is_terminal(&s) {
                s = g.step(&s, ActionId(2), &mut rng).unwrap();
            }
            assert_eq!(s.status, GameStatus::Won);
            assert_eq!(s.turn, 8);
        }
    }

    #[test]
    fn random_play_terminates_and_scores_in_bounds() {
        let g = game();
        for seed in 0..30 {
            let mut rng = RandomSource::from_seed(seed);
            let mut s = g.initial_state();
            let mut steps = 0;
            while !g.is_terminal(&s) {
                s = g.step(&s, ActionId(rng.index(5)), &mut rng).unwrap();
                steps += 1;
                assert!(steps <= 50);
            }
            let (lo, hi) = g.score_bounds();
            let o = g.outcome(&s);
            assert!(o.score() >= lo && o.score() <= hi);
            assert_eq!(o.score(), f64::from(s.moves));
        }
    }
}
