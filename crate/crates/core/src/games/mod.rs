//! Benchmark environments and the score-to-reward mapping used by the
//! numeric estimators.
//!
//! Each game is a small stochastic [`EnvironmentModel`] with a constant
//! action set, integer-ish scores inside declared bounds, and a turn cap that
//! guarantees termination. Games are constructible from a textual config of
//! the form `name` or `name:key=value,key=value`, which round-trips through
//! [`GameConfig`]'s `Display`/`FromStr`.

mod chase;
mod gap_world;
mod surround;
mod two_arm;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use chase::{ChaseLite, ChaseLiteConfig, ChaseLiteState};
pub use gap_world::{GapWorld, GapWorldConfig, GapWorldState};
pub use surround::{SurroundLite, SurroundLiteConfig, SurroundLiteState};
pub use two_arm::{TwoArmConfig, TwoArmDilemma, TwoArmState};

use crate::mdp::{ActionId, EnvError, EnvironmentModel, GameStatus, Outcome, RandomSource};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid game config: {0}")]
    InvalidConfig(String),
    #[error("score {score} outside declared bounds [{min}, {max}]")]
    ScoreOutOfBounds { score: f64, min: f64, max: f64 },
}

/// Map a terminal-or-running outcome into `[0, 1]`.
///
/// The unit interval is split into thirds by status — lost outcomes land in
/// `[0, 1/3)`, running ones in `[1/3, 2/3)`, wins in `[2/3, 1]` — and the
/// score, normalised against the declared bounds, positions the value inside
/// its third. So any win outranks any running state outranks any loss, and
/// score only refines within a band. Degenerate bounds (`r_min == r_max`)
/// normalise to 0.
pub fn reward_map(o: &Outcome, r_min: f64, r_max: f64) -> Result<f64, GameError> {
    let score = o.score();
    if score < r_min || score > r_max {
        return Err(GameError::ScoreOutOfBounds { score, min: r_min, max: r_max });
    }
    let r_norm = if r_max > r_min { (score - r_min) / (r_max - r_min) } else { 0.0 };
    let base = match o.status() {
        GameStatus::Lost => 0.0,
        GameStatus::Playing => 1.0 / 3.0,
        GameStatus::Won => 2.0 / 3.0,
    };
    Ok(r_norm / 3.0 + base)
}

/// Parsed textual description of a game instance.
#[derive(Debug, Clone, PartialEq)]
pub enum GameConfig {
    GapWorld(GapWorldConfig),
    TwoArm(TwoArmConfig),
    ChaseLite(ChaseLiteConfig),
    SurroundLite(SurroundLiteConfig),
}

impl GameConfig {
    pub fn name(&self) -> &'static str {
        match self {
            GameConfig::GapWorld(_) => "gapworld",
            GameConfig::TwoArm(_) => "twoarm",
            GameConfig::ChaseLite(_) => "chase",
            GameConfig::SurroundLite(_) => "surround",
        }
    }

    /// Every game under its default parameters.
    pub fn default_suite() -> Vec<GameConfig> {
        vec![
            GameConfig::GapWorld(GapWorldConfig::default()),
            GameConfig::TwoArm(TwoArmConfig::default()),
            GameConfig::ChaseLite(ChaseLiteConfig::default()),
            GameConfig::SurroundLite(SurroundLiteConfig::default()),
        ]
    }

    /// Validate the parameters and construct the playable game.
    pub fn build(&self) -> Result<GameEnv, GameError> {
        Ok(match self {
            GameConfig::GapWorld(c) => GameEnv::GapWorld(GapWorld::new(c.clone())?),
            GameConfig::TwoArm(c) => GameEnv::TwoArm(TwoArmDilemma::new(c.clone())?),
            GameConfig::ChaseLite(c) => GameEnv::ChaseLite(ChaseLite::new(c.clone())?),
            GameConfig::SurroundLite(c) => GameEnv::SurroundLite(SurroundLite::new(c.clone())?),
        })
    }
}

/// Any benchmark game behind a single model type, so runners can treat the
/// suite uniformly. States carry their game's tag; feeding a state to a
/// model of a different game is a programming error and panics.
#[derive(Debug, Clone)]
pub enum GameEnv {
    GapWorld(GapWorld),
    TwoArm(TwoArmDilemma),
    ChaseLite(ChaseLite),
    SurroundLite(SurroundLite),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GameState {
    GapWorld(GapWorldState),
    TwoArm(TwoArmState),
    ChaseLite(ChaseLiteState),
    SurroundLite(SurroundLiteState),
}

macro_rules! per_game {
    ($env:expr, $state:expr, |$g:ident, $s:ident| $body:expr) => {
        match ($env, $state) {
            (GameEnv::GapWorld($g), GameState::GapWorld($s)) => $body,
            (GameEnv::TwoArm($g), GameState::TwoArm($s)) => $body,
            (GameEnv::ChaseLite($g), GameState::ChaseLite($s)) => $body,
            (GameEnv::SurroundLite($g), GameState::SurroundLite($s)) => $body,
            _ => panic!("state belongs to a different game"),
        }
    };
}

impl EnvironmentModel for GameEnv {
    type State = GameState;

    fn initial_state(&self) -> GameState {
        match self {
            GameEnv::GapWorld(g) => GameState::GapWorld(g.initial_state()),
            GameEnv::TwoArm(g) => GameState::TwoArm(g.initial_state()),
            GameEnv::ChaseLite(g) => GameState::ChaseLite(g.initial_state()),
            GameEnv::SurroundLite(g) => GameState::SurroundLite(g.initial_state()),
        }
    }

    fn available_actions(&self, state: &GameState) -> Vec<ActionId> {
        per_game!(self, state, |g, s| g.available_actions(s))
    }

    fn step(
        &self,
        state: &GameState,
        action: ActionId,
        rng: &mut RandomSource,
    ) -> Result<GameState, EnvError> {
        match (self, state) {
            (GameEnv::GapWorld(g), GameState::GapWorld(s)) => {
                g.step(s, action, rng).map(GameState::GapWorld)
            }
            (GameEnv::TwoArm(g), GameState::TwoArm(s)) => {
                g.step(s, action, rng).map(GameState::TwoArm)
            }
            (GameEnv::ChaseLite(g), GameState::ChaseLite(s)) => {
                g.step(s, action, rng).map(GameState::ChaseLite)
            }
            (GameEnv::SurroundLite(g), GameState::SurroundLite(s)) => {
                g.step(s, action, rng).map(GameState::SurroundLite)
            }
            _ => panic!("state belongs to a different game"),
        }
    }

    fn is_terminal(&self, state: &GameState) -> bool {
        per_game!(self, state, |g, s| g.is_terminal(s))
    }

    fn outcome(&self, state: &GameState) -> Outcome {
        per_game!(self, state, |g, s| g.outcome(s))
    }

    fn score_bounds(&self) -> (f64, f64) {
        match self {
            GameEnv::GapWorld(g) => g.score_bounds(),
            GameEnv::TwoArm(g) => g.score_bounds(),
            GameEnv::ChaseLite(g) => g.score_bounds(),
            GameEnv::SurroundLite(g) => g.score_bounds(),
        }
    }
}

impl fmt::Display for GameConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameConfig::GapWorld(c) => write!(f, "gapworld:{c}"),
            GameConfig::TwoArm(c) => write!(f, "twoarm:{c}"),
            GameConfig::ChaseLite(c) => write!(f, "chase:{c}"),
            GameConfig::SurroundLite(c) => write!(f, "surround:{c}"),
        }
    }
}

/// Split `name:key=value,...` into the name and key/value pairs.
#[allow(clippy::type_complexity)]
fn split_config(s: &str) -> Result<(&str, Vec<(&str, &str)>), GameError> {
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, r),
        None => (s, ""),
    };
    let mut pairs = Vec::new();
    for part in rest.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| GameError::InvalidConfig(format!("expected key=value, got `{part}`")))?;
        pairs.push((k.trim(), v.trim()));
    }
    Ok((name.trim(), pairs))
}

pub(crate) fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, GameError> {
    value
        .parse()
        .map_err(|_| GameError::InvalidConfig(format!("bad value `{value}` for `{key}`")))
}

impl FromStr for GameConfig {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, GameError> {
        let (name, pairs) = split_config(s)?;
        let cfg = match name {
            "gapworld" => GameConfig::GapWorld(GapWorldConfig::from_pairs(&pairs)?),
            "twoarm" => GameConfig::TwoArm(TwoArmConfig::from_pairs(&pairs)?),
            "chase" => GameConfig::ChaseLite(ChaseLiteConfig::from_pairs(&pairs)?),
            "surround" => GameConfig::SurroundLite(SurroundLiteConfig::from_pairs(&pairs)?),
            other => {
                return Err(GameError::InvalidConfig(format!(
                    "unknown game `{other}` (expected gapworld, twoarm, chase or surround)"
                )))
            }
        };
        // Parameter ranges are the game constructors' business; surface
        // their complaints at parse time so bad text fails fast.
        cfg.build()?;
        Ok(cfg)
    }
}
