//! Tournament plumbing: play full episodes with a fresh, budget-metered
//! search per decision, fan a parameter grid out over worker threads, and
//! reduce the per-episode rows to summaries and rank tables.
//!
//! Determinism contract: one master seed fixes every row. Episode seeds are
//! derived from the master seed by episode index (identical across agents
//! and parameter settings, so algorithms face matched worlds and can be
//! compared pairwise), and each in-episode decision derives its own search
//! stream. Parallel execution cannot reorder or perturb anything except the
//! wall-clock `ms` column.

mod aggregate;
mod output;

pub use aggregate::{aggregate, rank_algorithms, CellSummary, RankCell, RankTable};
pub use output::{
    format_rank_table, read_records_csv, read_records_json, write_rank_table_csv,
    write_records_csv, write_records_json, OutputError, CSV_HEADER,
};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{run_search, EstimatorKind, Recommendation, SearchConfig, SearchResult};
use crate::games::GameConfig;
use crate::mdp::{EnvironmentModel, MeteredModel, Outcome, RandomSource};
use crate::pb::run_search_pb;

#[derive(Debug, Error, PartialEq)]
pub enum HarnessError {
    #[error("bad run spec: {0}")]
    BadSpec(String),
    #[error("no rows to aggregate")]
    NoData,
    #[error("agent `{agent}` has no rows for {game} at budget {budget}")]
    EmptyCell { agent: String, game: String, budget: u64 },
}

/// The five competing decision procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    /// Plain UCT on mean mapped reward.
    Mcts,
    /// UCT with the max-blended mean.
    MixMax,
    /// UCT on node-rescaled means.
    NMcts,
    /// UCT on Borda preference scores.
    OMcts,
    /// Duelling-bandit pair selection over binary subtrees.
    PbMcts,
}

impl AgentKind {
    pub fn all() -> [AgentKind; 5] {
        [AgentKind::Mcts, AgentKind::MixMax, AgentKind::NMcts, AgentKind::OMcts, AgentKind::PbMcts]
    }

    /// Whether the agent consumes the MixMax blend weight.
    pub fn needs_q(&self) -> bool {
        matches!(self, AgentKind::MixMax)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AgentKind::Mcts => "mcts",
            AgentKind::MixMax => "mixmax",
            AgentKind::NMcts => "n-mcts",
            AgentKind::OMcts => "o-mcts",
            AgentKind::PbMcts => "pb-mcts",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "mcts" => Ok(AgentKind::Mcts),
            "mixmax" => Ok(AgentKind::MixMax),
            "n-mcts" => Ok(AgentKind::NMcts),
            "o-mcts" => Ok(AgentKind::OMcts),
            "pb-mcts" => Ok(AgentKind::PbMcts),
            other => Err(HarnessError::BadSpec(format!(
                "unknown agent `{other}` (expected mcts, mixmax, n-mcts, o-mcts or pb-mcts)"
            ))),
        }
    }
}

/// One cell of the tournament grid: a game, an agent and its parameters,
/// and how many episodes to play.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub game: GameConfig,
    pub agent: AgentKind,
    /// Forward-model calls allowed per decision.
    pub budget: u64,
    pub exploration: f64,
    pub rollout_len: u32,
    /// MixMax blend weight; ignored by the other agents.
    pub q: Option<f64>,
    pub episodes: u32,
    pub master_seed: u64,
}

impl RunSpec {
    pub fn new(game: GameConfig, agent: AgentKind, budget: u64) -> RunSpec {
        RunSpec {
            game,
            agent,
            budget,
            exploration: std::f64::consts::FRAC_1_SQRT_2,
            rollout_len: 10,
            q: agent.needs_q().then_some(0.25),
            episodes: 1,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.game.build().map_err(|e| HarnessError::BadSpec(e.to_string()))?;
        if self.budget == 0 {
            return Err(HarnessError::BadSpec("budget must be positive".into()));
        }
        if self.rollout_len == 0 {
            return Err(HarnessError::BadSpec("rollout length must be positive".into()));
        }
        if self.episodes == 0 {
            return Err(HarnessError::BadSpec("episodes must be positive".into()));
        }
        if !self.exploration.is_finite() || self.exploration < 0.0 {
            return Err(HarnessError::BadSpec(format!(
                "exploration must be finite and >= 0, got {}",
                self.exploration
            )));
        }
        if let Some(q) = self.q {
            if !(0.0..=1.0).contains(&q) {
                return Err(HarnessError::BadSpec(format!("q must be in [0, 1], got {q}")));
            }
        }
        Ok(())
    }

    fn estimator(&self) -> EstimatorKind {
        match self.agent {
            AgentKind::Mcts => EstimatorKind::Average,
            AgentKind::MixMax => EstimatorKind::MixMax { q: self.q.unwrap_or(0.25) },
            AgentKind::NMcts => EstimatorKind::NodeNormalized,
            // The duelling agent never maps rewards either; the estimator
            // only marks its trajectories as rank-compared.
            AgentKind::OMcts | AgentKind::PbMcts => EstimatorKind::Borda,
        }
    }

    pub fn search_config(&self, seed: u64) -> SearchConfig {
        SearchConfig {
            estimator: self.estimator(),
            exploration: self.exploration,
            rollout_len: self.rollout_len,
            seed,
            recommendation: Recommendation::MaxVisits,
        }
    }
}

/// Run one budget-metered search for the spec's agent from `state`.
pub fn search_once<M: EnvironmentModel>(
    env: &M,
    spec: &RunSpec,
    state: &M::State,
    seed: u64,
) -> SearchResult {
    let mut meter = MeteredModel::new(env, spec.budget);
    let cfg = spec.search_config(seed);
    match spec.agent {
        AgentKind::PbMcts => run_search_pb(&mut meter, state, &cfg),
        _ => run_search(&mut meter, state, &cfg),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub outcome: Outcome,
    pub decisions: u32,
    pub fm_calls: u64,
}

impl EpisodeResult {
    pub fn win(&self) -> bool {
        self.outcome.is_win()
    }
}

/// Episodes longer than this are cut off and scored as they stand; the
/// benchmark games all terminate orders of magnitude earlier.
const DECISION_CAP: u32 = 10_000;

/// Play one episode: a fresh metered search per decision, then the
/// recommended move on the real (unmetered) environment.
pub fn run_episode<M: EnvironmentModel>(env: &M, spec: &RunSpec, seed: u64) -> EpisodeResult {
    let base = RandomSource::from_seed(seed);
    let mut world = base.derive(0);
    let mut state = env.initial_state();
    let mut decisions = 0u32;
    let mut fm_calls = 0u64;
    while !env.is_terminal(&state) && decisions < DECISION_CAP {
        let search_seed = base.derive(1 + u64::from(decisions)).seed();
        let result = search_once(env, spec, &state, search_seed);
        fm_calls += result.calls_used;
        state = env
            .step(&state, result.recommended, &mut world)
            .expect("search recommends only offered actions");
        decisions += 1;
    }
    EpisodeResult { outcome: env.outcome(&state), decisions, fm_calls }
}

/// One finished episode as a flat result row.
///
/// Serialized field order is the column order; `q` is empty for agents
/// without a blend weight.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunRecord {
    pub game: String,
    pub agent: String,
    pub budget: u64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "RL")]
    pub rl: u32,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    pub seed: u64,
    pub episode: u32,
    pub win: u8,
    pub score: f64,
    pub decisions: u32,
    pub fm_calls: u64,
    /// Wall-clock episode time; the only nondeterministic column.
    pub ms: u64,
}

/// Episode seed for one episode index under a master seed — shared across
/// agents and parameter settings so their rows pair up.
pub fn episode_seed(master_seed: u64, episode: u32) -> u64 {
    RandomSource::from_seed(master_seed).derive(1 + u64::from(episode)).seed()
}

/// Run every episode of every spec, in parallel, with output order and
/// content (except `ms`) fixed by the specs and their master seeds alone.
pub fn run_matrix(specs: &[RunSpec]) -> Result<Vec<RunRecord>, HarnessError> {
    for spec in specs {
        spec.validate()?;
    }
    let jobs: Vec<(usize, u32)> = specs
        .iter()
        .enumerate()
        .flat_map(|(i, s)| (0..s.episodes).map(move |e| (i, e)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(i, episode)| {
            let spec = &specs[i];
            let env = spec.game.build().expect("validated above");
            let seed = episode_seed(spec.master_seed, episode);
            let start = Instant::now();
            let ep = run_episode(&env, spec, seed);
            RunRecord {
                game: spec.game.name().to_string(),
                agent: spec.agent.to_string(),
                budget: spec.budget,
                c: spec.exploration,
                rl: spec.rollout_len,
                q: spec.agent.needs_q().then(|| spec.q.unwrap_or(0.25)),
                seed,
                episode,
                win: u8::from(ep.win()),
                score: ep.outcome.score(),
                decisions: ep.decisions,
                fm_calls: ep.fm_calls,
                ms: start.elapsed().as_millis() as u64,
            }
        })
        .collect())
}

/// The default exploration-constant grid: 0 to 2 in steps of 0.25.
pub fn exploration_grid() -> Vec<f64> {
    (0..=8).map(|i| f64::from(i) * 0.25).collect()
}

/// The rollout-length grid.
pub fn rollout_grid() -> Vec<u32> {
    vec![5, 10, 25, 50]
}

/// The per-decision budget grid.
pub fn budget_grid() -> Vec<u64> {
    vec![250, 500, 1000, 10_000]
}

/// Cartesian sweep expansion. MixMax fans out over `qs`; every other agent
/// gets a single spec per (game, budget, C, RL) point.
#[allow(clippy::too_many_arguments)] // one parameter per grid axis
pub fn sweep_specs(
    games: &[GameConfig],
    agents: &[AgentKind],
    budgets: &[u64],
    explorations: &[f64],
    rollout_lens: &[u32],
    qs: &[f64],
    episodes: u32,
    master_seed: u64,
) -> Vec<RunSpec> {
    let mut specs = Vec::new();
    for game in games {
        for &agent in agents {
            let q_options: Vec<Option<f64>> = if agent.needs_q() {
                qs.iter().map(|q| Some(*q)).collect()
            } else {
                vec![None]
            };
            for &budget in budgets {
                for &exploration in explorations {
                    for &rollout_len in rollout_lens {
                        for &q in &q_options {
                            specs.push(RunSpec {
                                game: game.clone(),
                                agent,
                                budget,
                                exploration,
                                rollout_len,
                                q,
                                episodes,
                                master_seed,
                            });
                        }
                    }
                }
            }
        }
    }
    specs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{GameConfig, GapWorldConfig, TwoArmConfig};
    use crate::mdp::GameStatus;
    use std::collections::BTreeSet;

    fn two_arm_spec(agent: AgentKind) -> RunSpec {
        RunSpec::new(GameConfig::TwoArm(TwoArmConfig::default()), agent, 250)
    }

    #[test]
    fn agent_names_round_trip() {
        for agent in AgentKind::all() {
            let parsed: AgentKind = agent.to_string().parse().unwrap();
            assert_eq!(parsed, agent);
        }
        assert!("alphago".parse::<AgentKind>().is_err());
    }

    #[test]
    fn only_mixmax_takes_a_blend_weight() {
        for agent in AgentKind::all() {
            assert_eq!(agent.needs_q(), agent == AgentKind::MixMax);
        }
        assert_eq!(two_arm_spec(AgentKind::MixMax).q, Some(0.25));
        assert_eq!(two_arm_spec(AgentKind::OMcts).q, None);
    }

    #[test]
    fn one_decision_game_spends_the_whole_budget_once() {
        for agent in AgentKind::all() {
            let spec = two_arm_spec(agent);
            let env = spec.game.build().unwrap();
            let ep = run_episode(&env, &spec, 7);
            assert_eq!(ep.decisions, 1, "{agent}");
            assert_eq!(ep.fm_calls, 250, "{agent}: one full search");
            assert!(ep.outcome.status() == GameStatus::Won);
        }
    }

    #[test]
    fn episodes_spend_at_most_budget_per_decision() {
        let spec = RunSpec::new(
            GameConfig::GapWorld(GapWorldConfig::default()),
            AgentKind::Mcts,
            100,
        );
        let env = spec.game.build().unwrap();
        let ep = run_episode(&env, &spec, 3);
        assert!(ep.decisions >= 1);
        assert!(ep.fm_calls <= u64::from(ep.decisions) * 100);
    }

    /// On the deterministic strip (p = 1) a winning line exists — breadth-first
    /// search over the real dynamics proves it — and the planner must find it.
    #[test]
    fn certain_jumps_make_gapworld_winnable_and_won() {
        let cfg = GapWorldConfig { p_jump: 1.0, ..GapWorldConfig::default() };
        let game = GameConfig::GapWorld(cfg.clone());
        let env = game.build().unwrap();

        // Oracle: BFS over positions proves some action sequence wins in time.
        let mut frontier = BTreeSet::from([0u32]);
        let mut reachable_win = false;
        'bfs: for _turn in 0..cfg.max_turns {
            let mut next = BTreeSet::new();
            for pos in frontier {
                for target in [pos + 1, pos + 2] {
                    if target >= cfg.len {
                        reachable_win = true;
                        break 'bfs;
                    }
                    if !cfg.gaps.contains(&target) {
                        next.insert(target);
                    }
                }
            }
            frontier = next;
        }
        assert!(reachable_win, "the default strip must be winnable at p = 1");

        for seed in 0..5 {
            let spec = RunSpec::new(game.clone(), AgentKind::Mcts, 1000);
            let ep = run_episode(&env, &spec, seed);
            assert_eq!(ep.outcome.status(), GameStatus::Won, "seed {seed}: {:?}", ep.outcome);
        }
    }

    #[test]
    fn sweep_expansion_counts_match_the_grids() {
        let games = [GameConfig::TwoArm(TwoArmConfig::default())];
        let specs = sweep_specs(
            &games,
            &AgentKind::all(),
            &[250],
            &exploration_grid(),
            &rollout_grid(),
            &[0.25],
            10,
            1,
        );
        // 9 C values x 4 rollout lengths = 36 per agent and budget.
        assert_eq!(specs.len(), 5 * 36);
        for agent in AgentKind::all() {
            let n = specs.iter().filter(|s| s.agent == agent).count();
            assert_eq!(n, 36, "{agent}");
        }
        assert!(specs.iter().all(|s| s.episodes == 10 && s.master_seed == 1));
        assert!(specs
            .iter()
            .all(|s| s.q.is_some() == (s.agent == AgentKind::MixMax)));
    }

    #[test]
    fn matrix_rows_are_ordered_and_reproducible_modulo_wall_time() {
        let mut spec = two_arm_spec(AgentKind::OMcts);
        spec.episodes = 4;
        spec.master_seed = 99;
        let mut other = two_arm_spec(AgentKind::Mcts);
        other.episodes = 4;
        other.master_seed = 99;
        let specs = vec![spec, other];
        let strip_ms = |rows: Vec<RunRecord>| -> Vec<RunRecord> {
            rows.into_iter().map(|r| RunRecord { ms: 0, ..r }).collect()
        };
        let a = strip_ms(run_matrix(&specs).unwrap());
        let b = strip_ms(run_matrix(&specs).unwrap());
        assert_eq!(a, b, "parallel execution must not leak into results");
        assert_eq!(a.len(), 8);
        // Matched worlds: episode i gets one seed no matter the agent.
        for i in 0..4 {
            assert_eq!(a[i].seed, a[i + 4].seed, "episode {i}");
            assert_eq!(a[i].episode, i as u32);
        }
        assert!(a[..4].iter().all(|r| r.agent == "o-mcts"));
        assert!(a[4..].iter().all(|r| r.agent == "mcts"));
    }

    #[test]
    fn bad_specs_are_rejected_before_any_work() {
        let mut spec = two_arm_spec(AgentKind::Mcts);
        spec.budget = 0;
        assert!(matches!(run_matrix(&[spec]).unwrap_err(), HarnessError::BadSpec(_)));
        let mut spec = two_arm_spec(AgentKind::MixMax);
        spec.q = Some(1.5);
        assert!(spec.validate().is_err());
        let mut spec = two_arm_spec(AgentKind::Mcts);
        spec.exploration = -0.5;
        assert!(spec.validate().is_err());
        let mut spec = two_arm_spec(AgentKind::Mcts);
        spec.episodes = 0;
        assert!(spec.validate().is_err());
        let spec = RunSpec::new(
            GameConfig::TwoArm(TwoArmConfig { q: 2.0, ..TwoArmConfig::default() }),
            AgentKind::Mcts,
            100,
        );
        assert!(spec.validate().is_err(), "game parameter errors surface too");
    }
}
