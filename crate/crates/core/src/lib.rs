//! Monte Carlo tree search over stochastic forward models, with value backups
//! that operate on outcome *ranks* instead of score magnitudes.
//!
//! The crate bundles:
//!
//! - [`mdp`]: the forward-model interface ([`EnvironmentModel`]), a
//!   lexicographic terminal [`Outcome`] type (win status before score), a
//!   call-counting wrapper ([`MeteredModel`]) that enforces a hard budget on
//!   model invocations, and a splittable deterministic [`RandomSource`].
//! - [`ordinal`]: per-node outcome statistics ([`OutcomeTable`]) giving
//!   pairwise preference probabilities and Borda scores, maintained
//!   incrementally as samples arrive.
//! - [`engine`]: a single search loop parameterised by estimator — plain
//!   sample average, MixMax blending, node-local normalisation, or ordinal
//!   Borda backups.
//! - [`pb`]: a preference-based variant that grows a binary subtree per
//!   iteration and learns from trajectory duels instead of scalar rewards.
//! - [`games`]: small stochastic benchmark environments plus the score-to-
//!   reward mapping shared by the numeric estimators.
//! - [`harness`]: episode/sweep runners with budget accounting, CSV/JSON
//!   record output, and rank aggregation across benchmark cells.
//! - [`stats`]: Friedman and Wilcoxon signed-rank tests for comparing
//!   algorithms over those cells.
//!
//! Everything downstream of a seed is deterministic: fixed seeds reproduce
//! trees, episodes and whole sweep matrices bit for bit.

pub mod engine;
pub mod games;
pub mod harness;
pub mod mdp;
pub mod ordinal;
pub mod pb;
pub mod stats;

pub use engine::{EstimatorKind, Recommendation, RootActionStats, SearchConfig, SearchResult};
pub use games::{reward_map, GameConfig, GameEnv};
pub use harness::{AgentKind, RunRecord, RunSpec};
pub use mdp::{
    compare_outcomes, ActionId, EnvironmentModel, GameStatus, MeteredModel, MeterError, Outcome,
    RandomSource,
};
pub use ordinal::OutcomeTable;
pub use pb::DuelStats;
