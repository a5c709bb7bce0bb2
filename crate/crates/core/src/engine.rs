//! The tree search loop shared by all scalar- and rank-backup variants.
//!
//! The tree is over action sequences: every iteration re-simulates its path
//! from the root through the metered model, so stochastic transitions keep
//! being re-sampled and per-action statistics aggregate over the transition
//! distribution rather than over a single frozen successor. Each iteration
//! selects down the tree, expands one untried action, rolls out uniformly at
//! random for at most `rollout_len` steps, evaluates the reached state and
//! backs the result up along the path.
//!
//! What "backs up" means depends on the estimator:
//!
//! - `Average`, `MixMax`, `NodeNormalized`: the outcome is mapped into
//!   `[0, 1]` by [`reward_map`] and accumulated as sums/maxima.
//! - `Borda`: the raw outcome is recorded into the node's [`OutcomeTable`];
//!   selection then scores each action by its Borda preference value, so
//!   only outcome ranks matter.
//!
//! Budget exhaustion is a normal way for an iteration to end: whatever state
//! the truncated descent or rollout reached is still evaluated and backed up.

use crate::games::reward_map;
use crate::mdp::{ActionId, EnvironmentModel, MeterError, MeteredModel, Outcome, RandomSource};
use crate::ordinal::OutcomeTable;

/// How a node turns its per-action statistics into a selection value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorKind {
    /// Mean mapped reward.
    Average,
    /// `q * max + (1 - q) * mean` of the mapped rewards.
    MixMax { q: f64 },
    /// Mean mapped reward rescaled by the node's own reward extrema.
    NodeNormalized,
    /// Borda preference score over raw outcome ranks.
    Borda,
}

impl EstimatorKind {
    pub fn is_ordinal(&self) -> bool {
        matches!(self, EstimatorKind::Borda)
    }
}

/// Which root action a finished search returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Recommendation {
    /// Most-visited root action (robust child).
    #[default]
    MaxVisits,
    /// Highest estimator value; falls back to most-visited if the budget died
    /// before every root action was sampled at least once.
    MaxValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub estimator: EstimatorKind,
    /// UCT exploration constant `C`.
    pub exploration: f64,
    /// Rollout length cap `RL`.
    pub rollout_len: u32,
    pub seed: u64,
    pub recommendation: Recommendation,
}

impl SearchConfig {
    pub fn new(estimator: EstimatorKind) -> Self {
        SearchConfig {
            estimator,
            exploration: std::f64::consts::FRAC_1_SQRT_2,
            rollout_len: 10,
            seed: 0,
            recommendation: Recommendation::MaxVisits,
        }
    }

    pub(crate) fn validate(&self) {
        assert!(self.exploration >= 0.0, "exploration constant must be >= 0");
        assert!(self.rollout_len >= 1, "rollout length must be >= 1");
        if let EstimatorKind::MixMax { q } = self.estimator {
            assert!((0.0..=1.0).contains(&q), "MixMax q must be in [0, 1], got {q}");
        }
    }
}

/// Statistics of one root action after a search.
#[derive(Debug, Clone, PartialEq)]
pub struct RootActionStats {
    pub action: ActionId,
    pub visits: u64,
    /// Estimator value; `None` when the action was never sampled (or, for
    /// Borda, when some sibling wasn't, which leaves the score undefined).
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub recommended: ActionId,
    pub root_stats: Vec<RootActionStats>,
    pub iterations: u64,
    /// Trajectory evaluations backed up (one per iteration here; the
    /// preference-based search produces several per iteration).
    pub rollouts: u64,
    pub tree_nodes: u64,
    pub calls_used: u64,
}

/// One state of the search tree with per-action statistics.
///
/// In ordinal mode the attached [`OutcomeTable`]'s per-action totals always
/// equal the visit counts. The expansion order of untried actions is a
/// uniformly random permutation fixed when the node is created.
pub struct TreeNode<S> {
    state: S,
    actions: Vec<ActionId>,
    children: Vec<Option<usize>>,
    visits: Vec<u64>,
    sums: Vec<f64>,
    maxes: Vec<f64>,
    total_visits: u64,
    reward_min: f64,
    reward_max: f64,
    table: Option<OutcomeTable>,
    /// Action slots not yet expanded; popped from the back.
    untried: Vec<usize>,
}

impl<S> TreeNode<S> {
    pub fn new(state: S, actions: Vec<ActionId>, ordinal: bool, rng: &mut RandomSource) -> Self {
        let k = actions.len();
        let mut untried: Vec<usize> = (0..k).collect();
        rng.shuffle(&mut untried);
        TreeNode {
            table: ordinal.then(|| OutcomeTable::new(&actions)),
            state,
            children: vec![None; k],
            visits: vec![0; k],
            sums: vec![0.0; k],
            maxes: vec![f64::NEG_INFINITY; k],
            total_visits: 0,
            reward_min: f64::INFINITY,
            reward_max: f64::NEG_INFINITY,
            untried,
            actions,
        }
    }

    pub fn state(&self) -> &S {
        &self.state
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn visits(&self, slot: usize) -> u64 {
        self.visits[slot]
    }

    pub fn total_visits(&self) -> u64 {
        self.total_visits
    }

    pub fn child(&self, slot: usize) -> Option<usize> {
        self.children[slot]
    }

    pub fn table(&self) -> Option<&OutcomeTable> {
        self.table.as_ref()
    }

    fn peek_untried(&self) -> Option<usize> {
        self.untried.last().copied()
    }

    fn commit_untried(&mut self, child_idx: usize) -> usize {
        let slot = self.untried.pop().expect("no untried action to commit");
        self.children[slot] = Some(child_idx);
        slot
    }

    pub fn fully_expanded(&self) -> bool {
        self.untried.is_empty()
    }

    /// Fold one mapped reward into the numeric statistics.
    pub fn record_numeric(&mut self, slot: usize, reward: f64) {
        self.visits[slot] += 1;
        self.total_visits += 1;
        self.sums[slot] += reward;
        self.maxes[slot] = self.maxes[slot].max(reward);
        self.reward_min = self.reward_min.min(reward);
        self.reward_max = self.reward_max.max(reward);
    }

    /// Record one raw outcome into the ordinal statistics.
    pub fn record_ordinal(&mut self, slot: usize, outcome: Outcome) {
        self.visits[slot] += 1;
        self.total_visits += 1;
        let action = self.actions[slot];
        self.table
            .as_mut()
            .expect("ordinal sample on a numeric node")
            .record_outcome(action, outcome)
            .expect("table actions mirror node actions");
    }

    /// Estimator value of one action, if defined yet.
    pub fn value(&self, slot: usize, estimator: EstimatorKind) -> Option<f64> {
        if self.visits[slot] == 0 {
            return None;
        }
        let n = self.visits[slot] as f64;
        let mean = self.sums[slot] / n;
        match estimator {
            EstimatorKind::Average => Some(mean),
            EstimatorKind::MixMax { q } => Some(q * self.maxes[slot] + (1.0 - q) * mean),
            EstimatorKind::NodeNormalized => {
                if self.reward_max > self.reward_min {
                    Some((mean - self.reward_min) / (self.reward_max - self.reward_min))
                } else {
                    // All rewards seen at this node coincide: no scale yet.
                    Some(0.5)
                }
            }
            EstimatorKind::Borda => {
                self.table.as_ref().and_then(|t| t.borda_score(self.actions[slot]).ok())
            }
        }
    }

    /// UCT choice among the (fully expanded) actions:
    /// `value + 2 C sqrt(2 ln n_v / n_v(a))`, ties uniform at random.
    pub fn select_child(
        &self,
        exploration: f64,
        estimator: EstimatorKind,
        rng: &mut RandomSource,
    ) -> usize {
        debug_assert!(self.fully_expanded(), "selection before full expansion");
        let ln_total = (self.total_visits as f64).ln();
        let uct = |slot: usize| {
            let v = self
                .value(slot, estimator)
                .expect("fully expanded node has a value for every action");
            v + 2.0 * exploration * (2.0 * ln_total / self.visits[slot] as f64).sqrt()
        };
        argmax_random(self.actions.len(), uct, rng)
    }
}

/// Index of a maximal value, ties broken uniformly at random.
fn argmax_random(k: usize, f: impl Fn(usize) -> f64, rng: &mut RandomSource) -> usize {
    debug_assert!(k > 0);
    let mut best = f(0);
    let mut tied = vec![0];
    for slot in 1..k {
        let v = f(slot);
        if v > best {
            best = v;
            tied.clear();
            tied.push(slot);
        } else if v == best {
            tied.push(slot);
        }
    }
    tied[rng.index(tied.len())]
}

/// Play uniformly random legal actions for at most `max_len` steps (or until
/// a terminal state or the budget ends) and evaluate whatever was reached.
pub fn rollout<M: EnvironmentModel>(
    model: &mut MeteredModel<M>,
    start: M::State,
    max_len: u32,
    rng: &mut RandomSource,
) -> Outcome {
    let mut state = start;
    for _ in 0..max_len {
        if model.model().is_terminal(&state) {
            break;
        }
        let actions = model.model().available_actions(&state);
        let action = actions[rng.index(actions.len())];
        match model.step(&state, action, rng) {
            Ok(next) => state = next,
            Err(MeterError::BudgetExhausted) => break,
            Err(MeterError::IllegalAction(a)) => {
                unreachable!("model offered illegal action {a}")
            }
        }
    }
    model.model().outcome(&state)
}

/// Back one evaluated outcome up a root-to-frontier path.
pub fn backpropagate<S>(
    nodes: &mut [TreeNode<S>],
    path: &[(usize, usize)],
    outcome: &Outcome,
    estimator: EstimatorKind,
    score_bounds: (f64, f64),
) {
    if estimator.is_ordinal() {
        for (node, slot) in path {
            nodes[*node].record_ordinal(*slot, *outcome);
        }
    } else {
        let reward = reward_map(outcome, score_bounds.0, score_bounds.1)
            .expect("model produced a score outside its declared bounds");
        for (node, slot) in path {
            nodes[*node].record_numeric(*slot, reward);
        }
    }
}

pub fn run_search<M: EnvironmentModel>(
    model: &mut MeteredModel<M>,
    root_state: &M::State,
    cfg: &SearchConfig,
) -> SearchResult {
    run_search_traced(model, root_state, cfg, &mut Vec::new())
}

/// Like [`run_search`], additionally appending every tree-policy action
/// (selections and expansions, not rollout moves) to `trace`.
pub fn run_search_traced<M: EnvironmentModel>(
    model: &mut MeteredModel<M>,
    root_state: &M::State,
    cfg: &SearchConfig,
    trace: &mut Vec<ActionId>,
) -> SearchResult {
    cfg.validate();
    assert!(!model.model().is_terminal(root_state), "search needs a nonterminal root");
    let ordinal = cfg.estimator.is_ordinal();
    let bounds = model.model().score_bounds();
    let calls_before = model.calls_used();
    let mut rng = RandomSource::from_seed(cfg.seed);

    let root_actions = model.model().available_actions(root_state);
    assert!(!root_actions.is_empty(), "nonterminal states must offer actions");
    let mut nodes = vec![TreeNode::new(root_state.clone(), root_actions, ordinal, &mut rng)];
    let mut iterations = 0u64;
    let mut rollouts = 0u64;

    while model.remaining() > 0 {
        let mut state = root_state.clone();
        let mut node = 0usize;
        let mut path: Vec<(usize, usize)> = Vec::new();
        let outcome = loop {
            if model.model().is_terminal(&state) {
                // A re-sampled transition ended the episode inside the tree.
                break model.model().outcome(&state);
            }
            if let Some(slot) = nodes[node].peek_untried() {
                let action = nodes[node].actions()[slot];
                match model.step(&state, action, &mut rng) {
                    Ok(next) => {
                        let child = TreeNode::new(
                            next.clone(),
                            model.model().available_actions(&next),
                            ordinal,
                            &mut rng,
                        );
                        let child_idx = nodes.len();
                        nodes.push(child);
                        nodes[node].commit_untried(child_idx);
                        path.push((node, slot));
                        trace.push(action);
                        break rollout(model, next, cfg.rollout_len, &mut rng);
                    }
                    Err(MeterError::BudgetExhausted) => break model.model().outcome(&state),
                    Err(MeterError::IllegalAction(a)) => {
                        unreachable!("model offered illegal action {a}")
                    }
                }
            } else {
                let slot = nodes[node].select_child(cfg.exploration, cfg.estimator, &mut rng);
                let action = nodes[node].actions()[slot];
                match model.step(&state, action, &mut rng) {
                    Ok(next) => {
                        path.push((node, slot));
                        trace.push(action);
                        state = next;
                        node = nodes[node].child(slot).expect("expanded actions have children");
                    }
                    Err(MeterError::BudgetExhausted) => break model.model().outcome(&state),
                    Err(MeterError::IllegalAction(a)) => {
                        unreachable!("model offered illegal action {a}")
                    }
                }
            }
        };
        rollouts += 1;
        backpropagate(&mut nodes, &path, &outcome, cfg.estimator, bounds);
        iterations += 1;
    }

    let root = &nodes[0];
    let k = root.actions().len();
    let root_stats: Vec<RootActionStats> = (0..k)
        .map(|slot| RootActionStats {
            action: root.actions()[slot],
            visits: root.visits(slot),
            value: root.value(slot, cfg.estimator),
        })
        .collect();
    let all_sampled = (0..k).all(|slot| root.visits(slot) > 0);
    let recommended_slot = match cfg.recommendation {
        Recommendation::MaxValue if all_sampled => argmax_random(
            k,
            |slot| root.value(slot, cfg.estimator).expect("all root actions sampled"),
            &mut rng,
        ),
        _ => argmax_random(k, |slot| root.visits(slot) as f64, &mut rng),
    };
    SearchResult {
        recommended: root.actions()[recommended_slot],
        root_stats,
        iterations,
        rollouts,
        tree_nodes: nodes.len() as u64,
        calls_used: model.calls_used() - calls_before,
    }
}
