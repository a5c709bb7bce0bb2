//! Preference-based search: no scalar rewards anywhere.
//!
//! Each iteration grows a binary subtree. At every interior node a
//! relative-UCB rule picks two actions (champion and challenger), both are
//! simulated, and the two resulting sets of finished trajectories are
//! compared pairwise — every cross pair is one duel recorded at that node.
//! Trajectory sets merge on the way up, so ancestors duel over everything
//! their branches produced. Leaves evaluate by the same random rollout the
//! scalar engine uses, but the outcomes are only ever *compared*, never
//! mapped to numbers.
//!
//! The subtree depth (number of pair-selection levels) is derived from the
//! budget: `clamp(ceil(log2(budget / rollout_len)), 1, 4)`. A depth-`d`
//! subtree costs `2^(d+1) - 2` transition calls for its interior plus
//! `2^d` rollouts, so this keeps a handful of iterations affordable at the
//! small end of the budget grid while capping the exponential blow-up.

use std::cmp::Ordering;

use crate::engine::{rollout, RootActionStats, SearchConfig, SearchResult};
use crate::mdp::{
    compare_outcomes, ActionId, EnvironmentModel, MeterError, MeteredModel, Outcome, RandomSource,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PbError {
    #[error("pair selection needs at least two actions")]
    TooFewActions,
}

/// Pairwise duel tallies among `k` actions.
///
/// Win weights are stored doubled (a tie adds one half-win to each side), so
/// the counts stay integers and accumulation order can't perturb them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuelStats {
    k: usize,
    /// Row-major doubled win weights; `dwins[a][a]` stays zero.
    dwins: Vec<u64>,
}

impl DuelStats {
    pub fn new(k: usize) -> Self {
        DuelStats { k, dwins: vec![0; k * k] }
    }

    pub fn n_actions(&self) -> usize {
        self.k
    }

    /// Record one duel between distinct actions; `Greater` means `a` won.
    pub fn record(&mut self, a: usize, b: usize, result: Ordering) {
        assert_ne!(a, b, "an action cannot duel itself");
        match result {
            Ordering::Greater => self.dwins[a * self.k + b] += 2,
            Ordering::Less => self.dwins[b * self.k + a] += 2,
            Ordering::Equal => {
                self.dwins[a * self.k + b] += 1;
                self.dwins[b * self.k + a] += 1;
            }
        }
    }

    /// Wins of `a` over `b`, ties counting half.
    pub fn wins(&self, a: usize, b: usize) -> f64 {
        self.dwins[a * self.k + b] as f64 / 2.0
    }

    /// Duels fought between `a` and `b` (symmetric).
    pub fn duels(&self, a: usize, b: usize) -> f64 {
        ((self.dwins[a * self.k + b] + self.dwins[b * self.k + a]) / 2) as f64
    }

    pub fn total_duels(&self) -> f64 {
        let doubled: u64 = self.dwins.iter().sum();
        (doubled / 2) as f64
    }

    /// Optimistic utility of `a` against `b`; unexplored pairs are infinite.
    pub fn optimistic(&self, a: usize, b: usize, c: f64, t: f64) -> f64 {
        let n = self.duels(a, b);
        if n == 0.0 {
            return f64::INFINITY;
        }
        self.wins(a, b) / n + c * (t.ln() / n).sqrt()
    }

    /// Overall win rate of `a` across all its duels, if it fought any.
    pub fn row_win_rate(&self, a: usize) -> Option<f64> {
        let mut wins = 0.0;
        let mut duels = 0.0;
        for b in 0..self.k {
            if b != a {
                wins += self.wins(a, b);
                duels += self.duels(a, b);
            }
        }
        (duels > 0.0).then(|| wins / duels)
    }
}

/// Relative-UCB pair choice: the champion maximises the mean optimistic
/// utility of its row, the challenger maximises the optimistic utility
/// *against* the champion. Ties break uniformly at random; unexplored pairs
/// are infinitely optimistic, which forces every pair to be tried.
pub fn rucb_select_pair(
    duels: &DuelStats,
    c: f64,
    rng: &mut RandomSource,
) -> Result<(usize, usize), PbError> {
    let k = duels.n_actions();
    if k < 2 {
        return Err(PbError::TooFewActions);
    }
    let t = duels.total_duels() + 1.0;
    let row_mean = |a: usize| {
        let sum: f64 = (0..k).filter(|b| *b != a).map(|b| duels.optimistic(a, b, c, t)).sum();
        sum / (k - 1) as f64
    };
    let champion = argmax_random_in(&(0..k).collect::<Vec<_>>(), row_mean, rng);
    let rivals: Vec<usize> = (0..k).filter(|b| *b != champion).collect();
    let challenger = argmax_random_in(&rivals, |b| duels.optimistic(b, champion, c, t), rng);
    Ok((champion, challenger))
}

/// Element of `candidates` maximising `f`, ties uniform at random.
/// Infinities compare equal to each other, so fully unexplored rows tie.
fn argmax_random_in(candidates: &[usize], f: impl Fn(usize) -> f64, rng: &mut RandomSource) -> usize {
    debug_assert!(!candidates.is_empty());
    let mut best = f64::NEG_INFINITY;
    let mut tied: Vec<usize> = Vec::new();
    for &x in candidates {
        let v = f(x);
        if v > best {
            best = v;
            tied.clear();
            tied.push(x);
        } else if v == best {
            tied.push(x);
        }
    }
    tied[rng.index(tied.len())]
}

/// Pair-selection levels afforded by a budget:
/// `clamp(ceil(log2(budget / rollout_len)), 1, 4)`.
pub fn subtree_depth(budget: u64, rollout_len: u32) -> u32 {
    let ratio = (budget / u64::from(rollout_len.max(1))).max(1);
    ratio.next_power_of_two().trailing_zeros().clamp(1, 4)
}

struct PbNode {
    actions: Vec<ActionId>,
    duels: DuelStats,
    children: Vec<Option<usize>>,
    /// Trajectories that started through each action.
    visits: Vec<u64>,
}

impl PbNode {
    fn new(actions: Vec<ActionId>) -> Self {
        let k = actions.len();
        debug_assert!(k > 0, "nonterminal states must offer actions");
        PbNode { duels: DuelStats::new(k), children: vec![None; k], visits: vec![0; k], actions }
    }
}

pub fn run_search_pb<M: EnvironmentModel>(
    model: &mut MeteredModel<M>,
    root_state: &M::State,
    cfg: &SearchConfig,
) -> SearchResult {
    let depth = subtree_depth(model.budget(), cfg.rollout_len);
    run_search_pb_with_depth(model, root_state, cfg, depth)
}

/// [`run_search_pb`] with the subtree depth pinned explicitly.
pub fn run_search_pb_with_depth<M: EnvironmentModel>(
    model: &mut MeteredModel<M>,
    root_state: &M::State,
    cfg: &SearchConfig,
    pair_depth: u32,
) -> SearchResult {
    cfg.validate();
    assert!(pair_depth >= 1, "need at least one pair-selection level");
    assert!(!model.model().is_terminal(root_state), "search needs a nonterminal root");
    let calls_before = model.calls_used();
    let mut rng = RandomSource::from_seed(cfg.seed);

    let root_actions = model.model().available_actions(root_state);
    assert!(!root_actions.is_empty(), "nonterminal states must offer actions");
    if root_actions.len() == 1 {
        // Nothing to duel over; answer without spending budget.
        return SearchResult {
            recommended: root_actions[0],
            root_stats: vec![RootActionStats { action: root_actions[0], visits: 0, value: None }],
            iterations: 0,
            rollouts: 0,
            tree_nodes: 1,
            calls_used: 0,
        };
    }

    let mut nodes = vec![PbNode::new(root_actions)];
    let mut iterations = 0u64;
    let mut rollouts = 0u64;
    while model.remaining() > 0 {
        descend(&mut nodes, model, cfg, &mut rng, 0, root_state, pair_depth, &mut rollouts);
        iterations += 1;
    }

    let root = &nodes[0];
    let k = root.actions.len();
    let root_stats: Vec<RootActionStats> = (0..k)
        .map(|slot| RootActionStats {
            action: root.actions[slot],
            visits: root.visits[slot],
            value: root.duels.row_win_rate(slot),
        })
        .collect();
    let rate = |slot: usize| root.duels.row_win_rate(slot).unwrap_or(0.0);
    let recommended_slot =
        argmax_random_in(&(0..k).collect::<Vec<_>>(), rate, &mut rng);
    SearchResult {
        recommended: root.actions[recommended_slot],
        root_stats,
        iterations,
        rollouts,
        tree_nodes: nodes.len() as u64,
        calls_used: model.calls_used() - calls_before,
    }
}

/// Build one subtree below `state` and return its finished trajectories.
#[allow(clippy::too_many_arguments)]
fn descend<M: EnvironmentModel>(
    nodes: &mut Vec<PbNode>,
    model: &mut MeteredModel<M>,
    cfg: &SearchConfig,
    rng: &mut RandomSource,
    node: usize,
    state: &M::State,
    levels_left: u32,
    rollouts: &mut u64,
) -> Vec<Outcome> {
    if model.model().is_terminal(state) {
        *rollouts += 1;
        return vec![model.model().outcome(state)];
    }
    if levels_left == 0 {
        let outcome = rollout(model, state.clone(), cfg.rollout_len, rng);
        *rollouts += 1;
        return vec![outcome];
    }
    if nodes[node].actions.len() == 1 {
        // Degenerate level: follow the only action, nothing to compare.
        let outs = branch(nodes, model, cfg, rng, node, state, 0, levels_left, rollouts);
        nodes[node].visits[0] += outs.len() as u64;
        return outs;
    }
    let (champ, rival) = rucb_select_pair(&nodes[node].duels, cfg.exploration, rng)
        .expect("two or more actions checked above");
    let outs_a = branch(nodes, model, cfg, rng, node, state, champ, levels_left, rollouts);
    let outs_b = branch(nodes, model, cfg, rng, node, state, rival, levels_left, rollouts);
    let here = &mut nodes[node];
    for x in &outs_a {
        for y in &outs_b {
            here.duels.record(champ, rival, compare_outcomes(x, y));
        }
    }
    here.visits[champ] += outs_a.len() as u64;
    here.visits[rival] += outs_b.len() as u64;
    let mut merged = outs_a;
    merged.extend(outs_b);
    merged
}

/// Simulate one action out of `node` and recurse; a branch whose very first
/// transition hits the budget wall contributes no trajectories.
#[allow(clippy::too_many_arguments)]
fn branch<M: EnvironmentModel>(
    nodes: &mut Vec<PbNode>,
    model: &mut MeteredModel<M>,
    cfg: &SearchConfig,
    rng: &mut RandomSource,
    node: usize,
    state: &M::State,
    slot: usize,
    levels_left: u32,
    rollouts: &mut u64,
) -> Vec<Outcome> {
    let action = nodes[node].actions[slot];
    match model.step(state, action, rng) {
        Ok(next) => {
            let child = match nodes[node].children[slot] {
                Some(c) => c,
                None => {
                    let c = nodes.len();
                    nodes.push(PbNode::new(model.model().available_actions(&next)));
                    nodes[node].children[slot] = Some(c);
                    c
                }
            };
            descend(nodes, model, cfg, rng, child, &next, levels_left - 1, rollouts)
        }
        Err(MeterError::BudgetExhausted) => Vec::new(),
        Err(MeterError::IllegalAction(a)) => unreachable!("model offered illegal action {a}"),
    }
}
