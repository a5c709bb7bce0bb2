//! Reduce episode rows to per-configuration summaries and cross-game rank
//! tables.
//!
//! The ranking follows the usual tournament reading: within every
//! (game, budget) cell each agent is represented by its best configuration
//! — highest win rate, mean score breaking ties — and the agents' cell
//! entries are midranked (rank 1 best). Averaging an agent's rank over all
//! cells gives the headline ordering; the per-cell rank rows are what the
//! significance tests consume.

use std::collections::BTreeMap;

use super::{HarnessError, RunRecord};

/// Win rate and mean score of one parameter configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CellSummary {
    pub game: String,
    pub agent: String,
    pub budget: u64,
    pub c: f64,
    pub rl: u32,
    pub q: Option<f64>,
    pub episodes: u32,
    pub win_rate: f64,
    pub mean_score: f64,
}

/// Group rows by (game, agent, budget, C, RL, Q) and average them.
/// Output order is the lexicographic key order, independent of row order.
pub fn aggregate(records: &[RunRecord]) -> Vec<CellSummary> {
    type Key = (String, String, u64, u64, u32, Option<u64>);
    let mut groups: BTreeMap<Key, (u32, u64, f64)> = BTreeMap::new();
    for r in records {
        let key =
            (r.game.clone(), r.agent.clone(), r.budget, r.c.to_bits(), r.rl, r.q.map(f64::to_bits));
        let (n, wins, score) = groups.entry(key).or_insert((0, 0, 0.0));
        *n += 1;
        *wins += u64::from(r.win);
        *score += r.score;
    }
    groups
        .into_iter()
        .map(|((game, agent, budget, c_bits, rl, q_bits), (n, wins, score))| CellSummary {
            game,
            agent,
            budget,
            c: f64::from_bits(c_bits),
            rl,
            q: q_bits.map(f64::from_bits),
            episodes: n,
            win_rate: wins as f64 / f64::from(n),
            mean_score: score / f64::from(n),
        })
        .collect()
}

/// Ranks of every agent within one (game, budget) cell.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RankCell {
    pub game: String,
    pub budget: u64,
    /// Aligned with [`RankTable::agents`]; 1 is best, ties share midranks.
    pub ranks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RankTable {
    pub agents: Vec<String>,
    pub cells: Vec<RankCell>,
    /// Mean rank per agent over all cells, aligned with `agents`.
    pub mean_ranks: Vec<f64>,
}

impl RankTable {
    /// Rank rows (cells x agents), the input shape the Friedman test wants.
    pub fn rank_matrix(&self) -> Vec<Vec<f64>> {
        self.cells.iter().map(|c| c.ranks.clone()).collect()
    }

    /// Rank column of one agent across cells, for pairwise comparisons.
    pub fn agent_ranks(&self, agent: &str) -> Option<Vec<f64>> {
        let idx = self.agents.iter().position(|a| a == agent)?;
        Some(self.cells.iter().map(|c| c.ranks[idx]).collect())
    }
}

/// Best-configuration performance of one agent in one cell.
fn best_entry(summaries: &[&CellSummary]) -> (f64, f64) {
    summaries
        .iter()
        .map(|s| (s.win_rate, s.mean_score))
        .max_by(|a, b| a.partial_cmp(b).expect("finite rates"))
        .expect("nonempty by construction")
}

/// Midranks with rank 1 for the largest (win rate, mean score) pair.
fn rank_descending(entries: &[(f64, f64)]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| entries[b].partial_cmp(&entries[a]).expect("finite"));
    let mut ranks = vec![0.0; entries.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && entries[order[j + 1]] == entries[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &slot in &order[i..=j] {
            ranks[slot] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Build the rank table over every (game, budget) cell present in the
/// summaries. Every agent must appear in every cell; a missing combination
/// is an [`HarnessError::EmptyCell`].
pub fn rank_algorithms(summaries: &[CellSummary]) -> Result<RankTable, HarnessError> {
    if summaries.is_empty() {
        return Err(HarnessError::NoData);
    }
    let mut agents: Vec<String> = summaries.iter().map(|s| s.agent.clone()).collect();
    agents.sort();
    agents.dedup();
    let mut cell_keys: Vec<(String, u64)> =
        summaries.iter().map(|s| (s.game.clone(), s.budget)).collect();
    cell_keys.sort();
    cell_keys.dedup();

    let mut cells = Vec::with_capacity(cell_keys.len());
    let mut rank_sums = vec![0.0; agents.len()];
    for (game, budget) in cell_keys {
        let mut entries = Vec::with_capacity(agents.len());
        for agent in &agents {
            let here: Vec<&CellSummary> = summaries
                .iter()
                .filter(|s| s.game == game && s.budget == budget && s.agent == *agent)
                .collect();
            if here.is_empty() {
                return Err(HarnessError::EmptyCell { agent: agent.clone(), game, budget });
            }
            entries.push(best_entry(&here));
        }
        let ranks = rank_descending(&entries);
        for (sum, r) in rank_sums.iter_mut().zip(&ranks) {
            *sum += r;
        }
        cells.push(RankCell { game, budget, ranks });
    }
    let n = cells.len() as f64;
    let mean_ranks = rank_sums.into_iter().map(|s| s / n).collect();
    Ok(RankTable { agents, cells, mean_ranks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(game: &str, agent: &str, budget: u64, c: f64, win: u8, score: f64) -> RunRecord {
        RunRecord {
            game: game.into(),
            agent: agent.into(),
            budget,
            c,
            rl: 10,
            q: None,
            seed: 1,
            episode: 0,
            win,
            score,
            decisions: 1,
            fm_calls: budget,
            ms: 0,
        }
    }

    #[test]
    fn aggregation_averages_within_one_configuration() {
        let rows = vec![
            record("gapworld", "mcts", 250, 0.5, 1, 12.0),
            record("gapworld", "mcts", 250, 0.5, 0, 6.0),
            record("gapworld", "mcts", 250, 0.75, 1, 10.0),
        ];
        let cells = aggregate(&rows);
        assert_eq!(cells.len(), 2, "two distinct C values");
        let half = &cells[0];
        assert_eq!((half.c, half.episodes), (0.5, 2));
        assert_eq!(half.win_rate, 0.5);
        assert_eq!(half.mean_score, 9.0);
        assert_eq!(cells[1].win_rate, 1.0);
    }

    #[test]
    fn aggregation_order_ignores_row_order() {
        let mut rows = vec![
            record("surround", "mcts", 250, 0.5, 1, 3.0),
            record("chase", "o-mcts", 500, 0.5, 0, 1.0),
            record("chase", "mcts", 250, 0.5, 1, 2.0),
        ];
        let forward = aggregate(&rows);
        rows.reverse();
        assert_eq!(aggregate(&rows), forward);
        let keys: Vec<(&str, &str, u64)> =
            forward.iter().map(|c| (c.game.as_str(), c.agent.as_str(), c.budget)).collect();
        assert_eq!(
            keys,
            [("chase", "mcts", 250), ("chase", "o-mcts", 500), ("surround", "mcts", 250)]
        );
    }

    fn summary(
        game: &str,
        agent: &str,
        budget: u64,
        c: f64,
        win_rate: f64,
        mean_score: f64,
    ) -> CellSummary {
        CellSummary { game: game.into(), agent: agent.into(), budget, c, rl: 10, q: None, episodes: 10, win_rate, mean_score }
    }

    #[test]
    fn each_agent_is_ranked_by_its_best_configuration() {
        // mcts has a weak and a strong C; the strong one (0.9) must represent it.
        let cells = vec![
            summary("gapworld", "mcts", 250, 0.25, 0.2, 5.0),
            summary("gapworld", "mcts", 250, 0.5, 0.9, 9.0),
            summary("gapworld", "o-mcts", 250, 0.5, 0.6, 8.0),
        ];
        let table = rank_algorithms(&cells).unwrap();
        assert_eq!(table.agents, ["mcts", "o-mcts"]);
        assert_eq!(table.cells[0].ranks, [1.0, 2.0]);
    }

    #[test]
    fn equal_cells_share_midranks() {
        let cells = vec![
            summary("gapworld", "a", 250, 0.5, 0.7, 4.0),
            summary("gapworld", "b", 250, 0.5, 0.7, 4.0),
            summary("gapworld", "c", 250, 0.5, 0.1, 1.0),
        ];
        let table = rank_algorithms(&cells).unwrap();
        assert_eq!(table.cells[0].ranks, [1.5, 1.5, 3.0]);
    }

    #[test]
    fn mean_score_breaks_win_rate_ties() {
        let cells = vec![
            summary("gapworld", "a", 250, 0.5, 0.7, 4.0),
            summary("gapworld", "b", 250, 0.5, 0.7, 6.0),
        ];
        let table = rank_algorithms(&cells).unwrap();
        assert_eq!(table.cells[0].ranks, [2.0, 1.0]);
    }

    #[test]
    fn mean_ranks_average_over_cells() {
        let cells = vec![
            summary("gapworld", "a", 250, 0.5, 0.9, 9.0),
            summary("gapworld", "b", 250, 0.5, 0.1, 1.0),
            summary("surround", "a", 250, 0.5, 0.1, 1.0),
            summary("surround", "b", 250, 0.5, 0.9, 9.0),
            summary("gapworld", "a", 500, 0.5, 0.9, 9.0),
            summary("gapworld", "b", 500, 0.5, 0.1, 1.0),
        ];
        let table = rank_algorithms(&cells).unwrap();
        assert_eq!(table.cells.len(), 3);
        assert_eq!(table.mean_ranks, [(1.0 + 1.0 + 2.0) / 3.0, (2.0 + 2.0 + 1.0) / 3.0]);
        assert_eq!(table.agent_ranks("a").unwrap(), [1.0, 1.0, 2.0]);
        assert_eq!(table.rank_matrix().len(), 3);
    }

    #[test]
    fn missing_combinations_are_reported() {
        let cells = vec![
            summary("gapworld", "a", 250, 0.5, 0.9, 9.0),
            summary("gapworld", "b", 250, 0.5, 0.1, 1.0),
            summary("surround", "a", 250, 0.5, 0.1, 1.0),
        ];
        let err = rank_algorithms(&cells).unwrap_err();
        assert_eq!(
            err,
            HarnessError::EmptyCell { agent: "b".into(), game: "surround".into(), budget: 250 }
        );
        assert_eq!(rank_algorithms(&[]).unwrap_err(), HarnessError::NoData);
    }
}
