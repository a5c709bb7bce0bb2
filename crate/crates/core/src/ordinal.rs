//! Per-node outcome statistics over a fixed action set.
//!
//! An [`OutcomeTable`] counts, per action, how often each distinct terminal
//! [`Outcome`] has been observed, and maintains the pairwise preference matrix
//!
//! ```text
//! P(a > b) = sum_o P(o | a) * ( P(below o | b) + 1/2 * P(o | b) )
//! ```
//!
//! i.e. the probability that a fresh sample of `a` beats a fresh sample of
//! `b`, counting ties half. The Borda score of an action is its mean
//! preference probability against every other action.
//!
//! The matrix is refreshed incrementally on every recorded sample: the new
//! value for the updated action is the running-average blend
//! `P' = alpha * P + (1 - alpha) * fresh`, `alpha = n_t / n_{t+1}`, and the
//! opposite direction is kept at its complement `1 - P'`. Internally the
//! entry is stored as an exact integer numerator (win pairs doubled, ties
//! counted once) over `2 * n(a) * n(b)`, which is that same blend with the
//! division deferred — so the cached matrix equals a batch recomputation to
//! the last bit, independent of the order samples arrived in.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::mdp::{ActionId, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("action {0} is not registered in this table")]
    UnknownAction(ActionId),
    #[error("action {0} has no recorded samples")]
    NoSamples(ActionId),
    #[error("preference of an action against itself is undefined")]
    SameAction,
}

/// Ordinal sample statistics for one decision point.
#[derive(Debug, Clone)]
pub struct OutcomeTable {
    actions: Vec<ActionId>,
    /// Per action: distinct outcome -> multiplicity, ordered by outcome.
    counts: Vec<BTreeMap<Outcome, u64>>,
    totals: Vec<u64>,
    grand_total: u64,
    /// Row-major `k x k`; entry `(a, b)` is `2 * wins(a over b) + ties(a, b)`
    /// summed over all sample pairs. `pref_prob` divides by `2 n(a) n(b)`.
    dwins: Vec<u64>,
}

impl OutcomeTable {
    /// A table over the given distinct actions.
    pub fn new(actions: &[ActionId]) -> Self {
        let k = actions.len();
        for (i, a) in actions.iter().enumerate() {
            assert!(!actions[..i].contains(a), "duplicate action {a} in table");
        }
        OutcomeTable {
            actions: actions.to_vec(),
            counts: vec![BTreeMap::new(); k],
            totals: vec![0; k],
            grand_total: 0,
            dwins: vec![0; k * k],
        }
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    /// Number of samples recorded for `a`.
    pub fn samples(&self, a: ActionId) -> Result<u64, TableError> {
        Ok(self.totals[self.slot(a)?])
    }

    /// Total samples across all actions.
    pub fn total_samples(&self) -> u64 {
        self.grand_total
    }

    fn slot(&self, a: ActionId) -> Result<usize, TableError> {
        self.actions
            .iter()
            .position(|x| *x == a)
            .ok_or(TableError::UnknownAction(a))
    }

    fn below_and_tie(&self, slot: usize, o: &Outcome) -> (u64, u64) {
        let below: u64 = self.counts[slot].range(..*o).map(|(_, c)| *c).sum();
        let tie = self.counts[slot].get(o).copied().unwrap_or(0);
        (below, tie)
    }

    /// Record one sampled outcome for `a` and refresh every pair involving it.
    pub fn record_outcome(&mut self, a: ActionId, o: Outcome) -> Result<(), TableError> {
        let sa = self.slot(a)?;
        let k = self.actions.len();
        for sb in 0..k {
            if sb == sa {
                continue;
            }
            let (below, tie) = self.below_and_tie(sb, &o);
            let above = self.totals[sb] - below - tie;
            self.dwins[sa * k + sb] += 2 * below + tie;
            self.dwins[sb * k + sa] += 2 * above + tie;
        }
        *self.counts[sa].entry(o).or_insert(0) += 1;
        self.totals[sa] += 1;
        self.grand_total += 1;
        Ok(())
    }

    /// Empirical probability that a sample of `a` equals `o`.
    pub fn prob_of(&self, a: ActionId, o: &Outcome) -> Result<f64, TableError> {
        let s = self.slot(a)?;
        if self.totals[s] == 0 {
            return Err(TableError::NoSamples(a));
        }
        let c = self.counts[s].get(o).copied().unwrap_or(0);
        Ok(c as f64 / self.totals[s] as f64)
    }

    /// Empirical probability that a sample of `a` is strictly below `o`.
    /// `o` need not have been observed.
    pub fn prob_below(&self, a: ActionId, o: &Outcome) -> Result<f64, TableError> {
        let s = self.slot(a)?;
        if self.totals[s] == 0 {
            return Err(TableError::NoSamples(a));
        }
        let (below, _) = self.below_and_tie(s, o);
        Ok(below as f64 / self.totals[s] as f64)
    }

    /// Probability that a fresh sample of `a` beats one of `b`, ties half.
    pub fn pref_prob(&self, a: ActionId, b: ActionId) -> Result<f64, TableError> {
        let (sa, sb) = (self.slot(a)?, self.slot(b)?);
        if sa == sb {
            return Err(TableError::SameAction);
        }
        if self.totals[sa] == 0 {
            return Err(TableError::NoSamples(a));
        }
        if self.totals[sb] == 0 {
            return Err(TableError::NoSamples(b));
        }
        let k = self.actions.len();
        let num = self.dwins[sa * k + sb] as f64;
        Ok(num / (2 * self.totals[sa] * self.totals[sb]) as f64)
    }

    /// Mean preference probability of `a` against every other action.
    ///
    /// With a single registered action there is no opponent and the score is
    /// defined as 1. Every action must have at least one sample.
    pub fn borda_score(&self, a: ActionId) -> Result<f64, TableError> {
        let sa = self.slot(a)?;
        if self.actions.len() == 1 {
            if self.totals[sa] == 0 {
                return Err(TableError::NoSamples(a));
            }
            return Ok(1.0);
        }
        let mut sum = 0.0;
        for b in &self.actions {
            if *b == a {
                continue;
            }
            sum += self.pref_prob(a, *b)?;
        }
        Ok(sum / (self.actions.len() - 1) as f64)
    }
}
