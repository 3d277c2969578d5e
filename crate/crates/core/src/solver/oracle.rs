//! Independent reference evaluator.
//!
//! Retrograde analysis over the whole (finite) space of count vectors with at
//! most the starting number of live candidates: level `d` is the set of states
//! the Questioner wins within `d` questions. The menu is every vector with
//! `0 <= q_i <= x_i` and `sum q_i <= k`, the zero and full-set vectors
//! included, and nothing is pruned or ordered.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::{child_counts, Answer, GameState, Params};

/// Size limits keeping the state space enumerable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_total: u32,
    pub max_lies: usize,
    pub max_cap: u32,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_total: 8,
            max_lies: 2,
            max_cap: 4,
        }
    }
}

pub fn brute_force_oracle(state: &GameState, params: &Params, depth_limit: u32) -> Result<u32> {
    brute_force_oracle_with(state, params, depth_limit, OracleLimits::default())
}

pub fn brute_force_oracle_with(
    state: &GameState,
    params: &Params,
    depth_limit: u32,
    limits: OracleLimits,
) -> Result<u32> {
    state.check_shape(params)?;
    let total = state.total();
    if total > limits.max_total || params.lies > limits.max_lies || params.cap > limits.max_cap {
        return Err(Error::Budget(format!(
            "oracle limited to total <= {}, l <= {}, k <= {}",
            limits.max_total, limits.max_lies, limits.max_cap
        )));
    }
    if total <= 1 {
        return Ok(0);
    }

    let space = all_states(params.width(), total);
    let index: HashMap<&[u32], usize> = space
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let start = index[state.counts()];

    // moves[s] = child index pairs for every menu entry at s
    let mut moves: Vec<Vec<(usize, usize)>> = Vec::with_capacity(space.len());
    let (mut yes, mut no) = (Vec::new(), Vec::new());
    for s in &space {
        let mut here = Vec::new();
        for q in menu(s, params.cap) {
            child_counts(s, &q, Answer::Yes, &mut yes);
            child_counts(s, &q, Answer::No, &mut no);
            here.push((index[yes.as_slice()], index[no.as_slice()]));
        }
        moves.push(here);
    }

    let mut won: Vec<bool> = space.iter().map(|s| s.iter().sum::<u32>() <= 1).collect();
    for depth in 1..=depth_limit {
        let next: Vec<bool> = (0..space.len())
            .map(|s| won[s] || moves[s].iter().any(|&(y, n)| won[y] && won[n]))
            .collect();
        won = next;
        if won[start] {
            return Ok(depth);
        }
    }
    Err(Error::DepthLimit { limit: depth_limit })
}

/// Every count vector of the given width with sum at most `total`.
fn all_states(width: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut buf = vec![0; width];
    fn rec(i: usize, left: u32, buf: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == buf.len() {
            out.push(buf.clone());
            return;
        }
        for x in 0..=left {
            buf[i] = x;
            rec(i + 1, left - x, buf, out);
        }
    }
    rec(0, total, &mut buf, &mut out);
    out
}

/// All `q` with `0 <= q <= counts` componentwise and `sum q <= cap`.
fn menu(counts: &[u32], cap: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut buf = vec![0; counts.len()];
    fn rec(i: usize, left: u32, counts: &[u32], buf: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == counts.len() {
            out.push(buf.clone());
            return;
        }
        for q in 0..=counts[i].min(left) {
            buf[i] = q;
            rec(i + 1, left - q, counts, buf, out);
        }
    }
    rec(0, cap, counts, &mut buf, &mut out);
    out
}
