use serde_json::{json, Value};

use super::Solver;
use crate::error::{Error, Result};
use crate::game::{Answer, GameState, Query};

const MAX_NODES: usize = 1 << 20;

/// Decision tree following the principal query at every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyTree {
    Leaf(GameState),
    Node {
        state: GameState,
        query: Query,
        yes: Box<StrategyTree>,
        no: Box<StrategyTree>,
    },
}

impl StrategyTree {
    pub fn state(&self) -> &GameState {
        match self {
            StrategyTree::Leaf(s) => s,
            StrategyTree::Node { state, .. } => state,
        }
    }

    pub fn depth(&self) -> u32 {
        match self {
            StrategyTree::Leaf(_) => 0,
            StrategyTree::Node { yes, no, .. } => 1 + yes.depth().max(no.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            StrategyTree::Leaf(_) => 1,
            StrategyTree::Node { yes, no, .. } => 1 + yes.node_count() + no.node_count(),
        }
    }

    /// Length of every root-to-leaf path, YES branch first.
    pub fn path_lengths(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_paths(0, &mut out);
        out
    }

    fn collect_paths(&self, depth: u32, out: &mut Vec<u32>) {
        match self {
            StrategyTree::Leaf(_) => out.push(depth),
            StrategyTree::Node { yes, no, .. } => {
                yes.collect_paths(depth + 1, out);
                no.collect_paths(depth + 1, out);
            }
        }
    }

    pub fn leaves(&self) -> Vec<&GameState> {
        match self {
            StrategyTree::Leaf(s) => vec![s],
            StrategyTree::Node { yes, no, .. } => {
                let mut v = yes.leaves();
                v.extend(no.leaves());
                v
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            StrategyTree::Leaf(s) => json!({ "state": s.to_string() }),
            StrategyTree::Node {
                state,
                query,
                yes,
                no,
            } => json!({
                "state": state.to_string(),
                "q": query.to_string(),
                "yes": yes.to_json(),
                "no": no.to_json(),
            }),
        }
    }
}

/// Builds the principal-query decision tree from `state`.
pub fn extract_strategy(solver: &Solver, state: &GameState) -> Result<StrategyTree> {
    let mut budget = MAX_NODES;
    build(solver, state.clone(), &mut budget)
}

fn build(solver: &Solver, state: GameState, budget: &mut usize) -> Result<StrategyTree> {
    if *budget == 0 {
        return Err(Error::Budget(format!(
            "strategy tree exceeds {MAX_NODES} nodes"
        )));
    }
    *budget -= 1;
    let result = solver.solve(&state)?;
    let Some(query) = result.principal else {
        return Ok(StrategyTree::Leaf(state));
    };
    let yes = build(solver, state.apply_answer(&query, Answer::Yes)?, budget)?;
    let no = build(solver, state.apply_answer(&query, Answer::No)?, budget)?;
    Ok(StrategyTree::Node {
        state,
        query,
        yes: Box::new(yes),
        no: Box::new(no),
    })
}
