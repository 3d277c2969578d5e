//! Questioner and Responder policies and a game driver producing transcripts.

mod board;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use board::ElementBoard;

use crate::bounds::{fast_weight, fast_weight_bound};
use crate::error::{Error, Result};
use crate::game::{max_query_size, Answer, GameState, Params, Query};
use crate::solver::Solver;

/// Fill components in increasing index order up to `min(k, total - 1)`.
pub fn greedy_lowest(state: &GameState, params: &Params) -> Query {
    fill_lowest(state, max_query_size(state.total(), params.cap))
}

/// `q_i = min{x_i, k - sum_{j<i} x_j}`, clamped at zero: the best question
/// when the next answer is known to be NO. May ask every live candidate.
pub fn forced_no_query(state: &GameState, params: &Params) -> Query {
    let mut before = 0u64;
    let asks = state
        .counts()
        .iter()
        .map(|&x| {
            let room = u64::from(params.cap).saturating_sub(before);
            before += u64::from(x);
            u64::from(x).min(room) as u32
        })
        .collect();
    Query::new(asks)
}

/// `(k, 0, ..., 0)`, optimal whenever `x_0 >= 2k`.
pub fn block_query(state: &GameState, params: &Params) -> Result<Query> {
    let x0 = state.counts()[0];
    if u64::from(x0) < 2 * u64::from(params.cap) {
        return Err(Error::Domain(format!(
            "block query needs x_0 >= 2k, got x_0={x0} k={}",
            params.cap
        )));
    }
    let mut asks = vec![0; state.counts().len()];
    asks[0] = params.cap;
    Ok(Query::new(asks))
}

fn fill_lowest(state: &GameState, mut budget: u32) -> Query {
    let asks = state
        .counts()
        .iter()
        .map(|&x| {
            let take = x.min(budget);
            budget -= take;
            take
        })
        .collect();
    Query::new(asks)
}

/// One round of a played game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub query: Query,
    pub answer: Answer,
    pub after: GameState,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub start: GameState,
    pub moves: Vec<Move>,
    pub outcome: GameState,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn answers(&self) -> Vec<Answer> {
        self.moves.iter().map(|m| m.answer).collect()
    }

    /// Replays the moves on an element board built from `start`.
    pub fn final_board(&self) -> Result<ElementBoard> {
        let mut board = ElementBoard::from_state(&self.start);
        for m in &self.moves {
            let asked: BTreeSet<usize> = board.select(&m.query)?.into_iter().collect();
            board.apply(&asked, m.answer);
        }
        Ok(board)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TranscriptJson::from(self)).expect("transcript serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct MoveJson {
    q: String,
    a: Answer,
    state: String,
}

#[derive(Serialize, Deserialize)]
struct TranscriptJson {
    start: String,
    moves: Vec<MoveJson>,
    length: usize,
}

impl From<&Transcript> for TranscriptJson {
    fn from(t: &Transcript) -> Self {
        TranscriptJson {
            start: t.start.to_string(),
            moves: t
                .moves
                .iter()
                .map(|m| MoveJson {
                    q: m.query.to_string(),
                    a: m.answer,
                    state: m.after.to_string(),
                })
                .collect(),
            length: t.moves.len(),
        }
    }
}

impl Serialize for Transcript {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TranscriptJson::from(self).serialize(serializer)
    }
}

/// Picks the next question. `history` holds the moves played so far.
pub trait Questioner {
    fn name(&self) -> String;
    fn ask(&self, state: &GameState, params: &Params, history: &[Move]) -> Result<Query>;
}

/// What a Responder sees when answering.
#[derive(Debug, Clone)]
pub struct ResponderView<'a> {
    pub state: &'a GameState,
    pub params: &'a Params,
    pub query: &'a Query,
    /// 0-based index of the question being answered.
    pub round: usize,
    /// Element ids the question realises on the driver's board.
    pub asked: &'a BTreeSet<usize>,
}

pub trait Responder {
    fn name(&self) -> String;
    fn respond(&self, view: &ResponderView<'_>) -> Result<Answer>;
}

pub struct GreedyLowest;

impl Questioner for GreedyLowest {
    fn name(&self) -> String {
        "greedy-lowest".into()
    }

    fn ask(&self, state: &GameState, params: &Params, _: &[Move]) -> Result<Query> {
        Ok(greedy_lowest(state, params))
    }
}

/// Solver-backed principal query.
pub struct OptimalQuestioner {
    solver: Arc<Solver>,
}

pub fn optimal_policy(solver: Arc<Solver>) -> OptimalQuestioner {
    OptimalQuestioner { solver }
}

impl Questioner for OptimalQuestioner {
    fn name(&self) -> String {
        "optimal".into()
    }

    fn ask(&self, state: &GameState, _: &Params, _: &[Move]) -> Result<Query> {
        let result = self.solver.solve(state)?;
        result.principal.ok_or_else(|| Error::Policy {
            policy: self.name(),
            message: format!("no query at terminal state {state}"),
        })
    }
}

/// Greedy lowest-first asking until the first YES, or until only the last
/// component is live; optimal play from then on.
pub struct GreedyThenOptimal {
    solver: Arc<Solver>,
}

pub fn greedy_then_optimal(solver: Arc<Solver>) -> GreedyThenOptimal {
    GreedyThenOptimal { solver }
}

impl Questioner for GreedyThenOptimal {
    fn name(&self) -> String {
        "greedy-then-optimal".into()
    }

    fn ask(&self, state: &GameState, params: &Params, history: &[Move]) -> Result<Query> {
        let counts = state.counts();
        let endgame = counts[..counts.len() - 1].iter().all(|&x| x == 0);
        let saw_yes = history.iter().any(|m| m.answer == Answer::Yes);
        if endgame || saw_yes {
            optimal_policy(self.solver.clone()).ask(state, params, history)
        } else {
            Ok(greedy_lowest(state, params))
        }
    }
}

/// Answers so the game lasts as long as possible; NO on ties.
pub struct AdversaryResponder {
    solver: Arc<Solver>,
}

pub fn adversary_policy(solver: Arc<Solver>) -> AdversaryResponder {
    AdversaryResponder { solver }
}

impl Responder for AdversaryResponder {
    fn name(&self) -> String {
        "adversary".into()
    }

    fn respond(&self, view: &ResponderView<'_>) -> Result<Answer> {
        let (yes, no) = self.solver.child_values(view.state, view.query)?;
        Ok(if yes > no { Answer::Yes } else { Answer::No })
    }
}

/// Keeps the heavier child by weight, which preserves the weight bound
/// minus one at every step. NO on ties.
pub struct WeightAdversary;

pub fn weight_adversary() -> WeightAdversary {
    WeightAdversary
}

impl Responder for WeightAdversary {
    fn name(&self) -> String {
        "weight-adversary".into()
    }

    fn respond(&self, view: &ResponderView<'_>) -> Result<Answer> {
        let bound = fast_weight_bound(view.state.counts());
        let yes = view.state.apply_answer(view.query, Answer::Yes)?;
        let no = view.state.apply_answer(view.query, Answer::No)?;
        if bound < 2 {
            return Ok(Answer::No);
        }
        let r = bound - 2;
        let wy = fast_weight(yes.counts(), r).unwrap_or(u128::MAX);
        let wn = fast_weight(no.counts(), r).unwrap_or(u128::MAX);
        Ok(if wy > wn { Answer::Yes } else { Answer::No })
    }
}

/// Plays a fixed answer list, round by round.
pub struct ScriptedResponder {
    answers: Vec<Answer>,
}

pub fn scripted_responder(answers: Vec<Answer>) -> ScriptedResponder {
    ScriptedResponder { answers }
}

impl Responder for ScriptedResponder {
    fn name(&self) -> String {
        "scripted".into()
    }

    fn respond(&self, view: &ResponderView<'_>) -> Result<Answer> {
        self.answers
            .get(view.round)
            .copied()
            .ok_or_else(|| Error::Policy {
                policy: self.name(),
                message: format!("script exhausted after {} answers", self.answers.len()),
            })
    }
}

/// Always NO.
pub struct NoSayer;

impl Responder for NoSayer {
    fn name(&self) -> String {
        "all-no".into()
    }

    fn respond(&self, _: &ResponderView<'_>) -> Result<Answer> {
        Ok(Answer::No)
    }
}

/// Thinks of `secret` and answers truthfully except on `lie_rounds`.
pub struct HonestResponder {
    secret: usize,
    lie_rounds: BTreeSet<usize>,
}

pub fn honest_responder(
    secret: usize,
    lie_rounds: BTreeSet<usize>,
    lie_budget: usize,
) -> Result<HonestResponder> {
    if lie_rounds.len() > lie_budget {
        return Err(Error::Domain(format!(
            "{} planned lies exceed the budget {lie_budget}",
            lie_rounds.len()
        )));
    }
    Ok(HonestResponder { secret, lie_rounds })
}

impl HonestResponder {
    /// The secret must be the one candidate left standing.
    pub fn check_outcome(&self, transcript: &Transcript) -> Result<()> {
        let board = transcript.final_board()?;
        let live = board.live();
        if live != [self.secret] {
            return Err(Error::Policy {
                policy: self.name(),
                message: format!(
                    "secret {} but the game ended with candidates {live:?}",
                    self.secret
                ),
            });
        }
        Ok(())
    }
}

impl Responder for HonestResponder {
    fn name(&self) -> String {
        format!("honest(secret={})", self.secret)
    }

    fn respond(&self, view: &ResponderView<'_>) -> Result<Answer> {
        let truth = if view.asked.contains(&self.secret) {
            Answer::Yes
        } else {
            Answer::No
        };
        Ok(if self.lie_rounds.contains(&view.round) {
            truth.flip()
        } else {
            truth
        })
    }
}

/// Plays `questioner` against `responder` from `start` until one candidate
/// (or none) is left.
pub fn simulate(
    questioner: &dyn Questioner,
    responder: &dyn Responder,
    start: &GameState,
    params: &Params,
) -> Result<Transcript> {
    start.check_shape(params)?;
    let mut board = ElementBoard::from_state(start);
    let mut state = start.clone();
    let mut moves: Vec<Move> = Vec::new();
    while !state.is_terminal() {
        let query = questioner.ask(&state, params, &moves)?;
        query
            .check_admissible(&state, params)
            .map_err(|e| Error::Policy {
                policy: questioner.name(),
                message: e.to_string(),
            })?;
        let asked: BTreeSet<usize> = board.select(&query)?.into_iter().collect();
        let answer = responder.respond(&ResponderView {
            state: &state,
            params,
            query: &query,
            round: moves.len(),
            asked: &asked,
        })?;
        board.apply(&asked, answer);
        let after = state.apply_answer(&query, answer)?;
        debug_assert_eq!(board.state().counts(), after.counts());
        moves.push(Move {
            query,
            answer,
            after: after.clone(),
        });
        state = after;
    }
    Ok(Transcript {
        start: start.clone(),
        moves,
        outcome: state,
    })
}
