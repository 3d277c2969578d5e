//! State and query model of the liar game with bounded query sets.
//!
//! A position is a Berlekamp vector `(x_0, ..., x_l)` where `x_i` counts the
//! candidates that have collected exactly `i` NO answers. A question is a
//! vector `(q_0, ..., q_l)` saying how many candidates of each component are
//! asked. Candidates that collect `l + 1` NO answers fall out of the search and
//! are only kept as a bookkeeping counter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lie budget and query-size cap of one game family.
///
/// A cap at least as large as the number of live candidates models the
/// unrestricted game; [`Params::basic`] uses `u32::MAX` for that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Params {
    pub lies: usize,
    pub cap: u32,
}

impl Params {
    pub fn new(lies: usize, cap: u32) -> Result<Self> {
        if cap == 0 {
            return Err(Error::Domain("query cap must be at least 1".into()));
        }
        Ok(Params { lies, cap })
    }

    /// The unrestricted game: any subset may be asked.
    pub fn basic(lies: usize) -> Self {
        Params {
            lies,
            cap: u32::MAX,
        }
    }

    pub fn is_basic(&self) -> bool {
        self.cap == u32::MAX
    }

    /// Number of components of a state in this family.
    pub fn width(&self) -> usize {
        self.lies + 1
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_basic() {
            write!(f, "l={} k=unbounded", self.lies)
        } else {
            write!(f, "l={} k={}", self.lies, self.cap)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Answer {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

impl Answer {
    pub const BOTH: [Answer; 2] = [Answer::Yes, Answer::No];

    pub fn flip(self) -> Answer {
        match self {
            Answer::Yes => Answer::No,
            Answer::No => Answer::Yes,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        })
    }
}

impl FromStr for Answer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "y" | "yes" => Ok(Answer::Yes),
            "n" | "no" => Ok(Answer::No),
            other => Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("expected YES or NO, got `{other}`"),
            }),
        }
    }
}

/// Berlekamp state vector plus the number of candidates already ruled out.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameState {
    counts: Vec<u32>,
    excluded: u32,
}

impl GameState {
    pub fn new(counts: Vec<u32>) -> Self {
        GameState {
            counts,
            excluded: 0,
        }
    }

    pub fn with_excluded(counts: Vec<u32>, excluded: u32) -> Self {
        GameState { counts, excluded }
    }

    /// Starting position `(n, 0, ..., 0)`.
    pub fn initial(n: u32, lies: usize) -> Self {
        let mut counts = vec![0; lies + 1];
        counts[0] = n;
        GameState::new(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn excluded(&self) -> u32 {
        self.excluded
    }

    pub fn lies(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn is_terminal(&self) -> bool {
        is_terminal_counts(&self.counts)
    }

    /// `sum_i (l + 1 - i) * x_i`; strictly decreases along every admissible move.
    pub fn potential(&self) -> u64 {
        let width = self.counts.len() as u64;
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &x)| (width - i as u64) * u64::from(x))
            .sum()
    }

    pub fn check_shape(&self, params: &Params) -> Result<()> {
        if self.counts.len() != params.width() {
            return Err(Error::Shape {
                expected: params.width(),
                got: self.counts.len(),
            });
        }
        Ok(())
    }

    pub fn apply_answer(&self, query: &Query, answer: Answer) -> Result<GameState> {
        query.check_against(self)?;
        let mut next = Vec::with_capacity(self.counts.len());
        let dropped = child_counts(&self.counts, &query.asks, answer, &mut next);
        Ok(GameState {
            counts: next,
            excluded: self.excluded + dropped,
        })
    }

    /// Moves one candidate from component `from` to component `to`; `to`
    /// equal to the number of components drops it into the excluded pile.
    pub fn shift_relax(&self, from: usize, to: usize) -> Result<GameState> {
        let width = self.counts.len();
        if from >= to || to > width {
            return Err(Error::Domain(format!(
                "shift needs from < to <= {width}, got {from} -> {to}"
            )));
        }
        if self.counts[from] == 0 {
            return Err(Error::EmptyComponent { index: from });
        }
        let mut next = self.clone();
        next.counts[from] -= 1;
        if to == width {
            next.excluded += 1;
        } else {
            next.counts[to] += 1;
        }
        Ok(next)
    }

    /// Admissible queries in lexicographic order.
    pub fn queries(&self, params: &Params) -> Vec<Query> {
        enumerate_queries(self, params)
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_literal(f, &self.counts)
    }
}

impl FromStr for GameState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_literal(s).map(GameState::new)
    }
}

/// Per-component question sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Query {
    asks: Vec<u32>,
}

impl Query {
    pub fn new(asks: Vec<u32>) -> Self {
        Query { asks }
    }

    pub fn asks(&self) -> &[u32] {
        &self.asks
    }

    pub fn size(&self) -> u32 {
        self.asks.iter().sum()
    }

    /// Componentwise `q_i <= x_i` with matching shapes.
    pub fn check_against(&self, state: &GameState) -> Result<()> {
        if self.asks.len() != state.counts.len() {
            return Err(Error::Shape {
                expected: state.counts.len(),
                got: self.asks.len(),
            });
        }
        if let Some(i) = (0..self.asks.len()).find(|&i| self.asks[i] > state.counts[i]) {
            return Err(Error::InvalidQuery {
                state: state.to_string(),
                query: self.to_string(),
                reason: format!(
                    "asks {} from component {i} which holds {}",
                    self.asks[i], state.counts[i]
                ),
            });
        }
        Ok(())
    }

    /// Solver admissibility: componentwise fit and `1 <= size <= min(k, total - 1)`.
    pub fn check_admissible(&self, state: &GameState, params: &Params) -> Result<()> {
        self.check_against(state)?;
        let size = self.size();
        let limit = max_query_size(state.total(), params.cap);
        if size == 0 || size > limit {
            return Err(Error::InvalidQuery {
                state: state.to_string(),
                query: self.to_string(),
                reason: format!("size {size} outside 1..={limit} (cap {})", params.cap),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_literal(f, &self.asks)
    }
}

impl FromStr for Query {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_literal(s).map(Query::new)
    }
}

pub fn is_terminal_counts(counts: &[u32]) -> bool {
    counts.iter().sum::<u32>() <= 1
}

/// Largest admissible question at a state with `total` live candidates.
pub fn max_query_size(total: u32, cap: u32) -> u32 {
    cap.min(total.saturating_sub(1))
}

/// Writes the successor of `counts` under `asks`/`answer` into `out` and
/// returns how many candidates were excluded by the move.
pub fn child_counts(counts: &[u32], asks: &[u32], answer: Answer, out: &mut Vec<u32>) -> u32 {
    let last = counts.len() - 1;
    out.clear();
    match answer {
        Answer::Yes => {
            // unasked candidates collect a NO
            out.push(asks[0]);
            for i in 1..=last {
                out.push(asks[i] + (counts[i - 1] - asks[i - 1]));
            }
            counts[last] - asks[last]
        }
        Answer::No => {
            out.push(counts[0] - asks[0]);
            for i in 1..=last {
                out.push((counts[i] - asks[i]) + asks[i - 1]);
            }
            asks[last]
        }
    }
}

/// Every admissible query at `state`, lexicographic with `q_0` most significant.
/// Terminal states have none.
pub fn enumerate_queries(state: &GameState, params: &Params) -> Vec<Query> {
    let mut out = Vec::new();
    for_each_query(state.counts(), params.cap, |q| {
        out.push(Query::new(q.to_vec()))
    });
    out
}

/// Calls `visit` on each admissible query vector in lexicographic order.
pub fn for_each_query<F: FnMut(&[u32])>(counts: &[u32], cap: u32, mut visit: F) {
    let limit = max_query_size(counts.iter().sum(), cap);
    if limit == 0 {
        return;
    }
    let mut buf = vec![0u32; counts.len()];
    fill_queries(counts, 0, 0, limit, &mut buf, &mut visit);
}

fn fill_queries<F: FnMut(&[u32])>(
    counts: &[u32],
    index: usize,
    used: u32,
    limit: u32,
    buf: &mut [u32],
    visit: &mut F,
) {
    if index == counts.len() {
        if used >= 1 {
            visit(buf);
        }
        return;
    }
    let top = counts[index].min(limit - used);
    for q in 0..=top {
        buf[index] = q;
        fill_queries(counts, index + 1, used + q, limit, buf, visit);
    }
    buf[index] = 0;
}

fn write_literal(f: &mut fmt::Formatter<'_>, values: &[u32]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// Parses `"x0,x1,...,xl"`; errors point at the 1-based column of the bad field.
pub fn parse_literal(s: &str) -> Result<Vec<u32>> {
    parse_literal_at(s, 1)
}

pub(crate) fn parse_literal_at(s: &str, line: usize) -> Result<Vec<u32>> {
    if s.is_empty() {
        return Err(Error::Parse {
            line,
            column: 1,
            message: "empty literal".into(),
        });
    }
    let mut values = Vec::new();
    let mut column = 1;
    for field in s.split(',') {
        if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse {
                line,
                column,
                message: format!("expected a decimal count, got `{field}`"),
            });
        }
        let value = field.parse::<u32>().map_err(|e| Error::Parse {
            line,
            column,
            message: e.to_string(),
        })?;
        values.push(value);
        column += field.len() + 1;
    }
    Ok(values)
}
