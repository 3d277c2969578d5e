//! Exact minimax values with memoization.
//!
//! `V(s) = 0` when at most one candidate is live, otherwise
//! `V(s) = 1 + min_q max(V(yes(s, q)), V(no(s, q)))` over admissible queries.
//! Every cached value is exact; pruning only decides which children get
//! evaluated, never what gets stored.

mod cache;
mod oracle;
mod tree;

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

pub use cache::{MemoCache, CACHE_VERSION};
pub use oracle::{brute_force_oracle, brute_force_oracle_with, OracleLimits};
pub use tree::{extract_strategy, StrategyTree};

use crate::bounds::{fast_weight, fast_weight_bound, BoundReport};
use crate::error::{Error, Result};
use crate::game::{child_counts, for_each_query, Answer, GameState, Params, Query};

/// Individually switchable pruning layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Skip the second child once the first already rules the query out.
    pub alpha_cutoff: bool,
    /// Use weight bounds: stop once the state's bound is met and skip queries
    /// whose children's bounds already rule them out.
    pub lower_bound: bool,
    /// Try weight-balanced queries first.
    pub weight_ordering: bool,
    /// Only ask `(k, 0, ..., 0)` when `x_0 >= 2k` (and more than two
    /// candidates are live). Experimental; off by default.
    pub convexity_normalized: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            alpha_cutoff: true,
            lower_bound: true,
            weight_ordering: true,
            convexity_normalized: false,
        }
    }
}

impl SolverOptions {
    /// Plain minimax: every child of every query is evaluated.
    pub fn exhaustive() -> Self {
        SolverOptions {
            alpha_cutoff: false,
            lower_bound: false,
            weight_ordering: false,
            convexity_normalized: false,
        }
    }
}

/// Resource limits; exceeding any of them is a [`Error::Budget`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_total: u32,
    pub max_lies: usize,
    pub max_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_total: 160,
            max_lies: 4,
            max_states: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub value: u32,
    /// Every admissible query whose worse child has value `value - 1`, in
    /// lexicographic order. Empty at terminal states.
    pub optimal_queries: Vec<Query>,
    /// Lexicographically smallest optimal query.
    pub principal: Option<Query>,
}

/// Solver for one `(lies, cap)` family, owning its memo table.
#[derive(Debug)]
pub struct Solver {
    params: Params,
    options: SolverOptions,
    budget: Budget,
    cache: Arc<MemoCache>,
    computed: AtomicUsize,
}

impl Solver {
    pub fn new(params: Params) -> Self {
        Self::with_options(params, SolverOptions::default(), Budget::default())
    }

    pub fn with_options(params: Params, options: SolverOptions, budget: Budget) -> Self {
        Self::with_cache(Arc::new(MemoCache::new(params)), options, budget)
    }

    pub fn with_cache(cache: Arc<MemoCache>, options: SolverOptions, budget: Budget) -> Self {
        Solver {
            params: cache.params(),
            options,
            budget,
            cache,
            computed: AtomicUsize::new(0),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn options(&self) -> SolverOptions {
        self.options
    }

    pub fn cache(&self) -> &Arc<MemoCache> {
        &self.cache
    }

    /// States this solver has evaluated and inserted itself.
    pub fn computed_states(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    fn admit(&self, state: &GameState) -> Result<()> {
        state.check_shape(&self.params)?;
        if self.params.lies > self.budget.max_lies {
            return Err(Error::Budget(format!(
                "{} lies exceed the limit {}",
                self.params.lies, self.budget.max_lies
            )));
        }
        if state.total() > self.budget.max_total {
            return Err(Error::Budget(format!(
                "{} live candidates exceed the limit {}",
                state.total(),
                self.budget.max_total
            )));
        }
        Ok(())
    }

    /// Exact game value of `state`.
    pub fn value(&self, state: &GameState) -> Result<u32> {
        self.admit(state)?;
        self.value_of(state.counts())
    }

    /// Value, every optimal first query and the principal one.
    pub fn solve(&self, state: &GameState) -> Result<SolveResult> {
        let value = self.value(state)?;
        if value == 0 {
            return Ok(SolveResult {
                value,
                optimal_queries: Vec::new(),
                principal: None,
            });
        }
        let optimal_queries = self.optimal_queries(state.counts(), value)?;
        let principal = optimal_queries.first().cloned();
        debug_assert!(
            principal.is_some(),
            "a nonterminal state has an optimal query"
        );
        Ok(SolveResult {
            value,
            optimal_queries,
            principal,
        })
    }

    /// Value of each child of `query` at `state`.
    pub fn child_values(&self, state: &GameState, query: &Query) -> Result<(u32, u32)> {
        self.admit(state)?;
        query.check_against(state)?;
        let yes = state.apply_answer(query, Answer::Yes)?;
        let no = state.apply_answer(query, Answer::No)?;
        Ok((self.value_of(yes.counts())?, self.value_of(no.counts())?))
    }

    fn optimal_queries(&self, counts: &[u32], value: u32) -> Result<Vec<Query>> {
        let target = value - 1;
        let mut menu = Vec::new();
        for_each_query(counts, self.params.cap, |q| menu.push(q.to_vec()));
        let mut out = Vec::new();
        let (mut yes, mut no) = (Vec::new(), Vec::new());
        for q in menu {
            child_counts(counts, &q, Answer::Yes, &mut yes);
            child_counts(counts, &q, Answer::No, &mut no);
            if self.options.lower_bound
                && fast_weight_bound(&yes).max(fast_weight_bound(&no)) > target
            {
                continue;
            }
            if self.value_of(&yes)? > target || self.value_of(&no)? > target {
                continue;
            }
            out.push(Query::new(q));
        }
        Ok(out)
    }

    fn value_of(&self, counts: &[u32]) -> Result<u32> {
        if counts.iter().sum::<u32>() <= 1 {
            return Ok(0);
        }
        if let Some(v) = self.cache.get(counts) {
            return Ok(v);
        }
        let value = self.compute(counts)?;
        let (stored, inserted) = self.cache.insert_if_absent(counts, value);
        debug_assert_eq!(stored, value, "concurrent evaluations disagree");
        if inserted {
            let n = self.computed.fetch_add(1, Ordering::Relaxed) + 1;
            if n.is_multiple_of(1024) && self.cache.len() > self.budget.max_states {
                return Err(Error::Budget(format!(
                    "memo table exceeds {} states",
                    self.budget.max_states
                )));
            }
        }
        Ok(stored)
    }

    fn compute(&self, counts: &[u32]) -> Result<u32> {
        let opts = self.options;
        let width = counts.len();
        let floor = if opts.lower_bound {
            fast_weight_bound(counts).max(1)
        } else {
            1
        };

        let candidates = self.candidates(counts);
        let count = candidates.len() / width;
        let mut order: Vec<Candidate> = Vec::with_capacity(count);
        let mut yes = Vec::with_capacity(width);
        let mut no = Vec::with_capacity(width);
        for i in 0..count {
            let q = &candidates[i * width..(i + 1) * width];
            child_counts(counts, q, Answer::Yes, &mut yes);
            child_counts(counts, q, Answer::No, &mut no);
            let (yes_lb, no_lb) = if opts.lower_bound || opts.weight_ordering {
                (fast_weight_bound(&yes), fast_weight_bound(&no))
            } else {
                (0, 0)
            };
            let imbalance = if opts.weight_ordering {
                let r = floor.saturating_sub(1);
                let wy = fast_weight(&yes, r).unwrap_or(u128::MAX);
                let wn = fast_weight(&no, r).unwrap_or(u128::MAX);
                wy.abs_diff(wn)
            } else {
                0
            };
            order.push(Candidate {
                index: i,
                bound: 1 + yes_lb.max(no_lb),
                imbalance,
                no_first: no_lb >= yes_lb,
            });
        }
        if opts.weight_ordering {
            order.sort_by_key(|c| (c.bound, c.imbalance, c.index));
        }

        let mut best = u32::MAX;
        for cand in &order {
            if opts.lower_bound {
                if best <= floor {
                    break;
                }
                if cand.bound >= best {
                    if opts.weight_ordering {
                        break;
                    }
                    continue;
                }
            }
            let q = &candidates[cand.index * width..(cand.index + 1) * width];
            let (first, second) = if cand.no_first {
                (Answer::No, Answer::Yes)
            } else {
                (Answer::Yes, Answer::No)
            };
            child_counts(counts, q, first, &mut yes);
            let v1 = self.value_of(&yes)?;
            if opts.alpha_cutoff && v1.saturating_add(1) >= best {
                continue;
            }
            child_counts(counts, q, second, &mut no);
            let v2 = self.value_of(&no)?;
            best = best.min(1 + v1.max(v2));
        }
        debug_assert!(best != u32::MAX, "nonterminal state without a usable query");
        Ok(best)
    }

    /// Flat buffer of candidate query vectors.
    fn candidates(&self, counts: &[u32]) -> Vec<u32> {
        let cap = self.params.cap;
        let total: u32 = counts.iter().sum();
        if self.options.convexity_normalized
            && total > 2
            && u64::from(counts[0]) >= 2 * u64::from(cap)
        {
            let mut q = vec![0; counts.len()];
            q[0] = cap;
            return q;
        }
        let mut flat = Vec::new();
        for_each_query(counts, cap, |q| flat.extend_from_slice(q));
        flat
    }
}

struct Candidate {
    index: usize,
    bound: u32,
    imbalance: u128,
    no_first: bool,
}

/// Solves `state` against an existing memo table with default options.
pub fn solve(state: &GameState, cache: Arc<MemoCache>) -> Result<SolveResult> {
    Solver::with_cache(cache, SolverOptions::default(), Budget::default()).solve(state)
}

/// Unrestricted game: any subset may be asked.
pub fn solve_basic(state: &GameState, lies: usize) -> Result<SolveResult> {
    Solver::new(Params::basic(lies)).solve(state)
}

/// Shared pool of solvers, one per `(lies, cap)`, all with the same options
/// and budget. Safe to use from many threads.
#[derive(Debug)]
pub struct Engine {
    options: SolverOptions,
    budget: Budget,
    solvers: Mutex<HashMap<Params, Arc<Solver>>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(SolverOptions::default(), Budget::default())
    }
}

impl Engine {
    pub fn new(options: SolverOptions, budget: Budget) -> Self {
        Engine {
            options,
            budget,
            solvers: Mutex::new(HashMap::new()),
        }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn solver(&self, params: Params) -> Arc<Solver> {
        let mut map = self.solvers.lock().expect("solver pool poisoned");
        map.entry(params)
            .or_insert_with(|| Arc::new(Solver::with_options(params, self.options, self.budget)))
            .clone()
    }

    /// Registers a preloaded memo table; replaces any solver for its params.
    pub fn adopt_cache(&self, cache: Arc<MemoCache>) -> Arc<Solver> {
        let solver = Arc::new(Solver::with_cache(cache, self.options, self.budget));
        self.solvers
            .lock()
            .expect("solver pool poisoned")
            .insert(solver.params(), solver.clone());
        solver
    }

    pub fn value(&self, state: &GameState, params: Params) -> Result<u32> {
        self.solver(params).value(state)
    }

    pub fn solve(&self, state: &GameState, params: Params) -> Result<SolveResult> {
        self.solver(params).solve(state)
    }

    pub fn basic_value(&self, lies: usize, state: &GameState) -> Result<u32> {
        self.value(state, Params::basic(lies))
    }

    /// Bound report for `(n, k, lies)` with `exact` filled in when the
    /// restricted solve fits the budget.
    pub fn bound_report(&self, n: u64, k: u64, lies: usize) -> Result<BoundReport> {
        let eval = |l: usize, s: &GameState| self.basic_value(l, s);
        let mut report = BoundReport::compute(n, k, lies, &eval)?;
        let params = Params::new(lies, k as u32)?;
        report.exact = match self.value(&GameState::initial(n as u32, lies), params) {
            Ok(v) => Some(v),
            Err(Error::Budget(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(report)
    }

    /// Total memo entries across every solver in the pool.
    pub fn cached_states(&self) -> usize {
        self.solvers
            .lock()
            .expect("solver pool poisoned")
            .values()
            .map(|s| s.cache().len())
            .sum()
    }
}
