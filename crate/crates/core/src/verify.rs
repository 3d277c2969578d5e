//! Executable checks of the game's structural results over enumerated
//! instance ranges. Each check derives both sides of its relation on its own
//! and reports every violated instance as a witness.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    check_restricted_domain, conjecture_quantities, ru0k_exact, ru_estimate, ruk1_exact,
    state_weight, weight_bound, ConjectureQuantities,
};
use crate::error::{Error, Result};
use crate::game::{child_counts, Answer, GameState, Params, Query};
use crate::solver::{brute_force_oracle, Engine};
use crate::strategies::{block_query, forced_no_query};

/// One violated instance: the inputs and both sides of the relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub input: String,
    pub relation: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub range: String,
    pub instances: u64,
    /// Instances outside the result's hypotheses, counted but not tested.
    pub skipped: u64,
    pub failures: Vec<Witness>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(name: &str, range: String) -> Self {
        CheckReport {
            name: name.into(),
            range,
            instances: 0,
            skipped: 0,
            failures: Vec::new(),
            passed: true,
            notes: Vec::new(),
        }
    }

    fn expect(
        &mut self,
        ok: bool,
        input: impl FnOnce() -> String,
        relation: &str,
        lhs: impl ToString,
        rhs: impl ToString,
    ) {
        self.instances += 1;
        if !ok {
            self.failures.push(Witness {
                input: input(),
                relation: relation.into(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.failures.is_empty();
        self
    }
}

/// Enumeration limits. Restricted-game checks cover every `l <= max_lies`,
/// `k <= max_cap` and state with at most `max_total` candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub max_total: u32,
    pub max_lies: usize,
    pub max_cap: u32,
    pub oracle_total: u32,
    pub sandwich_n: u64,
    pub sandwich_caps: Vec<u64>,
    pub sandwich_lies: Vec<usize>,
    /// Extra `(n, k, l)` triples for the lower-bound sandwiches.
    pub sandwich_extra: Vec<(u64, u64, usize)>,
    pub weight_n: u64,
    pub estimate_n: u64,
    pub closed_form_n: u64,
    pub single_query_n: u64,
    /// `(k, n)` pairs whose optimal-play states are tabulated against the
    /// one-lie conjecture.
    pub conjecture_grid: Vec<(u32, u32)>,
    /// Check names or name prefixes to run; empty runs everything.
    pub only: Vec<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let mut grid = vec![(16, 56)];
        for k in 2..=4 {
            for n in (2 * k + 1)..=12 {
                grid.push((k, n));
            }
        }
        VerifyConfig {
            max_total: 8,
            max_lies: 2,
            max_cap: 3,
            oracle_total: 6,
            sandwich_n: 24,
            sandwich_caps: vec![2, 3],
            sandwich_lies: vec![1, 2],
            sandwich_extra: vec![(56, 16, 1)],
            weight_n: 40,
            estimate_n: 40,
            closed_form_n: 64,
            single_query_n: 8,
            conjecture_grid: grid,
            only: Vec::new(),
        }
    }
}

impl VerifyConfig {
    /// Applies a `key=value` override. `total` also caps the oracle range.
    pub fn set_budget(&mut self, spec: &str) -> Result<()> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("budget override `{spec}` is not key=value")))?;
        let num: u64 = value
            .trim()
            .parse()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| {
                Error::Domain(format!(
                    "budget `{key}` needs a positive integer, got `{value}`"
                ))
            })?;
        let small = |v: u64| -> Result<u32> {
            u32::try_from(v).map_err(|_| Error::Domain(format!("budget `{key}` too large")))
        };
        match key.trim() {
            "total" => {
                self.max_total = small(num)?;
                self.oracle_total = self.oracle_total.min(self.max_total);
            }
            "lies" => self.max_lies = num as usize,
            "cap" => self.max_cap = small(num)?,
            "oracle-total" => self.oracle_total = small(num)?,
            "sandwich-n" => self.sandwich_n = num,
            "weight-n" => self.weight_n = num,
            "estimate-n" => self.estimate_n = num,
            "closed-form-n" => self.closed_form_n = num,
            "single-query-n" => self.single_query_n = num,
            other => return Err(Error::Domain(format!("unknown budget key `{other}`"))),
        }
        Ok(())
    }

    fn selects(&self, name: &str) -> bool {
        self.only.is_empty()
            || self
                .only
                .iter()
                .any(|o| name == o || name.starts_with(&format!("{o}-")))
    }

    fn core_range(&self) -> String {
        format!(
            "l<={} k<={} total<={}",
            self.max_lies, self.max_cap, self.max_total
        )
    }
}

type CheckFn = fn(&Engine, &VerifyConfig) -> Result<CheckReport>;

/// Every check, in report order.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("convexity-restricted", check_convexity_restricted),
    ("convexity-basic", check_convexity_basic),
    ("end-of-game", check_end_of_game),
    ("one-more-lie", check_one_more_lie),
    ("one-question-diff", check_one_question_diff),
    ("forced-no", check_forced_no),
    ("block-question", check_block_question),
    ("weight-identity", check_weight_identity),
    ("weight-bound", check_weight_bound),
    ("log-estimate", check_log_estimate),
    ("lower-bounds", check_lower_bounds),
    ("closed-forms", check_closed_forms),
    ("oracle", check_oracle),
    ("monotonicity", check_monotonicity),
    ("conjecture", reproduce_counterexample),
    ("conjecture-table", check_conjecture_table),
];

/// Which checks exercise each structural result.
pub const COVERAGE: &[(&str, &[&str])] = &[
    (
        "convexity lemma, bounded queries",
        &["convexity-restricted"],
    ),
    (
        "convexity lemma, unrestricted queries",
        &["convexity-basic"],
    ),
    ("weight bound sandwich", &["weight-bound"]),
    (
        "logarithmic estimate of the unrestricted value",
        &["log-estimate"],
    ),
    ("end-of-game forcing", &["end-of-game"]),
    ("forced-NO optimal query", &["forced-no"]),
    ("one more lie costs floor(n/k) questions", &["one-more-lie"]),
    ("block question optimal when x0 >= 2k", &["block-question"]),
    ("one-question difference", &["one-question-diff"]),
    ("weight splitting identity", &["weight-identity"]),
    ("lower bound L and its upper sandwich", &["lower-bounds"]),
    ("weight-based lower bound", &["lower-bounds"]),
    ("two-component lower bound", &["lower-bounds"]),
    ("exact value for large n", &["lower-bounds"]),
    ("bounded and single-element closed forms", &["closed-forms"]),
    (
        "one-lie optimal query conjecture and its counterexample",
        &["conjecture", "conjecture-table"],
    ),
];

/// Runs the selected checks concurrently; reports come back in table order.
pub fn run(engine: &Engine, config: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let selected: Vec<&(&str, CheckFn)> =
        CHECKS.iter().filter(|(n, _)| config.selects(n)).collect();
    if selected.is_empty() {
        return Err(Error::Domain(format!("no check matches {:?}", config.only)));
    }
    selected
        .par_iter()
        .map(|(_, f)| f(engine, config))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// Every count vector of `width` components with at most `max_total`
/// candidates, in lexicographic order.
pub fn enumerate_states(width: usize, max_total: u32) -> Vec<GameState> {
    fn rec(i: usize, left: u32, buf: &mut Vec<u32>, out: &mut Vec<GameState>) {
        if i == buf.len() {
            out.push(GameState::new(buf.clone()));
            return;
        }
        for x in 0..=left {
            buf[i] = x;
            rec(i + 1, left - x, buf, out);
        }
    }
    let mut out = Vec::new();
    rec(0, max_total, &mut vec![0; width], &mut out);
    out
}

/// All `q` with `0 <= q_i <= x_i` and `sum q <= limit`, the empty and full
/// questions included.
fn all_subqueries(counts: &[u32], limit: u32) -> Vec<Query> {
    fn rec(i: usize, left: u32, counts: &[u32], buf: &mut Vec<u32>, out: &mut Vec<Query>) {
        if i == counts.len() {
            out.push(Query::new(buf.clone()));
            return;
        }
        for q in 0..=counts[i].min(left) {
            buf[i] = q;
            rec(i + 1, left - q, counts, buf, out);
        }
    }
    let mut out = Vec::new();
    rec(0, limit, counts, &mut vec![0; counts.len()], &mut out);
    out
}

fn restricted_families(config: &VerifyConfig, min_lies: usize) -> Vec<Params> {
    let mut out = Vec::new();
    for lies in min_lies..=config.max_lies {
        for cap in 1..=config.max_cap {
            out.push(Params { lies, cap });
        }
    }
    out
}

fn label(params: &Params, state: &GameState) -> String {
    format!("{params} state={state}")
}

/// Moves one candidate from `i` to `i - a` and one from `j` to `j + a`
/// (`j + a` past the last component means excluded).
fn convexity_move(counts: &[u32], i: usize, j: usize, a: usize) -> Option<GameState> {
    let mut c = counts.to_vec();
    c[i] = c[i].checked_sub(1)?;
    c[j] = c[j].checked_sub(1)?;
    c[i - a] += 1;
    let mut excluded = 0;
    if j + a < c.len() {
        c[j + a] += 1;
    } else {
        excluded = 1;
    }
    Some(GameState::with_excluded(c, excluded))
}

fn convexity(
    engine: &Engine,
    config: &VerifyConfig,
    name: &str,
    families: Vec<Params>,
) -> Result<CheckReport> {
    let range = if families.iter().all(Params::is_basic) {
        format!(
            "unrestricted l<={} total<={}",
            config.max_lies, config.max_total
        )
    } else {
        config.core_range()
    };
    let mut report = CheckReport::new(name, range);
    for params in families {
        let lies = params.lies;
        for state in enumerate_states(params.width(), config.max_total) {
            let x = state.counts();
            for i in 1..=lies {
                for j in i..=lies {
                    if x[i] == 0 || x[j] == 0 {
                        continue;
                    }
                    for a in 1..=i.min(lies - j + 1) {
                        let Some(moved) = convexity_move(x, i, j, a) else {
                            continue;
                        };
                        if state.total() == 2 && a == lies - j + 1 {
                            report.skipped += 1;
                            continue;
                        }
                        let lhs = engine.value(&state, params)?;
                        let rhs = engine.value(&moved, params)?;
                        report.expect(
                            lhs <= rhs,
                            || {
                                format!(
                                    "{} i={i} j={j} a={a} moved={moved}",
                                    label(&params, &state)
                                )
                            },
                            "RU(state) <= RU(moved)",
                            lhs,
                            rhs,
                        );
                    }
                }
            }
        }
    }
    Ok(report.finish())
}

pub fn check_convexity_restricted(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    convexity(
        engine,
        config,
        "convexity-restricted",
        restricted_families(config, 1),
    )
}

pub fn check_convexity_basic(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let families = (1..=config.max_lies).map(Params::basic).collect();
    convexity(engine, config, "convexity-basic", families)
}

/// One candidate in component `i`, `a` in the last: the Responder forces
/// `l - i + 1` more questions (one when `i = l`).
pub fn check_end_of_game(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new(
        "end-of-game",
        format!("{} (plus unrestricted)", config.core_range()),
    );
    let mut families = restricted_families(config, 1);
    families.extend((1..=config.max_lies).map(Params::basic));
    for params in families {
        let lies = params.lies;
        for i in 0..=lies {
            for a in 1..config.max_total {
                let mut counts = vec![0; lies + 1];
                counts[i] += 1;
                counts[lies] += a;
                let state = GameState::new(counts);
                let value = engine.value(&state, params)?;
                let need = (lies - i + 1).max(1) as u32;
                report.expect(
                    value >= need,
                    || label(&params, &state),
                    "RU(state) >= l-i+1",
                    value,
                    need,
                );
            }
        }
    }
    Ok(report.finish())
}

pub fn check_one_more_lie(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new("one-more-lie", config.core_range());
    for lies in 0..config.max_lies {
        for cap in 1..=config.max_cap {
            // one candidate needs no question, so nothing is forced
            report.skipped += 1;
            for n in 2..=config.max_total {
                let fewer = engine.value(&GameState::initial(n, lies), Params { lies, cap })?;
                let more = engine.value(
                    &GameState::initial(n, lies + 1),
                    Params {
                        lies: lies + 1,
                        cap,
                    },
                )?;
                let need = fewer + n / cap;
                report.expect(
                    more >= need,
                    || format!("n={n} k={cap} l={lies}"),
                    "RU_{l+1}(n) >= RU_l(n) + floor(n/k)",
                    more,
                    need,
                );
            }
        }
    }
    Ok(report.finish())
}

fn two_block(first: u32, rest: u32, lies: usize) -> GameState {
    let mut counts = vec![0; lies + 1];
    counts[0] = first;
    if lies >= 1 {
        counts[1] = rest;
        GameState::new(counts)
    } else {
        GameState::with_excluded(counts, rest)
    }
}

/// Unrestricted game: `RU(y, n-y, 0..) - RU(x, n-x, 0..) <= 1` for `0 < x < y <= 2x`.
pub fn check_one_question_diff(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new(
        "one-question-diff",
        format!(
            "unrestricted l<={} 2<=n<={}",
            config.max_lies, config.max_total
        ),
    );
    for lies in 0..=config.max_lies {
        let params = Params::basic(lies);
        for n in 2..=config.max_total {
            for x in 1..=n {
                for y in (x + 1)..=n.min(2 * x) {
                    let vy = engine.value(&two_block(y, n - y, lies), params)?;
                    let vx = engine.value(&two_block(x, n - x, lies), params)?;
                    report.expect(
                        vy <= vx + 1,
                        || format!("l={lies} n={n} x={x} y={y}"),
                        "RU(y,n-y) - RU(x,n-x) <= 1",
                        vy as i64 - vx as i64,
                        1,
                    );
                }
            }
        }
    }
    Ok(report.finish())
}

/// If the next answer is NO, the forced-NO vector is a best question: its NO
/// child is no harder than that of any question of at most `k` candidates.
/// Instances whose forced NO child has two candidates are skipped.
pub fn check_forced_no(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new("forced-no", config.core_range());
    for params in restricted_families(config, 0) {
        for state in enumerate_states(params.width(), config.max_total) {
            if state.is_terminal() {
                continue;
            }
            let forced = forced_no_query(&state, &params);
            let forced_child = state.apply_answer(&forced, Answer::No)?;
            // A two-candidate NO child is the convexity exception again: asking
            // a whole last-component block can end the game outright.
            if forced_child.total() == 2 {
                report.skipped += 1;
                continue;
            }
            let forced_no = engine.value(&forced_child, params)?;
            let mut best = u32::MAX;
            for q in all_subqueries(state.counts(), params.cap.min(state.total())) {
                best = best.min(engine.value(&state.apply_answer(&q, Answer::No)?, params)?);
            }
            report.expect(
                forced_no <= best,
                || format!("{} forced={forced}", label(&params, &state)),
                "RU(NO(forced)) <= min_q RU(NO(q))",
                forced_no,
                best,
            );
        }
    }
    Ok(report.finish())
}

/// With `x_0 >= 2k`, `(k, 0, ..)` is optimal and NO is its harder answer.
pub fn check_block_question(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new("block-question", config.core_range());
    for params in restricted_families(config, 0) {
        for state in enumerate_states(params.width(), config.max_total) {
            if state.counts()[0] < 2 * params.cap {
                continue;
            }
            let q = block_query(&state, &params)?;
            let value = engine.value(&state, params)?;
            let no = engine.value(&state.apply_answer(&q, Answer::No)?, params)?;
            let yes = engine.value(&state.apply_answer(&q, Answer::Yes)?, params)?;
            report.expect(
                value == no + 1,
                || label(&params, &state),
                "RU(state) = 1 + RU(NO)",
                value,
                no + 1,
            );
            report.expect(
                no >= yes,
                || label(&params, &state),
                "RU(NO) >= RU(YES)",
                no,
                yes,
            );
        }
    }
    Ok(report.finish())
}

/// `w_q(s) = w_{q-1}(YES) + w_{q-1}(NO)` for every question, exactly.
pub fn check_weight_identity(_: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    const MAX_Q: u32 = 12;
    let mut report = CheckReport::new(
        "weight-identity",
        format!(
            "l<={} total<={} 1<=q<={MAX_Q}",
            config.max_lies, config.max_total
        ),
    );
    let (mut yes, mut no) = (Vec::new(), Vec::new());
    for lies in 0..=config.max_lies {
        for state in enumerate_states(lies + 1, config.max_total) {
            for query in all_subqueries(state.counts(), state.total()) {
                child_counts(state.counts(), query.asks(), Answer::Yes, &mut yes);
                child_counts(state.counts(), query.asks(), Answer::No, &mut no);
                let ys = GameState::new(yes.clone());
                let ns = GameState::new(no.clone());
                for q in 1..=MAX_Q {
                    let lhs = state_weight(&state, q);
                    let rhs = state_weight(&ys, q - 1) + state_weight(&ns, q - 1);
                    report.expect(
                        lhs == rhs,
                        || format!("l={lies} state={state} query={query} q={q}"),
                        "w_q(s) = w_{q-1}(YES) + w_{q-1}(NO)",
                        &lhs,
                        &rhs,
                    );
                }
            }
        }
    }
    Ok(report.finish())
}

/// Unrestricted game: `W_l(n) <= RU_l(n) <= W_l(n) + l`.
pub fn check_weight_bound(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new(
        "weight-bound",
        format!("unrestricted l<={} n<={}", config.max_lies, config.weight_n),
    );
    for lies in 0..=config.max_lies {
        for n in 1..=config.weight_n {
            let w = weight_bound(n, lies);
            let v = engine.basic_value(lies, &GameState::initial(n as u32, lies))?;
            let input = || format!("n={n} l={lies}");
            report.expect(w <= v, input, "W_l(n) <= RU_l(n)", w, v);
            report.expect(
                v <= w + lies as u32,
                input,
                "RU_l(n) <= W_l(n) + l",
                v,
                w + lies as u32,
            );
        }
    }
    Ok(report.finish())
}

pub fn check_log_estimate(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    const EPS: f64 = 1e-9;
    let top = config.max_lies.clamp(1, 2);
    let mut report = CheckReport::new(
        "log-estimate",
        format!("unrestricted 1<=l<={top} 2<=n<={}", config.estimate_n),
    );
    for lies in 1..=top {
        for n in 2..=config.estimate_n {
            let (lower, upper) = ru_estimate(n, lies)?;
            let v = f64::from(engine.basic_value(lies, &GameState::initial(n as u32, lies))?);
            let input = || format!("n={n} l={lies}");
            report.expect(
                lower <= v + EPS,
                input,
                "lower estimate <= RU_l(n)",
                lower,
                v,
            );
            report.expect(
                v <= upper + EPS,
                input,
                "RU_l(n) <= upper estimate",
                v,
                upper,
            );
        }
    }
    Ok(report.finish())
}

/// Every lower bound against the exact value, plus the large-`n` equality.
pub fn check_lower_bounds(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut triples = Vec::new();
    for &k in &config.sandwich_caps {
        for &lies in &config.sandwich_lies {
            for n in 1..=config.sandwich_n {
                if check_restricted_domain(n, k).is_ok() {
                    triples.push((n, k, lies));
                }
            }
        }
    }
    triples.extend(config.sandwich_extra.iter().copied());
    let mut report = CheckReport::new(
        "lower-bounds",
        format!(
            "k in {:?} l in {:?} n<={} plus {:?}",
            config.sandwich_caps, config.sandwich_lies, config.sandwich_n, config.sandwich_extra
        ),
    );
    let mut applicable = 0;
    for (n, k, lies) in triples {
        let r = engine.bound_report(n, k, lies)?;
        let input = || format!("n={n} k={k} l={lies}");
        let Some(exact) = r.exact else {
            report.skipped += 1;
            continue;
        };
        let l = lies as u32;
        report.expect(r.l <= exact, input, "L <= RU", r.l, exact);
        report.expect(
            exact <= r.l + l + 1,
            input,
            "RU <= L + l + 1",
            exact,
            r.l + l + 1,
        );
        report.expect(r.l_hat <= exact, input, "L^ <= RU", r.l_hat, exact);
        report.expect(
            exact <= r.l_hat + 2 * l + 1,
            input,
            "RU <= L^ + 2l + 1",
            exact,
            r.l_hat + 2 * l + 1,
        );
        report.expect(
            r.l_hat <= r.l && r.l <= r.l_plus,
            input,
            "L^ <= L <= L+",
            format!("{} {}", r.l_hat, r.l),
            r.l_plus,
        );
        match r.l_tilde {
            Some(lt) => {
                report.expect(lt <= exact, input, "L~ <= RU", lt, exact);
                report.expect(exact <= lt + l, input, "RU <= L~ + l", exact, lt + l);
                report.expect(r.l_plus <= lt, input, "L+ <= L~", r.l_plus, lt);
            }
            None => report.skipped += 1,
        }
        if let Some(v) = r.theorem2_value {
            applicable += 1;
            report.expect(v == exact, input, "large-n formula = RU", v, exact);
        }
    }
    report.notes.push(format!(
        "large-n formula applicable on {applicable} triples"
    ));
    Ok(report.finish())
}

pub fn check_closed_forms(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new(
        "closed-forms",
        format!(
            "l=0 1<=k<=n<={}; unrestricted l=0 n<={}; k=1 l<={} n<={}",
            config.closed_form_n, config.closed_form_n, config.max_lies, config.single_query_n
        ),
    );
    for n in 1..=config.closed_form_n {
        let start = GameState::initial(n as u32, 0);
        for k in 1..=n {
            let want = ru0k_exact(n, k)?;
            let got = engine.value(
                &start,
                Params {
                    lies: 0,
                    cap: k as u32,
                },
            )?;
            report.expect(
                got == want,
                || format!("n={n} k={k} l=0"),
                "RU_0^k(n) = floor(n/k)-1+ceil(log2(k+m_1))",
                got,
                want,
            );
        }
        let want = crate::bounds::ceil_log2(n);
        let got = engine.basic_value(0, &start)?;
        report.expect(
            got == want,
            || format!("unrestricted n={n} l=0"),
            "RU_0(n) = ceil(log2 n)",
            got,
            want,
        );
    }
    for lies in 0..=config.max_lies {
        for n in 1..=config.single_query_n {
            let want = ruk1_exact(n, lies)?;
            let got = engine.value(&GameState::initial(n as u32, lies), Params { lies, cap: 1 })?;
            report.expect(
                got == want,
                || format!("n={n} k=1 l={lies}"),
                "RU_l^1(n) = (l+1)n-1",
                got,
                want,
            );
        }
    }
    Ok(report.finish())
}

/// The pruned solver against the retrograde reference on every state.
pub fn check_oracle(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new(
        "oracle",
        format!(
            "l<={} k<={} total<={}",
            config.max_lies, config.max_cap, config.oracle_total
        ),
    );
    for params in restricted_families(config, 0) {
        for state in enumerate_states(params.width(), config.oracle_total) {
            let fast = engine.value(&state, params)?;
            let reference = brute_force_oracle(&state, &params, 64)?;
            report.expect(
                fast == reference,
                || label(&params, &state),
                "solve = oracle",
                fast,
                reference,
            );
        }
    }
    Ok(report.finish())
}

/// Relaxing a candidate or raising the cap never makes a state harder; the
/// unrestricted game is never harder than a bounded one.
pub fn check_monotonicity(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new("monotonicity", config.core_range());
    for params in restricted_families(config, 0) {
        let wider = Params {
            cap: params.cap + 1,
            ..params
        };
        let basic = Params::basic(params.lies);
        for state in enumerate_states(params.width(), config.max_total) {
            let v = engine.value(&state, params)?;
            for from in 0..params.width() {
                if state.counts()[from] == 0 {
                    continue;
                }
                for to in (from + 1)..=params.width() {
                    let relaxed = state.shift_relax(from, to)?;
                    let r = engine.value(&relaxed, params)?;
                    report.expect(
                        r <= v,
                        || format!("{} shift {from}->{to}", label(&params, &state)),
                        "RU(relaxed) <= RU(state)",
                        r,
                        v,
                    );
                }
            }
            let w = engine.value(&state, wider)?;
            report.expect(w <= v, || label(&params, &state), "RU^{k+1} <= RU^k", w, v);
            let b = engine.value(&state, basic)?;
            report.expect(
                b <= v,
                || label(&params, &state),
                "RU unrestricted <= RU^k",
                b,
                v,
            );
        }
    }
    Ok(report.finish())
}

/// States reachable from `start` in exactly `depth` optimal questions.
pub fn optimal_play_states(
    engine: &Engine,
    params: Params,
    start: &GameState,
    depth: usize,
) -> Result<BTreeSet<GameState>> {
    let mut frontier: BTreeSet<GameState> = [GameState::new(start.counts().to_vec())].into();
    for _ in 0..depth {
        let mut next = BTreeSet::new();
        for s in &frontier {
            for q in engine.solve(s, params)?.optimal_queries {
                for answer in Answer::BOTH {
                    let child = s.apply_answer(&q, answer)?;
                    next.insert(GameState::new(child.counts().to_vec()));
                }
            }
        }
        frontier = next;
    }
    Ok(frontier)
}

/// Every state at any depth under optimal play, terminal ones excluded.
pub fn all_optimal_play_states(
    engine: &Engine,
    params: Params,
    start: &GameState,
) -> Result<BTreeSet<GameState>> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![GameState::new(start.counts().to_vec())];
    while let Some(s) = stack.pop() {
        if s.is_terminal() || !seen.insert(s.clone()) {
            continue;
        }
        for q in engine.solve(&s, params)?.optimal_queries {
            for answer in Answer::BOTH {
                stack.push(GameState::new(
                    s.apply_answer(&q, answer)?.counts().to_vec(),
                ));
            }
        }
    }
    Ok(seen)
}

fn ru1k<'a>(engine: &'a Engine, k: u32) -> impl Fn(&GameState) -> Result<u32> + 'a {
    move |s: &GameState| engine.value(s, Params { lies: 1, cap: k })
}

/// The counterexample to the one-lie optimal-query conjecture at `k = 16`,
/// starting from 56 candidates.
pub fn reproduce_counterexample(engine: &Engine, _: &VerifyConfig) -> Result<CheckReport> {
    let params = Params { lies: 1, cap: 16 };
    let state = GameState::new(vec![10, 44]);
    let input = || "k=16 l=1 state=10,44".to_string();
    let mut report = CheckReport::new("conjecture", "k=16 l=1 n=56".into());

    let reachable = optimal_play_states(engine, params, &GameState::initial(56, 1), 3)?;
    report.expect(
        reachable.contains(&state),
        || "k=16 l=1 start=56,0 depth=3".into(),
        "10,44 reachable by three optimal questions",
        reachable.contains(&state),
        true,
    );

    let solved = engine.solve(&state, params)?;
    report.expect(solved.value == 7, input, "RU = 7", solved.value, 7);

    let cq = conjecture_quantities(10, 44, 16, &ru1k(engine, 16))?;
    report.expect(cq.c == 7, input, "C = 7", cq.c, 7);
    let chi = (cq.chi0, cq.chi1);
    report.expect(
        chi == (Some(8), Some(6)),
        input,
        "(chi0, chi1) = (8, 6)",
        format!("{chi:?}"),
        "(Some(8), Some(6))",
    );

    let optimal: Vec<String> = solved
        .optimal_queries
        .iter()
        .map(Query::to_string)
        .collect();
    let shown = optimal.join(" ");
    report.expect(
        !optimal.iter().any(|q| q == "8,6"),
        input,
        "8,6 not optimal",
        &shown,
        "without 8,6",
    );
    report.expect(
        optimal.iter().any(|q| q == "7,9"),
        input,
        "7,9 optimal",
        &shown,
        "with 7,9",
    );
    report.expect(
        optimal == ["7,9"],
        input,
        "7,9 is the only optimal query",
        &shown,
        "7,9",
    );
    Ok(report.finish())
}

/// One optimal-play state evaluated against the conjecture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub k: u32,
    pub n: u32,
    pub a: u32,
    pub b: u32,
    pub quantities: ConjectureQuantities,
    pub predicted: Option<u32>,
    pub exact: u32,
    /// Whether `(chi0, chi1)` is among the optimal questions.
    pub chi_optimal: Option<bool>,
}

impl ConjectureRow {
    pub fn holds(&self) -> Option<bool> {
        self.predicted.map(|p| p == self.exact)
    }
}

/// Conjecture prediction against the solver for every non-terminal
/// optimal-play state from `n` candidates inside the conjecture's domain.
pub fn conjecture_table(engine: &Engine, k: u32, n: u32) -> Result<Vec<ConjectureRow>> {
    let params = Params { lies: 1, cap: k };
    let eval = ru1k(engine, k);
    let mut rows = Vec::new();
    for s in all_optimal_play_states(engine, params, &GameState::initial(n, 1))? {
        let (a, b) = (s.counts()[0], s.counts()[1]);
        if 2 * k <= a {
            continue;
        }
        let quantities = conjecture_quantities(a, b, k, &eval)?;
        let solved = engine.solve(&s, params)?;
        let (predicted, chi_optimal) = match (quantities.chi0, quantities.chi1) {
            (Some(x), Some(y)) => {
                let after_no = GameState::new(vec![a - x, b - y + x]);
                let predicted = quantities.c.max(1 + eval(&after_no)?);
                let chi = Query::new(vec![x, y]);
                (Some(predicted), Some(solved.optimal_queries.contains(&chi)))
            }
            _ => (None, None),
        };
        rows.push(ConjectureRow {
            k,
            n,
            a,
            b,
            quantities,
            predicted,
            exact: solved.value,
            chi_optimal,
        });
    }
    Ok(rows)
}

/// Tabulates the conjecture; disagreements are reported as notes, not
/// failures.
pub fn check_conjecture_table(engine: &Engine, config: &VerifyConfig) -> Result<CheckReport> {
    let mut report = CheckReport::new(
        "conjecture-table",
        format!("l=1 (k, n) in {:?}", config.conjecture_grid),
    );
    for &(k, n) in &config.conjecture_grid {
        let rows = conjecture_table(engine, k, n)?;
        let mut disagree = 0;
        for row in &rows {
            report.instances += 1;
            match row.holds() {
                None => report.skipped += 1,
                Some(true) => {}
                Some(false) => {
                    disagree += 1;
                    report.notes.push(format!(
                        "k={k} n={n} state={},{}: predicted {} exact {} chi=({},{}) chi optimal={}",
                        row.a,
                        row.b,
                        row.predicted.unwrap_or(0),
                        row.exact,
                        row.quantities.chi0.unwrap_or(0),
                        row.quantities.chi1.unwrap_or(0),
                        row.chi_optimal.unwrap_or(false),
                    ));
                }
            }
        }
        report.notes.push(format!(
            "k={k} n={n}: {} states, {disagree} disagree",
            rows.len()
        ));
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_states(3, 6).len(), 84);
        assert_eq!(all_subqueries(&[2, 1], 3).len(), 6);
    }

    #[test]
    fn convexity_move_shapes() {
        assert_eq!(
            convexity_move(&[0, 3], 1, 1, 1),
            Some(GameState::with_excluded(vec![1, 1], 1))
        );
        assert_eq!(
            convexity_move(&[0, 1, 1], 1, 2, 1),
            Some(GameState::with_excluded(vec![1, 0, 0], 1))
        );
        assert_eq!(convexity_move(&[0, 1, 0], 1, 1, 1), None);
    }

    #[test]
    fn budget_overrides() {
        let mut c = VerifyConfig::default();
        c.set_budget("total=5").unwrap();
        assert_eq!((c.max_total, c.oracle_total), (5, 5));
        assert!(c.set_budget("total=0").is_err());
        assert!(c.set_budget("bogus=3").is_err());
        assert!(c.set_budget("total").is_err());
    }

    #[test]
    fn only_matches_names_and_groups() {
        let c = VerifyConfig {
            only: vec!["convexity".into()],
            ..VerifyConfig::default()
        };
        assert!(c.selects("convexity-basic"));
        assert!(!c.selects("conjecture"));
        let c = VerifyConfig {
            only: vec!["conjecture".into()],
            ..VerifyConfig::default()
        };
        assert!(c.selects("conjecture") && c.selects("conjecture-table"));
    }

    #[test]
    fn skipped_exception_is_counted() {
        let engine = Engine::default();
        let config = VerifyConfig {
            max_total: 3,
            max_lies: 1,
            max_cap: 1,
            ..VerifyConfig::default()
        };
        let r = check_convexity_restricted(&engine, &config).unwrap();
        assert!(r.passed);
        assert!(r.skipped > 0);
    }
}
