use std::sync::Arc;

use liargame::solver::*;
use liargame::verify::enumerate_states;
use liargame::{Answer, Error, GameState, Params};
use rayon::prelude::*;

fn p(lies: usize, cap: u32) -> Params {
    Params::new(lies, cap).unwrap()
}

#[test]
fn matches_oracle_up_to_eight_candidates() {
    for lies in 0..=2usize {
        for cap in 1..=3u32 {
            let params = p(lies, cap);
            let solver = Solver::new(params);
            for state in enumerate_states(lies + 1, 8).into_iter().step_by(3) {
                let fast = solver.value(&state).unwrap();
                assert_eq!(
                    fast,
                    brute_force_oracle(&state, &params, 64).unwrap(),
                    "{params} {state}"
                );
            }
        }
    }
}

#[test]
fn unrestricted_matches_oracle_at_large_cap() {
    // a cap of total - 1 already allows every admissible question
    for lies in 0..=2usize {
        let basic = Solver::new(Params::basic(lies));
        for state in enumerate_states(lies + 1, 5) {
            let cap = state.total().clamp(1, 4);
            let want = brute_force_oracle(&state, &p(lies, cap), 64).unwrap();
            assert_eq!(basic.value(&state).unwrap(), want, "l={lies} {state}");
        }
    }
}

#[test]
fn optimal_queries_are_exactly_the_value_achievers() {
    let params = p(1, 3);
    let solver = Solver::new(params);
    for state in enumerate_states(2, 9) {
        let r = solver.solve(&state).unwrap();
        let mut want = Vec::new();
        for q in state.queries(&params) {
            let (y, n) = solver.child_values(&state, &q).unwrap();
            if r.value > 0 && y.max(n) == r.value - 1 {
                want.push(q);
            }
            assert!(y.max(n) + 1 >= r.value);
        }
        assert_eq!(r.optimal_queries, want, "{state}");
        assert_eq!(r.principal, want.first().cloned());
    }
}

#[test]
fn strategy_tree_depth_equals_value() {
    let params = p(1, 4);
    let solver = Solver::new(params);
    for n in 2..=14 {
        let start = GameState::initial(n, 1);
        let tree = extract_strategy(&solver, &start).unwrap();
        assert_eq!(tree.depth(), solver.value(&start).unwrap());
        assert!(tree.leaves().iter().all(|s| s.is_terminal()));
    }
}

#[test]
fn shared_cache_under_parallel_solves() {
    let params = p(2, 3);
    let cache = Arc::new(MemoCache::new(params));
    let starts: Vec<u32> = (2..=20).collect();
    let parallel: Vec<u32> = starts
        .par_iter()
        .map(|&n| {
            solve(&GameState::initial(n, 2), cache.clone())
                .unwrap()
                .value
        })
        .collect();
    let fresh = Solver::new(params);
    for (&n, v) in starts.iter().zip(parallel) {
        assert_eq!(v, fresh.value(&GameState::initial(n, 2)).unwrap());
    }
    let before = cache.len();
    let again = Solver::with_cache(cache.clone(), SolverOptions::default(), Budget::default());
    again.value(&GameState::initial(20, 2)).unwrap();
    assert_eq!(again.computed_states(), 0);
    assert_eq!(cache.len(), before);
}

#[test]
fn cache_file_is_deterministic_and_reloadable() {
    let params = p(1, 16);
    let build = || {
        let s = Solver::new(params);
        s.value(&GameState::new(vec![10, 44])).unwrap();
        s.cache().to_text()
    };
    let text = build();
    assert_eq!(text, build());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.cache");
    std::fs::write(&path, &text).unwrap();
    let loaded = MemoCache::read_from(
        std::io::BufReader::new(std::fs::File::open(&path).unwrap()),
        Some(params),
    )
    .unwrap();
    let s = Solver::with_cache(
        Arc::new(loaded),
        SolverOptions::default(),
        Budget::default(),
    );
    assert_eq!(s.value(&GameState::new(vec![10, 44])).unwrap(), 7);
    assert_eq!(s.computed_states(), 0);
}

#[test]
fn pruning_options_never_change_values() {
    let params = p(2, 2);
    let reference = Solver::with_options(params, SolverOptions::exhaustive(), Budget::default());
    let pruned = Solver::new(params);
    for state in enumerate_states(3, 9) {
        assert_eq!(
            pruned.value(&state).unwrap(),
            reference.value(&state).unwrap(),
            "{state}"
        );
    }
}

#[test]
fn block_shortcut_mode_agrees_with_default() {
    let params = p(1, 3);
    let options = SolverOptions {
        convexity_normalized: true,
        ..SolverOptions::default()
    };
    let fast = Solver::with_options(params, options, Budget::default());
    let plain = Solver::new(params);
    for n in 2..=30 {
        let s = GameState::initial(n, 1);
        assert_eq!(fast.value(&s).unwrap(), plain.value(&s).unwrap(), "n={n}");
    }
}

#[test]
fn budget_and_shape_errors() {
    let tight = Budget {
        max_total: 10,
        ..Budget::default()
    };
    let s = Solver::with_options(p(1, 2), SolverOptions::default(), tight);
    assert!(matches!(
        s.value(&GameState::initial(11, 1)),
        Err(Error::Budget(_))
    ));
    assert!(matches!(
        s.value(&GameState::new(vec![3])),
        Err(Error::Shape { .. })
    ));
}

#[test]
fn children_of_optimal_query_step_down() {
    let params = p(1, 16);
    let solver = Solver::new(params);
    let state = GameState::new(vec![10, 44]);
    let r = solver.solve(&state).unwrap();
    let q = r.principal.unwrap();
    for answer in Answer::BOTH {
        let child = state.apply_answer(&q, answer).unwrap();
        assert!(solver.value(&child).unwrap() <= 6);
    }
}
