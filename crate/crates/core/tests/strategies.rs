use std::collections::BTreeSet;
use std::sync::Arc;

use liargame::bounds::state_weight_bound;
use liargame::solver::Solver;
use liargame::strategies::*;
use liargame::verify::enumerate_states;
use liargame::{Answer, GameState, Params, Query};

fn p(lies: usize, cap: u32) -> Params {
    Params::new(lies, cap).unwrap()
}

fn solver(params: Params) -> Arc<Solver> {
    Arc::new(Solver::new(params))
}

fn assert_transcript_consistent(t: &Transcript, params: &Params) {
    let mut state = t.start.clone();
    for m in &t.moves {
        m.query.check_admissible(&state, params).unwrap();
        state = state.apply_answer(&m.query, m.answer).unwrap();
        assert_eq!(state, m.after);
    }
    assert_eq!(state, t.outcome);
    assert!(t.outcome.is_terminal());
    assert_eq!(t.to_json()["length"], t.len());
}

#[test]
fn greedy_against_all_no_reaches_last_block() {
    for lies in 0..=2usize {
        for k in 2..=5u32 {
            for n in (2 * k)..=40 {
                let params = p(lies, k);
                let mut state = GameState::initial(n, lies);
                let steps = (lies as u32 + 1) * n / k - 1;
                for _ in 0..steps {
                    let q = greedy_lowest(&state, &params);
                    state = state.apply_answer(&q, Answer::No).unwrap();
                }
                let m = (lies as u32 + 1) * n % k;
                let mut want = vec![0; lies + 1];
                want[lies] = k + m;
                assert_eq!(state.counts(), want.as_slice(), "n={n} k={k} l={lies}");
            }
        }
    }
}

#[test]
fn greedy_then_optimal_hits_large_n_value() {
    let params = p(1, 2);
    let s = solver(params);
    let t = simulate(
        &greedy_then_optimal(s.clone()),
        &adversary_policy(s),
        &GameState::initial(14, 1),
        &params,
    )
    .unwrap();
    assert_eq!(t.len(), 14);
    assert_transcript_consistent(&t, &params);
}

#[test]
fn optimal_against_adversary_plays_exact_value() {
    for (lies, k, n) in [
        (0, 8, 8),
        (1, 2, 9),
        (1, 3, 12),
        (2, 2, 8),
        (2, 3, 10),
        (1, 16, 56),
    ] {
        let params = p(lies, k);
        let s = solver(params);
        let start = GameState::initial(n, lies);
        let t = simulate(
            &optimal_policy(s.clone()),
            &adversary_policy(s.clone()),
            &start,
            &params,
        )
        .unwrap();
        assert_eq!(
            t.len() as u32,
            s.value(&start).unwrap(),
            "n={n} k={k} l={lies}"
        );
        assert_transcript_consistent(&t, &params);
    }
}

#[test]
fn counterexample_state_lasts_seven_questions() {
    let params = p(1, 16);
    let s = solver(params);
    let start = GameState::new(vec![10, 44]);
    let t = simulate(
        &optimal_policy(s.clone()),
        &adversary_policy(s),
        &start,
        &params,
    )
    .unwrap();
    assert_eq!(t.len(), 7);
    assert_eq!(t.moves[0].query, Query::new(vec![7, 9]));
}

#[test]
fn any_questioner_needs_at_least_the_value() {
    for lies in 0..=2usize {
        for k in 1..=3u32 {
            let params = p(lies, k);
            let s = solver(params);
            for state in enumerate_states(lies + 1, 7) {
                let v = s.value(&state).unwrap() as usize;
                let greedy =
                    simulate(&GreedyLowest, &adversary_policy(s.clone()), &state, &params).unwrap();
                assert!(greedy.len() >= v, "{params} {state}");
                assert_transcript_consistent(&greedy, &params);
                let best = simulate(
                    &optimal_policy(s.clone()),
                    &adversary_policy(s.clone()),
                    &state,
                    &params,
                )
                .unwrap();
                assert_eq!(best.len(), v, "{params} {state}");
            }
        }
    }
}

#[test]
fn adversary_children_step_down_by_one() {
    let params = p(2, 3);
    let s = solver(params);
    let t = simulate(
        &optimal_policy(s.clone()),
        &adversary_policy(s.clone()),
        &GameState::initial(12, 2),
        &params,
    )
    .unwrap();
    let mut prev = s.value(&t.start).unwrap();
    for m in &t.moves {
        let v = s.value(&m.after).unwrap();
        assert_eq!(v + 1, prev);
        prev = v;
    }
}

#[test]
fn weight_adversary_forces_weight_bound() {
    for lies in 0..=2usize {
        for k in 1..=3u32 {
            let params = p(lies, k);
            let s = solver(params);
            for state in enumerate_states(lies + 1, 7) {
                if state.total() == 0 {
                    continue;
                }
                let w = state_weight_bound(&state).unwrap() as usize;
                for q in [&GreedyLowest as &dyn Questioner, &optimal_policy(s.clone())] {
                    let t = simulate(q, &weight_adversary(), &state, &params).unwrap();
                    assert!(t.len() >= w, "{params} {state}: {} < {w}", t.len());
                }
            }
        }
    }
}

#[test]
fn honest_responder_is_found_with_budgeted_lies() {
    let params = p(1, 3);
    let s = solver(params);
    let start = GameState::initial(10, 1);
    for secret in 0..10 {
        for lie_round in [None, Some(0), Some(2), Some(5)] {
            let rounds: BTreeSet<usize> = lie_round.into_iter().collect();
            let r = honest_responder(secret, rounds, 1).unwrap();
            let t = simulate(&optimal_policy(s.clone()), &r, &start, &params).unwrap();
            r.check_outcome(&t).unwrap();
            assert!(t.len() as u32 <= s.value(&start).unwrap());
        }
    }
}

#[test]
fn honest_answers_without_lies_match_one_element() {
    let params = p(0, 4);
    let start = GameState::initial(9, 0);
    for secret in 0..9 {
        let r = honest_responder(secret, BTreeSet::new(), 0).unwrap();
        let t = simulate(&GreedyLowest, &r, &start, &params).unwrap();
        let board = t.final_board().unwrap();
        assert_eq!(board.live(), vec![secret]);
        assert_eq!(board.component_of(secret), Some(0));
    }
}

#[test]
fn greedy_and_forced_no_agree_inside_first_block() {
    for lies in 0..=2usize {
        for k in 1..=3u32 {
            let params = p(lies, k);
            for state in enumerate_states(lies + 1, 8) {
                let first = state.counts().iter().position(|&x| x > 0);
                let Some(f) = first else { continue };
                if state.counts()[f] >= k && state.total() > k {
                    assert_eq!(
                        greedy_lowest(&state, &params),
                        forced_no_query(&state, &params),
                        "{params} {state}"
                    );
                }
            }
        }
    }
}

#[test]
fn greedy_is_always_admissible() {
    for lies in 0..=2usize {
        for k in 1..=4u32 {
            let params = p(lies, k);
            for state in enumerate_states(lies + 1, 8) {
                if !state.is_terminal() {
                    greedy_lowest(&state, &params)
                        .check_admissible(&state, &params)
                        .unwrap();
                }
            }
        }
    }
}

#[test]
fn simulations_run_concurrently() {
    use std::thread;
    let params = p(1, 4);
    let s = solver(params);
    let handles: Vec<_> = (16..24)
        .map(|n| {
            let s = s.clone();
            thread::spawn(move || {
                let start = GameState::initial(n, 1);
                let t = simulate(
                    &optimal_policy(s.clone()),
                    &adversary_policy(s.clone()),
                    &start,
                    &params,
                )
                .unwrap();
                (t.len() as u32, s.value(&start).unwrap())
            })
        })
        .collect();
    for h in handles {
        let (len, value) = h.join().unwrap();
        assert_eq!(len, value);
    }
}
