use liargame::bounds::{state_weight, state_weight_bound, state_weight_bound_exact};
use liargame::solver::MemoCache;
use liargame::{Answer, GameState, Params, Query};
use proptest::prelude::*;

/// A state with `lies + 1` components and a question fitting inside it.
fn state_and_query() -> impl Strategy<Value = (GameState, Query)> {
    (0usize..=3)
        .prop_flat_map(|lies| prop::collection::vec(0u32..40, lies + 1))
        .prop_flat_map(|counts| {
            let asks: Vec<_> = counts.iter().map(|&x| 0..=x).collect();
            (Just(counts), asks)
        })
        .prop_map(|(counts, asks)| (GameState::new(counts), Query::new(asks)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn candidates_are_conserved((state, query) in state_and_query()) {
        for answer in Answer::BOTH {
            let child = state.apply_answer(&query, answer).unwrap();
            prop_assert_eq!(child.total() + child.excluded(), state.total() + state.excluded());
        }
    }

    #[test]
    fn every_candidate_survives_some_answer((state, query) in state_and_query()) {
        let yes = state.apply_answer(&query, Answer::Yes).unwrap();
        let no = state.apply_answer(&query, Answer::No).unwrap();
        prop_assert!(yes.total() + no.total() >= state.total());
        // an answer in component i moves a candidate to i or i + 1
        let last = state.counts().len() - 1;
        prop_assert_eq!(yes.excluded() - state.excluded(), state.counts()[last] - query.asks()[last]);
        prop_assert_eq!(no.excluded() - state.excluded(), query.asks()[last]);
    }

    #[test]
    fn admissible_questions_decrease_potential((state, query) in state_and_query()) {
        let params = Params::new(state.lies(), 40).unwrap();
        prop_assume!(query.check_admissible(&state, &params).is_ok());
        for answer in Answer::BOTH {
            let child = state.apply_answer(&query, answer).unwrap();
            prop_assert!(child.potential() < state.potential());
        }
    }

    #[test]
    fn weight_splits_exactly((state, query) in state_and_query(), q in 1u32..30) {
        let yes = state.apply_answer(&query, Answer::Yes).unwrap();
        let no = state.apply_answer(&query, Answer::No).unwrap();
        prop_assert_eq!(state_weight(&state, q), state_weight(&yes, q - 1) + state_weight(&no, q - 1));
    }

    #[test]
    fn fast_weight_bound_matches_exact(counts in (0usize..=4).prop_flat_map(|l| prop::collection::vec(0u32..5000, l + 1))) {
        let state = GameState::new(counts);
        prop_assume!(state.total() > 0);
        prop_assert_eq!(state_weight_bound(&state).unwrap(), state_weight_bound_exact(&state).unwrap());
    }

    #[test]
    fn literals_round_trip(counts in prop::collection::vec(0u32..100_000, 1..6)) {
        let state = GameState::new(counts);
        prop_assert_eq!(state.to_string().parse::<GameState>().unwrap(), state);
    }

    #[test]
    fn cache_text_round_trips(entries in prop::collection::btree_map(prop::collection::vec(0u32..50, 2), 0u32..40, 0..60)) {
        let cache = MemoCache::new(Params::new(1, 3).unwrap());
        for (k, v) in &entries {
            cache.insert_if_absent(k, *v);
        }
        let text = cache.to_text();
        let back = MemoCache::from_text(&text, Some(cache.params())).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back.len(), entries.len());
    }
}
