use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::game::{Answer, GameState, Query};

/// Element-level view of a position: each candidate id (0-based) sits in a
/// component, or has been excluded (`None`).
///
/// Ids start out grouped by component in increasing order. A count query is
/// realised by asking the lowest-numbered live ids of each component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementBoard {
    lies: usize,
    slots: Vec<Option<usize>>,
}

impl ElementBoard {
    pub fn from_state(state: &GameState) -> Self {
        let mut slots = Vec::with_capacity(state.total() as usize);
        for (component, &x) in state.counts().iter().enumerate() {
            slots.extend(std::iter::repeat_n(Some(component), x as usize));
        }
        ElementBoard {
            lies: state.lies(),
            slots,
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn component_of(&self, id: usize) -> Option<usize> {
        self.slots.get(id).copied().flatten()
    }

    pub fn live(&self) -> Vec<usize> {
        (0..self.slots.len())
            .filter(|&i| self.slots[i].is_some())
            .collect()
    }

    /// Ids of every live candidate in `component`, ascending.
    pub fn members(&self, component: usize) -> Vec<usize> {
        (0..self.slots.len())
            .filter(|&i| self.slots[i] == Some(component))
            .collect()
    }

    pub fn state(&self) -> GameState {
        let mut counts = vec![0u32; self.lies + 1];
        let mut excluded = 0;
        for slot in &self.slots {
            match slot {
                Some(c) => counts[*c] += 1,
                None => excluded += 1,
            }
        }
        GameState::with_excluded(counts, excluded)
    }

    /// Lowest ids realising `query`.
    pub fn select(&self, query: &Query) -> Result<Vec<usize>> {
        let state = self.state();
        query.check_against(&state)?;
        let mut out = Vec::with_capacity(query.size() as usize);
        for (component, &q) in query.asks().iter().enumerate() {
            out.extend(self.members(component).into_iter().take(q as usize));
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Count query asked by an explicit id set; excluded ids are ignored.
    pub fn query_for(&self, asked: &BTreeSet<usize>) -> Result<Query> {
        let mut asks = vec![0u32; self.lies + 1];
        for &id in asked {
            if id >= self.slots.len() {
                return Err(Error::Domain(format!("no candidate with id {}", id + 1)));
            }
            if let Some(c) = self.slots[id] {
                asks[c] += 1;
            }
        }
        Ok(Query::new(asks))
    }

    /// Every candidate the answer contradicts collects a NO.
    pub fn apply(&mut self, asked: &BTreeSet<usize>, answer: Answer) {
        for (id, slot) in self.slots.iter_mut().enumerate() {
            let Some(c) = *slot else { continue };
            let contradicted = match answer {
                Answer::Yes => !asked.contains(&id),
                Answer::No => asked.contains(&id),
            };
            if contradicted {
                *slot = if c == self.lies { None } else { Some(c + 1) };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn board_tracks_counts() {
        let start = GameState::new(vec![5, 3]);
        let mut board = ElementBoard::from_state(&start);
        assert_eq!(board.state(), start);
        let q = Query::new(vec![2, 1]);
        let asked: BTreeSet<usize> = board.select(&q).unwrap().into_iter().collect();
        assert_eq!(asked.iter().copied().collect::<Vec<_>>(), vec![0, 1, 5]);
        assert_eq!(board.query_for(&asked).unwrap(), q);
        board.apply(&asked, Answer::Yes);
        let expected = start.apply_answer(&q, Answer::Yes).unwrap();
        assert_eq!(board.state(), expected);
        assert_eq!(board.component_of(0), Some(0));
        assert_eq!(board.component_of(6), None);
    }

    #[test]
    fn unknown_id_rejected() {
        let board = ElementBoard::from_state(&GameState::new(vec![3]));
        assert!(board.query_for(&[7].into_iter().collect()).is_err());
    }
}
