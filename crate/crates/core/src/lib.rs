//! Exact solver, bound calculator and lemma checker for the liar game in which
//! the Questioner may only ask subsets of at most `k` candidates and the
//! Responder may lie at most `l` times.

pub mod bounds;
pub mod error;
pub mod game;
pub mod solver;
pub mod strategies;
pub mod verify;

pub use error::{Error, Result};
pub use game::{Answer, GameState, Params, Query};
