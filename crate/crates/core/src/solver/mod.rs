//! The dynamic-programming solver: a value-by-value scan over per-suit
//! run-length configurations with memoization, solution reconstruction and
//! an independent arrangement verifier.

mod arrangement;
mod dense;
mod engine;
mod state;
mod transitions;

pub use arrangement::{
    verify_arrangement, Arrangement, GroupPlacement, RunPlacement, VerifyError,
};
pub use state::{basic_state_count, BasicStateSpace, RunSymbol, RunTileKind, SuitRunState};
pub use transitions::{make_runs, RunTransition};

use crate::tileset::{Hand, Problem, TileSetParams};

/// Knobs for the solve itself; results never depend on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Stop as soon as a solution using every tile value is found. Only the
    /// general engine consults this; the dense engine always runs its full
    /// sweep.
    pub early_stop: bool,
    /// Memoize subproblems. Disabling this turns the general engine into a
    /// plain exponential recursion and is only useful for testing.
    pub memoize: bool,
    /// Skip the dense engine even when the problem qualifies for it.
    pub force_generic: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { early_stop: true, memoize: true, force_generic: false }
    }
}

/// The maximum achievable score, or `None` when the table constraint cannot
/// be satisfied.
pub fn max_score(problem: &Problem) -> Option<u64> {
    max_score_with(problem, &SolveOptions::default())
}

pub fn max_score_with(problem: &Problem, opts: &SolveOptions) -> Option<u64> {
    if !opts.force_generic && opts.memoize && dense::eligible(problem) {
        dense::solve(problem)
    } else {
        engine::GenericSolver::new(problem, *opts).max_score()
    }
}

/// An optimal arrangement, or `None` when the table constraint cannot be
/// satisfied. Deterministic: ties break toward fewer jokers, fewer tiles,
/// then the smallest successor state encoding.
pub fn best_arrangement(problem: &Problem) -> Option<Arrangement> {
    let opts = SolveOptions { early_stop: false, memoize: true, force_generic: true };
    engine::GenericSolver::new(problem, opts).best_arrangement()
}

/// Whether every tile of the hand (jokers included) can be used in valid
/// runs and groups at once.
pub fn is_fully_playable(hand: &Hand, params: &TileSetParams) -> bool {
    if hand.jokers() == 0 {
        // Jokers absent, so full usage is equivalent to the optimum
        // reaching the hand's total value.
        let problem = Problem::hand_only(*params, hand.clone())
            .expect("a valid hand is a valid problem");
        max_score(&problem) == Some(hand.value())
    } else {
        // Demand every tile by treating the whole hand as table tiles;
        // feasibility then means full usage, jokers included.
        let empty = Hand::empty(params);
        let problem = Problem::new(*params, empty, hand.clone())
            .expect("a valid hand is a valid problem");
        max_score(&problem).is_some()
    }
}
