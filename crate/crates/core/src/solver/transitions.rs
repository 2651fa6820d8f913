//! Enumeration of the ways one suit's run slots can absorb tiles of the
//! current value. Each slot either extends with exactly one tile (a free
//! real tile, a mandatory table tile, or a joker) or resets to empty; empty
//! slots may start new runs. Resetting a slot that holds a committed table
//! tile is forbidden, and resetting a slot that holds jokers releases them
//! back to the pool.

use super::state::{RunSymbol, RunTileKind, SuitRunState};

/// One way to advance a suit's run configuration at the current value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTransition {
    pub next: SuitRunState,
    /// Score banked by this step: completions pay for their covered
    /// positions, extensions of complete runs pay for the new tile, and
    /// joker positions pay nothing.
    pub deferred_score: i64,
    /// Free real tiles consumed.
    pub real_used: u8,
    /// Mandatory (table) tiles consumed.
    pub mandatory_used: u8,
    /// Jokers committed to slots by this step.
    pub jokers_placed: u8,
    /// Jokers released by abandoning incomplete slots that held them.
    pub jokers_released: u8,
}

/// Action applied to all slots sharing one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SymbolAction {
    pub symbol: RunSymbol,
    pub extend_free: u8,
    pub extend_mand: u8,
    pub extend_jokers: u8,
    pub resets: u8,
}

/// Transition with the deferred score kept in value-independent form
/// `alpha * value + beta`, so transition tables can be shared across values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawTransition {
    pub next: SuitRunState,
    pub alpha: i32,
    pub beta: i32,
    pub free_used: u8,
    pub mand_used: u8,
    pub jokers_placed: u8,
    pub jokers_released: u8,
    pub actions: Vec<SymbolAction>,
}

impl RawTransition {
    pub fn deferred_score(&self, value: u16) -> i64 {
        self.alpha as i64 * value as i64 + self.beta as i64
    }
}

/// Every distinct way to extend or reset the slots of `state` given the
/// tiles of the current value. `value` only feeds the deferred scores.
pub fn make_runs(
    state: &SuitRunState,
    avail_real: u8,
    avail_mandatory: u8,
    jokers_spendable: u8,
    value: u16,
) -> Vec<RunTransition> {
    raw_transitions(state, avail_real, avail_mandatory, jokers_spendable, None)
        .into_iter()
        .map(|raw| RunTransition {
            deferred_score: raw.deferred_score(value),
            next: raw.next,
            real_used: raw.free_used,
            mandatory_used: raw.mand_used,
            jokers_placed: raw.jokers_placed,
            jokers_released: raw.jokers_released,
        })
        .collect()
}

/// Internal enumeration. When `values_left` is given (the number of values
/// after the current one), starts and extensions that can no longer reach a
/// complete run are pruned; such branches always end worthless.
pub(crate) fn raw_transitions(
    state: &SuitRunState,
    avail_free: u8,
    avail_mand: u8,
    jokers_spendable: u8,
    values_left: Option<u16>,
) -> Vec<RawTransition> {
    let groups = state.symbol_counts();
    let mut out = Vec::new();
    let mut scratch = Scratch {
        slots: Vec::with_capacity(state.slot_count() as usize),
        actions: Vec::with_capacity(groups.len()),
    };
    recurse(
        &groups,
        0,
        avail_free,
        avail_mand,
        jokers_spendable,
        values_left,
        Tally::default(),
        &mut scratch,
        &mut out,
    );
    out
}

struct Scratch {
    slots: Vec<RunSymbol>,
    actions: Vec<SymbolAction>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    alpha: i32,
    beta: i32,
    free_used: u8,
    mand_used: u8,
    jokers_placed: u8,
    jokers_released: u8,
}

/// Result of extending `symbol` with one tile of the given kind.
fn extend_symbol(
    symbol: RunSymbol,
    kind: RunTileKind,
    mandatory_tile: bool,
) -> (RunSymbol, i32, i32) {
    let real = |k: RunTileKind| (k == RunTileKind::Real) as i32;
    match symbol {
        RunSymbol::Empty => (RunSymbol::One { kind, mandatory: mandatory_tile }, 0, 0),
        RunSymbol::One { kind: prev, mandatory } => (
            RunSymbol::Two { prev, last: kind, mandatory: mandatory || mandatory_tile },
            0,
            0,
        ),
        RunSymbol::Two { prev, last, .. } => {
            // The run becomes valid: bank the new tile plus the two covered
            // positions, skipping joker positions.
            let alpha = real(kind) + real(last) + real(prev);
            let beta = -real(last) - 2 * real(prev);
            (RunSymbol::Complete, alpha, beta)
        }
        RunSymbol::Complete => (RunSymbol::Complete, real(kind), 0),
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    groups: &[(RunSymbol, u8)],
    index: usize,
    free_left: u8,
    mand_left: u8,
    jokers_left: u8,
    values_left: Option<u16>,
    tally: Tally,
    scratch: &mut Scratch,
    out: &mut Vec<RawTransition>,
) {
    if index == groups.len() {
        add_starts(free_left, mand_left, jokers_left, values_left, tally, scratch, out);
        return;
    }

    let (symbol, count) = groups[index];
    let extendable = match (symbol, values_left) {
        // Starts are handled by `add_starts` on the reset slots.
        (RunSymbol::Empty, _) => false,
        // A length-1 run extended now needs one more value to complete.
        (RunSymbol::One { .. }, Some(left)) => left >= 1,
        _ => true,
    };

    let max_extend = if extendable { count } else { 0 };
    for free in 0..=max_extend.min(free_left) {
        for mand in 0..=(max_extend - free).min(mand_left) {
            for jokers in 0..=(max_extend - free - mand).min(jokers_left) {
                let resets = count - free - mand - jokers;
                if resets > 0 && symbol.is_mandatory() {
                    continue;
                }

                let mut tally = tally;
                let slots_before = scratch.slots.len();
                for _ in 0..free {
                    let (next, a, b) = extend_symbol(symbol, RunTileKind::Real, false);
                    scratch.slots.push(next);
                    tally.alpha += a;
                    tally.beta += b;
                }
                for _ in 0..mand {
                    let (next, a, b) = extend_symbol(symbol, RunTileKind::Real, true);
                    scratch.slots.push(next);
                    tally.alpha += a;
                    tally.beta += b;
                }
                for _ in 0..jokers {
                    let (next, a, b) = extend_symbol(symbol, RunTileKind::Joker, false);
                    scratch.slots.push(next);
                    tally.alpha += a;
                    tally.beta += b;
                }
                for _ in 0..resets {
                    scratch.slots.push(RunSymbol::Empty);
                }
                tally.free_used += free;
                tally.mand_used += mand;
                tally.jokers_placed += jokers;
                tally.jokers_released += resets * symbol.committed_jokers();

                scratch.actions.push(SymbolAction {
                    symbol,
                    extend_free: free,
                    extend_mand: mand,
                    extend_jokers: jokers,
                    resets,
                });
                recurse(
                    groups,
                    index + 1,
                    free_left - free,
                    mand_left - mand,
                    jokers_left - jokers,
                    values_left,
                    tally,
                    scratch,
                    out,
                );
                scratch.actions.pop();
                scratch.slots.truncate(slots_before);
            }
        }
    }
}

/// Second stage: leftover tiles may start fresh runs in any slot that is
/// empty after the extend/reset stage, including just-reset slots.
fn add_starts(
    free_left: u8,
    mand_left: u8,
    jokers_left: u8,
    values_left: Option<u16>,
    tally: Tally,
    scratch: &mut Scratch,
    out: &mut Vec<RawTransition>,
) {
    let empty_slots =
        scratch.slots.iter().filter(|s| **s == RunSymbol::Empty).count() as u8;
    // A run started now needs two more values to complete.
    let startable = values_left.map_or(true, |left| left >= 2);
    let max_starts = if startable { empty_slots } else { 0 };

    for free in 0..=max_starts.min(free_left) {
        for mand in 0..=(max_starts - free).min(mand_left) {
            for jokers in 0..=(max_starts - free - mand).min(jokers_left) {
                let mut slots = scratch.slots.clone();
                let mut replaced = 0usize;
                for slot in slots.iter_mut() {
                    if *slot != RunSymbol::Empty {
                        continue;
                    }
                    let started = replaced as u8;
                    *slot = if started < free {
                        RunSymbol::One { kind: RunTileKind::Real, mandatory: false }
                    } else if started < free + mand {
                        RunSymbol::One { kind: RunTileKind::Real, mandatory: true }
                    } else if started < free + mand + jokers {
                        RunSymbol::One { kind: RunTileKind::Joker, mandatory: false }
                    } else {
                        break;
                    };
                    replaced += 1;
                }
                let mut actions = scratch.actions.clone();
                if free + mand + jokers > 0 {
                    actions.push(SymbolAction {
                        symbol: RunSymbol::Empty,
                        extend_free: free,
                        extend_mand: mand,
                        extend_jokers: jokers,
                        resets: 0,
                    });
                }
                out.push(RawTransition {
                    next: SuitRunState::from_slots(slots),
                    alpha: tally.alpha,
                    beta: tally.beta,
                    free_used: tally.free_used + free,
                    mand_used: tally.mand_used + mand,
                    jokers_placed: tally.jokers_placed + jokers,
                    jokers_released: tally.jokers_released,
                    actions,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::state::{RunSymbol, RunTileKind, SuitRunState};

    fn two(prev: RunTileKind, last: RunTileKind, mandatory: bool) -> RunSymbol {
        RunSymbol::Two { prev, last, mandatory }
    }

    #[test]
    fn single_slot_length_two_has_three_choices() {
        let state = SuitRunState::from_slots(vec![two(
            RunTileKind::Real,
            RunTileKind::Real,
            false,
        )]);
        let mut transitions = make_runs(&state, 1, 0, 0, 5);
        transitions.sort_by_key(|t| t.deferred_score);
        assert_eq!(transitions.len(), 3);

        // Reset and donate the tile to groups.
        assert_eq!(transitions[0].next, SuitRunState::empty(1));
        assert_eq!(transitions[0].real_used, 0);
        assert_eq!(transitions[0].deferred_score, 0);

        // Reset and restart a fresh run with the tile.
        assert_eq!(
            transitions[1].next,
            SuitRunState::from_slots(vec![RunSymbol::One {
                kind: RunTileKind::Real,
                mandatory: false,
            }])
        );
        assert_eq!(transitions[1].real_used, 1);
        assert_eq!(transitions[1].deferred_score, 0);

        // Complete the run: scores 3 + 4 + 5.
        assert_eq!(transitions[2].next, SuitRunState::from_slots(vec![RunSymbol::Complete]));
        assert_eq!(transitions[2].deferred_score, 12);
        assert_eq!(transitions[2].real_used, 1);
    }

    #[test]
    fn joker_positions_do_not_score() {
        // Length-2 slot whose most recent position (value-1) is a joker:
        // completing at value 5 scores 3 + 5 only.
        let state = SuitRunState::from_slots(vec![two(
            RunTileKind::Real,
            RunTileKind::Joker,
            false,
        )]);
        let transitions = make_runs(&state, 1, 0, 0, 5);
        let complete = transitions
            .iter()
            .find(|t| t.next == SuitRunState::from_slots(vec![RunSymbol::Complete]))
            .unwrap();
        assert_eq!(complete.deferred_score, 8);
    }

    #[test]
    fn both_open_runs_are_tried() {
        // One incomplete run and one complete run: a single tile of value 9
        // may extend either; both transitions must be emitted.
        let state = SuitRunState::from_slots(vec![
            RunSymbol::One { kind: RunTileKind::Real, mandatory: false },
            RunSymbol::Complete,
        ]);
        let transitions = make_runs(&state, 1, 0, 0, 9);
        let extended_one = SuitRunState::from_slots(vec![
            two(RunTileKind::Real, RunTileKind::Real, false),
            RunSymbol::Empty,
        ]);
        let extended_complete =
            SuitRunState::from_slots(vec![RunSymbol::Empty, RunSymbol::Complete]);
        assert!(transitions.iter().any(|t| t.next == extended_one && t.deferred_score == 0));
        assert!(transitions
            .iter()
            .any(|t| t.next == extended_complete && t.real_used == 1
                && t.deferred_score == 9));
        // Plus: reset both with a restart, and reset both without.
        assert_eq!(transitions.len(), 4);
    }

    #[test]
    fn mandatory_slot_cannot_be_dropped() {
        let state = SuitRunState::from_slots(vec![two(
            RunTileKind::Real,
            RunTileKind::Real,
            true,
        )]);
        let transitions = make_runs(&state, 0, 0, 0, 7);
        assert!(transitions.is_empty());
    }

    #[test]
    fn abandoning_joker_slots_releases_them() {
        let state = SuitRunState::from_slots(vec![two(
            RunTileKind::Joker,
            RunTileKind::Joker,
            false,
        )]);
        let transitions = make_runs(&state, 0, 0, 0, 4);
        assert_eq!(transitions.len(), 1);
        assert_eq!(transitions[0].jokers_released, 2);
        assert_eq!(transitions[0].next, SuitRunState::empty(1));
    }

    #[test]
    fn mandatory_tile_extension_sets_the_flag() {
        let state = SuitRunState::empty(1);
        let transitions = make_runs(&state, 0, 1, 0, 3);
        let started = transitions.iter().find(|t| t.mandatory_used == 1).unwrap();
        assert_eq!(
            started.next,
            SuitRunState::from_slots(vec![RunSymbol::One {
                kind: RunTileKind::Real,
                mandatory: true,
            }])
        );
    }

    #[test]
    fn doomed_starts_are_pruned_internally() {
        let state = SuitRunState::empty(2);
        // One value left: starting a run can never complete it.
        let pruned = raw_transitions(&state, 2, 0, 0, Some(1));
        assert_eq!(pruned.len(), 1);
        assert_eq!(pruned[0].free_used, 0);
        // The public enumeration keeps every start.
        let full = make_runs(&state, 2, 0, 0, 13);
        assert_eq!(full.len(), 3);
    }
}
