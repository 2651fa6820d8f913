//! Per-suit run state: each suit owns `m` run slots, and only the clipped
//! length of a slot (0, 1, 2, or complete) matters for future decisions.
//! Incomplete slots additionally remember whether their committed positions
//! hold real tiles or jokers, and whether a table tile is committed, since
//! those determine deferred scoring and the table constraint.

use std::fmt;

use crate::tileset::SET_SIZE;

/// Whether a committed run position holds a real tile or a joker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RunTileKind {
    Real,
    Joker,
}

impl RunTileKind {
    fn bit(self) -> u8 {
        match self {
            RunTileKind::Real => 0,
            RunTileKind::Joker => 1,
        }
    }
}

/// State of a single run slot, clipped at length `SET_SIZE`.
///
/// `Complete` carries no history: extending a complete run scores exactly
/// the new tile, and abandoning it loses nothing. Incomplete slots carry the
/// real/joker kind of each committed position plus a mandatory flag that
/// marks a committed table tile and forbids abandoning the slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RunSymbol {
    Empty,
    One { kind: RunTileKind, mandatory: bool },
    Two { prev: RunTileKind, last: RunTileKind, mandatory: bool },
    Complete,
}

impl RunSymbol {
    /// Clipped run length represented by this symbol.
    pub fn length(&self) -> u8 {
        match self {
            RunSymbol::Empty => 0,
            RunSymbol::One { .. } => 1,
            RunSymbol::Two { .. } => 2,
            RunSymbol::Complete => SET_SIZE,
        }
    }

    pub fn is_incomplete(&self) -> bool {
        matches!(self, RunSymbol::One { .. } | RunSymbol::Two { .. })
    }

    pub fn is_mandatory(&self) -> bool {
        match self {
            RunSymbol::One { mandatory, .. } | RunSymbol::Two { mandatory, .. } => *mandatory,
            _ => false,
        }
    }

    /// Jokers committed to this slot, released back to the pool if the slot
    /// is abandoned.
    pub fn committed_jokers(&self) -> u8 {
        match self {
            RunSymbol::Empty | RunSymbol::Complete => 0,
            RunSymbol::One { kind, .. } => (*kind == RunTileKind::Joker) as u8,
            RunSymbol::Two { prev, last, .. } => {
                (*prev == RunTileKind::Joker) as u8 + (*last == RunTileKind::Joker) as u8
            }
        }
    }

    /// Stable single-byte encoding, used for canonical state keys.
    pub fn code(&self) -> u8 {
        match self {
            RunSymbol::Empty => 0,
            RunSymbol::One { kind, mandatory } => 1 + kind.bit() + 2 * *mandatory as u8,
            RunSymbol::Two { prev, last, mandatory } => {
                5 + prev.bit() + 2 * last.bit() + 4 * *mandatory as u8
            }
            RunSymbol::Complete => 13,
        }
    }

    /// True when the symbol belongs to the basic four-letter alphabet
    /// (no joker positions, no mandatory flag).
    pub fn is_basic(&self) -> bool {
        match self {
            RunSymbol::Empty | RunSymbol::Complete => true,
            RunSymbol::One { kind, mandatory } => {
                *kind == RunTileKind::Real && !*mandatory
            }
            RunSymbol::Two { prev, last, mandatory } => {
                *prev == RunTileKind::Real && *last == RunTileKind::Real && !*mandatory
            }
        }
    }

    pub fn basic(length: u8) -> RunSymbol {
        match length {
            0 => RunSymbol::Empty,
            1 => RunSymbol::One { kind: RunTileKind::Real, mandatory: false },
            2 => RunSymbol::Two {
                prev: RunTileKind::Real,
                last: RunTileKind::Real,
                mandatory: false,
            },
            _ => RunSymbol::Complete,
        }
    }
}

/// The run configuration of one suit: a multiset of exactly `m` run slots,
/// kept sorted so equal configurations compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuitRunState {
    slots: Vec<RunSymbol>,
}

impl SuitRunState {
    /// All slots empty.
    pub fn empty(m: u8) -> Self {
        SuitRunState { slots: vec![RunSymbol::Empty; m as usize] }
    }

    pub fn from_slots(mut slots: Vec<RunSymbol>) -> Self {
        slots.sort_unstable();
        SuitRunState { slots }
    }

    pub fn slots(&self) -> &[RunSymbol] {
        &self.slots
    }

    pub fn slot_count(&self) -> u8 {
        self.slots.len() as u8
    }

    /// Distinct symbols with multiplicities, in sorted order.
    pub fn symbol_counts(&self) -> Vec<(RunSymbol, u8)> {
        let mut out: Vec<(RunSymbol, u8)> = Vec::new();
        for &symbol in &self.slots {
            match out.last_mut() {
                Some((last, count)) if *last == symbol => *count += 1,
                _ => out.push((symbol, 1)),
            }
        }
        out
    }

    /// Canonical byte encoding (sorted symbol codes).
    pub fn encode(&self) -> Vec<u8> {
        self.slots.iter().map(|s| s.code()).collect()
    }

    pub fn is_basic(&self) -> bool {
        self.slots.iter().all(|s| s.is_basic())
    }

    /// No incomplete runs: every slot is either empty or complete. This is
    /// the only acceptable shape once the value scan runs past `n`.
    pub fn is_settled(&self) -> bool {
        self.slots.iter().all(|s| !s.is_incomplete())
    }

    pub fn has_mandatory(&self) -> bool {
        self.slots.iter().any(|s| s.is_mandatory())
    }
}

impl fmt::Display for SuitRunState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, slot) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", slot.length())?;
        }
        write!(f, "}}")
    }
}

/// The basic (flag-free) per-suit state space for a given `m`: every
/// multiset of `m` clipped lengths drawn from {0, 1, 2, complete}. Used by
/// the dense solver engine for array-indexed states.
#[derive(Debug, Clone)]
pub struct BasicStateSpace {
    m: u8,
    /// Length multiset per state, as counts of lengths 0..=3.
    states: Vec<[u8; 4]>,
}

impl BasicStateSpace {
    pub fn new(m: u8) -> Self {
        let mut states = Vec::new();
        let m = m.max(1);
        for c3 in 0..=m {
            for c2 in 0..=m - c3 {
                for c1 in 0..=m - c3 - c2 {
                    let c0 = m - c3 - c2 - c1;
                    states.push([c0, c1, c2, c3]);
                }
            }
        }
        states.sort_unstable();
        BasicStateSpace { m, states }
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn counts(&self, index: usize) -> [u8; 4] {
        self.states[index]
    }

    pub fn index_of(&self, counts: [u8; 4]) -> usize {
        self.states.binary_search(&counts).expect("counts sum to m")
    }

    /// Index of the all-empty configuration.
    pub fn empty_index(&self) -> usize {
        self.index_of([self.m, 0, 0, 0])
    }

    /// States with no incomplete run, the only valid shapes at the end of
    /// the scan.
    pub fn is_settled(&self, index: usize) -> bool {
        let [_, c1, c2, _] = self.states[index];
        c1 == 0 && c2 == 0
    }

    pub fn to_state(&self, index: usize) -> SuitRunState {
        let counts = self.states[index];
        let mut slots = Vec::new();
        for (length, &count) in counts.iter().enumerate() {
            for _ in 0..count {
                slots.push(RunSymbol::basic(length as u8));
            }
        }
        SuitRunState::from_slots(slots)
    }

    pub fn index_of_state(&self, state: &SuitRunState) -> usize {
        let mut counts = [0u8; 4];
        for slot in state.slots() {
            counts[slot.length().min(3) as usize] += 1;
        }
        self.index_of(counts)
    }
}

/// The tetrahedral number `(m+1)(m+2)(m+3)/6`: the count of basic per-suit
/// configurations for a given `m`.
pub fn basic_state_count(m: u8) -> usize {
    let m = m as usize;
    (m + 1) * (m + 2) * (m + 3) / 6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_codes_are_distinct() {
        let mut codes = std::collections::HashSet::new();
        let kinds = [RunTileKind::Real, RunTileKind::Joker];
        codes.insert(RunSymbol::Empty.code());
        codes.insert(RunSymbol::Complete.code());
        for kind in kinds {
            for mandatory in [false, true] {
                codes.insert(RunSymbol::One { kind, mandatory }.code());
            }
        }
        for prev in kinds {
            for last in kinds {
                for mandatory in [false, true] {
                    codes.insert(RunSymbol::Two { prev, last, mandatory }.code());
                }
            }
        }
        assert_eq!(codes.len(), 14);
    }

    #[test]
    fn state_is_order_independent() {
        let a = SuitRunState::from_slots(vec![RunSymbol::Complete, RunSymbol::Empty]);
        let b = SuitRunState::from_slots(vec![RunSymbol::Empty, RunSymbol::Complete]);
        assert_eq!(a, b);
        assert_eq!(a.encode(), b.encode());
    }

    #[test]
    fn basic_space_matches_tetrahedral_numbers() {
        for m in 1..=6u8 {
            let space = BasicStateSpace::new(m);
            assert_eq!(space.len(), basic_state_count(m));
        }
        assert_eq!(basic_state_count(1), 4);
        assert_eq!(basic_state_count(2), 10);
    }

    #[test]
    fn basic_space_round_trips_states() {
        let space = BasicStateSpace::new(2);
        for i in 0..space.len() {
            let state = space.to_state(i);
            assert!(state.is_basic());
            assert_eq!(space.index_of_state(&state), i);
        }
        assert!(space.is_settled(space.empty_index()));
    }

    #[test]
    fn m2_configurations_are_the_ten_known_ones() {
        let space = BasicStateSpace::new(2);
        let mut listed: Vec<(u8, u8)> = (0..space.len())
            .map(|i| {
                let s = space.to_state(i);
                (s.slots()[0].length(), s.slots()[1].length())
            })
            .collect();
        listed.sort_unstable();
        let expected = vec![
            (0, 0),
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 1),
            (1, 2),
            (1, 3),
            (2, 2),
            (2, 3),
            (3, 3),
        ];
        assert_eq!(listed, expected);
    }
}
