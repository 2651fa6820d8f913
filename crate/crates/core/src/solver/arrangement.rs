//! Concrete solutions: lists of placed runs and groups with joker
//! positions, plus an independent verifier that re-checks every invariant
//! against a problem's supplies.

use thiserror::Error;

use crate::tileset::{Problem, Tile};

use super::state::RunTileKind;

/// A placed run: consecutive values of one suit starting at `start`, with
/// the kind of the tile at each position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunPlacement {
    pub suit: u8,
    pub start: u16,
    pub tiles: Vec<RunTileKind>,
}

impl RunPlacement {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// 0-based offsets of the joker positions.
    pub fn joker_offsets(&self) -> Vec<usize> {
        self.tiles
            .iter()
            .enumerate()
            .filter_map(|(i, k)| (*k == RunTileKind::Joker).then_some(i))
            .collect()
    }

    fn real_value_sum(&self) -> u64 {
        self.tiles
            .iter()
            .enumerate()
            .filter(|(_, k)| **k == RunTileKind::Real)
            .map(|(i, _)| self.start as u64 + i as u64)
            .sum()
    }

    fn joker_count(&self) -> u32 {
        self.tiles.iter().filter(|k| **k == RunTileKind::Joker).count() as u32
    }
}

/// A placed group: distinct real suits of one value plus joker slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPlacement {
    pub value: u16,
    pub suits: Vec<u8>,
    pub jokers: u8,
}

impl GroupPlacement {
    pub fn members(&self) -> usize {
        self.suits.len() + self.jokers as usize
    }
}

/// A complete solution with its claimed score.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Arrangement {
    pub runs: Vec<RunPlacement>,
    pub groups: Vec<GroupPlacement>,
    pub score: u64,
}

impl Arrangement {
    /// Real tiles placed, per the placements themselves.
    pub fn real_tiles_used(&self) -> u32 {
        let in_runs: u32 = self
            .runs
            .iter()
            .map(|r| r.tiles.iter().filter(|k| **k == RunTileKind::Real).count() as u32)
            .sum();
        let in_groups: u32 = self.groups.iter().map(|g| g.suits.len() as u32).sum();
        in_runs + in_groups
    }

    pub fn jokers_used(&self) -> u32 {
        let in_runs: u32 = self.runs.iter().map(|r| r.joker_count()).sum();
        let in_groups: u32 = self.groups.iter().map(|g| g.jokers as u32).sum();
        in_runs + in_groups
    }

    pub fn tiles_used(&self) -> u32 {
        self.real_tiles_used() + self.jokers_used()
    }

    /// Score recomputed from the placements: sum of real tile values.
    pub fn recompute_score(&self) -> u64 {
        let runs: u64 = self.runs.iter().map(|r| r.real_value_sum()).sum();
        let groups: u64 = self
            .groups
            .iter()
            .map(|g| g.value as u64 * g.suits.len() as u64)
            .sum();
        runs + groups
    }

    /// Penalty points for jokers left unplaced: 25 per idle joker.
    pub fn joker_penalty(&self, problem: &Problem) -> u64 {
        let available = problem.hand().jokers() as u64 + problem.table().jokers() as u64;
        25 * available.saturating_sub(self.jokers_used() as u64)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("run of length {len} is shorter than 3")]
    RunTooShort { len: usize },
    #[error("run spans values {start}..={end}, outside 1..={n}")]
    RunOutOfRange { start: u16, end: u32, n: u16 },
    #[error("run uses suit {suit}, outside 1..={k}")]
    RunSuitOutOfRange { suit: u8, k: u8 },
    #[error("group at value {value} has {members} members, fewer than 3")]
    GroupTooSmall { value: u16, members: usize },
    #[error("group at value {value} has {members} members, more than the {k} suits")]
    GroupTooLarge { value: u16, members: usize, k: u8 },
    #[error("group at value {value} repeats suit {suit}")]
    GroupDuplicateSuit { value: u16, suit: u8 },
    #[error("group tile {tile} is outside the tile set")]
    GroupTileOutOfRange { tile: Tile },
    #[error("usage of tile {tile} exceeds the {supply} available")]
    SupplyExceeded { tile: Tile, supply: u8 },
    #[error("{used} jokers used but only {supply} available")]
    JokerSupplyExceeded { used: u32, supply: u8 },
    #[error("table tile {tile} is not consumed by the arrangement")]
    TableTileUnused { tile: Tile },
    #[error("table holds {required} jokers but only {used} are placed")]
    TableJokerUnused { required: u8, used: u32 },
    #[error("declared score {declared} differs from recomputed score {actual}")]
    ScoreMismatch { declared: u64, actual: u64 },
}

/// Check every arrangement invariant against the problem: set validity,
/// supply bounds, full consumption of table tiles and jokers, and score
/// consistency. Independent of the solver's own bookkeeping.
pub fn verify_arrangement(problem: &Problem, arrangement: &Arrangement) -> Result<(), VerifyError> {
    let params = problem.params();
    let n = params.n();
    let k = params.k();

    let mut used = vec![0u32; params.tile_types()];
    let cell = |value: u16, suit: u8| (suit as usize - 1) * n as usize + value as usize - 1;

    for run in &arrangement.runs {
        if run.len() < 3 {
            return Err(VerifyError::RunTooShort { len: run.len() });
        }
        if run.suit < 1 || run.suit > k {
            return Err(VerifyError::RunSuitOutOfRange { suit: run.suit, k });
        }
        let end = run.start as u32 + run.len() as u32 - 1;
        if run.start < 1 || end > n as u32 {
            return Err(VerifyError::RunOutOfRange { start: run.start, end, n });
        }
        for (offset, kind) in run.tiles.iter().enumerate() {
            if *kind == RunTileKind::Real {
                used[cell(run.start + offset as u16, run.suit)] += 1;
            }
        }
    }

    for group in &arrangement.groups {
        let members = group.members();
        if members < 3 {
            return Err(VerifyError::GroupTooSmall { value: group.value, members });
        }
        if members > k as usize {
            return Err(VerifyError::GroupTooLarge { value: group.value, members, k });
        }
        let mut seen = vec![false; k as usize + 1];
        for &suit in &group.suits {
            let tile = Tile::new(group.value, suit);
            if !params.contains(tile) {
                return Err(VerifyError::GroupTileOutOfRange { tile });
            }
            if seen[suit as usize] {
                return Err(VerifyError::GroupDuplicateSuit { value: group.value, suit });
            }
            seen[suit as usize] = true;
            used[cell(group.value, suit)] += 1;
        }
    }

    let hand = problem.hand();
    let table = problem.table();
    for suit in 1..=k {
        for value in 1..=n {
            let supply = hand.count(value, suit) + table.count(value, suit);
            let used_here = used[cell(value, suit)];
            if used_here > supply as u32 {
                return Err(VerifyError::SupplyExceeded { tile: Tile::new(value, suit), supply });
            }
            if used_here < table.count(value, suit) as u32 {
                return Err(VerifyError::TableTileUnused { tile: Tile::new(value, suit) });
            }
        }
    }

    let joker_supply = hand.jokers() + table.jokers();
    let jokers_used = arrangement.jokers_used();
    if jokers_used > joker_supply as u32 {
        return Err(VerifyError::JokerSupplyExceeded { used: jokers_used, supply: joker_supply });
    }
    if jokers_used < table.jokers() as u32 {
        return Err(VerifyError::TableJokerUnused { required: table.jokers(), used: jokers_used });
    }

    let actual = arrangement.recompute_score();
    if actual != arrangement.score {
        return Err(VerifyError::ScoreMismatch { declared: arrangement.score, actual });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tileset::{Hand, TileSetParams};

    fn figure_problem() -> Problem {
        let params = TileSetParams::new(13, 4, 2, 2).unwrap();
        let hand = Hand::from_tiles(
            &params,
            [
                Tile::new(3, 1),
                Tile::new(3, 2),
                Tile::new(3, 3),
                Tile::new(6, 2),
                Tile::new(7, 2),
                Tile::new(8, 2),
                Tile::new(9, 2),
            ],
            0,
        )
        .unwrap();
        Problem::hand_only(params, hand).unwrap()
    }

    fn real_run(suit: u8, start: u16, len: usize) -> RunPlacement {
        RunPlacement { suit, start, tiles: vec![RunTileKind::Real; len] }
    }

    #[test]
    fn accepts_the_reference_solution() {
        let problem = figure_problem();
        let arrangement = Arrangement {
            runs: vec![real_run(2, 6, 4)],
            groups: vec![GroupPlacement { value: 3, suits: vec![1, 2, 3], jokers: 0 }],
            score: 39,
        };
        assert_eq!(verify_arrangement(&problem, &arrangement), Ok(()));
        assert_eq!(arrangement.recompute_score(), 39);
        assert_eq!(arrangement.joker_penalty(&problem), 0);
    }

    #[test]
    fn rejects_short_run() {
        let problem = figure_problem();
        let arrangement = Arrangement { runs: vec![real_run(2, 6, 2)], groups: vec![], score: 13 };
        assert_eq!(
            verify_arrangement(&problem, &arrangement),
            Err(VerifyError::RunTooShort { len: 2 })
        );
    }

    #[test]
    fn rejects_duplicate_suit_in_group() {
        let params = TileSetParams::new(13, 4, 2, 2).unwrap();
        let hand = Hand::from_tiles(
            &params,
            [Tile::new(3, 1), Tile::new(3, 1), Tile::new(3, 3)],
            0,
        )
        .unwrap();
        let problem = Problem::hand_only(params, hand).unwrap();
        let arrangement = Arrangement {
            runs: vec![],
            groups: vec![GroupPlacement { value: 3, suits: vec![1, 1, 3], jokers: 0 }],
            score: 9,
        };
        assert_eq!(
            verify_arrangement(&problem, &arrangement),
            Err(VerifyError::GroupDuplicateSuit { value: 3, suit: 1 })
        );
    }

    #[test]
    fn rejects_unused_table_tile() {
        let params = TileSetParams::new(13, 4, 2, 2).unwrap();
        let hand = Hand::empty(&params);
        let table = Hand::from_tiles(&params, [Tile::new(5, 1)], 0).unwrap();
        let problem = Problem::new(params, hand, table).unwrap();
        let arrangement = Arrangement::default();
        assert_eq!(
            verify_arrangement(&problem, &arrangement),
            Err(VerifyError::TableTileUnused { tile: Tile::new(5, 1) })
        );
    }

    #[test]
    fn rejects_score_mismatch_and_oversized_group() {
        let problem = figure_problem();
        let bad_score = Arrangement {
            runs: vec![real_run(2, 6, 4)],
            groups: vec![],
            score: 31,
        };
        assert_eq!(
            verify_arrangement(&problem, &bad_score),
            Err(VerifyError::ScoreMismatch { declared: 31, actual: 30 })
        );

        let params = *problem.params();
        let hand = Hand::from_tiles(
            &params,
            [Tile::new(3, 1), Tile::new(3, 2), Tile::new(3, 3), Tile::new(3, 4)],
            1,
        )
        .unwrap();
        let joker_problem = Problem::hand_only(params, hand).unwrap();
        let oversized = Arrangement {
            runs: vec![],
            groups: vec![GroupPlacement { value: 3, suits: vec![1, 2, 3, 4], jokers: 1 }],
            score: 12,
        };
        assert_eq!(
            verify_arrangement(&joker_problem, &oversized),
            Err(VerifyError::GroupTooLarge { value: 3, members: 5, k: 4 })
        );
    }
}
