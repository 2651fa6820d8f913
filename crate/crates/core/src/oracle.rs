//! Exhaustive reference solver, independent of the dynamic program: it
//! enumerates multisets of concrete candidate sets (runs with explicit
//! joker positions, groups with joker slots) against the pooled supply and
//! takes the best total. Exponential, so strictly a test instrument for
//! small instances.

use thiserror::Error;

use crate::tileset::Problem;

/// Caps keeping the exhaustive search in check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_tiles: u32,
    pub max_nodes: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_tiles: 16, max_nodes: 200_000_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("problem holds {tiles} tiles, over the oracle budget of {max}")]
    TooManyTiles { tiles: u32, max: u32 },
    #[error("oracle search exceeded the node budget of {max}")]
    NodeBudget { max: u64 },
}

/// One placeable set against the pooled supply.
struct Candidate {
    cells: Vec<usize>,
    score: u64,
    jokers: u8,
}

struct Search<'a> {
    candidates: &'a [Candidate],
    supply: Vec<u8>,
    hand_counts: Vec<u8>,
    uncovered_cells: u32,
    jokers_left: u8,
    mand_jokers: u8,
    total_jokers: u8,
    best: Option<u64>,
    nodes: u64,
    max_nodes: u64,
}

/// Exact optimum by exhaustive search, or `Ok(None)` when the table
/// constraint cannot be satisfied.
pub fn oracle_max_score(
    problem: &Problem,
    budget: &OracleBudget,
) -> Result<Option<u64>, OracleError> {
    let params = problem.params();
    let tiles = problem.hand().total_tiles() + problem.table().total_tiles();
    if tiles > budget.max_tiles {
        return Err(OracleError::TooManyTiles { tiles, max: budget.max_tiles });
    }

    let n = params.n();
    let k = params.k();
    let cell = |value: u16, suit: u8| (suit as usize - 1) * n as usize + value as usize - 1;

    let pooled = problem.pooled();
    let mut supply = vec![0u8; params.tile_types()];
    let mut hand_counts = vec![0u8; params.tile_types()];
    for suit in 1..=k {
        for value in 1..=n {
            supply[cell(value, suit)] = pooled.count(value, suit);
            hand_counts[cell(value, suit)] = problem.hand().count(value, suit);
        }
    }
    let total_jokers = pooled.jokers();

    let mut candidates = Vec::new();
    // Runs with every feasible joker pattern.
    for suit in 1..=k {
        for start in 1..=n {
            let max_len = (n - start + 1) as usize;
            for len in 3..=max_len {
                for pattern in position_subsets(len, total_jokers) {
                    let mut cells = Vec::with_capacity(len - pattern.len());
                    let mut score = 0u64;
                    let mut ok = true;
                    for offset in 0..len {
                        if pattern.contains(&offset) {
                            continue;
                        }
                        let value = start + offset as u16;
                        let c = cell(value, suit);
                        if supply[c] == 0 {
                            ok = false;
                            break;
                        }
                        cells.push(c);
                        score += value as u64;
                    }
                    if ok {
                        candidates.push(Candidate { cells, score, jokers: pattern.len() as u8 });
                    }
                }
            }
        }
    }
    // Groups: a set of real suits plus joker slots, at most k members.
    for value in 1..=n {
        for mask in 0u32..(1 << k) {
            let real = mask.count_ones();
            let mut cells = Vec::with_capacity(real as usize);
            let mut ok = true;
            for suit in 1..=k {
                if mask >> (suit - 1) & 1 == 1 {
                    let c = cell(value, suit);
                    if supply[c] == 0 {
                        ok = false;
                        break;
                    }
                    cells.push(c);
                }
            }
            if !ok {
                continue;
            }
            for jokers in 0..=total_jokers {
                let members = real + jokers as u32;
                if members >= 3 && members <= k as u32 {
                    candidates.push(Candidate {
                        cells: cells.clone(),
                        score: value as u64 * real as u64,
                        jokers,
                    });
                }
            }
        }
    }

    let uncovered_cells = (0..params.tile_types())
        .filter(|&c| supply[c] > hand_counts[c])
        .count() as u32;

    let mut search = Search {
        candidates: &candidates,
        supply,
        hand_counts,
        uncovered_cells,
        jokers_left: total_jokers,
        mand_jokers: problem.table().jokers(),
        total_jokers,
        best: None,
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    let ok = search.dfs(0, 0);
    if !ok {
        return Err(OracleError::NodeBudget { max: budget.max_nodes });
    }
    Ok(search.best)
}

/// All subsets of `0..len` with at most `max` elements, smallest first.
fn position_subsets(len: usize, max: u8) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for subset in &frontier {
            let from = subset.last().map_or(0, |&p| p + 1);
            for pos in from..len {
                let mut extended = subset.clone();
                extended.push(pos);
                next.push(extended);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

impl Search<'_> {
    fn dfs(&mut self, from: usize, score: u64) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return false;
        }
        let jokers_used = self.total_jokers - self.jokers_left;
        if self.uncovered_cells == 0 && jokers_used >= self.mand_jokers {
            if self.best.is_none_or(|b| score > b) {
                self.best = Some(score);
            }
        }
        for i in from..self.candidates.len() {
            let candidate = &self.candidates[i];
            if candidate.jokers > self.jokers_left {
                continue;
            }
            if candidate.cells.iter().any(|&c| self.supply[c] == 0) {
                continue;
            }
            for &c in &candidate.cells {
                self.supply[c] -= 1;
                if self.supply[c] == self.hand_counts[c] {
                    self.uncovered_cells -= 1;
                }
            }
            self.jokers_left -= candidate.jokers;
            let ok = self.dfs(i, score + candidate.score);
            self.jokers_left += candidate.jokers;
            for &c in &candidate.cells {
                if self.supply[c] == self.hand_counts[c] {
                    self.uncovered_cells += 1;
                }
                self.supply[c] += 1;
            }
            if !ok {
                return false;
            }
        }
        true
    }
}
