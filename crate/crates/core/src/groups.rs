//! Group formation at a single tile value: counting the ways groups can be
//! formed, and the maximum number of tiles placeable into disjoint groups
//! given per-suit supplies, mandatory tiles and jokers.

use num_bigint::BigUint;
use num_traits::One;

use crate::tileset::{TileSetParams, SET_SIZE};

/// Number of ways to form groups at one value with `k` suits and a single
/// copy of each tile: one (the empty formation) plus one per suit subset of
/// size `SET_SIZE..=k`.
pub fn count_group_formations(k: u8) -> BigUint {
    let mut total = BigUint::one();
    for size in SET_SIZE..=k {
        total += binomial(k as u64, size as u64);
    }
    total
}

fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::ZERO;
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Tiles of one value available for groups: free counts per suit, mandatory
/// (table) counts per suit, and jokers that may be spent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupUsageQuery {
    pub avail: Vec<u8>,
    pub mandatory: Vec<u8>,
    pub jokers_avail: u8,
}

impl GroupUsageQuery {
    pub fn free_only(avail: Vec<u8>) -> Self {
        let mandatory = vec![0; avail.len()];
        GroupUsageQuery { avail, mandatory, jokers_avail: 0 }
    }
}

/// For each exact joker spend `q` in `0..=jokers_avail`, the maximum number
/// of real tiles that can be placed into disjoint groups (`None` when no
/// formation consumes all mandatory tiles with that spend).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupUsageResult {
    pub per_joker_spend: Vec<Option<u32>>,
}

impl GroupUsageResult {
    /// Best real-tile usage over all feasible joker spends.
    pub fn best(&self) -> Option<(u8, u32)> {
        self.per_joker_spend
            .iter()
            .enumerate()
            .filter_map(|(q, used)| used.map(|u| (q as u8, u)))
            .max_by_key(|&(q, u)| (u, std::cmp::Reverse(q)))
    }
}

/// One group in a formation: the set of suits contributing a real tile plus
/// a number of joker slots. Total members `|suits| + jokers` lie in
/// `SET_SIZE..=k` and joker slots stand for suits outside the real set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupShape {
    pub suit_mask: u32,
    pub jokers: u8,
}

impl GroupShape {
    pub fn real_members(&self) -> u32 {
        self.suit_mask.count_ones()
    }

    pub fn members(&self) -> u32 {
        self.real_members() + self.jokers as u32
    }
}

/// Maximum real tiles usable in groups, per exact joker spend, by exhaustive
/// enumeration over multisets of group shapes. Mandatory tiles must all be
/// consumed; free tiles may be left out.
pub fn max_group_tiles(query: &GroupUsageQuery, params: &TileSetParams) -> GroupUsageResult {
    enumerate_formations(query, params, None)
}

/// A concrete formation achieving `max_group_tiles` for the given joker
/// spend, if that spend is feasible. Deterministic for fixed inputs.
pub fn group_formation_witness(
    query: &GroupUsageQuery,
    params: &TileSetParams,
    jokers_spent: u8,
) -> Option<Vec<GroupShape>> {
    let mut witness = vec![None; query.jokers_avail as usize + 1];
    enumerate_formations(query, params, Some(&mut witness));
    witness.into_iter().nth(jokers_spent as usize).flatten()
}

fn enumerate_formations(
    query: &GroupUsageQuery,
    params: &TileSetParams,
    mut witness: Option<&mut Vec<Option<Vec<GroupShape>>>>,
) -> GroupUsageResult {
    let k = params.k();
    debug_assert_eq!(query.avail.len(), k as usize);
    debug_assert_eq!(query.mandatory.len(), k as usize);

    let shapes = candidate_shapes(k, query.jokers_avail);
    let mut best: Vec<Option<u32>> = vec![None; query.jokers_avail as usize + 1];

    // Remaining real supply per suit (free + mandatory pooled; mandatory
    // coverage is checked per recorded formation).
    let mut supply: Vec<u8> = query
        .avail
        .iter()
        .zip(&query.mandatory)
        .map(|(&a, &m)| a + m)
        .collect();
    let mandatory_total: u32 = query.mandatory.iter().map(|&c| c as u32).sum();

    let mut chosen: Vec<GroupShape> = Vec::new();
    search(
        &shapes,
        0,
        &mut supply,
        query,
        mandatory_total,
        0,
        0,
        &mut chosen,
        &mut best,
        &mut witness,
    );

    GroupUsageResult { per_joker_spend: best }
}

fn candidate_shapes(k: u8, jokers_avail: u8) -> Vec<GroupShape> {
    let mut shapes = Vec::new();
    for mask in 0u32..(1 << k) {
        let real = mask.count_ones();
        for jokers in 0..=jokers_avail {
            let members = real + jokers as u32;
            if members >= SET_SIZE as u32 && members <= k as u32 {
                shapes.push(GroupShape { suit_mask: mask, jokers });
            }
        }
    }
    shapes
}

#[allow(clippy::too_many_arguments)]
fn search(
    shapes: &[GroupShape],
    from: usize,
    supply: &mut [u8],
    query: &GroupUsageQuery,
    mandatory_total: u32,
    real_used: u32,
    jokers_used: u8,
    chosen: &mut Vec<GroupShape>,
    best: &mut [Option<u32>],
    witness: &mut Option<&mut Vec<Option<Vec<GroupShape>>>>,
) {
    // Every prefix of a formation is itself a formation; record it if it
    // covers the mandatory tiles. Covering means each suit's usage reaches
    // its mandatory count: usage of suit i is avail_i + mandatory_i minus
    // what remains, so the check is remaining_i <= avail_i.
    let covers = supply
        .iter()
        .zip(&query.avail)
        .all(|(&remaining, &avail)| remaining <= avail);
    if covers || mandatory_total == 0 {
        let slot = &mut best[jokers_used as usize];
        if slot.is_none_or(|cur| real_used > cur) {
            *slot = Some(real_used);
            if let Some(w) = witness.as_deref_mut() {
                w[jokers_used as usize] = Some(chosen.clone());
            }
        }
    }

    for (i, shape) in shapes.iter().enumerate().skip(from) {
        if jokers_used + shape.jokers > query.jokers_avail {
            continue;
        }
        let mut fits = true;
        for suit in 0..supply.len() {
            if shape.suit_mask >> suit & 1 == 1 && supply[suit] == 0 {
                fits = false;
                break;
            }
        }
        if !fits {
            continue;
        }
        for suit in 0..supply.len() {
            if shape.suit_mask >> suit & 1 == 1 {
                supply[suit] -= 1;
            }
        }
        chosen.push(*shape);
        search(
            shapes,
            i,
            supply,
            query,
            mandatory_total,
            real_used + shape.real_members(),
            jokers_used + shape.jokers,
            chosen,
            best,
            witness,
        );
        chosen.pop();
        for suit in 0..supply.len() {
            if shape.suit_mask >> suit & 1 == 1 {
                supply[suit] += 1;
            }
        }
    }
}

/// Closed-form fast path for the joker-free, mandatory-free case: try each
/// group count `g` up to `m`; `g` groups can absorb `min(sum_i min(avail_i,
/// g), k*g)` tiles whenever that is at least `3g`.
pub fn max_group_tiles_closed_form(avail: &[u8], params: &TileSetParams) -> u32 {
    let k = params.k() as u32;
    let mut best = 0;
    for g in 1..=params.m() as u32 {
        let clipped: u32 = avail.iter().map(|&a| (a as u32).min(g)).sum();
        let usable = clipped.min(k * g);
        if usable >= SET_SIZE as u32 * g {
            best = best.max(usable);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u16, k: u8, m: u8, j: u8) -> TileSetParams {
        TileSetParams::new(n, k, m, j).unwrap()
    }

    #[test]
    fn group_formation_counts() {
        assert_eq!(count_group_formations(4), BigUint::from(6u32));
        assert_eq!(count_group_formations(3), BigUint::from(2u32));
        assert_eq!(count_group_formations(5), BigUint::from(17u32));
        // k < 3 leaves only the empty formation.
        assert_eq!(count_group_formations(1), BigUint::from(1u32));
        assert_eq!(count_group_formations(2), BigUint::from(1u32));
    }

    #[test]
    fn single_group_of_three() {
        let p = params(13, 4, 2, 0);
        let q = GroupUsageQuery::free_only(vec![1, 1, 1, 0]);
        let r = max_group_tiles(&q, &p);
        assert_eq!(r.per_joker_spend, vec![Some(3)]);
    }

    #[test]
    fn two_full_groups() {
        let p = params(13, 4, 2, 0);
        let q = GroupUsageQuery::free_only(vec![2, 2, 2, 2]);
        let r = max_group_tiles(&q, &p);
        assert_eq!(r.per_joker_spend, vec![Some(8)]);
    }

    #[test]
    fn extra_copy_cannot_join_second_group() {
        let p = params(13, 4, 2, 0);
        let q = GroupUsageQuery::free_only(vec![2, 1, 1, 0]);
        let r = max_group_tiles(&q, &p);
        assert_eq!(r.per_joker_spend, vec![Some(3)]);
    }

    #[test]
    fn stranded_mandatory_tile_is_infeasible() {
        let p = params(13, 4, 2, 0);
        let q = GroupUsageQuery {
            avail: vec![1, 1, 0, 0],
            mandatory: vec![1, 0, 0, 0],
            jokers_avail: 0,
        };
        let r = max_group_tiles(&q, &p);
        assert_eq!(r.per_joker_spend, vec![None]);
    }

    #[test]
    fn joker_completes_a_pair() {
        let p = params(13, 4, 2, 2);
        let q = GroupUsageQuery {
            avail: vec![1, 1, 0, 0],
            mandatory: vec![0, 0, 0, 0],
            jokers_avail: 1,
        };
        let r = max_group_tiles(&q, &p);
        assert_eq!(r.per_joker_spend, vec![Some(0), Some(2)]);
    }

    #[test]
    fn zero_query_is_trivially_feasible() {
        let p = params(13, 4, 2, 0);
        let q = GroupUsageQuery::free_only(vec![0, 0, 0, 0]);
        let r = max_group_tiles(&q, &p);
        assert_eq!(r.per_joker_spend, vec![Some(0)]);
    }

    #[test]
    fn group_size_is_capped_by_suit_count() {
        // With all four suits on hand plus a joker, the joker cannot form a
        // fifth member: a spend of 1 has to drop to a smaller group.
        let p = params(13, 4, 2, 2);
        let q = GroupUsageQuery {
            avail: vec![1, 1, 1, 1],
            mandatory: vec![0, 0, 0, 0],
            jokers_avail: 1,
        };
        let r = max_group_tiles(&q, &p);
        assert_eq!(r.per_joker_spend[0], Some(4));
        assert_eq!(r.per_joker_spend[1], Some(3));
    }

    #[test]
    fn closed_form_matches_brute_force_exhaustively() {
        // Sweep every joker-free, mandatory-free query for k <= 5, m <= 3.
        for k in 1..=5u8 {
            for m in 1..=3u8 {
                let p = params(5, k, m, 0);
                let mut avail = vec![0u8; k as usize];
                loop {
                    let q = GroupUsageQuery::free_only(avail.clone());
                    let brute = max_group_tiles(&q, &p)
                        .best()
                        .map(|(_, used)| used)
                        .unwrap_or(0);
                    let fast = max_group_tiles_closed_form(&avail, &p);
                    assert_eq!(brute, fast, "k={k} m={m} avail={avail:?}");
                    // Odometer over [0, m]^k.
                    let mut done = true;
                    for slot in avail.iter_mut() {
                        if *slot < m {
                            *slot += 1;
                            done = false;
                            break;
                        }
                        *slot = 0;
                    }
                    if done {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn witness_matches_reported_usage() {
        let p = params(13, 4, 2, 2);
        let q = GroupUsageQuery {
            avail: vec![2, 2, 1, 0],
            mandatory: vec![0, 0, 1, 0],
            jokers_avail: 2,
        };
        let result = max_group_tiles(&q, &p);
        for (q_spent, entry) in result.per_joker_spend.iter().enumerate() {
            let witness = group_formation_witness(&q, &p, q_spent as u8);
            match entry {
                None => assert!(witness.is_none()),
                Some(used) => {
                    let shapes = witness.expect("feasible spend must have a witness");
                    let real: u32 = shapes.iter().map(|s| s.real_members()).sum();
                    let jokers: u32 = shapes.iter().map(|s| s.jokers as u32).sum();
                    assert_eq!(real, *used);
                    assert_eq!(jokers, q_spent as u32);
                    for shape in &shapes {
                        assert!(shape.members() >= 3);
                        assert!(shape.members() <= 4);
                    }
                }
            }
        }
    }
}
