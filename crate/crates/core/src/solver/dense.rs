//! Array-indexed solver engine for problems with no table tiles and no
//! jokers. Per-suit states then live in the basic four-letter alphabet, the
//! composite state packs into a mixed-radix index, and each value step is a
//! sweep over two flat layers. This is the path that keeps large-`n` solves
//! linear with a small constant.

use crate::groups::max_group_tiles_closed_form;
use crate::tileset::Problem;

use super::state::BasicStateSpace;
use super::transitions::raw_transitions;

const NEG_INF: i64 = i64::MIN / 4;

/// Upper bound on the composite state count the dense engine will allocate.
const DENSE_STATE_LIMIT: u128 = 1 << 24;

#[derive(Clone, Copy)]
struct DenseTransition {
    next: u32,
    used: u8,
    alpha: i16,
    beta: i16,
}

/// Flat per-avail transition table: `ranges[state]` slices into `flat`.
struct TransitionTable {
    flat: Vec<DenseTransition>,
    ranges: Vec<(u32, u32)>,
}

impl TransitionTable {
    fn slice(&self, state: usize) -> &[DenseTransition] {
        let (start, end) = self.ranges[state];
        &self.flat[start as usize..end as usize]
    }
}

pub(crate) fn eligible(problem: &Problem) -> bool {
    let params = problem.params();
    if !problem.table().is_empty() || problem.hand().jokers() > 0 {
        return false;
    }
    let s_count = BasicStateSpace::new(params.m()).len() as u128;
    let mut composite: u128 = 1;
    let mut left_space: u128 = 1;
    for _ in 0..params.k() {
        composite *= s_count;
        left_space *= params.m() as u128 + 1;
        if composite > DENSE_STATE_LIMIT || left_space > DENSE_STATE_LIMIT {
            return false;
        }
    }
    true
}

pub(crate) fn solve(problem: &Problem) -> Option<u64> {
    let params = problem.params();
    let n = params.n();
    let k = params.k() as usize;
    let m = params.m();
    let space = BasicStateSpace::new(m);
    let s_count = space.len();

    // Per-suit availability by value.
    let hand = problem.hand();
    let avail: Vec<Vec<u8>> = (1..=params.k())
        .map(|suit| (1..=n).map(|value| hand.count(value, suit)).collect())
        .collect();

    // Transition tables per available tile count; values share them since
    // deferred scores stay in (alpha, beta) form.
    let tables: Vec<TransitionTable> = (0..=m)
        .map(|a| {
            let mut flat = Vec::new();
            let mut ranges = Vec::with_capacity(s_count);
            for idx in 0..s_count {
                let state = space.to_state(idx);
                let start = flat.len() as u32;
                for raw in raw_transitions(&state, a, 0, 0, None) {
                    flat.push(DenseTransition {
                        next: space.index_of_state(&raw.next) as u32,
                        used: raw.free_used,
                        alpha: raw.alpha as i16,
                        beta: raw.beta as i16,
                    });
                }
                ranges.push((start, flat.len() as u32));
            }
            TransitionTable { flat, ranges }
        })
        .collect();

    // Group usage for every leftover vector, packed base (m+1) suit-major.
    let radix = m as usize + 1;
    let mut pow_left = vec![1usize; k + 1];
    for s in 0..k {
        pow_left[s + 1] = pow_left[s] * radix;
    }
    let mut group_usage = vec![0u32; pow_left[k]];
    let mut leftover = vec![0u8; k];
    for (pack, usage) in group_usage.iter_mut().enumerate() {
        let mut rest = pack;
        for (s, slot) in leftover.iter_mut().enumerate() {
            let _ = s;
            *slot = (rest % radix) as u8;
            rest /= radix;
        }
        *usage = max_group_tiles_closed_form(&leftover, params);
    }

    let mut pow_state = vec![1usize; k + 1];
    for s in 0..k {
        pow_state[s + 1] = pow_state[s] * s_count;
    }
    let total = pow_state[k];

    let settled: Vec<bool> = (0..s_count).map(|i| space.is_settled(i)).collect();

    let mut cur = vec![NEG_INF; total];
    let mut next = vec![NEG_INF; total];
    let init = {
        let empty = space.empty_index();
        (0..k).map(|s| empty * pow_state[s]).sum::<usize>()
    };
    cur[init] = 0;

    let mut digits = vec![0usize; k];
    for value in 1..=n {
        next.fill(NEG_INF);
        let suit_tables: Vec<&TransitionTable> =
            (0..k).map(|s| &tables[avail[s][value as usize - 1] as usize]).collect();
        let base_left: usize = (0..k)
            .map(|s| avail[s][value as usize - 1] as usize * pow_left[s])
            .sum();
        for src in 0..total {
            let acc = cur[src];
            if acc < 0 {
                continue;
            }
            let mut rest = src;
            for digit in digits.iter_mut() {
                *digit = rest % s_count;
                rest /= s_count;
            }
            expand(
                0,
                k,
                &digits,
                &suit_tables,
                &pow_state,
                &pow_left,
                value as i64,
                &group_usage,
                0,
                base_left,
                acc,
                &mut next,
            );
        }
        std::mem::swap(&mut cur, &mut next);
    }

    let mut best = NEG_INF;
    for (src, &score) in cur.iter().enumerate() {
        if score < 0 {
            continue;
        }
        let mut rest = src;
        let mut ok = true;
        for _ in 0..k {
            if !settled[rest % s_count] {
                ok = false;
                break;
            }
            rest /= s_count;
        }
        if ok && score > best {
            best = score;
        }
    }
    // With no table tiles the empty arrangement is always available.
    debug_assert!(best >= 0);
    (best >= 0).then_some(best as u64)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    suit: usize,
    k: usize,
    digits: &[usize],
    suit_tables: &[&TransitionTable],
    pow_state: &[usize],
    pow_left: &[usize],
    value: i64,
    group_usage: &[u32],
    dst: usize,
    left: usize,
    score: i64,
    next: &mut [i64],
) {
    if suit == k {
        let total = score + value * group_usage[left] as i64;
        let slot = &mut next[dst];
        if total > *slot {
            *slot = total;
        }
        return;
    }
    let list = suit_tables[suit].slice(digits[suit]);
    for t in list {
        expand(
            suit + 1,
            k,
            digits,
            suit_tables,
            pow_state,
            pow_left,
            value,
            group_usage,
            dst + t.next as usize * pow_state[suit],
            left - t.used as usize * pow_left[suit],
            score + t.alpha as i64 * value + t.beta as i64,
            next,
        );
    }
}
