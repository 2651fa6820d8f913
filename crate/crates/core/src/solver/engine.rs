//! General solver engine: top-down recursion over (value, per-suit run
//! states, jokers committed) with memoization. This path carries the full
//! flagged symbol alphabet, so it handles table-constrained problems and
//! jokers; the dense engine covers the flag-free common case.

use std::rc::Rc;

use rustc_hash::FxHashMap;

use crate::groups::{group_formation_witness, max_group_tiles, GroupUsageQuery};
use crate::tileset::Problem;

use super::arrangement::{Arrangement, GroupPlacement, RunPlacement};
use super::state::{RunSymbol, RunTileKind, SuitRunState};
use super::transitions::raw_transitions;
use super::SolveOptions;

const NEG_INF: i64 = i64::MIN / 4;

#[derive(Debug, Clone)]
struct CachedTransition {
    next_id: u16,
    alpha: i32,
    beta: i32,
    free_used: u8,
    mand_used: u8,
    jokers_placed: u8,
    jokers_released: u8,
    actions: Vec<super::transitions::SymbolAction>,
}

/// One composite choice at a value: a transition per suit.
#[derive(Debug, Clone)]
struct ComboCore {
    trans_idx: Vec<u16>,
    dst_ids: Vec<u16>,
    contrib_runs: i64,
    jokers_placed: u32,
    jokers_released: u32,
}

enum Memo {
    Packed(FxHashMap<u128, i64>),
    Wide(FxHashMap<(u32, u8, Vec<u16>), i64>),
}

impl Memo {
    fn new(k: usize) -> Self {
        if k <= 6 {
            Memo::Packed(FxHashMap::default())
        } else {
            Memo::Wide(FxHashMap::default())
        }
    }

    fn pack(value: u32, jokers: u8, ids: &[u16]) -> u128 {
        let mut key = (value as u128 - 1) | ((jokers as u128) << 16);
        for (i, &id) in ids.iter().enumerate() {
            key |= (id as u128) << (24 + 16 * i);
        }
        key
    }

    fn get(&self, value: u32, jokers: u8, ids: &[u16]) -> Option<i64> {
        match self {
            Memo::Packed(map) => map.get(&Self::pack(value, jokers, ids)).copied(),
            Memo::Wide(map) => map.get(&(value, jokers, ids.to_vec())).copied(),
        }
    }

    fn insert(&mut self, value: u32, jokers: u8, ids: &[u16], score: i64) {
        match self {
            Memo::Packed(map) => {
                map.insert(Self::pack(value, jokers, ids), score);
            }
            Memo::Wide(map) => {
                map.insert((value, jokers, ids.to_vec()), score);
            }
        }
    }
}

pub(crate) struct GenericSolver<'p> {
    problem: &'p Problem,
    opts: SolveOptions,
    n: u32,
    k: usize,
    m: u8,
    total_jokers: u8,
    mand_jokers: u8,
    joker_spendable: u8,
    upper_bound: i64,
    avail_free: Vec<Vec<u8>>,
    avail_mand: Vec<Vec<u8>>,

    states: Vec<SuitRunState>,
    state_ids: FxHashMap<SuitRunState, u16>,
    trans_cache: FxHashMap<(u16, u8, u8, u8), Rc<Vec<CachedTransition>>>,
    group_cache: FxHashMap<(u128, u128, u8), Rc<Vec<Option<u32>>>>,
    cache_groups: bool,
    memo: Memo,

    best_complete: i64,
    stopped: bool,
}

impl<'p> GenericSolver<'p> {
    pub fn new(problem: &'p Problem, opts: SolveOptions) -> Self {
        let params = problem.params();
        let n = params.n() as u32;
        let k = params.k() as usize;
        let hand = problem.hand();
        let table = problem.table();
        let avail_free: Vec<Vec<u8>> = (1..=params.k())
            .map(|suit| (1..=params.n()).map(|value| hand.count(value, suit)).collect())
            .collect();
        let avail_mand: Vec<Vec<u8>> = (1..=params.k())
            .map(|suit| (1..=params.n()).map(|value| table.count(value, suit)).collect())
            .collect();
        let total_jokers = hand.jokers() + table.jokers();
        let upper_bound = (hand.value() + table.value()) as i64;
        GenericSolver {
            problem,
            opts,
            n,
            k,
            m: params.m(),
            total_jokers,
            mand_jokers: table.jokers(),
            joker_spendable: total_jokers.min(params.m()),
            upper_bound,
            avail_free,
            avail_mand,
            states: Vec::new(),
            state_ids: FxHashMap::default(),
            trans_cache: FxHashMap::default(),
            group_cache: FxHashMap::default(),
            cache_groups: k <= 16,
            memo: Memo::new(k),
            best_complete: NEG_INF,
            stopped: false,
        }
    }

    pub fn max_score(&mut self) -> Option<u64> {
        let root = self.solve_root();
        (root >= 0).then_some(root as u64)
    }

    pub fn best_arrangement(&mut self) -> Option<Arrangement> {
        debug_assert!(self.opts.memoize && !self.opts.early_stop);
        let root = self.solve_root();
        (root >= 0).then(|| self.walk(root))
    }

    fn solve_root(&mut self) -> i64 {
        let empty = self.intern(SuitRunState::empty(self.m));
        let ids = vec![empty; self.k];
        let result = self.solve(1, &ids, 0, 0);
        if self.stopped {
            self.best_complete
        } else {
            result
        }
    }

    fn intern(&mut self, state: SuitRunState) -> u16 {
        if let Some(&id) = self.state_ids.get(&state) {
            return id;
        }
        let id = self.states.len();
        assert!(id <= u16::MAX as usize, "per-suit run state space exceeds 65536 states");
        self.states.push(state.clone());
        self.state_ids.insert(state, id as u16);
        id as u16
    }

    fn terminal_value(&self, ids: &[u16], jokers_used: u8) -> i64 {
        let settled = ids.iter().all(|&id| self.states[id as usize].is_settled());
        if settled && jokers_used >= self.mand_jokers {
            0
        } else {
            NEG_INF
        }
    }

    fn note_complete(&mut self, total: i64) {
        if total > self.best_complete {
            self.best_complete = total;
            if self.opts.early_stop && total >= self.upper_bound {
                self.stopped = true;
            }
        }
    }

    fn transitions_for(&mut self, suit: usize, value: u32, state_id: u16) -> Rc<Vec<CachedTransition>> {
        let free = self.avail_free[suit][value as usize - 1];
        let mand = self.avail_mand[suit][value as usize - 1];
        let tail = (self.n - value).min(2) as u8;
        let key = (state_id, free, mand, tail);
        if let Some(cached) = self.trans_cache.get(&key) {
            return cached.clone();
        }
        let state = self.states[state_id as usize].clone();
        let raw = raw_transitions(
            &state,
            free,
            mand,
            self.joker_spendable,
            Some((self.n - value) as u16),
        );
        let cached: Vec<CachedTransition> = raw
            .into_iter()
            .map(|r| CachedTransition {
                next_id: self.intern(r.next),
                alpha: r.alpha,
                beta: r.beta,
                free_used: r.free_used,
                mand_used: r.mand_used,
                jokers_placed: r.jokers_placed,
                jokers_released: r.jokers_released,
                actions: r.actions,
            })
            .collect();
        let rc = Rc::new(cached);
        self.trans_cache.insert(key, rc.clone());
        rc
    }

    fn enumerate_step(
        &mut self,
        value: u32,
        ids: &[u16],
    ) -> (Vec<Rc<Vec<CachedTransition>>>, Vec<ComboCore>) {
        let lists: Vec<Rc<Vec<CachedTransition>>> = (0..self.k)
            .map(|s| self.transitions_for(s, value, ids[s]))
            .collect();
        let mut combos = Vec::new();
        let mut idx = vec![0u16; self.k];
        let mut dst = vec![0u16; self.k];
        product(&lists, 0, value as i64, &mut idx, &mut dst, 0, 0, 0, &mut combos);
        (lists, combos)
    }

    fn group_usage(&mut self, left_free: &[u8], left_mand: &[u8], javail: u8) -> Rc<Vec<Option<u32>>> {
        if self.cache_groups {
            let key = (pack_bytes(left_free), pack_bytes(left_mand), javail);
            if let Some(cached) = self.group_cache.get(&key) {
                return cached.clone();
            }
            let result = self.compute_group_usage(left_free, left_mand, javail);
            self.group_cache.insert(key, result.clone());
            result
        } else {
            self.compute_group_usage(left_free, left_mand, javail)
        }
    }

    fn compute_group_usage(
        &self,
        left_free: &[u8],
        left_mand: &[u8],
        javail: u8,
    ) -> Rc<Vec<Option<u32>>> {
        let query = GroupUsageQuery {
            avail: left_free.to_vec(),
            mandatory: left_mand.to_vec(),
            jokers_avail: javail,
        };
        Rc::new(max_group_tiles(&query, self.problem.params()).per_joker_spend)
    }

    fn leftovers(
        &self,
        value: u32,
        lists: &[Rc<Vec<CachedTransition>>],
        combo: &ComboCore,
    ) -> (Vec<u8>, Vec<u8>) {
        let mut left_free = Vec::with_capacity(self.k);
        let mut left_mand = Vec::with_capacity(self.k);
        for s in 0..self.k {
            let t = &lists[s][combo.trans_idx[s] as usize];
            left_free.push(self.avail_free[s][value as usize - 1] - t.free_used);
            left_mand.push(self.avail_mand[s][value as usize - 1] - t.mand_used);
        }
        (left_free, left_mand)
    }

    fn solve(&mut self, value: u32, ids: &[u16], jokers_used: u8, acc: i64) -> i64 {
        if self.stopped {
            return NEG_INF;
        }
        if value > self.n {
            let v = self.terminal_value(ids, jokers_used);
            if v == 0 {
                self.note_complete(acc);
            }
            return v;
        }
        if self.opts.memoize {
            if let Some(hit) = self.memo.get(value, jokers_used, ids) {
                if hit > NEG_INF {
                    self.note_complete(acc + hit);
                }
                return hit;
            }
        }

        let (lists, combos) = self.enumerate_step(value, ids);
        let mut best = NEG_INF;
        for combo in &combos {
            let after = jokers_used as i32 + combo.jokers_placed as i32
                - combo.jokers_released as i32;
            debug_assert!(after >= 0);
            if after < 0 || after > self.total_jokers as i32 {
                continue;
            }
            let u_after = after as u8;
            let (left_free, left_mand) = self.leftovers(value, &lists, combo);
            let usage = self.group_usage(&left_free, &left_mand, self.total_jokers - u_after);
            for (q, used) in usage.iter().enumerate() {
                let Some(used_real) = used else { continue };
                let contrib = combo.contrib_runs + *used_real as i64 * value as i64;
                let child =
                    self.solve(value + 1, &combo.dst_ids, u_after + q as u8, acc + contrib);
                if self.stopped {
                    return NEG_INF;
                }
                if child > NEG_INF && contrib + child > best {
                    best = contrib + child;
                }
            }
        }

        if self.opts.memoize {
            self.memo.insert(value, jokers_used, ids, best);
        }
        best
    }

    fn lookup_value(&self, value: u32, ids: &[u16], jokers_used: u8) -> i64 {
        if value > self.n {
            self.terminal_value(ids, jokers_used)
        } else {
            self.memo.get(value, jokers_used, ids).unwrap_or(NEG_INF)
        }
    }

    /// Forward walk through the memo table, materializing one optimal
    /// arrangement. Ties break toward fewer jokers, fewer tiles, then the
    /// lexicographically smallest successor encoding.
    fn walk(&mut self, target: i64) -> Arrangement {
        let empty = self.intern(SuitRunState::empty(self.m));
        let mut ids = vec![empty; self.k];
        let mut jokers_used = 0u8;
        let mut remaining = target;

        let mut open_runs: Vec<Vec<OpenRun>> = vec![Vec::new(); self.k];
        let mut runs_out: Vec<RunPlacement> = Vec::new();
        let mut groups_out: Vec<GroupPlacement> = Vec::new();

        for value in 1..=self.n {
            let (lists, combos) = self.enumerate_step(value, &ids);
            let mut chosen: Option<(usize, u8, u32, i64, u8, TieKey)> = None;
            for (ci, combo) in combos.iter().enumerate() {
                let after = jokers_used as i32 + combo.jokers_placed as i32
                    - combo.jokers_released as i32;
                if after < 0 || after > self.total_jokers as i32 {
                    continue;
                }
                let u_after = after as u8;
                let (left_free, left_mand) = self.leftovers(value, &lists, combo);
                let usage = self.group_usage(&left_free, &left_mand, self.total_jokers - u_after);
                for (q, used) in usage.iter().enumerate() {
                    let Some(used_real) = used else { continue };
                    let contrib = combo.contrib_runs + *used_real as i64 * value as i64;
                    let u_next = u_after + q as u8;
                    let child = self.lookup_value(value + 1, &combo.dst_ids, u_next);
                    if child <= NEG_INF || contrib + child != remaining {
                        continue;
                    }
                    let tie = self.tie_key(&lists, combo, value, q as u8, *used_real, u_next);
                    if chosen.as_ref().is_none_or(|(.., best_tie)| tie < *best_tie) {
                        chosen = Some((ci, q as u8, *used_real, contrib, u_next, tie));
                    }
                }
            }

            let (ci, q, used_real, contrib, u_next, _) =
                chosen.expect("memoized optimum must be reachable");
            let combo = combos[ci].clone();

            for s in 0..self.k {
                let trans = lists[s][combo.trans_idx[s] as usize].clone();
                apply_suit_transition(
                    &mut open_runs[s],
                    &trans,
                    value,
                    s as u8 + 1,
                    self.m,
                    &mut runs_out,
                );
            }

            if used_real > 0 || q > 0 {
                let (left_free, left_mand) = self.leftovers(value, &lists, &combo);
                let query = GroupUsageQuery {
                    avail: left_free,
                    mandatory: left_mand,
                    jokers_avail: self.total_jokers - (u_next - q),
                };
                let shapes = group_formation_witness(&query, self.problem.params(), q)
                    .expect("feasible spend reported by max_group_tiles");
                let witness_real: u32 = shapes.iter().map(|s| s.real_members()).sum();
                debug_assert_eq!(witness_real, used_real);
                for shape in shapes {
                    let suits: Vec<u8> = (0..self.k as u8)
                        .filter(|s| shape.suit_mask >> s & 1 == 1)
                        .map(|s| s + 1)
                        .collect();
                    groups_out.push(GroupPlacement { value: value as u16, suits, jokers: shape.jokers });
                }
            }

            remaining -= contrib;
            ids = combo.dst_ids.clone();
            jokers_used = u_next;
        }

        debug_assert_eq!(remaining, 0);
        debug_assert!(jokers_used >= self.mand_jokers);
        for (s, open) in open_runs.iter().enumerate() {
            for run in open {
                debug_assert!(run.kinds.len() >= 3);
                runs_out.push(RunPlacement {
                    suit: s as u8 + 1,
                    start: run.start as u16,
                    tiles: run.kinds.clone(),
                });
            }
        }

        runs_out.sort_by(|a, b| {
            (a.suit, a.start, a.tiles.len(), a.joker_offsets())
                .cmp(&(b.suit, b.start, b.tiles.len(), b.joker_offsets()))
        });
        groups_out.sort_by(|a, b| {
            (a.value, &a.suits, a.jokers).cmp(&(b.value, &b.suits, b.jokers))
        });

        let arrangement = Arrangement { runs: runs_out, groups: groups_out, score: target as u64 };
        debug_assert_eq!(arrangement.recompute_score(), target as u64);
        arrangement
    }

    fn tie_key(
        &self,
        lists: &[Rc<Vec<CachedTransition>>],
        combo: &ComboCore,
        value: u32,
        q: u8,
        used_real: u32,
        u_next: u8,
    ) -> TieKey {
        let net_jokers = combo.jokers_placed as i32 - combo.jokers_released as i32 + q as i32;
        let mut tiles = used_real + q as u32 + combo.jokers_placed;
        for s in 0..self.k {
            let t = &lists[s][combo.trans_idx[s] as usize];
            tiles += (t.free_used + t.mand_used) as u32;
        }
        let mut successor = Vec::with_capacity(self.k * self.m as usize + 1);
        for &id in &combo.dst_ids {
            successor.extend(self.states[id as usize].encode());
        }
        successor.push(u_next);
        let mut action: Vec<u16> = combo.trans_idx.clone();
        action.push(q as u16);
        let _ = value;
        (net_jokers, tiles, successor, action)
    }
}

type TieKey = (i32, u32, Vec<u8>, Vec<u16>);

#[allow(clippy::too_many_arguments)]
fn product(
    lists: &[Rc<Vec<CachedTransition>>],
    suit: usize,
    value: i64,
    idx: &mut Vec<u16>,
    dst: &mut Vec<u16>,
    contrib: i64,
    placed: u32,
    released: u32,
    out: &mut Vec<ComboCore>,
) {
    if suit == lists.len() {
        out.push(ComboCore {
            trans_idx: idx.clone(),
            dst_ids: dst.clone(),
            contrib_runs: contrib,
            jokers_placed: placed,
            jokers_released: released,
        });
        return;
    }
    for (i, t) in lists[suit].iter().enumerate() {
        idx[suit] = i as u16;
        dst[suit] = t.next_id;
        product(
            lists,
            suit + 1,
            value,
            idx,
            dst,
            contrib + t.alpha as i64 * value + t.beta as i64,
            placed + t.jokers_placed as u32,
            released + t.jokers_released as u32,
            out,
        );
    }
}

fn pack_bytes(values: &[u8]) -> u128 {
    values.iter().fold(0u128, |acc, &b| (acc << 8) | b as u128)
}

/// A run under construction during the reconstruction walk.
#[derive(Debug, Clone)]
struct OpenRun {
    start: u32,
    kinds: Vec<RunTileKind>,
    mandatory: bool,
}

impl OpenRun {
    fn symbol(&self) -> RunSymbol {
        match self.kinds.len() {
            1 => RunSymbol::One { kind: self.kinds[0], mandatory: self.mandatory },
            2 => RunSymbol::Two {
                prev: self.kinds[0],
                last: self.kinds[1],
                mandatory: self.mandatory,
            },
            _ => RunSymbol::Complete,
        }
    }
}

/// Apply one suit's chosen transition to its open runs, closing completed
/// runs that reset and discarding abandoned incomplete ones. Extensions are
/// assigned to the oldest matching runs first, which keeps reconstruction
/// deterministic.
fn apply_suit_transition(
    open: &mut Vec<OpenRun>,
    trans: &CachedTransition,
    value: u32,
    suit: u8,
    slot_count: u8,
    runs_out: &mut Vec<RunPlacement>,
) {
    // Snapshot matches against the pre-transition symbols: actions cover
    // distinct symbols, so the index sets are disjoint.
    let symbols: Vec<RunSymbol> = open.iter().map(|r| r.symbol()).collect();
    let mut to_remove: Vec<usize> = Vec::new();
    let mut started: Vec<OpenRun> = Vec::new();

    for action in &trans.actions {
        if action.symbol == RunSymbol::Empty {
            // Starts into empty slots; resets of empty slots are no-ops.
            for _ in 0..action.extend_free {
                started.push(OpenRun { start: value, kinds: vec![RunTileKind::Real], mandatory: false });
            }
            for _ in 0..action.extend_mand {
                started.push(OpenRun { start: value, kinds: vec![RunTileKind::Real], mandatory: true });
            }
            for _ in 0..action.extend_jokers {
                started.push(OpenRun { start: value, kinds: vec![RunTileKind::Joker], mandatory: false });
            }
            continue;
        }

        let mut matches: Vec<usize> = symbols
            .iter()
            .enumerate()
            .filter_map(|(i, s)| (*s == action.symbol).then_some(i))
            .collect();
        matches.sort_by_key(|&i| (open[i].start, i));
        let needed =
            (action.extend_free + action.extend_mand + action.extend_jokers + action.resets) as usize;
        debug_assert_eq!(matches.len(), needed);

        let mut iter = matches.into_iter();
        for _ in 0..action.extend_free {
            let i = iter.next().unwrap();
            open[i].kinds.push(RunTileKind::Real);
        }
        for _ in 0..action.extend_mand {
            let i = iter.next().unwrap();
            open[i].kinds.push(RunTileKind::Real);
            open[i].mandatory = true;
        }
        for _ in 0..action.extend_jokers {
            let i = iter.next().unwrap();
            open[i].kinds.push(RunTileKind::Joker);
        }
        for i in iter {
            // Reset: a complete run ends validly, an incomplete one is
            // abandoned and its tiles stay unused.
            if open[i].kinds.len() >= 3 {
                runs_out.push(RunPlacement {
                    suit,
                    start: open[i].start as u16,
                    tiles: open[i].kinds.clone(),
                });
            }
            to_remove.push(i);
        }
    }

    to_remove.sort_unstable();
    for i in to_remove.into_iter().rev() {
        open.remove(i);
    }
    open.extend(started);
    open.sort_by_key(|r| r.start);
    debug_assert!(open.len() <= slot_count as usize);
}
