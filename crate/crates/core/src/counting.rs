//! Exact counting of hands and winning hands per hand size. Totals come
//! from an integer convolution; winning hands are enumerated as multiset
//! unions of candidate sets (runs of length 3..5, groups of size 3..5) with
//! canonical-key deduplication, since distinct set covers can produce the
//! same hand.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::tileset::TileSetParams;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("hand size {t} is outside 0..={max}")]
    SizeOutOfRange { t: u32, max: u32 },
    #[error("tile universe needs {bits} key bits, over the supported 128")]
    UniverseTooLarge { bits: u32 },
    #[error("memory budget of {budget} dedup keys exceeded at hand size {t}")]
    MemoryBudget { budget: u64, t: u32 },
}

/// Error from a table run, carrying the rows finished before the failure.
#[derive(Debug, Error)]
#[error("{source} after {} completed rows", completed.len())]
pub struct TableError {
    pub completed: Vec<CountRow>,
    pub source: CountError,
}

/// One row of the winning-hand table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRow {
    pub t: u32,
    pub total: BigUint,
    pub winning: BigUint,
    /// Scientific notation with three significant digits; "0" when no hand
    /// wins.
    pub ratio: String,
}

/// Tuning knobs for the winning-hand enumeration. None of them change
/// results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountConfig {
    /// Worker threads; 0 uses the ambient rayon pool.
    pub threads: usize,
    /// Dedup shard count (rounded up to a power of two); 0 picks a default.
    pub shards: usize,
    /// Enumerate the candidate catalog in reverse. Counts must not change;
    /// exposed for order-independence tests.
    pub reverse_candidates: bool,
    /// Abort once this many distinct keys are stored.
    pub memory_budget_keys: Option<u64>,
    /// Deduplicate on suit-canonical keys and weight each by its orbit
    /// size under suit permutation. Same counts, far smaller dedup store;
    /// winning-hand status is suit-symmetric.
    pub suit_symmetry: bool,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            threads: 0,
            shards: 0,
            reverse_candidates: false,
            memory_budget_keys: None,
            suit_symmetry: false,
        }
    }
}

/// Number of hands of size `t`: multisets over `n*k` tile types with
/// multiplicity cap `m`, computed as the coefficient of `x^t` in
/// `(1 + x + ... + x^m)^(n*k)` by integer convolution.
pub fn total_hands(params: &TileSetParams, t: u32) -> Result<BigUint, CountError> {
    let max = params.total_tiles();
    if t > max {
        return Err(CountError::SizeOutOfRange { t, max });
    }
    let m = params.m() as usize;
    let limit = t as usize;
    let mut coeffs: Vec<BigUint> = vec![BigUint::zero(); limit + 1];
    coeffs[0] = BigUint::one();
    let mut degree = 0usize;
    for _ in 0..params.tile_types() {
        degree = (degree + m).min(limit);
        // Multiply by (1 + x + ... + x^m) using a sliding window sum.
        let mut window = BigUint::zero();
        let mut next = vec![BigUint::zero(); limit + 1];
        for i in 0..=degree {
            window += &coeffs[i.min(limit)];
            if i > m {
                window -= &coeffs[i - m - 1];
            }
            next[i] = window.clone();
        }
        coeffs = next;
    }
    Ok(coeffs.swap_remove(limit))
}

/// All multisets of parts from {3, 4, 5} summing to `t`, each sorted
/// ascending, listed in lexicographic order.
pub fn partitions_into_345(t: u32) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    partition_rec(t, 3, &mut current, &mut out);
    out
}

fn partition_rec(t: u32, min_part: u8, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if t == 0 {
        out.push(current.clone());
        return;
    }
    for part in min_part..=5 {
        if part as u32 > t {
            break;
        }
        current.push(part);
        partition_rec(t - part as u32, part, current, out);
        current.pop();
    }
}

/// A set usable as a building block of a winning hand: runs of length 3..5
/// and groups of size 3..min(k, 5).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateSet {
    Run { suit: u8, start: u16, len: u8 },
    Group { value: u16, suits: Vec<u8> },
}

impl CandidateSet {
    pub fn size(&self) -> u8 {
        match self {
            CandidateSet::Run { len, .. } => *len,
            CandidateSet::Group { suits, .. } => suits.len() as u8,
        }
    }

    /// Cell indices (suit-major, value-minor) the set consumes, one copy
    /// each.
    fn cells(&self, n: u16) -> Vec<u16> {
        match self {
            CandidateSet::Run { suit, start, len } => (0..*len as u16)
                .map(|o| (*suit as u16 - 1) * n + (start - 1) + o)
                .collect(),
            CandidateSet::Group { value, suits } => suits
                .iter()
                .map(|&s| (s as u16 - 1) * n + (value - 1))
                .collect(),
        }
    }
}

/// Every candidate set for the given parameters, in a fixed deterministic
/// order: runs by (suit, length, start), then groups by (value, size,
/// subset).
pub fn catalog_sets(params: &TileSetParams) -> Vec<CandidateSet> {
    let n = params.n();
    let k = params.k();
    let mut out = Vec::new();
    for suit in 1..=k {
        for len in 3..=5u8 {
            if len as u16 > n {
                break;
            }
            for start in 1..=(n - len as u16 + 1) {
                out.push(CandidateSet::Run { suit, start, len });
            }
        }
    }
    let max_group = k.min(5);
    for value in 1..=n {
        for size in 3..=max_group {
            for mask in 0u32..(1 << k) {
                if mask.count_ones() != size as u32 {
                    continue;
                }
                let suits: Vec<u8> =
                    (1..=k).filter(|s| mask >> (s - 1) & 1 == 1).collect();
                out.push(CandidateSet::Group { value, suits });
            }
        }
    }
    out
}

/// Number of distinct hands of size `t` (no jokers) whose tiles can all be
/// used in valid runs and groups, by partition-based enumeration with
/// dedup.
pub fn count_winning_hands(params: &TileSetParams, t: u32) -> Result<BigUint, CountError> {
    count_winning_hands_with(params, t, &CountConfig::default())
}

pub fn count_winning_hands_with(
    params: &TileSetParams,
    t: u32,
    config: &CountConfig,
) -> Result<BigUint, CountError> {
    if t == 0 {
        return Ok(BigUint::one());
    }
    if t < 3 || t as u64 > params.total_tiles() as u64 {
        return Ok(BigUint::zero());
    }
    let key_bits = packed_key_bits(params)?;
    let _ = key_bits;
    with_pool(config.threads, || enumerate_winning(params, t, config))
}

fn with_pool<R: Send>(threads: usize, job: impl FnOnce() -> R + Send) -> R {
    if threads == 0 {
        job()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(job)
    }
}

fn bits_per_cell(m: u8) -> u32 {
    u8::BITS - m.leading_zeros()
}

fn packed_key_bits(params: &TileSetParams) -> Result<u32, CountError> {
    let bits = params.tile_types() as u32 * bits_per_cell(params.m());
    if bits > 128 {
        return Err(CountError::UniverseTooLarge { bits });
    }
    Ok(bits)
}

struct PackedCandidate {
    cells: Vec<u16>,
    add: u128,
    /// One bit per cell touched; tested against the saturated-cell mask.
    cell_mask: u128,
    size: u8,
}

#[derive(Default)]
struct Shard {
    keys: FxHashSet<u128>,
    weight: u64,
}

struct Dedup {
    shards: Vec<Mutex<Shard>>,
    mask: usize,
    inserted: AtomicU64,
    budget: u64,
    aborted: AtomicBool,
}

impl Dedup {
    fn new(shards: usize, budget: Option<u64>) -> Self {
        let shards = shards.max(1).next_power_of_two();
        Dedup {
            shards: (0..shards).map(|_| Mutex::new(Shard::default())).collect(),
            mask: shards - 1,
            inserted: AtomicU64::new(0),
            budget: budget.unwrap_or(u64::MAX),
            aborted: AtomicBool::new(false),
        }
    }

    fn insert(&self, key: u128, weight: u64) {
        let mixed = (key as u64 ^ (key >> 64) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let shard = (mixed >> 32) as usize & self.mask;
        let mut shard = self.shards[shard].lock().unwrap();
        if shard.keys.insert(key) {
            shard.weight += weight;
            let stored = self.inserted.fetch_add(1, Ordering::Relaxed) + 1;
            if stored > self.budget {
                self.aborted.store(true, Ordering::Relaxed);
            }
        }
    }

    fn aborted(&self) -> bool {
        self.aborted.load(Ordering::Relaxed)
    }

    fn total(&self) -> u64 {
        self.shards.iter().map(|s| s.lock().unwrap().weight).sum()
    }
}

/// Canonicalizes a packed hand key under suit permutation by sorting the
/// per-suit blocks, and reports the orbit size `k! / prod(mult!)`.
struct SuitCanonicalizer {
    block_bits: u32,
    block_mask: u128,
    k: usize,
}

impl SuitCanonicalizer {
    fn new(params: &TileSetParams) -> Self {
        let block_bits = params.n() as u32 * bits_per_cell(params.m());
        let block_mask = if block_bits == 128 { u128::MAX } else { (1u128 << block_bits) - 1 };
        SuitCanonicalizer { block_bits, block_mask, k: params.k() as usize }
    }

    fn canonicalize(&self, key: u128) -> (u128, u64) {
        let mut blocks = [0u128; 16];
        for (i, block) in blocks.iter_mut().enumerate().take(self.k) {
            *block = (key >> (self.block_bits * i as u32)) & self.block_mask;
        }
        let blocks = &mut blocks[..self.k];
        blocks.sort_unstable_by(|a, b| b.cmp(a));

        let mut canonical = 0u128;
        let mut orbit = factorial(self.k as u64);
        let mut run = 1u64;
        for (i, &block) in blocks.iter().enumerate() {
            canonical |= block << (self.block_bits * i as u32);
            if i > 0 && blocks[i - 1] == block {
                run += 1;
                orbit /= run;
            } else {
                run = 1;
            }
        }
        (canonical, orbit)
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn enumerate_winning(
    params: &TileSetParams,
    t: u32,
    config: &CountConfig,
) -> Result<BigUint, CountError> {
    let n = params.n();
    let bits = bits_per_cell(params.m());
    let mut catalog = catalog_sets(params);
    if config.reverse_candidates {
        catalog.reverse();
    }
    let candidates: Vec<PackedCandidate> = catalog
        .iter()
        .map(|c| {
            let cells = c.cells(n);
            let add = cells.iter().fold(0u128, |acc, &cell| {
                acc + (1u128 << (bits * cell as u32))
            });
            let cell_mask =
                cells.iter().fold(0u128, |acc, &cell| acc | (1u128 << cell));
            PackedCandidate { cells, add, cell_mask, size: c.size() }
        })
        .collect();

    let shards = if config.shards > 0 {
        config.shards
    } else {
        64
    };
    let dedup = Dedup::new(shards, config.memory_budget_keys);
    let cells = params.tile_types();
    let canonicalizer = config.suit_symmetry.then(|| SuitCanonicalizer::new(params));
    let enumerator = Enumerator {
        candidates: &candidates,
        m: params.m(),
        dedup: &dedup,
        canonicalizer,
    };

    // Unroll the first two choice levels into parallel tasks.
    candidates.par_iter().enumerate().for_each(|(i, c)| {
        if c.size as u32 > t || dedup.aborted() {
            return;
        }
        let mut counts = vec![0u8; cells];
        let mut full = 0u128;
        for &cell in &c.cells {
            counts[cell as usize] += 1;
            if counts[cell as usize] == params.m() {
                full |= 1 << cell;
            }
        }
        let remaining = t - c.size as u32;
        if remaining == 0 {
            enumerator.record(c.add);
            return;
        }
        if remaining < 3 {
            return;
        }
        (i..candidates.len()).into_par_iter().for_each(|i2| {
            let c2 = &candidates[i2];
            if c2.size as u32 > remaining || dedup.aborted() {
                return;
            }
            if c2.cell_mask & full != 0 {
                return;
            }
            let after = remaining - c2.size as u32;
            if after == 1 || after == 2 {
                return;
            }
            let mut counts = counts.clone();
            let mut full = full;
            for &cell in &c2.cells {
                counts[cell as usize] += 1;
                if counts[cell as usize] == params.m() {
                    full |= 1 << cell;
                }
            }
            enumerator.dfs(i2, after, &mut counts, full, c.add + c2.add);
        });
    });

    if dedup.aborted() {
        return Err(CountError::MemoryBudget { budget: dedup.budget, t });
    }
    Ok(BigUint::from(dedup.total()))
}

struct Enumerator<'a> {
    candidates: &'a [PackedCandidate],
    m: u8,
    dedup: &'a Dedup,
    canonicalizer: Option<SuitCanonicalizer>,
}

impl Enumerator<'_> {
    fn record(&self, key: u128) {
        match &self.canonicalizer {
            Some(canon) => {
                let (key, orbit) = canon.canonicalize(key);
                self.dedup.insert(key, orbit);
            }
            None => self.dedup.insert(key, 1),
        }
    }

    fn dfs(&self, from: usize, remaining: u32, counts: &mut [u8], full: u128, key: u128) {
        if remaining == 0 {
            self.record(key);
            return;
        }
        if remaining < 3 || self.dedup.aborted() {
            return;
        }
        for i in from..self.candidates.len() {
            let c = &self.candidates[i];
            if c.size as u32 > remaining || c.cell_mask & full != 0 {
                continue;
            }
            // A remainder of 1 or 2 tiles can never be completed.
            let after = remaining - c.size as u32;
            if after == 1 || after == 2 {
                continue;
            }
            let mut next_full = full;
            for &cell in &c.cells {
                counts[cell as usize] += 1;
                if counts[cell as usize] == self.m {
                    next_full |= 1 << cell;
                }
            }
            self.dfs(i, after, counts, next_full, key + c.add);
            for &cell in &c.cells {
                counts[cell as usize] -= 1;
            }
        }
    }
}

/// Count winning hands of size `t` by direct enumeration of all hands with
/// a per-hand cover check. An independent route from the partition-based
/// [`count_winning_hands`]: the two must agree everywhere, and this one is
/// cheaper when few hands of size `t` exist, which happens toward the full
/// tile set. [`winning_table`] switches to it there.
pub fn count_winning_hands_by_enumeration(params: &TileSetParams, t: u32) -> BigUint {
    let cells = params.tile_types();
    let m = params.m();

    // Split the enumeration into prefixes for parallelism.
    let mut prefixes: Vec<(Vec<u8>, u32)> = vec![(Vec::new(), t)];
    let mut depth = 0usize;
    while depth < cells && prefixes.len() < 512 {
        let mut next = Vec::new();
        for (prefix, remaining) in &prefixes {
            let max_rest = (cells - depth - 1) as u32 * m as u32;
            for count in 0..=m {
                let used = count as u32;
                if used > *remaining || *remaining - used > max_rest {
                    continue;
                }
                let mut extended = prefix.clone();
                extended.push(count);
                next.push((extended, remaining - used));
            }
        }
        prefixes = next;
        depth += 1;
        if prefixes.is_empty() {
            return BigUint::zero();
        }
    }

    let found: u64 = prefixes
        .par_iter()
        .map(|(prefix, remaining)| {
            let mut counts = vec![0u8; cells];
            counts[..prefix.len()].copy_from_slice(prefix);
            let mut found = 0u64;
            complement_dfs(params, prefix.len(), *remaining, &mut counts, &mut found);
            found
        })
        .sum();
    BigUint::from(found)
}

fn complement_dfs(
    params: &TileSetParams,
    cell: usize,
    remaining: u32,
    counts: &mut [u8],
    found: &mut u64,
) {
    let cells = counts.len();
    if cell == cells {
        debug_assert_eq!(remaining, 0);
        if is_winning_counts(params, counts) {
            *found += 1;
        }
        return;
    }
    let max_rest = (cells - cell - 1) as u32 * params.m() as u32;
    for count in 0..=params.m() {
        let used = count as u32;
        if used > remaining || remaining - used > max_rest {
            continue;
        }
        counts[cell] = count;
        complement_dfs(params, cell + 1, remaining - used, counts, found);
    }
    counts[cell] = 0;
}

/// Fast winning test on a raw count grid: first try the groups-only
/// sufficient condition per value, then fall back to an exact-cover search.
fn is_winning_counts(params: &TileSetParams, counts: &[u8]) -> bool {
    let n = params.n() as usize;
    let k = params.k() as usize;
    let m = params.m() as u32;
    let mut groups_only = true;
    for value in 0..n {
        let mut sum = 0u32;
        let mut max = 0u32;
        for suit in 0..k {
            let c = counts[suit * n + value] as u32;
            sum += c;
            max = max.max(c);
        }
        if sum == 0 {
            continue;
        }
        let g = max.max(sum.div_ceil(k as u32));
        if g > m || 3 * g > sum {
            groups_only = false;
            break;
        }
    }
    if groups_only {
        return true;
    }
    let mut scratch = counts.to_vec();
    cover_feasible(params, &mut scratch)
}

/// Exact-cover search: can every remaining tile be placed into valid sets?
/// Branches on the first uncovered cell in value-major order, which keeps
/// near-full hands cheap because placements are forced.
fn cover_feasible(params: &TileSetParams, counts: &mut [u8]) -> bool {
    let n = params.n() as usize;
    let k = params.k() as usize;
    let cell = |value: usize, suit: usize| suit * n + value;

    let mut first = None;
    'scan: for value in 0..n {
        for suit in 0..k {
            if counts[cell(value, suit)] > 0 {
                first = Some((value, suit));
                break 'scan;
            }
        }
    }
    let Some((value, suit)) = first else { return true };

    // Runs must start here: every earlier cell of this suit is empty.
    for len in 3..=5usize {
        if value + len > n {
            break;
        }
        if (0..len).all(|o| counts[cell(value + o, suit)] > 0) {
            for o in 0..len {
                counts[cell(value + o, suit)] -= 1;
            }
            let ok = cover_feasible(params, counts);
            for o in 0..len {
                counts[cell(value + o, suit)] += 1;
            }
            if ok {
                return true;
            }
        }
    }

    // Groups at this value containing this suit; lower suits are empty.
    let others: Vec<usize> =
        (suit + 1..k).filter(|&s| counts[cell(value, s)] > 0).collect();
    let max_group = k.min(5);
    for size in 3..=max_group {
        let pick = size - 1;
        if pick > others.len() {
            break;
        }
        let mut chosen = vec![0usize; pick];
        if !combinations(&others, pick, &mut chosen, 0, 0, &mut |subset| {
            counts[cell(value, suit)] -= 1;
            for &s in subset.iter() {
                counts[cell(value, s)] -= 1;
            }
            let ok = cover_feasible(params, counts);
            counts[cell(value, suit)] += 1;
            for &s in subset.iter() {
                counts[cell(value, s)] += 1;
            }
            ok
        }) {
            continue;
        }
        return true;
    }
    false
}

/// Visit `pick`-subsets of `items`;stop early when the visitor returns true.
fn combinations(
    items: &[usize],
    pick: usize,
    chosen: &mut Vec<usize>,
    from: usize,
    depth: usize,
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if depth == pick {
        return visit(&chosen[..pick]);
    }
    for i in from..items.len() {
        chosen[depth] = items[i];
        if combinations(items, pick, chosen, i + 1, depth + 1, visit) {
            return true;
        }
    }
    false
}

/// When the number of hands of a size in the upper half of the range drops
/// below this, direct enumeration beats the partition search.
const COMPLEMENT_LIMIT: u64 = 100_000_000;

/// One row per hand size in `t_from..=t_to`.
pub fn winning_table(
    params: &TileSetParams,
    t_from: u32,
    t_to: u32,
    config: &CountConfig,
) -> Result<Vec<CountRow>, TableError> {
    let max = params.total_tiles();
    let mut rows = Vec::new();
    if t_from > t_to || t_to > max {
        return Err(TableError {
            completed: rows,
            source: CountError::SizeOutOfRange { t: t_to, max },
        });
    }
    for t in t_from..=t_to {
        let total = match total_hands(params, t) {
            Ok(total) => total,
            Err(source) => return Err(TableError { completed: rows, source }),
        };
        let winning = if use_complement(params, t, &total) {
            with_pool(config.threads, || count_winning_hands_by_enumeration(params, t))
        } else {
            // Orbit-weighted dedup: identical counts, much smaller store.
            let config = CountConfig { suit_symmetry: true, ..*config };
            match count_winning_hands_with(params, t, &config) {
                Ok(winning) => winning,
                Err(source) => return Err(TableError { completed: rows, source }),
            }
        };
        let ratio = format_ratio(&winning, &total);
        rows.push(CountRow { t, total, winning, ratio });
    }
    Ok(rows)
}

fn use_complement(params: &TileSetParams, t: u32, total: &BigUint) -> bool {
    2 * t as u64 > params.total_tiles() as u64 && *total <= BigUint::from(COMPLEMENT_LIMIT)
}

/// Scientific notation with three significant digits, e.g. "2.73e-7",
/// "1.00e0". Zero prints as "0".
pub fn format_ratio(winning: &BigUint, total: &BigUint) -> String {
    if winning.is_zero() {
        return "0".to_string();
    }
    let ten = BigUint::from(10u32);
    let mut scale = 2u32;
    let mut scaled = winning * ten.pow(scale);
    while &scaled / total < BigUint::from(100u32) {
        scale += 1;
        scaled *= &ten;
    }
    let mut mantissa = ((&scaled << 1) + total) / (total << 1);
    let mut exponent = 2i32 - scale as i32;
    if mantissa >= BigUint::from(1000u32) {
        mantissa = BigUint::from(100u32);
        exponent += 1;
    }
    let m: u32 = mantissa.try_into().expect("mantissa has three digits");
    format!("{}.{:02}e{}", m / 100, m % 100, exponent)
}
