//! Core data model: tile set parameters, hands, problems, parsing and
//! canonical encodings shared by the solver, the oracle and the counting
//! experiments.

use std::fmt;

use thiserror::Error;

/// Minimum size of a valid set (run or group). Fixed by the game rules.
pub const SET_SIZE: u8 = 3;

/// The generalized game parameters: `n` values per suit, `k` suits,
/// `m` copies of each tile and `j` jokers. The minimum set size is the
/// fixed constant [`SET_SIZE`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TileSetParams {
    n: u16,
    k: u8,
    m: u8,
    j: u8,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("n, k and m must all be at least 1 (got n={n}, k={k}, m={m})")]
    ZeroDimension { n: u16, k: u8, m: u8 },
    #[error("set size {0} is not supported; only {SET_SIZE} is")]
    UnsupportedSetSize(u8),
}

impl TileSetParams {
    /// Parameters with the set size fixed at [`SET_SIZE`].
    pub fn new(n: u16, k: u8, m: u8, j: u8) -> Result<Self, ParamsError> {
        if n < 1 || k < 1 || m < 1 {
            return Err(ParamsError::ZeroDimension { n, k, m });
        }
        Ok(TileSetParams { n, k, m, j })
    }

    /// Like [`TileSetParams::new`] but takes an explicit set size, which is
    /// rejected unless it equals [`SET_SIZE`].
    pub fn with_set_size(n: u16, k: u8, m: u8, j: u8, s: u8) -> Result<Self, ParamsError> {
        if s != SET_SIZE {
            return Err(ParamsError::UnsupportedSetSize(s));
        }
        Self::new(n, k, m, j)
    }

    /// The original game: n=13, k=4, m=2, j=2.
    pub fn original() -> Self {
        TileSetParams { n: 13, k: 4, m: 2, j: 2 }
    }

    /// Tile values per suit.
    pub fn n(&self) -> u16 {
        self.n
    }

    /// Number of suits.
    pub fn k(&self) -> u8 {
        self.k
    }

    /// Copies of each (value, suit) tile in the full set.
    pub fn m(&self) -> u8 {
        self.m
    }

    /// Number of jokers in the full set.
    pub fn j(&self) -> u8 {
        self.j
    }

    /// Minimum set size; always [`SET_SIZE`].
    pub fn set_size(&self) -> u8 {
        SET_SIZE
    }

    /// Number of distinct (value, suit) tile types.
    pub fn tile_types(&self) -> usize {
        self.n as usize * self.k as usize
    }

    /// Total number of plain tiles in the full set (`n * k * m`).
    pub fn total_tiles(&self) -> u32 {
        self.n as u32 * self.k as u32 * self.m as u32
    }

    pub fn contains(&self, tile: Tile) -> bool {
        (1..=self.n).contains(&tile.value) && (1..=self.k).contains(&tile.suit)
    }
}

/// A single tile: a value in `1..=n` and a suit in `1..=k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tile {
    pub value: u16,
    pub suit: u8,
}

impl Tile {
    pub fn new(value: u16, suit: u8) -> Self {
        Tile { value, suit }
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.value, self.suit)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HandError {
    #[error("tile {tile} is outside the tile set (n={n}, k={k})")]
    TileOutOfRange { tile: Tile, n: u16, k: u8 },
    #[error("count for tile {tile} would exceed m={m}")]
    CountExceedsCopies { tile: Tile, m: u8 },
    #[error("joker count would exceed j={j}")]
    TooManyJokers { j: u8 },
    #[error("hand dimensions (n={hand_n}, k={hand_k}) do not match (n={n}, k={k})")]
    DimensionMismatch { hand_n: u16, hand_k: u8, n: u16, k: u8 },
}

/// A bounded multiset of tiles: one count per (value, suit) plus a joker
/// count. Counts are stored suit-major, value-minor, which is also the
/// canonical key layout.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hand {
    n: u16,
    k: u8,
    counts: Vec<u8>,
    jokers: u8,
}

impl Hand {
    pub fn empty(params: &TileSetParams) -> Self {
        Hand {
            n: params.n,
            k: params.k,
            counts: vec![0; params.tile_types()],
            jokers: 0,
        }
    }

    /// Build a hand from a list of tiles and a joker count, validating the
    /// per-type bound `m` and the joker bound `j`.
    pub fn from_tiles<I>(params: &TileSetParams, tiles: I, jokers: u8) -> Result<Self, HandError>
    where
        I: IntoIterator<Item = Tile>,
    {
        let mut hand = Hand::empty(params);
        for tile in tiles {
            hand.add_tile(params, tile)?;
        }
        hand.add_jokers(params, jokers)?;
        Ok(hand)
    }

    fn cell(&self, value: u16, suit: u8) -> usize {
        debug_assert!(value >= 1 && suit >= 1);
        (suit as usize - 1) * self.n as usize + (value as usize - 1)
    }

    pub fn add_tile(&mut self, params: &TileSetParams, tile: Tile) -> Result<(), HandError> {
        if !params.contains(tile) {
            return Err(HandError::TileOutOfRange { tile, n: params.n, k: params.k });
        }
        let cell = self.cell(tile.value, tile.suit);
        if self.counts[cell] >= params.m {
            return Err(HandError::CountExceedsCopies { tile, m: params.m });
        }
        self.counts[cell] += 1;
        Ok(())
    }

    pub fn add_jokers(&mut self, params: &TileSetParams, count: u8) -> Result<(), HandError> {
        if self.jokers.saturating_add(count) > params.j {
            return Err(HandError::TooManyJokers { j: params.j });
        }
        self.jokers += count;
        Ok(())
    }

    /// Set the count of a tile type directly (used by enumeration code).
    pub fn set_count(
        &mut self,
        params: &TileSetParams,
        tile: Tile,
        count: u8,
    ) -> Result<(), HandError> {
        if !params.contains(tile) {
            return Err(HandError::TileOutOfRange { tile, n: params.n, k: params.k });
        }
        if count > params.m {
            return Err(HandError::CountExceedsCopies { tile, m: params.m });
        }
        let cell = self.cell(tile.value, tile.suit);
        self.counts[cell] = count;
        Ok(())
    }

    pub fn count(&self, value: u16, suit: u8) -> u8 {
        self.counts[self.cell(value, suit)]
    }

    pub fn jokers(&self) -> u8 {
        self.jokers
    }

    pub fn is_empty(&self) -> bool {
        self.jokers == 0 && self.counts.iter().all(|&c| c == 0)
    }

    /// Total number of tiles held, jokers included.
    pub fn total_tiles(&self) -> u32 {
        self.counts.iter().map(|&c| c as u32).sum::<u32>() + self.jokers as u32
    }

    /// Sum of tile values over all held tiles; jokers contribute zero.
    pub fn value(&self) -> u64 {
        let mut sum = 0u64;
        for suit in 1..=self.k {
            for value in 1..=self.n {
                sum += value as u64 * self.count(value, suit) as u64;
            }
        }
        sum
    }

    /// Canonical byte key: counts suit-major then value, one byte per count,
    /// with the joker count as the final byte. Injective for fixed params.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(self.counts.len() + 1);
        key.extend_from_slice(&self.counts);
        key.push(self.jokers);
        key
    }

    /// Tiles present in the hand with their counts, in (suit, value) order.
    pub fn iter_tiles(&self) -> impl Iterator<Item = (Tile, u8)> + '_ {
        let n = self.n;
        (1..=self.k).flat_map(move |suit| {
            (1..=n).filter_map(move |value| {
                let count = self.count(value, suit);
                (count > 0).then_some((Tile::new(value, suit), count))
            })
        })
    }

    /// Multiset union, validated against the per-type and joker bounds.
    pub fn try_union(&self, other: &Hand, params: &TileSetParams) -> Result<Hand, HandError> {
        if self.n != other.n || self.k != other.k {
            return Err(HandError::DimensionMismatch {
                hand_n: other.n,
                hand_k: other.k,
                n: self.n,
                k: self.k,
            });
        }
        let mut out = self.clone();
        for (cell, &c) in other.counts.iter().enumerate() {
            let sum = out.counts[cell] + c;
            if sum > params.m {
                let value = (cell % self.n as usize) as u16 + 1;
                let suit = (cell / self.n as usize) as u8 + 1;
                return Err(HandError::CountExceedsCopies {
                    tile: Tile::new(value, suit),
                    m: params.m,
                });
            }
            out.counts[cell] = sum;
        }
        if out.jokers + other.jokers > params.j {
            return Err(HandError::TooManyJokers { j: params.j });
        }
        out.jokers += other.jokers;
        Ok(out)
    }

    fn tokens(&self) -> Vec<String> {
        let mut tokens = Vec::new();
        for (tile, count) in self.iter_tiles() {
            for _ in 0..count {
                tokens.push(tile.to_string());
            }
        }
        for _ in 0..self.jokers {
            tokens.push("J".to_string());
        }
        tokens
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("hand and table together hold {total} copies of {tile}, exceeding m={m}")]
    JointCountExceedsCopies { tile: Tile, total: u8, m: u8 },
    #[error("hand and table together hold {total} jokers, exceeding j={j}")]
    JointJokersExceed { total: u8, j: u8 },
    #[error(transparent)]
    Hand(#[from] HandError),
}

/// A solvable puzzle instance: the free hand (tiles that may stay unused)
/// and the mandatory table tiles (all of which must be used).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    params: TileSetParams,
    hand: Hand,
    table: Hand,
}

impl Problem {
    pub fn new(params: TileSetParams, hand: Hand, table: Hand) -> Result<Self, ProblemError> {
        if hand.n != params.n || hand.k != params.k {
            return Err(HandError::DimensionMismatch {
                hand_n: hand.n,
                hand_k: hand.k,
                n: params.n,
                k: params.k,
            }
            .into());
        }
        if table.n != params.n || table.k != params.k {
            return Err(HandError::DimensionMismatch {
                hand_n: table.n,
                hand_k: table.k,
                n: params.n,
                k: params.k,
            }
            .into());
        }
        for suit in 1..=params.k {
            for value in 1..=params.n {
                let total = hand.count(value, suit) + table.count(value, suit);
                if total > params.m {
                    return Err(ProblemError::JointCountExceedsCopies {
                        tile: Tile::new(value, suit),
                        total,
                        m: params.m,
                    });
                }
            }
        }
        let jokers = hand.jokers + table.jokers;
        if jokers > params.j {
            return Err(ProblemError::JointJokersExceed { total: jokers, j: params.j });
        }
        Ok(Problem { params, hand, table })
    }

    /// A problem with no table tiles.
    pub fn hand_only(params: TileSetParams, hand: Hand) -> Result<Self, ProblemError> {
        let table = Hand::empty(&params);
        Problem::new(params, hand, table)
    }

    pub fn params(&self) -> &TileSetParams {
        &self.params
    }

    pub fn hand(&self) -> &Hand {
        &self.hand
    }

    pub fn table(&self) -> &Hand {
        &self.table
    }

    /// Hand and table pooled together, which is the multiset the solver
    /// arranges.
    pub fn pooled(&self) -> Hand {
        self.hand
            .try_union(&self.table, &self.params)
            .expect("problem invariant guarantees the union is within bounds")
    }

    /// Parse a problem file. The grammar is line oriented: a `params` line,
    /// a `hand` line and an optional `table` line. `#` starts a comment and
    /// repeated tile tokens accumulate.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, raw)| {
                let line = match raw.find('#') {
                    Some(pos) => &raw[..pos],
                    None => raw,
                };
                (i + 1, line.trim())
            })
            .filter(|(_, line)| !line.is_empty());

        let (params_no, params_line) = lines.next().ok_or(ParseError::MissingParams)?;
        let params = parse_params_line(params_no, params_line)?;

        let (hand_no, hand_line) = lines.next().ok_or(ParseError::MissingHand)?;
        let hand = parse_hand_line(&params, hand_no, hand_line, "hand")?;

        let table = match lines.next() {
            Some((table_no, table_line)) => {
                parse_hand_line(&params, table_no, table_line, "table")?
            }
            None => Hand::empty(&params),
        };

        if let Some((line, text)) = lines.next() {
            return Err(ParseError::TrailingContent { line, text: text.to_string() });
        }

        Problem::new(params, hand, table).map_err(|source| ParseError::Invalid { source })
    }

    /// Serialize back to the problem-file grammar. Parsing the output yields
    /// an equal problem.
    pub fn to_file_string(&self) -> String {
        let mut out = format!(
            "params n={} k={} m={} j={}\n",
            self.params.n, self.params.k, self.params.m, self.params.j
        );
        out.push_str("hand");
        for token in self.hand.tokens() {
            out.push(' ');
            out.push_str(&token);
        }
        out.push('\n');
        if !self.table.is_empty() {
            out.push_str("table");
            for token in self.table.tokens() {
                out.push(' ');
                out.push_str(&token);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing params line")]
    MissingParams,
    #[error("missing hand line")]
    MissingHand,
    #[error("line {line}: expected `{expected}`, found `{found}`")]
    WrongKeyword { line: usize, expected: &'static str, found: String },
    #[error("line {line}: malformed token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("line {line}: {source}")]
    BadParams { line: usize, source: ParamsError },
    #[error("line {line}: duplicate parameter `{name}`")]
    DuplicateParam { line: usize, name: String },
    #[error("line {line}: missing parameter `{name}`")]
    MissingParam { line: usize, name: &'static str },
    #[error("line {line}: {source}")]
    BadTile { line: usize, source: HandError },
    #[error("line {line}: unexpected trailing content `{text}`")]
    TrailingContent { line: usize, text: String },
    #[error("{source}")]
    Invalid { source: ProblemError },
}

fn parse_params_line(line_no: usize, line: &str) -> Result<TileSetParams, ParseError> {
    let mut tokens = line.split_whitespace();
    let keyword = tokens.next().unwrap_or("");
    if keyword != "params" {
        return Err(ParseError::WrongKeyword {
            line: line_no,
            expected: "params",
            found: keyword.to_string(),
        });
    }
    let mut n: Option<u16> = None;
    let mut k: Option<u8> = None;
    let mut m: Option<u8> = None;
    let mut j: Option<u8> = None;
    for token in tokens {
        let (name, value) = token.split_once('=').ok_or_else(|| ParseError::BadToken {
            line: line_no,
            token: token.to_string(),
        })?;
        let bad = || ParseError::BadToken { line: line_no, token: token.to_string() };
        let dup = |name: &str| ParseError::DuplicateParam { line: line_no, name: name.to_string() };
        match name {
            "n" => {
                if n.replace(value.parse().map_err(|_| bad())?).is_some() {
                    return Err(dup("n"));
                }
            }
            "k" => {
                if k.replace(value.parse().map_err(|_| bad())?).is_some() {
                    return Err(dup("k"));
                }
            }
            "m" => {
                if m.replace(value.parse().map_err(|_| bad())?).is_some() {
                    return Err(dup("m"));
                }
            }
            "j" => {
                if j.replace(value.parse().map_err(|_| bad())?).is_some() {
                    return Err(dup("j"));
                }
            }
            _ => return Err(bad()),
        }
    }
    let n = n.ok_or(ParseError::MissingParam { line: line_no, name: "n" })?;
    let k = k.ok_or(ParseError::MissingParam { line: line_no, name: "k" })?;
    let m = m.ok_or(ParseError::MissingParam { line: line_no, name: "m" })?;
    let j = j.ok_or(ParseError::MissingParam { line: line_no, name: "j" })?;
    TileSetParams::new(n, k, m, j).map_err(|source| ParseError::BadParams { line: line_no, source })
}

fn parse_hand_line(
    params: &TileSetParams,
    line_no: usize,
    line: &str,
    keyword: &'static str,
) -> Result<Hand, ParseError> {
    let mut tokens = line.split_whitespace();
    let found = tokens.next().unwrap_or("");
    if found != keyword {
        return Err(ParseError::WrongKeyword {
            line: line_no,
            expected: keyword,
            found: found.to_string(),
        });
    }
    let mut hand = Hand::empty(params);
    for token in tokens {
        if token == "J" {
            hand.add_jokers(params, 1)
                .map_err(|source| ParseError::BadTile { line: line_no, source })?;
            continue;
        }
        let (value, suit) = token.split_once(':').ok_or_else(|| ParseError::BadToken {
            line: line_no,
            token: token.to_string(),
        })?;
        let value: u16 = value.parse().map_err(|_| ParseError::BadToken {
            line: line_no,
            token: token.to_string(),
        })?;
        let suit: u8 = suit.parse().map_err(|_| ParseError::BadToken {
            line: line_no,
            token: token.to_string(),
        })?;
        hand.add_tile(params, Tile::new(value, suit))
            .map_err(|source| ParseError::BadTile { line: line_no, source })?;
    }
    Ok(hand)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u16, k: u8, m: u8, j: u8) -> TileSetParams {
        TileSetParams::new(n, k, m, j).unwrap()
    }

    #[test]
    fn set_size_is_fixed() {
        assert!(TileSetParams::with_set_size(13, 4, 2, 2, 3).is_ok());
        assert_eq!(
            TileSetParams::with_set_size(13, 4, 2, 2, 4),
            Err(ParamsError::UnsupportedSetSize(4))
        );
        assert!(TileSetParams::new(0, 4, 2, 2).is_err());
    }

    #[test]
    fn parse_basic_hand() {
        let p = Problem::parse("params n=13 k=4 m=2 j=2\nhand 6:1 7:1 8:1 9:1").unwrap();
        for value in 6..=9 {
            assert_eq!(p.hand().count(value, 1), 1);
        }
        assert_eq!(p.hand().total_tiles(), 4);
        assert!(p.table().is_empty());
    }

    #[test]
    fn parse_rejects_excess_jokers() {
        let err = Problem::parse("params n=13 k=4 m=2 j=0\nhand J").unwrap_err();
        assert!(matches!(err, ParseError::BadTile { line: 2, .. }), "{err}");
    }

    #[test]
    fn parse_rejects_count_over_m() {
        let err = Problem::parse("params n=13 k=4 m=2 j=2\nhand 6:1 6:1 6:1").unwrap_err();
        assert!(
            matches!(
                &err,
                ParseError::BadTile { line: 2, source: HandError::CountExceedsCopies { m: 2, .. } }
            ),
            "{err}"
        );
    }

    #[test]
    fn parse_reports_line_numbers_and_tokens() {
        let err = Problem::parse("params n=13 k=4 m=2 j=2\nhand 6;1").unwrap_err();
        assert_eq!(
            err,
            ParseError::BadToken { line: 2, token: "6;1".to_string() }
        );

        let err = Problem::parse("# comment\nparams n=13 k=4 m=2 j=2\n\nhand 14:1").unwrap_err();
        assert!(matches!(err, ParseError::BadTile { line: 4, .. }), "{err}");
    }

    #[test]
    fn parse_accepts_comments_and_table() {
        let text = "# a puzzle\nparams n=13 k=4 m=2 j=2  # original game\nhand 6:1 7:1\ntable 8:1";
        let p = Problem::parse(text).unwrap();
        assert_eq!(p.table().count(8, 1), 1);
        assert_eq!(p.hand().total_tiles(), 2);
    }

    #[test]
    fn serialization_is_a_fixed_point() {
        let text = "params n=13 k=4 m=2 j=2\nhand 6:1 7:1 8:1 9:1 J\ntable 3:2 3:3 3:4";
        let p = Problem::parse(text).unwrap();
        let s1 = p.to_file_string();
        let p2 = Problem::parse(&s1).unwrap();
        assert_eq!(p, p2);
        assert_eq!(s1, p2.to_file_string());
    }

    #[test]
    fn hand_value_examples() {
        let p = params(13, 4, 2, 2);
        let hand =
            Hand::from_tiles(&p, (6..=9).map(|v| Tile::new(v, 1)), 0).unwrap();
        assert_eq!(hand.value(), 30);
        assert_eq!(Hand::empty(&p).value(), 0);

        let hand = Hand::from_tiles(
            &p,
            [Tile::new(3, 1), Tile::new(3, 2), Tile::new(3, 3)],
            1,
        )
        .unwrap();
        assert_eq!(hand.value(), 9);
    }

    #[test]
    fn hand_value_additive_under_disjoint_union() {
        let p = params(8, 3, 2, 2);
        let a = Hand::from_tiles(&p, [Tile::new(1, 1), Tile::new(5, 2)], 1).unwrap();
        let b = Hand::from_tiles(&p, [Tile::new(2, 3), Tile::new(8, 1)], 0).unwrap();
        let union = a.try_union(&b, &p).unwrap();
        assert_eq!(union.value(), a.value() + b.value());
    }

    #[test]
    fn canonical_key_layout_and_order_independence() {
        let p = params(2, 2, 2, 0);
        assert_eq!(Hand::empty(&p).canonical_key(), vec![0; 5]);

        let mut a = Hand::empty(&p);
        a.add_tile(&p, Tile::new(1, 2)).unwrap();
        a.add_tile(&p, Tile::new(2, 1)).unwrap();
        let mut b = Hand::empty(&p);
        b.add_tile(&p, Tile::new(2, 1)).unwrap();
        b.add_tile(&p, Tile::new(1, 2)).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());

        b.add_tile(&p, Tile::new(1, 2)).unwrap();
        assert_ne!(a.canonical_key(), b.canonical_key());
    }

    #[test]
    fn canonical_key_injective_on_tiny_universe() {
        // All (m+1)^(nk) joker-free hands for n=2, k=2, m=2.
        let p = params(2, 2, 2, 0);
        let mut keys = std::collections::HashSet::new();
        let mut total = 0u32;
        for c0 in 0..=2u8 {
            for c1 in 0..=2u8 {
                for c2 in 0..=2u8 {
                    for c3 in 0..=2u8 {
                        let mut hand = Hand::empty(&p);
                        hand.set_count(&p, Tile::new(1, 1), c0).unwrap();
                        hand.set_count(&p, Tile::new(2, 1), c1).unwrap();
                        hand.set_count(&p, Tile::new(1, 2), c2).unwrap();
                        hand.set_count(&p, Tile::new(2, 2), c3).unwrap();
                        keys.insert(hand.canonical_key());
                        total += 1;
                    }
                }
            }
        }
        assert_eq!(total, 81);
        assert_eq!(keys.len(), 81);
    }

    #[test]
    fn problem_joint_bounds_enforced() {
        let p = params(13, 4, 2, 1);
        let hand = Hand::from_tiles(&p, [Tile::new(5, 1), Tile::new(5, 1)], 0).unwrap();
        let table = Hand::from_tiles(&p, [Tile::new(5, 1)], 0);
        // Building the table hand alone is fine; combining exceeds m.
        let err = Problem::new(p, hand, table.unwrap()).unwrap_err();
        assert!(matches!(err, ProblemError::JointCountExceedsCopies { total: 3, m: 2, .. }));

        let hand = Hand::from_tiles(&p, [], 1).unwrap();
        let table = Hand::from_tiles(&p, [], 1).unwrap();
        let err = Problem::new(p, hand, table).unwrap_err();
        assert!(matches!(err, ProblemError::JointJokersExceed { total: 2, j: 1 }));
    }
}
