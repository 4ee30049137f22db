//! Board-splitting model games: board construction, move rules, scoring and
//! an exact solver.
//!
//! All three families share one orientation: the game ends when a single
//! square remains, and the player who made the last move wins iff that
//! square holds a `1`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Leaf probability `(3 - √5) / 2` for P-boards. With it the side to move
/// has a forced win with probability `(√5 - 1) / 2` at every level of the
/// tree, so games of any length stay undecided at the root.
pub const BALANCED_ONES_PROB: f64 = 0.381_966_011_250_105_1;

/// Largest split-board depth accepted by the generators (2^24 squares).
pub const MAX_SPLIT_DEPTH: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// The side that moves first in a game.
    Max,
    Min,
}

impl Side {
    pub fn opponent(self) -> Side {
        match self {
            Side::Max => Side::Min,
            Side::Min => Side::Max,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Max => "MAX",
            Side::Min => "MIN",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Side::Max),
            "min" => Ok(Side::Min),
            _ => Err(Error::InvalidArgument(format!("unknown side {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameKind {
    P,
    N,
    G,
}

impl GameKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GameKind::P => "P",
            GameKind::N => "N",
            GameKind::G => "G",
        }
    }

    pub fn is_split(self) -> bool {
        !matches!(self, GameKind::G)
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p" => Ok(GameKind::P),
            "n" => Ok(GameKind::N),
            "g" => Ok(GameKind::G),
            _ => Err(Error::InvalidArgument(format!("unknown game kind {s:?}"))),
        }
    }
}

/// Running count of ones: `prefix[i]` is the number of ones in `bits[..i]`.
fn ones_prefix(bits: &[u8]) -> Vec<u32> {
    let mut prefix = Vec::with_capacity(bits.len() + 1);
    let mut acc = 0u32;
    prefix.push(0);
    for &b in bits {
        acc += u32::from(b);
        prefix.push(acc);
    }
    prefix
}

fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(i) => Err(Error::InvalidArgument(format!(
            "square {i} holds {}, expected 0 or 1",
            bits[i]
        ))),
        None => Ok(()),
    }
}

/// A P- or N-game board: `2^depth` leaf squares, halved on every move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitBoard {
    kind: GameKind,
    depth: u32,
    leaf_bits: Vec<u8>,
    prefix: Vec<u32>,
}

impl SplitBoard {
    pub fn new(kind: GameKind, leaf_bits: Vec<u8>) -> Result<Self> {
        if !kind.is_split() {
            return Err(Error::InvalidArgument(
                "split boards must be P or N kind".into(),
            ));
        }
        let n = leaf_bits.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "split board needs a power-of-two length >= 2, got {n}"
            )));
        }
        check_bits(&leaf_bits)?;
        let prefix = ones_prefix(&leaf_bits);
        Ok(SplitBoard {
            kind,
            depth: n.trailing_zeros(),
            leaf_bits,
            prefix,
        })
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    /// Number of moves in a full game.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn leaf_bits(&self) -> &[u8] {
        &self.leaf_bits
    }
}

/// A G-game board: a row of squares from which either end square is removed
/// on every move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GBoard {
    squares: Vec<u8>,
    prefix: Vec<u32>,
}

impl GBoard {
    pub fn new(squares: Vec<u8>) -> Result<Self> {
        if squares.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "G board needs at least 2 squares, got {}",
                squares.len()
            )));
        }
        check_bits(&squares)?;
        let prefix = ones_prefix(&squares);
        Ok(GBoard { squares, prefix })
    }

    pub fn squares(&self) -> &[u8] {
        &self.squares
    }

    pub fn n_moves(&self) -> u32 {
        (self.squares.len() - 1) as u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Board {
    Split(SplitBoard),
    G(GBoard),
}

impl Board {
    pub fn kind(&self) -> GameKind {
        match self {
            Board::Split(b) => b.kind,
            Board::G(_) => GameKind::G,
        }
    }

    pub fn squares(&self) -> &[u8] {
        match self {
            Board::Split(b) => &b.leaf_bits,
            Board::G(b) => &b.squares,
        }
    }

    /// Number of moves in a full game on this board.
    pub fn n_moves(&self) -> u32 {
        match self {
            Board::Split(b) => b.depth,
            Board::G(b) => b.n_moves(),
        }
    }

    /// Ones in the half-open square range `[lo, hi)`.
    pub fn ones_in(&self, lo: usize, hi: usize) -> u32 {
        let prefix = match self {
            Board::Split(b) => &b.prefix,
            Board::G(b) => &b.prefix,
        };
        prefix[hi] - prefix[lo]
    }

    /// Parses a `0`/`1` string, index 0 leftmost.
    pub fn parse(kind: GameKind, s: &str) -> Result<Board> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::MalformedBoard(format!(
                    "unexpected character {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        let board = match kind {
            GameKind::G => GBoard::new(bits).map(Board::G),
            _ => SplitBoard::new(kind, bits).map(Board::Split),
        };
        board.map_err(|e| match e {
            Error::InvalidArgument(msg) => Error::MalformedBoard(msg),
            other => other,
        })
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.squares() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl From<SplitBoard> for Board {
    fn from(b: SplitBoard) -> Self {
        Board::Split(b)
    }
}

impl From<GBoard> for Board {
    fn from(b: GBoard) -> Self {
        Board::G(b)
    }
}

fn check_depth(depth: u32) -> Result<()> {
    if !(1..=MAX_SPLIT_DEPTH).contains(&depth) {
        return Err(Error::InvalidArgument(format!(
            "depth must be in 1..={MAX_SPLIT_DEPTH}, got {depth}"
        )));
    }
    Ok(())
}

/// Mixes a master seed and a board index into an independent per-board seed,
/// so board `i` is the same no matter which worker builds it or when.
pub fn board_seed(master_seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser over the combined input
    let mut z = master_seed
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random P-game board: `2^depth` independent squares, each `1` with
/// probability `ones_prob`.
pub fn generate_p_board(depth: u32, ones_prob: f64, seed: u64) -> Result<Board> {
    check_depth(depth)?;
    if !(0.0..=1.0).contains(&ones_prob) {
        return Err(Error::InvalidArgument(format!(
            "ones_prob must be in [0, 1], got {ones_prob}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = (0..1usize << depth)
        .map(|_| u8::from(rng.gen_bool(ones_prob)))
        .collect();
    SplitBoard::new(GameKind::P, bits).map(Board::Split)
}

/// Random N-game board. Every arc of a full binary tree of the given depth
/// gets an independent fair `±1` label, and a leaf is `1` iff the labels on
/// its root path sum to a strictly positive value.
pub fn generate_n_board(depth: u32, seed: u64) -> Result<Board> {
    check_depth(depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = vec![0i8; 1usize << (depth + 1)];
    for a in arcs.iter_mut().skip(2) {
        *a = if rng.gen_bool(0.5) { 1 } else { -1 };
    }
    n_board_from_arcs(depth, &arcs)
}

/// Builds an N-game board from explicit arc labels.
///
/// Nodes use heap numbering: the root is node 1 and the children of node
/// `k` are `2k` and `2k + 1`. `arcs[k]` labels the arc entering node `k`;
/// entries 0 and 1 are ignored. Leaf `i` is node `2^depth + i`.
pub fn n_board_from_arcs(depth: u32, arcs: &[i8]) -> Result<Board> {
    check_depth(depth)?;
    let nodes = 1usize << (depth + 1);
    if arcs.len() != nodes {
        return Err(Error::InvalidArgument(format!(
            "expected {nodes} arc slots for depth {depth}, got {}",
            arcs.len()
        )));
    }
    if let Some(k) = (2..nodes).find(|&k| arcs[k] != 1 && arcs[k] != -1) {
        return Err(Error::InvalidArgument(format!(
            "arc {k} has label {}, expected +1 or -1",
            arcs[k]
        )));
    }
    let mut sums = vec![0i32; nodes];
    for k in 2..nodes {
        sums[k] = sums[k / 2] + i32::from(arcs[k]);
    }
    let leaves = 1usize << depth;
    let bits = sums[leaves..].iter().map(|&s| u8::from(s > 0)).collect();
    SplitBoard::new(GameKind::N, bits).map(Board::Split)
}

/// All `2^(n_moves+1)` G-game boards of the given length, in lexicographic
/// order (`00..0` first).
pub fn enumerate_g_boards(n_moves: u32) -> Result<Vec<Board>> {
    if !(1..=24).contains(&n_moves) {
        return Err(Error::InvalidArgument(format!(
            "n_moves must be in 1..=24, got {n_moves}"
        )));
    }
    let len = n_moves as usize + 1;
    (0u32..1 << len)
        .map(|code| {
            let squares = (0..len)
                .map(|i| ((code >> (len - 1 - i)) & 1) as u8)
                .collect();
            GBoard::new(squares).map(Board::G)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    KeepLeft,
    KeepRight,
    RemoveLeft,
    RemoveRight,
}

const SPLIT_MOVES: [Move; 2] = [Move::KeepLeft, Move::KeepRight];
const G_MOVES: [Move; 2] = [Move::RemoveLeft, Move::RemoveRight];

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::KeepLeft => "KEEP_LEFT",
            Move::KeepRight => "KEEP_RIGHT",
            Move::RemoveLeft => "REMOVE_LEFT",
            Move::RemoveRight => "REMOVE_RIGHT",
        })
    }
}

/// A game in progress: the live segment `[lo, hi)` of a board plus the side
/// to move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position<'a> {
    board: &'a Board,
    lo: usize,
    hi: usize,
    mover: Side,
    moves_remaining: u32,
}

impl<'a> Position<'a> {
    pub fn board(&self) -> &'a Board {
        self.board
    }

    pub fn segment(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn mover(&self) -> Side {
        self.mover
    }

    pub fn moves_remaining(&self) -> u32 {
        self.moves_remaining
    }

    pub fn is_terminal(&self) -> bool {
        self.moves_remaining == 0
    }

    pub fn ones(&self) -> u32 {
        self.board.ones_in(self.lo, self.hi)
    }

    /// The side that will make the final move of the game from here.
    pub fn last_mover(&self) -> Side {
        if self.moves_remaining % 2 == 1 {
            self.mover
        } else {
            self.mover.opponent()
        }
    }

    /// The same segment with the other side to move.
    pub fn with_mover(&self, mover: Side) -> Position<'a> {
        Position { mover, ..*self }
    }

    pub fn legal_moves(&self) -> &'static [Move] {
        if self.is_terminal() {
            &[]
        } else if self.board.kind().is_split() {
            &SPLIT_MOVES
        } else {
            &G_MOVES
        }
    }

    /// Panics if `m` is not legal here.
    pub fn apply(&self, m: Move) -> Position<'a> {
        assert!(
            self.legal_moves().contains(&m),
            "illegal move {m} at segment [{}, {}) of a {} board",
            self.lo,
            self.hi,
            self.board.kind()
        );
        let (lo, hi) = match m {
            Move::KeepLeft => (self.lo, (self.lo + self.hi) / 2),
            Move::KeepRight => ((self.lo + self.hi) / 2, self.hi),
            Move::RemoveLeft => (self.lo + 1, self.hi),
            Move::RemoveRight => (self.lo, self.hi - 1),
        };
        Position {
            board: self.board,
            lo,
            hi,
            mover: self.mover.opponent(),
            moves_remaining: self.moves_remaining - 1,
        }
    }

    /// Both children in canonical move order.
    pub fn children(&self) -> [Position<'a>; 2] {
        let moves = self.legal_moves();
        assert!(!moves.is_empty(), "terminal position has no children");
        [self.apply(moves[0]), self.apply(moves[1])]
    }
}

pub fn initial_position(board: &Board, first_mover: Side) -> Position<'_> {
    Position {
        board,
        lo: 0,
        hi: board.squares().len(),
        mover: first_mover,
        moves_remaining: board.n_moves(),
    }
}

pub fn legal_moves(p: &Position<'_>) -> &'static [Move] {
    p.legal_moves()
}

pub fn apply_move<'a>(p: &Position<'a>, m: Move) -> Position<'a> {
    p.apply(m)
}

/// Score of a finished game from MAX's point of view. The side to move at a
/// terminal position did not make the last move, so MAX wins iff the square
/// is `1` and MIN is to move, or the square is `0` and MAX is to move.
pub fn terminal_value_for_max(p: &Position<'_>) -> u8 {
    assert!(p.is_terminal(), "terminal_value_for_max on a live position");
    let square_is_one = p.board.squares()[p.lo] == 1;
    u8::from(square_is_one == (p.mover == Side::Min))
}

fn to_max_value(p: &Position<'_>, mover_wins: bool) -> u8 {
    u8::from(mover_wins == (p.mover == Side::Max))
}

/// Forced-win test for the side to move on a split board. Subtrees never
/// share positions, so plain recursion is exact.
fn split_mover_wins(p: &Position<'_>) -> bool {
    if p.is_terminal() {
        // The opponent made the last move and wins on a 1.
        return p.board.squares()[p.lo] == 0;
    }
    p.children().iter().any(|c| !split_mover_wins(c))
}

/// Memoised G-game solver. Whether the side to move wins depends only on the
/// interval, not on which side that is, so one cache slot per interval is
/// enough.
pub struct GSolver<'a> {
    board: &'a Board,
    n: usize,
    memo: Vec<Option<bool>>,
}

impl<'a> GSolver<'a> {
    pub fn new(board: &'a Board) -> Self {
        let n = board.squares().len();
        GSolver {
            board,
            n,
            memo: vec![None; n * (n + 1)],
        }
    }

    pub fn mover_wins(&mut self, lo: usize, hi: usize) -> bool {
        let slot = lo * (self.n + 1) + hi;
        if let Some(v) = self.memo[slot] {
            return v;
        }
        let v = if hi - lo == 1 {
            self.board.squares()[lo] == 0
        } else {
            !self.mover_wins(lo + 1, hi) || !self.mover_wins(lo, hi - 1)
        };
        self.memo[slot] = Some(v);
        v
    }
}

fn mover_wins(p: &Position<'_>) -> bool {
    match p.board {
        Board::Split(_) => split_mover_wins(p),
        Board::G(_) => GSolver::new(p.board).mover_wins(p.lo, p.hi),
    }
}

/// Game-theoretic value for MAX (0 or 1) under optimal play by both sides.
pub fn solve_exact(p: &Position<'_>) -> u8 {
    to_max_value(p, mover_wins(p))
}

/// One optimal move for the side to move: the first winning move in
/// canonical order, or the first move if the position is lost anyway.
/// `None` at terminal positions.
pub fn optimal_move(p: &Position<'_>) -> Option<Move> {
    let moves = p.legal_moves();
    let first = *moves.first()?;
    let winning = moves.iter().copied().find(|&m| !mover_wins(&p.apply(m)));
    Some(winning.unwrap_or(first))
}
