//! Frontier evaluation functions. Every evaluator returns an estimate of the
//! probability that MAX has a forced win from the given position.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{
    initial_position, solve_exact, Board, GBoard, GSolver, GameKind, Position, Side,
};

/// Deepest split game for which an e2 table may be built.
pub const MAX_E2_DEPTH: u32 = 12;
/// Longest G row for which an e3 table may be built.
pub const MAX_E3_LEN: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvaluatorKind {
    E1,
    E2,
    E3,
    Exact,
}

impl EvaluatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EvaluatorKind::E1 => "e1",
            EvaluatorKind::E2 => "e2",
            EvaluatorKind::E3 => "e3",
            EvaluatorKind::Exact => "exact",
        }
    }
}

impl fmt::Display for EvaluatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvaluatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e1" => Ok(EvaluatorKind::E1),
            "e2" => Ok(EvaluatorKind::E2),
            "e3" => Ok(EvaluatorKind::E3),
            "exact" => Ok(EvaluatorKind::Exact),
            _ => Err(Error::InvalidArgument(format!("unknown evaluator {s:?}"))),
        }
    }
}

/// Probability that a position is a forced win for the player to move,
/// keyed by `(moves_remaining, ones_count)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureWinTable {
    // rows[m][w]; row 0 is unused
    rows: Vec<Vec<f64>>,
}

impl FeatureWinTable {
    pub fn get(&self, moves_remaining: u32, ones: u32) -> Option<f64> {
        self.rows
            .get(moves_remaining as usize)
            .and_then(|row| row.get(ones as usize))
            .copied()
    }

    pub fn max_moves(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    /// `(moves_remaining, ones, win_prob)` triples in ascending key order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.rows.iter().enumerate().skip(1).flat_map(|(m, row)| {
            row.iter()
                .enumerate()
                .map(move |(w, &p)| (m as u32, w as u32, p))
        })
    }

    /// CSV dump with header `moves_remaining,ones,win_prob`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("moves_remaining,ones,win_prob\n");
        for (m, w, p) in self.entries() {
            out.push_str(&format!("{m},{w},{}\n", format_sig(p, 12)));
        }
        out
    }
}

/// `%g`-style formatting with `digits` significant digits and trailing zeros
/// stripped.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Hypergeometric distribution of the number of ones in the left half of a
/// uniformly shuffled segment of `size` squares holding `ones` ones. Index
/// `i` of the result is the probability of `j_lo + i` ones on the left.
fn left_half_distribution(size: usize, ones: usize) -> (usize, Vec<f64>) {
    let half = size / 2;
    let j_lo = ones.saturating_sub(half);
    let j_hi = ones.min(half);
    // Start from the mode and walk outwards with the pmf ratio so no term
    // overflows; far tails simply underflow to zero.
    let mode = ((half + 1) * (ones + 1) / (size + 2)).clamp(j_lo, j_hi);
    let mut weights = vec![0.0; j_hi - j_lo + 1];
    weights[mode - j_lo] = 1.0;
    // P(j+1)/P(j) = (w-j)(h-j) / ((j+1)(s-w-h+j+1))
    let ratio = |j: usize| {
        ((ones - j) * (half - j)) as f64 / ((j + 1) * (size + j + 1 - ones - half)) as f64
    };
    for j in mode..j_hi {
        weights[j + 1 - j_lo] = weights[j - j_lo] * ratio(j);
    }
    for j in (j_lo..mode).rev() {
        weights[j - j_lo] = weights[j + 1 - j_lo] / ratio(j);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    (j_lo, weights)
}

/// Exact forced-win probability for the player to move in a P-game, given
/// the moves remaining and the number of ones, assuming every arrangement of
/// those ones is equally likely.
///
/// With one move left the mover wins iff a `1` exists. With more, the mover
/// loses only if both halves are wins for the opponent; given the split of
/// ones between the halves (hypergeometric), the halves are independent.
pub fn build_e2_table(depth: u32) -> Result<FeatureWinTable> {
    if !(1..=MAX_E2_DEPTH).contains(&depth) {
        return Err(Error::InvalidArgument(format!(
            "e2 table depth must be in 1..={MAX_E2_DEPTH}, got {depth}"
        )));
    }
    let mut rows = vec![Vec::new()];
    rows.push(vec![0.0, 1.0, 1.0]);
    for d in 2..=depth as usize {
        let size = 1usize << d;
        let half = size / 2;
        let prev = &rows[d - 1];
        let row: Vec<f64> = (0..=size)
            .map(|w| {
                let (j_lo, h) = left_half_distribution(size, w);
                let opp_wins_both: f64 = h
                    .iter()
                    .enumerate()
                    .map(|(i, &pj)| {
                        let j = j_lo + i;
                        debug_assert!(w - j <= half);
                        pj * prev[j] * prev[w - j]
                    })
                    .sum();
                (1.0 - opp_wins_both).clamp(0.0, 1.0)
            })
            .collect();
        rows.push(row);
    }
    Ok(FeatureWinTable { rows })
}

/// Fraction of G rows of each length and ones count that are forced wins for
/// the player to move, found by solving every row exactly. Row length `l` is
/// stored under `moves_remaining = l - 1`.
pub fn build_e3_table(max_len: u32) -> Result<FeatureWinTable> {
    if !(2..=MAX_E3_LEN).contains(&max_len) {
        return Err(Error::InvalidArgument(format!(
            "e3 table max_len must be in 2..={MAX_E3_LEN}, got {max_len}"
        )));
    }
    let mut rows = vec![Vec::new()];
    for len in 2..=max_len as usize {
        let mut wins = vec![0u64; len + 1];
        let mut totals = vec![0u64; len + 1];
        for code in 0u32..1 << len {
            let squares: Vec<u8> = (0..len).map(|i| ((code >> i) & 1) as u8).collect();
            let board = Board::G(GBoard::new(squares)?);
            let w = code.count_ones() as usize;
            totals[w] += 1;
            if GSolver::new(&board).mover_wins(0, len) {
                wins[w] += 1;
            }
        }
        rows.push(
            wins.iter()
                .zip(&totals)
                .map(|(&k, &n)| k as f64 / n as f64)
                .collect(),
        );
    }
    Ok(FeatureWinTable { rows })
}

fn mover_to_max(p: &Position<'_>, mover_value: f64) -> f64 {
    match p.mover() {
        Side::Max => mover_value,
        Side::Min => 1.0 - mover_value,
    }
}

/// Density of ones, oriented toward the side that will make the final move.
pub fn eval_e1(p: &Position<'_>) -> f64 {
    assert!(!p.is_terminal(), "e1 evaluated at a terminal position");
    let f = f64::from(p.ones()) / p.len() as f64;
    match p.last_mover() {
        Side::Max => f,
        Side::Min => 1.0 - f,
    }
}

fn eval_table(p: &Position<'_>, table: &FeatureWinTable) -> Result<f64> {
    assert!(!p.is_terminal(), "table evaluator at a terminal position");
    let ones = p.ones();
    let w = table
        .get(p.moves_remaining(), ones)
        .ok_or(Error::MissingTableEntry {
            moves_remaining: p.moves_remaining(),
            ones,
        })?;
    Ok(mover_to_max(p, w))
}

pub fn eval_e2(p: &Position<'_>, table: &FeatureWinTable) -> Result<f64> {
    eval_table(p, table)
}

pub fn eval_e3(p: &Position<'_>, table: &FeatureWinTable) -> Result<f64> {
    eval_table(p, table)
}

pub fn eval_exact(p: &Position<'_>) -> f64 {
    f64::from(solve_exact(p))
}

#[derive(Clone, Debug)]
pub enum Evaluator {
    E1,
    E2(Arc<FeatureWinTable>),
    E3(Arc<FeatureWinTable>),
    Exact,
}

impl Evaluator {
    /// Builds the evaluator of the given kind for games of `n_moves` moves,
    /// including any table it needs.
    pub fn for_game(kind: EvaluatorKind, game: GameKind, n_moves: u32) -> Result<Evaluator> {
        match (kind, game) {
            (EvaluatorKind::E1, _) => Ok(Evaluator::E1),
            (EvaluatorKind::Exact, _) => Ok(Evaluator::Exact),
            (EvaluatorKind::E2, GameKind::P | GameKind::N) => {
                Ok(Evaluator::E2(Arc::new(build_e2_table(n_moves)?)))
            }
            (EvaluatorKind::E3, GameKind::G) => {
                Ok(Evaluator::E3(Arc::new(build_e3_table(n_moves + 1)?)))
            }
            (k, g) => Err(Error::IncompatibleEvaluator {
                evaluator: k.as_str(),
                game: g.as_str(),
            }),
        }
    }

    pub fn kind(&self) -> EvaluatorKind {
        match self {
            Evaluator::E1 => EvaluatorKind::E1,
            Evaluator::E2(_) => EvaluatorKind::E2,
            Evaluator::E3(_) => EvaluatorKind::E3,
            Evaluator::Exact => EvaluatorKind::Exact,
        }
    }

    /// MAX-win estimate for a non-terminal position (the exact evaluator also
    /// accepts terminals).
    pub fn evaluate(&self, p: &Position<'_>) -> Result<f64> {
        match self {
            Evaluator::E1 => Ok(eval_e1(p)),
            Evaluator::E2(t) => eval_e2(p, t),
            Evaluator::E3(t) => eval_e3(p, t),
            Evaluator::Exact => Ok(eval_exact(p)),
        }
    }

    /// Checks that this evaluator can score every non-terminal position of
    /// the board's game.
    pub fn check_board(&self, board: &Board) -> Result<()> {
        let game = board.kind();
        let incompatible = || Error::IncompatibleEvaluator {
            evaluator: self.kind().as_str(),
            game: game.as_str(),
        };
        let table = match self {
            Evaluator::E1 | Evaluator::Exact => return Ok(()),
            Evaluator::E2(t) if game.is_split() => t,
            Evaluator::E3(t) if !game.is_split() => t,
            _ => return Err(incompatible()),
        };
        let root = initial_position(board, Side::Max);
        if table.max_moves() < root.moves_remaining() {
            return Err(Error::MissingTableEntry {
                moves_remaining: root.moves_remaining(),
                ones: root.ones(),
            });
        }
        Ok(())
    }
}
