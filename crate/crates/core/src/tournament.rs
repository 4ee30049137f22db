//! Paired-game contests between two players, critical-pair accounting and
//! report rendering.
//!
//! Every board is played twice, once with each player moving first. A pair
//! is *critical* when the same player wins both games; only critical pairs
//! enter the win statistics.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{format_sig, Evaluator, EvaluatorKind};
use crate::game::{
    board_seed, enumerate_g_boards, generate_n_board, generate_p_board, initial_position,
    terminal_value_for_max, Board, GameKind, Side,
};
use crate::search::{choose_move, BackupRule, PlayerConfig};
use crate::stats::{format_p_value, format_win_pct, win_pct_tenths, SignificanceMethod};

/// Which of the two configured players.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Seat {
    A,
    B,
}

impl Seat {
    pub fn other(self) -> Seat {
        match self {
            Seat::A => Seat::B,
            Seat::B => Seat::A,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairOutcome {
    Split,
    ASwept,
    BSwept,
}

/// The two backup rules facing each other in a contest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matchup {
    pub rule_a: BackupRule,
    pub rule_b: BackupRule,
}

impl Matchup {
    pub const fn new(rule_a: BackupRule, rule_b: BackupRule) -> Self {
        Matchup { rule_a, rule_b }
    }

    /// Product vs minimax, average vs minimax, average vs product.
    pub const STANDARD: [Matchup; 3] = [
        Matchup::new(BackupRule::Product, BackupRule::Minimax),
        Matchup::new(BackupRule::Average, BackupRule::Minimax),
        Matchup::new(BackupRule::Average, BackupRule::Product),
    ];
}

impl fmt::Display for Matchup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vs {}", self.rule_a, self.rule_b)
    }
}

/// Plays one game on `board` with `first` moving first (as MAX) and returns
/// the winner.
pub fn play_game(
    board: &Board,
    first: Seat,
    cfg_a: &PlayerConfig,
    cfg_b: &PlayerConfig,
) -> Result<Seat> {
    let mut pos = initial_position(board, Side::Max);
    let seat_of = |side: Side| {
        if side == Side::Max {
            first
        } else {
            first.other()
        }
    };
    while !pos.is_terminal() {
        let cfg = match seat_of(pos.mover()) {
            Seat::A => cfg_a,
            Seat::B => cfg_b,
        };
        pos = pos.apply(choose_move(&pos, cfg)?);
    }
    let winner = if terminal_value_for_max(&pos) == 1 {
        Side::Max
    } else {
        Side::Min
    };
    Ok(seat_of(winner))
}

/// Plays A-first then B-first on the same board.
pub fn play_pair(board: &Board, cfg_a: &PlayerConfig, cfg_b: &PlayerConfig) -> Result<PairOutcome> {
    let first = play_game(board, Seat::A, cfg_a, cfg_b)?;
    let second = play_game(board, Seat::B, cfg_a, cfg_b)?;
    Ok(match (first, second) {
        (Seat::A, Seat::A) => PairOutcome::ASwept,
        (Seat::B, Seat::B) => PairOutcome::BSwept,
        _ => PairOutcome::Split,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignificanceReport {
    /// Percentage of critical pairs won by A.
    pub win_pct: f64,
    pub p_value: f64,
}

/// Aggregated outcome of one contest (one matchup at one depth).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContestRecord {
    pub game_kind: GameKind,
    /// Moves in a full game on the contest's boards.
    pub n_moves: u32,
    pub eval_a: EvaluatorKind,
    pub eval_b: EvaluatorKind,
    pub depth: u32,
    pub rule_a: BackupRule,
    pub rule_b: BackupRule,
    pub n_boards: u64,
    pub critical_pairs: u64,
    pub a_pair_wins: u64,
    /// `None` for exhaustively enumerated board sets.
    pub master_seed: Option<u64>,
}

impl ContestRecord {
    pub fn b_pair_wins(&self) -> u64 {
        self.critical_pairs - self.a_pair_wins
    }

    pub fn matchup(&self) -> Matchup {
        Matchup::new(self.rule_a, self.rule_b)
    }

    pub fn significance(&self, method: SignificanceMethod) -> Option<SignificanceReport> {
        let p_value = method.p_value(self.critical_pairs, self.a_pair_wins)?;
        Some(SignificanceReport {
            win_pct: 100.0 * self.a_pair_wins as f64 / self.critical_pairs as f64,
            p_value,
        })
    }

    fn eval_label(&self) -> String {
        if self.eval_a == self.eval_b {
            self.eval_a.to_string()
        } else {
            format!("{}/{}", self.eval_a, self.eval_b)
        }
    }
}

/// Plays every board as a pair and counts critical pairs. Both players use
/// `evaluator` and search `depth` plies. The result does not depend on board
/// order or on how rayon schedules the work.
pub fn run_contest(
    boards: &[Board],
    depth: u32,
    matchup: Matchup,
    evaluator: &Evaluator,
) -> Result<ContestRecord> {
    let first = boards
        .first()
        .ok_or_else(|| Error::InvalidArgument("contest needs at least one board".into()))?;
    let game_kind = first.kind();
    let n_moves = first.n_moves();
    if let Some(b) = boards
        .iter()
        .find(|b| b.kind() != game_kind || b.n_moves() != n_moves)
    {
        return Err(Error::InvalidArgument(format!(
            "mixed board set: {} board with {} moves among {game_kind} boards with {n_moves}",
            b.kind(),
            b.n_moves()
        )));
    }
    evaluator.check_board(first)?;
    let cfg_a = PlayerConfig::new(matchup.rule_a, evaluator.clone(), depth)?;
    let cfg_b = PlayerConfig::new(matchup.rule_b, evaluator.clone(), depth)?;

    let (critical_pairs, a_pair_wins) = boards
        .par_iter()
        .map(|b| {
            play_pair(b, &cfg_a, &cfg_b).map(|o| match o {
                PairOutcome::Split => (0u64, 0u64),
                PairOutcome::ASwept => (1, 1),
                PairOutcome::BSwept => (1, 0),
            })
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))?;

    Ok(ContestRecord {
        game_kind,
        n_moves,
        eval_a: evaluator.kind(),
        eval_b: evaluator.kind(),
        depth,
        rule_a: matchup.rule_a,
        rule_b: matchup.rule_b,
        n_boards: boards.len() as u64,
        critical_pairs,
        a_pair_wins,
        master_seed: None,
    })
}

/// Board set for an experiment: sampled P/N boards (board `i` seeded from
/// `(master_seed, i)`) or every G board.
#[derive(Clone, Debug, PartialEq)]
pub struct BoardSpec {
    pub game: GameKind,
    pub n_moves: u32,
    /// Ignored for G-games.
    pub count: u64,
    /// P-games only.
    pub ones_prob: f64,
    /// Ignored for G-games.
    pub master_seed: u64,
}

impl BoardSpec {
    pub fn build(&self) -> Result<Vec<Board>> {
        match self.game {
            GameKind::G => enumerate_g_boards(self.n_moves),
            GameKind::P | GameKind::N => {
                if self.count == 0 {
                    return Err(Error::InvalidArgument("board count must be >= 1".into()));
                }
                (0..self.count)
                    .into_par_iter()
                    .map(|i| {
                        let seed = board_seed(self.master_seed, i);
                        match self.game {
                            GameKind::P => generate_p_board(self.n_moves, self.ones_prob, seed),
                            _ => generate_n_board(self.n_moves, seed),
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn seed_label(&self) -> Option<u64> {
        self.game.is_split().then_some(self.master_seed)
    }
}

/// A full study: every matchup at every depth over one board set.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub boards: BoardSpec,
    pub evaluator: EvaluatorKind,
    pub depths: RangeInclusive<u32>,
    pub matchups: Vec<Matchup>,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (*self.depths.start(), *self.depths.end());
        if lo < 1 || hi < lo || hi > self.boards.n_moves {
            return Err(Error::InvalidArgument(format!(
                "depth range {lo}..{hi} must lie within 1..{}",
                self.boards.n_moves
            )));
        }
        if self.matchups.is_empty() {
            return Err(Error::InvalidArgument("no matchups given".into()));
        }
        Ok(())
    }

    /// Records ordered by matchup, then depth.
    pub fn run(&self) -> Result<Vec<ContestRecord>> {
        self.validate()?;
        let evaluator = Evaluator::for_game(self.evaluator, self.boards.game, self.boards.n_moves)?;
        let boards = self.boards.build()?;
        let mut records = Vec::new();
        for &matchup in &self.matchups {
            for depth in self.depths.clone() {
                let mut rec = run_contest(&boards, depth, matchup, &evaluator)?;
                rec.master_seed = self.boards.seed_label();
                records.push(rec);
            }
        }
        Ok(records)
    }
}

pub const RESULTS_CSV_HEADER: &str =
    "game,eval,depth,rule_a,rule_b,n_boards,critical_pairs,a_pair_wins,win_pct,p_value,master_seed";

/// Machine-readable results, one row per record.
pub fn results_csv(records: &[ContestRecord], method: SignificanceMethod) -> String {
    let mut out = format!("{RESULTS_CSV_HEADER}\n");
    for r in records {
        let win_pct = format_win_pct(r.critical_pairs, r.a_pair_wins).unwrap_or_default();
        let p_value = method
            .p_value(r.critical_pairs, r.a_pair_wins)
            .map(format_p_value)
            .unwrap_or_default();
        let seed = r.master_seed.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.game_kind,
            r.eval_label(),
            r.depth,
            r.rule_a,
            r.rule_b,
            r.n_boards,
            r.critical_pairs,
            r.a_pair_wins,
            win_pct,
            p_value,
            seed
        ));
    }
    out
}

/// Significance as a percentage: two significant digits, or one digit in
/// scientific form below 0.01%.
fn format_significance_pct(p: f64) -> String {
    let pct = 100.0 * p;
    if pct >= 0.01 {
        format!("{}%", format_sig(pct, 2))
    } else {
        let s = format!("{pct:.0e}");
        let (m, e) = s.split_once('e').expect("exponent");
        format!("{m}×10^{e}%")
    }
}

fn depth_notes(depth: u32, n_moves: u32) -> &'static str {
    if n_moves >= 2 && depth + 1 >= n_moves {
        "*, **"
    } else if depth == 1 {
        "*"
    } else {
        ""
    }
}

/// Markdown tables in the layout of the classic paired-contest report: a
/// counts table (critical pairs and wins per matchup and depth) and a
/// percentage/significance table. Records are grouped by game and evaluator.
pub fn render_tables(records: &[ContestRecord], method: SignificanceMethod) -> String {
    type GroupKey = (GameKind, String, u32);
    let mut groups: BTreeMap<GroupKey, Vec<&ContestRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.game_kind, r.eval_label(), r.n_moves))
            .or_default()
            .push(r);
    }
    if groups.is_empty() {
        return render_group("", &Matchup::STANDARD, &[], method);
    }
    let mut out = String::new();
    for ((game, eval, n_moves), recs) in groups {
        let mut matchups: Vec<Matchup> = Vec::new();
        for r in &recs {
            if !matchups.contains(&r.matchup()) {
                matchups.push(r.matchup());
            }
        }
        let title = format!("{game}-games, evaluator {eval}, {n_moves}-move games");
        out.push_str(&render_group(&title, &matchups, &recs, method));
        out.push('\n');
    }
    out
}

fn render_group(
    title: &str,
    matchups: &[Matchup],
    recs: &[&ContestRecord],
    method: SignificanceMethod,
) -> String {
    let mut by_depth: BTreeMap<u32, BTreeMap<Matchup, &ContestRecord>> = BTreeMap::new();
    for r in recs {
        by_depth.entry(r.depth).or_default().insert(r.matchup(), r);
    }
    let n_moves = recs.first().map_or(0, |r| r.n_moves);

    let mut out = String::new();
    if !title.is_empty() {
        out.push_str(&format!("### {title}\n\n"));
    }
    out.push_str("Critical pairs and pairs won by the first-named rule\n\n");
    out.push_str("| Search depth |");
    for m in matchups {
        out.push_str(&format!(" {m}: pairs | {m}: wins |"));
    }
    out.push_str(" Notes |\n|---|");
    for _ in matchups {
        out.push_str("---|---|");
    }
    out.push_str("---|\n");
    for (&depth, row) in &by_depth {
        out.push_str(&format!("| {depth} |"));
        for m in matchups {
            match row.get(m) {
                Some(r) => out.push_str(&format!(" {} | {} |", r.critical_pairs, r.a_pair_wins)),
                None => out.push_str(" | |"),
            }
        }
        out.push_str(&format!(" {} |\n", depth_notes(depth, n_moves)));
    }
    out.push_str("\n\\* both players play identically.\n");
    out.push_str("\\*\\* both players play perfectly.\n\n");

    out.push_str(&format!(
        "Percentage of critical pairs won and significance ({method})\n\n"
    ));
    out.push_str("| Search depth |");
    for m in matchups {
        out.push_str(&format!(" {m}: wins | {m}: significance |"));
    }
    out.push_str("\n|---|");
    for _ in matchups {
        out.push_str("---|---|");
    }
    out.push('\n');
    for (&depth, row) in &by_depth {
        let any_critical = row.values().any(|r| r.critical_pairs > 0);
        if !any_critical {
            continue;
        }
        out.push_str(&format!("| {depth} |"));
        for m in matchups {
            let cell = row.get(m).and_then(|r| {
                let pct = win_pct_tenths(r.critical_pairs, r.a_pair_wins)?;
                let p = method.p_value(r.critical_pairs, r.a_pair_wins)?;
                Some((pct, p))
            });
            match cell {
                Some((pct, p)) => out.push_str(&format!(
                    " {}.{}% | {} |",
                    pct / 10,
                    pct % 10,
                    format_significance_pct(p)
                )),
                None => out.push_str(" - | - |"),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{solve_exact, Board};

    fn record(depth: u32, n: u64, k: u64) -> ContestRecord {
        ContestRecord {
            game_kind: GameKind::P,
            n_moves: 10,
            eval_a: EvaluatorKind::E1,
            eval_b: EvaluatorKind::E1,
            depth,
            rule_a: BackupRule::Product,
            rule_b: BackupRule::Minimax,
            n_boards: 1600,
            critical_pairs: n,
            a_pair_wins: k,
            master_seed: Some(7),
        }
    }

    fn cfg(rule: BackupRule, depth: u32) -> PlayerConfig {
        PlayerConfig::new(rule, Evaluator::E1, depth).unwrap()
    }

    #[test]
    fn all_zero_board_goes_to_first_mover() {
        let b = Board::parse(GameKind::P, &"0".repeat(1024)).unwrap();
        let a = cfg(BackupRule::Product, 3);
        let m = cfg(BackupRule::Minimax, 3);
        assert_eq!(play_game(&b, Seat::A, &a, &m).unwrap(), Seat::A);
        assert_eq!(play_game(&b, Seat::B, &a, &m).unwrap(), Seat::B);
        assert_eq!(play_pair(&b, &a, &m).unwrap(), PairOutcome::Split);
    }

    #[test]
    fn identical_players_always_split() {
        for i in 0..100 {
            let b = generate_p_board(10, 0.5, board_seed(3, i)).unwrap();
            let c = cfg(BackupRule::Average, 4);
            assert_eq!(play_pair(&b, &c, &c).unwrap(), PairOutcome::Split);
        }
    }

    #[test]
    fn perfect_players_follow_game_value() {
        for i in 0..20 {
            let b = generate_p_board(10, 0.5, board_seed(5, i)).unwrap();
            let value = solve_exact(&initial_position(&b, Side::Max));
            let a = cfg(BackupRule::Product, 10);
            let m = cfg(BackupRule::Minimax, 10);
            let winner = play_game(&b, Seat::A, &a, &m).unwrap();
            assert_eq!(winner == Seat::A, value == 1);
        }
    }

    #[test]
    fn a_critical_pair_exists_at_depth_two() {
        let a = cfg(BackupRule::Product, 2);
        let m = cfg(BackupRule::Minimax, 2);
        let found = (0..2000).find(|&i| {
            let b = generate_p_board(10, 0.5, board_seed(11, i)).unwrap();
            play_pair(&b, &a, &m).unwrap() == PairOutcome::ASwept
        });
        assert!(found.is_some());
    }

    #[test]
    fn contest_is_order_independent() {
        let mut boards: Vec<Board> = (0..60)
            .map(|i| generate_p_board(8, 0.5, board_seed(9, i)).unwrap())
            .collect();
        let m = Matchup::STANDARD[0];
        let fwd = run_contest(&boards, 3, m, &Evaluator::E1).unwrap();
        boards.reverse();
        let rev = run_contest(&boards, 3, m, &Evaluator::E1).unwrap();
        assert_eq!(fwd, rev);
        assert!(fwd.a_pair_wins <= fwd.critical_pairs && fwd.critical_pairs <= fwd.n_boards);
        assert_eq!(fwd.a_pair_wins + fwd.b_pair_wins(), fwd.critical_pairs);
    }

    #[test]
    fn contest_rejects_bad_board_sets() {
        let m = Matchup::STANDARD[0];
        assert!(run_contest(&[], 2, m, &Evaluator::E1).is_err());
        let mixed = vec![
            generate_p_board(4, 0.5, 1).unwrap(),
            generate_p_board(5, 0.5, 1).unwrap(),
        ];
        assert!(run_contest(&mixed, 2, m, &Evaluator::E1).is_err());
    }

    #[test]
    fn experiment_validation() {
        let exp = Experiment {
            boards: BoardSpec {
                game: GameKind::P,
                n_moves: 6,
                count: 10,
                ones_prob: 0.5,
                master_seed: 1,
            },
            evaluator: EvaluatorKind::E1,
            depths: 1..=7,
            matchups: Matchup::STANDARD.to_vec(),
        };
        assert!(exp.run().is_err());
        let ok = Experiment {
            depths: 1..=6,
            ..exp
        };
        let recs = ok.run().unwrap();
        assert_eq!(recs.len(), 18);
        assert!(recs.iter().all(|r| r.master_seed == Some(1)));
    }

    #[test]
    fn csv_rows() {
        let mut empty = record(1, 0, 0);
        empty.master_seed = None;
        empty.game_kind = GameKind::G;
        let csv = results_csv(&[record(2, 472, 231), empty], SignificanceMethod::Normal);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], RESULTS_CSV_HEADER);
        assert_eq!(
            lines[1],
            "P,e1,2,product,minimax,1600,472,231,48.9,6.5e-1,7"
        );
        assert_eq!(lines[2], "G,e1,1,product,minimax,1600,0,0,,,");
    }

    #[test]
    fn markdown_tables() {
        let empty = render_tables(&[], SignificanceMethod::Normal);
        assert!(
            empty.contains("Critical pairs and pairs won")
                && empty.contains("Percentage of critical pairs won")
        );
        assert!(!empty.contains("| 1 |"));

        let text = render_tables(
            &[
                record(1, 0, 0),
                record(2, 472, 231),
                record(9, 0, 0),
                record(10, 0, 0),
            ],
            SignificanceMethod::Normal,
        );
        assert!(text.contains("| 2 | 472 | 231 |"));
        assert!(text.contains("| 2 | 48.9% | 65% |"));
        assert!(text.contains("| 1 | 0 | 0 | * |"));
        assert!(text.contains("| 9 | 0 | 0 | *, ** |"));
        assert!(text.contains("| 10 | 0 | 0 | *, ** |"));
    }

    #[test]
    fn significance_percent_format() {
        assert_eq!(format_significance_pct(0.6453), "65%");
        assert_eq!(format_significance_pct(0.0029), "0.29%");
        assert_eq!(format_significance_pct(6.04e-8), "6×10^-6%");
    }
}
