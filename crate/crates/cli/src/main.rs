//! `proplab`: run backup-rule contests on board-splitting games, dump
//! evaluator tables, solve boards and test significance.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use proplab::eval::{build_e2_table, build_e3_table, format_sig};
use proplab::game::{initial_position, optimal_move, solve_exact};
use proplab::stats::{exact_binomial_p, format_win_pct, normal_approx_p};
use proplab::tournament::{render_tables, results_csv, BoardSpec, Experiment};
use proplab::{
    BackupRule, Board, EvaluatorKind, GameKind, Matchup, Side, SignificanceMethod,
    BALANCED_ONES_PROB,
};

#[derive(Parser, Debug)]
#[command(
    name = "proplab",
    version,
    about = "Minimax, product and average propagation on model games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GameArg {
    P,
    N,
    G,
}

impl From<GameArg> for GameKind {
    fn from(g: GameArg) -> Self {
        match g {
            GameArg::P => GameKind::P,
            GameArg::N => GameKind::N,
            GameArg::G => GameKind::G,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvalArg {
    E1,
    E2,
    E3,
    Exact,
}

impl From<EvalArg> for EvaluatorKind {
    fn from(e: EvalArg) -> Self {
        match e {
            EvalArg::E1 => EvaluatorKind::E1,
            EvalArg::E2 => EvaluatorKind::E2,
            EvalArg::E3 => EvaluatorKind::E3,
            EvalArg::Exact => EvaluatorKind::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Minimax,
    Product,
    Average,
}

impl From<RuleArg> for BackupRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Minimax => BackupRule::Minimax,
            RuleArg::Product => BackupRule::Product,
            RuleArg::Average => BackupRule::Average,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Normal,
    Exact,
}

impl From<MethodArg> for SignificanceMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Normal => SignificanceMethod::Normal,
            MethodArg::Exact => SignificanceMethod::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Max,
    Min,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Max => Side::Max,
            SideArg::Min => Side::Min,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run paired-game contests over a depth range and write the results CSV.
    Tournament(TournamentArgs),
    /// Dump the e2 (P-game) feature win-probability table as CSV.
    #[command(name = "e2-table")]
    E2Table {
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the e3 (G-game) feature win-probability table as CSV.
    #[command(name = "e3-table")]
    E3Table {
        #[arg(long, default_value_t = 11)]
        max_len: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Win percentage and two-sided p-values for K wins out of N critical pairs.
    Significance { n: u64, k: u64 },
    /// Exact game value for MAX and one optimal move.
    Solve {
        /// Board as a string of 0/1 squares, leftmost first.
        board: String,
        #[arg(long, value_enum, default_value_t = GameArg::G)]
        game: GameArg,
        #[arg(long, value_enum, default_value_t = SideArg::Max)]
        first: SideArg,
    },
}

#[derive(clap::Args, Debug)]
struct TournamentArgs {
    #[arg(long, value_enum, default_value_t = GameArg::P)]
    game: GameArg,
    #[arg(long = "eval", value_enum, default_value_t = EvalArg::E1)]
    evaluator: EvalArg,
    /// Run a single matchup instead of the three standard ones (needs --rule-b).
    #[arg(long, value_enum, requires = "rule_b")]
    rule_a: Option<RuleArg>,
    #[arg(long, value_enum, requires = "rule_a")]
    rule_b: Option<RuleArg>,
    /// Inclusive depth range `A..B`, or a single depth.
    #[arg(long, default_value = "1..10", value_parser = parse_depths)]
    depths: RangeInclusive<u32>,
    /// Moves in a full game (split boards hold 2^moves squares, G rows moves+1).
    #[arg(long, default_value_t = 10)]
    moves: u32,
    /// Sampled boards per contest (ignored for G-games, which are enumerated).
    #[arg(long, default_value_t = 1600)]
    boards: u64,
    /// Probability that a P-board square is 1 (default (3-√5)/2).
    #[arg(long, default_value_t = BALANCED_ONES_PROB)]
    ones_prob: f64,
    /// Master seed; a fresh one is drawn and echoed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Results CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `markdown` also renders the count and significance tables.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, value_enum, default_value_t = MethodArg::Normal)]
    p_method: MethodArg,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_depths(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|e| format!("bad depth {t:?}: {e}"))
    };
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok(parse(a)?..=parse(b)?)
        }
        None => {
            let d = parse(s)?;
            Ok(d..=d)
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn fresh_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn cmd_tournament(args: TournamentArgs) -> Result<()> {
    let game = GameKind::from(args.game);
    let matchups = match (args.rule_a, args.rule_b) {
        (Some(a), Some(b)) => vec![Matchup::new(a.into(), b.into())],
        _ => Matchup::STANDARD.to_vec(),
    };
    let master_seed = args.seed.unwrap_or_else(fresh_seed);
    let exp = Experiment {
        boards: BoardSpec {
            game,
            n_moves: args.moves,
            count: args.boards,
            ones_prob: args.ones_prob,
            master_seed,
        },
        evaluator: args.evaluator.into(),
        depths: args.depths,
        matchups,
    };
    exp.validate()?;
    if game.is_split() {
        eprintln!("master seed: {master_seed}");
    } else {
        eprintln!(
            "G-games: all {} boards enumerated, no seed",
            1u64 << (args.moves + 1)
        );
    }

    let records = match args.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| exp.run())?,
        None => exp.run()?,
    };

    let method = SignificanceMethod::from(args.p_method);
    write_output(args.out.as_deref(), &results_csv(&records, method))?;
    if args.format == Format::Markdown {
        let tables = render_tables(&records, method);
        match &args.out {
            Some(path) => {
                let md = path.with_extension("md");
                write_output(Some(&md), &tables)?;
                eprintln!("tables written to {}", md.display());
            }
            None => write_output(None, &format!("\n{tables}"))?,
        }
    }
    Ok(())
}

fn cmd_significance(n: u64, k: u64) -> Result<()> {
    if k > n {
        bail!("wins k = {k} exceed critical pairs n = {n}");
    }
    if n == 0 {
        println!("no critical pairs: significance undefined");
        return Ok(());
    }
    let pct = format_win_pct(n, k).unwrap_or_default();
    let exact = exact_binomial_p(n, k).unwrap_or(f64::NAN);
    let normal = normal_approx_p(n, k).unwrap_or(f64::NAN);
    println!("wins: {k}/{n} = {pct}%");
    println!(
        "p (normal approximation): {normal:.3e} ({}%)",
        format_sig(100.0 * normal, 3)
    );
    println!(
        "p (exact binomial):       {exact:.3e} ({}%)",
        format_sig(100.0 * exact, 3)
    );
    Ok(())
}

fn cmd_solve(board: &str, game: GameKind, first: Side) -> Result<()> {
    let board = Board::parse(game, board)?;
    let pos = initial_position(&board, first);
    let value = solve_exact(&pos);
    println!("value for MAX: {value}");
    match optimal_move(&pos) {
        Some(m) => println!("optimal move for {first}: {m}"),
        None => println!("terminal position: no move"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Tournament(args) => cmd_tournament(args),
        Command::E2Table { depth, out } => {
            write_output(out.as_deref(), &build_e2_table(depth)?.to_csv())
        }
        Command::E3Table { max_len, out } => {
            write_output(out.as_deref(), &build_e3_table(max_len)?.to_csv())
        }
        Command::Significance { n, k } => cmd_significance(n, k),
        Command::Solve { board, game, first } => cmd_solve(&board, game.into(), first.into()),
    }
}
