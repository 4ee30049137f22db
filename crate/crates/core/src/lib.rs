//! A laboratory for comparing ways of backing up evaluation-function
//! estimates in game-tree search.
//!
//! Three backup rules are provided: classic minimax, product propagation
//! (estimates treated as independent win probabilities) and average
//! propagation (the node-wise mean of the two). They are compared on three
//! families of two-player board-splitting games:
//!
//! * **P-games**: `2^depth` independently random squares, each move keeps
//!   one half of the remaining segment.
//! * **N-games**: same moves, but square values come from random `±1` arc
//!   labels summed along root-to-leaf paths, so neighbouring squares are
//!   correlated.
//! * **G-games**: a row of `n + 1` squares, each move removes an end
//!   square. Positions are intervals and form a DAG.
//!
//! In every family the game ends when one square remains, and the player
//! who made the last move wins iff that square is `1`.
//!
//! ```
//! use proplab::{BackupRule, Evaluator, PlayerConfig, Side, generate_p_board, initial_position};
//! use proplab::search::choose_move;
//!
//! let board = generate_p_board(10, 0.5, 7).unwrap();
//! let pos = initial_position(&board, Side::Max);
//! let cfg = PlayerConfig::new(BackupRule::Product, Evaluator::E1, 3).unwrap();
//! let mv = choose_move(&pos, &cfg).unwrap();
//! println!("{mv:?}");
//! ```

pub mod error;
pub mod eval;
pub mod game;
pub mod search;
pub mod stats;
pub mod tournament;

pub use error::{Error, Result};
pub use eval::{build_e2_table, build_e3_table, Evaluator, EvaluatorKind, FeatureWinTable};
pub use game::{
    enumerate_g_boards, generate_n_board, generate_p_board, initial_position, Board, GBoard,
    GameKind, Move, Position, Side, SplitBoard, BALANCED_ONES_PROB,
};
pub use search::{backup, BackupRule, PlayerConfig};
pub use stats::{exact_binomial_p, normal_approx_p, significance, SignificanceMethod};
pub use tournament::{ContestRecord, Matchup, PairOutcome, Seat};
