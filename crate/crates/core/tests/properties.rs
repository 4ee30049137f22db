//! Cross-module properties on random boards and random play prefixes.

use proptest::prelude::*;

use proplab::game::{generate_n_board, generate_p_board, initial_position, solve_exact};
use proplab::search::{child_values, choose_move, search_value};
use proplab::{
    BackupRule, Board, Evaluator, EvaluatorKind, GameKind, PlayerConfig, Position, Side,
};

const MOVES: u32 = 6;
const EPS: f64 = 1e-12;

fn board_strategy() -> impl Strategy<Value = Board> {
    prop_oneof![
        (any::<u64>(), 0.1f64..0.9).prop_map(|(s, q)| generate_p_board(MOVES, q, s).unwrap()),
        any::<u64>().prop_map(|s| generate_n_board(MOVES, s).unwrap()),
        prop::collection::vec(0u8..=1, MOVES as usize + 1).prop_map(|sq| Board::parse(
            GameKind::G,
            &sq.iter().map(u8::to_string).collect::<String>()
        )
        .unwrap()),
    ]
}

/// Plays up to `plies` moves chosen by `picks`, stopping short of the end.
fn advance<'a>(board: &'a Board, first: Side, picks: &[bool], plies: usize) -> Position<'a> {
    let mut p = initial_position(board, first);
    for &right in picks.iter().take(plies) {
        if p.moves_remaining() <= 1 {
            break;
        }
        let moves = p.legal_moves();
        p = p.apply(moves[usize::from(right)]);
    }
    p
}

fn evaluators_for(kind: GameKind) -> Vec<Evaluator> {
    let table_kind = if kind.is_split() {
        EvaluatorKind::E2
    } else {
        EvaluatorKind::E3
    };
    vec![
        Evaluator::E1,
        Evaluator::for_game(table_kind, kind, MOVES).unwrap(),
        Evaluator::Exact,
    ]
}

fn side(max: bool) -> Side {
    if max {
        Side::Max
    } else {
        Side::Min
    }
}

proptest! {
    #[test]
    fn evaluators_complement_under_mover_swap(
        board in board_strategy(),
        first in any::<bool>(),
        picks in prop::collection::vec(any::<bool>(), MOVES as usize),
        plies in 0usize..MOVES as usize,
    ) {
        let p = advance(&board, side(first), &picks, plies);
        let q = p.with_mover(p.mover().opponent());
        for e in evaluators_for(board.kind()) {
            let v = e.evaluate(&p).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!((v + e.evaluate(&q).unwrap() - 1.0).abs() < EPS, "{:?}", e.kind());
        }
    }

    #[test]
    fn search_complements_under_mover_swap(
        board in board_strategy(),
        picks in prop::collection::vec(any::<bool>(), MOVES as usize),
        plies in 0usize..MOVES as usize,
        depth in 1u32..=MOVES,
    ) {
        let p = advance(&board, Side::Max, &picks, plies);
        let q = p.with_mover(p.mover().opponent());
        for rule in BackupRule::ALL {
            for e in evaluators_for(board.kind()) {
                let cfg = PlayerConfig::new(rule, e, depth).unwrap();
                let a = search_value(&p, &cfg).unwrap();
                let b = search_value(&q, &cfg).unwrap();
                prop_assert!((a + b - 1.0).abs() < 1e-9, "{rule} {a} {b}");
            }
        }
        prop_assert_eq!(solve_exact(&p) + solve_exact(&q), 1);
    }

    #[test]
    fn applying_a_move_shrinks_the_segment(
        board in board_strategy(),
        picks in prop::collection::vec(any::<bool>(), MOVES as usize),
    ) {
        let mut p = initial_position(&board, Side::Max);
        prop_assert_eq!(p.moves_remaining(), MOVES);
        for &right in &picks {
            let m = p.legal_moves()[usize::from(right)];
            let c = p.apply(m);
            let expected_len = if board.kind().is_split() { p.len() / 2 } else { p.len() - 1 };
            prop_assert_eq!(c.len(), expected_len);
            prop_assert_eq!(c.moves_remaining(), p.moves_remaining() - 1);
            prop_assert_eq!(c.mover(), p.mover().opponent());
            let (lo, hi) = c.segment();
            let (plo, phi) = p.segment();
            prop_assert!(plo <= lo && hi <= phi);
            let ones = board.squares()[lo..hi].iter().filter(|&&s| s == 1).count();
            prop_assert_eq!(c.ones() as usize, ones);
            p = c;
        }
        prop_assert!(p.is_terminal());
        prop_assert_eq!(p.len(), 1);
    }

    #[test]
    fn chosen_move_is_the_first_best_child(
        board in board_strategy(),
        first in any::<bool>(),
        picks in prop::collection::vec(any::<bool>(), MOVES as usize),
        plies in 0usize..MOVES as usize,
        depth in 1u32..=MOVES,
        rule in prop::sample::select(BackupRule::ALL.to_vec()),
    ) {
        let p = advance(&board, side(first), &picks, plies);
        let cfg = PlayerConfig::new(rule, Evaluator::E1, depth).unwrap();
        let scored = child_values(&p, &cfg).unwrap();
        let best = match p.mover() {
            Side::Max => scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
            Side::Min => scored.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        };
        let expected = scored.iter().find(|s| s.1 == best).unwrap().0;
        let chosen = choose_move(&p, &cfg).unwrap();
        prop_assert_eq!(chosen, expected);
        prop_assert_eq!(choose_move(&p, &cfg).unwrap(), chosen);
    }
}
