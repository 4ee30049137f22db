//! Depth-limited game-tree search with interchangeable backup rules.
//!
//! Trees are expanded in full (no pruning) so that every rule sees exactly
//! the same frontier. Terminal positions inside the horizon are always
//! scored exactly rather than by the evaluator.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::Evaluator;
use crate::game::{terminal_value_for_max, Move, Position, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BackupRule {
    Minimax,
    Product,
    Average,
}

impl BackupRule {
    pub const ALL: [BackupRule; 3] = [
        BackupRule::Minimax,
        BackupRule::Product,
        BackupRule::Average,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BackupRule::Minimax => "minimax",
            BackupRule::Product => "product",
            BackupRule::Average => "average",
        }
    }
}

impl fmt::Display for BackupRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackupRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minimax" => Ok(BackupRule::Minimax),
            "product" => Ok(BackupRule::Product),
            "average" => Ok(BackupRule::Average),
            _ => Err(Error::InvalidArgument(format!("unknown backup rule {s:?}"))),
        }
    }
}

fn minimax_backup(mover: Side, values: &[f64]) -> f64 {
    let it = values.iter().copied();
    match mover {
        Side::Max => it.fold(f64::NEG_INFINITY, f64::max),
        Side::Min => it.fold(f64::INFINITY, f64::min),
    }
}

fn product_backup(mover: Side, values: &[f64]) -> f64 {
    match mover {
        // MAX wins unless every child is a loss for MAX
        Side::Max => 1.0 - values.iter().map(|v| 1.0 - v).product::<f64>(),
        Side::Min => values.iter().product(),
    }
}

/// Combines the MAX-win values of a node's children into the node's value.
///
/// Panics if `child_values` is empty or holds a value outside `[0, 1]`.
pub fn backup(rule: BackupRule, node_mover: Side, child_values: &[f64]) -> f64 {
    assert!(!child_values.is_empty(), "backup over no children");
    assert!(
        child_values.iter().all(|v| (0.0..=1.0).contains(v)),
        "child value outside [0, 1]: {child_values:?}"
    );
    match rule {
        BackupRule::Minimax => minimax_backup(node_mover, child_values),
        BackupRule::Product => product_backup(node_mover, child_values),
        BackupRule::Average => {
            0.5 * (minimax_backup(node_mover, child_values)
                + product_backup(node_mover, child_values))
        }
    }
}

/// How one player searches: backup rule, frontier evaluator and depth.
#[derive(Clone, Debug)]
pub struct PlayerConfig {
    pub rule: BackupRule,
    pub evaluator: Evaluator,
    pub depth: u32,
}

impl PlayerConfig {
    pub fn new(rule: BackupRule, evaluator: Evaluator, depth: u32) -> Result<Self> {
        if depth < 1 {
            return Err(Error::InvalidArgument("search depth must be >= 1".into()));
        }
        Ok(PlayerConfig {
            rule,
            evaluator,
            depth,
        })
    }
}

fn value_at(p: &Position<'_>, lookahead: u32, cfg: &PlayerConfig) -> Result<f64> {
    if p.is_terminal() {
        return Ok(f64::from(terminal_value_for_max(p)));
    }
    if lookahead == 0 {
        return cfg.evaluator.evaluate(p);
    }
    let [left, right] = p.children();
    let values = [
        value_at(&left, lookahead - 1, cfg)?,
        value_at(&right, lookahead - 1, cfg)?,
    ];
    Ok(backup(cfg.rule, p.mover(), &values))
}

/// Backed-up MAX-win value of `p` searched `cfg.depth` plies deep.
pub fn search_value(p: &Position<'_>, cfg: &PlayerConfig) -> Result<f64> {
    value_at(p, cfg.depth, cfg)
}

/// Each legal move with the value of the position it leads to, searched
/// `cfg.depth - 1` plies below the child.
pub fn child_values(p: &Position<'_>, cfg: &PlayerConfig) -> Result<Vec<(Move, f64)>> {
    p.legal_moves()
        .iter()
        .map(|&m| Ok((m, value_at(&p.apply(m), cfg.depth - 1, cfg)?)))
        .collect()
}

/// The move whose child looks best for the side to move. Ties go to the
/// earlier move in canonical order.
///
/// Panics at a terminal position.
pub fn choose_move(p: &Position<'_>, cfg: &PlayerConfig) -> Result<Move> {
    assert!(!p.is_terminal(), "choose_move at a terminal position");
    let scored = child_values(p, cfg)?;
    let better = |candidate: f64, best: f64| match p.mover() {
        Side::Max => candidate > best,
        Side::Min => candidate < best,
    };
    let mut best = scored[0];
    for &(m, v) in &scored[1..] {
        if better(v, best.1) {
            best = (m, v);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{generate_p_board, initial_position, solve_exact, Board, GameKind};
    use proptest::prelude::*;

    const EPS: f64 = 1e-12;

    fn cfg(rule: BackupRule, evaluator: Evaluator, depth: u32) -> PlayerConfig {
        PlayerConfig::new(rule, evaluator, depth).unwrap()
    }

    #[test]
    fn backup_examples() {
        let v = [0.3, 0.5];
        assert!((backup(BackupRule::Minimax, Side::Max, &v) - 0.5).abs() < EPS);
        assert!((backup(BackupRule::Product, Side::Max, &v) - 0.65).abs() < EPS);
        assert!((backup(BackupRule::Average, Side::Max, &v) - 0.575).abs() < EPS);
        assert!((backup(BackupRule::Product, Side::Min, &v) - 0.15).abs() < EPS);
        assert!((backup(BackupRule::Average, Side::Min, &v) - 0.225).abs() < EPS);
        assert!((backup(BackupRule::Minimax, Side::Min, &v) - 0.3).abs() < EPS);
    }

    #[test]
    #[should_panic(expected = "no children")]
    fn backup_rejects_empty() {
        backup(BackupRule::Product, Side::Max, &[]);
    }

    #[test]
    #[should_panic(expected = "outside")]
    fn backup_rejects_out_of_range() {
        backup(BackupRule::Minimax, Side::Max, &[0.2, 1.2]);
    }

    #[test]
    fn config_rejects_zero_depth() {
        assert!(PlayerConfig::new(BackupRule::Minimax, Evaluator::E1, 0).is_err());
    }

    #[test]
    fn depth_one_is_backup_of_raw_evaluations() {
        let b = generate_p_board(6, 0.5, 3).unwrap();
        let p = initial_position(&b, Side::Max);
        for rule in BackupRule::ALL {
            let c = cfg(rule, Evaluator::E1, 1);
            let raw: Vec<f64> = p
                .children()
                .iter()
                .map(|c| Evaluator::E1.evaluate(c).unwrap())
                .collect();
            assert_eq!(search_value(&p, &c).unwrap(), backup(rule, Side::Max, &raw));
        }
    }

    #[test]
    fn four_square_board_searched_to_the_end() {
        let b = Board::parse(GameKind::P, "1100").unwrap();
        let p = initial_position(&b, Side::Max);
        // MAX keeps either half, MIN then keeps a square and moves last:
        // from "11" MIN wins, from "00" MIN loses, so MAX takes "00".
        assert_eq!(solve_exact(&p), 1);
        for rule in BackupRule::ALL {
            assert_eq!(search_value(&p, &cfg(rule, Evaluator::E1, 2)).unwrap(), 1.0);
            assert_eq!(
                choose_move(&p, &cfg(rule, Evaluator::E1, 2)).unwrap(),
                Move::KeepRight
            );
        }
    }

    #[test]
    fn full_depth_search_is_exact() {
        for seed in 0..30 {
            let b = generate_p_board(8, 0.4, seed).unwrap();
            let p = initial_position(&b, Side::Min);
            for rule in BackupRule::ALL {
                let v = search_value(&p, &cfg(rule, Evaluator::E1, 8)).unwrap();
                assert_eq!(v, f64::from(solve_exact(&p)));
            }
        }
    }

    #[test]
    fn ties_go_left() {
        let b = Board::parse(GameKind::P, "1010").unwrap();
        let p = initial_position(&b, Side::Max);
        for rule in BackupRule::ALL {
            assert_eq!(
                choose_move(&p, &cfg(rule, Evaluator::E1, 1)).unwrap(),
                Move::KeepLeft
            );
        }
        let g = Board::parse(GameKind::G, "000").unwrap();
        let p = initial_position(&g, Side::Min);
        assert_eq!(
            choose_move(&p, &cfg(BackupRule::Product, Evaluator::E1, 1)).unwrap(),
            Move::RemoveLeft
        );
    }

    #[test]
    fn depth_one_choice_ignores_rule() {
        for seed in 0..50 {
            let b = generate_p_board(10, 0.5, seed).unwrap();
            let mut p = initial_position(&b, Side::Max);
            while !p.is_terminal() {
                let moves: Vec<Move> = BackupRule::ALL
                    .iter()
                    .map(|&r| choose_move(&p, &cfg(r, Evaluator::E1, 1)).unwrap())
                    .collect();
                assert!(moves.iter().all(|&m| m == moves[0]));
                p = p.apply(moves[0]);
            }
        }
    }

    fn unit() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0f64]
    }

    fn side() -> impl Strategy<Value = Side> {
        prop_oneof![Just(Side::Max), Just(Side::Min)]
    }

    proptest! {
        #[test]
        fn average_lies_between(mover in side(), vals in prop::collection::vec(unit(), 1..6)) {
            let mm = backup(BackupRule::Minimax, mover, &vals);
            let pr = backup(BackupRule::Product, mover, &vals);
            let av = backup(BackupRule::Average, mover, &vals);
            prop_assert!(av >= mm.min(pr) - EPS && av <= mm.max(pr) + EPS);
            match mover {
                Side::Max => prop_assert!(pr >= mm - EPS),
                Side::Min => prop_assert!(pr <= mm + EPS),
            }
        }

        #[test]
        fn boolean_children_collapse(mover in side(), bits in prop::collection::vec(any::<bool>(), 1..6)) {
            let vals: Vec<f64> = bits.iter().map(|&b| f64::from(u8::from(b))).collect();
            let mm = backup(BackupRule::Minimax, mover, &vals);
            prop_assert_eq!(backup(BackupRule::Product, mover, &vals), mm);
            prop_assert_eq!(backup(BackupRule::Average, mover, &vals), mm);
        }
    }
}
