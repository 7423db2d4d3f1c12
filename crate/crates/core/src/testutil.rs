//! Shared fixtures for the crate's tests: a small two-register pushdown
//! system, a canonical run of it, and a matching pop-only acceptor.

use crate::eqrel::{parse_partition, parse_reg_partition, Assignment, DataValue};
use crate::machines::{Command, Ra, Rpds, RpdsId, RpdsRule, StackCell, StateId};

pub(crate) fn asg(vals: &[u64]) -> Assignment {
    Assignment::new(vals.iter().map(|&v| DataValue(v)).collect())
}

pub(crate) fn cell(value: u64, saved: &[u64]) -> StackCell {
    StackCell { value: DataValue(value), saved: asg(saved) }
}

/// The running two-register example: p0 pushes a fresh value, p1 pushes or
/// pops fresh values, and one rule escapes to p2.
pub(crate) fn example_rpds() -> Rpds {
    let p = |s: &str| parse_partition(2, s).unwrap();
    let rules = vec![
        RpdsRule {
            from: StateId(0),
            guard: p("{x2,x2',top}"),
            to: StateId(1),
            command: Command::Push(1),
        },
        RpdsRule {
            from: StateId(1),
            guard: p("{x1,top}{x2,x2'}"),
            to: StateId(1),
            command: Command::Push(1),
        },
        RpdsRule {
            from: StateId(1),
            guard: p("{x1,top}{x2,x2'}"),
            to: StateId(1),
            command: Command::Pop,
        },
        RpdsRule {
            from: StateId(1),
            guard: p("{x2,x2'}{x1',top}"),
            to: StateId(1),
            command: Command::Pop,
        },
        RpdsRule {
            from: StateId(1),
            guard: p("{x1,x1'}{x2,top}"),
            to: StateId(2),
            command: Command::Push(2),
        },
    ];
    Rpds::new(2, vec!["p0".into(), "p1".into(), "p2".into()], rules).unwrap()
}

pub(crate) fn example_start() -> RpdsId {
    RpdsId { state: StateId(0), theta: asg(&[1, 0]), stack: vec![cell(0, &[1, 0])] }
}

/// The canonical run of [`example_rpds`] that applies rules 0,1,2,3,4 in
/// order from [`example_start`]: push twice, pop twice, escape to p2.
pub(crate) fn example_chain() -> Vec<RpdsId> {
    vec![
        RpdsId { state: StateId(0), theta: asg(&[1, 0]), stack: vec![cell(0, &[1, 0])] },
        RpdsId {
            state: StateId(1),
            theta: asg(&[2, 0]),
            stack: vec![cell(2, &[2, 0]), cell(0, &[1, 0])],
        },
        RpdsId {
            state: StateId(1),
            theta: asg(&[3, 0]),
            stack: vec![cell(3, &[3, 0]), cell(2, &[2, 0]), cell(0, &[1, 0])],
        },
        RpdsId {
            state: StateId(1),
            theta: asg(&[4, 0]),
            stack: vec![cell(2, &[2, 0]), cell(0, &[1, 0])],
        },
        RpdsId { state: StateId(1), theta: asg(&[2, 0]), stack: vec![cell(0, &[1, 0])] },
        RpdsId {
            state: StateId(2),
            theta: asg(&[2, 3]),
            stack: vec![cell(3, &[2, 3]), cell(0, &[1, 0])],
        },
    ]
}

/// The pop-only acceptor of the running example: from p1 it pops while the
/// top equals register 1, then pops arbitrary cells, then pops a cell
/// matching register 2 and accepts with distinct registers.
pub(crate) fn example_ra() -> Ra {
    let p = |s: &str| parse_partition(2, s).unwrap();
    let rules = vec![
        RpdsRule {
            from: StateId(0),
            guard: p("{x1,top}{x2,x2'}"),
            to: StateId(1),
            command: Command::Pop,
        },
        RpdsRule {
            from: StateId(1),
            guard: p("{x1,x1'}{x2,x2'}"),
            to: StateId(1),
            command: Command::Pop,
        },
        RpdsRule {
            from: StateId(1),
            guard: p("{x1,x1'}{x2,top}"),
            to: StateId(2),
            command: Command::Pop,
        },
    ];
    let base = Rpds::new(2, vec!["p1".into(), "q1".into(), "q2".into()], rules).unwrap();
    Ra::new(
        base,
        [StateId(0)].into(),
        vec![(StateId(2), parse_reg_partition(2, "{x1}{x2}").unwrap())],
    )
    .unwrap()
}
