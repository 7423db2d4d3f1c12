//! Seeded random generators for property tests and cross-validation
//! suites: proper configurations, register pushdown systems, and register
//! acceptors. Everything is driven by a caller-supplied RNG so suites are
//! reproducible from a seed.

use rand::Rng;

use crate::eqrel::{enumerate_phi, enumerate_reg, Assignment, DataValue};
use crate::machines::{is_proper, Command, Ra, Rpds, RpdsId, RpdsRule, StackCell, StateId};

/// A random assignment drawn from a small pool (collisions intended).
pub fn random_assignment<R: Rng>(rng: &mut R, k: u32, pool: &[u64]) -> Assignment {
    Assignment::new((0..k).map(|_| DataValue(pool[rng.gen_range(0..pool.len())])).collect())
}

/// A random proper configuration of depth `1..=max_depth`. The stack is
/// grown chronologically: each cell stores the assignment current at its
/// push and a value from it, and every register update either copies a
/// currently visible value or takes a globally fresh one — exactly the
/// discipline that [`is_proper`] checks.
pub fn random_proper_id<R: Rng>(
    rng: &mut R,
    k: u32,
    state_count: usize,
    max_depth: usize,
) -> RpdsId {
    let depth = rng.gen_range(1..=max_depth);
    let mut theta: Vec<u64> = (0..k).map(|_| rng.gen_range(0..2 * k as u64 + 1)).collect();
    let mut fresh = theta.iter().max().copied().unwrap_or(0) + 1;
    let mut bottom_first: Vec<StackCell> = Vec::with_capacity(depth);
    for _ in 0..depth {
        let value = theta[rng.gen_range(0..k as usize)];
        bottom_first.push(StackCell {
            value: DataValue(value),
            saved: Assignment::new(theta.iter().map(|&v| DataValue(v)).collect()),
        });
        let visible = theta.clone();
        for slot in theta.iter_mut() {
            if rng.gen_bool(0.3) {
                *slot = fresh;
                fresh += 1;
            } else {
                *slot = visible[rng.gen_range(0..k as usize)];
            }
        }
    }
    bottom_first.reverse();
    let id = RpdsId {
        state: StateId(rng.gen_range(0..state_count)),
        theta: Assignment::new(theta.into_iter().map(DataValue).collect()),
        stack: bottom_first,
    };
    debug_assert!(is_proper(&id));
    id
}

/// A random system with `state_count` states and `rule_count` rules whose
/// guards are drawn uniformly from the full guard set.
pub fn random_rpds<R: Rng>(rng: &mut R, k: u32, state_count: usize, rule_count: usize) -> Rpds {
    let guards = enumerate_phi(k).expect("guard enumeration within the arity bound");
    let names = (0..state_count).map(|i| format!("q{i}")).collect();
    let rules = (0..rule_count)
        .map(|_| RpdsRule {
            from: StateId(rng.gen_range(0..state_count)),
            guard: guards[rng.gen_range(0..guards.len())].clone(),
            to: StateId(rng.gen_range(0..state_count)),
            command: match rng.gen_range(0..3) {
                0 => Command::Pop,
                1 => Command::Skip,
                _ => Command::Push(rng.gen_range(1..=k)),
            },
        })
        .collect();
    Rpds::new(k, names, rules).expect("generated system is structurally valid")
}

/// A random acceptor compatible with a system of `system_states` states:
/// its first `system_states` states are the initial ones, followed by
/// `extra_states` private states; rules are pop-only.
pub fn random_ra<R: Rng>(
    rng: &mut R,
    k: u32,
    system_states: usize,
    extra_states: usize,
    rule_count: usize,
    accept_count: usize,
) -> Ra {
    let guards = enumerate_phi(k).expect("guard enumeration within the arity bound");
    let reg = enumerate_reg(k).expect("register partition enumeration");
    let total = system_states + extra_states;
    let names = (0..total).map(|i| format!("a{i}")).collect();
    let rules = (0..rule_count)
        .map(|_| RpdsRule {
            from: StateId(rng.gen_range(0..total)),
            guard: guards[rng.gen_range(0..guards.len())].clone(),
            to: StateId(rng.gen_range(0..total)),
            command: Command::Pop,
        })
        .collect();
    let base = Rpds::new(k, names, rules).expect("generated acceptor base is valid");
    let initial = (0..system_states).map(StateId).collect();
    let accept = (0..accept_count)
        .map(|_| (StateId(rng.gen_range(0..total)), reg[rng.gen_range(0..reg.len())].clone()))
        .collect();
    Ra::new(base, initial, accept).expect("generated acceptor is valid")
}
