//! Machine types and their operational semantics.
//!
//! Three machine families live here: register pushdown systems ([`Rpds`]),
//! whose configurations carry a register assignment and a stack of data
//! values, each cell remembering the assignment saved when it was pushed;
//! register automata ([`Ra`]), the pop-only variant used as acceptors; and
//! ordinary pushdown systems ([`Pds`]) and finite automata ([`Nfa`]) over an
//! arbitrary finite alphabet, the targets of the reduction.
//!
//! Register steps follow a freshness discipline: a successor register value
//! is either currently visible (a register or the top-of-stack value) or
//! fresh with respect to every assignment saved on the stack. Successor
//! enumeration is canonical: fresh classes receive the smallest naturals not
//! occurring anywhere in the configuration, in order of their least primed
//! register, which makes the successor set finite and deterministic.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::eqrel::{
    models_reg, models_triple, Assignment, DataValue, Partition, RegPartition, Symbol,
};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum MachineError {
    #[error("machine needs at least one state")]
    NoStates,
    #[error("machine needs at least one register")]
    ZeroK,
    #[error("duplicate state name '{0}'")]
    DuplicateStateName(String),
    #[error("state index {index} out of range (machine has {count} states)")]
    InvalidState { index: usize, count: usize },
    #[error("guard arity {got} does not match machine arity {expected}")]
    GuardArity { expected: u32, got: u32 },
    #[error("push register {index} out of range 1..={k}")]
    PushIndexOutOfRange { index: u32, k: u32 },
    #[error("assignment arity {got} does not match machine arity {expected}")]
    IdArity { expected: u32, got: u32 },
    #[error("configuration violates the properness invariant")]
    ImproperId,
    #[error("register automata may only pop")]
    NotPopOnly,
    #[error("acceptance pattern arity {got} does not match machine arity {expected}")]
    AcceptArity { expected: u32, got: u32 },
}

/// Index into a machine's state table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Stack effect of a rule. `A` is a register index (1-based) for register
/// machines and a stack symbol for pushdown systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command<A> {
    Pop,
    Skip,
    Push(A),
}

impl<A> Command<A> {
    pub fn map<B>(&self, f: impl FnOnce(&A) -> B) -> Command<B> {
        match self {
            Command::Pop => Command::Pop,
            Command::Skip => Command::Skip,
            Command::Push(a) => Command::Push(f(a)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RpdsRule {
    pub from: StateId,
    pub guard: Partition,
    pub to: StateId,
    pub command: Command<u32>,
}

/// A register pushdown system: `k` registers, named states, guarded rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rpds {
    k: u32,
    states: Vec<String>,
    rules: Vec<RpdsRule>,
}

impl Rpds {
    pub fn new(k: u32, states: Vec<String>, rules: Vec<RpdsRule>) -> Result<Rpds, MachineError> {
        if k == 0 {
            return Err(MachineError::ZeroK);
        }
        if states.is_empty() {
            return Err(MachineError::NoStates);
        }
        for (i, name) in states.iter().enumerate() {
            if states[..i].contains(name) {
                return Err(MachineError::DuplicateStateName(name.clone()));
            }
        }
        for rule in &rules {
            for s in [rule.from, rule.to] {
                if s.0 >= states.len() {
                    return Err(MachineError::InvalidState { index: s.0, count: states.len() });
                }
            }
            if rule.guard.k() != k {
                return Err(MachineError::GuardArity { expected: k, got: rule.guard.k() });
            }
            if let Command::Push(j) = rule.command {
                if j < 1 || j > k {
                    return Err(MachineError::PushIndexOutOfRange { index: j, k });
                }
            }
        }
        Ok(Rpds { k, states, rules })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn rules(&self) -> &[RpdsRule] {
        &self.rules
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }
}

/// One stack cell of a register pushdown configuration: the pushed data
/// value together with the register assignment saved at push time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StackCell {
    pub value: DataValue,
    pub saved: Assignment,
}

/// A configuration of a register machine. `stack[0]` is the top cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RpdsId {
    pub state: StateId,
    pub theta: Assignment,
    pub stack: Vec<StackCell>,
}

impl RpdsId {
    /// All data values occurring in the configuration.
    pub fn values(&self) -> BTreeSet<DataValue> {
        let mut out: BTreeSet<DataValue> = self.theta.values().iter().copied().collect();
        for cell in &self.stack {
            out.insert(cell.value);
            out.extend(cell.saved.values().iter().copied());
        }
        out
    }

    /// Rename data values by first occurrence (registers first, then cells
    /// top-down) to 0,1,2,... Two configurations are equal up to an
    /// injective renaming iff their canonical forms are equal.
    pub fn canonical_form(&self) -> RpdsId {
        let mut order: Vec<DataValue> = Vec::new();
        let touch = |v: DataValue, order: &mut Vec<DataValue>| {
            if !order.contains(&v) {
                order.push(v);
            }
        };
        for &v in self.theta.values() {
            touch(v, &mut order);
        }
        for cell in &self.stack {
            touch(cell.value, &mut order);
            for &v in cell.saved.values() {
                touch(v, &mut order);
            }
        }
        let rename = |v: DataValue| DataValue(order.iter().position(|&w| w == v).unwrap() as u64);
        let ren_asg =
            |a: &Assignment| Assignment::new(a.values().iter().map(|&v| rename(v)).collect());
        RpdsId {
            state: self.state,
            theta: ren_asg(&self.theta),
            stack: self
                .stack
                .iter()
                .map(|c| StackCell { value: rename(c.value), saved: ren_asg(&c.saved) })
                .collect(),
        }
    }
}

/// A register automaton: a pop-only register pushdown system with initial
/// states and an acceptance set of (state, register pattern) pairs. It
/// accepts a configuration if some run drains the stack and ends in an
/// accepting state with registers matching the pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ra {
    base: Rpds,
    initial: BTreeSet<StateId>,
    accept: Vec<(StateId, RegPartition)>,
}

impl Ra {
    pub fn new(
        base: Rpds,
        initial: BTreeSet<StateId>,
        accept: Vec<(StateId, RegPartition)>,
    ) -> Result<Ra, MachineError> {
        if base.rules.iter().any(|r| r.command != Command::Pop) {
            return Err(MachineError::NotPopOnly);
        }
        let count = base.states.len();
        for &s in &initial {
            if s.0 >= count {
                return Err(MachineError::InvalidState { index: s.0, count });
            }
        }
        for (s, psi) in &accept {
            if s.0 >= count {
                return Err(MachineError::InvalidState { index: s.0, count });
            }
            if psi.k() != base.k {
                return Err(MachineError::AcceptArity { expected: base.k, got: psi.k() });
            }
        }
        Ok(Ra { base, initial, accept })
    }

    pub fn base(&self) -> &Rpds {
        &self.base
    }

    pub fn initial(&self) -> &BTreeSet<StateId> {
        &self.initial
    }

    pub fn accept(&self) -> &[(StateId, RegPartition)] {
        &self.accept
    }
}

/// Freshness: every successor register value is either currently visible
/// (in `theta` or equal to the exposed top value `d`) or absent from all
/// assignments saved on the stack.
pub fn frsp(theta2: &Assignment, d: DataValue, theta: &Assignment, saved: &[&Assignment]) -> bool {
    theta2.values().iter().all(|&v| {
        v == d || theta.contains(v) || saved.iter().all(|a| !a.contains(v))
    })
}

/// The invariant maintained by reachable configurations: every cell's value
/// occurs in its saved assignment, and once a value visible at some level
/// has vanished from a later assignment it never reappears further up
/// (reading the stack bottom-up and ending in the current assignment).
pub fn is_proper(id: &RpdsId) -> bool {
    let m = id.stack.len();
    // bottom-up: seq[0] = bottom cell, seq[m] = current assignment
    let mut seq: Vec<(&Assignment, Option<DataValue>)> = Vec::with_capacity(m + 1);
    for cell in id.stack.iter().rev() {
        seq.push((&cell.saved, Some(cell.value)));
    }
    seq.push((&id.theta, None));
    for (i, &(theta_i, d_i)) in seq.iter().enumerate() {
        if let Some(d) = d_i {
            if !theta_i.contains(d) {
                return false;
            }
        }
        let mut watched: Vec<DataValue> = theta_i.values().to_vec();
        if let Some(d) = d_i {
            watched.push(d);
        }
        for v in watched {
            let mut gone = false;
            for &(theta_j, _) in &seq[i + 1..] {
                if !theta_j.contains(v) {
                    gone = true;
                } else if gone {
                    return false;
                }
            }
        }
    }
    true
}

fn check_id(m: &Rpds, id: &RpdsId) -> Result<(), MachineError> {
    if id.state.0 >= m.states.len() {
        return Err(MachineError::InvalidState { index: id.state.0, count: m.states.len() });
    }
    if id.theta.k() != m.k {
        return Err(MachineError::IdArity { expected: m.k, got: id.theta.k() });
    }
    for cell in &id.stack {
        if cell.saved.k() != m.k {
            return Err(MachineError::IdArity { expected: m.k, got: cell.saved.k() });
        }
    }
    if !is_proper(id) {
        return Err(MachineError::ImproperId);
    }
    Ok(())
}

/// The canonical successor for one rule at one configuration, if the rule
/// applies. `d` is the exposed top value.
fn canonical_step(m: &Rpds, id: &RpdsId, rule: &RpdsRule, d: DataValue) -> Option<RpdsId> {
    let k = m.k;
    let theta = &id.theta;
    // The guard fixes the pattern of the current registers and top value;
    // mismatch means the rule does not apply here.
    for i in 1..=k {
        for j in i + 1..=k {
            if rule.guard.related(Symbol::Reg(i), Symbol::Reg(j)) != (theta.get(i) == theta.get(j))
            {
                return None;
            }
        }
        if rule.guard.related(Symbol::Reg(i), Symbol::Top) != (theta.get(i) == d) {
            return None;
        }
    }
    // Successor registers: copy a visible value where the guard demands it,
    // otherwise the register belongs to a fresh class.
    let mut next: Vec<Option<DataValue>> = vec![None; k as usize];
    for i in 1..=k {
        for l in 1..=k {
            if rule.guard.related(Symbol::PrimedReg(i), Symbol::Reg(l)) {
                next[(i - 1) as usize] = Some(theta.get(l));
                break;
            }
        }
        if next[(i - 1) as usize].is_none()
            && rule.guard.related(Symbol::PrimedReg(i), Symbol::Top)
        {
            next[(i - 1) as usize] = Some(d);
        }
    }
    // Fresh classes get the smallest unused naturals, ordered by their least
    // primed register.
    let used = id.values();
    let mut fresh_supply = (0..).map(DataValue).filter(|v| !used.contains(v));
    for i in 1..=k {
        if next[(i - 1) as usize].is_some() {
            continue;
        }
        let v = fresh_supply.next().unwrap();
        for j in i..=k {
            if next[(j - 1) as usize].is_none()
                && rule.guard.related(Symbol::PrimedReg(i), Symbol::PrimedReg(j))
            {
                next[(j - 1) as usize] = Some(v);
            }
        }
    }
    let theta2 = Assignment::new(next.into_iter().map(Option::unwrap).collect());
    debug_assert!(models_triple(theta, d, &theta2, &rule.guard).unwrap());
    debug_assert!({
        let saved: Vec<&Assignment> = id.stack.iter().map(|c| &c.saved).collect();
        frsp(&theta2, d, theta, &saved)
    });
    let mut stack = id.stack.clone();
    match rule.command {
        Command::Pop => {
            stack.remove(0);
        }
        Command::Skip => {}
        Command::Push(j) => {
            stack.insert(0, StackCell { value: theta2.get(j), saved: theta2.clone() });
        }
    }
    Some(RpdsId { state: rule.to, theta: theta2, stack })
}

/// All canonical successors of a proper configuration, tagged with the index
/// of the rule that produced them. A configuration with an empty stack has
/// none; an improper configuration is an error.
pub fn rpds_successors(m: &Rpds, id: &RpdsId) -> Result<Vec<(usize, RpdsId)>, MachineError> {
    check_id(m, id)?;
    let Some(top) = id.stack.first() else {
        return Ok(Vec::new());
    };
    let d = top.value;
    let mut out = Vec::new();
    for (ridx, rule) in m.rules.iter().enumerate() {
        if rule.from != id.state {
            continue;
        }
        if let Some(succ) = canonical_step(m, id, rule, d) {
            debug_assert!(is_proper(&succ));
            out.push((ridx, succ));
        }
    }
    Ok(out)
}

/// Does the register automaton accept the configuration? The start state
/// must be initial; acceptance requires draining the stack to empty and
/// matching an acceptance pattern.
pub fn ra_accepts(a: &Ra, id: &RpdsId) -> Result<bool, MachineError> {
    check_id(&a.base, id)?;
    if !a.initial.contains(&id.state) {
        return Ok(false);
    }
    let mut work = vec![id.clone()];
    while let Some(cur) = work.pop() {
        if cur.stack.is_empty() {
            for (s, psi) in &a.accept {
                if *s == cur.state && models_reg(&cur.theta, psi).unwrap() {
                    return Ok(true);
                }
            }
            continue;
        }
        for (_, succ) in rpds_successors(&a.base, &cur)? {
            work.push(succ);
        }
    }
    Ok(false)
}

/// A pushdown rule over states `Q` and stack symbols `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PdsRule<Q, S> {
    pub from: Q,
    pub symbol: S,
    pub to: Q,
    pub command: Command<S>,
}

/// An ordinary pushdown system: just its rules; states and alphabet are the
/// symbols the rules mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pds<Q, S> {
    pub rules: Vec<PdsRule<Q, S>>,
}

impl<Q: Ord, S: Ord> Pds<Q, S> {
    pub fn states(&self) -> BTreeSet<&Q> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.insert(&r.from);
            out.insert(&r.to);
        }
        out
    }

    pub fn alphabet(&self) -> BTreeSet<&S> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.insert(&r.symbol);
            if let Command::Push(s) = &r.command {
                out.insert(s);
            }
        }
        out
    }
}

/// A pushdown configuration. `stack[0]` is the top symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PdsId<Q, S> {
    pub state: Q,
    pub stack: Vec<S>,
}

/// Successors of a pushdown configuration, tagged with rule indices.
pub fn pds_successors<Q: Clone + Eq, S: Clone + Eq>(
    m: &Pds<Q, S>,
    id: &PdsId<Q, S>,
) -> Vec<(usize, PdsId<Q, S>)> {
    let Some(top) = id.stack.first() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (ridx, rule) in m.rules.iter().enumerate() {
        if rule.from != id.state || rule.symbol != *top {
            continue;
        }
        let mut stack = id.stack.clone();
        match &rule.command {
            Command::Pop => {
                stack.remove(0);
            }
            Command::Skip => {}
            Command::Push(s) => stack.insert(0, s.clone()),
        }
        out.push((ridx, PdsId { state: rule.to.clone(), stack }));
    }
    out
}

/// A nondeterministic finite automaton over stack words, presented as a
/// pop-only pushdown system with initial and final states: it accepts
/// `(q, w)` if from `q` it can pop all of `w` and end in a final state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa<Q, S> {
    base: Pds<Q, S>,
    pub initial: BTreeSet<Q>,
    pub finals: BTreeSet<Q>,
}

impl<Q: Clone + Eq + Ord, S: Clone + Eq> Nfa<Q, S> {
    pub fn new(
        base: Pds<Q, S>,
        initial: BTreeSet<Q>,
        finals: BTreeSet<Q>,
    ) -> Result<Nfa<Q, S>, MachineError> {
        if base.rules.iter().any(|r| r.command != Command::Pop) {
            return Err(MachineError::NotPopOnly);
        }
        Ok(Nfa { base, initial, finals })
    }

    pub fn base(&self) -> &Pds<Q, S> {
        &self.base
    }

    pub fn rules(&self) -> &[PdsRule<Q, S>] {
        &self.base.rules
    }
}

/// Language membership for [`Nfa`]: the configuration's state must be
/// initial and some run must drain the stack into a final state.
pub fn nfa_accepts<Q: Clone + Eq + Ord + Hash, S: Clone + Eq>(
    a: &Nfa<Q, S>,
    id: &PdsId<Q, S>,
) -> bool {
    if !a.initial.contains(&id.state) {
        return false;
    }
    let mut current: BTreeSet<&Q> = BTreeSet::new();
    current.insert(&id.state);
    for sym in &id.stack {
        let mut next = BTreeSet::new();
        for rule in &a.base.rules {
            if rule.symbol == *sym && current.contains(&rule.from) {
                next.insert(&rule.to);
            }
        }
        current = next;
        if current.is_empty() {
            return false;
        }
    }
    current.iter().any(|q| a.finals.contains(q))
}
