//! Reduction of register pushdown systems to ordinary pushdown systems.
//!
//! The reduced system runs over the stack alphabet of guard partitions: a
//! stack symbol records the register pattern between two adjacent saved
//! assignments, and the state carries, next to the original control state,
//! the accumulated pattern `acc` between the top saved assignment and the
//! current registers. Three inference rules translate each source rule into
//! finitely many pushdown rules, one per composable context pair (φ1, φ2).
//!
//! [`map_id`] is the functional abstraction map from register configurations
//! to pushdown configurations; it commutes with steps on both sides, which
//! [`bisim_probe`] checks exhaustively to a bounded depth.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::eqrel::{
    compose, compose_top, composable_top, enumerate_phi_bounded, eqj, induced, lat,
    make_reg_partition, EqrelError, Partition, RegPartition, Symbol, DEFAULT_K_BOUND,
};
use crate::machines::{
    is_proper, pds_successors, rpds_successors, Command, MachineError, Nfa, Pds, PdsId, PdsRule,
    Ra, Rpds, RpdsId, StateId,
};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ReductionError {
    #[error(transparent)]
    Guard(#[from] EqrelError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("configuration has an empty stack")]
    EmptyStack,
    #[error("acceptor initial states must be exactly the {expected} system states")]
    InitialMismatch { expected: usize },
}

/// A state of the reduced pushdown system: the original control state plus
/// the register pattern accumulated since the current stack top was pushed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedState {
    pub base: StateId,
    pub acc: Partition,
}

/// Where a reduced rule came from: the index of the source rule and the
/// context pair (φ1, φ2) that instantiated the inference rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub source_rule: usize,
    pub phi1: Partition,
    pub phi2: Partition,
}

/// The reduced pushdown system with per-rule provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedSystem {
    pds: Pds<ReducedState, Partition>,
    provenance: Vec<Provenance>,
}

impl ReducedSystem {
    pub fn pds(&self) -> &Pds<ReducedState, Partition> {
        &self.pds
    }

    pub fn rules(&self) -> &[PdsRule<ReducedState, Partition>] {
        &self.pds.rules
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// A copy with one rule's target state replaced. Useful for negative
    /// testing: the bisimulation probe must notice the perturbation once
    /// the rule is exercised.
    pub fn with_rule_target(&self, rule: usize, to: ReducedState) -> ReducedSystem {
        let mut out = self.clone();
        out.pds.rules[rule].to = to;
        out
    }

    /// Drop all rules whose head (state, top symbol) is unreachable from
    /// the given start configurations. Behavior from those starts is
    /// preserved: a rule can fire iff its head is reachable.
    pub fn restrict_to_reachable(
        &self,
        starts: &[PdsId<ReducedState, Partition>],
    ) -> ReducedSystem {
        let heads = reachable_heads(&self.pds, starts);
        let mut rules = Vec::new();
        let mut provenance = Vec::new();
        for (rule, prov) in self.pds.rules.iter().zip(&self.provenance) {
            if heads.contains(&(rule.from.clone(), rule.symbol.clone())) {
                rules.push(rule.clone());
                provenance.push(prov.clone());
            }
        }
        ReducedSystem { pds: Pds { rules }, provenance }
    }
}

/// Pattern of the unprimed registers of `phi`, as a register partition.
fn unprimed_proj(phi: &Partition) -> RegPartition {
    let k = phi.k();
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    'outer: for i in 1..=k {
        for b in &mut blocks {
            if phi.related(Symbol::Reg(b[0]), Symbol::Reg(i)) {
                b.push(i);
                continue 'outer;
            }
        }
        blocks.push(vec![i]);
    }
    make_reg_partition(k, &blocks).expect("projection blocks are disjoint")
}

/// Build the reduced pushdown system: for every source rule with guard φ3
/// and every context pair φ1 ⊙ φ2 with φ2 ⊙_T φ3, emit
///
/// * skip: `((q,φ2),φ1) → ((q', φ2∘_Tφ3), skip)`
/// * pop:  `((q,φ2),φ1) → ((q', φ1∘(φ2∘_Tφ3)), pop)`
/// * push j: `((q,φ2),φ1) → ((q', ⟨φ3⟩_j), push(φ2∘_Tφ3))`
pub fn reduce_rpds(m: &Rpds) -> Result<ReducedSystem, ReductionError> {
    let k = m.k();
    let phis = enumerate_phi_bounded(k, DEFAULT_K_BOUND)?;
    // Context pairs are constrained by pattern agreement: φ1 ⊙ φ2 means the
    // primed pattern of φ1 equals the unprimed pattern of φ2. Bucket the
    // partitions by both projections to avoid the quadratic scan.
    let mut by_lat: BTreeMap<RegPartition, Vec<&Partition>> = BTreeMap::new();
    for phi in &phis {
        by_lat.entry(lat(phi)).or_default().push(phi);
    }
    let empty = Vec::new();
    let mut rules = Vec::new();
    let mut provenance = Vec::new();
    let mut seen: BTreeSet<PdsRule<ReducedState, Partition>> = BTreeSet::new();
    for (sidx, rule) in m.rules().iter().enumerate() {
        let phi3 = &rule.guard;
        for phi2 in by_lat.get(&unprimed_proj(phi3)).unwrap_or(&empty) {
            if !composable_top(phi2, phi3) {
                continue;
            }
            let mid = compose_top(phi2, phi3)?;
            let push_acc = match rule.command {
                Command::Push(j) => Some(eqj(phi3, j)?),
                _ => None,
            };
            for phi1 in by_lat.get(&unprimed_proj(phi2)).unwrap_or(&empty) {
                let (acc, command) = match rule.command {
                    Command::Skip => (mid.clone(), Command::Skip),
                    Command::Pop => (
                        compose(phi1, &mid)
                            .expect("chained composition of composable contexts is defined"),
                        Command::Pop,
                    ),
                    Command::Push(_) => {
                        (push_acc.clone().unwrap(), Command::Push(mid.clone()))
                    }
                };
                let to = ReducedState { base: rule.to, acc };
                let new_rule = PdsRule {
                    from: ReducedState { base: rule.from, acc: (*phi2).clone() },
                    symbol: (*phi1).clone(),
                    to,
                    command,
                };
                if seen.insert(new_rule.clone()) {
                    rules.push(new_rule);
                    provenance.push(Provenance {
                        source_rule: sidx,
                        phi1: (*phi1).clone(),
                        phi2: (*phi2).clone(),
                    });
                }
            }
        }
    }
    Ok(ReducedSystem { pds: Pds { rules }, provenance })
}

/// Reduce a pop-only acceptor whose initial states are exactly the system
/// states `0..system_states` into a finite automaton over stack words of
/// partitions: initial states are all `(p, φ)` with `p` a system state, and
/// `(q, φ)` is final iff the acceptor accepts at `q` with pattern `lat(φ)`.
pub fn reduce_ra(
    a: &Ra,
    system_states: usize,
) -> Result<Nfa<ReducedState, Partition>, ReductionError> {
    let expected: BTreeSet<StateId> = (0..system_states).map(StateId).collect();
    if *a.initial() != expected {
        return Err(ReductionError::InitialMismatch { expected: system_states });
    }
    let reduced = reduce_rpds(a.base())?;
    let phis = enumerate_phi_bounded(a.base().k(), DEFAULT_K_BOUND)?;
    let mut initial = BTreeSet::new();
    let mut finals = BTreeSet::new();
    for phi in &phis {
        for p in 0..system_states {
            initial.insert(ReducedState { base: StateId(p), acc: phi.clone() });
        }
        let pattern = lat(phi);
        for (q, psi) in a.accept() {
            if *psi == pattern {
                finals.insert(ReducedState { base: *q, acc: phi.clone() });
            }
        }
    }
    Ok(Nfa::new(reduced.pds, initial, finals).expect("reducing a pop-only system yields pop rules"))
}

/// The abstraction map from register configurations to pushdown
/// configurations: the state records the pattern between the top cell's
/// saved assignment and the current registers; each stack symbol records
/// the pattern between adjacent saved assignments; the bottom symbol
/// relates the bottom cell to itself.
pub fn map_id(c: &RpdsId) -> Result<PdsId<ReducedState, Partition>, ReductionError> {
    if c.stack.is_empty() {
        return Err(ReductionError::EmptyStack);
    }
    if !is_proper(c) {
        return Err(ReductionError::Machine(MachineError::ImproperId));
    }
    let top = &c.stack[0];
    let acc = induced(&top.saved, top.value, &c.theta)?;
    let mut stack = Vec::with_capacity(c.stack.len());
    for w in c.stack.windows(2) {
        stack.push(induced(&w[1].saved, w[1].value, &w[0].saved)?);
    }
    let bottom = c.stack.last().unwrap();
    stack.push(induced(&bottom.saved, bottom.value, &bottom.saved)?);
    Ok(PdsId { state: ReducedState { base: c.state, acc }, stack })
}

/// The image of a one-step successor `c2` of `c`. For a successor that has
/// drained the stack the abstraction needs the vanished bottom cell, so it
/// is computed relative to the parent.
fn successor_image(
    c: &RpdsId,
    c2: &RpdsId,
) -> Result<PdsId<ReducedState, Partition>, ReductionError> {
    if !c2.stack.is_empty() {
        return map_id(c2);
    }
    let bottom = c.stack.last().ok_or(ReductionError::EmptyStack)?;
    let acc = induced(&bottom.saved, bottom.value, &c2.theta)?;
    Ok(PdsId { state: ReducedState { base: c2.state, acc }, stack: Vec::new() })
}

/// Outcome of [`bisim_probe`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimReport {
    Clean { ids_checked: usize, steps_checked: usize },
    Violation(Box<BisimViolation>),
}

impl BisimReport {
    pub fn is_clean(&self) -> bool {
        matches!(self, BisimReport::Clean { .. })
    }
}

/// A configuration where the two systems disagree, with the unmatched step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimViolation {
    pub at: RpdsId,
    pub image: PdsId<ReducedState, Partition>,
    pub kind: BisimViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimViolationKind {
    /// A register step whose image the reduced system cannot take.
    UnmatchedRegisterStep { successor: RpdsId, expected: PdsId<ReducedState, Partition> },
    /// A reduced step whose pre-image no canonical register step realizes.
    UnmatchedPushdownStep { successor: PdsId<ReducedState, Partition> },
}

/// Check, over all configurations within `depth` canonical steps of `c`,
/// that register steps and reduced-pushdown steps simulate each other
/// through the abstraction map. Reports the first violation found.
pub fn bisim_probe(
    m: &Rpds,
    rm: &ReducedSystem,
    c: &RpdsId,
    depth: u32,
) -> Result<BisimReport, ReductionError> {
    map_id(c)?; // validates properness and non-empty stack up front
    let mut ids_checked = 0;
    let mut steps_checked = 0;
    let mut visited: BTreeSet<RpdsId> = BTreeSet::new();
    let mut frontier = vec![c.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for cur in frontier {
            if cur.stack.is_empty() || !visited.insert(cur.clone()) {
                continue;
            }
            ids_checked += 1;
            let image = map_id(&cur)?;
            let reg_succs = rpds_successors(m, &cur)?;
            let mut reg_images = Vec::with_capacity(reg_succs.len());
            for (_, c2) in &reg_succs {
                reg_images.push(successor_image(&cur, c2)?);
            }
            let pds_succs: Vec<_> =
                pds_successors(&rm.pds, &image).into_iter().map(|(_, t)| t).collect();
            for ((_, c2), img2) in reg_succs.iter().zip(&reg_images) {
                steps_checked += 1;
                if !pds_succs.contains(img2) {
                    return Ok(BisimReport::Violation(Box::new(BisimViolation {
                        at: cur.clone(),
                        image,
                        kind: BisimViolationKind::UnmatchedRegisterStep {
                            successor: c2.clone(),
                            expected: img2.clone(),
                        },
                    })));
                }
            }
            for t in &pds_succs {
                steps_checked += 1;
                if !reg_images.contains(t) {
                    return Ok(BisimReport::Violation(Box::new(BisimViolation {
                        at: cur.clone(),
                        image,
                        kind: BisimViolationKind::UnmatchedPushdownStep { successor: t.clone() },
                    })));
                }
            }
            next.extend(reg_succs.into_iter().map(|(_, c2)| c2));
        }
        frontier = next;
    }
    Ok(BisimReport::Clean { ids_checked, steps_checked })
}

/// All heads (state, top symbol) reachable from the start configurations.
/// Computed from a pop-successor fixpoint: `popsucc(p,γ)` is the set of
/// states reachable from `(p, γw)` at the moment `γw` has shrunk to `w`.
pub fn reachable_heads<Q: Clone + Ord, S: Clone + Ord>(
    m: &Pds<Q, S>,
    starts: &[PdsId<Q, S>],
) -> BTreeSet<(Q, S)> {
    let mut popsucc: BTreeMap<(Q, S), BTreeSet<Q>> = BTreeMap::new();
    loop {
        let mut changed = false;
        for rule in &m.rules {
            let key = (rule.from.clone(), rule.symbol.clone());
            let add: BTreeSet<Q> = match &rule.command {
                Command::Pop => [rule.to.clone()].into(),
                Command::Skip => popsucc
                    .get(&(rule.to.clone(), rule.symbol.clone()))
                    .cloned()
                    .unwrap_or_default(),
                Command::Push(s) => {
                    let mids = popsucc.get(&(rule.to.clone(), s.clone())).cloned().unwrap_or_default();
                    let mut out = BTreeSet::new();
                    for mid in mids {
                        if let Some(fin) = popsucc.get(&(mid, rule.symbol.clone())) {
                            out.extend(fin.iter().cloned());
                        }
                    }
                    out
                }
            };
            if !add.is_empty() {
                let entry = popsucc.entry(key).or_default();
                for q in add {
                    changed |= entry.insert(q);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut heads: BTreeSet<(Q, S)> = BTreeSet::new();
    let mut work: Vec<(Q, S)> = Vec::new();
    let push = |h: (Q, S), heads: &mut BTreeSet<(Q, S)>, work: &mut Vec<(Q, S)>| {
        if heads.insert(h.clone()) {
            work.push(h);
        }
    };
    for c in starts {
        let mut states: BTreeSet<Q> = [c.state.clone()].into();
        for sym in &c.stack {
            let mut below = BTreeSet::new();
            for q in states {
                push((q.clone(), sym.clone()), &mut heads, &mut work);
                if let Some(s) = popsucc.get(&(q, sym.clone())) {
                    below.extend(s.iter().cloned());
                }
            }
            states = below;
            if states.is_empty() {
                break;
            }
        }
    }
    while let Some((p, sym)) = work.pop() {
        for rule in &m.rules {
            if rule.from != p || rule.symbol != sym {
                continue;
            }
            match &rule.command {
                Command::Pop => {}
                Command::Skip => push((rule.to.clone(), sym.clone()), &mut heads, &mut work),
                Command::Push(s) => {
                    push((rule.to.clone(), s.clone()), &mut heads, &mut work);
                    if let Some(mids) = popsucc.get(&(rule.to.clone(), s.clone())) {
                        for mid in mids.clone() {
                            push((mid, sym.clone()), &mut heads, &mut work);
                        }
                    }
                }
            }
        }
    }
    heads
}
