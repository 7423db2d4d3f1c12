//! LTL model checking of pushdown systems under regular valuations.
//!
//! Atoms are interpreted by finite automata over the stack alphabet whose
//! initial states are the pushdown states: an atom holds at a configuration
//! iff its automaton accepts the configuration. Because acceptance reads
//! the whole stack, every cell is annotated with the backward-determinized
//! drain information of the word strictly below it ([`Annotator`]); an
//! atom's truth then depends only on the control state and the top cell, so
//! the usual Büchi product works unchanged.
//!
//! The verdict comes from the classic saturation pipeline: build the
//! product of the annotated pushdown system with a Büchi automaton for the
//! negated formula, find the repeating heads (heads that can reach
//! themselves again on top with an accepting control state in between) via
//! flag-carrying `pre*` saturation and a strongly-connected-component
//! analysis, and test whether any repeating head is reachable from the
//! start configuration. Violations come with a best-effort lasso witness
//! that replays as concrete steps.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::ltl::{to_buchi, AtomTable, BuchiAutomaton, Formula, Letter, LtlError};
use crate::machines::{nfa_accepts, pds_successors, Command, Nfa, Pds, PdsId, PdsRule};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum PdsmcError {
    #[error("start configuration has an empty stack")]
    EmptyStack,
    #[error("atom table and valuation automata disagree on '{atom}'")]
    AtomMismatch { atom: String },
    #[error("valuation automaton for '{atom}' must have every pushdown state initial")]
    BadValuation { atom: String },
    #[error("annotation state count exceeded the budget of {budget}")]
    AnnotatorBudget { budget: usize },
    #[error("product rule count exceeded the budget of {budget}")]
    ProductBudget { budget: usize },
    #[error("stack annotations do not chain: cell {cell} is stale")]
    InconsistentAnnotation { cell: usize },
    #[error(transparent)]
    Ltl(#[from] LtlError),
}

/// The regular valuation: one automaton per atom, over the pushdown
/// system's states and stack alphabet.
#[derive(Debug, Clone)]
pub struct ValuationSpec<Q, S> {
    atoms: AtomTable,
    automata: BTreeMap<String, Nfa<Q, S>>,
}

impl<Q: Clone + Ord, S: Clone + Ord> ValuationSpec<Q, S> {
    pub fn new(
        atoms: AtomTable,
        automata: BTreeMap<String, Nfa<Q, S>>,
    ) -> Result<ValuationSpec<Q, S>, PdsmcError> {
        for name in atoms.names() {
            if !automata.contains_key(name) {
                return Err(PdsmcError::AtomMismatch { atom: name.clone() });
            }
        }
        for name in automata.keys() {
            if atoms.index(name).is_none() {
                return Err(PdsmcError::AtomMismatch { atom: name.clone() });
            }
        }
        Ok(ValuationSpec { atoms, automata })
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn automata(&self) -> &BTreeMap<String, Nfa<Q, S>> {
        &self.automata
    }

    /// The valuation letter of a configuration, computed directly from the
    /// atom automata. Slow but independent of the annotator; the reference
    /// implementation for tests and witness validation.
    pub fn letter_of(&self, c: &PdsId<Q, S>) -> Letter
    where
        Q: std::hash::Hash + Eq,
    {
        let mut l = Letter::empty();
        for (i, name) in self.atoms.names().iter().enumerate() {
            if nfa_accepts(&self.automata[name], c) {
                l.insert(i);
            }
        }
        l
    }
}

/// Backward-deterministic annotation of stack suffixes. An annotation
/// state holds, per atom, the set of automaton states that can drain the
/// annotated suffix into a final state; [`Annotator::step`] extends the
/// suffix by one symbol. States are interned lazily against a budget.
#[derive(Debug, Clone)]
pub struct Annotator<Q, S> {
    atom_rules: Vec<BTreeMap<S, Vec<(Q, Q)>>>,
    states: Vec<Vec<BTreeSet<Q>>>,
    index: BTreeMap<Vec<BTreeSet<Q>>, usize>,
    steps: BTreeMap<(usize, S), usize>,
    budget: usize,
}

impl<Q: Clone + Ord, S: Clone + Ord> Annotator<Q, S> {
    pub fn new(v: &ValuationSpec<Q, S>, budget: usize) -> Annotator<Q, S> {
        let mut atom_rules = Vec::new();
        let mut base = Vec::new();
        for name in v.atoms.names() {
            let nfa = &v.automata[name];
            let mut by_symbol: BTreeMap<S, Vec<(Q, Q)>> = BTreeMap::new();
            for rule in nfa.rules() {
                by_symbol
                    .entry(rule.symbol.clone())
                    .or_default()
                    .push((rule.from.clone(), rule.to.clone()));
            }
            atom_rules.push(by_symbol);
            base.push(nfa.finals.clone());
        }
        let mut ann = Annotator {
            atom_rules,
            states: Vec::new(),
            index: BTreeMap::new(),
            steps: BTreeMap::new(),
            budget,
        };
        ann.intern(base).expect("base annotation fits any budget");
        ann
    }

    fn intern(&mut self, slots: Vec<BTreeSet<Q>>) -> Result<usize, PdsmcError> {
        if let Some(&id) = self.index.get(&slots) {
            return Ok(id);
        }
        if self.states.len() >= self.budget {
            return Err(PdsmcError::AnnotatorBudget { budget: self.budget });
        }
        let id = self.states.len();
        self.states.push(slots.clone());
        self.index.insert(slots, id);
        Ok(id)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Annotation of the empty suffix: per atom, the final states.
    pub fn base(&self) -> usize {
        0
    }

    /// Annotation of `sym` followed by the suffix annotated by `below`.
    pub fn step(&mut self, below: usize, sym: &S) -> Result<usize, PdsmcError> {
        if let Some(&id) = self.steps.get(&(below, sym.clone())) {
            return Ok(id);
        }
        let mut slots = Vec::with_capacity(self.atom_rules.len());
        for (i, rules) in self.atom_rules.iter().enumerate() {
            let mut slot = BTreeSet::new();
            if let Some(pairs) = rules.get(sym) {
                for (from, to) in pairs {
                    if self.states[below][i].contains(to) {
                        slot.insert(from.clone());
                    }
                }
            }
            slots.push(slot);
        }
        let id = self.intern(slots)?;
        self.steps.insert((below, sym.clone()), id);
        Ok(id)
    }

    /// The letter at a configuration whose top cell is `sym` annotated with
    /// `below`: one step of each atom automaton into its drain sets.
    pub fn label_head(&mut self, state: &Q, sym: &S, below: usize) -> Result<Letter, PdsmcError> {
        let over = self.step(below, sym)?;
        let mut letter = Letter::empty();
        for i in 0..self.atom_rules.len() {
            if self.states[over][i].contains(state) {
                letter.insert(i);
            }
        }
        Ok(letter)
    }

    /// Annotate a stack (top first): each cell is paired with the
    /// annotation of the word strictly below it.
    pub fn annotate(&mut self, stack: &[S]) -> Result<Vec<(S, usize)>, PdsmcError> {
        let mut out: Vec<(S, usize)> = Vec::with_capacity(stack.len());
        let mut below = self.base();
        for sym in stack.iter().rev() {
            out.push((sym.clone(), below));
            below = self.step(below, sym)?;
        }
        out.reverse();
        Ok(out)
    }

    /// The valuation letter of an annotated configuration, after checking
    /// that the annotations chain correctly from the bottom.
    pub fn label(&mut self, state: &Q, stack: &[(S, usize)]) -> Result<Letter, PdsmcError> {
        let mut below = self.base();
        for (cell, (sym, ann)) in stack.iter().enumerate().rev() {
            if *ann != below {
                return Err(PdsmcError::InconsistentAnnotation { cell });
            }
            below = self.step(below, sym)?;
        }
        let mut letter = Letter::empty();
        for i in 0..self.atom_rules.len() {
            if self.states[below][i].contains(state) {
                letter.insert(i);
            }
        }
        Ok(letter)
    }
}

/// The product of an annotated pushdown system with a Büchi automaton:
/// states pair control states with Büchi states, symbols pair stack
/// symbols with annotations. Restricted to heads reachable from `start`.
#[derive(Debug, Clone)]
pub struct BuchiPds<Q, S> {
    pub pds: Pds<(Q, usize), (S, usize)>,
    pub accepting: BTreeSet<(Q, usize)>,
    pub start: PdsId<(Q, usize), (S, usize)>,
}

/// A state of a [`PAutomaton`]: either a pushdown control state or an
/// auxiliary state of the target automaton.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PaState<Q> {
    Ctrl(Q),
    Aux(usize),
}

/// A finite automaton over stack words recognizing a set of pushdown
/// configurations: `(p, w)` is accepted if reading `w` (top first) from
/// `Ctrl(p)` reaches a final state. Edges carry a flag that, after
/// saturation, records whether the witnessing run segment visits an
/// accepting control state.
#[derive(Debug, Clone, Default)]
pub struct PAutomaton<Q, S> {
    pub edges: BTreeMap<(PaState<Q>, S), BTreeMap<PaState<Q>, bool>>,
    pub finals: BTreeSet<PaState<Q>>,
}

impl<Q: Clone + Ord, S: Clone + Ord> PAutomaton<Q, S> {
    pub fn accepts(&self, c: &PdsId<Q, S>) -> bool {
        let mut cur: BTreeSet<PaState<Q>> = [PaState::Ctrl(c.state.clone())].into();
        for sym in &c.stack {
            let mut next = BTreeSet::new();
            for s in cur {
                if let Some(ts) = self.edges.get(&(s, sym.clone())) {
                    next.extend(ts.keys().cloned());
                }
            }
            cur = next;
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|s| self.finals.contains(s))
    }

    /// Insert or upgrade an edge; true if it is new or its flag grew.
    fn add(&mut self, from: PaState<Q>, sym: S, to: PaState<Q>, flag: bool) -> bool {
        let slot = self.edges.entry((from, sym)).or_default();
        match slot.get_mut(&to) {
            None => {
                slot.insert(to, flag);
                true
            }
            Some(old) => {
                let changed = flag && !*old;
                *old |= flag;
                changed
            }
        }
    }
}

/// Saturate `targets` into an automaton recognizing every configuration
/// from which the pushdown system can reach a `targets` configuration.
/// Edge flags accumulate visits to `accepting` control states along the
/// witnessing run segments (both endpoints included).
pub fn prestar<Q: Clone + Ord, S: Clone + Ord>(
    m: &Pds<Q, S>,
    accepting: &BTreeSet<Q>,
    targets: &PAutomaton<Q, S>,
) -> PAutomaton<Q, S> {
    let mut pa = targets.clone();
    let acc = |q: &Q| accepting.contains(q);
    let mut work: Vec<(PaState<Q>, S, PaState<Q>)> = Vec::new();
    for ((from, sym), tos) in &pa.edges {
        for to in tos.keys() {
            work.push((from.clone(), sym.clone(), to.clone()));
        }
    }
    for rule in &m.rules {
        if rule.command == Command::Pop {
            let (f, s, t) = (
                PaState::Ctrl(rule.from.clone()),
                rule.symbol.clone(),
                PaState::Ctrl(rule.to.clone()),
            );
            pa.add(f.clone(), s.clone(), t.clone(), acc(&rule.from) || acc(&rule.to));
            work.push((f, s, t));
        }
    }
    while let Some((src, sym, tgt)) = work.pop() {
        // read the current flag: the edge may have been upgraded since queued
        let flag = pa.edges[&(src.clone(), sym.clone())][&tgt];
        for rule in &m.rules {
            let from = PaState::Ctrl(rule.from.clone());
            match &rule.command {
                Command::Pop => {}
                Command::Skip => {
                    // rule (p,γ)→(p',γ) chains onto an edge (p',γ)→t
                    if PaState::Ctrl(rule.to.clone()) == src && rule.symbol == sym {
                        let nf = acc(&rule.from) || flag;
                        if pa.add(from.clone(), sym.clone(), tgt.clone(), nf) {
                            work.push((from.clone(), sym.clone(), tgt.clone()));
                        }
                    }
                }
                Command::Push(pushed) => {
                    // rule (p,γ)→(p',pushed·γ) composes edges (p',pushed)→t
                    // and (t,γ)→t' into (p,γ)→t'
                    if PaState::Ctrl(rule.to.clone()) == src && *pushed == sym {
                        // the processed edge is the first hop
                        let seconds = pa
                            .edges
                            .get(&(tgt.clone(), rule.symbol.clone()))
                            .cloned()
                            .unwrap_or_default();
                        for (t2, f2) in seconds {
                            let nf = acc(&rule.from) || flag || f2;
                            if pa.add(from.clone(), rule.symbol.clone(), t2.clone(), nf) {
                                work.push((from.clone(), rule.symbol.clone(), t2));
                            }
                        }
                    }
                    if rule.symbol == sym {
                        // the processed edge is the second hop
                        let f1 = pa
                            .edges
                            .get(&(PaState::Ctrl(rule.to.clone()), pushed.clone()))
                            .and_then(|tos| tos.get(&src))
                            .copied();
                        if let Some(f1) = f1 {
                            let nf = acc(&rule.from) || f1 || flag;
                            if pa.add(from.clone(), sym.clone(), tgt.clone(), nf) {
                                work.push((from.clone(), sym.clone(), tgt.clone()));
                            }
                        }
                    }
                }
            }
        }
    }
    pa
}

/// Resource limits for [`model_check_pds`].
#[derive(Debug, Clone)]
pub struct McOptions {
    pub annotator_budget: usize,
    pub product_rule_budget: usize,
    pub witness_search_budget: usize,
    pub witness_stack_bound: usize,
}

impl Default for McOptions {
    fn default() -> McOptions {
        McOptions {
            annotator_budget: 1 << 16,
            product_rule_budget: 500_000,
            witness_search_budget: 200_000,
            witness_stack_bound: 64,
        }
    }
}

/// A violating run in lasso shape. `stem` leads from the start
/// configuration to the loop; `cycle` starts and ends at the same control
/// state and top symbol, one pumping period apart (so it has at least two
/// entries, and its last configuration may carry a deeper stack).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso<Q, S> {
    pub stem: Vec<PdsId<Q, S>>,
    pub cycle: Vec<PdsId<Q, S>>,
    pub stem_letters: Vec<Letter>,
    pub cycle_letters: Vec<Letter>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<Q, S> {
    /// Every infinite run from the start satisfies the formula.
    Holds,
    /// Some run violates it; the witness is best-effort.
    Violated(Option<Lasso<Q, S>>),
    /// A resource budget was exhausted before a verdict was reached.
    ResourceExceeded(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct McStats {
    pub product_states: usize,
    pub product_rules: usize,
    pub annotator_states: usize,
    pub buchi_states: usize,
    pub repeating_heads: usize,
    pub wall: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McReport<Q, S> {
    pub verdict: Verdict<Q, S>,
    pub stats: McStats,
}

type PQ<Q> = (Q, usize);
type PS<S> = (S, usize);

/// Flag-carrying pop summaries: for each head, the control states reachable
/// at the moment the head's symbol has been popped, with a flag recording
/// whether an accepting state was visited on the way (endpoints included).
fn pop_summaries<Q: Clone + Ord, S: Clone + Ord>(
    rules: &[PdsRule<Q, S>],
    accepting: &BTreeSet<Q>,
) -> BTreeMap<(Q, S), BTreeMap<Q, bool>> {
    let mut states: BTreeSet<Q> = BTreeSet::new();
    for r in rules {
        states.insert(r.from.clone());
        states.insert(r.to.clone());
    }
    let targets = PAutomaton {
        edges: BTreeMap::new(),
        finals: states.into_iter().map(PaState::Ctrl).collect(),
    };
    let pa = prestar(&Pds { rules: rules.to_vec() }, accepting, &targets);
    let mut out: BTreeMap<(Q, S), BTreeMap<Q, bool>> = BTreeMap::new();
    for ((from, sym), tos) in &pa.edges {
        let PaState::Ctrl(p) = from else { continue };
        for (to, flag) in tos {
            let PaState::Ctrl(q) = to else { continue };
            out.entry((p.clone(), sym.clone())).or_default().insert(q.clone(), *flag);
        }
    }
    out
}

/// Build the annotated Büchi product restricted to heads reachable from the
/// annotated start configuration.
pub fn build_product<Q: Clone + Ord, S: Clone + Ord>(
    m: &Pds<Q, S>,
    buchi: &BuchiAutomaton,
    ann: &mut Annotator<Q, S>,
    c0: &PdsId<Q, S>,
    opts: &McOptions,
) -> Result<BuchiPds<Q, S>, PdsmcError> {
    if c0.stack.is_empty() {
        return Err(PdsmcError::EmptyStack);
    }
    let start = PdsId { state: (c0.state.clone(), buchi.initial), stack: ann.annotate(&c0.stack)? };
    let mut buchi_out: Vec<Vec<(crate::ltl::LetterPred, usize)>> =
        vec![Vec::new(); buchi.state_count];
    for &(src, pred, tgt) in &buchi.transitions {
        buchi_out[src].push((pred, tgt));
    }
    let accepting_buchi = &buchi.accepting;
    let mut rules: Vec<PdsRule<PQ<Q>, PS<S>>> = Vec::new();
    let mut rule_set: BTreeSet<PdsRule<PQ<Q>, PS<S>>> = BTreeSet::new();
    let mut processed: BTreeSet<(PQ<Q>, PS<S>)> = BTreeSet::new();
    loop {
        let accepting: BTreeSet<PQ<Q>> = rules
            .iter()
            .flat_map(|r| [r.from.clone(), r.to.clone()])
            .chain([start.state.clone()])
            .filter(|(_, b)| accepting_buchi.contains(b))
            .collect();
        let summaries = pop_summaries(&rules, &accepting);
        // heads reachable with the rules generated so far
        let mut heads: BTreeSet<(PQ<Q>, PS<S>)> = BTreeSet::new();
        let mut work: Vec<(PQ<Q>, PS<S>)> = Vec::new();
        let reach = |h: (PQ<Q>, PS<S>),
                     heads: &mut BTreeSet<(PQ<Q>, PS<S>)>,
                     work: &mut Vec<(PQ<Q>, PS<S>)>| {
            if heads.insert(h.clone()) {
                work.push(h);
            }
        };
        let mut cur: BTreeSet<PQ<Q>> = [start.state.clone()].into();
        for sym in &start.stack {
            let mut below = BTreeSet::new();
            for q in cur {
                reach((q.clone(), sym.clone()), &mut heads, &mut work);
                if let Some(s) = summaries.get(&(q, sym.clone())) {
                    below.extend(s.keys().cloned());
                }
            }
            cur = below;
            if cur.is_empty() {
                break;
            }
        }
        while let Some((p, sym)) = work.pop() {
            for rule in &rules {
                if rule.from != p || rule.symbol != sym {
                    continue;
                }
                match &rule.command {
                    Command::Pop => {}
                    Command::Skip => reach((rule.to.clone(), sym.clone()), &mut heads, &mut work),
                    Command::Push(s2) => {
                        reach((rule.to.clone(), s2.clone()), &mut heads, &mut work);
                        if let Some(mids) = summaries.get(&(rule.to.clone(), s2.clone())) {
                            for mid in mids.keys() {
                                reach((mid.clone(), sym.clone()), &mut heads, &mut work);
                            }
                        }
                    }
                }
            }
        }
        // translate source rules at every new head
        let mut added = false;
        for head in heads {
            if !processed.insert(head.clone()) {
                continue;
            }
            added = true;
            let ((q, b), (sym, below)) = head;
            let letter = ann.label_head(&q, &sym, below)?;
            for &(pred, b2) in &buchi_out[b] {
                if !pred.matches(letter) {
                    continue;
                }
                for rule in &m.rules {
                    if rule.from != q || rule.symbol != sym {
                        continue;
                    }
                    let command = match &rule.command {
                        Command::Pop => Command::Pop,
                        Command::Skip => Command::Skip,
                        Command::Push(s2) => Command::Push((s2.clone(), ann.step(below, &sym)?)),
                    };
                    let new_rule = PdsRule {
                        from: (q.clone(), b),
                        symbol: (sym.clone(), below),
                        to: (rule.to.clone(), b2),
                        command,
                    };
                    if rule_set.insert(new_rule.clone()) {
                        if rules.len() >= opts.product_rule_budget {
                            return Err(PdsmcError::ProductBudget {
                                budget: opts.product_rule_budget,
                            });
                        }
                        rules.push(new_rule);
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    let accepting = rules
        .iter()
        .flat_map(|r| [r.from.clone(), r.to.clone()])
        .chain([start.state.clone()])
        .filter(|(_, b)| accepting_buchi.contains(b))
        .collect();
    Ok(BuchiPds { pds: Pds { rules }, accepting, start })
}

/// Strongly connected components by Tarjan's algorithm, iteratively.
/// Returns the component index of each node.
fn sccs(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; n];
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei < adj[v].len() {
                let w = adj[v][*ei];
                *ei += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                call.pop();
                if let Some(&mut (u, _)) = call.last_mut() {
                    low[u] = low[u].min(low[v]);
                }
            }
        }
    }
    comp
}

/// Heads that can reach themselves again on top with an accepting control
/// state seen on the way: the sources of infinite accepting runs.
fn repeating_heads<Q: Clone + Ord, S: Clone + Ord>(
    product: &BuchiPds<Q, S>,
) -> BTreeSet<(PQ<Q>, PS<S>)> {
    let rules = &product.pds.rules;
    let summaries = pop_summaries(rules, &product.accepting);
    let mut nodes: Vec<(PQ<Q>, PS<S>)> = Vec::new();
    let mut node_id: BTreeMap<(PQ<Q>, PS<S>), usize> = BTreeMap::new();
    let id = |h: (PQ<Q>, PS<S>),
              nodes: &mut Vec<(PQ<Q>, PS<S>)>,
              node_id: &mut BTreeMap<(PQ<Q>, PS<S>), usize>| {
        *node_id.entry(h.clone()).or_insert_with(|| {
            nodes.push(h);
            nodes.len() - 1
        })
    };
    let mut edges: Vec<(usize, usize, bool)> = Vec::new();
    for rule in rules {
        let acc_from = product.accepting.contains(&rule.from);
        let u = id((rule.from.clone(), rule.symbol.clone()), &mut nodes, &mut node_id);
        match &rule.command {
            Command::Pop => {}
            Command::Skip => {
                let v = id((rule.to.clone(), rule.symbol.clone()), &mut nodes, &mut node_id);
                edges.push((u, v, acc_from));
            }
            Command::Push(s2) => {
                let v = id((rule.to.clone(), s2.clone()), &mut nodes, &mut node_id);
                edges.push((u, v, acc_from));
                if let Some(mids) = summaries.get(&(rule.to.clone(), s2.clone())) {
                    for (mid, f) in mids {
                        let w = id((mid.clone(), rule.symbol.clone()), &mut nodes, &mut node_id);
                        edges.push((u, w, acc_from || *f));
                    }
                }
            }
        }
    }
    let mut adj = vec![Vec::new(); nodes.len()];
    for &(u, v, _) in &edges {
        adj[u].push(v);
    }
    let comp = sccs(nodes.len(), &adj);
    let mut marked: BTreeSet<usize> = BTreeSet::new();
    for &(u, v, flag) in &edges {
        if flag && comp[u] == comp[v] {
            marked.insert(comp[u]);
        }
    }
    nodes
        .into_iter()
        .enumerate()
        .filter(|(i, _)| marked.contains(&comp[*i]))
        .map(|(_, h)| h)
        .collect()
}

/// Breadth-first path search, bounded by a visit budget and a stack bound.
/// Returns the configurations from `start` to the first hit. The hit test
/// runs before deduplication so a path may legitimately end where it began.
fn bfs_path<Q: Clone + Ord, S: Clone + Ord>(
    rules: &Pds<Q, S>,
    start: PdsId<Q, S>,
    hit: impl Fn(&PdsId<Q, S>, usize) -> bool,
    opts: &McOptions,
) -> Option<Vec<PdsId<Q, S>>> {
    if hit(&start, 0) {
        return Some(vec![start]);
    }
    let trace = |c: &PdsId<Q, S>, parent: &BTreeMap<PdsId<Q, S>, PdsId<Q, S>>| {
        let mut path = vec![c.clone()];
        let mut cur = c;
        while let Some(p) = parent.get(cur) {
            path.push(p.clone());
            cur = p;
        }
        path.reverse();
        path
    };
    let mut parent: BTreeMap<PdsId<Q, S>, PdsId<Q, S>> = BTreeMap::new();
    let mut seen: BTreeSet<PdsId<Q, S>> = [start.clone()].into();
    let mut frontier = vec![start];
    let mut steps = 0usize;
    while !frontier.is_empty() && seen.len() < opts.witness_search_budget {
        steps += 1;
        let mut next = Vec::new();
        for c in frontier {
            for (_, succ) in pds_successors(rules, &c) {
                if succ.stack.len() > opts.witness_stack_bound {
                    continue;
                }
                if hit(&succ, steps) {
                    let mut path = trace(&c, &parent);
                    path.push(succ);
                    return Some(path);
                }
                if seen.insert(succ.clone()) {
                    parent.insert(succ.clone(), c.clone());
                    next.push(succ);
                }
            }
        }
        frontier = next;
    }
    None
}

fn strip<Q: Clone, S: Clone>(c: &PdsId<PQ<Q>, PS<S>>) -> PdsId<Q, S> {
    PdsId {
        state: c.state.0.clone(),
        stack: c.stack.iter().map(|(s, _)| s.clone()).collect(),
    }
}

/// Try to extract a concrete lasso witness for one of the repeating heads.
fn extract_witness<Q: Clone + Ord, S: Clone + Ord>(
    product: &BuchiPds<Q, S>,
    repheads: &BTreeSet<(PQ<Q>, PS<S>)>,
    ann: &mut Annotator<Q, S>,
    opts: &McOptions,
) -> Option<Lasso<Q, S>> {
    let stem_path = bfs_path(
        &product.pds,
        product.start.clone(),
        |c, _| {
            !c.stack.is_empty()
                && repheads.contains(&(c.state.clone(), c.stack[0].clone()))
        },
        opts,
    )?;
    let pivot = stem_path.last().unwrap().clone();
    let head_sym = pivot.stack[0].clone();
    let head_state = pivot.state.clone();
    // search the pump relative to the pivot's top cell; a flag on the
    // state records whether an accepting state has been seen so far
    let flagged: Pds<(PQ<Q>, bool), PS<S>> = Pds {
        rules: product
            .pds
            .rules
            .iter()
            .flat_map(|r| {
                [false, true].map(|f| PdsRule {
                    from: (r.from.clone(), f),
                    symbol: r.symbol.clone(),
                    to: (r.to.clone(), f || product.accepting.contains(&r.to)),
                    command: r.command.clone(),
                })
            })
            .collect(),
    };
    let acc0 = product.accepting.contains(&head_state);
    let rel_start = PdsId { state: (head_state.clone(), acc0), stack: vec![head_sym.clone()] };
    let cycle_path = bfs_path(
        &flagged,
        rel_start,
        |c, steps| {
            steps >= 1
                && c.state.0 == head_state
                && c.state.1
                && !c.stack.is_empty()
                && c.stack[0] == head_sym
        },
        opts,
    )?;
    // assemble: stem configs (all but pivot), cycle configs lifted onto the
    // pivot's lower stack
    let below = &pivot.stack[1..];
    let cycle: Vec<PdsId<PQ<Q>, PS<S>>> = cycle_path
        .iter()
        .map(|c| {
            let mut stack = c.stack.clone();
            stack.extend(below.iter().cloned());
            PdsId { state: c.state.0.clone(), stack }
        })
        .collect();
    let letter = |c: &PdsId<PQ<Q>, PS<S>>, ann: &mut Annotator<Q, S>| {
        let (sym, belo) = &c.stack[0];
        ann.label_head(&c.state.0, sym, *belo).ok()
    };
    let mut stem_letters = Vec::new();
    for c in &stem_path[..stem_path.len() - 1] {
        stem_letters.push(letter(c, ann)?);
    }
    let mut cycle_letters = Vec::new();
    for c in &cycle[..cycle.len() - 1] {
        cycle_letters.push(letter(c, ann)?);
    }
    Some(Lasso {
        stem: stem_path[..stem_path.len() - 1].iter().map(strip).collect(),
        cycle: cycle.iter().map(strip).collect(),
        stem_letters,
        cycle_letters,
    })
}

/// Does every infinite run of `m` from `c0` satisfy `f` under the
/// valuation `v`? The verdict is exact (up to resource budgets); the lasso
/// witness on violation is best-effort.
pub fn model_check_pds<Q, S>(
    m: &Pds<Q, S>,
    v: &ValuationSpec<Q, S>,
    f: &Formula,
    c0: &PdsId<Q, S>,
    opts: &McOptions,
) -> Result<McReport<Q, S>, PdsmcError>
where
    Q: Clone + Ord + std::hash::Hash,
    S: Clone + Ord,
{
    let started = Instant::now();
    if c0.stack.is_empty() {
        return Err(PdsmcError::EmptyStack);
    }
    // the valuation convention: every control state is initial in every
    // atom automaton, so atom truth never fails on the state component
    let mut states: BTreeSet<&Q> = m.states();
    states.insert(&c0.state);
    for (name, nfa) in &v.automata {
        if states.iter().any(|q| !nfa.initial.contains(q)) {
            return Err(PdsmcError::BadValuation { atom: name.clone() });
        }
    }
    let negated = Formula::not(f.clone());
    let buchi = to_buchi(&negated, &v.atoms)?;
    let mut ann = Annotator::new(v, opts.annotator_budget);
    let product = match build_product(m, &buchi, &mut ann, c0, opts) {
        Ok(p) => p,
        Err(e @ (PdsmcError::AnnotatorBudget { .. } | PdsmcError::ProductBudget { .. })) => {
            return Ok(McReport {
                verdict: Verdict::ResourceExceeded(e.to_string()),
                stats: McStats { wall: started.elapsed(), ..Default::default() },
            });
        }
        Err(e) => return Err(e),
    };
    let repheads = repeating_heads(&product);
    let mut stats = McStats {
        product_states: product.pds.states().len(),
        product_rules: product.pds.rules.len(),
        annotator_states: ann.state_count(),
        buchi_states: buchi.state_count,
        repeating_heads: repheads.len(),
        wall: Duration::default(),
    };
    let verdict = if repheads.is_empty() {
        Verdict::Holds
    } else {
        // is any repeating head reachable from the start?
        let mut symbols: BTreeSet<PS<S>> = product.start.stack.iter().cloned().collect();
        for r in &product.pds.rules {
            symbols.insert(r.symbol.clone());
            if let Command::Push(s) = &r.command {
                symbols.insert(s.clone());
            }
        }
        let mut targets = PAutomaton { edges: BTreeMap::new(), finals: [PaState::Aux(0)].into() };
        for (p, sym) in &repheads {
            targets
                .edges
                .entry((PaState::Ctrl(p.clone()), sym.clone()))
                .or_default()
                .insert(PaState::Aux(0), false);
        }
        for sym in &symbols {
            targets
                .edges
                .entry((PaState::Aux(0), sym.clone()))
                .or_default()
                .insert(PaState::Aux(0), false);
        }
        let reach = prestar(&product.pds, &BTreeSet::new(), &targets);
        if reach.accepts(&product.start) {
            Verdict::Violated(extract_witness(&product, &repheads, &mut ann, opts))
        } else {
            Verdict::Holds
        }
    };
    stats.wall = started.elapsed();
    Ok(McReport { verdict, stats })
}

/// Independently validate a lasso against the system, the valuation, and
/// the formula: every step must be a real transition, the loop must close
/// on the same head one period deeper without touching the stack below its
/// floor, the letters must match the valuation automata, and the word must
/// violate the formula.
pub fn check_lasso<Q, S>(
    m: &Pds<Q, S>,
    v: &ValuationSpec<Q, S>,
    f: &Formula,
    c0: &PdsId<Q, S>,
    lasso: &Lasso<Q, S>,
) -> Result<(), String>
where
    Q: Clone + Ord + std::hash::Hash + std::fmt::Debug,
    S: Clone + Ord + std::fmt::Debug,
{
    if lasso.cycle.len() < 2 {
        return Err("cycle must contain at least two configurations".into());
    }
    let entry = lasso.stem.first().unwrap_or(&lasso.cycle[0]);
    if entry != c0 {
        return Err(format!("lasso starts at {entry:?}, not at the checked configuration"));
    }
    let chain: Vec<&PdsId<Q, S>> = lasso.stem.iter().chain(&lasso.cycle).collect();
    for w in chain.windows(2) {
        let succs = pds_successors(m, w[0]);
        if !succs.iter().any(|(_, t)| t == w[1]) {
            return Err(format!("illegal step from {:?} to {:?}", w[0], w[1]));
        }
    }
    let first = &lasso.cycle[0];
    let last = lasso.cycle.last().unwrap();
    let floor = first.stack.len();
    for c in &lasso.cycle {
        if c.stack.len() < floor {
            return Err(format!("cycle dips below its floor at {c:?}"));
        }
    }
    if last.state != first.state || last.stack[0] != first.stack[0] {
        return Err("cycle does not return to its head".into());
    }
    if lasso.stem_letters.len() != lasso.stem.len()
        || lasso.cycle_letters.len() != lasso.cycle.len() - 1
    {
        return Err("letter sequences have the wrong lengths".into());
    }
    for (c, &l) in lasso.stem.iter().zip(&lasso.stem_letters) {
        if v.letter_of(c) != l {
            return Err(format!("stem letter mismatch at {c:?}"));
        }
    }
    for (c, &l) in lasso.cycle.iter().zip(&lasso.cycle_letters) {
        if v.letter_of(c) != l {
            return Err(format!("cycle letter mismatch at {c:?}"));
        }
    }
    // the second period must produce the same letters: replay each cycle
    // configuration with the grown tail below the floor
    let tail = &last.stack[1..];
    for (c, &l) in lasso.cycle.iter().zip(&lasso.cycle_letters) {
        let mut stack = c.stack[..c.stack.len() - (floor - 1)].to_vec();
        stack.extend(tail.iter().cloned());
        let lifted = PdsId { state: c.state.clone(), stack };
        if v.letter_of(&lifted) != l {
            return Err(format!("letters stop repeating at {lifted:?}"));
        }
    }
    match crate::ltl::eval_word(f, &v.atoms, &lasso.stem_letters, &lasso.cycle_letters) {
        Ok(false) => Ok(()),
        Ok(true) => Err("the lasso word satisfies the formula".into()),
        Err(e) => Err(format!("cannot evaluate the lasso word: {e}")),
    }
}
