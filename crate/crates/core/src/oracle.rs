//! Explicit-state model checking over the canonical concrete semantics.
//!
//! For instances whose canonical reachable configuration space is finite,
//! the LTL question can be decided directly: breadth-first exploration
//! builds a finite Kripke graph whose nodes are exact configurations,
//! labeled by running the valuation acceptors on each node, and the
//! verdict comes from a Büchi product with the negated formula on that
//! graph. This is deliberately independent of the reduction pipeline — no
//! guard composition, no annotation, no saturation — so agreement between
//! the two answers is meaningful cross-validation. Instances that exceed
//! the node or stack bounds are refused rather than approximated.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::ltl::{eval_word, to_buchi, AtomTable, Formula, Letter, LtlError};
use crate::machines::{is_proper, ra_accepts, rpds_successors, MachineError, Ra, Rpds, RpdsId};

pub const DEFAULT_MAX_NODES: usize = 100_000;
pub const DEFAULT_MAX_STACK: usize = 32;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum OracleError {
    #[error("start configuration has an empty stack")]
    EmptyStack,
    #[error("start configuration is not proper")]
    ImproperStart,
    #[error("exploration exceeded the node budget of {max}")]
    NodeBudget { max: usize },
    #[error("exploration exceeded the stack depth budget of {max}")]
    StackBudget { max: usize },
    #[error("the queried configuration is not a node of the graph")]
    NotInGraph,
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Ltl(#[from] LtlError),
}

/// The finite transition graph of one instance: exact configurations,
/// canonical successor edges, and per-node valuation letters. Closed under
/// successors — exploration refuses instances that do not fit the bounds.
#[derive(Debug, Clone)]
pub struct KripkeGraph {
    atoms: AtomTable,
    state_names: Vec<String>,
    nodes: Vec<RpdsId>,
    index: BTreeMap<RpdsId, usize>,
    edges: Vec<Vec<usize>>,
    labels: Vec<Letter>,
}

impl KripkeGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn nodes(&self) -> &[RpdsId] {
        &self.nodes
    }

    pub fn node_of(&self, id: &RpdsId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn edges(&self, node: usize) -> &[usize] {
        &self.edges[node]
    }

    pub fn label(&self, node: usize) -> Letter {
        self.labels[node]
    }

    /// Nodes without successors; runs ending here are finite and carry no
    /// LTL obligations, but they are worth surfacing as diagnostics.
    pub fn deadlocks(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.edges[i].is_empty()).collect()
    }

    /// Line-oriented debugging dump: node id, configuration, letter,
    /// successor ids.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, id) in self.nodes.iter().enumerate() {
            let mut atoms: Vec<&str> = Vec::new();
            for (a, name) in self.atoms.names().iter().enumerate() {
                if self.labels[i].contains(a) {
                    atoms.push(name);
                }
            }
            let state = self.state_names.get(id.state.0).map_or("?", |s| s.as_str());
            let _ = write!(out, "node {i}: {state} {} [", id.theta);
            for (j, cell) in id.stack.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{}/{}", cell.value.0, cell.saved);
            }
            let _ = write!(out, "] {{{}}} ->", atoms.join(","));
            for s in &self.edges[i] {
                let _ = write!(out, " {s}");
            }
            out.push('\n');
        }
        out
    }
}

/// Explore the canonical configuration space from `c0`, labeling each node
/// with the valuation acceptors. Errors out (rather than truncating) when
/// a successor would exceed `max_stack` cells or the graph would exceed
/// `max_nodes` nodes.
pub fn explore(
    m: &Rpds,
    valuation: &BTreeMap<String, Ra>,
    c0: &RpdsId,
    max_nodes: usize,
    max_stack: usize,
) -> Result<KripkeGraph, OracleError> {
    if c0.stack.is_empty() {
        return Err(OracleError::EmptyStack);
    }
    if !is_proper(c0) {
        return Err(OracleError::ImproperStart);
    }
    if c0.stack.len() > max_stack {
        return Err(OracleError::StackBudget { max: max_stack });
    }
    let atoms = AtomTable::new(valuation.keys().cloned())?;
    let mut nodes: Vec<RpdsId> = vec![c0.clone()];
    let mut index: BTreeMap<RpdsId, usize> = [(c0.clone(), 0)].into();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut at = 0;
    while at < nodes.len() {
        let cur = nodes[at].clone();
        let mut out: Vec<usize> = Vec::new();
        for (_, succ) in rpds_successors(m, &cur)? {
            if succ.stack.len() > max_stack {
                return Err(OracleError::StackBudget { max: max_stack });
            }
            let target = match index.get(&succ) {
                Some(&t) => t,
                None => {
                    if nodes.len() >= max_nodes {
                        return Err(OracleError::NodeBudget { max: max_nodes });
                    }
                    nodes.push(succ.clone());
                    index.insert(succ, nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            if !out.contains(&target) {
                out.push(target);
            }
        }
        edges.push(out);
        at += 1;
    }
    let mut labels = Vec::with_capacity(nodes.len());
    for id in &nodes {
        let mut letter = Letter::empty();
        for (a, name) in atoms.names().iter().enumerate() {
            if ra_accepts(&valuation[name], id)? {
                letter.insert(a);
            }
        }
        labels.push(letter);
    }
    Ok(KripkeGraph { atoms, state_names: m.states().to_vec(), nodes, index, edges, labels })
}

/// A violating run of the finite graph: concrete configurations for the
/// stem and the cycle (the cycle's last node has an edge back to its
/// first), plus their letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLasso {
    pub stem: Vec<RpdsId>,
    pub cycle: Vec<RpdsId>,
    pub stem_letters: Vec<Letter>,
    pub cycle_letters: Vec<Letter>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Holds,
    Violated(OracleLasso),
}

/// Tarjan's strongly-connected components, iteratively; returns the
/// component index of every node.
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

fn bfs_route(adj: &[Vec<usize>], from: usize, to: usize, skip_trivial: bool) -> Option<Vec<usize>> {
    // shortest node sequence from..=to; with `skip_trivial`, at least one edge
    if from == to && !skip_trivial {
        return Some(vec![from]);
    }
    let mut parent = vec![usize::MAX; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut frontier = vec![from];
    seen[from] = true;
    loop {
        let mut next = Vec::new();
        for v in frontier.drain(..) {
            for &w in &adj[v] {
                if w == to {
                    let mut path = vec![to, v];
                    let mut cur = v;
                    while cur != from {
                        cur = parent[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        frontier = next;
    }
}

/// Does every infinite path of `g` from `c0` satisfy `f`? Exact on the
/// finite graph: the product with a Büchi automaton for ¬f has an
/// accepting reachable cycle iff some path violates `f`. Paths that end
/// in a deadlock are finite and impose nothing.
pub fn check_finite(
    g: &KripkeGraph,
    f: &Formula,
    c0: &RpdsId,
) -> Result<OracleOutcome, OracleError> {
    let start_node = g.node_of(c0).ok_or(OracleError::NotInGraph)?;
    let buchi = to_buchi(&Formula::not(f.clone()), &g.atoms)?;
    let nb = buchi.state_count;
    let pid = |node: usize, b: usize| node * nb + b;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.len() * nb];
    for node in 0..g.len() {
        let letter = g.label(node);
        for &(b, pred, b2) in &buchi.transitions {
            if !pred.matches(letter) {
                continue;
            }
            for &succ in g.edges(node) {
                adj[pid(node, b)].push(pid(succ, b2));
            }
        }
    }
    let start = pid(start_node, buchi.initial);
    // reachable product nodes, in BFS order for determinism
    let mut seen = vec![false; adj.len()];
    let mut order = vec![start];
    seen[start] = true;
    let mut at = 0;
    while at < order.len() {
        let v = order[at];
        at += 1;
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
    }
    let comp = sccs(adj.len(), &adj);
    // a node lies on a cycle iff it has an edge into its own component:
    // singleton components need a self-loop, and in a larger component
    // every internal path's first edge stays internal by maximality
    let mut cyclic = vec![false; adj.len()];
    for v in 0..adj.len() {
        for &w in &adj[v] {
            if comp[v] == comp[w] {
                cyclic[v] = true;
            }
        }
    }
    let target =
        order.iter().copied().find(|&v| buchi.accepting.contains(&(v % nb)) && cyclic[v]);
    let Some(target) = target else {
        return Ok(OracleOutcome::Holds);
    };
    let stem_path = bfs_route(&adj, start, target, false).expect("target is reachable");
    let cycle_path = bfs_route(&adj, target, target, true).expect("target lies on a cycle");
    let node_of = |v: usize| v / nb;
    let stem: Vec<usize> = stem_path[..stem_path.len() - 1].iter().map(|&v| node_of(v)).collect();
    let cycle: Vec<usize> = cycle_path[..cycle_path.len() - 1].iter().map(|&v| node_of(v)).collect();
    let lasso = OracleLasso {
        stem: stem.iter().map(|&n| g.nodes[n].clone()).collect(),
        cycle: cycle.iter().map(|&n| g.nodes[n].clone()).collect(),
        stem_letters: stem.iter().map(|&n| g.label(n)).collect(),
        cycle_letters: cycle.iter().map(|&n| g.label(n)).collect(),
    };
    debug_assert_eq!(
        eval_word(f, &g.atoms, &lasso.stem_letters, &lasso.cycle_letters),
        Ok(false),
        "extracted lasso must violate the formula"
    );
    Ok(OracleOutcome::Violated(lasso))
}
