//! Linear temporal logic: syntax, parsing, evaluation on ultimately
//! periodic words, and translation to Büchi automata.
//!
//! Formulas are built from `tt`, atoms, negation, conjunction, `X` and `U`;
//! the remaining connectives are derived. Words are infinite sequences of
//! letters, each letter a subset of a fixed finite atom set represented as a
//! bitset. [`eval_word`] decides satisfaction on a lasso `stem·cycle^ω`
//! directly from the semantic clauses; [`to_buchi`] builds an equivalent
//! Büchi automaton via a tableau construction followed by counter-based
//! degeneralization, and [`accepts_lasso`] decides automaton membership of a
//! lasso, which ties the two semantics together in tests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum LtlError {
    #[error("cycle of a lasso word must be nonempty")]
    EmptyCycle,
    #[error("unknown atom '{0}'")]
    UnknownAtom(String),
    #[error("at most 64 atoms are supported, got {0}")]
    TooManyAtoms(usize),
}

/// LTL syntax over named atoms. `Or`, `F` and `G` are derived forms; see
/// the constructor helpers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

#[allow(clippy::should_implement_trait)] // `not` is the natural constructor name
impl Formula {
    pub fn tt() -> Formula {
        Formula::True
    }

    pub fn ff() -> Formula {
        Formula::not(Formula::True)
    }

    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    /// ◇f, "eventually": `tt U f`.
    pub fn eventually(f: Formula) -> Formula {
        Formula::until(Formula::True, f)
    }

    /// □f, "always": `¬◇¬f`.
    pub fn always(f: Formula) -> Formula {
        Formula::not(Formula::eventually(Formula::not(f)))
    }

    /// The atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::True => {}
                Formula::Atom(a) => {
                    out.insert(a.as_str());
                }
                Formula::Not(x) | Formula::Next(x) => stack.push(x),
                Formula::And(a, b) | Formula::Until(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::True | Formula::Atom(_) => 4,
        Formula::Not(_) | Formula::Next(_) => 3,
        Formula::Until(..) => 2,
        Formula::And(..) => 1,
    }
}

fn fmt_prec(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min {
        write!(out, "(")?;
        fmt_prec(f, 0, out)?;
        return write!(out, ")");
    }
    match f {
        Formula::True => write!(out, "tt"),
        Formula::Atom(a) => write!(out, "{a}"),
        Formula::Not(x) => {
            write!(out, "!")?;
            fmt_prec(x, 3, out)
        }
        Formula::Next(x) => {
            write!(out, "X ")?;
            fmt_prec(x, 3, out)
        }
        Formula::Until(a, b) => {
            fmt_prec(a, 3, out)?;
            write!(out, " U ")?;
            fmt_prec(b, 2, out)
        }
        Formula::And(a, b) => {
            fmt_prec(a, 1, out)?;
            write!(out, " & ")?;
            fmt_prec(b, 1, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
#[error("LTL syntax error at byte {pos}: {msg}")]
pub struct LtlParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Tt,
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
    Next,
    Until,
    Finally,
    Globally,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LtlParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' | '&' | '|' | '(' | ')' => {
                let tok = match c {
                    '!' => Tok::Bang,
                    '&' => Tok::Amp,
                    '|' => Tok::Pipe,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                out.push((tok, i));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "tt" => Tok::Tt,
                    "X" => Tok::Next,
                    "U" => Tok::Until,
                    "F" => Tok::Finally,
                    "G" => Tok::Globally,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((tok, start));
            }
            _ => {
                return Err(LtlParseError { pos: i, msg: format!("unexpected character '{c}'") })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    at: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += t.is_some() as usize;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LtlParseError> {
        Err(LtlParseError { pos: self.pos(), msg: msg.into() })
    }

    // or ::= and ('|' and)*
    fn or_expr(&mut self) -> Result<Formula, LtlParseError> {
        let mut f = self.and_expr()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            f = Formula::or(f, self.and_expr()?);
        }
        Ok(f)
    }

    // and ::= until ('&' until)*
    fn and_expr(&mut self) -> Result<Formula, LtlParseError> {
        let mut f = self.until_expr()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            f = Formula::and(f, self.until_expr()?);
        }
        Ok(f)
    }

    // until ::= unary ('U' until)?   (right-associative)
    fn until_expr(&mut self) -> Result<Formula, LtlParseError> {
        let f = self.unary()?;
        if self.peek() == Some(&Tok::Until) {
            self.bump();
            return Ok(Formula::until(f, self.until_expr()?));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, LtlParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Next) => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Some(Tok::Finally) => {
                self.bump();
                Ok(Formula::eventually(self.unary()?))
            }
            Some(Tok::Globally) => {
                self.bump();
                Ok(Formula::always(self.unary()?))
            }
            Some(Tok::Tt) => {
                self.bump();
                Ok(Formula::True)
            }
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(name)) = self.bump() else { unreachable!() };
                Ok(Formula::Atom(name))
            }
            Some(Tok::LParen) => {
                self.bump();
                let f = self.or_expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(f)
            }
            _ => self.err("expected a formula"),
        }
    }
}

/// Parse the grammar `f ::= tt | IDENT | !f | f & f | f | f | X f | f U f |
/// F f | G f | (f)` with precedence `! X F G` > `U` (right-associative) >
/// `&` > `|`.
pub fn parse_ltl(text: &str) -> Result<Formula, LtlParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, at: 0, end: text.len() };
    let f = p.or_expr()?;
    if p.at != toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

/// The finite atom set a formula and valuation share, fixing the bit layout
/// of [`Letter`]s. Names are kept sorted, so the table is deterministic in
/// its contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomTable {
    names: Vec<String>,
}

impl AtomTable {
    pub fn new(names: impl IntoIterator<Item = String>) -> Result<AtomTable, LtlError> {
        let mut names: Vec<String> = names.into_iter().collect();
        names.sort();
        names.dedup();
        if names.len() > 64 {
            return Err(LtlError::TooManyAtoms(names.len()));
        }
        Ok(AtomTable { names })
    }

    pub fn from_formula(f: &Formula) -> Result<AtomTable, LtlError> {
        AtomTable::new(f.atoms().into_iter().map(str::to_string))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// The letter containing exactly the given atoms.
    pub fn letter<'a>(&self, set: impl IntoIterator<Item = &'a str>) -> Result<Letter, LtlError> {
        let mut l = Letter::empty();
        for name in set {
            match self.index(name) {
                Some(i) => l.insert(i),
                None => return Err(LtlError::UnknownAtom(name.to_string())),
            }
        }
        Ok(l)
    }
}

/// One position of a word: the set of atoms holding there, as a bitset laid
/// out by an [`AtomTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u64);

impl Letter {
    pub fn empty() -> Letter {
        Letter(0)
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.0 >> atom & 1 == 1
    }

    pub fn insert(&mut self, atom: usize) {
        self.0 |= 1 << atom;
    }
}

/// Satisfaction of `f` at position 0 of the infinite word `stem·cycle^ω`.
///
/// Satisfaction at any position depends only on the position normalized
/// into `stem` plus one cycle, so each subformula is evaluated as a finite
/// vector over those positions; `U` needs one wrapping scan on the cycle.
pub fn eval_word(
    f: &Formula,
    atoms: &AtomTable,
    stem: &[Letter],
    cycle: &[Letter],
) -> Result<bool, LtlError> {
    if cycle.is_empty() {
        return Err(LtlError::EmptyCycle);
    }
    let s = stem.len();
    let c = cycle.len();
    let n = s + c;
    let succ = |i: usize| if i + 1 < n { i + 1 } else { s };
    let letter = |i: usize| if i < s { stem[i] } else { cycle[i - s] };

    fn sat(
        f: &Formula,
        atoms: &AtomTable,
        n: usize,
        s: usize,
        c: usize,
        succ: &dyn Fn(usize) -> usize,
        letter: &dyn Fn(usize) -> Letter,
    ) -> Result<Vec<bool>, LtlError> {
        Ok(match f {
            Formula::True => vec![true; n],
            Formula::Atom(name) => {
                let bit = atoms.index(name).ok_or_else(|| LtlError::UnknownAtom(name.clone()))?;
                (0..n).map(|i| letter(i).contains(bit)).collect()
            }
            Formula::Not(x) => {
                let v = sat(x, atoms, n, s, c, succ, letter)?;
                v.into_iter().map(|b| !b).collect()
            }
            Formula::And(a, b) => {
                let va = sat(a, atoms, n, s, c, succ, letter)?;
                let vb = sat(b, atoms, n, s, c, succ, letter)?;
                va.into_iter().zip(vb).map(|(x, y)| x && y).collect()
            }
            Formula::Next(x) => {
                let v = sat(x, atoms, n, s, c, succ, letter)?;
                (0..n).map(|i| v[succ(i)]).collect()
            }
            Formula::Until(a, b) => {
                let va = sat(a, atoms, n, s, c, succ, letter)?;
                let vb = sat(b, atoms, n, s, c, succ, letter)?;
                let mut v = vec![false; n];
                // on the cycle, scan one full period ahead with wrap-around
                #[allow(clippy::needless_range_loop)]
                for i in s..n {
                    let mut pos = i;
                    for _ in 0..c {
                        if vb[pos] {
                            v[i] = true;
                            break;
                        }
                        if !va[pos] {
                            break;
                        }
                        pos = succ(pos);
                    }
                }
                // the stem unfolds backwards into the known cycle values
                for i in (0..s).rev() {
                    v[i] = vb[i] || (va[i] && v[i + 1]);
                }
                v
            }
        })
    }

    Ok(sat(f, atoms, n, s, c, &succ, &letter)?[0])
}

/// A transition fires on any letter that contains all `pos` bits and none
/// of the `neg` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterPred {
    pub pos: u64,
    pub neg: u64,
}

impl LetterPred {
    pub fn matches(&self, l: Letter) -> bool {
        l.0 & self.pos == self.pos && l.0 & self.neg == 0
    }
}

/// A (nondeterministic) Büchi automaton over letters of an [`AtomTable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    pub atom_count: usize,
    /// States are `0..state_count`.
    pub state_count: usize,
    pub initial: usize,
    pub transitions: Vec<(usize, LetterPred, usize)>,
    pub accepting: BTreeSet<usize>,
}

/// Interned negation-normal-form nodes; `Release` is the dual of `Until`
/// and exists only inside the translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Nnf {
    Tt,
    Ff,
    Pos(usize),
    Neg(usize),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Nnf>,
    index: BTreeMap<Nnf, usize>,
}

impl Arena {
    fn intern(&mut self, node: Nnf) -> usize {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node);
        self.index.insert(node, id);
        id
    }

    fn nnf(&mut self, f: &Formula, neg: bool, atoms: &AtomTable) -> Result<usize, LtlError> {
        let node = match (f, neg) {
            (Formula::True, false) => Nnf::Tt,
            (Formula::True, true) => Nnf::Ff,
            (Formula::Atom(a), _) => {
                let bit = atoms.index(a).ok_or_else(|| LtlError::UnknownAtom(a.clone()))?;
                if neg {
                    Nnf::Neg(bit)
                } else {
                    Nnf::Pos(bit)
                }
            }
            (Formula::Not(x), _) => return self.nnf(x, !neg, atoms),
            (Formula::And(a, b), false) => {
                let (a, b) = (self.nnf(a, false, atoms)?, self.nnf(b, false, atoms)?);
                Nnf::And(a, b)
            }
            (Formula::And(a, b), true) => {
                let (a, b) = (self.nnf(a, true, atoms)?, self.nnf(b, true, atoms)?);
                Nnf::Or(a, b)
            }
            (Formula::Next(x), _) => {
                let x = self.nnf(x, neg, atoms)?;
                Nnf::Next(x)
            }
            (Formula::Until(a, b), false) => {
                let (a, b) = (self.nnf(a, false, atoms)?, self.nnf(b, false, atoms)?);
                Nnf::Until(a, b)
            }
            (Formula::Until(a, b), true) => {
                let (a, b) = (self.nnf(a, true, atoms)?, self.nnf(b, true, atoms)?);
                Nnf::Release(a, b)
            }
        };
        Ok(self.intern(node))
    }
}

/// One tableau node under construction.
#[derive(Debug, Clone)]
struct Pending {
    incoming: BTreeSet<usize>,
    new: BTreeSet<usize>,
    old: BTreeSet<usize>,
    next: BTreeSet<usize>,
}

const INIT: usize = usize::MAX;

/// Translate a formula into a Büchi automaton accepting exactly the words
/// that satisfy it: tableau expansion into a cover of consistent node sets,
/// then degeneralization of the per-`Until` acceptance families with a
/// counter.
pub fn to_buchi(f: &Formula, atoms: &AtomTable) -> Result<BuchiAutomaton, LtlError> {
    let mut arena = Arena::default();
    let root = arena.nnf(f, false, atoms)?;

    // cover construction
    let mut nodes: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = Vec::new(); // (old, next)
    let mut incoming: Vec<BTreeSet<usize>> = Vec::new();
    let mut work = vec![Pending {
        incoming: [INIT].into(),
        new: [root].into(),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];
    while let Some(mut p) = work.pop() {
        let Some(eta) = p.new.pop_first() else {
            if let Some(i) =
                nodes.iter().position(|(old, next)| *old == p.old && *next == p.next)
            {
                incoming[i].extend(p.incoming);
            } else {
                let id = nodes.len();
                nodes.push((p.old, p.next.clone()));
                incoming.push(p.incoming);
                work.push(Pending {
                    incoming: [id].into(),
                    new: p.next,
                    old: BTreeSet::new(),
                    next: BTreeSet::new(),
                });
            }
            continue;
        };
        if p.old.contains(&eta) {
            work.push(p);
            continue;
        }
        match arena.nodes[eta] {
            Nnf::Ff => {} // inconsistent: drop the node
            Nnf::Tt => {
                p.old.insert(eta);
                work.push(p);
            }
            Nnf::Pos(a) => {
                let dual = arena.intern(Nnf::Neg(a));
                if !p.old.contains(&dual) {
                    p.old.insert(eta);
                    work.push(p);
                }
            }
            Nnf::Neg(a) => {
                let dual = arena.intern(Nnf::Pos(a));
                if !p.old.contains(&dual) {
                    p.old.insert(eta);
                    work.push(p);
                }
            }
            Nnf::And(a, b) => {
                p.old.insert(eta);
                p.new.extend([a, b]);
                work.push(p);
            }
            Nnf::Or(a, b) => {
                p.old.insert(eta);
                let mut q = p.clone();
                p.new.insert(a);
                q.new.insert(b);
                work.push(p);
                work.push(q);
            }
            Nnf::Next(a) => {
                p.old.insert(eta);
                p.next.insert(a);
                work.push(p);
            }
            Nnf::Until(a, b) => {
                p.old.insert(eta);
                let mut q = p.clone();
                p.new.insert(a);
                p.next.insert(eta);
                q.new.insert(b);
                work.push(p);
                work.push(q);
            }
            Nnf::Release(a, b) => {
                // a R b ≡ b ∧ (a ∨ X(a R b))
                p.old.insert(eta);
                let mut q = p.clone();
                p.new.extend([a, b]);
                q.new.insert(b);
                q.next.insert(eta);
                work.push(p);
                work.push(q);
            }
        }
    }

    // acceptance families: one per Until node that some state carries
    let mut untils: Vec<(usize, usize)> = Vec::new();
    for (old, _) in &nodes {
        for &id in old {
            if let Nnf::Until(_, b) = arena.nodes[id] {
                if !untils.iter().any(|&(u, _)| u == id) {
                    untils.push((id, b));
                }
            }
        }
    }
    untils.sort_unstable();
    let m = untils.len();
    let in_family = |q: usize, fam: usize| -> bool {
        let (u, b) = untils[fam];
        !nodes[q].0.contains(&u) || nodes[q].0.contains(&b)
    };

    // base transitions: entering node q requires q's literal constraints
    let iota = nodes.len();
    let mut base: Vec<(usize, LetterPred, usize)> = Vec::new();
    for (q, (old, _)) in nodes.iter().enumerate() {
        let mut pred = LetterPred { pos: 0, neg: 0 };
        for &id in old {
            match arena.nodes[id] {
                Nnf::Pos(a) => pred.pos |= 1 << a,
                Nnf::Neg(a) => pred.neg |= 1 << a,
                _ => {}
            }
        }
        for &r in &incoming[q] {
            let src = if r == INIT { iota } else { r };
            base.push((src, pred, q));
        }
    }

    // degeneralize: state (q, i) counts acceptance families satisfied in
    // order; reaching i = m marks a visit to every family
    let deg = |q: usize, i: usize| q * (m + 1) + i;
    let mut transitions = Vec::with_capacity(base.len() * (m + 1));
    for &(src, pred, tgt) in &base {
        for i in 0..=m {
            let mut j = if i == m { 0 } else { i };
            while j < m && in_family(tgt, j) {
                j += 1;
            }
            transitions.push((deg(src, i), pred, deg(tgt, j)));
        }
    }
    let accepting = (0..=iota).map(|q| deg(q, m)).collect();
    Ok(BuchiAutomaton {
        atom_count: atoms.len(),
        state_count: (iota + 1) * (m + 1),
        initial: deg(iota, 0),
        transitions,
        accepting,
    })
}

/// Does the automaton accept the infinite word `stem·cycle^ω`? Decided on
/// the finite product of automaton states with normalized word positions:
/// accepting iff some accepting product node lies on a reachable cycle.
pub fn accepts_lasso(b: &BuchiAutomaton, stem: &[Letter], cycle: &[Letter]) -> bool {
    if cycle.is_empty() {
        return false;
    }
    let s = stem.len();
    let n = s + cycle.len();
    let succ = |i: usize| if i + 1 < n { i + 1 } else { s };
    let letter = |i: usize| if i < s { stem[i] } else { cycle[i - s] };
    let mut by_src: BTreeMap<usize, Vec<(LetterPred, usize)>> = BTreeMap::new();
    for &(src, pred, tgt) in &b.transitions {
        by_src.entry(src).or_default().push((pred, tgt));
    }
    let step = |q: usize, i: usize| -> Vec<(usize, usize)> {
        let Some(outs) = by_src.get(&q) else { return Vec::new() };
        outs.iter()
            .filter(|(pred, _)| pred.matches(letter(i)))
            .map(|&(_, tgt)| (tgt, succ(i)))
            .collect()
    };
    // forward reachability from the initial product node
    let mut reach: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut work = vec![(b.initial, 0usize)];
    while let Some(v) = work.pop() {
        if !reach.insert(v) {
            continue;
        }
        work.extend(step(v.0, v.1));
    }
    // an accepting node must return to itself
    for &(q, i) in &reach {
        if !b.accepting.contains(&q) {
            continue;
        }
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut work = step(q, i);
        let mut found = false;
        while let Some(v) = work.pop() {
            if v == (q, i) {
                found = true;
                break;
            }
            if seen.insert(v) {
                work.extend(step(v.0, v.1));
            }
        }
        if found {
            return true;
        }
    }
    false
}
