//! Guard algebra for register machines.
//!
//! A guard over k registers is an equivalence relation on the symbol set
//! `{x_1..x_k, x'_1..x'_k, top}`: `x_i` denotes the current value of register
//! i, `x'_i` its value after the step, and `top` the data value in the
//! topmost stack cell. A step `(theta, d, theta')` satisfies a guard exactly
//! when two symbols are related iff they denote equal values, so each guard
//! fixes the complete equality pattern of a step.
//!
//! Besides the satisfaction predicates the module provides the induced guard
//! of a concrete step, composition of guards across adjacent stack cells
//! (plain and with the shared top value threaded through), the abstraction
//! `eqj` describing the registers right after a push, and enumeration of all
//! guards for small k.

use std::fmt;
use thiserror::Error;

/// Largest k for which guard enumeration is allowed unless a caller raises
/// the bound explicitly. The 2k+1 symbols yield Bell(2k+1) guards:
/// 5, 52, 877, 21147 for k = 1, 2, 3, 4.
pub const DEFAULT_K_BOUND: u32 = 3;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum EqrelError {
    #[error("arity mismatch: expected {expected} registers, got {got}")]
    ArityMismatch { expected: u32, got: u32 },
    #[error("register index {index} out of range 1..={k}")]
    RegIndexOutOfRange { index: u32, k: u32 },
    #[error("symbol {symbol} outside the symbol set for k={k}")]
    SymbolOutOfRange { symbol: String, k: u32 },
    #[error("blocks overlap on symbol {symbol}")]
    OverlappingBlocks { symbol: String },
    #[error("guards are not composable")]
    NotComposable,
    #[error("k={k} exceeds the enumeration bound {bound}")]
    KBoundExceeded { k: u32, bound: u32 },
    #[error("k must be at least 1")]
    ZeroK,
}

/// A value of the (infinite) data domain, modelled as a natural number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataValue(pub u64);

impl fmt::Display for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A register assignment: the values of registers 1..=k.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<DataValue>);

impl Assignment {
    pub fn new(values: Vec<DataValue>) -> Assignment {
        Assignment(values)
    }

    pub fn k(&self) -> u32 {
        self.0.len() as u32
    }

    /// Value of register `i` (1-based). Panics if `i` is out of range.
    pub fn get(&self, i: u32) -> DataValue {
        assert!(i >= 1 && i <= self.k(), "register index {i} out of range");
        self.0[(i - 1) as usize]
    }

    pub fn values(&self) -> &[DataValue] {
        &self.0
    }

    pub fn contains(&self, v: DataValue) -> bool {
        self.0.contains(&v)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A symbol of the guard alphabet for some arity k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// `x_i`, the current value of register i (1-based).
    Reg(u32),
    /// `x'_i`, the value of register i after the step (1-based).
    PrimedReg(u32),
    /// The data value in the topmost stack cell.
    Top,
}

impl Symbol {
    /// Position in the fixed symbol order `x_1 < .. < x_k < x'_1 < .. < x'_k < top`.
    fn index(self, k: u32) -> Option<usize> {
        match self {
            Symbol::Reg(i) if i >= 1 && i <= k => Some((i - 1) as usize),
            Symbol::PrimedReg(i) if i >= 1 && i <= k => Some((k + i - 1) as usize),
            Symbol::Top => Some(2 * k as usize),
            _ => None,
        }
    }

    fn from_index(idx: usize, k: u32) -> Symbol {
        let k = k as usize;
        if idx < k {
            Symbol::Reg(idx as u32 + 1)
        } else if idx < 2 * k {
            Symbol::PrimedReg((idx - k) as u32 + 1)
        } else {
            Symbol::Top
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Reg(i) => write!(f, "x{i}"),
            Symbol::PrimedReg(i) => write!(f, "x{i}'"),
            Symbol::Top => write!(f, "top"),
        }
    }
}

/// An equivalence relation on the 2k+1 guard symbols, in canonical form:
/// every symbol maps to the least symbol of its block, so structural
/// equality coincides with semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    k: u32,
    rep: Vec<u8>,
}

/// An equivalence relation on the k unprimed symbols `x_1..x_k` only, used
/// for acceptance conditions of register automata. Same canonical form as
/// [`Partition`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegPartition {
    k: u32,
    rep: Vec<u8>,
}

impl Partition {
    pub fn k(&self) -> u32 {
        self.k
    }

    fn n(&self) -> usize {
        2 * self.k as usize + 1
    }

    fn related_idx(&self, i: usize, j: usize) -> bool {
        self.rep[i] == self.rep[j]
    }

    /// Whether two symbols lie in the same block. Panics if a symbol is
    /// outside the symbol set for this arity.
    pub fn related(&self, a: Symbol, b: Symbol) -> bool {
        let i = a.index(self.k).expect("symbol within arity");
        let j = b.index(self.k).expect("symbol within arity");
        self.related_idx(i, j)
    }

    /// The blocks in canonical order (by least member), including singletons.
    pub fn blocks(&self) -> Vec<Vec<Symbol>> {
        let mut blocks: Vec<Vec<Symbol>> = Vec::new();
        let mut block_of = vec![usize::MAX; self.n()];
        for i in 0..self.n() {
            let r = self.rep[i] as usize;
            if r == i {
                block_of[i] = blocks.len();
                blocks.push(vec![Symbol::from_index(i, self.k)]);
            } else {
                blocks[block_of[r]].push(Symbol::from_index(i, self.k));
            }
        }
        blocks
    }

    /// Canonicalize from arbitrary per-symbol keys: symbols are related iff
    /// their keys are equal.
    fn from_keys<K: PartialEq>(k: u32, keys: &[K]) -> Partition {
        debug_assert_eq!(keys.len(), 2 * k as usize + 1);
        let rep = canonical_rep(keys);
        Partition { k, rep }
    }

    /// Canonicalize from a membership test. Returns `None` when the relation
    /// is not an equivalence relation (after reflexive-symmetric repair).
    fn from_relation(k: u32, rel: impl Fn(usize, usize) -> bool) -> Option<Partition> {
        let n = 2 * k as usize + 1;
        let r = |i: usize, j: usize| i == j || rel(i, j) || rel(j, i);
        let rep: Vec<u8> =
            (0..n).map(|i| (0..=i).find(|&j| r(i, j)).unwrap() as u8).collect();
        for i in 0..n {
            for j in 0..n {
                if r(i, j) != (rep[i] == rep[j]) {
                    return None;
                }
            }
        }
        Some(Partition { k, rep })
    }
}

impl RegPartition {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Whether registers `i` and `j` (1-based) lie in the same block.
    pub fn related(&self, i: u32, j: u32) -> bool {
        assert!(i >= 1 && i <= self.k && j >= 1 && j <= self.k);
        self.rep[(i - 1) as usize] == self.rep[(j - 1) as usize]
    }

    fn from_keys<K: PartialEq>(k: u32, keys: &[K]) -> RegPartition {
        debug_assert_eq!(keys.len(), k as usize);
        RegPartition { k, rep: canonical_rep(keys) }
    }
}

fn canonical_rep<K: PartialEq>(keys: &[K]) -> Vec<u8> {
    let mut rep = vec![0u8; keys.len()];
    for i in 0..keys.len() {
        rep[i] = (0..=i).find(|&j| keys[j] == keys[i]).unwrap() as u8;
    }
    rep
}

fn fmt_blocks<S: fmt::Display>(f: &mut fmt::Formatter<'_>, blocks: &[Vec<S>]) -> fmt::Result {
    for block in blocks {
        write!(f, "{{")?;
        for (i, s) in block.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")?;
    }
    Ok(())
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_blocks(f, &self.blocks())
    }
}

impl fmt::Display for RegPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        let mut block_of = vec![usize::MAX; self.k as usize];
        for i in 0..self.k as usize {
            let r = self.rep[i] as usize;
            if r == i {
                block_of[i] = blocks.len();
                blocks.push(vec![i as u32 + 1]);
            } else {
                blocks[block_of[r]].push(i as u32 + 1);
            }
        }
        let rendered: Vec<Vec<String>> = blocks
            .iter()
            .map(|b| b.iter().map(|i| format!("x{i}")).collect())
            .collect();
        fmt_blocks(f, &rendered)
    }
}

/// Build a guard from explicit blocks; symbols not listed form singletons.
pub fn make_partition(k: u32, blocks: &[Vec<Symbol>]) -> Result<Partition, EqrelError> {
    let n = 2 * k as usize + 1;
    let mut key: Vec<usize> = (0..n).map(|i| n + i).collect();
    for (b, block) in blocks.iter().enumerate() {
        for &s in block {
            let idx = s.index(k).ok_or(EqrelError::SymbolOutOfRange {
                symbol: s.to_string(),
                k,
            })?;
            if key[idx] < n {
                return Err(EqrelError::OverlappingBlocks { symbol: s.to_string() });
            }
            key[idx] = b;
        }
    }
    Ok(Partition::from_keys(k, &key))
}

/// Build a register-only partition from explicit blocks over `x_1..x_k`.
pub fn make_reg_partition(k: u32, blocks: &[Vec<u32>]) -> Result<RegPartition, EqrelError> {
    let n = k as usize;
    let mut key: Vec<usize> = (0..n).map(|i| n + i).collect();
    for (b, block) in blocks.iter().enumerate() {
        for &i in block {
            if i < 1 || i > k {
                return Err(EqrelError::RegIndexOutOfRange { index: i, k });
            }
            let idx = (i - 1) as usize;
            if key[idx] < n {
                return Err(EqrelError::OverlappingBlocks { symbol: format!("x{i}") });
            }
            key[idx] = b;
        }
    }
    Ok(RegPartition::from_keys(k, &key))
}

fn check_arity(k: u32, theta: &Assignment) -> Result<(), EqrelError> {
    if theta.k() != k {
        return Err(EqrelError::ArityMismatch { expected: k, got: theta.k() });
    }
    Ok(())
}

fn step_value(theta: &Assignment, d: DataValue, theta2: &Assignment, idx: usize) -> DataValue {
    let k = theta.k() as usize;
    if idx < k {
        theta.values()[idx]
    } else if idx < 2 * k {
        theta2.values()[idx - k]
    } else {
        d
    }
}

/// Does the step `(theta, d, theta2)` satisfy `phi`? True iff symbols are
/// related in `phi` exactly when they denote equal values.
pub fn models_triple(
    theta: &Assignment,
    d: DataValue,
    theta2: &Assignment,
    phi: &Partition,
) -> Result<bool, EqrelError> {
    check_arity(phi.k, theta)?;
    check_arity(phi.k, theta2)?;
    let n = phi.n();
    for i in 0..n {
        for j in i + 1..n {
            let equal = step_value(theta, d, theta2, i) == step_value(theta, d, theta2, j);
            if equal != phi.related_idx(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Does the assignment satisfy the register-only pattern? True iff registers
/// are related in `psi` exactly when they hold equal values.
pub fn models_reg(theta: &Assignment, psi: &RegPartition) -> Result<bool, EqrelError> {
    check_arity(psi.k, theta)?;
    for i in 1..=psi.k {
        for j in i + 1..=psi.k {
            let equal = theta.get(i) == theta.get(j);
            if equal != psi.related(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The unique guard satisfied by the step `(theta, d, theta2)`.
pub fn induced(
    theta: &Assignment,
    d: DataValue,
    theta2: &Assignment,
) -> Result<Partition, EqrelError> {
    let k = theta.k();
    check_arity(k, theta2)?;
    let n = 2 * k as usize + 1;
    let keys: Vec<DataValue> = (0..n).map(|i| step_value(theta, d, theta2, i)).collect();
    Ok(Partition::from_keys(k, &keys))
}

/// The pattern a guard imposes on the successor registers: `x_i` and `x_j`
/// are related in `lat(phi)` iff `x'_i` and `x'_j` are related in `phi`.
pub fn lat(phi: &Partition) -> RegPartition {
    let k = phi.k as usize;
    let keys: Vec<u8> = (0..k).map(|i| phi.rep[k + i]).collect();
    RegPartition::from_keys(phi.k, &keys)
}

/// Can `phi1` describe the step below a step described by `phi2`? Holds iff
/// the primed pattern of `phi1` equals the unprimed pattern of `phi2`.
/// Panics if the arities differ.
pub fn composable(phi1: &Partition, phi2: &Partition) -> bool {
    assert_eq!(phi1.k, phi2.k, "composability needs equal arity");
    let k = phi1.k as usize;
    for i in 0..k {
        for j in i + 1..k {
            if phi1.related_idx(k + i, k + j) != phi2.related_idx(i, j) {
                return false;
            }
        }
    }
    true
}

/// [`composable`] strengthened to steps sharing one top value: additionally
/// `x'_i ~ top` in `phi1` must coincide with `x_i ~ top` in `phi2`.
pub fn composable_top(phi1: &Partition, phi2: &Partition) -> bool {
    if !composable(phi1, phi2) {
        return false;
    }
    let k = phi1.k as usize;
    let top = 2 * k;
    (0..k).all(|i| phi1.related_idx(k + i, top) == phi2.related_idx(i, top))
}

fn compose_impl(
    phi1: &Partition,
    phi2: &Partition,
    thread_top: bool,
) -> Result<Partition, EqrelError> {
    if phi1.k != phi2.k {
        return Err(EqrelError::ArityMismatch { expected: phi1.k, got: phi2.k });
    }
    let ok = if thread_top { composable_top(phi1, phi2) } else { composable(phi1, phi2) };
    if !ok {
        return Err(EqrelError::NotComposable);
    }
    let k = phi1.k as usize;
    let top = 2 * k;
    let primed = |i: usize| i >= k && i < top;
    // a ranges over unprimed and top, pj over primed symbols
    let cross = |a: usize, pj: usize| -> bool {
        (0..k).any(|l| phi1.related_idx(a, k + l) && phi2.related_idx(l, pj))
            || (thread_top && phi1.related_idx(a, top) && phi2.related_idx(top, pj))
    };
    let rel = |i: usize, j: usize| -> bool {
        match (primed(i), primed(j)) {
            (false, false) => phi1.related_idx(i, j),
            (true, true) => phi2.related_idx(i, j),
            (false, true) => cross(i, j),
            (true, false) => cross(j, i),
        }
    };
    Ok(Partition::from_relation(phi1.k, rel)
        .expect("composition of composable guards is an equivalence relation"))
}

/// Compose guards of two adjacent steps with unrelated top values. The
/// unprimed pattern comes from `phi1`, the primed pattern from `phi2`, and
/// `x_i ~ x'_j` holds when some register chains the two steps.
/// Requires [`composable`]`(phi1, phi2)`.
pub fn compose(phi1: &Partition, phi2: &Partition) -> Result<Partition, EqrelError> {
    compose_impl(phi1, phi2, false)
}

/// Compose guards of two consecutive steps over the same stack cell: like
/// [`compose`], but the shared top value may also chain the steps.
/// Requires [`composable_top`]`(phi1, phi2)`.
pub fn compose_top(phi1: &Partition, phi2: &Partition) -> Result<Partition, EqrelError> {
    compose_impl(phi1, phi2, true)
}

/// The guard describing the registers right after `push j`, derived from the
/// guard `phi` of the pushing step: registers keep their values
/// (`x_i ~ x'_i`), their mutual pattern is the primed pattern of `phi`, and
/// the new top is the value of register j.
pub fn eqj(phi: &Partition, j: u32) -> Result<Partition, EqrelError> {
    let k = phi.k;
    if j < 1 || j > k {
        return Err(EqrelError::RegIndexOutOfRange { index: j, k });
    }
    let k = k as usize;
    let mut keys: Vec<u8> = Vec::with_capacity(2 * k + 1);
    for i in 0..k {
        keys.push(phi.rep[k + i]);
    }
    for i in 0..k {
        keys.push(phi.rep[k + i]);
    }
    keys.push(phi.rep[k + (j as usize - 1)]);
    Ok(Partition::from_keys(phi.k, &keys))
}

/// All guards for arity `k`, i.e. all partitions of the 2k+1 symbols,
/// guarded by [`DEFAULT_K_BOUND`].
pub fn enumerate_phi(k: u32) -> Result<Vec<Partition>, EqrelError> {
    enumerate_phi_bounded(k, DEFAULT_K_BOUND)
}

/// All guards for arity `k`, with a caller-chosen bound on k. The count is
/// Bell(2k+1), which grows fast; k=4 already yields 21147 guards.
pub fn enumerate_phi_bounded(k: u32, bound: u32) -> Result<Vec<Partition>, EqrelError> {
    if k == 0 {
        return Err(EqrelError::ZeroK);
    }
    if k > bound {
        return Err(EqrelError::KBoundExceeded { k, bound });
    }
    let n = 2 * k as usize + 1;
    let mut out = Vec::new();
    let mut rep = vec![0u8; n];
    fn rec(rep: &mut Vec<u8>, pos: usize, n: usize, k: u32, out: &mut Vec<Partition>) {
        if pos == n {
            out.push(Partition { k, rep: rep.clone() });
            return;
        }
        // attach to an existing block (identified by its least member)...
        for r in 0..pos {
            if rep[r] as usize == r {
                rep[pos] = r as u8;
                rec(rep, pos + 1, n, k, out);
            }
        }
        // ...or open a new one
        rep[pos] = pos as u8;
        rec(rep, pos + 1, n, k, out);
    }
    rec(&mut rep, 0, n, k, &mut out);
    Ok(out)
}

/// All register-only patterns for arity `k` (Bell(k) of them).
pub fn enumerate_reg(k: u32) -> Result<Vec<RegPartition>, EqrelError> {
    if k == 0 {
        return Err(EqrelError::ZeroK);
    }
    let n = k as usize;
    let mut out = Vec::new();
    let mut rep = vec![0u8; n];
    fn rec(rep: &mut Vec<u8>, pos: usize, n: usize, k: u32, out: &mut Vec<RegPartition>) {
        if pos == n {
            out.push(RegPartition { k, rep: rep.clone() });
            return;
        }
        for r in 0..pos {
            if rep[r] as usize == r {
                rep[pos] = r as u8;
                rec(rep, pos + 1, n, k, out);
            }
        }
        rep[pos] = pos as u8;
        rec(rep, pos + 1, n, k, out);
    }
    rec(&mut rep, 0, n, k, &mut out);
    Ok(out)
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
#[error("{msg} at byte {pos}")]
pub struct PartitionParseError {
    pub pos: usize,
    pub msg: String,
}

struct BlockLexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> BlockLexer<'a> {
    fn new(text: &'a str) -> Self {
        BlockLexer { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PartitionParseError> {
        Err(PartitionParseError { pos: self.pos, msg: msg.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), PartitionParseError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn symbol(&mut self) -> Result<(Symbol, usize), PartitionParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[self.pos..];
        let word: String = rest
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '\'')
            .collect();
        if word.is_empty() {
            return self.err("expected a symbol");
        }
        self.pos += word.len();
        if word == "top" {
            return Ok((Symbol::Top, start));
        }
        let (body, primed) = match word.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (word.as_str(), false),
        };
        let idx: u32 = body
            .strip_prefix('x')
            .and_then(|digits| digits.parse().ok())
            .ok_or(PartitionParseError {
                pos: start,
                msg: format!("unknown symbol '{word}' (expected xN, xN' or top)"),
            })?;
        Ok((if primed { Symbol::PrimedReg(idx) } else { Symbol::Reg(idx) }, start))
    }
}

fn parse_blocks(text: &str) -> Result<Vec<Vec<(Symbol, usize)>>, PartitionParseError> {
    let mut lx = BlockLexer::new(text);
    let mut blocks = Vec::new();
    while let Some(c) = lx.peek() {
        if c != '{' {
            return lx.err("expected '{'");
        }
        lx.expect('{')?;
        let mut block = Vec::new();
        if lx.peek() != Some('}') {
            loop {
                block.push(lx.symbol()?);
                match lx.peek() {
                    Some(',') => lx.expect(',')?,
                    Some('}') => break,
                    _ => return lx.err("expected ',' or '}'"),
                }
            }
        }
        lx.expect('}')?;
        blocks.push(block);
    }
    Ok(blocks)
}

/// Parse a guard from block syntax, e.g. `{x1,top}{x2,x2'}`. Symbols not
/// listed form singleton blocks; `{}` (or an empty string) is the discrete
/// guard relating nothing.
pub fn parse_partition(k: u32, text: &str) -> Result<Partition, PartitionParseError> {
    let blocks = parse_blocks(text)?;
    let mut seen: Vec<Symbol> = Vec::new();
    let mut clean: Vec<Vec<Symbol>> = Vec::new();
    for block in &blocks {
        for &(s, pos) in block {
            if s.index(k).is_none() {
                return Err(PartitionParseError {
                    pos,
                    msg: format!("symbol {s} outside the symbol set for k={k}"),
                });
            }
            if seen.contains(&s) {
                return Err(PartitionParseError { pos, msg: format!("symbol {s} listed twice") });
            }
            seen.push(s);
        }
        clean.push(block.iter().map(|&(s, _)| s).collect());
    }
    make_partition(k, &clean).map_err(|e| PartitionParseError { pos: 0, msg: e.to_string() })
}

/// Parse a register-only pattern from block syntax over `x1..xk`.
pub fn parse_reg_partition(k: u32, text: &str) -> Result<RegPartition, PartitionParseError> {
    let blocks = parse_blocks(text)?;
    let mut seen: Vec<Vec<u32>> = Vec::new();
    for block in &blocks {
        let mut ids = Vec::new();
        for &(s, pos) in block {
            let i = match s {
                Symbol::Reg(i) if i >= 1 && i <= k => i,
                _ => {
                    return Err(PartitionParseError {
                        pos,
                        msg: format!("expected a register x1..x{k}, got {s}"),
                    })
                }
            };
            if ids.contains(&i) || seen.iter().any(|b| b.contains(&i)) {
                return Err(PartitionParseError { pos, msg: format!("symbol {s} listed twice") });
            }
            ids.push(i);
        }
        seen.push(ids);
    }
    make_reg_partition(k, &seen).map_err(|e| PartitionParseError { pos: 0, msg: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: u32, s: &str) -> Partition {
        parse_partition(k, s).unwrap()
    }

    fn asg(vals: &[u64]) -> Assignment {
        Assignment::new(vals.iter().map(|&v| DataValue(v)).collect())
    }

    // The seven guards of the running two-register example.
    fn phi(i: usize) -> Partition {
        let texts = [
            "{x2,x2',top}",
            "{x1,top}{x2,x2'}",
            "{x2,x2'}{x1',top}",
            "{x1,x1'}{x2,top}",
            "{x1,x1'}{x2,x2'}",
            "{x1,x1',top}{x2,x2'}",
            "{x1,x1'}{x2,x2',top}",
        ];
        p(2, texts[i])
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for i in 0..7 {
            let g = phi(i);
            assert_eq!(parse_partition(2, &g.to_string()).unwrap(), g);
        }
        assert_eq!(p(2, "{}").to_string(), "{x1}{x2}{x1'}{x2'}{top}");
        assert_eq!(p(2, ""), p(2, "{}"));
        assert_eq!(p(2, "{ x1 , top } { x2 , x2' }"), phi(1));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(parse_partition(2, "{x3}").is_err());
        assert!(parse_partition(2, "{x1,x1}").is_err());
        assert!(parse_partition(2, "{x1}{x1,x2}").is_err());
        assert!(parse_partition(2, "{x1").is_err());
        assert!(parse_partition(2, "x1,x2").is_err());
        assert!(parse_reg_partition(2, "{x1,top}").is_err());
        let e = parse_partition(2, "{x1,frob}").unwrap_err();
        assert_eq!(e.pos, 4);
    }

    #[test]
    fn make_partition_validates() {
        assert!(make_partition(2, &[vec![Symbol::Reg(3)]]).is_err());
        assert!(make_partition(2, &[vec![Symbol::Reg(1)], vec![Symbol::Reg(1)]]).is_err());
        let g = make_partition(2, &[vec![Symbol::Reg(1), Symbol::Top]]).unwrap();
        assert_eq!(g.to_string(), "{x1,top}{x2}{x1'}{x2'}");
    }

    #[test]
    fn satisfaction_on_concrete_steps() {
        // (p0, [d1,d0], d0 on top) firing the initial push: registers become
        // [d2,d0] with d2 fresh.
        let theta = asg(&[1, 0]);
        let theta2 = asg(&[2, 0]);
        assert!(models_triple(&theta, DataValue(0), &theta2, &phi(0)).unwrap());
        assert!(!models_triple(&theta, DataValue(0), &theta2, &phi(1)).unwrap());
        assert!(!models_triple(&theta, DataValue(1), &theta2, &phi(0)).unwrap());
    }

    #[test]
    fn induced_matches_known_steps() {
        assert_eq!(induced(&asg(&[1, 0]), DataValue(0), &asg(&[2, 0])).unwrap(), phi(0));
        assert_eq!(induced(&asg(&[2, 0]), DataValue(2), &asg(&[2, 0])).unwrap(), phi(5));
        assert_eq!(induced(&asg(&[1, 0]), DataValue(0), &asg(&[1, 0])).unwrap(), phi(6));
        assert_eq!(induced(&asg(&[2, 0]), DataValue(2), &asg(&[4, 0])).unwrap(), phi(1));
    }

    #[test]
    fn induced_is_the_unique_satisfying_guard() {
        let all = enumerate_phi(2).unwrap();
        let triples = [
            (asg(&[0, 1]), DataValue(2), asg(&[3, 4])),
            (asg(&[0, 0]), DataValue(0), asg(&[0, 1])),
            (asg(&[0, 1]), DataValue(0), asg(&[1, 0])),
            (asg(&[5, 5]), DataValue(5), asg(&[5, 5])),
        ];
        for (theta, d, theta2) in &triples {
            let ind = induced(theta, *d, theta2).unwrap();
            let sat: Vec<&Partition> = all
                .iter()
                .filter(|g| models_triple(theta, *d, theta2, g).unwrap())
                .collect();
            assert_eq!(sat, vec![&ind]);
        }
    }

    #[test]
    fn lat_projects_primed_pattern() {
        let neq = parse_reg_partition(2, "{x1}{x2}").unwrap();
        let eq = parse_reg_partition(2, "{x1,x2}").unwrap();
        assert_eq!(lat(&phi(3)), neq);
        assert_eq!(lat(&phi(4)), neq);
        assert_eq!(lat(&p(2, "{x1',x2'}")), eq);
        assert!(models_reg(&asg(&[4, 5]), &neq).unwrap());
        assert!(!models_reg(&asg(&[4, 4]), &neq).unwrap());
    }

    #[test]
    fn composability_goldens() {
        assert!(composable(&phi(0), &phi(1)));
        assert!(!composable_top(&phi(0), &phi(1)));
        assert!(composable_top(&phi(0), &phi(3)));
        assert!(composable_top(&phi(1), &phi(2)));
        // Some guard is not composable with itself: unprimed and primed
        // patterns may differ.
        let all = enumerate_phi(2).unwrap();
        let witness = p(2, "{x1,x2}");
        assert!(!composable(&witness, &witness));
        assert!(all.iter().any(|g| !composable(g, g)));
    }

    #[test]
    fn compose_goldens() {
        assert_eq!(compose(&phi(1), &phi(1)).unwrap(), phi(1));
        // The identity guard composes to itself.
        assert_eq!(compose(&phi(4), &phi(4)).unwrap(), phi(4));
        assert_eq!(compose_top(&phi(5), &phi(1)).unwrap(), phi(1));
        assert_eq!(compose(&phi(0), &phi(1)).unwrap(), phi(0));
        assert_eq!(compose_top(&phi(0), &phi(1)).unwrap_err(), EqrelError::NotComposable);
    }

    #[test]
    fn compose_top_agrees_with_a_concrete_witness() {
        // Find any two-step witness for phi1 then phi2 over one top value and
        // check the composite is the induced guard of the end-to-end step.
        assert!(composable_top(&phi(1), &phi(2)));
        let dom: Vec<u64> = (0..6).collect();
        let mut found = false;
        'outer: for &a in &dom {
            for &b in &dom {
                for &d in &dom {
                    let theta1 = asg(&[a, b]);
                    for &c in &dom {
                        for &e in &dom {
                            let theta2 = asg(&[c, e]);
                            if !models_triple(&theta1, DataValue(d), &theta2, &phi(1)).unwrap() {
                                continue;
                            }
                            for &f in &dom {
                                for &g in &dom {
                                    let theta3 = asg(&[f, g]);
                                    if !models_triple(&theta2, DataValue(d), &theta3, &phi(2))
                                        .unwrap()
                                    {
                                        continue;
                                    }
                                    let comp = compose_top(&phi(1), &phi(2)).unwrap();
                                    assert_eq!(
                                        comp,
                                        induced(&theta1, DataValue(d), &theta3).unwrap()
                                    );
                                    found = true;
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(found, "no concrete witness for phi1 ; phi2 over 6 values");
    }

    #[test]
    fn eqj_goldens() {
        assert_eq!(eqj(&phi(1), 1).unwrap(), phi(5));
        assert_eq!(eqj(&phi(1), 2).unwrap(), phi(6));
        assert!(eqj(&phi(1), 3).is_err());
    }

    #[test]
    fn eqj_describes_the_post_push_step() {
        // Whenever (theta,d,theta') satisfies phi, the post-push step
        // (theta', theta'(j), theta') satisfies eqj(phi, j).
        let all = enumerate_phi(2).unwrap();
        let dom: Vec<u64> = (0..5).collect();
        let mut checked = 0;
        for &a in &dom {
            for &b in &dom {
                for &d in &dom {
                    for &c in &dom {
                        for &e in &dom {
                            let theta = asg(&[a, b]);
                            let theta2 = asg(&[c, e]);
                            let ind = induced(&theta, DataValue(d), &theta2).unwrap();
                            if !all.contains(&ind) {
                                continue;
                            }
                            for j in 1..=2 {
                                let g = eqj(&ind, j).unwrap();
                                assert!(models_triple(&theta2, theta2.get(j), &theta2, &g)
                                    .unwrap());
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn enumeration_counts_and_canonicity() {
        let one = enumerate_phi(1).unwrap();
        assert_eq!(one.len(), 5);
        let two = enumerate_phi(2).unwrap();
        assert_eq!(two.len(), 52);
        for g in &two {
            // canonical: every rep entry points at the least block member
            for i in 0..g.n() {
                let r = g.rep[i] as usize;
                assert!(r <= i && g.rep[r] as usize == r);
            }
        }
        let mut dedup = two.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 52);
        for i in 0..7 {
            assert!(two.contains(&phi(i)));
        }
        assert_eq!(enumerate_reg(2).unwrap().len(), 2);
        assert_eq!(enumerate_reg(3).unwrap().len(), 5);
        assert!(enumerate_phi(4).is_err());
        assert_eq!(enumerate_phi_bounded(4, 4).unwrap().len(), 21147);
    }

    #[test]
    fn composition_is_associative_when_defined_smoke() {
        let all = enumerate_phi(1).unwrap();
        for a in &all {
            for b in &all {
                for c in &all {
                    if composable(a, b) && composable(b, c) {
                        let left = compose(&compose(a, b).unwrap(), c).unwrap();
                        let right = compose(a, &compose(b, c).unwrap()).unwrap();
                        assert_eq!(left, right);
                    }
                    if composable_top(a, b) && composable_top(b, c) {
                        let ab = compose_top(a, b).unwrap();
                        let bc = compose_top(b, c).unwrap();
                        if composable_top(&ab, c) && composable_top(a, &bc) {
                            assert_eq!(
                                compose_top(&ab, c).unwrap(),
                                compose_top(a, &bc).unwrap()
                            );
                        }
                    }
                }
            }
        }
    }
}
