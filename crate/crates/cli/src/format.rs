//! Line-oriented text formats for systems, acceptors, and configurations,
//! with positioned diagnostics.
//!
//! Data values in files are symbolic names (`d0`, `d1`, ...); each distinct
//! name is mapped to a distinct natural in order of first appearance, which
//! is harmless because every operation on configurations is invariant under
//! injective renaming of values.

use std::collections::{BTreeMap, BTreeSet};

use rpmc::eqrel::{parse_partition, parse_reg_partition, Assignment, DataValue, RegPartition};
use rpmc::ltl::{AtomTable, Letter};
use rpmc::machines::{Command, Ra, Rpds, RpdsId, RpdsRule, StackCell, StateId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { line, msg: msg.into() })
}

/// Content lines with their 1-based line numbers; `#` starts a comment.
fn logical_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            None
        } else {
            Some((i + 1, body))
        }
    })
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim_start()),
        None => (s, ""),
    }
}

fn parse_k(line: usize, body: &str) -> Result<u32, FormatError> {
    let Some(rest) = body.strip_prefix('k') else {
        return err(line, "expected `k=<n>`");
    };
    let Some(num) = rest.trim_start().strip_prefix('=') else {
        return err(line, "expected `=` after `k`");
    };
    match num.trim().parse::<u32>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => err(line, format!("invalid register count '{}'", num.trim())),
    }
}

fn parse_names(line: usize, rest: &str, what: &str) -> Result<Vec<String>, FormatError> {
    let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
    if names.is_empty() {
        return err(line, format!("`{what}` needs at least one name"));
    }
    let mut seen = BTreeSet::new();
    for n in &names {
        if !seen.insert(n) {
            return err(line, format!("{what} name '{n}' listed twice"));
        }
    }
    Ok(names)
}

fn state_ref(line: usize, states: &[String], name: &str) -> Result<StateId, FormatError> {
    match states.iter().position(|s| s == name) {
        Some(i) => Ok(StateId(i)),
        None => err(line, format!("unknown state '{name}'")),
    }
}

/// Parse one `rule <from> <guard> -> <to> [command]` body (after the `rule`
/// keyword). `pop_only` switches to acceptor syntax, where the command is
/// omitted and pops are implicit.
fn parse_rule(
    line: usize,
    k: u32,
    states: &[String],
    body: &str,
    pop_only: bool,
) -> Result<RpdsRule, FormatError> {
    let (from_name, rest) = split_word(body);
    if from_name.is_empty() {
        return err(line, "expected a source state after `rule`");
    }
    let from = state_ref(line, states, from_name)?;
    let Some((guard_text, after)) = rest.split_once("->") else {
        return err(line, "expected `->` between the guard and the target state");
    };
    let guard = parse_partition(k, guard_text.trim())
        .map_err(|e| FormatError { line, msg: format!("bad guard: {e}") })?;
    let (to_name, cmd_text) = split_word(after);
    if to_name.is_empty() {
        return err(line, "expected a target state after `->`");
    }
    let to = state_ref(line, states, to_name)?;
    let command = match (pop_only, split_word(cmd_text)) {
        (true, ("", _)) | (true, ("pop", "")) => Command::Pop,
        (true, (word, _)) => {
            return err(line, format!("acceptor rules are pop-only; remove `{word}`"))
        }
        (false, ("pop", "")) => Command::Pop,
        (false, ("skip", "")) => Command::Skip,
        (false, ("push", arg)) => match arg.parse::<u32>() {
            Ok(j) if (1..=k).contains(&j) => Command::Push(j),
            _ => return err(line, format!("`push` needs a register index in 1..={k}")),
        },
        (false, ("", _)) => return err(line, "missing command (pop, skip, or push <j>)"),
        (false, (word, _)) => return err(line, format!("unknown command '{word}'")),
    };
    Ok(RpdsRule { from, guard, to, command })
}

/// Parse a register pushdown system:
///
/// ```text
/// k=2
/// states p0 p1 p2
/// rule p0 {x2,x2',top} -> p1 push 1
/// ```
pub fn parse_rpds(text: &str) -> Result<Rpds, FormatError> {
    let mut k: Option<u32> = None;
    let mut states: Option<Vec<String>> = None;
    let mut rules: Vec<RpdsRule> = Vec::new();
    for (line, body) in logical_lines(text) {
        let (head, rest) = split_word(body);
        match head {
            _ if head.starts_with('k') && body.contains('=') => {
                if k.replace(parse_k(line, body)?).is_some() {
                    return err(line, "duplicate `k=` line");
                }
            }
            "states" => {
                if states.replace(parse_names(line, rest, "state")?).is_some() {
                    return err(line, "duplicate `states` line");
                }
            }
            "rule" => {
                let (Some(k), Some(states)) = (k, &states) else {
                    return err(line, "`rule` must come after `k=` and `states`");
                };
                rules.push(parse_rule(line, k, states, rest, false)?);
            }
            other => return err(line, format!("unknown directive '{other}'")),
        }
    }
    let Some(k) = k else { return err(0, "missing `k=<n>` line") };
    let Some(states) = states else { return err(0, "missing `states` line") };
    Rpds::new(k, states, rules).map_err(|e| FormatError { line: 0, msg: e.to_string() })
}

/// A parsed acceptor file, before its states are aligned with a system's.
#[derive(Debug, Clone)]
pub struct RaDoc {
    pub k: u32,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub accept: Vec<(String, RegPartition)>,
    pub rules: Vec<(String, rpmc::eqrel::Partition, String)>,
}

impl RaDoc {
    fn build(&self, order: Vec<String>) -> Result<Ra, FormatError> {
        let resolve = |name: &str| StateId(order.iter().position(|s| s == name).unwrap());
        let rules = self
            .rules
            .iter()
            .map(|(from, guard, to)| RpdsRule {
                from: resolve(from),
                guard: guard.clone(),
                to: resolve(to),
                command: Command::Pop,
            })
            .collect();
        let base = Rpds::new(self.k, order.clone(), rules)
            .map_err(|e| FormatError { line: 0, msg: e.to_string() })?;
        let initial = self.initial.iter().map(|n| resolve(n)).collect();
        let accept = self.accept.iter().map(|(n, psi)| (resolve(n), psi.clone())).collect();
        Ra::new(base, initial, accept).map_err(|e| FormatError { line: 0, msg: e.to_string() })
    }

    /// The acceptor with states in file order.
    pub fn into_ra(self) -> Result<Ra, FormatError> {
        let order = self.states.clone();
        self.build(order)
    }

    /// The acceptor with states renumbered so that the system's states come
    /// first, in system order — the layout the valuation convention needs.
    /// Requires the initial states to be exactly the system's states.
    pub fn bind(self, system: &Rpds) -> Result<Ra, FormatError> {
        if self.k != system.k() {
            return err(
                0,
                format!("acceptor has k={} but the system has k={}", self.k, system.k()),
            );
        }
        let initial: BTreeSet<&String> = self.initial.iter().collect();
        let system_states: BTreeSet<&String> = system.states().iter().collect();
        if initial != system_states {
            return err(
                0,
                format!(
                    "a valuation acceptor must have exactly the system's states \
                     {:?} as its initial states, found {:?}",
                    system.states(),
                    self.initial
                ),
            );
        }
        let mut order: Vec<String> = system.states().to_vec();
        for s in &self.states {
            if !order.contains(s) {
                order.push(s.clone());
            }
        }
        self.build(order)
    }
}

/// Parse a register automaton (pop-only acceptor):
///
/// ```text
/// k=2
/// states p1 q1 q2
/// initial p1
/// accept q2 {x1}{x2}
/// rule p1 {x1,top}{x2,x2'} -> q1
/// ```
pub fn parse_ra(text: &str) -> Result<RaDoc, FormatError> {
    let mut k: Option<u32> = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<Vec<String>> = None;
    let mut accept: Vec<(String, RegPartition)> = Vec::new();
    let mut rules: Vec<(usize, String, rpmc::eqrel::Partition, String)> = Vec::new();
    for (line, body) in logical_lines(text) {
        let (head, rest) = split_word(body);
        match head {
            _ if head.starts_with('k') && body.contains('=') => {
                if k.replace(parse_k(line, body)?).is_some() {
                    return err(line, "duplicate `k=` line");
                }
            }
            "states" => {
                if states.replace(parse_names(line, rest, "state")?).is_some() {
                    return err(line, "duplicate `states` line");
                }
            }
            "initial" => {
                if initial.replace(parse_names(line, rest, "initial state")?).is_some() {
                    return err(line, "duplicate `initial` line");
                }
            }
            "accept" => {
                let (Some(k), Some(states)) = (k, &states) else {
                    return err(line, "`accept` must come after `k=` and `states`");
                };
                let (name, pattern) = split_word(rest);
                state_ref(line, states, name)?;
                let psi = parse_reg_partition(k, pattern)
                    .map_err(|e| FormatError { line, msg: format!("bad pattern: {e}") })?;
                accept.push((name.to_string(), psi));
            }
            "rule" => {
                let (Some(k), Some(states)) = (k, &states) else {
                    return err(line, "`rule` must come after `k=` and `states`");
                };
                let r = parse_rule(line, k, states, rest, true)?;
                rules.push((
                    line,
                    states[r.from.0].clone(),
                    r.guard,
                    states[r.to.0].clone(),
                ));
            }
            other => return err(line, format!("unknown directive '{other}'")),
        }
    }
    let Some(k) = k else { return err(0, "missing `k=<n>` line") };
    let Some(states) = states else { return err(0, "missing `states` line") };
    let Some(initial) = initial else { return err(0, "missing `initial` line") };
    for name in &initial {
        if !states.contains(name) {
            return err(0, format!("initial state '{name}' is not declared"));
        }
    }
    Ok(RaDoc {
        k,
        states,
        initial,
        accept,
        rules: rules.into_iter().map(|(_, f, g, t)| (f, g, t)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Open(char),
    Close(char),
    Comma,
}

fn lex_id(text: &str) -> Result<Vec<(usize, Tok)>, FormatError> {
    let mut out = Vec::new();
    for (line, body) in logical_lines(text) {
        let mut chars = body.char_indices().peekable();
        while let Some(&(i, c)) = chars.peek() {
            match c {
                c if c.is_whitespace() => {
                    chars.next();
                }
                '[' | '(' => {
                    out.push((line, Tok::Open(c)));
                    chars.next();
                }
                ']' | ')' => {
                    out.push((line, Tok::Close(c)));
                    chars.next();
                }
                ',' => {
                    out.push((line, Tok::Comma));
                    chars.next();
                }
                c if c.is_ascii_alphanumeric() || c == '_' => {
                    let start = i;
                    let mut end = i;
                    while let Some(&(j, c)) = chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            end = j + c.len_utf8();
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push((line, Tok::Ident(body[start..end].to_string())));
                }
                other => return err(line, format!("unexpected character '{other}'")),
            }
        }
    }
    Ok(out)
}

struct IdParser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    names: BTreeMap<String, u64>,
}

impl IdParser<'_> {
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(0, |(l, _)| *l)
    }

    fn next(&mut self, what: &str) -> Result<&Tok, FormatError> {
        match self.toks.get(self.pos) {
            Some((_, t)) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(FormatError {
                line: self.line(),
                msg: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormatError> {
        let line = self.line();
        if self.next(what)? == &tok {
            Ok(())
        } else {
            err(line, format!("expected {what}"))
        }
    }

    fn value(&mut self) -> Result<DataValue, FormatError> {
        let line = self.line();
        let name = match self.next("a data value name")? {
            Tok::Ident(name) => name.clone(),
            _ => return err(line, "expected a data value name"),
        };
        let next = self.names.len() as u64;
        Ok(DataValue(*self.names.entry(name).or_insert(next)))
    }

    /// `[ d0, d1, ... ]`
    fn assignment(&mut self, k: u32) -> Result<Assignment, FormatError> {
        let line = self.line();
        self.expect(Tok::Open('['), "'['")?;
        let mut vals = Vec::new();
        if self.toks.get(self.pos).map(|(_, t)| t) != Some(&Tok::Close(']')) {
            loop {
                vals.push(self.value()?);
                match self.next("',' or ']'")? {
                    Tok::Comma => continue,
                    Tok::Close(']') => break,
                    _ => return err(self.line(), "expected ',' or ']'"),
                }
            }
        } else {
            self.pos += 1;
        }
        if vals.len() != k as usize {
            return err(line, format!("assignment has {} entries, expected k={k}", vals.len()));
        }
        Ok(Assignment::new(vals))
    }
}

/// Parse a configuration: `<state> [<registers>] ( <value>,[<saved>] )*`,
/// stack cells written top first.
pub fn parse_id(text: &str, system: &Rpds) -> Result<RpdsId, FormatError> {
    let toks = lex_id(text)?;
    let mut p = IdParser { toks: &toks, pos: 0, names: BTreeMap::new() };
    let line = p.line();
    let state = match p.next("a state name")? {
        Tok::Ident(name) => state_ref(line, system.states(), name)?,
        _ => return err(line, "expected a state name"),
    };
    let theta = p.assignment(system.k())?;
    let mut stack = Vec::new();
    while p.pos < toks.len() {
        p.expect(Tok::Open('('), "'('")?;
        let value = p.value()?;
        p.expect(Tok::Comma, "','")?;
        let saved = p.assignment(system.k())?;
        p.expect(Tok::Close(')'), "')'")?;
        stack.push(StackCell { value, saved });
    }
    Ok(RpdsId { state, theta, stack })
}

fn render_value(v: DataValue) -> String {
    format!("d{}", v.0)
}

fn render_assignment(a: &Assignment) -> String {
    let names: Vec<String> = a.values().iter().map(|&v| render_value(v)).collect();
    format!("[{}]", names.join(","))
}

/// Render a configuration in the `.id` syntax, naming each value `d<n>`.
pub fn render_id(id: &RpdsId, system: &Rpds) -> String {
    let mut out = format!(
        "{} {}",
        system.states().get(id.state.0).map_or("?", |s| s.as_str()),
        render_assignment(&id.theta),
    );
    for cell in &id.stack {
        out.push_str(&format!(
            " ( {},{} )",
            render_value(cell.value),
            render_assignment(&cell.saved)
        ));
    }
    out
}

/// The atoms of one letter, by name.
pub fn letter_atoms(letter: Letter, atoms: &AtomTable) -> Vec<String> {
    atoms
        .names()
        .iter()
        .enumerate()
        .filter(|&(i, _)| letter.contains(i))
        .map(|(_, n)| n.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rpmc::machines::ra_accepts;

    const SYSTEM: &str = "
# the running example
k=2
states p0 p1 p2
rule p0 {x2,x2',top} -> p1 push 1
rule p1 {x1,top}{x2,x2'} -> p1 push 1
rule p1 {x1,top}{x2,x2'} -> p1 pop
rule p1 {x2,x2'}{x1',top} -> p1 pop
rule p1 {x1,x1'}{x2,top} -> p2 push 2
";

    #[test]
    fn parses_a_system_and_reports_positions() {
        let m = parse_rpds(SYSTEM).unwrap();
        assert_eq!(m.k(), 2);
        assert_eq!(m.states(), ["p0", "p1", "p2"]);
        assert_eq!(m.rules().len(), 5);
        assert_eq!(m.rules()[0].command, Command::Push(1));

        let bad = SYSTEM.replace("-> p1 pop", "-> p9 pop");
        let e = parse_rpds(&bad).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(e.msg.contains("unknown state 'p9'"), "{e}");

        let e = parse_rpds(&SYSTEM.replace("push 1", "push 3")).unwrap_err();
        assert!(e.msg.contains("register index"), "{e}");

        let e = parse_rpds("k=2\nstates a\nrule a {x9} -> a skip").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.msg.contains("bad guard"), "{e}");
    }

    #[test]
    fn parses_an_acceptor_and_rejects_commands() {
        let text = "
k=2
states p1 q1 q2
initial p1
accept q2 {x1}{x2}
rule p1 {x1,top}{x2,x2'} -> q1
rule q1 {x1,x1'}{x2,x2'} -> q1
rule q1 {x1,x1'}{x2,top} -> q2
";
        let doc = parse_ra(text).unwrap();
        let a = doc.into_ra().unwrap();
        assert_eq!(a.base().states(), ["p1", "q1", "q2"]);
        assert_eq!(a.accept().len(), 1);

        let e = parse_ra(&text.replace("-> q1\n", "-> q1 push 1\n")).unwrap_err();
        assert!(e.msg.contains("pop-only"), "{e}");
    }

    #[test]
    fn binding_reorders_states_to_match_the_system() {
        let system = parse_rpds(SYSTEM).unwrap();
        let text = "
k=2
states f p2 p1 p0
initial p0 p1 p2
accept f {x1}{x2}
accept f {x1,x2}
rule p2 {x1,x1'}{x2,x2'}{top} -> f
";
        let a = parse_ra(text).unwrap().bind(&system).unwrap();
        assert_eq!(a.base().states(), ["p0", "p1", "p2", "f"]);
        assert_eq!(*a.initial(), [StateId(0), StateId(1), StateId(2)].into());
        assert_eq!(a.base().rules()[0].from, StateId(2));
        assert_eq!(a.base().rules()[0].to, StateId(3));

        let e = parse_ra(&text.replace("initial p0 p1 p2", "initial p0 p1"))
            .unwrap()
            .bind(&system)
            .unwrap_err();
        assert!(e.msg.contains("initial"), "{e}");
    }

    #[test]
    fn configuration_round_trip() {
        let system = parse_rpds(SYSTEM).unwrap();
        let id = parse_id("p1 [d3,d0] ( d3,[d3,d0] ) ( d2,[d2,d0] ) ( d0,[d1,d0] )", &system)
            .unwrap();
        assert_eq!(id.state, StateId(1));
        assert_eq!(id.stack.len(), 3);
        // names map to naturals by first appearance: d3 -> 0, d0 -> 1, ...
        assert_eq!(id.theta.values()[0], DataValue(0));
        assert_eq!(id.theta.values()[1], DataValue(1));

        let rendered = render_id(&id, &system);
        let back = parse_id(&rendered, &system).unwrap();
        assert_eq!(back.canonical_form(), id.canonical_form());

        let e = parse_id("p1 [d0]", &system).unwrap_err();
        assert!(e.msg.contains("expected k=2"), "{e}");
        let e = parse_id("p7 [d0,d1]", &system).unwrap_err();
        assert!(e.msg.contains("unknown state"), "{e}");
    }

    #[test]
    fn parsed_acceptor_matches_the_handwritten_one() {
        let text = "
k=2
states p1 q1 q2
initial p1
accept q2 {x1}{x2}
rule p1 {x1,top}{x2,x2'} -> q1
rule q1 {x1,x1'}{x2,x2'} -> q1
rule q1 {x1,x1'}{x2,top} -> q2
";
        let a = parse_ra(text).unwrap().into_ra().unwrap();
        let sys = parse_rpds(SYSTEM).unwrap();
        let id = parse_id(
            "p1 [d3,d0] ( d3,[d3,d0] ) ( d2,[d2,d0] ) ( d0,[d1,d0] )",
            &sys,
        )
        .unwrap();
        // renumber into the acceptor's table: p1 is state 0 there
        let lifted = RpdsId { state: StateId(0), ..id };
        assert!(ra_accepts(&a, &lifted).unwrap());
    }
}
