//! The command surface as library functions: each command takes parsed
//! objects, returns a typed report that renders to text or JSON, and maps
//! to an exit code. Verdicts use 0 (holds / clean), 1 (violated), and the
//! caller reserves 2 for errors and exceeded resource bounds.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use rpmc::eqrel::{enumerate_phi, EqrelError, Partition};
use rpmc::ltl::{AtomTable, Formula, LtlError, LtlParseError};
use rpmc::machines::{
    is_proper, rpds_successors, Command, MachineError, Nfa, PdsId, Ra, Rpds, RpdsId,
};
use rpmc::oracle::{check_finite, explore, KripkeGraph, OracleError, OracleOutcome};
use rpmc::pdsmc::{model_check_pds, Lasso, McOptions, PdsmcError, ValuationSpec, Verdict};
use rpmc::reduction::{
    bisim_probe, map_id, reduce_ra, reduce_rpds, ReducedState, ReductionError,
};

use crate::format::{letter_atoms, render_id, FormatError, RaDoc};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Format(#[from] FormatError),
    #[error("{0}")]
    Ltl(#[from] LtlParseError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Machine(#[from] MachineError),
    #[error("{0}")]
    Eqrel(#[from] EqrelError),
    #[error("{0}")]
    Reduction(#[from] ReductionError),
    #[error("{0}")]
    Engine(#[from] PdsmcError),
    #[error("{0}")]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Logic(#[from] LtlError),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Invalid(msg.into()))
}

/// One fully validated model-checking problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub system: Rpds,
    pub valuation: BTreeMap<String, Ra>,
    pub formula: Formula,
    pub start: RpdsId,
}

/// The start configuration must be usable: non-empty stack, proper, and of
/// the system's arity.
pub fn validate_start(system: &Rpds, start: &RpdsId) -> Result<(), CliError> {
    if start.state.0 >= system.states().len() {
        return invalid(format!("start state {} is out of range", start.state));
    }
    if start.theta.k() != system.k() {
        return invalid(format!(
            "start assignment has arity {}, the system has k={}",
            start.theta.k(),
            system.k()
        ));
    }
    if start.stack.is_empty() {
        return invalid("the start configuration must have a non-empty stack");
    }
    if !is_proper(start) {
        return invalid(
            "the start configuration is not proper: some saved assignment is \
             inconsistent with the values above it",
        );
    }
    Ok(())
}

fn atom_name_ok(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    head_ok
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(name, "tt" | "ff" | "X" | "F" | "G" | "U")
}

/// Assemble and validate an instance from parsed parts. Valuation acceptors
/// are renumbered so their states align with the system's.
pub fn build_instance(
    system: Rpds,
    bindings: Vec<(String, RaDoc)>,
    formula: Formula,
    start: RpdsId,
) -> Result<Instance, CliError> {
    let mut valuation = BTreeMap::new();
    for (atom, doc) in bindings {
        if !atom_name_ok(&atom) {
            return invalid(format!(
                "'{atom}' cannot be used as an atom name in formulas; use letters, \
                 digits and underscores, starting with a letter"
            ));
        }
        let ra = doc
            .bind(&system)
            .map_err(|e| CliError::Invalid(format!("valuation '{atom}': {}", e.msg)))?;
        if valuation.insert(atom.clone(), ra).is_some() {
            return invalid(format!("atom '{atom}' is bound twice"));
        }
    }
    for atom in formula.atoms() {
        if !valuation.contains_key(atom) {
            return invalid(format!("atom '{atom}' in the formula has no --val binding"));
        }
    }
    validate_start(&system, &start)?;
    Ok(Instance { system, valuation, formula, start })
}

fn render_reduced_state(s: &ReducedState, system: &Rpds) -> String {
    let name = system.states().get(s.base.0).map_or("?", |n| n.as_str());
    format!("({name},{})", s.acc)
}

fn render_pds_id(c: &PdsId<ReducedState, Partition>, system: &Rpds) -> String {
    let mut out = render_reduced_state(&c.state, system);
    out.push_str(" |");
    for sym in &c.stack {
        let _ = write!(out, " {sym}");
    }
    out
}

fn render_pds_command(c: &Command<Partition>) -> String {
    match c {
        Command::Pop => "pop".into(),
        Command::Skip => "skip".into(),
        Command::Push(s) => format!("push {s}"),
    }
}

// ---------------------------------------------------------------- check --

#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub product_states: usize,
    pub product_rules: usize,
    pub annotator_states: usize,
    pub buchi_states: usize,
    pub repeating_heads: usize,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub configuration: String,
    /// Atoms holding at this position; absent on the closing configuration
    /// of a loop, which only marks where the period ends.
    pub atoms: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcreteWitness {
    pub stem: Vec<String>,
    pub cycle: Vec<String>,
    pub rules: Vec<usize>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub stem: Vec<StepReport>,
    pub cycle: Vec<StepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concrete: Option<ConcreteWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub stats: StatsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    /// Raw abstract lasso backing `witness`, for programmatic consumers.
    #[serde(skip)]
    pub raw_lasso: Option<Lasso<ReducedState, Partition>>,
}

impl CheckReport {
    pub fn exit_code(&self) -> u8 {
        match self.verdict.as_str() {
            "HOLDS" => 0,
            "VIOLATED" => 1,
            _ => 2,
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("verdict: {}\n", self.verdict);
        if let Some(d) = &self.detail {
            let _ = writeln!(out, "detail: {d}");
        }
        let s = &self.stats;
        let _ = writeln!(
            out,
            "product: {} states, {} rules; annotator: {} states; \
             automaton: {} states; repeating heads: {}; wall: {} ms",
            s.product_states,
            s.product_rules,
            s.annotator_states,
            s.buchi_states,
            s.repeating_heads,
            s.wall_ms
        );
        if let Some(w) = &self.witness {
            render_witness(&mut out, w);
        }
        out
    }
}

fn render_steps(out: &mut String, steps: &[StepReport]) {
    for (i, step) in steps.iter().enumerate() {
        match &step.atoms {
            Some(atoms) => {
                let _ =
                    writeln!(out, "  {i}: {}   atoms={{{}}}", step.configuration, atoms.join(","));
            }
            None => {
                let _ = writeln!(out, "  {i}: {}   (loop closes here)", step.configuration);
            }
        }
    }
}

fn render_witness(out: &mut String, w: &WitnessReport) {
    out.push_str("witness stem:\n");
    render_steps(out, &w.stem);
    out.push_str("witness cycle (repeats forever):\n");
    render_steps(out, &w.cycle);
    if let Some(c) = &w.concrete {
        let _ = writeln!(out, "concrete run ({}):", c.note);
        for (i, line) in c.stem.iter().enumerate() {
            let _ = writeln!(out, "  stem  {i}: {line}");
        }
        for (i, line) in c.cycle.iter().enumerate() {
            let _ = writeln!(out, "  cycle {i}: {line}");
        }
    }
}

/// Best-effort register-level rendering of an abstract witness: walk the
/// register system from the start, at each step taking a canonical
/// successor whose image is the next abstract configuration. The
/// bisimulation guarantees such a successor exists for one period; later
/// periods repeat the control and stack pattern with fresh values.
fn concretize(
    inst: &Instance,
    lasso: &Lasso<ReducedState, Partition>,
) -> Result<ConcreteWitness, String> {
    let seq: Vec<&PdsId<ReducedState, Partition>> =
        lasso.stem.iter().chain(&lasso.cycle).collect();
    let mut cur = inst.start.clone();
    if map_id(&cur).ok().as_ref() != seq.first().copied() {
        return Err("the witness does not start at the checked configuration".into());
    }
    let mut rendered = vec![render_id(&cur, &inst.system)];
    let mut rules = Vec::new();
    for target in &seq[1..] {
        let succs = rpds_successors(&inst.system, &cur).map_err(|e| e.to_string())?;
        match succs.into_iter().find(|(_, c)| map_id(c).ok().as_ref() == Some(*target)) {
            Some((rule, c)) => {
                rules.push(rule);
                rendered.push(render_id(&c, &inst.system));
                cur = c;
            }
            None => return Err("no canonical step matches the abstract witness".into()),
        }
    }
    let cycle = rendered.split_off(lasso.stem.len());
    Ok(ConcreteWitness {
        stem: rendered,
        cycle,
        rules,
        note: "data values are one canonical choice; further loop periods repeat \
               the control and stack pattern with fresh values"
            .into(),
    })
}

fn witness_report(
    inst: &Instance,
    atoms: &AtomTable,
    lasso: &Lasso<ReducedState, Partition>,
    concrete: bool,
) -> WitnessReport {
    let step = |c: &PdsId<ReducedState, Partition>, l: Option<&rpmc::ltl::Letter>| StepReport {
        configuration: render_pds_id(c, &inst.system),
        atoms: l.map(|&l| letter_atoms(l, atoms)),
    };
    let stem = lasso
        .stem
        .iter()
        .zip(&lasso.stem_letters)
        .map(|(c, l)| step(c, Some(l)))
        .collect();
    let mut cycle: Vec<StepReport> = lasso
        .cycle
        .iter()
        .zip(&lasso.cycle_letters)
        .map(|(c, l)| step(c, Some(l)))
        .collect();
    if let Some(last) = lasso.cycle.last() {
        cycle.push(step(last, None));
    }
    let concrete = if concrete {
        match concretize(inst, lasso) {
            Ok(c) => Some(c),
            Err(msg) => Some(ConcreteWitness {
                stem: Vec::new(),
                cycle: Vec::new(),
                rules: Vec::new(),
                note: format!("concretization failed: {msg}"),
            }),
        }
    } else {
        None
    };
    WitnessReport { stem, cycle, concrete }
}

/// Reduce the instance to an ordinary pushdown system with a regular
/// valuation and run the saturation engine on it.
pub fn cmd_check(
    inst: &Instance,
    opts: &McOptions,
    concretize_witness: bool,
) -> Result<CheckReport, CliError> {
    let n = inst.system.states().len();
    let reduced = reduce_rpds(&inst.system)?;
    let mut automata: BTreeMap<String, Nfa<ReducedState, Partition>> = BTreeMap::new();
    for (atom, ra) in &inst.valuation {
        automata.insert(atom.clone(), reduce_ra(ra, n)?);
    }
    let atoms = AtomTable::new(inst.valuation.keys().cloned())?;
    let vspec = ValuationSpec::new(atoms.clone(), automata)?;
    let start = map_id(&inst.start)?;
    let report = model_check_pds(reduced.pds(), &vspec, &inst.formula, &start, opts)?;
    let s = &report.stats;
    let stats = StatsReport {
        product_states: s.product_states,
        product_rules: s.product_rules,
        annotator_states: s.annotator_states,
        buchi_states: s.buchi_states,
        repeating_heads: s.repeating_heads,
        wall_ms: s.wall.as_millis(),
    };
    let (verdict, detail, witness, raw_lasso) = match &report.verdict {
        Verdict::Holds => ("HOLDS".to_string(), None, None, None),
        Verdict::Violated(None) => (
            "VIOLATED".to_string(),
            Some("witness extraction exceeded its search budget".to_string()),
            None,
            None,
        ),
        Verdict::Violated(Some(lasso)) => (
            "VIOLATED".to_string(),
            None,
            Some(witness_report(inst, &atoms, lasso, concretize_witness)),
            Some(lasso.clone()),
        ),
        Verdict::ResourceExceeded(msg) => {
            ("RESOURCE-EXCEEDED".to_string(), Some(msg.clone()), None, None)
        }
    };
    Ok(CheckReport { verdict, detail, stats, witness, raw_lasso })
}

// --------------------------------------------------------------- oracle --

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub verdict: String,
    pub nodes: usize,
    pub deadlocks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<String>,
}

impl OracleReport {
    pub fn exit_code(&self) -> u8 {
        if self.verdict == "HOLDS" {
            0
        } else {
            1
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "verdict: {}\nexplored nodes: {} ({} deadlocked)\n",
            self.verdict, self.nodes, self.deadlocks
        );
        if let Some(w) = &self.witness {
            render_witness(&mut out, w);
        }
        if let Some(d) = &self.dump {
            out.push_str("graph:\n");
            out.push_str(d);
        }
        out
    }
}

/// Enumerate the exact configuration space within the given bounds and
/// decide the formula on the finite graph. Exceeding a bound is an error —
/// the oracle refuses rather than approximates.
pub fn cmd_oracle(
    inst: &Instance,
    max_nodes: usize,
    max_stack: usize,
    dump: bool,
) -> Result<OracleReport, CliError> {
    let graph = explore(&inst.system, &inst.valuation, &inst.start, max_nodes, max_stack)?;
    let outcome = check_finite(&graph, &inst.formula, &inst.start)?;
    let witness = match &outcome {
        OracleOutcome::Holds => None,
        OracleOutcome::Violated(lasso) => {
            let step = |c: &RpdsId, l: rpmc::ltl::Letter| StepReport {
                configuration: render_id(c, &inst.system),
                atoms: Some(letter_atoms(l, graph.atoms())),
            };
            Some(WitnessReport {
                stem: lasso
                    .stem
                    .iter()
                    .zip(&lasso.stem_letters)
                    .map(|(c, &l)| step(c, l))
                    .collect(),
                cycle: lasso
                    .cycle
                    .iter()
                    .zip(&lasso.cycle_letters)
                    .map(|(c, &l)| step(c, l))
                    .collect(),
                concrete: None,
            })
        }
    };
    Ok(OracleReport {
        verdict: match outcome {
            OracleOutcome::Holds => "HOLDS".into(),
            OracleOutcome::Violated(_) => "VIOLATED".into(),
        },
        nodes: graph.len(),
        deadlocks: graph.deadlocks().len(),
        witness,
        dump: dump.then(|| graph.dump()),
    })
}

/// The oracle's exploration half alone, for diagnostics.
pub fn explore_graph(
    inst: &Instance,
    max_nodes: usize,
    max_stack: usize,
) -> Result<KripkeGraph, CliError> {
    Ok(explore(&inst.system, &inst.valuation, &inst.start, max_nodes, max_stack)?)
}

// --------------------------------------------------------------- reduce --

#[derive(Debug, Clone, Serialize)]
pub struct ReducedRuleReport {
    pub index: usize,
    pub text: String,
    pub source_rule: usize,
    pub context: [String; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomNfaReport {
    pub atom: String,
    pub rule_count: usize,
    pub final_count: usize,
    pub finals: Vec<String>,
    pub rules: Vec<ReducedRuleReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReduceReport {
    pub k: u32,
    pub source_states: usize,
    pub source_rules: usize,
    pub state_count: usize,
    pub rule_count: usize,
    pub rules: Vec<ReducedRuleReport>,
    pub atoms: Vec<AtomNfaReport>,
}

impl ReduceReport {
    pub fn exit_code(&self) -> u8 {
        0
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "# reduced pushdown system: {} source states, {} source rules -> \
             {} states, {} rules\n",
            self.source_states, self.source_rules, self.state_count, self.rule_count
        );
        for r in &self.rules {
            let _ = writeln!(
                out,
                "rule {}   # from source rule {} under context ({}, {})",
                r.text, r.source_rule, r.context[0], r.context[1]
            );
        }
        for a in &self.atoms {
            let _ = writeln!(
                out,
                "# atom '{}': {} rules, {} accepting states; initial states are \
                 all (state, guard) pairs",
                a.atom, a.rule_count, a.final_count
            );
            for f in &a.finals {
                let _ = writeln!(out, "final {} {f}", a.atom);
            }
            for r in &a.rules {
                let _ = writeln!(
                    out,
                    "rule {}   # atom '{}', from source rule {} under context ({}, {})",
                    r.text, a.atom, r.source_rule, r.context[0], r.context[1]
                );
            }
        }
        out
    }
}

fn rule_reports(
    system: &Rpds,
    reduced: &rpmc::reduction::ReducedSystem,
) -> Vec<ReducedRuleReport> {
    reduced
        .rules()
        .iter()
        .zip(reduced.provenance())
        .enumerate()
        .map(|(index, (r, prov))| ReducedRuleReport {
            index,
            text: format!(
                "{} {} -> {} {}",
                render_reduced_state(&r.from, system),
                r.symbol,
                render_reduced_state(&r.to, system),
                render_pds_command(&r.command)
            ),
            source_rule: prov.source_rule,
            context: [prov.phi1.to_string(), prov.phi2.to_string()],
        })
        .collect()
}

/// Emit the reduced pushdown system and, per bound atom, the reduced
/// acceptor automaton, each rule annotated with its source rule and
/// context pair.
pub fn cmd_reduce(
    system: &Rpds,
    bindings: Vec<(String, RaDoc)>,
) -> Result<ReduceReport, CliError> {
    let reduced = reduce_rpds(system)?;
    let rules = rule_reports(system, &reduced);
    let mut atoms = Vec::new();
    for (atom, doc) in bindings {
        let ra = doc
            .bind(system)
            .map_err(|e| CliError::Invalid(format!("valuation '{atom}': {}", e.msg)))?;
        let nfa = reduce_ra(&ra, system.states().len())?;
        let ra_reduced = reduce_rpds(ra.base())?;
        atoms.push(AtomNfaReport {
            atom,
            rule_count: nfa.rules().len(),
            final_count: nfa.finals.len(),
            finals: nfa.finals.iter().map(|s| render_reduced_state(s, ra.base())).collect(),
            rules: rule_reports(ra.base(), &ra_reduced),
        });
    }
    Ok(ReduceReport {
        k: system.k(),
        source_states: system.states().len(),
        source_rules: system.rules().len(),
        state_count: reduced.pds().states().len(),
        rule_count: reduced.rules().len(),
        rules,
        atoms,
    })
}

// ------------------------------------------------------------- simulate --

#[derive(Debug, Clone, Serialize)]
pub struct SimStep {
    pub index: usize,
    /// The rule that produced this configuration; absent on the start.
    pub rule: Option<usize>,
    pub state: String,
    pub depth: usize,
    pub configuration: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub steps: Vec<SimStep>,
    #[serde(skip)]
    pub ids: Vec<RpdsId>,
}

impl SimulateReport {
    pub fn exit_code(&self) -> u8 {
        0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let fired = match s.rule {
                Some(r) => format!("--rule {r}--> "),
                None => "start:       ".to_string(),
            };
            let _ = writeln!(out, "{:>3} {fired}{}", s.index, s.configuration);
        }
        out
    }
}

/// Run `steps` canonical steps from the start. With a script, fire exactly
/// the given rule indices (0-based); without one, fire the lowest-indexed
/// enabled rule each step.
pub fn cmd_simulate(
    system: &Rpds,
    start: &RpdsId,
    steps: usize,
    script: Option<&[usize]>,
) -> Result<SimulateReport, CliError> {
    validate_start(system, start)?;
    if let Some(script) = script {
        if script.len() != steps {
            return invalid(format!(
                "the rule script has {} entries but {steps} steps were requested",
                script.len()
            ));
        }
    }
    let mut ids = vec![start.clone()];
    let mut fired: Vec<Option<usize>> = vec![None];
    for i in 0..steps {
        let cur = ids.last().unwrap();
        let succs = rpds_successors(system, cur)?;
        let next = match script {
            Some(script) => succs.into_iter().find(|(r, _)| *r == script[i]).map_or_else(
                || {
                    invalid(format!(
                        "rule {} is not enabled at step {i} (configuration {})",
                        script[i],
                        render_id(cur, system)
                    ))
                },
                Ok,
            )?,
            None => match succs.into_iter().next() {
                Some(s) => s,
                None => {
                    return invalid(format!(
                        "deadlock after {i} steps at {}",
                        render_id(cur, system)
                    ))
                }
            },
        };
        fired.push(Some(next.0));
        ids.push(next.1);
    }
    let steps = ids
        .iter()
        .zip(&fired)
        .enumerate()
        .map(|(index, (id, rule))| SimStep {
            index,
            rule: *rule,
            state: system.states()[id.state.0].clone(),
            depth: id.stack.len(),
            configuration: render_id(id, system),
        })
        .collect();
    Ok(SimulateReport { steps, ids })
}

// ---------------------------------------------------------------- bisim --

#[derive(Debug, Clone, Serialize)]
pub struct BisimCmdReport {
    pub clean: bool,
    pub depth: u32,
    pub ids_checked: usize,
    pub steps_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

impl BisimCmdReport {
    pub fn exit_code(&self) -> u8 {
        if self.clean {
            0
        } else {
            1
        }
    }

    pub fn render(&self) -> String {
        match &self.violation {
            None => format!(
                "clean: {} configurations, {} steps matched to depth {}\n",
                self.ids_checked, self.steps_checked, self.depth
            ),
            Some(v) => format!("violation at depth <= {}:\n{v}\n", self.depth),
        }
    }
}

/// Probe the abstraction for bisimilarity around the start configuration.
pub fn cmd_bisim(system: &Rpds, start: &RpdsId, depth: u32) -> Result<BisimCmdReport, CliError> {
    validate_start(system, start)?;
    let reduced = reduce_rpds(system)?;
    match bisim_probe(system, &reduced, start, depth)? {
        rpmc::reduction::BisimReport::Clean { ids_checked, steps_checked } => Ok(BisimCmdReport {
            clean: true,
            depth,
            ids_checked,
            steps_checked,
            violation: None,
        }),
        rpmc::reduction::BisimReport::Violation(v) => Ok(BisimCmdReport {
            clean: false,
            depth,
            ids_checked: 0,
            steps_checked: 0,
            violation: Some(format!("{v:?}")),
        }),
    }
}

// ------------------------------------------------------------- enum-phi --

#[derive(Debug, Clone, Serialize)]
pub struct EnumPhiReport {
    pub k: u32,
    pub count: usize,
    pub partitions: Vec<String>,
}

impl EnumPhiReport {
    pub fn exit_code(&self) -> u8 {
        0
    }

    pub fn render(&self) -> String {
        let mut out = format!("|Phi_{}| = {}\n", self.k, self.count);
        for p in &self.partitions {
            out.push_str(p);
            out.push('\n');
        }
        out
    }
}

/// List the guard alphabet for `k` registers.
pub fn cmd_enum_phi(k: u32) -> Result<EnumPhiReport, CliError> {
    let phis = enumerate_phi(k)?;
    Ok(EnumPhiReport {
        k,
        count: phis.len(),
        partitions: phis.iter().map(|p| p.to_string()).collect(),
    })
}
