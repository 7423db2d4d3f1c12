//! Acceptance gate for the whole workspace: golden reproductions of the
//! bundled examples, exhaustive algebraic checks, statistical property
//! gates, and cross-validation between the two independent verdict
//! engines. Each test states its own tolerance (exactness, sample counts,
//! or a wall-clock budget) and fails loudly when it is missed.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rpmc::eqrel::{
    compose, compose_top, composable, composable_top, enumerate_phi, eqj, induced, models_triple,
    parse_partition, parse_reg_partition, Assignment, DataValue, Partition,
};
use rpmc::ltl::{accepts_lasso, eval_word, parse_ltl, to_buchi, AtomTable, Formula, Letter};
use rpmc::machines::{
    frsp, is_proper, nfa_accepts, pds_successors, ra_accepts, Command, PdsId, PdsRule, Ra, Rpds,
    RpdsId, StackCell, StateId,
};
use rpmc::pdsmc::McOptions;
use rpmc::reduction::{bisim_probe, map_id, reduce_ra, reduce_rpds, ReducedState};
use rpmc::sampling::{random_proper_id, random_ra, random_rpds};
use rpmc_cli::commands::{build_instance, cmd_check, cmd_oracle, cmd_simulate};
use rpmc_cli::format::{parse_id, parse_ra, parse_rpds};

// ------------------------------------------------------------- fixtures --

fn instances_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("..").join("..").join("instances")
}

fn bundled(name: &str) -> String {
    let path = instances_dir().join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn p2(text: &str) -> Partition {
    parse_partition(2, text).unwrap()
}

/// The seven two-register guards the examples revolve around.
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
    p2(texts[i])
}

fn asg(vals: &[u64]) -> Assignment {
    Assignment::new(vals.iter().map(|&v| DataValue(v)).collect())
}

fn cell(value: u64, saved: &[u64]) -> StackCell {
    StackCell { value: DataValue(value), saved: asg(saved) }
}

fn example_system() -> Rpds {
    parse_rpds(&bundled("example1.rpds")).unwrap()
}

fn example_start(system: &Rpds) -> RpdsId {
    parse_id(&bundled("fig1-start.id"), system).unwrap()
}

// ------------------------------------------------------------ criteria --

#[test]
fn c01_simulation_replays_the_two_register_example_run() {
    let t0 = Instant::now();
    let system = example_system();
    let start = example_start(&system);
    let report = cmd_simulate(&system, &start, 5, Some(&[0, 1, 2, 3, 4])).unwrap();

    let states: Vec<&str> = report.steps.iter().map(|s| s.state.as_str()).collect();
    assert_eq!(states, ["p0", "p1", "p1", "p1", "p1", "p2"]);
    let depths: Vec<usize> = report.steps.iter().map(|s| s.depth).collect();
    assert_eq!(depths, [1, 2, 3, 2, 1, 2]);
    assert_eq!(report.steps[0].rule, None);
    for (i, s) in report.steps.iter().enumerate().skip(1) {
        assert_eq!(s.rule, Some(i - 1));
    }

    // The exact configurations, up to a consistent renaming of data values.
    let expected = [
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
    ];
    assert_eq!(report.ids.len(), expected.len());
    for (got, want) in report.ids.iter().zip(&expected) {
        assert_eq!(got.canonical_form(), want.canonical_form(), "run diverges at {want:?}");
    }
    assert!(t0.elapsed() < Duration::from_secs(1), "took {:?}", t0.elapsed());
}

#[test]
fn c02_acceptor_decides_the_three_cell_configuration() {
    let t0 = Instant::now();
    let ra = parse_ra(&bundled("example2.ra")).unwrap().into_ra().unwrap();
    let id = parse_id(&bundled("fig2-start.id"), ra.base()).unwrap();
    assert!(ra_accepts(&ra, &id).unwrap(), "the three-cell configuration must be accepted");

    // Starting in the middle state instead of the entry state rejects.
    let q1 = ra.base().state_id("q1").unwrap();
    let from_q1 = RpdsId { state: q1, theta: id.theta.clone(), stack: id.stack.clone() };
    assert!(!ra_accepts(&ra, &from_q1).unwrap());

    // Demanding equal registers at acceptance instead of distinct rejects.
    let equal_regs = Ra::new(
        ra.base().clone(),
        ra.initial().clone(),
        vec![(StateId(2), parse_reg_partition(2, "{x1,x2}").unwrap())],
    )
    .unwrap();
    assert!(!ra_accepts(&equal_regs, &id).unwrap());

    // The finite-alphabet image agrees on the same configuration.
    let nfa = reduce_ra(&ra, 1).unwrap();
    assert!(nfa_accepts(&nfa, &map_id(&id).unwrap()));
    assert!(t0.elapsed() < Duration::from_secs(1), "took {:?}", t0.elapsed());
}

#[test]
fn c03_composability_goldens_hold() {
    assert!(composable(&phi(0), &phi(1)));
    assert!(!composable_top(&phi(0), &phi(1)));
    assert!(composable_top(&phi(0), &phi(3)));
    assert!(composable_top(&phi(1), &phi(2)));
}

#[test]
fn c04_reduction_contains_the_expected_rules_and_replays_the_run() {
    let t0 = Instant::now();
    let system = example_system();
    let reduced = reduce_rpds(&system).unwrap();
    let rs = |i: usize, g: usize| ReducedState { base: StateId(i), acc: phi(g) };

    // The push rule at p1 that stays in the same context.
    let push_rule = PdsRule {
        from: rs(1, 5),
        symbol: phi(0),
        to: rs(1, 5),
        command: Command::Push(phi(1)),
    };
    // The pop rule at p1 that folds the exposed symbol into the context.
    let pop_rule =
        PdsRule { from: rs(1, 5), symbol: phi(1), to: rs(1, 1), command: Command::Pop };
    let at = |r: &PdsRule<ReducedState, Partition>| {
        reduced.rules().iter().position(|x| x == r).unwrap_or_else(|| panic!("missing {r:?}"))
    };
    let push_at = at(&push_rule);
    let pop_at = at(&pop_rule);
    assert_eq!(reduced.provenance()[push_at].source_rule, 1);
    assert_eq!(reduced.provenance()[pop_at].source_rule, 2);

    // The algebra behind those two rules.
    assert_eq!(compose_top(&phi(5), &phi(1)).unwrap(), phi(1));
    assert_eq!(eqj(&phi(1), 1).unwrap(), phi(5));
    assert_eq!(compose(&phi(1), &phi(1)).unwrap(), phi(1));

    // Three consecutive configurations of the concrete run...
    let c1 = RpdsId {
        state: StateId(1),
        theta: asg(&[2, 0]),
        stack: vec![cell(2, &[2, 0]), cell(0, &[1, 0])],
    };
    let c2 = RpdsId {
        state: StateId(1),
        theta: asg(&[3, 0]),
        stack: vec![cell(3, &[3, 0]), cell(2, &[2, 0]), cell(0, &[1, 0])],
    };
    let c3 = RpdsId {
        state: StateId(1),
        theta: asg(&[4, 0]),
        stack: vec![cell(2, &[2, 0]), cell(0, &[1, 0])],
    };
    // ...map onto the expected finite-alphabet configurations...
    let r1 = PdsId { state: rs(1, 5), stack: vec![phi(0), phi(6)] };
    let r2 = PdsId { state: rs(1, 5), stack: vec![phi(1), phi(0), phi(6)] };
    let r3 = PdsId { state: rs(1, 1), stack: vec![phi(0), phi(6)] };
    assert_eq!(map_id(&c1).unwrap(), r1);
    assert_eq!(map_id(&c2).unwrap(), r2);
    assert_eq!(map_id(&c3).unwrap(), r3);

    // ...and the reduced system steps through them with those very rules.
    assert!(pds_successors(reduced.pds(), &r1).contains(&(push_at, r2.clone())));
    assert!(pds_successors(reduced.pds(), &r2).contains(&(pop_at, r3.clone())));
    assert!(t0.elapsed() < Duration::from_secs(5), "took {:?}", t0.elapsed());
}

#[test]
fn c05_guard_enumeration_counts_match_the_bell_numbers() {
    // Bell triangle: row n starts with the last entry of row n-1, and
    // each entry adds the entry above-left; B(n) is the first entry.
    let bell = |n: usize| -> u64 {
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![*row.last().unwrap()];
            for v in &row {
                let last = *next.last().unwrap();
                next.push(last + v);
            }
            row = next;
        }
        row[0]
    };
    assert_eq!([bell(0), bell(1), bell(2), bell(3)], [1, 1, 2, 5]);
    let counts: Vec<usize> = (1..=3).map(|k| enumerate_phi(k).unwrap().len()).collect();
    assert_eq!(counts, [5, 52, 877]);
    for k in 1..=3u32 {
        let expected = bell(2 * k as usize + 1);
        assert_eq!(counts[k as usize - 1] as u64, expected, "k={k}");
    }
}

// A small pool so that collisions between old and new values are common;
// the sampler below never reuses a dropped value, which is exactly the
// discipline `is_proper` checks.
const POOL: [u64; 6] = [0, 1, 2, 3, 4, 5];

fn pool_assignment(rng: &mut StdRng, k: u32, used: &mut BTreeSet<u64>) -> Assignment {
    let vals: Vec<DataValue> = (0..k)
        .map(|_| {
            let v = POOL[rng.gen_range(0..POOL.len())];
            used.insert(v);
            DataValue(v)
        })
        .collect();
    Assignment::new(vals)
}

fn pick(rng: &mut StdRng, a: &Assignment) -> DataValue {
    let i = rng.gen_range(1..=a.k());
    a.get(i)
}

/// One register update: each slot copies a visible value, repeats a value
/// already chosen this step, or takes a value the history has never seen.
fn evolve(rng: &mut StdRng, visible: &[u64], used: &mut BTreeSet<u64>, k: u32) -> Assignment {
    let mut vals: Vec<u64> = Vec::new();
    for _ in 0..k {
        let choice = rng.gen_range(0..4u32);
        let v = if choice == 0 {
            match POOL.iter().find(|v| !used.contains(v)) {
                Some(&f) => f,
                None => visible[rng.gen_range(0..visible.len())],
            }
        } else if choice == 1 && !vals.is_empty() {
            vals[rng.gen_range(0..vals.len())]
        } else {
            visible[rng.gen_range(0..visible.len())]
        };
        used.insert(v);
        vals.push(v);
    }
    Assignment::new(vals.into_iter().map(DataValue).collect())
}

fn values(a: &Assignment) -> Vec<u64> {
    a.values().iter().map(|d| d.0).collect()
}

#[test]
fn c06_composition_transports_sampled_proper_steps() {
    let mut rng = StdRng::seed_from_u64(61);
    let mut checked = 0u32;
    for round in 0..12_000 {
        let k = rng.gen_range(1..=2u32);
        let mut used: BTreeSet<u64> = BTreeSet::new();
        let theta1 = pool_assignment(&mut rng, k, &mut used);
        if round % 2 == 0 {
            // Two stacked steps: bottom cell (d1, theta1), top cell
            // (d2, theta2), current registers theta3.
            let d1 = pick(&mut rng, &theta1);
            let theta2 = evolve(&mut rng, &values(&theta1), &mut used, k);
            let d2 = pick(&mut rng, &theta2);
            let theta3 = evolve(&mut rng, &values(&theta2), &mut used, k);
            let id = RpdsId {
                state: StateId(0),
                theta: theta3.clone(),
                stack: vec![
                    StackCell { value: d2, saved: theta2.clone() },
                    StackCell { value: d1, saved: theta1.clone() },
                ],
            };
            assert!(is_proper(&id), "sampler broke its own discipline: {id:?}");
            let f1 = induced(&theta1, d1, &theta2).unwrap();
            let f2 = induced(&theta2, d2, &theta3).unwrap();
            assert!(composable(&f1, &f2), "round {round}");
            let f = compose(&f1, &f2).unwrap();
            assert!(
                models_triple(&theta1, d1, &theta3, &f).unwrap(),
                "round {round}: ({theta1}, {d1}, {theta3}) does not satisfy {f} = {f1} . {f2}"
            );
        } else {
            // Two register updates over one shared exposed top value d.
            let d = pick(&mut rng, &theta1);
            let theta2 = evolve(&mut rng, &values(&theta1), &mut used, k);
            let mut vis = values(&theta2);
            vis.push(d.0);
            let theta3 = evolve(&mut rng, &vis, &mut used, k);
            let pre = RpdsId {
                state: StateId(0),
                theta: theta2.clone(),
                stack: vec![StackCell { value: d, saved: theta1.clone() }],
            };
            let post = RpdsId {
                state: StateId(0),
                theta: theta3.clone(),
                stack: vec![StackCell { value: d, saved: theta1.clone() }],
            };
            assert!(is_proper(&pre) && is_proper(&post), "round {round}");
            assert!(frsp(&theta3, d, &theta2, &[&theta1]), "round {round}");
            let f1 = induced(&theta1, d, &theta2).unwrap();
            let f2 = induced(&theta2, d, &theta3).unwrap();
            assert!(composable_top(&f1, &f2), "round {round}");
            let f = compose_top(&f1, &f2).unwrap();
            assert!(
                models_triple(&theta1, d, &theta3, &f).unwrap(),
                "round {round}: ({theta1}, {d}, {theta3}) does not satisfy {f} = {f1} .T {f2}"
            );
        }
        checked += 1;
    }
    assert!(checked >= 10_000, "only {checked} triples were sampled");
}

#[test]
fn c07_composition_is_associative_over_all_guard_triples() {
    let t0 = Instant::now();
    let phis = enumerate_phi(2).unwrap();
    assert_eq!(phis.len(), 52);
    let mut plain = 0u64;
    let mut top = 0u64;
    for a in &phis {
        for b in &phis {
            let ab_plain =
                if composable(a, b) { Some(compose(a, b).unwrap()) } else { None };
            let ab_top =
                if composable_top(a, b) { Some(compose_top(a, b).unwrap()) } else { None };
            for c in &phis {
                if let Some(ab) = &ab_plain {
                    if composable(b, c) {
                        let bc = compose(b, c).unwrap();
                        if composable(ab, c) && composable(a, &bc) {
                            assert_eq!(
                                compose(ab, c).unwrap(),
                                compose(a, &bc).unwrap(),
                                "({a} . {b}) . {c} != {a} . ({b} . {c})"
                            );
                            plain += 1;
                        }
                    }
                }
                if let Some(ab) = &ab_top {
                    if composable_top(b, c) {
                        let bc = compose_top(b, c).unwrap();
                        if composable_top(ab, c) && composable_top(a, &bc) {
                            assert_eq!(
                                compose_top(ab, c).unwrap(),
                                compose_top(a, &bc).unwrap(),
                                "({a} .T {b}) .T {c} != {a} .T ({b} .T {c})"
                            );
                            top += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(plain > 0 && top > 0, "the associativity domain must not be empty");
    assert!(t0.elapsed() < Duration::from_secs(60), "took {:?}", t0.elapsed());
}

#[test]
fn c08_probe_is_clean_on_faithful_systems_and_flags_mutants() {
    // Clean on the example, deep enough to cover every rule.
    let system = example_system();
    let start = example_start(&system);
    let reduced = reduce_rpds(&system).unwrap();
    let report = bisim_probe(&system, &reduced, &start, 6).unwrap();
    assert!(report.is_clean(), "{report:?}");

    // Clean on randomized systems.
    let mut rng = StdRng::seed_from_u64(62);
    for round in 0..20 {
        let k = rng.gen_range(1..=2);
        let states = rng.gen_range(1..=4);
        let rules = rng.gen_range(1..=8);
        let m = random_rpds(&mut rng, k, states, rules);
        let c0 = random_proper_id(&mut rng, k, states, 3);
        let rm = reduce_rpds(&m).unwrap();
        let report = bisim_probe(&m, &rm, &c0, 6).unwrap();
        assert!(report.is_clean(), "round {round}: {report:?}");
    }

    // Perturbing any exercised rule of the reduced system must be caught.
    let image = map_id(&start).unwrap();
    let restricted = reduced.restrict_to_reachable(&[image]);
    let total = restricted.rules().len();
    assert!(total > 0, "the reachable restriction must keep some rules");
    let mut caught = 0usize;
    for i in 0..total {
        let orig = &restricted.rules()[i];
        let to = ReducedState {
            base: StateId((orig.to.base.0 + 1) % system.states().len()),
            acc: orig.to.acc.clone(),
        };
        let mutant = restricted.with_rule_target(i, to);
        if !bisim_probe(&system, &mutant, &start, 6).unwrap().is_clean() {
            caught += 1;
        }
    }
    assert!(caught * 10 >= total * 9, "only {caught} of {total} mutants were caught");
}

#[test]
fn c09_acceptor_and_reduced_automaton_agree_on_sampled_configurations() {
    let mut rng = StdRng::seed_from_u64(63);
    // (acceptor, states of the underlying system, states to sample over, k)
    let example2 = parse_ra(&bundled("example2.ra")).unwrap().into_ra().unwrap();
    let system = example_system();
    let in_p2 = parse_ra(&bundled("in-p2.ra")).unwrap().bind(&system).unwrap();
    let pingpong = parse_rpds(&bundled("pingpong.rpds")).unwrap();
    let at_q = parse_ra(&bundled("at-q.ra")).unwrap().bind(&pingpong).unwrap();
    let mut suites: Vec<(Ra, usize, usize, u32)> = vec![
        (example2, 1, 3, 2),
        (in_p2, 3, 4, 2),
        (at_q, 2, 3, 1),
    ];
    for _ in 0..3 {
        let k = rng.gen_range(1..=2);
        let states = rng.gen_range(1..=3);
        let extra = rng.gen_range(0..=2);
        let rules = rng.gen_range(1..=8);
        let a = random_ra(&mut rng, k, states, extra, rules, 2);
        suites.push((a, states, states + extra, k));
    }
    for (round, (a, system_states, sample_states, k)) in suites.iter().enumerate() {
        let nfa = reduce_ra(a, *system_states).unwrap();
        for i in 0..1_000 {
            let id = random_proper_id(&mut rng, *k, *sample_states, 5);
            let direct = ra_accepts(a, &id).unwrap();
            let image = nfa_accepts(&nfa, &map_id(&id).unwrap());
            assert_eq!(direct, image, "suite {round}, sample {i}: {id:?}");
        }
    }
}

// --------------------------------------------- finite verdict instances --

const DEEP_SYSTEM: &str = "
k=1
states p q
rule p {x1,x1',top} -> q push 1
rule q {x1,x1',top} -> p pop
";

const DEEP_ATOM: &str = "
k=1
states p q s f
initial p q
accept f {x1}
rule p {x1,x1',top} -> s
rule p {x1,x1'}{top} -> s
rule q {x1,x1',top} -> s
rule q {x1,x1'}{top} -> s
rule s {x1,x1',top} -> f
rule s {x1,x1'}{top} -> f
rule f {x1,x1',top} -> f
rule f {x1,x1'}{top} -> f
";

const ROTOR_SYSTEM: &str = "
k=1
states r0 r1 r2
rule r0 {x1,x1',top} -> r1 skip
rule r1 {x1,x1',top} -> r2 skip
rule r2 {x1,x1',top} -> r0 skip
";

const AT_R1_ATOM: &str = "
k=1
states r0 r1 r2 f
initial r0 r1 r2
accept f {x1}
rule r1 {x1,x1',top} -> f
rule r1 {x1,x1'}{top} -> f
rule f {x1,x1',top} -> f
rule f {x1,x1'}{top} -> f
";

const HALT_SYSTEM: &str = "
k=1
states h
rule h {x1,x1',top} -> h pop
";

const AT_H_ATOM: &str = "
k=1
states h f
initial h
accept f {x1}
rule h {x1,x1',top} -> f
rule h {x1,x1'}{top} -> f
rule f {x1,x1',top} -> f
rule f {x1,x1'}{top} -> f
";

struct Case {
    system: String,
    bindings: Vec<(&'static str, String)>,
    start: &'static str,
    formula: &'static str,
    expect: &'static str,
}

fn finite_cases() -> Vec<Case> {
    let pingpong = bundled("pingpong.rpds");
    let at_q = bundled("at-q.ra");
    let mut out = Vec::new();
    let mut case =
        |system: &str, bindings: &[(&'static str, &str)], start, formula, expect| {
            out.push(Case {
                system: system.to_string(),
                bindings: bindings.iter().map(|&(n, t)| (n, t.to_string())).collect(),
                start,
                formula,
                expect,
            });
        };
    let pq = "p [d0] ( d0,[d0] )";
    // Alternating two-state system: q at every odd position.
    case(&pingpong, &[("at_q", &at_q)], pq, "G (F at_q)", "HOLDS");
    case(&pingpong, &[("at_q", &at_q)], pq, "F at_q", "HOLDS");
    case(&pingpong, &[("at_q", &at_q)], pq, "G at_q", "VIOLATED");
    case(&pingpong, &[("at_q", &at_q)], pq, "at_q U !at_q", "HOLDS");
    case(&pingpong, &[("at_q", &at_q)], pq, "!at_q U at_q", "HOLDS");
    case(&pingpong, &[("at_q", &at_q)], pq, "X at_q", "HOLDS");
    case(&pingpong, &[("at_q", &at_q)], pq, "F (at_q & X at_q)", "VIOLATED");
    // Push/pop system: the stack is deep exactly at the odd positions.
    case(DEEP_SYSTEM, &[("deep", DEEP_ATOM)], pq, "F deep", "HOLDS");
    case(DEEP_SYSTEM, &[("deep", DEEP_ATOM)], pq, "G (!deep | X !deep)", "HOLDS");
    case(DEEP_SYSTEM, &[("deep", DEEP_ATOM)], pq, "!deep U deep", "HOLDS");
    case(DEEP_SYSTEM, &[("deep", DEEP_ATOM)], pq, "G deep", "VIOLATED");
    // Two atoms that always agree on this system.
    case(
        DEEP_SYSTEM,
        &[("deep", DEEP_ATOM), ("at_q", &at_q)],
        pq,
        "G ((deep & at_q) | (!deep & !at_q))",
        "HOLDS",
    );
    case(
        DEEP_SYSTEM,
        &[("deep", DEEP_ATOM), ("at_q", &at_q)],
        pq,
        "F (deep & !at_q)",
        "VIOLATED",
    );
    // Three-state rotation: r1 exactly at positions 1, 4, 7, ...
    let r0 = "r0 [d0] ( d0,[d0] )";
    case(ROTOR_SYSTEM, &[("at_r1", AT_R1_ATOM)], r0, "G (!at_r1 | X !at_r1)", "HOLDS");
    case(ROTOR_SYSTEM, &[("at_r1", AT_R1_ATOM)], r0, "F (at_r1 & X at_r1)", "VIOLATED");
    case(ROTOR_SYSTEM, &[("at_r1", AT_R1_ATOM)], r0, "G (F at_r1)", "HOLDS");
    case(ROTOR_SYSTEM, &[("at_r1", AT_R1_ATOM)], r0, "X (X (X at_r1))", "VIOLATED");
    // A system that halts after one step has no infinite runs at all, so
    // every formula holds, even an unsatisfiable one.
    let h = "h [d0] ( d0,[d0] )";
    case(HALT_SYSTEM, &[], h, "!tt", "HOLDS");
    case(HALT_SYSTEM, &[("at_h", AT_H_ATOM)], h, "at_h & !at_h", "HOLDS");
    out
}

#[test]
fn c10_engine_and_oracle_agree_on_finite_instances() {
    let t0 = Instant::now();
    let cases = finite_cases();
    assert!(cases.len() >= 15, "only {} instances", cases.len());
    for (i, case) in cases.iter().enumerate() {
        let label = format!("case {i}: {}", case.formula);
        let system = parse_rpds(&case.system).unwrap();
        let start = parse_id(case.start, &system).unwrap();
        let bindings = case
            .bindings
            .iter()
            .map(|(name, text)| (name.to_string(), parse_ra(text).unwrap()))
            .collect();
        let formula = parse_ltl(case.formula).unwrap();
        let inst = build_instance(system, bindings, formula, start).unwrap();

        let checked = cmd_check(&inst, &McOptions::default(), false).unwrap();
        let oracled = cmd_oracle(&inst, 10_000, 16, false).unwrap();
        assert_eq!(checked.verdict, case.expect, "{label} (engine)");
        assert_eq!(oracled.verdict, case.expect, "{label} (oracle)");

        if checked.verdict == "VIOLATED" {
            let lasso = checked.raw_lasso.as_ref().unwrap_or_else(|| {
                panic!("{label}: a violation within bounds must carry a witness")
            });
            let atoms = AtomTable::new(inst.valuation.keys().cloned()).unwrap();
            let holds =
                eval_word(&inst.formula, &atoms, &lasso.stem_letters, &lasso.cycle_letters)
                    .unwrap();
            assert!(!holds, "{label}: the witness word satisfies the formula");
        }
    }
    assert!(t0.elapsed() < Duration::from_secs(300), "took {:?}", t0.elapsed());
}

#[test]
fn c11_reduced_systems_respect_the_size_bounds() {
    let mut constructions: Vec<Rpds> = vec![
        example_system(),
        parse_rpds(&bundled("pingpong.rpds")).unwrap(),
        parse_rpds(DEEP_SYSTEM).unwrap(),
        parse_rpds(ROTOR_SYSTEM).unwrap(),
        parse_rpds(HALT_SYSTEM).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(64);
    for _ in 0..25 {
        let k = rng.gen_range(1..=2);
        let states = rng.gen_range(1..=4);
        let rules = rng.gen_range(1..=8);
        constructions.push(random_rpds(&mut rng, k, states, rules));
    }
    for m in &constructions {
        let reduced = reduce_rpds(m).unwrap();
        let guard_count = enumerate_phi(m.k()).unwrap().len();
        let state_bound = m.states().len() * guard_count;
        let rule_bound = m.rules().len() * guard_count * guard_count;
        let states = reduced.pds().states().len();
        let rules = reduced.rules().len();
        assert!(states <= state_bound, "{states} states exceeds {state_bound}");
        assert!(rules <= rule_bound, "{rules} rules exceeds {rule_bound}");
    }
}

fn random_formula(rng: &mut StdRng, depth: u32) -> Formula {
    if depth == 0 {
        return match rng.gen_range(0..3u32) {
            0 => Formula::tt(),
            1 => Formula::atom("a"),
            _ => Formula::atom("b"),
        };
    }
    match rng.gen_range(0..6u32) {
        0 => Formula::not(random_formula(rng, depth - 1)),
        1 => Formula::and(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        2 => Formula::next(random_formula(rng, depth - 1)),
        3 => Formula::until(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        4 => Formula::eventually(random_formula(rng, depth - 1)),
        _ => Formula::always(random_formula(rng, depth - 1)),
    }
}

#[test]
fn c12_buchi_translation_matches_direct_lasso_evaluation() {
    let atoms = AtomTable::new(["a".to_string(), "b".to_string()]).unwrap();
    let mut rng = StdRng::seed_from_u64(65);
    for round in 0..1_000 {
        let depth = rng.gen_range(0..=3);
        let f = random_formula(&mut rng, depth);
        let stem_len = rng.gen_range(0..=3);
        let cycle_len = rng.gen_range(1..=3);
        let stem: Vec<Letter> = (0..stem_len).map(|_| Letter(rng.gen_range(0..4))).collect();
        let cycle: Vec<Letter> = (0..cycle_len).map(|_| Letter(rng.gen_range(0..4))).collect();
        let direct = eval_word(&f, &atoms, &stem, &cycle).unwrap();
        let buchi = to_buchi(&f, &atoms).unwrap();
        let translated = accepts_lasso(&buchi, &stem, &cycle);
        assert_eq!(
            direct, translated,
            "round {round}: {f} on stem {stem:?} cycle {cycle:?}"
        );
    }
}
