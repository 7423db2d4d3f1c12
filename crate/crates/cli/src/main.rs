use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rpmc::ltl::{parse_ltl, Formula};
use rpmc::machines::{Rpds, RpdsId};
use rpmc::oracle::{DEFAULT_MAX_NODES, DEFAULT_MAX_STACK};
use rpmc::pdsmc::McOptions;

use rpmc_cli::commands::{
    build_instance, cmd_bisim, cmd_check, cmd_enum_phi, cmd_oracle, cmd_reduce, cmd_simulate,
    Instance,
};
use rpmc_cli::format::{parse_id, parse_ra, parse_rpds, RaDoc};

/// Model-check LTL properties of register pushdown systems.
///
/// Exit codes: 0 when the property holds (or the command's check is
/// clean), 1 when it is violated, 2 on errors and exceeded resource
/// bounds.
#[derive(Parser)]
#[command(name = "rpmc", version)]
struct Cli {
    /// Emit a machine-readable JSON report instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct InstanceArgs {
    /// System description (.rpds)
    #[arg(long)]
    system: PathBuf,
    /// Start configuration (.id)
    #[arg(long)]
    start: PathBuf,
    /// Bind an atom to an acceptor: `--val atom=file.ra`, repeatable
    #[arg(long = "val", value_name = "ATOM=FILE")]
    vals: Vec<String>,
    /// The LTL formula, inline
    #[arg(long)]
    ltl: Option<String>,
    /// File containing the LTL formula
    #[arg(long)]
    ltl_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide the formula by reduction to an ordinary pushdown system
    Check {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Also render the witness at the register level
        #[arg(long)]
        concretize: bool,
        /// Cap on distinct stack annotations
        #[arg(long, default_value_t = McOptions::default().annotator_budget)]
        annotator_budget: usize,
        /// Cap on product rules
        #[arg(long, default_value_t = McOptions::default().product_rule_budget)]
        product_budget: usize,
        /// Cap on configurations visited during witness search
        #[arg(long, default_value_t = McOptions::default().witness_search_budget)]
        search_budget: usize,
        /// Stack depth cap during witness search
        #[arg(long, default_value_t = McOptions::default().witness_stack_bound)]
        stack_bound: usize,
    },
    /// Decide the formula by exact bounded exploration
    Oracle {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Refuse instances with more reachable configurations than this
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        max_nodes: usize,
        /// Refuse instances that reach deeper stacks than this
        #[arg(long, default_value_t = DEFAULT_MAX_STACK)]
        max_stack: usize,
        /// Print the explored graph
        #[arg(long)]
        dump: bool,
    },
    /// Emit the reduced pushdown system and valuation automata
    Reduce {
        /// System description (.rpds)
        #[arg(long)]
        system: PathBuf,
        /// Bind an atom to an acceptor: `--val atom=file.ra`, repeatable
        #[arg(long = "val", value_name = "ATOM=FILE")]
        vals: Vec<String>,
    },
    /// Print canonical steps of the system from a start configuration
    Simulate {
        /// System description (.rpds)
        #[arg(long)]
        system: PathBuf,
        /// Start configuration (.id)
        #[arg(long)]
        start: PathBuf,
        /// Number of steps (defaults to the script length)
        #[arg(long)]
        steps: Option<usize>,
        /// Comma-separated 0-based rule indices to fire, e.g. `0,1,2`
        #[arg(long)]
        rules: Option<String>,
    },
    /// Probe the reduction for bisimilarity around a start configuration
    Bisim {
        /// System description (.rpds)
        #[arg(long)]
        system: PathBuf,
        /// Start configuration (.id)
        #[arg(long)]
        start: PathBuf,
        /// Number of canonical steps to probe
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// List the guard alphabet for k registers
    EnumPhi {
        #[arg(short)]
        k: u32,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_system(path: &Path) -> Result<Rpds, String> {
    parse_rpds(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_start(path: &Path, system: &Rpds) -> Result<RpdsId, String> {
    parse_id(&read(path)?, system).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_bindings(vals: &[String]) -> Result<Vec<(String, RaDoc)>, String> {
    let mut out = Vec::new();
    for v in vals {
        let Some((atom, path)) = v.split_once('=') else {
            return Err(format!("--val needs the form atom=file.ra, got '{v}'"));
        };
        let path = Path::new(path);
        let doc = parse_ra(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
        out.push((atom.to_string(), doc));
    }
    Ok(out)
}

fn load_formula(ltl: &Option<String>, ltl_file: &Option<PathBuf>) -> Result<Formula, String> {
    let text = match (ltl, ltl_file) {
        (Some(t), None) => t.clone(),
        (None, Some(p)) => read(p)?,
        (Some(_), Some(_)) => return Err("give either --ltl or --ltl-file, not both".into()),
        (None, None) => return Err("a formula is required: --ltl or --ltl-file".into()),
    };
    parse_ltl(text.trim()).map_err(|e| e.to_string())
}

fn load_instance(args: &InstanceArgs) -> Result<Instance, String> {
    let system = load_system(&args.system)?;
    let start = load_start(&args.start, &system)?;
    let bindings = load_bindings(&args.vals)?;
    let formula = load_formula(&args.ltl, &args.ltl_file)?;
    build_instance(system, bindings, formula, start).map_err(|e| e.to_string())
}

fn parse_script(rules: &str) -> Result<Vec<usize>, String> {
    rules
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad rule index '{}' in --rules", t.trim()))
        })
        .collect()
}

fn emit<R: Serialize>(json: bool, report: &R, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
    } else {
        print!("{}", text());
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.cmd {
        Cmd::Check {
            inst,
            concretize,
            annotator_budget,
            product_budget,
            search_budget,
            stack_bound,
        } => {
            let instance = load_instance(inst)?;
            let opts = McOptions {
                annotator_budget: *annotator_budget,
                product_rule_budget: *product_budget,
                witness_search_budget: *search_budget,
                witness_stack_bound: *stack_bound,
            };
            let report =
                cmd_check(&instance, &opts, *concretize).map_err(|e| e.to_string())?;
            emit(cli.json, &report, || report.render());
            Ok(report.exit_code())
        }
        Cmd::Oracle { inst, max_nodes, max_stack, dump } => {
            let instance = load_instance(inst)?;
            let report = cmd_oracle(&instance, *max_nodes, *max_stack, *dump)
                .map_err(|e| e.to_string())?;
            emit(cli.json, &report, || report.render());
            Ok(report.exit_code())
        }
        Cmd::Reduce { system, vals } => {
            let system = load_system(system)?;
            let bindings = load_bindings(vals)?;
            let report = cmd_reduce(&system, bindings).map_err(|e| e.to_string())?;
            emit(cli.json, &report, || report.render());
            Ok(report.exit_code())
        }
        Cmd::Simulate { system, start, steps, rules } => {
            let system = load_system(system)?;
            let start = load_start(start, &system)?;
            let script = rules.as_deref().map(parse_script).transpose()?;
            let steps = match (steps, &script) {
                (Some(n), _) => *n,
                (None, Some(s)) => s.len(),
                (None, None) => return Err("either --steps or --rules is required".into()),
            };
            let report = cmd_simulate(&system, &start, steps, script.as_deref())
                .map_err(|e| e.to_string())?;
            emit(cli.json, &report, || report.render());
            Ok(report.exit_code())
        }
        Cmd::Bisim { system, start, depth } => {
            let system = load_system(system)?;
            let start = load_start(start, &system)?;
            let report = cmd_bisim(&system, &start, *depth).map_err(|e| e.to_string())?;
            emit(cli.json, &report, || report.render());
            Ok(report.exit_code())
        }
        Cmd::EnumPhi { k } => {
            let report = cmd_enum_phi(*k).map_err(|e| e.to_string())?;
            emit(cli.json, &report, || report.render());
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            if cli.json {
                println!("{}", serde_json::json!({ "error": msg }));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(2)
        }
    }
}
