use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::builder::TypedValueParser;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use finorder::hierarchy::{verify_stage_properties, DEFAULT_BUDGET};
use finorder::hsets::abstract_product_base;
use finorder::maps::{CertificateKind, DEFAULT_SEARCH_BUDGET};
use finorder::order::PreorderJson;
use finorder::suites::{self, antichain3_base, Suite, SuiteConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use finorder::{BasePoset, Error, FinitePreorder, Hierarchy, Id, Universe};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "finorder", version, about = "Finite order theory: antichain hierarchies, open maps and dualities")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Include elapsed wall time in the output (breaks byte-for-byte reproducibility)
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build and inspect the antichain hierarchy over a base
    Hierarchy {
        #[command(subcommand)]
        action: HierarchyAction,
    },
    /// Run one of the exhaustive verification suites
    Verify(VerifyArgs),
    /// Search for product obstruction certificates
    Obstruct(ObstructArgs),
}

#[derive(Subcommand)]
enum HierarchyAction {
    /// Build stages 0..=depth and report level sizes
    Build(HierarchyArgs),
    /// Level sizes, growth and stage property checks
    Stats(HierarchyArgs),
    /// Export the hierarchy as JSON, or one stage as a DOT Hasse diagram
    Export {
        #[command(flatten)]
        args: HierarchyArgs,
        /// Stage drawn with --format dot (defaults to the top stage)
        #[arg(long)]
        stage: Option<usize>,
    },
}

#[derive(Args, Serialize)]
struct HierarchyArgs {
    /// thm33, antichain3 or file:PATH
    #[arg(long, default_value = "thm33")]
    base: String,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Maximum number of elements in any stage
    #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    budget: usize,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// lemma23, lemma24, lemma31, lemma32, thm26, coreflect, duality or bao
    suite: String,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    budget: usize,
    /// Candidate limit for each open-map search
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    search_budget: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    max_size: Option<usize>,
    /// Largest Kripke frame enumerated exhaustively
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(0..=4).map(|v| v as usize))]
    states: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Args, Serialize)]
#[command(group(ArgGroup::new("target").required(true).args(["poset", "all_posets"])))]
struct ObstructArgs {
    /// singleton, sierpinski, product2x2, chain3, discrete2 or file:PATH
    #[arg(long)]
    poset: Option<String>,
    /// Every poset with at most this many elements, up to isomorphism
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=5).map(|v| v as usize))]
    all_posets: Option<usize>,
    /// Last hierarchy stage searched
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    search_budget: u64,
}

/// What a command produced: a JSON result, its text rendering, an optional
/// DOT rendering and whether it found violations.
struct Outcome {
    result: Value,
    text: String,
    dot: Option<String>,
    code: u8,
}

enum Failure {
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, config, run) = match &cli.command {
        Command::Hierarchy { action } => {
            let (name, args, stage) = match action {
                HierarchyAction::Build(a) => ("hierarchy build", a, None),
                HierarchyAction::Stats(a) => ("hierarchy stats", a, None),
                HierarchyAction::Export { args, stage } => ("hierarchy export", args, *stage),
            };
            let mut config = json!({ "command": name, "format": cli.format, "args": args });
            if let Some(s) = stage {
                config["stage"] = json!(s);
            }
            (name, config, cmd_hierarchy(action, args, stage, cli.format))
        }
        Command::Verify(a) => ("verify", json!({ "command": "verify", "args": a }), cmd_verify(a, cli.format)),
        Command::Obstruct(a) => ("obstruct", json!({ "command": "obstruct", "args": a }), cmd_obstruct(a, cli.format)),
    };
    let elapsed = cli.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    let outcome = match run {
        Ok(o) => o,
        Err(Failure::Core(e)) => {
            eprintln!("finorder {name}: {e}");
            if let Error::BudgetExhausted { partial: Some(h), .. } = &e {
                eprintln!("partial level sizes: {:?}", level_sizes(h));
            }
            return ExitCode::from(exit_code(&e));
        }
        Err(Failure::Io(e)) => {
            eprintln!("finorder {name}: {e}");
            return ExitCode::from(1);
        }
    };
    let rendered = match cli.format {
        Format::Json => {
            let mut report = json!({
                "schema": SCHEMA,
                "tool": "finorder",
                "version": env!("CARGO_PKG_VERSION"),
                "config": config,
                "config_hash": config_hash(&config),
                "result": outcome.result,
            });
            if let Some(ms) = elapsed {
                report["elapsed_ms"] = json!(ms);
            }
            serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
        }
        Format::Text => {
            let mut text = outcome.text;
            if let Some(ms) = elapsed {
                text.push_str(&format!("elapsed: {ms:.1} ms\n"));
            }
            text
        }
        Format::Dot => outcome.dot.expect("dot support checked before running"),
    };
    if let Err(e) = write_output(cli.out.as_deref(), &rendered) {
        eprintln!("finorder {name}: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.code)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExhausted { .. } | Error::SearchBudget { .. } => 2,
        _ => 1,
    }
}

fn config_hash(config: &Value) -> String {
    format!("{:x}", Sha256::digest(config.to_string().as_bytes()))
}

fn write_output(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn level_sizes(h: &Hierarchy) -> Vec<usize> {
    h.levels().iter().map(Vec::len).collect()
}

fn no_dot(format: Format, what: &str) -> Result<(), Failure> {
    if format == Format::Dot {
        return Err(Error::Invalid(format!("{what} has no DOT output")).into());
    }
    Ok(())
}

#[derive(Deserialize)]
struct BaseFile {
    atoms: Vec<String>,
    #[serde(default)]
    less: Vec<(String, String)>,
}

fn load_base(spec: &str) -> Result<(Universe, Vec<Id>), Failure> {
    match spec {
        "thm33" => {
            let (u, m) = abstract_product_base();
            Ok((u, m.to_vec()))
        }
        "antichain3" => {
            let (u, m) = antichain3_base();
            Ok((u, m.to_vec()))
        }
        _ => {
            let path = spec.strip_prefix("file:").ok_or_else(|| {
                Error::Invalid(format!("unknown base {spec:?}; expected thm33, antichain3 or file:PATH"))
            })?;
            let file: BaseFile = serde_json::from_str(&fs::read_to_string(path)?).map_err(Error::from)?;
            let index = |label: &str| {
                file.atoms
                    .iter()
                    .position(|a| a == label)
                    .ok_or_else(|| Error::Invalid(format!("unknown atom {label:?} in \"less\"")))
            };
            let pairs = file
                .less
                .iter()
                .map(|(a, b)| Ok((index(a)?, index(b)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            let order = FinitePreorder::closure(file.atoms.len(), &pairs)?;
            let base = BasePoset::new(file.atoms, order)?;
            let u = Universe::new(base);
            let m = u.ids().collect();
            Ok((u, m))
        }
    }
}

fn cmd_hierarchy(
    action: &HierarchyAction,
    args: &HierarchyArgs,
    stage: Option<usize>,
    format: Format,
) -> Result<Outcome, Failure> {
    let is_export = matches!(action, HierarchyAction::Export { .. });
    if !is_export {
        no_dot(format, "this hierarchy action")?;
    }
    let (mut u, m) = load_base(&args.base)?;
    let h = Hierarchy::build(&m, args.depth, args.budget, &mut u)?;
    let sizes = level_sizes(&h);
    let base: Vec<String> = m.iter().map(|&id| u.render(id)).collect();
    let mut text = format!("base: {}\n", base.join(" "));
    for (alpha, n) in sizes.iter().enumerate() {
        text.push_str(&format!("stage {alpha}: {n}\n"));
    }
    let mut result = json!({ "base": base, "level_sizes": sizes, "growth": h.growth_stats() });
    let mut code = 0;
    let mut dot = None;
    match action {
        HierarchyAction::Build(_) => {
            let fresh: Vec<Vec<String>> =
                (1..=h.depth()).map(|a| h.fresh(a).iter().map(|&x| u.render(x)).collect()).collect();
            if let Some(first) = fresh.first().filter(|f| f.len() <= 16) {
                text.push_str(&format!("new at stage 1: {}\n", first.join(" ")));
            }
            result["fresh"] = json!(fresh);
        }
        HierarchyAction::Stats(_) => {
            let report = verify_stage_properties(&h, &u);
            for c in &report.checks {
                let status = if c.witness.is_none() { "ok" } else { "FAILED" };
                text.push_str(&format!("stage {} checks: {status}\n", c.stage));
            }
            text.push_str(&format!("growth: {:?}\n", h.growth_stats()));
            if !report.passed() {
                code = 1;
            }
            result["checks"] = json!(report.checks);
            result["violations"] = json!(report.violations());
        }
        HierarchyAction::Export { .. } => {
            let alpha = stage.unwrap_or(h.depth());
            if alpha > h.depth() {
                return Err(Error::Invalid(format!("stage {alpha} exceeds depth {}", h.depth())).into());
            }
            dot = Some(h.to_dot(alpha, &u)?);
            result = serde_json::to_value(h.to_json(&u)).map_err(Error::from)?;
            text = u.dump();
        }
    }
    Ok(Outcome { result, text, dot, code })
}

fn cmd_verify(args: &VerifyArgs, format: Format) -> Result<Outcome, Failure> {
    no_dot(format, "verify")?;
    let suite: Suite = args.suite.parse()?;
    let defaults = SuiteConfig::for_suite(suite);
    let cfg = SuiteConfig {
        depth: args.depth.unwrap_or(defaults.depth),
        budget: args.budget,
        search_budget: args.search_budget,
        seed: args.seed,
        max_size: args.max_size.unwrap_or(defaults.max_size),
        states: args.states,
        samples: args.samples,
    };
    let report = suites::run(suite, &cfg)?;
    let mut text = format!("{suite}: {} cases, {} violations\n", report.cases, report.violations);
    for w in &report.witnesses {
        text.push_str(&format!("  witness: {w}\n"));
    }
    let code = u8::from(!report.passed());
    let result = json!({ "effective": cfg, "report": report });
    Ok(Outcome { result, text, dot: None, code })
}

fn cmd_obstruct(args: &ObstructArgs, format: Format) -> Result<Outcome, Failure> {
    no_dot(format, "obstruct")?;
    let posets = match (&args.poset, args.all_posets) {
        (Some(spec), _) => vec![match spec.strip_prefix("file:") {
            Some(path) => {
                let json: PreorderJson = serde_json::from_str(&fs::read_to_string(path)?).map_err(Error::from)?;
                FinitePreorder::from_json(&json)?
            }
            None => suites::named_poset(spec)?,
        }],
        (None, Some(n)) => suites::posets_up_to(n)?,
        (None, None) => unreachable!("clap requires a target"),
    };
    let report = suites::obstruct(&posets, args.depth, args.budget, args.search_budget)?;
    let mut text = String::new();
    for c in &report.results {
        let v = &c.verdict;
        let kind = serde_json::to_value(v.certificate_kind).expect("kind serializes");
        text.push_str(&format!(
            "P={} p1={:?} p2={:?}: {} at stage {} ({})\n",
            c.poset.relation,
            c.p1,
            c.p2,
            if v.refuted() { "refuted" } else { "not refuted" },
            v.stage,
            kind.as_str().unwrap_or_default(),
        ));
    }
    text.push_str(&format!(
        "{} of {} candidates refuted by stage {}\n",
        report.refuted, report.cases, report.max_certificate_stage
    ));
    let violation = report
        .results
        .iter()
        .any(|c| c.verdict.certificate_kind == CertificateKind::InjectivityViolation);
    let code = if violation {
        1
    } else if report.all_refuted() {
        0
    } else {
        2
    };
    Ok(Outcome { result: serde_json::to_value(&report).map_err(Error::from)?, text, dot: None, code })
}
