//! The `lolab` command line.
//!
//! Exit status: 0 success, 1 violation or no solution, 2 usage or input
//! error, 3 budget exhausted.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lolab_core::aip::aip_pipeline;
use lolab_core::hypergraph::gadget_reduce;
use lolab_core::minors::{chain_condition, random_chain, Branch, ChainBounds, MinorChain};
use lolab_core::polymorph::{for_each_polymorphism, Filter, PolyChecker};
use lolab_core::recolour::{saturate, Policy, DEFAULT_BUDGET};
use lolab_core::sets::{PolyTable, SubsetMask};
use lolab_core::structure::suite::{lemma_suite, SuiteConfig};
use lolab_core::structure::{reconfig_graph, verify_structure_theorem, Conformance};
use lolab_core::templates::{lo_relation, nae_relation, z_check, Relation3, ZVerdict};

use crate::format::{self, encode_assignment, encode_chain, encode_instance, encode_table};
use crate::record::Record;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lolab", version, about = "Polymorphisms of (LO2, LO3) and LO hypergraph colouring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check that a table is a polymorphism into the target.
    Check,
    /// Enumerate all polymorphisms of the given arity.
    Enum,
    /// Saturate a table with the deterministic policy.
    Saturate,
    /// Check a table against the structure theorem.
    Structure,
    /// Components of the reconfiguration graph without small 2-sets.
    Reconfig,
    /// Run the selection argument on a chain file or on random chains.
    ChainCheck,
    /// Run the lemma suite.
    Lemmas,
    /// Gadget reduction of an instance to the (LO3, LO4) problem.
    Reduce,
    /// Integer relaxation and rounding of an instance.
    Aip,
    /// Digraph test for homomorphisms from Z into the target.
    Zcheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Enum => "enum",
            Command::Saturate => "saturate",
            Command::Structure => "structure",
            Command::Reconfig => "reconfig",
            Command::ChainCheck => "chain-check",
            Command::Lemmas => "lemmas",
            Command::Reduce => "reduce",
            Command::Aip => "aip",
            Command::Zcheck => "zcheck",
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, global = true)]
    arity: Option<usize>,
    /// lo<K> or nae<K> with K in 2..=16.
    #[arg(long, global = true, value_parser = parse_target)]
    target: Option<Target>,
    #[arg(long, global = true, value_enum, default_value_t = FilterArg::All)]
    filter: FilterArg,
    /// Node budget; accepts plain integers and forms like 1e8.
    #[arg(long, global = true, value_parser = parse_budget)]
    budget: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random chains for chain-check without an input file.
    #[arg(long, global = true)]
    count: Option<u64>,
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FilterArg {
    All,
    #[value(name = "no-small-2set")]
    NoSmall2Set,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OutputFormat {
    Text,
    Records,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Lo(usize),
    Nae(usize),
}

impl Target {
    pub fn relation(self) -> lolab_core::Result<Relation3> {
        match self {
            Target::Lo(k) => lo_relation(k),
            Target::Nae(k) => nae_relation(k),
        }
    }

    pub fn name(self) -> String {
        match self {
            Target::Lo(k) => format!("lo{k}"),
            Target::Nae(k) => format!("nae{k}"),
        }
    }
}

pub fn parse_target(s: &str) -> Result<Target, String> {
    let (make, rest): (fn(usize) -> Target, &str) = if let Some(r) = s.strip_prefix("nae") {
        (Target::Nae, r)
    } else if let Some(r) = s.strip_prefix("lo") {
        (Target::Lo, r)
    } else {
        return Err(format!("unknown target {s:?}; expected lo<K> or nae<K>"));
    };
    match rest.parse::<usize>() {
        Ok(k) if (2..=16).contains(&k) => Ok(make(k)),
        _ => Err(format!("target size in {s:?} must be an integer in 2..=16")),
    }
}

/// Integers, optionally in `<mantissa>e<exponent>` form, that fit in `u64`.
pub fn parse_budget(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let bad = || format!("budget {s:?} is not a non-negative integer");
    let (mantissa, exponent) = s.split_once(['e', 'E']).ok_or_else(bad)?;
    let mantissa: u64 = mantissa.parse().map_err(|_| bad())?;
    let exponent: u32 = exponent.parse().map_err(|_| bad())?;
    10u64.checked_pow(exponent).and_then(|p| p.checked_mul(mantissa)).ok_or_else(bad)
}

/// One logical result: a record in records mode, `text` otherwise.
struct Item {
    outcome: String,
    payload: Value,
    text: String,
}

struct Outcome {
    items: Vec<Item>,
    exit: i32,
}

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Run<T> = Result<T, UsageError>;

struct Context<'a> {
    common: &'a Common,
    input: Option<String>,
}

impl Context<'_> {
    fn input(&self, what: &str) -> Run<&str> {
        self.input.as_deref().ok_or_else(|| UsageError(format!("--input FILE with {what} is required")))
    }

    fn arity(&self) -> Run<usize> {
        self.common.arity.ok_or_else(|| UsageError("--arity is required".into()))
    }

    fn target(&self) -> Target {
        self.common.target.unwrap_or(Target::Lo(3))
    }
}

fn set_json(s: SubsetMask) -> Value {
    Value::from(s.elements().collect::<Vec<_>>())
}

fn set_text(s: SubsetMask) -> String {
    format!("{s:?}")
}

fn check(ctx: &Context) -> Run<Outcome> {
    let f = format::decode_table(ctx.input("a table")?)?;
    let target = ctx.target();
    let rel = target.relation()?;
    let w = PolyChecker::new(f.arity(), &rel)?.check(&f)?;
    let (violation, text) = match w.violation {
        Some((p, values)) => (
            json!({"partition": p.parts().map(set_json), "values": values}),
            format!(
                "polymorphism: no\nviolation: X={} Y={} Z={} values ({}, {}, {})\n",
                set_text(p.x),
                set_text(p.y),
                set_text(p.z),
                values[0],
                values[1],
                values[2]
            ),
        ),
        None => (Value::Null, "polymorphism: yes\n".to_string()),
    };
    let payload = json!({"arity": f.arity(), "levels": f.levels(), "target": target.name(), "holds": w.holds, "violation": violation});
    let exit = if w.holds { EXIT_OK } else { EXIT_VIOLATION };
    let outcome = if w.holds { "polymorphism" } else { "violation" };
    Ok(Outcome { items: vec![Item { outcome: outcome.into(), payload, text }], exit })
}

fn enumerate(ctx: &Context) -> Run<Outcome> {
    let n = ctx.arity()?;
    let target = ctx.target();
    let rel = target.relation()?;
    let filter = match ctx.common.filter {
        FilterArg::All => Filter::All,
        FilterArg::NoSmall2Set => Filter::NoSmall2Set,
    };
    let levels = rel.domain() as usize;
    let mut items = Vec::new();
    let stats = for_each_polymorphism(n, &rel, filter, ctx.common.budget.unwrap_or(u64::MAX), |values| {
        let table = PolyTable::new(n, levels, values.to_vec()).expect("enumerator yields valid tables");
        let text = encode_table(&table);
        items.push(Item { outcome: "table".into(), payload: json!({"table": text}), text });
    })?;
    let mut text = format!("count {}\n", stats.found);
    if !stats.complete {
        let _ = writeln!(text, "incomplete: budget exhausted after {} nodes", stats.nodes);
    }
    items.push(Item {
        outcome: if stats.complete { "count" } else { "budget" }.into(),
        payload: json!({"count": stats.found, "nodes": stats.nodes, "complete": stats.complete}),
        text,
    });
    Ok(Outcome { items, exit: if stats.complete { EXIT_OK } else { EXIT_BUDGET } })
}

fn saturate_cmd(ctx: &Context) -> Run<Outcome> {
    let f = format::decode_table(ctx.input("a table")?)?;
    let r = saturate(&f, &Policy::DeterministicLarge)?;
    let steps: Vec<Value> = r.path.iter().map(|s| json!({"mask": set_json(s.mask), "old": s.old})).collect();
    let mut text = format!("steps {}\n", r.path.len());
    for s in &r.path {
        let _ = writeln!(text, "recolour {} from {} to 2", set_text(s.mask), s.old);
    }
    let _ = writeln!(text, "pure: {}", if r.pure { "yes" } else { "no" });
    text.push_str(&encode_table(&r.result));
    let payload = json!({
        "input": encode_table(&f),
        "steps": steps,
        "result": encode_table(&r.result),
        "pure": r.pure,
    });
    Ok(Outcome { items: vec![Item { outcome: "saturated".into(), payload, text }], exit: EXIT_OK })
}

fn structure(ctx: &Context) -> Run<Outcome> {
    let f = format::decode_table(ctx.input("a table")?)?;
    let v = verify_structure_theorem(&f, ctx.common.budget.unwrap_or(DEFAULT_BUDGET))?;
    let (label, exit) = match v.conformance {
        Conformance::Conforms => ("conforms", EXIT_OK),
        Conformance::HypothesisUnmet => ("hypothesis-unmet", EXIT_OK),
        Conformance::Violation => ("violation", EXIT_VIOLATION),
        Conformance::Unknown => ("budget", EXIT_BUDGET),
    };
    let payload = json!({
        "arity": v.arity,
        "has_small_2set": v.has_small_2set,
        "dictating": v.dictating.map(set_json),
        "pure_saturation_dictators": v.pure_saturation_dictators,
        "pure_saturations": v.pure_saturations,
        "conformance": label,
        "dictator": v.dictator(),
    });
    let mut text = format!("conformance: {label}\n");
    if let Some(t) = v.dictator() {
        let _ = writeln!(text, "dictator: {t}");
    }
    let _ = writeln!(text, "small 2-set: {}", if v.has_small_2set { "yes" } else { "no" });
    if v.arity >= 7 && !v.has_small_2set {
        let _ = writeln!(text, "pure saturations: {}", v.pure_saturations);
    }
    Ok(Outcome { items: vec![Item { outcome: label.into(), payload, text }], exit })
}

fn reconfig(ctx: &Context) -> Run<Outcome> {
    let n = ctx.arity()?;
    let r = reconfig_graph(n, ctx.common.budget.unwrap_or(u64::MAX))?;
    let one_each = r.components.iter().all(|c| c.projections.len() == 1);
    let (label, exit) = match (r.complete, one_each) {
        (false, _) => ("budget", EXIT_BUDGET),
        (true, true) => ("one-projection-each", EXIT_OK),
        (true, false) => ("violation", EXIT_VIOLATION),
    };
    let components: Vec<Value> =
        r.components.iter().map(|c| json!({"size": c.size, "projections": c.projections})).collect();
    let payload = json!({
        "arity": r.arity,
        "vertices": r.vertices,
        "full_components": r.full_components,
        "surviving": r.surviving,
        "components": components,
        "complete": r.complete,
    });
    let mut text = format!(
        "vertices {}\ncomponents before removal {}\nsurviving {}\ncomponents {}\n",
        r.vertices,
        r.full_components,
        r.surviving,
        r.components.len()
    );
    for c in &r.components {
        let _ = writeln!(text, "component size {} projections {:?}", c.size, c.projections);
    }
    Ok(Outcome { items: vec![Item { outcome: label.into(), payload, text }], exit })
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Small2Set => "small-2set",
        Branch::LowArityDictator => "low-arity-dictator",
        Branch::Singleton1Set => "singleton-1set",
        Branch::Pair1Set => "pair-1set",
    }
}

fn chain_item(chain: &MinorChain, seed: Option<u64>) -> Run<(Item, bool)> {
    let report = chain_condition(chain)?;
    let selections: Vec<Value> =
        report.selections.iter().map(|s| json!({"set": set_json(s.set), "branch": branch_name(s.branch)})).collect();
    let arities: Vec<usize> = chain.tables().iter().map(|f| f.arity()).collect();
    let violation = report.is_violation();
    let label = match seed {
        Some(s) => format!("chain seed {s}"),
        None => "chain".to_string(),
    };
    let mut text = match report.witness {
        Some((i, j)) => format!("{label}: arities {arities:?} witness ({i}, {j})\n"),
        None => format!("{label}: arities {arities:?} VIOLATION\n{}", encode_chain(chain)),
    };
    if !report.empty_preimages.is_empty() {
        let _ = writeln!(text, "empty preimages {:?}", report.empty_preimages);
    }
    let payload = json!({
        "seed": seed,
        "arities": arities,
        "selections": selections,
        "witness": report.witness,
        "empty_preimages": report.empty_preimages,
        "chain": if violation { Value::from(encode_chain(chain)) } else { Value::Null },
    });
    let outcome = if violation { "violation" } else { "witness" };
    Ok((Item { outcome: outcome.into(), payload, text }, violation || !report.empty_preimages.is_empty()))
}

fn chain_check(ctx: &Context) -> Run<Outcome> {
    let mut items = Vec::new();
    let mut bad = false;
    if let Some(text) = ctx.input.as_deref() {
        let (item, v) = chain_item(&format::decode_chain(text)?, None)?;
        items.push(item);
        bad |= v;
    } else {
        let bounds = ChainBounds { max_arity: ctx.common.arity.unwrap_or(9), ..ChainBounds::default() };
        for seed in ctx.common.seed..ctx.common.seed + ctx.common.count.unwrap_or(1) {
            let (item, v) = chain_item(&random_chain(seed, bounds)?, Some(seed))?;
            items.push(item);
            bad |= v;
        }
    }
    Ok(Outcome { items, exit: if bad { EXIT_VIOLATION } else { EXIT_OK } })
}

fn lemmas(ctx: &Context) -> Run<Outcome> {
    let config = SuiteConfig {
        max_arity: ctx.common.arity.unwrap_or(4),
        budget: ctx.common.budget.unwrap_or(u64::MAX),
        seed: ctx.common.seed,
        ..SuiteConfig::default()
    };
    let report = lemma_suite(&config)?;
    let mut items = Vec::new();
    for r in &report.reports {
        let text = format!(
            "{:<24} n={:<2} instances {:<8} violations {}{}\n",
            r.lemma.name(),
            r.arity,
            r.instances,
            r.violations,
            if r.complete { "" } else { " (incomplete)" }
        );
        let payload = json!({
            "lemma": r.lemma.name(),
            "arity": r.arity,
            "instances": r.instances,
            "violations": r.violations,
            "first_counterexample": r.first_counterexample.as_ref().map(encode_table),
            "complete": r.complete,
        });
        let outcome = if r.violations > 0 { "violation" } else { "ok" };
        items.push(Item { outcome: outcome.into(), payload, text });
    }
    let violations = report.violations();
    // family members above the exhaustive range run under a fixed
    // pure-saturation budget; only the exhaustive part decides exit 3
    let exhaustive_done = report.reports.iter().filter(|r| r.arity <= config.max_arity).all(|r| r.complete);
    let (label, exit) = if violations > 0 {
        ("violation", EXIT_VIOLATION)
    } else if !exhaustive_done {
        ("budget", EXIT_BUDGET)
    } else {
        ("ok", EXIT_OK)
    };
    items.push(Item {
        outcome: label.into(),
        payload: json!({"violations": violations, "exhaustive_complete": exhaustive_done}),
        text: format!("violations {violations}\n"),
    });
    Ok(Outcome { items, exit })
}

fn reduce(ctx: &Context) -> Run<Outcome> {
    let h = format::decode_instance(ctx.input("an instance")?)?;
    let text = encode_instance(&gadget_reduce(&h));
    Ok(Outcome {
        items: vec![Item { outcome: "instance".into(), payload: json!({"instance": text}), text }],
        exit: EXIT_OK,
    })
}

fn aip(ctx: &Context) -> Run<Outcome> {
    let h = format::decode_instance(ctx.input("an instance")?)?;
    let item = match aip_pipeline(&h) {
        Some(a) => Item { outcome: "assignment".into(), payload: json!({"assignment": a.colours()}), text: encode_assignment(&a) },
        None => Item {
            outcome: "no-integer-solution".into(),
            payload: Value::Null,
            text: "NO_INTEGER_SOLUTION\n".into(),
        },
    };
    let exit = if item.payload.is_null() { EXIT_VIOLATION } else { EXIT_OK };
    Ok(Outcome { items: vec![item], exit })
}

fn zcheck(ctx: &Context) -> Run<Outcome> {
    let (rel, name) = match ctx.input.as_deref() {
        Some(text) => (format::decode_relation(text)?, "input".to_string()),
        None => (ctx.target().relation()?, ctx.target().name()),
    };
    let v = z_check(&rel);
    let label = match v.verdict {
        ZVerdict::NoHomToZTarget => "NO_HOM",
        ZVerdict::Inconclusive => "INCONCLUSIVE",
    };
    let edges: Vec<[u8; 2]> = v.edges.iter().map(|&(a, b)| [a, b]).collect();
    let text = format!("relation {name}\nedges {edges:?}\nverdict {label}\n");
    let payload = json!({"relation": name, "edges": edges, "verdict": label});
    Ok(Outcome { items: vec![Item { outcome: label.into(), payload, text }], exit: EXIT_OK })
}

fn args_map(cmd: Command, c: &Common) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    m.insert("command".to_string(), Value::from(cmd.name()));
    if let Some(n) = c.arity {
        m.insert("arity".into(), n.into());
    }
    if let Some(t) = c.target {
        m.insert("target".into(), t.name().into());
    }
    m.insert("filter".into(), (if c.filter == FilterArg::All { "all" } else { "no-small-2set" }).into());
    if let Some(b) = c.budget {
        m.insert("budget".into(), b.into());
    }
    m.insert("seed".into(), c.seed.into());
    if let Some(k) = c.count {
        m.insert("count".into(), k.into());
    }
    m
}

/// Runs one command line; returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let common = &cli.common;
    let input = match &common.input {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(s) => Some(s),
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot read {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None => None,
    };
    let ctx = Context { common, input };
    let result = match cli.command {
        Command::Check => check(&ctx),
        Command::Enum => enumerate(&ctx),
        Command::Saturate => saturate_cmd(&ctx),
        Command::Structure => structure(&ctx),
        Command::Reconfig => reconfig(&ctx),
        Command::ChainCheck => chain_check(&ctx),
        Command::Lemmas => lemmas(&ctx),
        Command::Reduce => reduce(&ctx),
        Command::Aip => aip(&ctx),
        Command::Zcheck => zcheck(&ctx),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(UsageError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };

    let mut out = String::new();
    match common.format {
        OutputFormat::Text => outcome.items.iter().for_each(|i| out.push_str(&i.text)),
        OutputFormat::Records => {
            let args = args_map(cli.command, common);
            for item in outcome.items {
                let r = Record::new(cli.command.name(), &args, ctx.input.as_deref(), &item.outcome, item.payload);
                out.push_str(&r.to_line());
            }
        }
    }
    let written = match &common.output {
        Some(path) => std::fs::write(path, out.as_bytes()),
        None => stdout.write_all(out.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    outcome.exit
}
