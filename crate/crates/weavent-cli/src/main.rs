//! `weavent` command line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use weavent::duality::{dom_of_morphism, epes_isomorphism, Epes};
use weavent::io::{self, DomainDoc, EsDoc, GrammarDoc};
use weavent::rewrite::{grammar_from_es, trace_domain, Grammar};
use weavent::{
    async_domain, check_axioms, connect_es, dom_of_es, dot, epes_dom, epes_ev, es_isomorphic, ev_of_domain, ev_wd,
    fuse, hasse_as_async, poset_isomorphic, unfold, validate_domain_morphism, validate_es_morphism, zeta, AsyncGraph,
    EventStructure, FiniteDomain,
};

#[derive(Parser)]
#[command(name = "weavent", version, about = "Event structures, domains and fusing graph rewriting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate one structure, or a morphism between two event structures.
    Check(CheckArgs),
    /// Translate between event structures, domains and equivalence structures.
    Convert(ConvertArgs),
    /// Replace an event structure by the connected one with the same configurations.
    Connect(OutputArgs),
    /// Enumerate the trace domain of a grammar up to a depth.
    Derive(DeriveArgs),
    /// Build the grammar of a connected event structure and check its traces.
    Synth(SynthArgs),
    /// Run the round-trip checks for an event structure, domain or equivalence structure.
    Roundtrip(Inputs),
    /// Evaluate the interval axioms on a domain.
    Axioms(Inputs),
    /// Validate an asynchronous graph, or the Hasse diagram of a domain.
    Async(AsyncArgs),
    /// Write a structure as DOT.
    Emit(EmitArgs),
}

#[derive(Args, Default)]
struct Inputs {
    #[arg(long, value_name = "FILE")]
    es: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    domain: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    grammar: Option<PathBuf>,
    #[arg(long = "async", value_name = "FILE")]
    asynch: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    epes: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Target event structure of the morphism given by `--map`.
    #[arg(long, value_name = "FILE", requires = "map")]
    es_target: Option<PathBuf>,
    /// Partial event map as a JSON object from source to target event names.
    #[arg(long, value_name = "FILE", requires = "es_target")]
    map: Option<PathBuf>,
    /// Require every cover to map to a cover in the induced domain morphism.
    #[arg(long)]
    strict_morphism: bool,
    /// Omit the downward cube direction when checking asynchronous graphs.
    #[arg(long)]
    weak: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Es,
    Domain,
    Epes,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    to: Option<Target>,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_name = "FILE")]
    es: PathBuf,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long, value_name = "FILE")]
    grammar: PathBuf,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    fusion_safe: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_name = "FILE")]
    es: PathBuf,
    /// Defaults to the number of rules.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    fusion_safe: bool,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AsyncArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    weak: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value = "dot")]
    format: Format,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

/// Invalid input or unusable options: exit code 2.
struct InputError {
    kind: &'static str,
    message: String,
    path: Option<PathBuf>,
}

impl InputError {
    fn usage(message: impl Into<String>) -> Self {
        InputError { kind: "usage", message: message.into(), path: None }
    }

    fn at(path: &Path, kind: &'static str, message: impl Into<String>) -> Self {
        InputError { kind, message: message.into(), path: Some(path.to_path_buf()) }
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("error".into(), json!(self.kind));
        m.insert("message".into(), json!(self.message));
        if let Some(p) = &self.path {
            m.insert("input".into(), json!(p.display().to_string()));
        }
        Value::Object(m)
    }
}

type Outcome<T> = Result<T, InputError>;

struct Report {
    verb: &'static str,
    inputs: Map<String, Value>,
    results: Map<String, Value>,
    witnesses: Map<String, Value>,
    ok: bool,
}

impl Report {
    fn new(verb: &'static str) -> Self {
        Report { verb, inputs: Map::new(), results: Map::new(), witnesses: Map::new(), ok: true }
    }

    fn input(&mut self, key: &str, path: &Path) {
        self.inputs.insert(key.into(), json!(path.display().to_string()));
    }

    fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.into(), value.into());
    }

    /// Records a property; a failure carries its witness and fails the report.
    fn property(&mut self, key: &str, holds: bool, witness: impl FnOnce() -> Value) {
        self.results.insert(key.into(), json!(holds));
        if !holds {
            self.ok = false;
            self.witnesses.insert(key.into(), witness());
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "verb": self.verb,
            "inputs": self.inputs,
            "results": self.results,
            "witnesses": self.witnesses,
        })
    }
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| InputError::at(path, "io", e.to_string()))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> weavent::Result<T>) -> Outcome<T> {
    parse(&read(path)?).map_err(|e| InputError::at(path, "invalid_input", e.to_string()))
}

fn failed(path: &Path, e: weavent::Error) -> InputError {
    InputError::at(path, "unsupported", e.to_string())
}

fn write(path: &Path, text: &str) -> Outcome<()> {
    std::fs::write(path, text).map_err(|e| InputError::at(path, "io", e.to_string()))
}

enum Loaded {
    Es(PathBuf, EventStructure),
    Domain(PathBuf, FiniteDomain),
    Grammar(PathBuf, Grammar),
    Async(PathBuf, AsyncGraph),
    Epes(PathBuf, Epes),
}

impl Loaded {
    fn key(&self) -> &'static str {
        match self {
            Loaded::Es(..) => "es",
            Loaded::Domain(..) => "domain",
            Loaded::Grammar(..) => "grammar",
            Loaded::Async(..) => "async",
            Loaded::Epes(..) => "epes",
        }
    }

    fn path(&self) -> &Path {
        match self {
            Loaded::Es(p, _) | Loaded::Domain(p, _) | Loaded::Grammar(p, _) | Loaded::Async(p, _) | Loaded::Epes(p, _) => p,
        }
    }
}

/// Loads the single structure given, restricted to the allowed kinds.
fn load_one(inputs: &Inputs, allowed: &[&str]) -> Outcome<Loaded> {
    let given: Vec<(&str, &PathBuf)> = [
        ("es", &inputs.es),
        ("domain", &inputs.domain),
        ("grammar", &inputs.grammar),
        ("async", &inputs.asynch),
        ("epes", &inputs.epes),
    ]
    .into_iter()
    .filter_map(|(k, p)| p.as_ref().map(|p| (k, p)))
    .collect();
    let flags = allowed.iter().map(|k| format!("--{k}")).collect::<Vec<_>>().join(", ");
    let [(key, path)] = given.as_slice() else {
        return Err(InputError::usage(format!("give exactly one of {flags}")));
    };
    if !allowed.contains(key) {
        return Err(InputError::usage(format!("--{key} is not accepted here; use one of {flags}")));
    }
    let p = path.to_path_buf();
    Ok(match *key {
        "es" => Loaded::Es(p.clone(), load(&p, io::parse_es)?),
        "domain" => Loaded::Domain(p.clone(), load(&p, io::parse_domain)?),
        "grammar" => Loaded::Grammar(p.clone(), load(&p, io::parse_grammar)?),
        "async" => Loaded::Async(p.clone(), load(&p, io::parse_async)?),
        _ => Loaded::Epes(p.clone(), load(&p, io::parse_epes)?),
    })
}

fn names(d: &FiniteDomain, xs: &[usize]) -> Value {
    let mut v: Vec<&str> = xs.iter().map(|&x| d.name(x)).collect();
    v.sort_unstable();
    json!(v)
}

fn domain_summary(r: &mut Report, d: &FiniteDomain) {
    let alg = d.algebraicity();
    r.result("elements", d.len());
    r.result("covers", d.covers().len());
    r.result("irreducibles", names(d, &d.irreducibles()));
    r.result("primes", names(d, &d.primes()));
    r.result("weak_primes", names(d, &d.weak_primes()));
    r.result("prime_algebraic", alg.prime_algebraic);
    let classes: Vec<Value> = d.interchange_classes().iter().map(|c| names(d, c)).collect();
    r.result("interchange_classes", classes);
}

fn check_weak_prime(r: &mut Report, d: &FiniteDomain) {
    let failure = d.weak_prime_failure();
    r.property("weak_prime_algebraic", failure.is_none(), || {
        json!({ "irreducible_not_weak_prime": d.name(failure.unwrap()) })
    });
}

fn check(args: &CheckArgs) -> Outcome<Report> {
    let mut r = Report::new("check");
    if let (Some(target), Some(map)) = (&args.es_target, &args.map) {
        let src_path = args.inputs.es.as_ref().ok_or_else(|| InputError::usage("--map needs --es"))?;
        let src = load(src_path, io::parse_es)?;
        let dst = load(target, io::parse_es)?;
        let f = io::parse_event_map(&read(map)?, &src, &dst).map_err(|e| InputError::at(map, "invalid_input", e.to_string()))?;
        r.input("es", src_path);
        r.input("es_target", target);
        r.input("map", map);
        let v = validate_es_morphism(&f, &src, &dst);
        r.property("es_morphism", v.is_ok(), || {
            let v = v.clone().unwrap_err();
            json!({ "condition": v.condition, "witness": v.witness })
        });
        if v.is_ok() {
            let g = dom_of_morphism(&f, &src, &dst).map_err(|e| failed(map, e))?;
            let (d1, d2) = (dom_of_es(&src).map_err(|e| failed(src_path, e))?, dom_of_es(&dst).map_err(|e| failed(target, e))?);
            let dv = validate_domain_morphism(&g, &d1, &d2, args.strict_morphism);
            r.result("strict", args.strict_morphism);
            r.property("domain_morphism", dv.is_ok(), || {
                let v = dv.clone().unwrap_err();
                json!({ "condition": v.condition, "witness": v.witness })
            });
        }
        return Ok(r);
    }
    let loaded = load_one(&args.inputs, &["es", "domain", "grammar", "async", "epes"])?;
    r.input(loaded.key(), loaded.path());
    match &loaded {
        Loaded::Es(_, es) => {
            let c = es.classify();
            r.result("events", es.len());
            r.result("configurations", es.configurations().len());
            r.result("stable", c.stable);
            r.result("prime", c.prime);
            r.result("connected", c.connected);
            let issues = es.liveness_issues();
            r.property("live", issues.is_empty(), || json!(issues));
        }
        Loaded::Domain(_, d) => {
            domain_summary(&mut r, d);
            check_weak_prime(&mut r, d);
        }
        Loaded::Grammar(_, g) => {
            let rules: Vec<&str> = g.rules.iter().map(|x| x.name.as_str()).collect();
            let fusing: Vec<&str> = g.rules.iter().filter(|x| !x.is_right_linear()).map(|x| x.name.as_str()).collect();
            r.result("rules", json!(rules));
            r.result("fusing_rules", json!(fusing));
            r.result("start_nodes", g.start.node_count());
            r.result("start_edges", g.start.edge_count());
        }
        Loaded::Async(p, a) => async_report(&mut r, a, args.weak, p)?,
        Loaded::Epes(_, e) => {
            r.result("events", e.len());
            r.result("classes", e.class_names().len());
            r.result("connected", e.is_connected());
            check_weak_prime(&mut r, &epes_dom(e));
        }
    }
    Ok(r)
}

fn emit_output(r: &mut Report, output: Option<&PathBuf>, text: String, value: Value) -> Outcome<()> {
    match output {
        Some(p) => {
            write(p, &text)?;
            r.result("written", json!(p.display().to_string()));
        }
        None => r.result("output", value),
    }
    Ok(())
}

fn doc(value: Value) -> (String, Value) {
    (serde_json::to_string_pretty(&value).expect("json") + "\n", value)
}

fn convert(args: &ConvertArgs) -> Outcome<Report> {
    let mut r = Report::new("convert");
    let loaded = load_one(&args.inputs, &["es", "domain", "epes"])?;
    r.input(loaded.key(), loaded.path());
    let path = loaded.path().to_path_buf();
    let fail = |e| failed(&path, e);
    let (kind, (text, value)) = match (&loaded, args.to) {
        (Loaded::Es(_, es), None | Some(Target::Domain)) => ("domain", doc(json!(DomainDoc::from_domain(&dom_of_es(es).map_err(fail)?)))),
        (Loaded::Es(_, es), Some(Target::Epes)) => ("epes", doc(json!(EsDoc::from_epes(&unfold(es).map_err(fail)?)))),
        (Loaded::Domain(_, d), None | Some(Target::Es)) => ("es", doc(json!(EsDoc::from_es(&ev_of_domain(d).map_err(fail)?)))),
        (Loaded::Domain(_, d), Some(Target::Epes)) => ("epes", doc(json!(EsDoc::from_epes(&epes_ev(d).map_err(fail)?)))),
        (Loaded::Epes(_, p), None | Some(Target::Domain)) => ("domain", doc(json!(DomainDoc::from_domain(&epes_dom(p))))),
        (Loaded::Epes(_, p), Some(Target::Es)) => ("es", doc(json!(EsDoc::from_es(&fuse(p).map_err(fail)?)))),
        _ => return Err(InputError::usage("conversion to the same kind of structure")),
    };
    r.result("kind", kind);
    emit_output(&mut r, args.output.as_ref(), text, value)?;
    Ok(r)
}

fn connect(args: &OutputArgs) -> Outcome<Report> {
    let mut r = Report::new("connect");
    let es = load(&args.es, io::parse_es)?;
    r.input("es", &args.es);
    let c = connect_es(&es).map_err(|e| failed(&args.es, e))?;
    r.result("events_before", es.len());
    r.result("events_after", c.len());
    r.result("already_connected", es_isomorphic(&c, &es));
    let (text, value) = doc(json!(EsDoc::from_es(&c)));
    emit_output(&mut r, args.output.as_ref(), text, value)?;
    Ok(r)
}

fn traces(r: &mut Report, g: &Grammar, depth: usize, fusion_safe: bool, path: &Path) -> Outcome<FiniteDomain> {
    let t = trace_domain(g, depth, fusion_safe).map_err(|e| failed(path, e))?;
    let d = t.domain;
    r.result("depth", depth);
    r.result("fusion_safe", fusion_safe);
    r.result("trace_classes", d.len());
    r.result("elements", names(&d, &(0..d.len()).collect::<Vec<_>>()));
    r.result("covers", d.covers().len());
    r.result("prime", d.algebraicity().prime_algebraic);
    check_weak_prime(r, &d);
    Ok(d)
}

fn derive(args: &DeriveArgs) -> Outcome<Report> {
    let mut r = Report::new("derive");
    let g = load(&args.grammar, io::parse_grammar)?;
    r.input("grammar", &args.grammar);
    let d = traces(&mut r, &g, args.depth, args.fusion_safe, &args.grammar)?;
    if r.ok {
        let ev = ev_of_domain(&d).map_err(|e| failed(&args.grammar, e))?;
        r.result("events", json!(ev.names()));
    }
    Ok(r)
}

fn synth(args: &SynthArgs) -> Outcome<Report> {
    let mut r = Report::new("synth");
    let es = load(&args.es, io::parse_es)?;
    r.input("es", &args.es);
    let g = grammar_from_es(&es).map_err(|e| failed(&args.es, e))?;
    r.result("rules", g.rules.len());
    r.result("start_nodes", g.start.node_count());
    let depth = args.depth.unwrap_or(g.rules.len());
    let d = traces(&mut r, &g, depth, args.fusion_safe, &args.es)?;
    if !args.fusion_safe {
        let back = ev_of_domain(&d).map_err(|e| failed(&args.es, e))?;
        r.property("traces_give_input", es_isomorphic(&back, &es), || {
            json!({ "events": back.names() })
        });
    }
    let (text, value) = doc(json!(GrammarDoc::from_grammar(&g)));
    emit_output(&mut r, args.output.as_ref(), text, value)?;
    Ok(r)
}

fn roundtrip(inputs: &Inputs) -> Outcome<Report> {
    let mut r = Report::new("roundtrip");
    let loaded = load_one(inputs, &["es", "domain", "epes"])?;
    r.input(loaded.key(), loaded.path());
    let path = loaded.path().to_path_buf();
    let fail = |e| failed(&path, e);
    match &loaded {
        Loaded::Es(_, es) => {
            let d = dom_of_es(es).map_err(fail)?;
            let back = ev_of_domain(&d).map_err(fail)?;
            let connected = es.classify().connected;
            r.result("connected", connected);
            r.property("dom_of_ev_of_dom", poset_isomorphic(&dom_of_es(&back).map_err(fail)?, &d), || {
                json!({ "elements": d.len() })
            });
            if connected {
                r.property("ev_of_dom_is_identity", es_isomorphic(&back, es), || json!({ "events": back.names() }));
            }
        }
        Loaded::Domain(_, d) => {
            check_weak_prime(&mut r, d);
            if r.ok {
                let ev = ev_of_domain(d).map_err(fail)?;
                let back = dom_of_es(&ev).map_err(fail)?;
                r.property("dom_of_ev_is_identity", poset_isomorphic(&back, d), || json!({ "elements": back.len() }));
                match ev_wd(d) {
                    Ok(wd) => r.property("interval_events_match", es_isomorphic(&wd, &ev), || json!({ "events": wd.names() })),
                    Err(e) => r.property("interval_events_match", false, || json!(e.to_string())),
                }
                match zeta(d) {
                    Ok(z) => {
                        r.result("interval_classes", z.zeta.len());
                        r.property("interval_bijection", true, || Value::Null);
                    }
                    Err(e) => r.property("interval_bijection", false, || json!(e.to_string())),
                }
            }
        }
        Loaded::Epes(_, p) => {
            let f = fuse(p).map_err(fail)?;
            let back = unfold(&f).map_err(fail)?;
            r.property("unfold_of_fuse_is_identity", epes_isomorphism(&back, p).is_some(), || {
                json!({ "events": back.base().names() })
            });
            check_weak_prime(&mut r, &epes_dom(p));
        }
        _ => unreachable!(),
    }
    Ok(r)
}

fn axioms(inputs: &Inputs) -> Outcome<Report> {
    let mut r = Report::new("axioms");
    let Loaded::Domain(p, d) = load_one(inputs, &["domain"])? else { unreachable!() };
    r.input("domain", &p);
    let a = check_axioms(&d);
    for (k, v) in [("F", a.f), ("C", a.c), ("R", a.r), ("V", a.v)] {
        r.property(k, v, || json!(a.witnesses.get(k)));
    }
    r.result("I", a.i);
    if let Some(w) = a.witnesses.get("I") {
        r.witnesses.insert("I".into(), json!(w));
    }
    let classes = weavent::interval_classes(&d);
    r.result("intervals", classes.intervals.len());
    r.result("interval_classes", classes.count);
    Ok(r)
}

fn async_report(r: &mut Report, a: &AsyncGraph, weak: bool, path: &Path) -> Outcome<()> {
    let rep = a.validate().map_err(|e| failed(path, e))?;
    r.result("weak", weak);
    r.result("nodes", a.nodes().len());
    r.result("edges", a.edges().len());
    r.result("squares", a.squares().len());
    for (k, v) in [
        ("axiom1", rep.axiom1),
        ("axiom2", rep.axiom2),
        ("cube_up", rep.cube_up),
        ("coherence", rep.coherence),
    ] {
        r.property(k, v, || json!(rep.witnesses.get(k)));
    }
    if weak {
        r.result("cube_down", rep.cube_down);
    } else {
        r.property("cube_down", rep.cube_down, || json!(rep.witnesses.get("cube_down")));
    }
    r.result("prime", rep.prime);
    if let Some(w) = rep.witnesses.get("prime") {
        r.witnesses.insert("prime".into(), json!(w));
    }
    if rep.holds(true) && rep.prime {
        let d = async_domain(a).map_err(|e| failed(path, e))?;
        r.result("path_classes", d.len());
    }
    Ok(())
}

fn asynch(args: &AsyncArgs) -> Outcome<Report> {
    let mut r = Report::new("async");
    match load_one(&args.inputs, &["async", "domain"])? {
        Loaded::Async(p, a) => {
            r.input("async", &p);
            async_report(&mut r, &a, args.weak, &p)?;
        }
        Loaded::Domain(p, d) => {
            r.input("domain", &p);
            let a = hasse_as_async(&d).map_err(|e| failed(&p, e))?;
            async_report(&mut r, &a, args.weak, &p)?;
            if let Ok(back) = async_domain(&a) {
                r.property("paths_give_input", poset_isomorphic(&back, &d), || json!({ "elements": back.len() }));
            }
        }
        _ => unreachable!(),
    }
    Ok(r)
}

fn emit(args: &EmitArgs) -> Outcome<Option<String>> {
    let Format::Dot = args.format;
    let loaded = load_one(&args.inputs, &["es", "domain", "grammar", "async", "epes"])?;
    let path = loaded.path().to_path_buf();
    let text = match &loaded {
        Loaded::Es(_, es) => dot::poset_dot(&dom_of_es(es).map_err(|e| failed(&path, e))?),
        Loaded::Domain(_, d) => dot::poset_dot(d),
        Loaded::Grammar(_, g) => dot::graph_dot(&g.start),
        Loaded::Async(_, a) => dot::async_dot(a),
        Loaded::Epes(_, p) => dot::poset_dot(&epes_dom(p)),
    };
    match &args.output {
        Some(p) => {
            write(p, &text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit_stdout(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check(a) => check(a),
        Command::Convert(a) => convert(a),
        Command::Connect(a) => connect(a),
        Command::Derive(a) => derive(a),
        Command::Synth(a) => synth(a),
        Command::Roundtrip(a) => roundtrip(a),
        Command::Axioms(a) => axioms(a),
        Command::Async(a) => asynch(a),
        Command::Emit(a) => match emit(a) {
            Ok(text) => {
                if let Some(t) = text {
                    emit_stdout(&t);
                }
                return ExitCode::SUCCESS;
            }
            Err(e) => Err(e),
        },
    };
    match outcome {
        Ok(report) => {
            emit_stdout(&(serde_json::to_string_pretty(&report.to_json()).expect("json") + "\n"));
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string_pretty(&e.to_json()).expect("json"));
            ExitCode::from(2)
        }
    }
}
