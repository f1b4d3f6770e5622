//! Command-line front end for `mlvdepth-core`: problem files, fixtures and
//! report documents.

pub mod commands;
pub mod corpus;
pub mod fieldspec;
pub mod fixtures;
pub mod pretty;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use mlvdepth_core::error::Error;
use serde::Deserialize;
use serde_json::{json, Value};

pub use fixtures::Fixture;

#[derive(Parser, Debug)]
#[command(name = "mlvdepth", version, about = "MacLane-Vaquie chains, depths and Okutsu sequences over valued fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Value of --f under the valuation --mu, or under v_theta for --g.
    Eval,
    /// Residual polynomial of --f for the top key of --mu.
    Residual,
    /// Is --phi a key polynomial for --mu?
    #[command(name = "iskey")]
    IsKey,
    /// MacLane-Vaquie chain of --g.
    Chain,
    /// Every branch of --g over the completion.
    Branches,
    /// Depth, ramification index and residue degree of --g.
    Depth,
    /// Depth-one certificate for --alpha in K[x]/(g).
    CertDepthOne,
    /// Depths of the generators in a coefficient box.
    SearchGenerators,
    /// Check an Okutsu sequence against a distance oracle.
    OkutsuVerify,
    /// Values in the rank-two series model.
    SeriesValue,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Residual => "residual",
            Command::IsKey => "iskey",
            Command::Chain => "chain",
            Command::Branches => "branches",
            Command::Depth => "depth",
            Command::CertDepthOne => "cert-depth-one",
            Command::SearchGenerators => "search-generators",
            Command::OkutsuVerify => "okutsu-verify",
            Command::SeriesValue => "series-value",
        }
    }

    /// Problem-file task names; each subcommand also accepts its own name.
    fn from_task(s: &str) -> Option<Command> {
        Some(match s {
            "eval" => Command::Eval,
            "residual" => Command::Residual,
            "iskey" => Command::IsKey,
            "chain" => Command::Chain,
            "branches" => Command::Branches,
            "certificate" | "cert-depth-one" => Command::CertDepthOne,
            "depth" => Command::Depth,
            "search" | "search-generators" => Command::SearchGenerators,
            "okutsu" | "okutsu-verify" => Command::OkutsuVerify,
            "series" | "series-value" => Command::SeriesValue,
            _ => return None,
        })
    }

    fn task_matches(self, task: &str) -> bool {
        Command::from_task(task) == Some(self) || (self == Command::Branches && task == "chain")
    }
}

#[derive(clap::Args, Debug, Default, Clone)]
pub struct Opts {
    /// JSON problem file; command-line flags override its fields.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Human-readable summary instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Run a shipped worked example.
    #[arg(long, global = true, value_enum)]
    pub fixture: Option<Fixture>,
    /// qp:P, fp:P[:vars] or qt:P.
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long, global = true)]
    pub g: Option<String>,
    #[arg(long, global = true)]
    pub f: Option<String>,
    #[arg(long, global = true)]
    pub phi: Option<String>,
    /// Valuation as `phi @ gamma; phi @ gamma; ...`.
    #[arg(long, global = true)]
    pub mu: Option<String>,
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Element of the series model, in t, i, alpha and theta.
    #[arg(long, global = true)]
    pub eta: Option<String>,
    /// Centre for a distance `v(theta - b)`.
    #[arg(long, global = true)]
    pub b: Option<String>,
    #[arg(long, global = true)]
    pub radius: Option<i64>,
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Characteristic of the sec32 fixture, or the prime of the series model.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    #[arg(long, global = true, default_value_t = 25)]
    pub max_refinements: usize,
    /// Fail with Branched instead of following the first option.
    #[arg(long, global = true)]
    pub reject_branching: bool,
    #[arg(long = "t-pr", global = true, default_value_t = 16)]
    pub t_precision: usize,
    #[arg(long = "p-pr", global = true, default_value_t = 16)]
    pub p_precision: usize,
    #[arg(long, global = true, default_value_t = 1)]
    pub parallel: usize,
}

/// Schema of `--input` files.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub task: Option<String>,
    pub field: Option<String>,
    pub g: Option<String>,
    pub f: Option<String>,
    pub phi: Option<String>,
    pub mu: Option<String>,
    pub alpha: Option<String>,
    pub eta: Option<String>,
    pub b: Option<String>,
    pub radius: Option<i64>,
    pub budget: Option<usize>,
    pub p: Option<u64>,
    pub families: Option<Vec<FamilySpec>>,
    pub challengers: Option<Vec<ChallengerSpec>>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub degree: usize,
    /// `[label, element]` pairs.
    pub members: Vec<(String, String)>,
    #[serde(default)]
    pub max_exists: bool,
    /// `"full"` or `"level:a"`.
    #[serde(default)]
    pub unbounded: Option<String>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ChallengerSpec {
    pub label: String,
    pub elem: String,
    pub degree: usize,
}

/// Options after merging flags, problem file and fixture defaults.
#[derive(Debug, Clone, Default)]
pub struct Request {
    pub opts: Opts,
    pub families: Option<Vec<FamilySpec>>,
    pub challengers: Option<Vec<ChallengerSpec>>,
}

/// Why a run did not succeed.
#[derive(Debug, Clone)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    pub code: i32,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PrecisionExhausted { .. } => 4,
            _ if e.is_mathematical() => 3,
            _ => 2,
        };
        let dbg = format!("{e:?}");
        let kind = dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        Failure { kind, message: e.to_string(), code }
    }
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Failure { kind: "InvalidInput".into(), message: msg.into(), code: 2 }
    }

    pub fn check(kind: &str, msg: impl Into<String>) -> Self {
        Failure { kind: kind.into(), message: msg.into(), code: 3 }
    }
}

/// A result document, possibly with a failure that still carries data.
pub struct Outcome {
    pub result: Value,
    pub failure: Option<Failure>,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Outcome { result, failure: None }
    }
}

/// A finished run: exit status and the bytes for standard output.
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub document: Value,
}

fn merge(cli: Cli) -> Result<(Command, Request), Failure> {
    let mut o = cli.opts;
    let file: ProblemFile = match &o.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("bad problem file: {e}")))?
        }
        None => ProblemFile::default(),
    };
    let command = match (cli.command, file.task.as_deref()) {
        (Some(c), Some(t)) if !c.task_matches(t) => {
            return Err(Failure::input(format!("problem file task {t:?} does not match {}", c.name())))
        }
        (Some(c), _) => c,
        (None, Some(t)) => Command::from_task(t).ok_or_else(|| Failure::input(format!("unknown task {t:?}")))?,
        (None, None) => return Err(Failure::input("no subcommand and no task in the problem file")),
    };
    macro_rules! fill {
        ($($name:ident),*) => { $( if o.$name.is_none() { o.$name = file.$name.clone(); } )* };
    }
    fill!(field, g, f, phi, mu, alpha, eta, b, radius, budget, p);
    if let Some(fx) = o.fixture {
        apply_fixture(command, fx, &mut o)?;
    }
    Ok((command, Request { opts: o, families: file.families, challengers: file.challengers }))
}

fn apply_fixture(command: Command, fx: Fixture, o: &mut Opts) -> Result<(), Failure> {
    let set = |slot: &mut Option<String>, v: String| {
        if slot.is_none() {
            *slot = Some(v);
        }
    };
    match fx {
        Fixture::Sec32 => {
            let p = o.p.unwrap_or(2);
            set(&mut o.field, fixtures::sec32_field(p));
            set(&mut o.g, fixtures::sec32_polynomial(p));
        }
        Fixture::Sec34 => {
            set(&mut o.field, fixtures::SEC34_FIELD.into());
            set(&mut o.g, fixtures::SEC34_POLYNOMIAL.into());
            set(&mut o.alpha, "x".into());
            if o.radius.is_none() {
                o.radius = Some(2);
            }
        }
        Fixture::Sec4 => {
            if !matches!(command, Command::SeriesValue | Command::OkutsuVerify) {
                return Err(Failure::input("the sec4 fixture runs with series-value or okutsu-verify"));
            }
            if o.p.is_none() {
                o.p = Some(fixtures::SEC4_PRIME);
            }
            set(&mut o.field, format!("qt:{}", fixtures::SEC4_PRIME));
        }
    }
    Ok(())
}

fn input_echo(r: &Request) -> Value {
    let o = &r.opts;
    let mut m = serde_json::Map::new();
    let mut put = |k: &str, v: Option<Value>| {
        if let Some(v) = v {
            m.insert(k.into(), v);
        }
    };
    put("field", o.field.clone().map(Value::from));
    put("g", o.g.clone().map(Value::from));
    put("f", o.f.clone().map(Value::from));
    put("phi", o.phi.clone().map(Value::from));
    put("mu", o.mu.clone().map(Value::from));
    put("alpha", o.alpha.clone().map(Value::from));
    put("eta", o.eta.clone().map(Value::from));
    put("b", o.b.clone().map(Value::from));
    put("radius", o.radius.map(Value::from));
    put("budget", o.budget.map(Value::from));
    put("p", o.p.map(Value::from));
    put("max_refinements", Some(o.max_refinements.into()));
    put("policy", Some(if o.reject_branching { "reject" } else { "follow-first" }.into()));
    m.insert("t_precision".into(), o.t_precision.into());
    m.insert("p_precision".into(), o.p_precision.into());
    Value::Object(m)
}

/// Parse `argv` (program name first), run, and build the report.
pub fn run<I, T>(argv: I) -> Run
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.to_string();
            return if e.use_stderr() {
                Run { code: 2, stdout: String::new(), stderr: text, document: Value::Null }
            } else {
                Run { code: 0, stdout: text, stderr: String::new(), document: Value::Null }
            };
        }
    };
    let pretty = cli.opts.pretty;
    let (command, doc, failure) = match merge(cli) {
        Err(f) => (None, json!({}), Some(f)),
        Ok((command, req)) => {
            let mut doc = json!({
                "command": command.name(),
                "input": input_echo(&req),
                "fixture": req.opts.fixture.map(|f| f.name()),
            });
            let out = commands::dispatch(command, &req);
            match out {
                Ok(Outcome { result, failure }) => {
                    doc["result"] = result;
                    (Some(command), doc, failure)
                }
                Err(f) => (Some(command), doc, Some(f)),
            }
        }
    };
    let mut doc = doc;
    if command.is_none() {
        doc["command"] = Value::Null;
    }
    let code = failure.as_ref().map_or(0, |f| f.code);
    doc["status"] = match &failure {
        None => "ok".into(),
        Some(f) if f.code == 2 => "input-error".into(),
        Some(f) if f.code == 4 => "precision-exhausted".into(),
        Some(_) => "failed".into(),
    };
    if let Some(f) = failure {
        doc["error"] = json!({ "kind": f.kind, "message": f.message });
    }
    doc["exit_code"] = code.into();
    let stdout = if pretty {
        pretty::render(&doc)
    } else {
        let mut s = serde_json::to_string(&doc).expect("serializable");
        s.push('\n');
        s
    };
    Run { code, stdout, stderr: String::new(), document: doc }
}
