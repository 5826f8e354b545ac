use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ideograph::check::{run as run_checks, Report};
use ideograph::encodings::{
    decode_bintree, decode_lambda, decode_multigraph, encode_bintree, encode_lambda, encode_multigraph, BinTree,
    LambdaTerm, Multigraph,
};
use ideograph::equality::{bare_equal, t_equal, types_isomorphic};
use ideograph::textio::{parse_bundle, print_bundle};
use ideograph::wellformed::DEFAULT_STEP_CAP;
use ideograph::{corpus, export_dot, normalize, reduce_step, Bundle, Diagnostic, Error, Id, Strategy};

const DEFAULT_MAX_STEPS: usize = 10_000;

#[derive(Parser)]
#[command(name = "idg", version, about = "Check, reduce and compare graph-structured terms")]
struct Cli {
    /// Render diagnostics as text instead of JSON lines.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate bundles; exits 0 only if every file passes.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Inline one let-binding.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        binding: String,
    },
    /// Inline let-bindings until none remain.
    Normalize {
        file: PathBuf,
        #[arg(long, default_value = "outermost-first")]
        strategy: Strategy,
        /// Defaults to $IDG_MAX_STEPS, then 10000.
        #[arg(long)]
        max_steps: Option<usize>,
        /// Print each inlined binding to stderr as a JSON line.
        #[arg(long)]
        trace: bool,
    },
    /// Compare two bundles; exits 0 when equal.
    Eq {
        a: PathBuf,
        b: PathBuf,
        /// Ignore the external correspondences.
        #[arg(long)]
        bare: bool,
    },
    /// Encode a structure written in its text syntax.
    Encode {
        #[arg(long, value_enum)]
        structure: Structure,
        #[arg(long)]
        input: String,
    },
    /// Decode a bundle back into a structure.
    Decode {
        file: PathBuf,
        /// Tried in turn when omitted.
        #[arg(long, value_enum)]
        structure: Option<Structure>,
    },
    /// Graphviz text for the term.
    ExportDot { file: PathBuf },
    /// List the built-in examples, or print one.
    Corpus { name: Option<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum Structure {
    Bintree,
    Multigraph,
    Lambda,
}

/// A failed command: exit code plus the records to put on stderr.
struct Failure {
    code: u8,
    records: Vec<serde_json::Value>,
}

impl Failure {
    fn new(code: u8, file: Option<&Path>, kind: &str, message: impl ToString) -> Self {
        let mut rec = json!({ "error": kind, "message": message.to_string() });
        if let Some(f) = file {
            rec["file"] = json!(f.display().to_string());
        }
        Failure { code, records: vec![rec] }
    }

    fn from_error(file: Option<&Path>, e: Error) -> Self {
        match e {
            Error::Parse(p) => {
                let mut f = Failure::new(2, file, "parse", &p.message);
                f.records[0]["line"] = json!(p.line);
                f.records[0]["column"] = json!(p.column);
                if let Some(s) = p.section {
                    f.records[0]["section"] = json!(s);
                }
                f
            }
            Error::StepLimit { limit, .. } => {
                Failure::new(3, file, "step-limit", format!("step limit of {limit} exceeded"))
            }
            Error::Invalid(diags) => Failure { code: 1, records: diag_records(file, &diags) },
            other => Failure::new(1, file, "rejected", other),
        }
    }
}

type Outcome = Result<String, Failure>;

fn diag_records(file: Option<&Path>, diags: &[Diagnostic]) -> Vec<serde_json::Value> {
    diags
        .iter()
        .map(|d| {
            let mut rec = json!({
                "rule": d.rule.as_str(),
                "components": d.components.iter().map(Id::as_str).collect::<Vec<_>>(),
                "message": d.message,
            });
            if let Some(f) = file {
                rec["file"] = json!(f.display().to_string());
            }
            rec
        })
        .collect()
}

fn render(rec: &serde_json::Value, pretty: bool) -> String {
    if !pretty {
        return rec.to_string();
    }
    let s = |k: &str| rec.get(k).and_then(|v| v.as_str());
    let mut out = String::new();
    if let Some(f) = s("file") {
        out.push_str(f);
        if let (Some(l), Some(c)) = (rec.get("line"), rec.get("column")) {
            out.push_str(&format!(":{l}:{c}"));
        }
        out.push_str(": ");
    }
    out.push_str(s("rule").or_else(|| s("error")).unwrap_or("error"));
    out.push_str(": ");
    out.push_str(s("message").unwrap_or_default());
    if let Some(cs) = rec.get("components").and_then(|v| v.as_array()).filter(|a| !a.is_empty()) {
        let names: Vec<&str> = cs.iter().filter_map(|v| v.as_str()).collect();
        out.push_str(&format!(" [{}]", names.join(", ")));
    }
    out
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map(|_| text).map_err(|e| Failure::new(2, Some(path), "io", e))
}

fn load(path: &Path) -> Result<Bundle, Failure> {
    parse_bundle(&read_input(path)?).map_err(|e| Failure::from_error(Some(path), e))
}

fn require_valid(path: &Path, b: &Bundle) -> Result<(), Failure> {
    let report = run_checks(&b.ty, &b.term, &b.external, DEFAULT_STEP_CAP);
    report_failure(path, &report).map_or(Ok(()), Err)
}

fn report_failure(path: &Path, report: &Report) -> Option<Failure> {
    if report.is_ok() {
        return None;
    }
    let code = if report.resource_limited() { 3 } else { 1 };
    Some(Failure { code, records: diag_records(Some(path), &report.diagnostics) })
}

fn max_steps(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("IDG_MAX_STEPS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::new(2, None, "usage", format!("IDG_MAX_STEPS must be a number, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_STEPS),
    }
}

fn with_term(b: &Bundle, r: ideograph::RewriteResult) -> Bundle {
    Bundle { ty: b.ty.clone(), term: r.term, external: r.external }
}

fn check_one(path: &Path) -> Outcome {
    let b = load(path)?;
    require_valid(path, &b)?;
    Ok(String::new())
}

fn cmd_check(files: &[PathBuf], pretty: bool) -> u8 {
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || check_one(f))).collect();
        handles.into_iter().map(|h| h.join().expect("checker thread panicked")).collect()
    });
    let mut code = 0;
    let stderr = io::stderr();
    for o in outcomes {
        if let Err(f) = o {
            let mut lock = stderr.lock();
            for rec in &f.records {
                let _ = writeln!(lock, "{}", render(rec, pretty));
            }
            code = code.max(f.code);
        }
    }
    code
}

fn cmd_normalize(file: &Path, strategy: Strategy, steps: Option<usize>, trace: bool, pretty: bool) -> Outcome {
    let limit = max_steps(steps)?;
    let b = load(file)?;
    require_valid(file, &b)?;
    let r = normalize(&b.term, &b.external, strategy, limit).map_err(|e| Failure::from_error(Some(file), e))?;
    if trace {
        let stderr = io::stderr();
        let mut lock = stderr.lock();
        for (i, step) in r.trace.iter().enumerate() {
            let line = if pretty {
                format!("step {}: {}", i + 1, step.binding)
            } else {
                json!({ "step": i + 1, "binding": step.binding.as_str(), "fresh": step.fresh }).to_string()
            };
            let _ = writeln!(lock, "{line}");
        }
    }
    Ok(print_bundle(&with_term(&b, r)))
}

fn cmd_eq(a: &Path, b: &Path, bare: bool) -> Outcome {
    let x = load(a)?;
    let y = load(b)?;
    let witness = if bare {
        bare_equal(&x.term, &y.term)
    } else {
        // the second bundle's external targets are moved onto the first's type
        let Some(h) = types_isomorphic(&x.ty, &y.ty) else {
            return Err(Failure::new(1, None, "not-equal", "the bundles have different types"));
        };
        let ext = ideograph::Correspondence::from_pairs(
            y.external.pairs.iter().map(|(s, t)| (s.as_str().to_owned(), h.type_id(t).as_str().to_owned())),
        );
        t_equal(&x.ty, &x.term, &x.external, &y.term, &ext).map_err(|e| Failure::from_error(None, e))?
    };
    match witness {
        Some(h) => Ok(format!("{}\n", json!({ "equal": true, "relabeling": h }))),
        None => Err(Failure::new(1, None, "not-equal", "no relabeling exists")),
    }
}

fn cmd_encode(structure: Structure, input: &str) -> Outcome {
    let usage = |e: Error| Failure::new(2, None, "usage", e);
    let b = match structure {
        Structure::Bintree => encode_bintree(&input.parse::<BinTree>().map_err(usage)?),
        Structure::Multigraph => encode_multigraph(&input.parse::<Multigraph>().map_err(usage)?),
        Structure::Lambda => encode_lambda(&input.parse::<LambdaTerm>().map_err(usage)?),
    }
    .map_err(|e| Failure::from_error(None, e))?;
    Ok(print_bundle(&b))
}

fn decode_as(structure: Structure, b: &Bundle) -> ideograph::Result<String> {
    Ok(match structure {
        Structure::Bintree => decode_bintree(b)?.to_string(),
        Structure::Multigraph => decode_multigraph(b)?.to_string(),
        Structure::Lambda => decode_lambda(b)?.to_string(),
    })
}

fn cmd_decode(file: &Path, structure: Option<Structure>) -> Outcome {
    let mut b = load(file)?;
    require_valid(file, &b)?;
    if !b.term.lets.is_empty() {
        let r = normalize(&b.term, &b.external, Strategy::OutermostFirst, max_steps(None)?)
            .map_err(|e| Failure::from_error(Some(file), e))?;
        b = with_term(&b, r);
    }
    let text = match structure {
        Some(s) => decode_as(s, &b).map_err(|e| Failure::from_error(Some(file), e))?,
        None => [Structure::Bintree, Structure::Multigraph, Structure::Lambda]
            .into_iter()
            .find_map(|s| decode_as(s, &b).ok())
            .ok_or_else(|| Failure::new(1, Some(file), "decode", "not the encoding of any known structure"))?,
    };
    Ok(format!("{text}\n"))
}

fn cmd_corpus(name: Option<&str>) -> Outcome {
    let entries = corpus::all().map_err(|e| Failure::from_error(None, e))?;
    match name {
        None => Ok(entries.iter().map(|e| format!("{}\n", e.name)).collect()),
        Some(n) => entries
            .iter()
            .find(|e| e.name == n)
            .map(|e| print_bundle(&e.bundle))
            .ok_or_else(|| Failure::new(2, None, "usage", format!("no corpus entry named `{n}`"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pretty = cli.pretty;
    let outcome = match &cli.cmd {
        Cmd::Check { files } => return ExitCode::from(cmd_check(files, pretty)),
        Cmd::Reduce { file, binding } => load(file).and_then(|b| {
            require_valid(file, &b)?;
            let r = reduce_step(&b.ty, &b.term, &b.external, &Id::new(binding.as_str()))
                .map_err(|e| Failure::from_error(Some(file), e))?;
            Ok(print_bundle(&with_term(&b, r)))
        }),
        Cmd::Normalize { file, strategy, max_steps, trace } => {
            cmd_normalize(file, *strategy, *max_steps, *trace, pretty)
        }
        Cmd::Eq { a, b, bare } => cmd_eq(a, b, *bare),
        Cmd::Encode { structure, input } => cmd_encode(*structure, input),
        Cmd::Decode { file, structure } => cmd_decode(file, *structure),
        Cmd::ExportDot { file } => load(file).and_then(|b| {
            require_valid(file, &b)?;
            Ok(export_dot(&b.term, Some(&b.external)))
        }),
        Cmd::Corpus { name } => cmd_corpus(name.as_deref()),
    };
    match outcome {
        Ok(text) => {
            let _ = io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            let stderr = io::stderr();
            let mut lock = stderr.lock();
            for rec in &f.records {
                let _ = writeln!(lock, "{}", render(rec, pretty));
            }
            ExitCode::from(f.code)
        }
    }
}
