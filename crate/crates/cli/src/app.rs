//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use superstar::models::{
    builtin, builtin_names, calabi_yau_index, model_file_stem, verify_model, CyWeights, ModelSpec, Record, VerifyOptions,
};
use superstar::{Exec, GradedPoly, StarEngine};

use crate::expr::ExprParser;
use crate::model_file::{parse_model_file, serialize_model};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "superstar", version, about = "Exact checker for graded star products and their models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// Maximal power of hbar kept by the star product.
    #[arg(long, global = true, value_name = "K")]
    order: Option<u32>,
    /// Line-delimited JSON records instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Only print failures and the summary.
    #[arg(long, global = true)]
    quiet: bool,
    /// Run every check on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every check of a model file or builtin.
    Verify { model: String },
    /// Print f * g.
    Star {
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
    },
    /// Print the supercommutator [a, b].
    Comm {
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// List the builtin models.
    ListBuiltins,
    /// Calabi-Yau index of a projective superspace.
    Cy(CyArgs),
    /// Write every builtin as a model file.
    Export {
        #[arg(default_value = "models")]
        dir: PathBuf,
    },
}

#[derive(Args, Debug)]
struct CyArgs {
    /// Bosonic dimension n and odd dimension N of P^{n|N}.
    #[arg(long, num_args = 2, value_names = ["n", "N"])]
    projective: Option<Vec<u32>>,
    /// Even weights; odd weights follow `--`.
    #[arg(long, num_args = 1.., value_name = "k", allow_negative_numbers = true)]
    weighted: Option<Vec<i64>>,
    /// Number of odd coordinate pairs.
    #[arg(long, value_name = "N")]
    ambitwistor: Option<u32>,
    #[arg(last = true, value_name = "l", allow_negative_numbers = true)]
    odd: Vec<i64>,
}

/// Failure that ends a command early, with its exit code.
struct Abort(i32, String);

impl Abort {
    fn usage(msg: impl Into<String>) -> Self {
        Abort(EXIT_USAGE, msg.into())
    }

    fn fail(msg: impl Into<String>) -> Self {
        Abort(EXIT_FAIL, msg.into())
    }
}

type Outcome = Result<i32, Abort>;

/// Runs one invocation; reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_PASS
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let flags = cli.flags.clone();
    let result = match cli.command {
        Command::Verify { model } => cmd_verify(&model, &flags, out),
        Command::Star { model, lhs, rhs } => cmd_binary(&model, &lhs, &rhs, false, &flags, out),
        Command::Comm { model, a, b } => cmd_binary(&model, &a, &b, true, &flags, out),
        Command::ListBuiltins => cmd_list(&flags, out),
        Command::Cy(args) => cmd_cy(args, &flags, out),
        Command::Export { dir } => cmd_export(&dir, &flags, out),
    };
    match result {
        Ok(code) => code,
        Err(Abort(code, msg)) => {
            let _ = writeln!(err, "superstar: {msg}");
            code
        }
    }
}

fn io(e: std::io::Error) -> Abort {
    Abort::fail(format!("write failed: {e}"))
}

/// A path to an existing file is read as a model file, anything else names a builtin.
pub fn load_model(name: &str) -> Result<ModelSpec, String> {
    let path = Path::new(name);
    if path.is_file() {
        return parse_model_file(path).map_err(|e| e.to_string());
    }
    builtin(name).map_err(|e| {
        format!("{e}; expected a model file or one of: {}", builtin_names().join(", "))
    })
}

fn model_for(name: &str, flags: &Flags) -> Result<ModelSpec, Abort> {
    let mut m = load_model(name).map_err(Abort::usage)?;
    if let Some(k) = flags.order {
        m.max_order = k;
    }
    Ok(m)
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    check_id: &'a str,
    category: &'a str,
    status: &'a str,
    lhs: &'a str,
    rhs: &'a str,
    detail: &'a str,
}

impl<'a> From<&'a Record> for JsonRecord<'a> {
    fn from(r: &'a Record) -> Self {
        JsonRecord {
            check_id: &r.check_id,
            category: &r.category,
            status: r.status.as_str(),
            lhs: &r.lhs,
            rhs: &r.rhs,
            detail: &r.detail,
        }
    }
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Abort> {
    let s = serde_json::to_string(value).map_err(|e| Abort::fail(e.to_string()))?;
    writeln!(out, "{s}").map_err(io)
}

fn cmd_verify(name: &str, flags: &Flags, out: &mut dyn Write) -> Outcome {
    let model = model_for(name, flags)?;
    let exec = if flags.sequential { Exec::Sequential } else { Exec::Parallel };
    let opts = VerifyOptions {
        max_order: flags.order,
        ..VerifyOptions::default().with_exec(exec)
    };
    let report = verify_model(&model, &opts);
    for r in &report.records {
        if flags.quiet && r.status != superstar::Status::Fail {
            continue;
        }
        if flags.json {
            json_line(out, &JsonRecord::from(r))?;
        } else {
            writeln!(out, "{r}").map_err(io)?;
        }
    }
    let failed = report.failures().count();
    if !flags.json {
        let verdict = if failed == 0 { "pass" } else { "FAIL" };
        writeln!(out, "{}: {} checks, {} failed: {verdict}", report.model, report.records.len(), failed).map_err(io)?;
    }
    Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_binary(name: &str, lhs: &str, rhs: &str, commutator: bool, flags: &Flags, out: &mut dyn Write) -> Outcome {
    let model = model_for(name, flags)?;
    let parser = ExprParser::new(&model.table).with_aliases(&model.aliases);
    let parse = |which: &str, text: &str| -> Result<GradedPoly, Abort> {
        parser.parse(text).map_err(|e| Abort::usage(format!("--{which}: {e}")))
    };
    let (lname, rname) = if commutator { ("a", "b") } else { ("lhs", "rhs") };
    let f = parse(lname, lhs)?;
    let g = parse(rname, rhs)?;
    let engine = StarEngine::new(model.bivector.clone(), model.max_order).map_err(|e| Abort::fail(e.to_string()))?;
    let result = if commutator { engine.supercommutator(&f, &g) } else { engine.star(&f, &g) };
    let result = result.map_err(|e| Abort::fail(e.to_string()))?;
    let render = |p: &GradedPoly| p.display(&model.table).with_aliases(&model.aliases).to_string();
    if flags.json {
        #[derive(Serialize)]
        struct Product<'a> {
            op: &'a str,
            lhs: String,
            rhs: String,
            result: String,
        }
        let op = if commutator { "comm" } else { "star" };
        json_line(out, &Product { op, lhs: render(&f), rhs: render(&g), result: render(&result) })?;
    } else {
        writeln!(out, "{}", render(&result)).map_err(io)?;
    }
    Ok(EXIT_PASS)
}

fn cmd_list(flags: &Flags, out: &mut dyn Write) -> Outcome {
    for name in builtin_names() {
        if flags.json {
            json_line(out, &serde_json::json!({ "name": name, "file": format!("{}.model", model_file_stem(name)) }))?;
        } else {
            writeln!(out, "{name}").map_err(io)?;
        }
    }
    Ok(EXIT_PASS)
}

fn cmd_cy(args: CyArgs, flags: &Flags, out: &mut dyn Write) -> Outcome {
    let given = [args.projective.is_some(), args.weighted.is_some(), args.ambitwistor.is_some()];
    if given.iter().filter(|g| **g).count() > 1 {
        return Err(Abort::usage("--projective, --weighted and --ambitwistor are exclusive"));
    }
    let weights = if let Some(p) = args.projective {
        CyWeights::Projective { n: p[0], n_odd: p[1] }
    } else if let Some(even) = args.weighted {
        CyWeights::Weighted { even, odd: args.odd.clone() }
    } else if let Some(n_odd) = args.ambitwistor {
        CyWeights::Ambitwistor { n_odd }
    } else {
        return Err(Abort::usage("one of --projective, --weighted or --ambitwistor is required"));
    };
    if !args.odd.is_empty() && !matches!(weights, CyWeights::Weighted { .. }) {
        return Err(Abort::usage("weights after `--` only go with --weighted"));
    }
    let index = calabi_yau_index(&weights);
    let yes = index.is_calabi_yau();
    if flags.json {
        json_line(out, &serde_json::json!({ "space": weights.to_string(), "index": index.to_string(), "calabi_yau": yes }))?;
    } else {
        writeln!(out, "index {index}").map_err(io)?;
        writeln!(out, "Calabi-Yau: {}", if yes { "yes" } else { "no" }).map_err(io)?;
    }
    Ok(EXIT_PASS)
}

fn cmd_export(dir: &Path, flags: &Flags, out: &mut dyn Write) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Abort::fail(format!("{}: {e}", dir.display())))?;
    for name in builtin_names() {
        let mut model = builtin(name).map_err(|e| Abort::fail(e.to_string()))?;
        if let Some(k) = flags.order {
            model.max_order = k;
        }
        let text = serialize_model(&model).map_err(|e| Abort::fail(format!("{name}: {e}")))?;
        let path = dir.join(format!("{}.model", model_file_stem(name)));
        std::fs::write(&path, text).map_err(|e| Abort::fail(format!("{}: {e}", path.display())))?;
        if !flags.quiet {
            writeln!(out, "{}", path.display()).map_err(io)?;
        }
    }
    Ok(EXIT_PASS)
}
