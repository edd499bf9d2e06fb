//! `dimca`: translate, check and compare guarded-command programs.
//!
//! Exit status: 0 holds, 1 fails, 2 unknown, 3 runtime error, 64 usage
//! error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dimca::abstraction::{sigma, translate_program};
use dimca::concrete::Sizes;
use dimca::lang::{load_expr, load_program, print_expr, print_program, BoolExpr, Program};
use dimca::mu::{parse_formula, MuFormula};
use dimca::oracle::check_bisimulation;
use dimca::paramcheck::{
    check_finite, check_infinite, check_parameterised, partial_execution, witness_instance, TraceEntry, Verdict,
};
use dimca::partial::build_partial_ts;
use dimca::quotient::build_quotient_ts;
use dimca::ts::{ExploreOptions, Scope};

const QUOTIENT_CAP: usize = 10_000_000;
const ORACLE_CAP: usize = 1_000_000;
const USAGE: u8 = 64;
const RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "dimca", version, about = "Model checking of data-independent programs with arrays")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on explored states (default 10^7 for quotients, 10^6 for finite instances).
    #[arg(long, global = true, env = "DIMCA_MAX_STATES")]
    max_states: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckMode {
    Infinite,
    Parameterised,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the array-free translation of a program.
    Translate {
        program: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also emit the array-consistency constraint.
        #[arg(long)]
        emit_sigma: bool,
    },
    /// Check a formula over infinite types, or for all finite instances.
    Check {
        program: PathBuf,
        #[arg(long)]
        formula: String,
        /// Observable marking the start states.
        #[arg(long)]
        from: String,
        /// Extra constraint conjoined onto the program's init.
        #[arg(long)]
        init: Option<String>,
        #[arg(long, value_enum)]
        mode: CheckMode,
    },
    /// Check a formula on one finite instance.
    CheckFinite {
        program: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        x_size: usize,
        #[arg(long)]
        y_size: usize,
    },
    /// Compare the partial-functions system with the translated quotient.
    Compare {
        program: PathBuf,
        /// Write the quotient system as JSON.
        #[arg(long)]
        export_ts: Option<PathBuf>,
    },
    /// Find a finite run realizing an observable trace.
    Trace {
        program: PathBuf,
        #[arg(long)]
        replay: PathBuf,
        /// Observable the run must start in, besides init.
        #[arg(long)]
        from: Option<String>,
    },
}

/// A failure and the exit status it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn usage(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: USAGE, err: err.into() }
}

fn runtime(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: RUNTIME, err: err.into() }
}

fn read_program(path: &Path) -> Result<Program, Failure> {
    let src = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(runtime)?;
    load_program(&src)
        .with_context(|| format!("in {}", path.display()))
        .map_err(runtime)
}

fn formula_for(p: &Program, src: &str, from: &str) -> Result<MuFormula, Failure> {
    let f = parse_formula(src).map_err(usage)?;
    if let Some(h) = f.free_variable() {
        return Err(usage(dimca::Error::OpenFormula(h)));
    }
    for o in f.observables().iter().map(String::as_str).chain([from]) {
        if !p.booleans.iter().any(|b| b == o) {
            return Err(usage(dimca::Error::UnknownObservable(o.to_string())));
        }
    }
    Ok(f)
}

fn opts(cap: Option<usize>, default: usize) -> ExploreOptions {
    ExploreOptions::with_cap(cap.unwrap_or(default))
}

fn print_verdict(v: &Verdict, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(v).expect("verdict serializes"));
        return;
    }
    println!("{:<12}{}", "mode", v.mode);
    println!("{:<12}{}", "answer", v.answer);
    println!("{:<12}{}", "fragment", v.fragment);
    println!("{:<12}{}", "formula", v.formula);
    println!("{:<12}{}", "states", v.stats.states);
    println!("{:<12}{}", "edges", v.stats.edges);
    println!("{:<12}{}", "iterations", v.stats.fixpoint_iterations);
    println!("{:<12}{} ms", "time", v.stats.wall_time_ms);
    if let Some((a, b)) = v.witness_sizes {
        println!("{:<12}|X| = {a}, |Y| = {b}", "witness");
    }
    if let Some(trace) = &v.counterexample {
        println!("counterexample:");
        for (i, t) in trace.iter().enumerate() {
            println!("  {i:>3}  {}", t.observables_true.join(" "));
        }
    }
    if let Some(run) = &v.witness_run {
        println!("witness run:");
        for (i, s) in run.iter().enumerate() {
            println!("  {i:>3}  {s}");
        }
    }
}

fn translate(program: &Path, output: Option<&Path>, emit_sigma: bool) -> Result<u8, Failure> {
    let p = read_program(program)?;
    let sharp = translate_program(&p).map_err(runtime)?;
    let text = print_program(&sharp);
    let sigma_text = print_expr(&sigma(&p));
    match output {
        Some(out) => {
            fs::write(out, &text)
                .with_context(|| format!("cannot write {}", out.display()))
                .map_err(runtime)?;
            if emit_sigma {
                println!("{sigma_text}");
            }
        }
        None => {
            print!("{text}");
            if emit_sigma {
                println!("# sigma: {sigma_text}");
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct CompareReport {
    partial_states: usize,
    quotient_states: usize,
    bisimilar: bool,
    blocks: Option<usize>,
    mismatch: Option<String>,
}

fn compare(program: &Path, export: Option<&Path>, cap: Option<usize>, json: bool) -> Result<u8, Failure> {
    let p = read_program(program)?;
    let opts = opts(cap, QUOTIENT_CAP);
    let sharp = translate_program(&p).map_err(runtime)?;
    let (_, part) = build_partial_ts(&p, &Scope::Reachable(p.init.clone()), opts).map_err(runtime)?;
    let constraint = BoolExpr::and(sigma(&p), p.init.clone());
    let (q, quot) = build_quotient_ts(&sharp, &constraint, opts).map_err(runtime)?;
    if let Some(path) = export {
        let doc = quot.ts.to_json(|s| q.describe(&quot.states[s]));
        fs::write(path, serde_json::to_string_pretty(&doc).expect("system serializes"))
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(runtime)?;
    }
    let outcome = check_bisimulation(&part.ts, &quot.ts);
    let report = CompareReport {
        partial_states: part.ts.len(),
        quotient_states: quot.ts.len(),
        bisimilar: outcome.is_ok(),
        blocks: outcome.as_ref().ok().map(|b| b.blocks),
        mismatch: outcome.as_ref().err().map(|m| format!("{m:?}")),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("{:<16}{}", "partial states", report.partial_states);
        println!("{:<16}{}", "quotient states", report.quotient_states);
        println!("{:<16}{}", "bisimilar", report.bisimilar);
        if let Some(b) = report.blocks {
            println!("{:<16}{b}", "blocks");
        }
        if let Some(m) = &report.mismatch {
            println!("{:<16}{m}", "mismatch");
        }
    }
    Ok(if report.bisimilar { 0 } else { 1 })
}

#[derive(Serialize)]
struct TraceReport {
    realized: bool,
    witness_sizes: Option<(usize, usize)>,
    run: Vec<String>,
}

fn trace(program: &Path, replay: &Path, from: Option<&str>, cap: Option<usize>, json: bool) -> Result<u8, Failure> {
    let p = read_program(program)?;
    let src = fs::read_to_string(replay)
        .with_context(|| format!("cannot read {}", replay.display()))
        .map_err(runtime)?;
    let entries: Vec<TraceEntry> = serde_json::from_str(&src)
        .with_context(|| format!("{} is not a list of {{\"observables-true\": [...]}}", replay.display()))
        .map_err(runtime)?;
    let mut start = p.init.clone();
    if let Some(b) = from {
        if !p.booleans.iter().any(|o| o == b) {
            return Err(usage(dimca::Error::UnknownObservable(b.to_string())));
        }
        start = BoolExpr::and(start, BoolExpr::var(b));
    }
    let report = match partial_execution(&p, &start, &entries, opts(cap, ORACLE_CAP)) {
        Ok(exec) => {
            let w = witness_instance(&p, &exec).map_err(runtime)?;
            let sem = dimca::concrete::Concrete::new(&p, w.sizes).map_err(runtime)?;
            TraceReport {
                realized: true,
                witness_sizes: Some((w.sizes.a, w.sizes.b)),
                run: w.states.iter().map(|s| sem.describe(s)).collect(),
            }
        }
        Err(dimca::Error::Replay(_)) => TraceReport {
            realized: false,
            witness_sizes: None,
            run: Vec::new(),
        },
        Err(e) => return Err(runtime(e)),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("{:<12}{}", "realized", report.realized);
        if let Some((a, b)) = report.witness_sizes {
            println!("{:<12}|X| = {a}, |Y| = {b}", "witness");
            for (i, s) in report.run.iter().enumerate() {
                println!("  {i:>3}  {s}");
            }
        }
    }
    Ok(if report.realized { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let json = cli.json;
    let cap = cli.max_states;
    match cli.command {
        Command::Translate {
            program,
            output,
            emit_sigma,
        } => translate(&program, output.as_deref(), emit_sigma),
        Command::Check {
            program,
            formula,
            from,
            init,
            mode,
        } => {
            let mut p = read_program(&program)?;
            let f = formula_for(&p, &formula, &from)?;
            if let Some(src) = init {
                let extra = load_expr(&src, &p).map_err(|e| usage(anyhow!(e).context("in --init")))?;
                p.init = BoolExpr::and(p.init.clone(), extra);
            }
            let opts = opts(cap, QUOTIENT_CAP);
            let v = match mode {
                CheckMode::Infinite => check_infinite(&p, &from, &f, opts),
                CheckMode::Parameterised => check_parameterised(&p, &from, &f, opts),
            }
            .map_err(|e| match e {
                dimca::Error::Fragment(_) => usage(e),
                e => runtime(e),
            })?;
            print_verdict(&v, json);
            Ok(v.answer.exit_code())
        }
        Command::CheckFinite {
            program,
            formula,
            from,
            x_size,
            y_size,
        } => {
            let p = read_program(&program)?;
            let f = formula_for(&p, &formula, &from)?;
            if x_size == 0 || y_size == 0 {
                return Err(usage(anyhow!("type sizes must be at least 1")));
            }
            let v = check_finite(&p, Sizes::new(x_size, y_size), &from, &f, opts(cap, ORACLE_CAP)).map_err(runtime)?;
            print_verdict(&v, json);
            Ok(v.answer.exit_code())
        }
        Command::Compare { program, export_ts } => compare(&program, export_ts.as_deref(), cap, json),
        Command::Trace { program, replay, from } => trace(&program, &replay, from.as_deref(), cap, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
