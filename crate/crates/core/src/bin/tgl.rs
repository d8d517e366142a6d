use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tgl_core::tgl::{has_errors, Diagnostic};
use tgl_core::{
    default_registry, parse_criteria, parse_gil, parse_grammar, validate_grammar, Criteria, FeatureStructure,
    GenOptions, Generator, Grammar, PreferenceMode, Registry, Symbol,
};

#[derive(Parser)]
#[command(name = "tgl", version, about = "Generate text from GIL structures with TGL grammars")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print solutions, one per line
    Generate(GenArgs),
    /// Check a grammar statically
    Validate {
        #[arg(long)]
        grammar: PathBuf,
    },
    /// Enumerate all solutions and print instrumentation counters
    Stats(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    input: PathBuf,
    /// Start category
    #[arg(long, default_value = "TXT")]
    start: String,
    /// Criteria file: `<rule-name> [<weight>]` per line
    #[arg(long)]
    criteria: Option<PathBuf>,
    /// Rank backtrack points by c-rule weight and prefix lines with `[w=...]`
    #[arg(long)]
    weights: bool,
    /// Disable the memo cache
    #[arg(long)]
    no_memo: bool,
    /// Print rule firings and backtracking to stderr
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Maximum number of solutions; 0 prints all
    #[arg(long, default_value_t = 1)]
    max: usize,
    /// Print statistics to stderr after generating
    #[arg(long)]
    stats: bool,
    /// Collapse identical strings
    #[arg(long)]
    dedupe: bool,
}

struct Failure(u8);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Generate(a) => generate(&a.run, a.max, a.stats, a.dedupe, false),
        Cmd::Stats(a) => generate(&a, 0, true, false, true),
        Cmd::Validate { grammar } => validate(&grammar),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code)) => ExitCode::from(code),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        Failure(2)
    })
}

fn print_diagnostics(path: &Path, diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{}:{d}", path.display());
    }
}

fn load_grammar(path: &Path, reg: &Registry) -> Result<Grammar, Failure> {
    let g = parse_grammar(&read(path)?).map_err(|e| {
        match e.line() {
            Some(_) => eprintln!("{}:{e}", path.display()),
            None => eprintln!("{}: {e}", path.display()),
        }
        Failure(2)
    })?;
    let diags = validate_grammar(&g, reg);
    print_diagnostics(path, &diags);
    if has_errors(&diags) {
        return Err(Failure(2));
    }
    Ok(g)
}

fn load_input(path: &Path) -> Result<FeatureStructure, Failure> {
    parse_gil(&read(path)?).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        Failure(2)
    })
}

fn validate(path: &Path) -> Result<(), Failure> {
    let reg = default_registry();
    load_grammar(path, &reg)?;
    println!("OK");
    Ok(())
}

fn generate(a: &RunArgs, max: usize, stats: bool, dedupe: bool, stats_only: bool) -> Result<(), Failure> {
    let reg = default_registry();
    let g = load_grammar(&a.grammar, &reg)?.with_start(Symbol::new(&a.start));
    let input = load_input(&a.input)?;
    let spec: Option<Criteria> = match &a.criteria {
        Some(p) => {
            let spec: Criteria = parse_criteria(&read(p)?).map_err(|e| {
                eprintln!("{}: {e}", p.display());
                Failure(2)
            })?;
            for name in spec.unknown_rules(&g) {
                eprintln!("{}: warning: no rule named \"{name}\"", p.display());
            }
            let mode = if a.weights {
                PreferenceMode::WeightRanked
            } else {
                PreferenceMode::FirstSolutionBias
            };
            Some(spec.with_mode(mode))
        }
        None => None,
    };
    let opts = GenOptions {
        memo: !a.no_memo,
        ..Default::default()
    };
    let mut gen = Generator::new(&g, &reg, input, opts).with_criteria(spec.as_ref());
    if a.trace {
        gen = gen.with_trace(|ev| eprintln!("{ev}"));
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut seen = HashSet::new();
    let mut printed = 0usize;
    while max == 0 || printed < max {
        let sol = match gen.next_solution() {
            Ok(Some(s)) => s,
            Ok(None) => break,
            Err(e) => {
                eprintln!("error: {e}");
                return Err(Failure(2));
            }
        };
        if dedupe && !seen.insert(sol.text.clone()) {
            continue;
        }
        printed += 1;
        if stats_only {
            continue;
        }
        let line = match (&sol.weight, a.weights) {
            (Some(w), true) => format!("[w={w}] {}", sol.text),
            _ => sol.text,
        };
        if writeln!(out, "{line}").is_err() {
            return Err(Failure(2));
        }
    }
    if stats_only {
        let _ = writeln!(out, "{}", gen.stats());
    } else if stats {
        eprintln!("{}", gen.stats());
    }
    if printed == 0 && !stats_only {
        return Err(Failure(1));
    }
    Ok(())
}
