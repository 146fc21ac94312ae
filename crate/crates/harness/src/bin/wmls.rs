//! `wmls`: generate witnessed instances, label them, verify labellings
//! exhaustively, sweep label lengths and re-check the regression corpus.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input or format error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wmls_harness::bench::{bench_sweep, scaling_summary, to_csv, Sweep, WeightProfile};
use wmls_harness::corpus::{self, Recipe};
use wmls_harness::generate::TorsoKind;
use wmls_harness::schemes::{lift_to_compose, validate_witnessed};
use wmls_harness::verify::{fault_injection, label_instance, verify_instance, LabelFile};
use wmls_harness::{BudgetConfig, HarnessError, SchemeKind, Witnessed};

#[derive(Parser)]
#[command(name = "wmls", version, about = "Weighted mixed labelling schemes: generation, labelling and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a witnessed instance (or the whole corpus with --corpus).
    Gen(GenArgs),
    /// Label an instance file.
    Label(LabelArgs),
    /// Verify an instance, either freshly labelled or against a label file.
    Verify(VerifyArgs),
    /// Sweep label lengths over instance sizes and write CSV.
    Bench(BenchArgs),
    /// Regenerate, validate, verify and fault-inject the corpus.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct Common {
    /// JSON file overriding budget constants.
    #[arg(long)]
    budget_config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, required_unless_present = "corpus")]
    scheme: Option<SchemeKind>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Treewidth of the product's first factor.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Rows of the path factor (default: round(√n)).
    #[arg(long)]
    h: Option<usize>,
    /// Apex vertices per part (apex/union) or per torso (decomposed).
    #[arg(long, default_value_t = 0)]
    a: usize,
    /// Union parts.
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Decomposition bags (default: max(1, n/25)).
    #[arg(long)]
    bags: Option<usize>,
    /// Maximum adhesion size of decomposed instances.
    #[arg(long, default_value_t = 3)]
    k_adh: usize,
    /// Probability of dropping each supergraph edge from the graph.
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance name stored in the file.
    #[arg(long)]
    name: Option<String>,
    /// Write the 30 corpus instances into this directory instead.
    #[arg(long, conflicts_with = "scheme")]
    corpus: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LabelArgs {
    input: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    /// Label file to check instead of labelling afresh.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    scheme: SchemeKind,
    /// Ascending instance sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [256usize, 1024, 4096, 16384])]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = WeightProfile::Unit)]
    weights: WeightProfile,
    /// Write 0 in the ms column so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SelftestArgs {
    /// Corpus directory (default: the committed corpus).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Single-bit flips per instance.
    #[arg(long, default_value_t = 100)]
    flips: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget_config: Option<PathBuf>,
}

/// Process outcome other than success.
enum Failure {
    Verification(String),
    Input(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Label(e) => Failure::Verification(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn budget_config(path: Option<&Path>) -> Result<BudgetConfig, Failure> {
    match path {
        None => Ok(BudgetConfig::default()),
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
    }
}

fn load(path: &Path) -> Result<Witnessed, Failure> {
    let w = Witnessed::from_json(&read(path)?)?;
    validate_witnessed(&w).map_err(|e| Failure::Input(format!("{}: witness rejected: {e}", path.display())))?;
    Ok(w)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    if let Some(dir) = &args.corpus {
        corpus::write_corpus(dir)?;
        eprintln!("wrote {} instances to {}", corpus::CORPUS.len(), dir.display());
        return Ok(());
    }
    let scheme = args.scheme.expect("clap requires --scheme without --corpus");
    let n = args.n;
    let h = args.h.unwrap_or(((n as f64).sqrt().round() as usize).max(1));
    let recipe = match scheme {
        SchemeKind::Product => Recipe::Product {
            n,
            k: args.k,
            h,
            edge_prob: args.edge_prob,
        },
        SchemeKind::Apex => Recipe::Apex {
            n,
            k: args.k,
            h,
            a: args.a,
            edge_prob: args.edge_prob,
        },
        SchemeKind::Union => {
            let m = args.m.max(1);
            let part_n = n / m;
            Recipe::Union {
                m,
                part_n,
                k: args.k,
                h: args.h.unwrap_or(((part_n as f64).sqrt().round() as usize).max(1)),
                a: args.a,
                edge_prob: args.edge_prob,
            }
        }
        scheme => Recipe::Decomposed {
            scheme,
            n,
            bags: args.bags.unwrap_or((n / 25).max(1)),
            k: args.k,
            torso: if args.a == 0 {
                TorsoKind::Product
            } else {
                TorsoKind::ProductApex(args.a)
            },
            k_adh: args.k_adh,
            edge_prob: args.edge_prob,
        },
    };
    let name = args.name.unwrap_or_else(|| format!("{scheme}-{n}-{}", args.seed));
    let w = recipe
        .build(&name, args.seed)
        .map_err(|e| Failure::Input(e.to_string()))?;
    write(args.out.as_deref(), &w.to_json())
}

fn label(args: LabelArgs) -> Result<(), Failure> {
    let cfg = budget_config(args.common.budget_config.as_deref())?;
    let w = load(&args.input)?;
    let f = label_instance(&w, &cfg)?;
    write(args.common.out.as_deref(), &json(&f))
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let cfg = budget_config(args.common.budget_config.as_deref())?;
    let w = load(&args.input)?;
    let labels = match &args.labels {
        None => None,
        Some(p) => {
            let f: LabelFile =
                serde_json::from_str(&read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            if f.labels.vertex.len() != w.instance.n() {
                return Err(Failure::Input(format!(
                    "{}: {} vertex labels for {} vertices",
                    p.display(),
                    f.labels.vertex.len(),
                    w.instance.n()
                )));
            }
            Some(f.labels)
        }
    };
    let report = verify_instance(&w, &cfg, labels.as_ref())?;
    write(args.common.out.as_deref(), &json(&report))?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{}: {}",
            report.instance,
            report.check.first_failure.as_deref().unwrap_or("verification failed")
        )))
    }
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let cfg = budget_config(args.common.budget_config.as_deref())?;
    let sweep = Sweep {
        scheme: args.scheme,
        sizes: args.n,
        reps: args.reps,
        seed: args.seed,
        weights: args.weights,
    };
    let records = bench_sweep(&sweep, &cfg)?;
    write(args.common.out.as_deref(), &to_csv(&records, !args.no_timing))?;
    eprintln!("n,max_slack,slack/log2n,slack/(log2n)^0.75,max_vlabel,vlabel/log2n");
    for p in scaling_summary(&records) {
        eprintln!(
            "{},{:.3},{:.4},{:.4},{},{:.3}",
            p.n, p.max_slack, p.slack_per_log, p.slack_per_log34, p.max_vlabel, p.vlabel_per_log
        );
    }
    Ok(())
}

fn selftest(args: SelftestArgs) -> Result<(), Failure> {
    let cfg = budget_config(args.budget_config.as_deref())?;
    let dir = args.corpus.unwrap_or_else(corpus::default_dir);
    let fresh = corpus::generate_corpus().map_err(|e| Failure::Input(e.to_string()))?;
    let mut failures = 0;
    for ((w, text), regenerated) in corpus::load_corpus(&dir)?.into_iter().zip(fresh) {
        let mut problems = Vec::new();
        if regenerated.to_json() != text {
            problems.push("regeneration differs from the committed file".to_string());
        }
        if let Err(e) = validate_witnessed(&w) {
            problems.push(format!("witness rejected: {e}"));
        }
        for inst in [w.clone(), lift_to_compose(&w)] {
            let r = verify_instance(&inst, &cfg, None)?;
            if !r.pass {
                problems.push(format!("{}: {}", r.scheme, r.check.first_failure.unwrap_or_default()));
            }
        }
        let faults = fault_injection(&w, &cfg, args.flips, args.seed)?;
        if !faults.silent.is_empty() {
            problems.push(format!("{} silent flips, first {:?}", faults.silent.len(), faults.silent[0]));
        }
        if problems.is_empty() {
            println!("ok    {}", w.name);
        } else {
            failures += 1;
            println!("FAIL  {}: {}", w.name, problems.join("; "));
        }
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{failures} corpus instances failed")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Label(a) => label(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::Selftest(a) => selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("wmls: verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("wmls: {msg}");
            ExitCode::from(2)
        }
    }
}
