use std::collections::HashSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use wrti::checker::check_proof;
use wrti::cnf::{
    generate_fphp, generate_php, generate_random_kcnf, parse_dimacs, restrict_clauses, serialize_dimacs, variable_extension,
    Assignment, Formula, Var,
};
use wrti::proof::{parse_proof, proof_system_tag, serialize_proof, serialize_proof_tagged, Proof, Rule, SystemDescriptor};
use wrti::solvers::{
    dll, dll_l_up, dll_learn, trace_to_regwrti, trace_to_regwrtl, trace_to_rt, write_trace, Algorithm, Heuristic, Learning,
    NonGreedy, Outcome, Run, Seeded, Smallest, UnitFirst,
};
use wrti::transforms::{eliminate_weakening, restrict_proof, unfold_to_rti, ve_simulate};

const SAT: u8 = 10;
const UNSAT: u8 = 20;
const REJECTED: u8 = 1;
const FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "wrti", version, about = "DLL search with clause learning and resolution tree proofs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a formula in DIMACS format.
    Generate(GenerateArgs),
    /// Run a search procedure; exits 10 on SAT and 20 on UNSAT.
    Solve(SolveArgs),
    /// Check a proof; exits 0 if accepted and 1 if rejected.
    Check(CheckArgs),
    /// Transform a proof.
    Convert(ConvertArgs),
    /// Solve every .cnf file of a directory and print a TSV report.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Php,
    Fphp,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicName {
    Smallest,
    Unit,
    Random,
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[arg(long, default_value = "dll-l-up", value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long, default_value = "first-uip", value_parser = parse_learning)]
    learn: Learning,
    #[arg(long, value_enum, default_value = "smallest")]
    heuristic: HeuristicName,
    /// Keep branching after a conflict, up to --levels extra decisions.
    #[arg(long)]
    non_greedy: bool,
    #[arg(long, default_value_t = 1)]
    levels: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    proof: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
    cnf: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Defaults to the system named in the proof file.
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    regular: bool,
    #[arg(long)]
    max_lemma: Option<usize>,
    #[arg(long)]
    refutation: bool,
    proof: PathBuf,
    cnf: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    WeakenElim,
    RdToRti,
    VeSimulate,
    Restrict,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Formula of the input proof; defaults to the proof's axiom clauses.
    #[arg(long)]
    cnf: Option<PathBuf>,
    /// Restriction for `restrict`, e.g. "1=0,3=1".
    #[arg(long)]
    assign: Option<String>,
    /// Where `ve-simulate` writes the extended formula.
    #[arg(long)]
    cnf_out: Option<PathBuf>,
    input: PathBuf,
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "dll,dll-l-up,dll-learn", value_parser = parse_algo)]
    algos: Vec<Algorithm>,
    #[command(flatten)]
    search: SearchArgs,
    /// Print `-` instead of the check time, making reports byte-identical.
    #[arg(long)]
    no_timing: bool,
    corpus: PathBuf,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    Algorithm::from_name(s).ok_or_else(|| format!("unknown algorithm `{s}`"))
}

fn parse_learning(s: &str) -> Result<Learning, String> {
    Learning::from_name(s).ok_or_else(|| format!("unknown learning strategy `{s}`"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Check(a) => check(a),
        Command::Convert(a) => convert(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(FAILURE)
        }
    }
}

fn read_formula(path: &Path) -> Result<Formula> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_proof(path: &Path) -> Result<(Proof, Option<String>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let p = parse_proof(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok((p, proof_system_tag(&text)))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn generate(a: GenerateArgs) -> Result<u8> {
    let f = match a.family {
        Family::Php => generate_php(a.n)?,
        Family::Fphp => generate_fphp(a.n)?,
        Family::Random => {
            let m = a.m.ok_or_else(|| anyhow!("--family random needs --m"))?;
            generate_random_kcnf(a.n, m, a.k, a.seed)?
        }
    };
    print!("{}", serialize_dimacs(&f));
    Ok(0)
}

fn heuristic(s: &SearchArgs) -> Box<dyn Heuristic> {
    let inner: Box<dyn Heuristic> = match s.heuristic {
        HeuristicName::Smallest => Box::new(Smallest),
        HeuristicName::Unit => Box::new(UnitFirst),
        HeuristicName::Random => Box::new(Seeded::new(s.seed)),
    };
    if s.non_greedy {
        Box::new(NonGreedy { inner, levels: s.levels })
    } else {
        inner
    }
}

fn run_search(f: &Formula, s: &SearchArgs) -> Result<Run> {
    let mut h = heuristic(s);
    let none = Assignment::new();
    let mut run = match s.algo {
        Algorithm::Dll => dll(f, &none, &mut h)?,
        Algorithm::DllLUp => {
            let mut ls = s.learn;
            dll_l_up(f, &none, &mut h, &mut ls, s.non_greedy)?
        }
        Algorithm::DllLearn => dll_learn(f, &none, &mut h, s.non_greedy)?,
    };
    run.trace.seed = s.seed;
    Ok(run)
}

/// The refutation a run certifies, with the system it belongs to.
fn certificate(run: &Run, f: &Formula) -> Result<(Proof, SystemDescriptor)> {
    Ok(match run.trace.algorithm {
        Algorithm::Dll => (trace_to_rt(&run.trace, f, &Assignment::new())?, SystemDescriptor::rt().regular()),
        Algorithm::DllLUp => (trace_to_regwrti(&run.trace, f)?, SystemDescriptor::wrti().regular()),
        Algorithm::DllLearn => (trace_to_regwrtl(&run.trace, f)?, SystemDescriptor::wrtl().regular()),
    })
}

fn solve(a: SolveArgs) -> Result<u8> {
    let f = read_formula(&a.cnf)?;
    let run = run_search(&f, &a.search)?;
    if let Some(path) = &a.trace {
        write_file(path, &write_trace(&run.trace))?;
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "c calls {}", run.trace.calls())?;
    match &run.outcome {
        Outcome::Sat(m) => {
            writeln!(out, "s SATISFIABLE")?;
            let mut line = String::from("v");
            for (v, value) in m.iter() {
                let d = v.index() as i64;
                line.push_str(&format!(" {}", if value { d } else { -d }));
            }
            writeln!(out, "{line} 0")?;
            Ok(SAT)
        }
        Outcome::Unsat => {
            writeln!(out, "s UNSATISFIABLE")?;
            if let Some(path) = &a.proof {
                let (p, sys) = certificate(&run, &f)?;
                write_file(path, &serialize_proof_tagged(&p, &sys.name()))?;
                writeln!(out, "c proof {} size {}", sys.name(), p.len())?;
            }
            Ok(UNSAT)
        }
    }
}

fn check(a: CheckArgs) -> Result<u8> {
    let (p, tag) = read_proof(&a.proof)?;
    let f = read_formula(&a.cnf)?;
    let name = a.system.or(tag).ok_or_else(|| anyhow!("no --system given and the proof names none"))?;
    let mut sys = SystemDescriptor::from_name(&name)?;
    if a.regular {
        sys = sys.regular();
    }
    if a.max_lemma.is_some() {
        sys = sys.with_max_lemma(a.max_lemma);
    }
    let verdict = check_proof(&p, &f, &sys, a.refutation);
    for v in &verdict.violations {
        println!("{v}");
    }
    if verdict.accepted() {
        println!("c accepted as {sys}");
        Ok(0)
    } else {
        Ok(REJECTED)
    }
}

/// Axiom clauses of a proof, used when no formula is given.
fn axioms_of(p: &Proof) -> Formula {
    let mut seen = HashSet::new();
    let clauses: Vec<_> = p
        .nodes()
        .iter()
        .filter(|n| n.rule == Rule::Axiom && seen.insert(n.clause.clone()))
        .map(|n| n.clause.clone())
        .collect();
    Formula::from_clauses(clauses).with_num_vars(p.num_vars())
}

fn parse_assignment(s: &str) -> Result<Assignment> {
    let mut a = Assignment::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (v, b) = part.split_once('=').ok_or_else(|| anyhow!("expected var=value, got `{part}`"))?;
        let v: u32 = v.trim().parse().with_context(|| format!("bad variable in `{part}`"))?;
        if v == 0 {
            bail!("variables start at 1");
        }
        let b = match b.trim() {
            "0" => false,
            "1" => true,
            other => bail!("value must be 0 or 1, got `{other}`"),
        };
        a.set(Var::new(v), b);
    }
    Ok(a)
}

fn convert(a: ConvertArgs) -> Result<u8> {
    let (p, tag) = read_proof(&a.input)?;
    let f = match &a.cnf {
        Some(path) => read_formula(path)?,
        None => axioms_of(&p),
    };
    let (out, sys) = match a.mode {
        Mode::WeakenElim => {
            let q = eliminate_weakening(&p, &f)?;
            let name = tag.and_then(|t| SystemDescriptor::from_name(&t).ok()).map(|mut s| {
                s.rules.weaken = false;
                s.name()
            });
            (q, name)
        }
        Mode::RdToRti => (unfold_to_rti(&p, &f)?.proof, Some(SystemDescriptor::rti().name())),
        Mode::VeSimulate => {
            let ve = variable_extension(&f);
            let q = ve_simulate(&p, &f, &ve)?;
            if let Some(path) = &a.cnf_out {
                write_file(path, &serialize_dimacs(&ve.formula))?;
            }
            (q, Some(SystemDescriptor::wrti().regular().name()))
        }
        Mode::Restrict => {
            let rho = parse_assignment(a.assign.as_deref().ok_or_else(|| anyhow!("--mode restrict needs --assign"))?)?;
            let q = restrict_proof(&p, &rho)?;
            if let Some(path) = &a.cnf_out {
                write_file(path, &serialize_dimacs(&restrict_clauses(&f, &rho)))?;
            }
            (q, Some(SystemDescriptor::rtw().name()))
        }
    };
    let text = match sys {
        Some(s) => serialize_proof_tagged(&out, &s),
        None => serialize_proof(&out),
    };
    write_file(&a.output, &text)?;
    println!("c size {} -> {}", p.len(), out.len());
    Ok(0)
}

struct Row {
    instance: String,
    algo: Algorithm,
    verdict: &'static str,
    calls: usize,
    size: Option<usize>,
    accepted: Option<bool>,
    check_ms: Option<f64>,
}

fn bench_one(path: &Path, algo: Algorithm, s: &SearchArgs) -> Result<Row> {
    let f = read_formula(path)?;
    let run = run_search(&f, &SearchArgs { algo, ..s.clone() })?;
    let instance = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut row = Row { instance, algo, verdict: "SAT", calls: run.trace.calls(), size: None, accepted: None, check_ms: None };
    if run.outcome == Outcome::Unsat {
        row.verdict = "UNSAT";
        let (p, sys) = certificate(&run, &f)?;
        let start = Instant::now();
        let verdict = check_proof(&p, &f, &sys, true);
        row.check_ms = Some(start.elapsed().as_secs_f64() * 1000.0);
        row.size = Some(p.len());
        row.accepted = Some(verdict.accepted());
    }
    Ok(row)
}

fn bench(a: BenchArgs) -> Result<u8> {
    let mut files: Vec<PathBuf> = fs::read_dir(&a.corpus)
        .with_context(|| format!("reading {}", a.corpus.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "cnf"));
    files.sort();
    let jobs: Vec<(&PathBuf, Algorithm)> = files.iter().flat_map(|p| a.algos.iter().map(move |&al| (p, al))).collect();
    let rows: Vec<Row> = jobs.par_iter().map(|&(p, al)| bench_one(p, al, &a.search)).collect::<Result<_>>()?;

    let dash = || "-".to_string();
    let mut out = std::io::stdout().lock();
    writeln!(out, "instance\talgo\tverdict\tcalls\tproof_size\taccepted\tcheck_ms")?;
    for r in rows {
        let check_ms = if a.no_timing { dash() } else { r.check_ms.map_or_else(dash, |t| format!("{t:.3}")) };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.instance,
            r.algo,
            r.verdict,
            r.calls,
            r.size.map_or_else(dash, |s| s.to_string()),
            r.accepted.map_or_else(dash, |b| if b { "yes" } else { "no" }.to_string()),
            check_ms
        )?;
    }
    Ok(0)
}
