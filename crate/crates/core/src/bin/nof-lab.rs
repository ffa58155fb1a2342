use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nof_lab::comb::log_threshold;
use nof_lab::composed::{analytic_cost_full, default_l};
use nof_lab::deck::{d1_closed_form, homogeneous_search, HomogeneousOutcome};
use nof_lab::experiment::{
    run_experiment, run_on, run_trial, to_csv, to_json, trial_spec, ExperimentDescriptor,
    ExperimentResult, ProtocolKind, SCHEMA,
};
use nof_lab::matrix::{Alphabet, InputMatrix};
use nof_lab::symfun::{basis_coefficients, smallest_prime_in};
use nof_lab::zoo::{make_named, random_symmetric_over, NamedFunction};
use nof_lab::{Error, Result};

#[derive(Parser)]
#[command(name = "nof-lab", version, about = "Simultaneous NOF protocol simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run protocol trials against the direct evaluator.
    Simulate(SimulateArgs),
    /// Search for small kernel witnesses of the deck system, per k.
    Uniqueness(UniquenessArgs),
    /// Analytic against measured costs over a parameter grid.
    CostTable(CostTableArgs),
    /// Dump the monomial-basis coefficients of an inner function.
    Basis(BasisArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON experiment descriptor; flags below are ignored when given.
    #[arg(long)]
    descriptor: Option<PathBuf>,
    #[arg(long, default_value = "eqsolve")]
    protocol: ProtocolKind,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Number of players; defaults to the protocol's minimum.
    #[arg(long)]
    k: Option<usize>,
    /// Rows taking part in the full protocol's counting.
    #[arg(long)]
    l: Option<usize>,
    /// GIP, DISJ, MAJ-MAJ, MAJ-THR:<s>, random, random-mixed.
    #[arg(long, default_value = "GIP")]
    function: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// strict or reduced.
    #[arg(long, default_value = "strict")]
    mode: String,
    /// Outer majority gives 0 on an exact tie.
    #[arg(long)]
    tie_down: bool,
    /// Run once on this matrix file instead of random matrices.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, env = "NOF_LAB_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Add wall-clock time per trial (output is then no longer reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct UniquenessArgs {
    /// Number of nonzero symbols.
    #[arg(long = "D", default_value_t = 1)]
    dims: usize,
    /// Column count; the L1 bound becomes 2n.
    #[arg(long, conflicts_with = "l1")]
    n: Option<u64>,
    #[arg(long = "L1")]
    l1: Option<u64>,
    #[arg(long, default_value_t = 1)]
    k_min: u32,
    #[arg(long, default_value_t = 8)]
    k_max: u32,
    /// Cap on level-k assignments explored per k.
    #[arg(long, default_value_t = 2_000_000)]
    limit: u64,
}

#[derive(Args)]
struct CostTableArgs {
    #[arg(long, default_value = "eqsolve")]
    protocol: ProtocolKind,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Comma-separated column counts.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    n: Vec<usize>,
    /// Comma-separated player counts, or `min`.
    #[arg(long, value_delimiter = ',', default_value = "min")]
    k: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BasisArgs {
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Inner function of a named composed function, or `random`.
    #[arg(long, default_value = "GIP")]
    function: String,
    /// Column count fixing the prime p; defaults to k.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Uniqueness(a) => uniqueness(a).map(|()| true),
        Command::CostTable(a) => cost_table(a).map(|()| true),
        Command::Basis(a) => basis(a).map(|()| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn minimum_k(protocol: ProtocolKind, alphabet: Alphabet, n: usize, l: Option<usize>) -> usize {
    let dims = alphabet.nonzero() as u32;
    match protocol {
        ProtocolKind::Eqsolve => log_threshold(4u64.pow(dims), n as u64) as usize,
        ProtocolKind::Split => 4usize.pow(dims),
        ProtocolKind::Full => l.unwrap_or_else(|| default_l(usize::MAX, alphabet.block_width(), n)),
    }
}

fn simulate(a: SimulateArgs) -> Result<bool> {
    let desc = match &a.descriptor {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(e.to_string()))?;
            serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?
        }
        None => {
            let alphabet = Alphabet::new(a.d)?;
            ExperimentDescriptor {
                protocol: a.protocol,
                d: a.d,
                n: a.n,
                k: a.k.unwrap_or_else(|| minimum_k(a.protocol, alphabet, a.n, a.l)),
                l: a.l,
                function: a.function.clone(),
                mode: a.mode.clone(),
                seed: a.seed,
                trials: a.trials,
                tie_down: a.tie_down,
            }
        }
    };
    let results = match &a.matrix {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let m = InputMatrix::parse_text(&text)?;
            let desc = ExperimentDescriptor {
                d: m.alphabet().size(),
                k: m.k(),
                n: m.n(),
                trials: 1,
                ..desc
            };
            desc.validate()?;
            vec![run_matrix(&desc, &m, a.timing)?]
        }
        None => run_experiment(&desc, a.jobs, a.timing)?,
    };
    let text = match a.format {
        Format::Csv => to_csv(&results)?,
        Format::Json => to_json(&results)? + "\n",
    };
    emit(a.output.as_ref(), &text)?;
    Ok(results.iter().all(ExperimentResult::passed))
}

fn run_matrix(desc: &ExperimentDescriptor, m: &InputMatrix, timing: bool) -> Result<ExperimentResult> {
    let spec = trial_spec(desc, 0)?;
    run_on(desc, 0, &spec, m, timing)
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidInput(e.to_string());
    match path {
        Some(p) => fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn uniqueness(a: UniquenessArgs) -> Result<()> {
    let bound = match (a.n, a.l1) {
        (Some(n), None) => 2 * n,
        (None, Some(b)) => b,
        (None, None) => return Err(Error::InvalidParameter("give --n or --L1".into())),
        (Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    let mut out = format!("{SCHEMA}\nk,D,l1_bound,verdict,min_l1,closed_form_l1,explored\n");
    let mut seen_unique = false;
    let mut monotone = true;
    for k in a.k_min.max(1)..=a.k_max {
        let closed = if a.dims == 1 {
            d1_closed_form(&BigInt::from(1), k)?.l1().to_string()
        } else {
            String::new()
        };
        let (verdict, min_l1, explored) = match homogeneous_search(k, a.dims, bound, a.limit) {
            Ok(HomogeneousOutcome::Witness(w)) => {
                if seen_unique {
                    monotone = false;
                }
                ("ambiguous-witness", w.l1().to_string(), String::new())
            }
            Ok(HomogeneousOutcome::Absent { explored }) => {
                seen_unique = true;
                ("unique", String::new(), explored.to_string())
            }
            Err(Error::LimitExceeded { limit }) => ("limit", String::new(), limit.to_string()),
            Err(e) => return Err(e),
        };
        out.push_str(&format!(
            "{k},{},{bound},{verdict},{min_l1},{closed},{explored}\n",
            a.dims
        ));
    }
    out.push_str(&format!("# monotone={monotone}\n"));
    emit(None, &out)
}

fn cost_table(a: CostTableArgs) -> Result<()> {
    let alphabet = Alphabet::new(a.d)?;
    let mut out = format!(
        "{SCHEMA}\nprotocol,d,k,n,l,measured_bits,analytic_bits,log_n_bits,exact,intermediate_bound,within_bound,closed_bound\n"
    );
    for &n in &a.n {
        for ks in &a.k {
            let k = if ks == "min" {
                minimum_k(a.protocol, alphabet, n, None)
            } else {
                ks.parse()
                    .map_err(|_| Error::Parse(format!("player count `{ks}`")))?
            };
            let desc = ExperimentDescriptor {
                protocol: a.protocol,
                d: a.d,
                n,
                k,
                l: None,
                function: "GIP".into(),
                mode: "strict".into(),
                seed: a.seed,
                trials: 1,
                tie_down: false,
            };
            desc.validate()?;
            let r = run_trial(&desc, 0, false)?;
            let (inter, within, closed) = match r.l {
                Some(l) => {
                    let b = analytic_cost_full(l, alphabet.block_width(), n)?;
                    let within = num_bigint::BigUint::from(r.measured_bits) <= b.intermediate;
                    (b.intermediate.to_string(), within.to_string(), format!("{:e}", b.closed))
                }
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{inter},{within},{closed}\n",
                a.protocol,
                a.d,
                k,
                n,
                r.l.map(|l| l.to_string()).unwrap_or_default(),
                r.measured_bits,
                r.analytic_bits,
                r.log_n_bits,
                r.measured_bits == r.analytic_bits,
            ));
        }
    }
    emit(None, &out)
}

fn basis(a: BasisArgs) -> Result<()> {
    let alphabet = Alphabet::new(a.d)?;
    let n = a.n.unwrap_or(a.k).max(2);
    let g = if a.function.eq_ignore_ascii_case("random") {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        random_symmetric_over(&mut rng, alphabet, a.k as u32)
    } else {
        let name: NamedFunction = a.function.parse()?;
        make_named(name, a.k, n, alphabet)?.inner(1).clone()
    };
    let p = smallest_prime_in(n as u64)?;
    let coeffs = basis_coefficients(&g.extend_to_blocks(), alphabet.block_width(), a.k as u32, p)?;
    emit(None, &format!("# p={}\n{}", p.p(), coeffs.to_dump()))
}
