use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

use macc_core::arrays::{verify_delivery_array, verify_epda, CachingArray, DeliveryArray};
use macc_core::constructions::{
    generalized_construct, lemma1_construct, optimal_construct, search_epda_with_budget,
    Lemma1Layout, SearchBudget,
};
use macc_core::formats::{
    emit_report, parse_caching, parse_delivery, parse_epda, print_caching, print_delivery,
    print_epda, residual_value, ToJson,
};
use macc_core::scheme::{compute_ndt, Demand, MaccScheme};
use macc_core::{BigNdt, MaccError, NetworkParams, SimFloat};

/// Multi-access coded caching toolkit.
#[derive(Debug, Parser)]
#[command(name = "macc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Optimal,
    Generalized,
    Lemma1,
}

#[derive(Debug, clap::Args)]
struct ParamArgs {
    #[arg(long)]
    k1: usize,
    #[arg(long)]
    k2: usize,
    #[arg(long)]
    r: usize,
    /// Number of server antennas.
    #[arg(long)]
    l: usize,
    /// Cache fraction M/N as an exact fraction `p/q`.
    #[arg(long, value_parser = parse_rational)]
    mu: Rational64,
}

impl ParamArgs {
    fn params(&self) -> Result<NetworkParams, MaccError> {
        NetworkParams::new(self.k1, self.k2, self.r, self.l, self.mu)
    }
}

#[derive(Debug, clap::Args)]
struct PairArgs {
    /// Caching array document.
    #[arg(long)]
    caching: PathBuf,
    /// Delivery array document.
    #[arg(long)]
    delivery: PathBuf,
    /// Expected cache fraction; defaults to Z/F of the caching array.
    #[arg(long, value_parser = parse_rational)]
    mu: Option<Rational64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct a caching/delivery array pair and verify it.
    Build {
        #[arg(long, value_enum)]
        method: Method,
        #[command(flatten)]
        params: ParamArgs,
        /// EPDA document fed to the lemma1 method.
        #[arg(long)]
        epda: Option<PathBuf>,
        /// Directory receiving caching.txt and delivery.txt.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Check an EPDA (C1-C4) or a delivery array against a caching array (D1-D4).
    Verify {
        #[arg(long, conflicts_with_all = ["caching", "delivery"])]
        epda: Option<PathBuf>,
        #[arg(long, requires = "delivery")]
        caching: Option<PathBuf>,
        #[arg(long, requires = "caching")]
        delivery: Option<PathBuf>,
    },
    /// Run seeded zero-forcing delivery trials and check every decode.
    Simulate {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// `distinct`, `random`, or a comma-separated list of file indices.
        #[arg(long, default_value = "distinct")]
        demand: String,
        /// Library size N; defaults to K1 K2.
        #[arg(long)]
        n_files: Option<usize>,
        /// Fresh channel draws allowed per trial after a degenerate one.
        #[arg(long, default_value_t = 3)]
        max_redraws: u32,
    },
    /// Report the achieved NDT and the closed-form comparisons.
    Ndt {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Exhaustive search for a smallest-S EPDA.
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        f: usize,
        #[arg(long)]
        z: usize,
        /// Largest S tried; defaults to k (f - z).
        #[arg(long)]
        s_max: Option<u32>,
        /// Largest k * f searched.
        #[arg(long, default_value_t = SearchBudget::default().max_cells)]
        budget: usize,
    },
}

fn parse_rational(s: &str) -> Result<Rational64, String> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: i64 = n.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
    let d: i64 = d.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
    if d == 0 {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational64::new(n, d))
}

/// Failure carrying the process exit code.
#[derive(Debug)]
enum Failure {
    Core(MaccError),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl From<MaccError> for Failure {
    fn from(e: MaccError) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(MaccError::DegenerateChannel { .. }) => 1,
            Failure::Core(MaccError::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Core(e) => (
                match e {
                    MaccError::InvalidParams(_) => "invalid_params",
                    MaccError::Precondition(_) => "precondition",
                    MaccError::Structural(_) => "structural",
                    MaccError::Parse { .. } => "parse",
                    MaccError::DegenerateChannel { .. } => "degenerate_channel",
                    MaccError::BudgetExceeded { .. } => "budget_exceeded",
                },
                e.to_string(),
            ),
            Failure::Io(path, e) => ("io", format!("{}: {e}", path.display())),
            Failure::Usage(m) => ("usage", m.clone()),
        };
        json!({ "error": kind, "message": message })
    }
}

/// Report printed to stdout plus the pass/fail verdict.
struct Outcome {
    report: Value,
    pass: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load_pair(pair: &PairArgs) -> Result<(NetworkParams, CachingArray, DeliveryArray), Failure> {
    let c = parse_caching(&read(&pair.caching)?)?;
    let b = parse_delivery(&read(&pair.delivery)?)?;
    let mu = pair
        .mu
        .unwrap_or_else(|| Rational64::new(c.z() as i64, c.f() as i64));
    let p = NetworkParams::new(b.k1(), b.k2(), b.r(), b.l(), mu)?;
    Ok((p, c, b))
}

fn cmd_build(method: Method, args: &ParamArgs, epda: Option<&Path>, out_dir: &Path) -> Result<Outcome, Failure> {
    let p = args.params()?;
    let (c, b) = match method {
        Method::Optimal => optimal_construct(&p)?,
        Method::Generalized => generalized_construct(&p)?,
        Method::Lemma1 => {
            Lemma1Layout::new(p.k1(), p.k2(), p.r(), 1)?;
            let path = epda.ok_or_else(|| Failure::Usage("--method lemma1 needs --epda FILE".into()))?;
            lemma1_construct(&parse_epda(&read(path)?)?, &p)?
        }
    };
    fs::create_dir_all(out_dir).map_err(|e| Failure::Io(out_dir.to_path_buf(), e))?;
    let caching_path = out_dir.join("caching.txt");
    let delivery_path = out_dir.join("delivery.txt");
    write(&caching_path, &print_caching(&c))?;
    write(&delivery_path, &print_delivery(&b))?;
    let verification = verify_delivery_array(&b, &c)?;
    let ndt: BigNdt = compute_ndt(&c, &b, &p)?;
    Ok(Outcome {
        pass: verification.passed(),
        report: json!({
            "caching": caching_path.display().to_string(),
            "delivery": delivery_path.display().to_string(),
            "f": b.f(),
            "s": b.s(),
            "verification": verification.to_json(),
            "ndt": ndt.to_json(),
        }),
    })
}

fn cmd_verify(epda: Option<&Path>, caching: Option<&Path>, delivery: Option<&Path>) -> Result<Outcome, Failure> {
    let report = match (epda, caching, delivery) {
        (Some(path), _, _) => verify_epda(&parse_epda(&read(path)?)?),
        (None, Some(c), Some(b)) => {
            let c = parse_caching(&read(c)?)?;
            let b = parse_delivery(&read(b)?)?;
            verify_delivery_array(&b, &c)?
        }
        _ => return Err(Failure::Usage("give --epda FILE or --caching FILE --delivery FILE".into())),
    };
    Ok(Outcome {
        pass: report.passed(),
        report: report.to_json(),
    })
}

fn demand_for(spec: &str, users: usize, n_files: usize, seed: u64) -> Result<Demand, Failure> {
    match spec {
        "distinct" => Ok(Demand::distinct(users)),
        "random" => Ok(Demand::random(users, n_files, seed)),
        list => {
            let files = list
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::Usage(format!("bad --demand `{list}`")))?;
            Ok(Demand::new(files, users, n_files)?)
        }
    }
}

fn cmd_simulate(
    pair: &PairArgs,
    seed: u64,
    trials: u64,
    demand: &str,
    n_files: Option<usize>,
    max_redraws: u32,
) -> Result<Outcome, Failure> {
    let (p, c, b) = load_pair(pair)?;
    let n_files = n_files.unwrap_or(p.users());
    if demand == "distinct" && n_files < p.users() {
        return Err(Failure::Usage("distinct demands need N >= K1 K2".into()));
    }
    let scheme = MaccScheme::new(p.clone(), c, b, n_files)?;
    let mut failed_trials = Vec::new();
    let mut max_residual = 0.0f64;
    let mut min_gain = f64::INFINITY;
    let mut max_error = 0.0f64;
    let mut max_interference = 0;
    let mut degenerate = Vec::new();
    let mut redraws = 0u64;
    for i in 0..trials {
        let trial_seed = seed.wrapping_add(i);
        let d = demand_for(demand, p.users(), n_files, trial_seed)?;
        match scheme.run_trial_with::<f64>(&d, trial_seed, f64::default_tolerances(), max_redraws) {
            Ok(trial) => {
                redraws += u64::from(trial.redraws);
                max_residual = max_residual.max(trial.plan.max_nulling_residual());
                min_gain = min_gain.min(trial.plan.min_desired_gain());
                max_error = max_error.max(trial.decode.max_error());
                max_interference = max_interference.max(trial.plan.max_interference_set());
                if !trial.decode.ok() {
                    failed_trials.push(trial.to_json());
                }
            }
            Err(e @ MaccError::DegenerateChannel { .. }) => {
                degenerate.push(json!({ "seed": trial_seed, "message": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let pass = failed_trials.is_empty() && degenerate.is_empty();
    Ok(Outcome {
        pass,
        report: json!({
            "pass": pass,
            "seed": seed,
            "trials": trials,
            "demand": demand,
            "n_files": n_files,
            "max_nulling_residual": residual_value(max_residual),
            "min_desired_gain": residual_value(min_gain),
            "max_decode_error": residual_value(max_error),
            "max_interference_set": max_interference,
            "antenna_bound": p.l() - 1,
            "channel_redraws": redraws,
            "failed_trials": failed_trials,
            "degenerate_channels": degenerate,
        }),
    })
}

fn cmd_ndt(pair: &PairArgs) -> Result<Outcome, Failure> {
    let (p, c, b) = load_pair(pair)?;
    let ndt: BigNdt = compute_ndt(&c, &b, &p)?;
    Ok(Outcome {
        pass: true,
        report: ndt.to_json(),
    })
}

fn cmd_search(k: usize, l: usize, f: usize, z: usize, s_max: Option<u32>, budget: usize) -> Result<Outcome, Failure> {
    let s_max = s_max.unwrap_or((k * f.saturating_sub(z)) as u32);
    let found = search_epda_with_budget(k, l, f, z, s_max, SearchBudget { max_cells: budget })?;
    Ok(match found {
        Some(a) => Outcome {
            pass: true,
            report: json!({ "found": true, "s": a.s(), "epda": print_epda(&a) }),
        },
        None => Outcome {
            pass: false,
            report: json!({ "found": false, "s_max": s_max }),
        },
    })
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Build { method, params, epda, out_dir } => cmd_build(method, &params, epda.as_deref(), &out_dir),
        Command::Verify { epda, caching, delivery } => {
            cmd_verify(epda.as_deref(), caching.as_deref(), delivery.as_deref())
        }
        Command::Simulate { pair, seed, trials, demand, n_files, max_redraws } => {
            cmd_simulate(&pair, seed, trials, &demand, n_files, max_redraws)
        }
        Command::Ndt { pair } => cmd_ndt(&pair),
        Command::Search { k, l, f, z, s_max, budget } => cmd_search(k, l, f, z, s_max, budget),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", emit_report(&outcome.report));
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(failure) => {
            print!("{}", emit_report(&failure.to_json()));
            eprintln!("macc: {}", failure.to_json()["message"].as_str().unwrap_or_default());
            ExitCode::from(failure.code())
        }
    }
}
