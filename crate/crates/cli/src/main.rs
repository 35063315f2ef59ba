use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use gpotts::critical::{CriticalSolver, Tolerances};
use gpotts::finite::{percolation_scan, EsSampler, GibbsSampler, DEFAULT_MAX_CLIQUES, DEFAULT_MAX_STATES};
use gpotts::fuzzy::{FuzzyAnalyzer, SpinPartition};
use gpotts::model::{k, k_prime, ModelParams, ProbabilityVector};
use gpotts::scheme::{gibbs_trajectory_with, CollapsingScheme, SchemeFile, Status};
use gpotts::verify::{run_suite, Suite};

mod grid;

use grid::{parse_grid, parse_sizes};

/// Phase structure and Gibbsianness of the generalized mean-field Potts model.
#[derive(Parser, Debug)]
#[command(name = "gpotts", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Inverse-temperature tolerance of the critical solver
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for every random stream
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Cap on type classes or states visited by exact enumerations
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES)]
    max_states: u64,
    /// Cap on the number of cliques held by the coupled sampler
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CLIQUES)]
    max_cliques: u64,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps
    #[arg(long, global = true, env = "GPOTTS_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical temperatures and transition order (JSON)
    Critical {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        z: f64,
    },
    /// beta_zero, beta_one and beta_c over a (q, z) grid (CSV)
    #[command(alias = "bifurcation")]
    PhaseDiagram {
        /// q values: start:stop:step or comma list
        #[arg(long)]
        q_grid: String,
        #[arg(long)]
        z_grid: String,
    },
    /// Free-energy profile k(u) and its stationary points (CSV)
    Landscape {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        z: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "0:1:0.01")]
        u_grid: String,
    },
    /// Gibbs verdict of the fuzzy model (JSON)
    Fuzzy {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        z: f64,
        #[arg(long)]
        beta: f64,
        /// Class sizes, e.g. 2,3
        #[arg(long)]
        partition: String,
    },
    /// Limiting single-site kernel row (JSON)
    Kernel {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        z: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        partition: String,
        /// Conditioning class frequencies, e.g. 0.4,0.6
        #[arg(long)]
        nu: String,
    },
    /// Gibbs status along a collapsing scheme (CSV, or JSON with --json)
    Scheme {
        /// Scheme file {"q":..,"z":..,"partitions":[..]}
        #[arg(long, conflicts_with = "binary")]
        scheme: Option<PathBuf>,
        /// Use the binary scheme on 2^LEVELS colors instead of a file
        #[arg(long)]
        binary: Option<u32>,
        /// Interaction exponent; overrides the file
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        json: bool,
    },
    /// Heat-bath chain of color counts (CSV)
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        z: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        sweeps: u64,
        /// Record every k-th sweep
        #[arg(long, default_value_t = 1)]
        every: u64,
        #[arg(long, default_value_t = 0)]
        chain: u64,
    },
    /// Largest-cluster fraction of the clique random-cluster model over a lambda grid (CSV)
    Rcm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        z: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        /// Values of lambda, with p = lambda / N^(z-1)
        #[arg(long)]
        lambda_grid: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        /// Emit per-step component statistics for a single lambda
        #[arg(long)]
        trace: bool,
    },
    /// Run the oracle suites; exit 1 on any failure
    Verify {
        /// Suites to run (default: all)
        #[arg(long = "suite", value_parser = parse_suite, value_delimiter = ',')]
        suites: Vec<Suite>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: gpotts::Error| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Model(gpotts::Error),
    Usage(String),
    Io(io::Error),
    Verification(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Model(gpotts::Error::AtDiscontinuity { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Usage(s) => f.write_str(s),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Verification(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<gpotts::Error> for CliError {
    fn from(e: gpotts::Error) -> Self {
        CliError::Model(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn grid(spec: &str) -> CliResult<Vec<f64>> {
    parse_grid(spec).map_err(CliError::Usage)
}

fn partition(spec: &str) -> CliResult<SpinPartition> {
    Ok(SpinPartition::new(parse_sizes(spec).map_err(CliError::Usage)?)?)
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn writer(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(w: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(w)?;
    Ok(())
}

fn solver(g: &Global) -> CliResult<CriticalSolver> {
    match g.tol {
        None => Ok(CriticalSolver::default()),
        Some(t) if t > 0.0 && t < 1.0 => Ok(CriticalSolver::new(Tolerances::scaled(t))),
        Some(t) => usage(format!("--tol must lie in (0, 1), got {t}")),
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Gibbs => "gibbs",
        Status::NonGibbs => "non-gibbs",
        Status::TrivialEndpoint => "trivial",
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    if let Some(t) = g.threads {
        if t == 0 {
            return usage("thread count must be positive");
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let solver = solver(g)?;

    match &cli.command {
        Command::Critical { q, z } => {
            let ct = solver.beta_c(*q, *z)?;
            write_json(&mut *writer(&g.out)?, &ct)?;
        }

        Command::PhaseDiagram { q_grid, z_grid } => {
            let qs = grid(q_grid)?;
            let zs = grid(z_grid)?;
            if let Some(bad) = qs.iter().chain(&zs).find(|&&x| x < 2.0) {
                return usage(format!("grid values must be >= 2, got {bad}"));
            }
            let points: Vec<(f64, f64)> = qs.iter().flat_map(|&q| zs.iter().map(move |&z| (q, z))).collect();
            let rows = points.par_iter().map(|&(q, z)| solver.beta_c(q, z).map(|ct| (q, z, ct))).collect::<Result<Vec<_>, _>>()?;
            let mut w = writer(&g.out)?;
            writeln!(w, "q,z,beta_zero,beta_one,beta_c,order")?;
            for (q, z, ct) in rows {
                let order = serde_json::to_value(ct.order).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                writeln!(w, "{},{},{},{},{},{}", num(q), num(z), opt_num(ct.beta_zero), num(ct.beta_one), num(ct.beta_c), order)?;
            }
            w.flush()?;
        }

        Command::Landscape { q, z, beta, u_grid } => {
            let p = ModelParams::new(*q, *z, *beta)?;
            let us = grid(u_grid)?;
            let profile = solver.landscape(&p)?;
            let mut w = writer(&g.out)?;
            writeln!(w, "u,k,k_prime")?;
            for u in us {
                let u = u.clamp(0.0, 1.0 - 1e-9);
                writeln!(w, "{},{},{}", num(u), num(k(u, &p)), num(k_prime(u, &p)))?;
            }
            writeln!(w)?;
            writeln!(w, "stationary_u,k,kind,global_min")?;
            for s in &profile.points {
                let kind = serde_json::to_value(s.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                writeln!(w, "{},{},{},{}", num(s.u), num(s.k), kind, s.u == profile.global_min_u)?;
            }
            w.flush()?;
        }

        Command::Fuzzy { q, z, beta, partition: spec } => {
            let part = partition(spec)?;
            let qi = ModelParams::new(*q, *z, *beta)?.q_int()?;
            part.check_fuzzy(qi)?;
            let verdict = FuzzyAnalyzer::new(solver).classify(*beta, *q, *z, &part)?;
            write_json(&mut *writer(&g.out)?, &verdict)?;
        }

        Command::Kernel { q, z, beta, partition: spec, nu } => {
            let part = partition(spec)?;
            let qi = ModelParams::new(*q, *z, *beta)?.q_int()?;
            part.check_fuzzy(qi)?;
            let nu = ProbabilityVector::new(grid(nu)?)?;
            let row = FuzzyAnalyzer::new(solver).q_infinity_row(&nu, *beta, *z, &part)?;
            write_json(&mut *writer(&g.out)?, &row)?;
        }

        Command::Scheme { scheme, binary, z, beta, json } => {
            let (scheme, file_z) = match (scheme, binary) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(path)?;
                    let file: SchemeFile = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    (file.scheme()?, Some(file.z))
                }
                (None, Some(levels)) if (1..=20).contains(levels) => (CollapsingScheme::binary(*levels), None),
                (None, Some(levels)) => return usage(format!("--binary needs 1..=20 levels, got {levels}")),
                _ => return usage("give exactly one of --scheme or --binary"),
            };
            let Some(z) = z.or(file_z) else { return usage("--z is required with --binary") };
            let analyzer = FuzzyAnalyzer::new(solver);
            let tr = gibbs_trajectory_with(&analyzer, *beta, &scheme, z)?;
            let mut w = writer(&g.out)?;
            if *json {
                write_json(&mut *w, &tr)?;
            } else {
                writeln!(w, "t,block_sizes,r_star,threshold_beta,status")?;
                for p in &tr.points {
                    let sizes: Vec<String> = p.block_sizes.iter().map(ToString::to_string).collect();
                    let r = p.r_star.map(|r| r.to_string()).unwrap_or_default();
                    writeln!(w, "{},{},{},{},{}", p.t, sizes.join(" "), r, opt_num(p.threshold_beta), status_name(p.status))?;
                }
            }
            w.flush()?;
        }

        Command::Sample { n, q, z, beta, sweeps, every, chain } => {
            if *every == 0 {
                return usage("--every must be positive");
            }
            let p = ModelParams::new(*q, *z, *beta)?;
            let mut sampler = GibbsSampler::new(*n, &p, g.seed, *chain)?;
            let mut w = writer(&g.out)?;
            let cols: Vec<String> = (1..=sampler.counts().len()).map(|i| format!("n_{i}")).collect();
            writeln!(w, "sweep_index,{}", cols.join(","))?;
            let mut result = Ok(());
            sampler.run(*sweeps, |t, counts| {
                if result.is_ok() && t % every == 0 {
                    let c: Vec<String> = counts.iter().map(ToString::to_string).collect();
                    result = writeln!(w, "{t},{}", c.join(","));
                }
            });
            result?;
            w.flush()?;
        }

        Command::Rcm { n, z, q, lambda_grid, samples, burn_in, trace } => {
            let lambdas = grid(lambda_grid)?;
            if let Some(bad) = lambdas.iter().find(|&&l| l < 0.0) {
                return usage(format!("lambda must be >= 0, got {bad}"));
            }
            let mut w = writer(&g.out)?;
            if *trace {
                let [lambda] = lambdas[..] else { return usage("--trace needs a single lambda") };
                let p_open = (lambda / (*n as f64).powi(*z as i32 - 1)).min(1.0);
                let mut chain = EsSampler::new(*n, *z, *q, p_open, g.seed, 0, g.max_cliques)?;
                for _ in 0..*burn_in {
                    chain.step();
                }
                writeln!(w, "step,k_omega,max_fraction,sum_sq_fractions,open_cliques")?;
                for t in 1..=*samples {
                    chain.step();
                    let r = chain.components();
                    writeln!(w, "{t},{},{},{},{}", r.k_omega, num(r.max_fraction()), num(r.sum_sq_fractions()), chain.open_count())?;
                }
            } else {
                let rows = lambdas
                    .par_iter()
                    .map(|&l| percolation_scan(*n, *z, *q, &[l], g.seed, *samples, *burn_in, g.max_cliques).map(|mut v| v.remove(0)))
                    .collect::<Result<Vec<_>, _>>()?;
                writeln!(w, "lambda,mean_max_fraction,stderr")?;
                for r in rows {
                    writeln!(w, "{},{},{}", num(r.lambda), num(r.mean_max_fraction), num(r.stderr))?;
                }
            }
            w.flush()?;
        }

        Command::Verify { suites } => {
            let suites = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.clone() };
            let mut w = writer(&g.out)?;
            let mut failed = 0;
            for suite in suites {
                for r in run_suite(suite, g.max_states)? {
                    let verdict = if r.passed { "PASS" } else { "FAIL" };
                    writeln!(w, "{verdict} [{}] {}: measured {:e}, tolerance {:e}", r.suite, r.name, r.measured, r.tolerance)?;
                    failed += usize::from(!r.passed);
                }
            }
            writeln!(w, "{}", if failed == 0 { "all checks passed".to_string() } else { format!("{failed} check(s) failed") })?;
            w.flush()?;
            if failed > 0 {
                return Err(CliError::Verification(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
