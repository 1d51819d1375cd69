use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpareto::driver::{chunk_evaluations, compare_hv_values, front_of, hv_trajectory, variability_fronts};
use dpareto::experiment::{load_log, run_experiment, write_trajectory, write_variability, ExperimentConfig};
use dpareto::pareto::hypervolume;
use dpareto::privacy::{dpsgd_epsilon, gaussian_mechanism_epsilon, svt_epsilon};
use dpareto::{AntiIdealPoint, Error, Evaluation};

#[derive(Parser)]
#[command(name = "dpareto", version, about = "Privacy-utility Pareto fronts of DP algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Query a privacy accountant.
    #[command(subcommand)]
    Account(Account),
    /// Recompute statistics from evaluation logs.
    #[command(subcommand)]
    Analyze(Analyze),
}

#[derive(Subcommand)]
enum Account {
    /// ε of the sparse vector technique with noise b and bound C.
    Svt {
        #[arg(long)]
        b: f64,
        #[arg(long = "C")]
        c: f64,
    },
    /// Smallest ε of the Gaussian mechanism at the given δ.
    Gaussian {
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        sens: f64,
        #[arg(long)]
        delta: f64,
    },
    /// ε of DP-SGD over T epochs of lots of size m drawn from n examples.
    Dpsgd {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long = "T")]
        epochs: u64,
        /// Noise multiplier.
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        delta: f64,
    },
}

#[derive(Args)]
struct Logs {
    /// Evaluation logs (JSONL); their points are pooled.
    #[arg(required = true)]
    logs: Vec<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AntiIdeal {
    /// Reference point as `eps,error`.
    #[arg(long, default_value = "10,1", value_parser = parse_anti_ideal)]
    anti_ideal: AntiIdealPoint,
}

#[derive(Subcommand)]
enum Analyze {
    /// Pareto front as `epsilon,error` CSV.
    Front(Logs),
    /// Hypervolume of the pooled front.
    Hv {
        #[command(flatten)]
        logs: Logs,
        #[command(flatten)]
        anti: AntiIdeal,
    },
    /// Hypervolume after each evaluation, as `index,hypervolume` CSV.
    Trajectory {
        #[command(flatten)]
        logs: Logs,
        #[command(flatten)]
        anti: AntiIdeal,
    },
    /// Best, mean and worst fronts from the per-run utilities.
    Variability(Logs),
    /// One-sample t comparison of a BO log against random-search logs.
    Compare {
        #[arg(long)]
        bo: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        random: Vec<PathBuf>,
        /// Split the pooled random logs into chunks of this size instead of
        /// treating each file as one run.
        #[arg(long)]
        chunk: Option<usize>,
        #[command(flatten)]
        anti: AntiIdeal,
    },
}

fn parse_anti_ideal(s: &str) -> Result<AntiIdealPoint, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [e, u] = parts.as_slice() else {
        return Err(format!("expected `eps,error`, got `{s}`"));
    };
    let e: f64 = e.parse().map_err(|_| format!("bad epsilon `{e}`"))?;
    let u: f64 = u.parse().map_err(|_| format!("bad error `{u}`"))?;
    Ok(AntiIdealPoint::new(e, u))
}

/// Fixed 12-decimal rendering with trailing zeros removed.
fn plain(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".to_owned(),
        s => s.to_owned(),
    }
}

fn pooled(paths: &[PathBuf]) -> dpareto::Result<Vec<Evaluation>> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(load_log(p)?);
    }
    Ok(all)
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> dpareto::Result<()>) -> dpareto::Result<()> {
    match out {
        Some(path) => {
            let mut f = io::BufWriter::new(std::fs::File::create(path)?);
            write(&mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
        }
    }
    Ok(())
}

fn account(cmd: Account) -> dpareto::Result<()> {
    let eps = match cmd {
        Account::Svt { b, c } => svt_epsilon(b, c)?,
        Account::Gaussian { sigma, sens, delta } => gaussian_mechanism_epsilon(sigma, sens, delta)?,
        Account::Dpsgd {
            n,
            m,
            epochs,
            sigma,
            delta,
        } => dpsgd_epsilon(n, m, epochs, sigma, delta)?,
    };
    println!("{}", plain(eps));
    Ok(())
}

fn analyze(cmd: Analyze) -> dpareto::Result<()> {
    match cmd {
        Analyze::Front(logs) => {
            let front = front_of(&pooled(&logs.logs)?);
            emit(logs.out.as_deref(), |w| front.write_csv(w))
        }
        Analyze::Hv { logs, anti } => {
            let front = front_of(&pooled(&logs.logs)?);
            println!("{}", plain(hypervolume(&front, &anti.anti_ideal)));
            Ok(())
        }
        Analyze::Trajectory { logs, anti } => {
            let t = hv_trajectory(&pooled(&logs.logs)?, &anti.anti_ideal);
            emit(logs.out.as_deref(), |w| write_trajectory(w, &t))
        }
        Analyze::Variability(logs) => {
            let v = variability_fronts(&pooled(&logs.logs)?)?;
            emit(logs.out.as_deref(), |w| write_variability(w, &v))
        }
        Analyze::Compare {
            bo,
            random,
            chunk,
            anti,
        } => {
            let anti = anti.anti_ideal;
            let bo_hv = hypervolume(&front_of(&load_log(&bo)?), &anti);
            let random_hvs: Vec<f64> = match chunk {
                Some(size) => {
                    let all = pooled(&random)?;
                    chunk_evaluations(&all, size)
                        .into_iter()
                        .map(|c| hypervolume(&front_of(c), &anti))
                        .collect()
                }
                None => random
                    .iter()
                    .map(|p| Ok(hypervolume(&front_of(&load_log(p)?), &anti)))
                    .collect::<dpareto::Result<_>>()?,
            };
            let c = compare_hv_values(bo_hv, &random_hvs)?;
            println!("chunks: {}", c.chunks);
            println!("mean_diff: {}", plain(c.mean_diff));
            println!("ci95: ({}, {})", plain(c.ci95.0), plain(c.ci95.1));
            println!("t: {}", plain(c.t_stat));
            println!("p: {}", plain(c.p_value));
            println!("significant: {}", c.significant);
            if c.degenerate {
                println!("degenerate: all differences are equal");
            }
            Ok(())
        }
    }
}

fn run(config: &Path) -> dpareto::Result<()> {
    let mut config = ExperimentConfig::load(config)?;
    config.apply_env()?;
    let summary = run_experiment(&config)?;
    let r = &summary.result;
    eprintln!(
        "{} evaluations ({} resumed, {} skipped), front of {} points in {}",
        r.evaluations.len(),
        summary.resumed,
        r.skipped.len(),
        r.front.len(),
        summary.output.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config } => run(&config),
        Command::Account(cmd) => account(cmd),
        Command::Analyze(cmd) => analyze(cmd),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
