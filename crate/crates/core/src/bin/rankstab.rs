use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rankstab::harness::{
    run_experiment, scatter_svg, verify_suite, write_csv, ExperimentConfig, Family, InstanceSpec, Report, VerifyConfig,
};
use rankstab::pipeline::{correct, CorrectionConfig, Schedule};
use rankstab::tuples::{Backend, MatrixTuple};
use rankstab::{Error, Result};

#[derive(Parser)]
#[command(name = "rankstab", version, about = "Correct almost-commuting matrix tuples in the rank metric")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Base seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Arithmetic for reported metrics.
    #[arg(long, global = true)]
    backend: Option<Backend>,
    /// Radius schedule, e.g. `8,4,2`.
    #[arg(long, global = true)]
    schedule: Option<String>,
    /// Relative tolerance for float ranks.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it as JSON.
    Gen {
        /// Instance spec JSON; the flags below are ignored when given.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "commuting_plus_noise")]
        family: Family,
        /// Matrix size; for permutation pairs, the square of the torus side.
        #[arg(long, default_value_t = 16)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Perturbation rank, or transposition defects for permutation pairs.
        #[arg(long, default_value_t = 1)]
        noise_rank: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correct a batch from an experiment config, or a single tuple.
    Run {
        #[arg(long, required_unless_present = "instance")]
        config: Option<PathBuf>,
        /// A tuple JSON file to correct on its own.
        #[arg(long, conflicts_with = "config")]
        instance: Option<PathBuf>,
        /// Include dense output matrices (single-tuple mode).
        #[arg(long)]
        dense: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every property suite and the assertions of a correction batch.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Random cases per property.
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn saved reports into CSV and an SVG scatter plot.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn apply_common(c: &Common, cfg: &mut CorrectionConfig) -> Result<()> {
    if let Some(s) = &c.schedule {
        cfg.schedule = cfg.schedule.with_radii(Schedule::parse_radii(s)?)?;
    }
    if let Some(t) = c.tol {
        cfg.tol = t;
    }
    if let Some(s) = c.seed {
        cfg.search.seed = s;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let c = &cli.common;
    match cli.command {
        Command::Gen { config, family, d, n, noise_rank, out } => {
            let mut spec = match config {
                Some(p) => serde_json::from_str::<InstanceSpec>(&fs::read_to_string(p)?)?,
                None => match family {
                    Family::CommutingPlusNoise => InstanceSpec::commuting_plus_noise(d, n, noise_rank, 0),
                    Family::PermutationPair => {
                        // generate() rejects a non-square d or n ≠ 2
                        let mut s = InstanceSpec::permutation_pair(1, noise_rank, 0);
                        s.d = d;
                        s.n = n;
                        s
                    }
                },
            };
            if let Some(s) = c.seed {
                spec.seed = s;
            }
            if let Some(b) = c.backend {
                spec.backend = b;
            }
            let t = spec.generate()?;
            write_out(out.as_ref(), &serde_json::to_string_pretty(&t)?)?;
            Ok(true)
        }
        Command::Run { config, instance, dense, out } => {
            if let Some(path) = instance {
                let t: MatrixTuple = serde_json::from_str(&fs::read_to_string(path)?)?;
                let mut cfg = CorrectionConfig::default();
                apply_common(c, &mut cfg)?;
                let res = correct(&t, &cfg)?;
                let ok = res.failed_assertions().next().is_none();
                write_out(out.as_ref(), &serde_json::to_string_pretty(&res.to_json(dense))?)?;
                return Ok(ok);
            }
            let path = config.ok_or_else(|| Error::Config("run needs --config or --instance".into()))?;
            let mut cfg = ExperimentConfig::from_json_file(&path)?;
            apply_common(c, &mut cfg.correction)?;
            if let Some(s) = c.seed {
                cfg.seed = s;
            }
            if let Some(b) = c.backend {
                cfg.backend = b;
            }
            let reports = run_experiment(&cfg);
            for r in &reports {
                eprintln!(
                    "{} d={} noise={} seed={}: {}",
                    r.spec.family,
                    r.spec.d,
                    r.spec.noise_rank,
                    r.spec.seed,
                    match &r.error {
                        Some(e) => format!("error: {e}"),
                        None => format!("δ={:.4} ε={:.4} coverage={:.4} failed={}", r.delta_in, r.dist_out, r.coverage, r.assertions_failed),
                    }
                );
            }
            write_out(out.as_ref(), &serde_json::to_string_pretty(&reports)?)?;
            Ok(reports.iter().all(|r| r.ok && r.assertions_failed == 0))
        }
        Command::Verify { config, cases, out } => {
            let mut cfg = match config {
                Some(p) => serde_json::from_str::<VerifyConfig>(&fs::read_to_string(p)?)?,
                None => VerifyConfig::default(),
            };
            apply_common(c, &mut cfg.experiment.correction)?;
            if let Some(s) = c.seed {
                cfg.seed = s;
                cfg.experiment.seed = s;
            }
            if let Some(b) = c.backend {
                cfg.experiment.backend = b;
            }
            if let Some(k) = cases {
                cfg.cases = k;
            }
            let summary = verify_suite(&cfg);
            for r in &summary.results {
                let mark = if r.passed() { "pass" } else { "FAIL" };
                eprintln!("{mark} {:<14} {:<52} {:>4} cases", r.module, r.property, r.cases);
                if let Some(e) = &r.example {
                    eprintln!("     first failure: {e}");
                }
            }
            if let Some(p) = out {
                fs::write(p, serde_json::to_string_pretty(&summary)?)?;
            }
            Ok(summary.passed)
        }
        Command::Report { input, csv, svg } => {
            let reports: Vec<Report> = serde_json::from_str(&fs::read_to_string(input)?)?;
            match csv {
                Some(p) => write_csv(&reports, fs::File::create(p)?)?,
                None => write_csv(&reports, io::stdout())?,
            }
            if let Some(p) = svg {
                fs::write(p, scatter_svg(&reports))?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
