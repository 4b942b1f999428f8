use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spikeslab::harness::{
    emit_interval_data, read_observations, run_contraction_check, run_dimension_check, run_shrinkage_demo,
    run_table, write_records, ExperimentConfig, OutputFormat, PriorKind, PriorSpec, ShrinkageConfig, SlabSpec,
};
use spikeslab::{FitConfig, LossSpec, Posterior, SlabFamily};

/// Boxed error for the binary; the library keeps its typed error.
type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "spikeslab", version, about = "Exact spike-and-slab posteriors for the sparse normal-means model")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the posterior to a data file and print a summary.
    Fit {
        data: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte Carlo loss table over a grid of sparsity levels and amplitudes.
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Loss exponents, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 1.0])]
        q: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Posterior mass on models larger than M p_n.
    DimCheck {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Multipliers M, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 1.0, 2.0, 3.0, 5.0, 10.0])]
        m: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Posterior quadratic risk relative to p_n log(n/p_n).
    ContractCheck {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Posterior-mean risk under Laplace and Gaussian slabs on shared data.
    ShrinkDemo {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Standard deviation of the Gaussian arm (default: variance-matched to the Laplace slab).
        #[arg(long)]
        gaussian_sd: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Per-coordinate medians and credible intervals for a data file.
    Intervals {
        data: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Number of nonzero coordinates, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![25, 50, 100])]
    pn: Vec<usize>,
    /// Signal amplitudes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![3.0, 4.0, 5.0])]
    amp: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 2012)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum PriorArg {
    Complexity,
    Betabin,
    Binomial,
    Poisson,
    Geometric,
}

#[derive(Clone, Copy, ValueEnum)]
enum SlabArg {
    Laplace,
    Gaussian,
    Student,
    Exppower,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "complexity")]
    prior: PriorArg,
    #[arg(long, default_value_t = 0.1)]
    kappa: f64,
    #[arg(long, default_value_t = 3.0)]
    b: f64,
    /// Binomial weight, Poisson rate or geometric success probability.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "laplace")]
    slab: SlabArg,
    /// Laplace rate, Gaussian sd, Student or exp-power scale.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Student degrees of freedom, or the exp-power exponent.
    #[arg(long, default_value_t = 3.0)]
    df: f64,
}

impl ModelArgs {
    fn prior(&self) -> PriorSpec {
        let kind = match self.prior {
            PriorArg::Complexity => PriorKind::Complexity,
            PriorArg::Betabin => PriorKind::Betabin,
            PriorArg::Binomial => PriorKind::Binomial,
            PriorArg::Poisson => PriorKind::Poisson,
            PriorArg::Geometric => PriorKind::Geometric,
        };
        PriorSpec {
            kind,
            kappa: self.kappa,
            b: self.b,
            alpha: self.alpha,
        }
    }

    fn slab(&self) -> SlabSpec {
        let family = match self.slab {
            SlabArg::Laplace => SlabFamily::Laplace,
            SlabArg::Gaussian => SlabFamily::Gaussian,
            SlabArg::Student => SlabFamily::Student,
            SlabArg::Exppower => SlabFamily::ExpPower,
        };
        SlabSpec {
            family,
            scale: self.scale,
            shape: self.df,
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl OutArgs {
    fn format_or(&self, default: OutputFormat) -> OutputFormat {
        match self.format {
            Some(FormatArg::Csv) => OutputFormat::Csv,
            Some(FormatArg::Json) => OutputFormat::Json,
            None => default,
        }
    }

    fn writer(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn emit<T: Serialize>(&self, value: &T) -> CliResult<()> {
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn emit_rows<T: Serialize>(&self, rows: &[T], default: OutputFormat) -> CliResult<()> {
        let mut w = self.writer()?;
        write_records(rows, self.format_or(default), &mut w)?;
        w.flush()?;
        Ok(())
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match cli.command {
        Command::Fit { data, model, out } => {
            let x = read_observations(&data)?;
            let post = Posterior::fit(&x, &model.prior().build(x.len())?, &model.slab().build()?, FitConfig::default())?;
            out.emit(&post.summary()?)?;
        }
        Command::Intervals { data, model, out } => match &out.out {
            Some(path) => {
                emit_interval_data(&data, &model.prior(), &model.slab(), path, out.format_or(OutputFormat::Csv))?;
            }
            None => {
                let x = read_observations(&data)?;
                let post =
                    Posterior::fit(&x, &model.prior().build(x.len())?, &model.slab().build()?, FitConfig::default())?;
                out.emit_rows(&spikeslab::harness::interval_records(&post)?, OutputFormat::Csv)?;
            }
        },
        Command::Simulate { sim, model, q, out } => {
            let cfg = ExperimentConfig {
                n: sim.n,
                pn_grid: sim.pn,
                amp_grid: sim.amp,
                replications: sim.reps,
                kappa: model.kappa,
                b: model.b,
                slab: model.slab(),
                losses: q.into_iter().map(LossSpec::new).collect::<Result<_, _>>()?,
                seed: sim.seed,
                ..ExperimentConfig::default()
            };
            let table = run_table(&cfg)?;
            for (p, a, rep, msg) in &table.failures {
                eprintln!("replication {rep} of cell p_n={p}, A={a} failed: {msg}");
            }
            match out.format_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let mut w = out.writer()?;
                    table.write_csv(&mut w)?;
                    w.flush()?;
                }
                OutputFormat::Json => out.emit(&table)?,
            }
            eprintln!(
                "identity audit: {} fits, {} violations (max gaps {:.1e}, {:.1e})",
                table.audit.fits, table.audit.violations, table.audit.max_dimension_gap, table.audit.max_mean_gap
            );
        }
        Command::DimCheck { sim, model, m, out } => {
            let prior = model.prior().build(sim.n)?;
            let slab = model.slab().build()?;
            let mut reports = Vec::new();
            for &p in &sim.pn {
                for &a in &sim.amp {
                    reports.push(run_dimension_check(sim.n, p, a, &m, sim.reps, &prior, &slab, sim.seed)?);
                }
            }
            out.emit(&reports)?;
        }
        Command::ContractCheck { sim, model, out } => {
            let slab = model.slab().build()?;
            let mut reports = Vec::new();
            for &a in &sim.amp {
                reports.push(run_contraction_check(sim.n, &sim.pn, a, sim.reps, &model.prior(), &slab, sim.seed)?);
            }
            out.emit(&reports)?;
        }
        Command::ShrinkDemo {
            sim,
            model,
            gaussian_sd,
            out,
        } => {
            let laplace = SlabSpec::laplace(model.scale);
            let cfg = ShrinkageConfig {
                prior: model.prior(),
                laplace,
                gaussian: SlabSpec::gaussian(gaussian_sd.unwrap_or(std::f64::consts::SQRT_2 / model.scale)),
                seed: sim.seed,
            };
            let mut reports = Vec::new();
            for &p in &sim.pn {
                reports.push(run_shrinkage_demo(sim.n, p, &sim.amp, sim.reps, &cfg)?);
            }
            out.emit(&reports)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
