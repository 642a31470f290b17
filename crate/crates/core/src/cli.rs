//! `qwrw run|verify|bench|plot`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench;
use crate::coin::CoinAlgebra;
use crate::error::{Error, Result};
use crate::experiment::{self, write_file, ExperimentConfig};
use crate::plot;
use crate::verify::{self, VerifyPlan};

#[derive(Debug, Parser)]
#[command(name = "qwrw", version, about = "Hadamard walk vs. four-row birth-and-death chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate both models and write distributions and a report.
    Run(RunArgs),
    /// Check every identity and equivalence residual against its bound.
    Verify(VerifyArgs),
    /// Time matrix-free and dense steps and fit the scaling exponent.
    Bench(BenchArgs),
    /// Render a CSV produced by `run` as an SVG chart.
    Plot(PlotArgs),
}

/// Settings shared with the config file; flags override file values.
#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    /// key = value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of sites
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of steps
    #[arg(long)]
    pub n: Option<usize>,
    /// 1-based start site (default floor(d/2))
    #[arg(long)]
    pub start: Option<usize>,
    /// qw:a,b or rw:r1,r2,r3,r4 with complex literals like 1+0.5i
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// matrix-free, dense or both
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
    /// Seed for randomized verification probes
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(d) = self.d {
            cfg.d = d;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(start) = self.start {
            cfg.start = Some(start);
        }
        if let Some(init) = &self.init {
            cfg.init = init.parse()?;
        }
        if let Some(engine) = &self.engine {
            cfg.engine = engine.parse()?;
        }
        if let Some(p) = &self.out_csv {
            cfg.out_csv = Some(p.clone());
        }
        if let Some(p) = &self.out_json {
            cfg.out_json = Some(p.clone());
        }
        if let Some(p) = &self.out_svg {
            cfg.out_svg = Some(p.clone());
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.lattice()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Append the four chain rows (real parts) to the CSV
    #[arg(long)]
    pub rows: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Lattice sizes to sweep
    #[arg(long, value_delimiter = ',', default_values_t = verify::DEFAULT_SITES.to_vec())]
    pub sites: Vec<usize>,
    /// Step counts to sweep
    #[arg(long, value_delimiter = ',', default_values_t = verify::DEFAULT_STEPS.to_vec())]
    pub steps: Vec<usize>,
    /// Add this offset to B[0][0] before checking (negative control)
    #[arg(long, hide = true)]
    pub perturb_b: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Lattice sizes for matrix-free timing
    #[arg(long, value_delimiter = ',', default_values_t = bench::MATRIX_FREE_SITES.to_vec())]
    pub sites: Vec<usize>,
    /// Lattice sizes for dense timing
    #[arg(long, value_delimiter = ',', default_values_t = bench::DENSE_SITES.to_vec())]
    pub dense_sites: Vec<usize>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub csv: PathBuf,
    pub svg: PathBuf,
    /// Columns to draw (default: every column after `site`)
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let mut cfg = args.config.resolve()?;
    cfg.rows |= args.rows;
    let out = experiment::run(&cfg)?;
    let csv = experiment::to_csv(&out, cfg.rows);
    if let Some(path) = &cfg.out_csv {
        write_file(path, &csv)?;
    }
    if let Some(path) = &cfg.out_json {
        write_file(path, &experiment::to_json(&out.report))?;
    }
    if let Some(path) = &cfg.out_svg {
        let table = plot::Table::parse(&csv)?;
        let title = format!(
            "d={} n={} start={}",
            out.lattice.d(),
            out.lattice.n(),
            out.lattice.start()
        );
        write_file(path, &plot::render_svg(&table, &[], &title)?)?;
    }
    if cfg.out_csv.is_none() && cfg.out_json.is_none() && cfg.out_svg.is_none() {
        print!("{csv}");
    }
    let r = &out.report;
    eprintln!(
        "energy={:.15} population={:.15}{:+.15}i leak={:.3e} max|p_qw-p_rw|={:.3e}",
        r.energy, r.population_re, r.population_im, r.leak, r.residuals["qw_rw_max_abs_diff"]
    );
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let mut algebra = CoinAlgebra::standard();
    if let Some(eps) = args.perturb_b {
        algebra = algebra.with_perturbed_b(eps);
    }
    let plan = VerifyPlan {
        sites: args.sites.clone(),
        steps: args.steps.clone(),
        seed: cfg.seed,
        algebra,
    };
    let report = verify::run(&plan)?;
    for check in &report.checks {
        println!("{check}");
    }
    if let Some(path) = &cfg.out_json {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        write_file(path, &s)?;
    }
    let failed = report.failures().count();
    if failed > 0 {
        return Err(Error::Verification(format!(
            "{failed} of {} checks failed",
            report.checks.len()
        )));
    }
    println!("all {} checks passed", report.checks.len());
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let report = bench::run(&args.sites, &args.dense_sites)?;
    println!("{:<12} {:<8} {:>10} {:>16}", "backend", "model", "d", "s/step");
    for t in &report.timings {
        println!(
            "{:<12} {:<8} {:>10} {:>16.6e}",
            t.backend, t.model, t.d, t.seconds_per_step
        );
    }
    println!(
        "matrix-free exponent: quantum={:.3} chain={:.3} (accepted {}..{})",
        report.quantum_exponent,
        report.chain_exponent,
        bench::EXPONENT_RANGE.0,
        bench::EXPONENT_RANGE.1
    );
    if let Some(path) = &args.out_json {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        write_file(path, &s)?;
    }
    if args.sites.len() >= 2 && !report.exponents_in_range() {
        return Err(Error::Verification(
            "matrix-free step time does not scale linearly in d".into(),
        ));
    }
    Ok(())
}

pub fn cmd_plot(args: &PlotArgs) -> Result<()> {
    plot::plot_file(&args.csv, &args.svg, &args.columns)
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
