//! Command-line interface: `gomea run` and `gomea sweep`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use gomea_core::{Clock, Domain, LinkageModel, NoClock};

use crate::clock::StdClock;
use crate::csv_stats::write_csv;
use crate::error::{CliError, Result};
use crate::problem::{Mode, ProblemKind, ProblemSpec};
use crate::request::RunRequest;
use crate::sweep::{write_summary, Sweep};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "GOMEA_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "gomea", version, about = "Gene-pool optimal mixing with gray-box partial evaluations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one optimization and write its statistics CSV.
    Run(RunArgs),
    /// Repeated seeded runs over several problem sizes, summarized in one CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Discrete,
    RealValued,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Discrete => Domain::Discrete,
            DomainArg::RealValued => Domain::RealValued,
        }
    }
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Checked against the problem's domain.
    #[arg(long, value_enum)]
    pub domain: Option<DomainArg>,
    #[arg(long, value_enum)]
    pub problem: ProblemKind,
    /// Trap block size.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// MaxCut instance file (first line: grid side; then `u v` edges).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Value to reach; defaults to the known optimum (discrete) or 1e-10.
    #[arg(long)]
    pub vtr: Option<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Gbo)]
    pub mode: Mode,
    /// univariate | full | block:<b> | lt:<mi|nmi>[:filtered][:max=<s>] |
    /// slt[:max=<s>] | custom:<path> | cond:<ucondgg|ucondfg|ucondhg|mcondhg:<c>>
    #[arg(long)]
    pub linkage: Option<LinkageModel>,
    /// Evaluation units; defaults to 1e7 (discrete) or 1e8 (real-valued).
    #[arg(long)]
    pub max_evals: Option<f64>,
    /// Wall-clock limit; defaults to 3600.
    #[arg(long)]
    pub max_seconds: Option<f64>,
    /// Generations per population.
    #[arg(long)]
    pub max_generations: Option<u64>,
    #[arg(long)]
    pub base_population_size: Option<usize>,
    #[arg(long)]
    pub subgeneration_factor: Option<u64>,
    /// 1 disables the interleaved multi-start scheme.
    #[arg(long)]
    pub max_populations: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lower_init_range: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub upper_init_range: Option<f64>,
    /// Directory for output files when no explicit path is given.
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = ".")]
    pub output_dir: PathBuf,
    /// Do not read the wall clock: time metrics are zero, time budgets are
    /// ignored and output is bit-reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Number of variables (trap, rosenbrock).
    #[arg(long = "l")]
    pub ell: Option<usize>,
    /// Torus side (maxcut).
    #[arg(long)]
    pub m: Option<usize>,
    /// Drawn from entropy when omitted; always recorded in the output.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Statistics CSV path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Problem sizes: ℓ for trap and rosenbrock, torus side for maxcut.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    /// Run repeats sequentially.
    #[arg(long)]
    pub serial: bool,
    /// Summary CSV path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl ProblemArgs {
    fn request(&self, ell: Option<usize>, m: Option<usize>, seed: Option<u64>) -> RunRequest {
        let mut spec = ProblemSpec::new(self.problem);
        spec.ell = ell;
        spec.k = self.k;
        spec.m = m;
        spec.instance = self.instance.clone();
        RunRequest {
            domain: self.domain.map(Into::into),
            problem: spec,
            mode: self.mode,
            linkage: self.linkage.clone(),
            value_to_reach: self.vtr,
            max_evaluations: self.max_evals,
            max_seconds: self.max_seconds,
            max_generations: self.max_generations,
            base_population_size: self.base_population_size,
            subgeneration_factor: self.subgeneration_factor,
            max_populations: self.max_populations,
            lower_init_range: self.lower_init_range,
            upper_init_range: self.upper_init_range,
            seed,
        }
    }
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<()> {
    let request = args.problem.request(args.ell, args.m, args.seed);
    let clock: Box<dyn Clock> = if args.problem.no_timing { Box::new(NoClock) } else { Box::new(StdClock::new()) };
    let (problem, mut outcome) = request.execute(clock.as_ref())?;
    let seed = outcome.statistics.seed.expect("optimizer records its seed");
    let path = args.output.clone().unwrap_or_else(|| {
        args.problem.output_dir.join(format!(
            "{}_l{}_{}_seed{seed}.csv",
            problem.name(),
            problem.number_of_variables(),
            request.mode.as_str()
        ))
    });
    let results = [
        ("best_obj_val", format!("{:.16e}", outcome.best_objective)),
        ("best_cons_val", format!("{:.16e}", outcome.best_constraint)),
        ("evaluations", outcome.evaluations.to_string()),
        ("time", outcome.elapsed.to_string()),
        ("eval_time", outcome.eval_time.to_string()),
        ("success", outcome.success.to_string()),
    ];
    for (k, v) in &results {
        outcome.statistics.config.push((format!("result.{k}"), v.clone()));
    }
    write_csv(&outcome.statistics, &path)?;
    let io = CliError::io("<stdout>");
    (|| {
        writeln!(out, "best objective: {}", outcome.best_objective)?;
        if outcome.best_constraint > 0.0 {
            writeln!(out, "constraint violation: {}", outcome.best_constraint)?;
        }
        writeln!(out, "evaluations: {:.3}", outcome.evaluations)?;
        writeln!(out, "elapsed: {:.3} s", outcome.elapsed)?;
        writeln!(out, "termination: {}", outcome.termination)?;
        writeln!(out, "seed: {seed}")?;
        writeln!(out, "statistics: {}", path.display())
    })()
    .map_err(io)
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let sweep = Sweep {
        template: args.problem.request(None, None, None),
        dims: args.dims.clone(),
        repeats: args.repeats as usize,
        base_seed: args.base_seed,
        parallel: !args.serial,
        timing: !args.problem.no_timing,
    };
    let rows = sweep.run()?;
    let path = args.output.clone().unwrap_or_else(|| {
        args.problem.output_dir.join(format!("sweep_{}_{}.csv", rows[0].problem, sweep.template.mode.as_str()))
    });
    write_summary(&rows, &path)?;
    let io = CliError::io("<stdout>");
    (|| {
        for r in &rows {
            let median = r.evaluations.map_or_else(|| "-".to_string(), |s| s.median.to_string());
            writeln!(out, "{} ell={}: {}/{} successes, median evaluations {median}", r.problem, r.ell, r.successes, r.runs)?;
        }
        writeln!(out, "summary: {}", path.display())
    })()
    .map_err(io)
}

/// Parses `args` and executes the command. Exit status: 0 on a completed
/// run, 2 on a configuration error, 1 on any other failure.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_configuration() => {
            let name = match cli.command {
                Command::Run(_) => "run",
                Command::Sweep(_) => "sweep",
            };
            let mut cmd = Cli::command();
            let usage = cmd.find_subcommand_mut(name).map(|c| c.render_usage().to_string()).unwrap_or_default();
            let _ = writeln!(err, "error: {e}\n\n{usage}");
            ExitCode::from(2)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::FAILURE
        }
    }
}
