//! Benchmark problem setup and single runs.

use std::fs;
use std::path::{Path, PathBuf};

use gomea_core::benchmarks::{MaxCut, Rosenbrock, Trap};
use gomea_core::linkage::parse_custom_fos;
use gomea_core::{
    BlackBoxFunction, Budget, Clock, Domain, Error, Fitness, GomeaGene, GrayBoxFunction, LinkageModel, RunConfig,
    RunResult, RunStatistics, SubfunctionDecomposition, TerminationReason,
};

use crate::error::{CliError, Result};

/// Default evaluation budgets per domain.
pub const DISCRETE_EVALUATION_BUDGET: f64 = 1e7;
pub const REAL_VALUED_EVALUATION_BUDGET: f64 = 1e8;
pub const DEFAULT_SECONDS: f64 = 3600.0;
/// Value to reach for real-valued problems when none is given.
pub const DEFAULT_REAL_VALUED_TARGET: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Gray-box: partial evaluations through the subfunction decomposition.
    Gbo,
    /// Black-box: every evaluation is a full one.
    Bbo,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Gbo => "gbo",
            Mode::Bbo => "bbo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProblemKind {
    Trap,
    Maxcut,
    Rosenbrock,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Trap(Trap),
    MaxCut(MaxCut),
    Rosenbrock(Rosenbrock),
}

/// Problem parameters as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// Number of variables (trap, rosenbrock).
    pub ell: Option<usize>,
    /// Trap block size.
    pub k: usize,
    /// Torus side (maxcut).
    pub m: Option<usize>,
    /// MaxCut instance file, instead of the generated torus.
    pub instance: Option<PathBuf>,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind) -> Self {
        Self { kind, ell: None, k: 5, m: None, instance: None }
    }

    pub fn build(&self) -> Result<Problem> {
        let need = |what: &str| CliError::Core(Error::Config(format!("{:?} needs {what}", self.kind).to_lowercase()));
        Ok(match self.kind {
            ProblemKind::Trap => Problem::Trap(Trap::new(self.ell.ok_or_else(|| need("--l"))?, self.k)?),
            ProblemKind::Rosenbrock => Problem::Rosenbrock(Rosenbrock::new(self.ell.ok_or_else(|| need("--l"))?)?),
            ProblemKind::Maxcut => match (&self.instance, self.m) {
                (Some(path), _) => Problem::MaxCut(read_maxcut(path)?),
                (None, Some(m)) => Problem::MaxCut(MaxCut::torus(m)?),
                (None, None) => return Err(need("--m or --instance")),
            },
        })
    }
}

pub fn read_maxcut(path: &Path) -> Result<MaxCut> {
    Ok(MaxCut::parse_instance(&fs::read_to_string(path).map_err(CliError::io(path))?)?)
}

pub fn write_maxcut(instance: &MaxCut, path: &Path) -> Result<()> {
    fs::write(path, instance.to_instance_string()).map_err(CliError::io(path))
}

/// Loads a `custom:<path>` linkage model; other models pass through.
pub fn load_linkage(model: LinkageModel, ell: usize) -> Result<LinkageModel> {
    match model {
        LinkageModel::CustomFile { path } => {
            let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
            Ok(LinkageModel::Custom { sets: parse_custom_fos(&text, ell)? })
        }
        other => Ok(other),
    }
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Trap(_) => "trap",
            Problem::MaxCut(_) => "maxcut",
            Problem::Rosenbrock(_) => "rosenbrock",
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Problem::Rosenbrock(_) => Domain::RealValued,
            _ => Domain::Discrete,
        }
    }

    pub fn number_of_variables(&self) -> usize {
        match self {
            Problem::Trap(f) => GrayBoxFunction::<u8>::number_of_variables(f),
            Problem::MaxCut(f) => f.vertices(),
            Problem::Rosenbrock(f) => GrayBoxFunction::<f64>::number_of_variables(f),
        }
    }

    /// Analytically known optimum, if any.
    pub fn known_optimum(&self) -> Option<f64> {
        match self {
            Problem::Trap(f) => Some(f.optimum()),
            Problem::MaxCut(f) => f.known_optimum(),
            Problem::Rosenbrock(_) => Some(0.0),
        }
    }

    /// The value that counts as success: the known optimum for discrete
    /// problems, 1e-10 for real-valued ones.
    pub fn default_value_to_reach(&self) -> Option<f64> {
        match self.domain() {
            Domain::Discrete => self.known_optimum(),
            Domain::RealValued => Some(DEFAULT_REAL_VALUED_TARGET),
        }
    }

    pub fn default_budget(&self) -> Budget {
        Budget {
            max_generations: None,
            max_evaluations: Some(match self.domain() {
                Domain::Discrete => DISCRETE_EVALUATION_BUDGET,
                Domain::RealValued => REAL_VALUED_EVALUATION_BUDGET,
            }),
            max_seconds: Some(DEFAULT_SECONDS),
            value_to_reach: self.default_value_to_reach(),
        }
    }

    /// Whether a feasible `best` counts as a successful run.
    pub fn is_success(&self, best: f64, value_to_reach: Option<f64>) -> bool {
        match self.domain() {
            Domain::Discrete => match self.known_optimum().or(value_to_reach) {
                Some(target) => best >= target,
                None => false,
            },
            Domain::RealValued => best <= value_to_reach.unwrap_or(DEFAULT_REAL_VALUED_TARGET),
        }
    }

    /// One optimization run. `config.linkage` must already be loaded.
    pub fn run(&self, mode: Mode, config: RunConfig, clock: &dyn Clock) -> Result<Outcome> {
        let vtr = config.budget.value_to_reach;
        let (outcome, best) = match self {
            Problem::Trap(f) => finish(gomea_core::optimize(config, fitness(f, mode)?, clock)?),
            Problem::MaxCut(f) => finish(gomea_core::optimize(config, fitness(f, mode)?, clock)?),
            Problem::Rosenbrock(f) => finish(gomea_core::optimize(config, fitness(f, mode)?, clock)?),
        };
        let success = best.1 <= 0.0 && self.is_success(best.0, vtr);
        Ok(Outcome { success, ..outcome })
    }
}

fn fitness<'a, G: GomeaGene, F: GrayBoxFunction<G> + BlackBoxFunction<G>>(f: &'a F, mode: Mode) -> Result<Fitness<'a, G>> {
    Ok(match mode {
        Mode::Gbo => Fitness::GrayBox(SubfunctionDecomposition::new(f)?),
        Mode::Bbo => Fitness::BlackBox(f),
    })
}

fn finish<G: GomeaGene>(r: RunResult<G>) -> (Outcome, (f64, f64)) {
    let best = (r.best.objective, r.best.constraint);
    let outcome = Outcome {
        best_objective: r.best.objective,
        best_constraint: r.best.constraint,
        evaluations: r.evaluations,
        elapsed: r.elapsed,
        eval_time: r.eval_time,
        termination: r.termination,
        generations: r.generations,
        populations: r.populations,
        statistics: r.statistics,
        success: false,
    };
    (outcome, best)
}

/// Summary of one finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub statistics: RunStatistics,
    pub best_objective: f64,
    pub best_constraint: f64,
    pub evaluations: f64,
    pub elapsed: f64,
    pub eval_time: f64,
    pub termination: TerminationReason,
    pub generations: u64,
    pub populations: usize,
    /// Optimum found (discrete) or value to reach attained (real-valued).
    pub success: bool,
}
