//! A fully specified single run, independent of how it was requested.

use gomea_core::linkage::LinkageModel;
use gomea_core::{Clock, Domain, Error, RunConfig};

use crate::clock::resolve_seed;
use crate::error::Result;
use crate::problem::{load_linkage, Mode, Outcome, Problem, ProblemSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    /// Checked against the problem's domain when given.
    pub domain: Option<Domain>,
    pub problem: ProblemSpec,
    pub mode: Mode,
    /// `None` picks [`default_linkage`].
    pub linkage: Option<LinkageModel>,
    pub value_to_reach: Option<f64>,
    pub max_evaluations: Option<f64>,
    pub max_seconds: Option<f64>,
    pub max_generations: Option<u64>,
    pub base_population_size: Option<usize>,
    pub subgeneration_factor: Option<u64>,
    pub max_populations: Option<usize>,
    pub lower_init_range: Option<f64>,
    pub upper_init_range: Option<f64>,
    /// `None` draws a seed from entropy.
    pub seed: Option<u64>,
}

/// Static linkage tree in gray-box mode; in black-box mode, where no
/// interaction graph is available, the filtered NMI linkage tree for
/// discrete problems and the univariate model for real-valued ones.
pub fn default_linkage(domain: Domain, mode: Mode) -> LinkageModel {
    match (mode, domain) {
        (Mode::Gbo, _) => LinkageModel::default(),
        (Mode::Bbo, Domain::Discrete) => "lt:nmi:filtered".parse().expect("valid spec"),
        (Mode::Bbo, Domain::RealValued) => LinkageModel::Univariate,
    }
}

fn domain_name(d: Domain) -> &'static str {
    match d {
        Domain::Discrete => "discrete",
        Domain::RealValued => "real-valued",
    }
}

impl RunRequest {
    pub fn new(problem: ProblemSpec) -> Self {
        Self {
            domain: None,
            problem,
            mode: Mode::Gbo,
            linkage: None,
            value_to_reach: None,
            max_evaluations: None,
            max_seconds: None,
            max_generations: None,
            base_population_size: None,
            subgeneration_factor: None,
            max_populations: None,
            lower_init_range: None,
            upper_init_range: None,
            seed: None,
        }
    }

    /// Builds the problem and the run configuration, applying defaults and
    /// loading any custom FOS file.
    pub fn prepare(&self) -> Result<(Problem, RunConfig)> {
        let problem = self.problem.build()?;
        let domain = problem.domain();
        if let Some(d) = self.domain.filter(|&d| d != domain) {
            return Err(Error::Config(format!(
                "problem {} is {}, not {}",
                problem.name(),
                domain_name(domain),
                domain_name(d)
            ))
            .into());
        }
        let mut config = RunConfig::new(domain, resolve_seed(self.seed));
        let linkage = self.linkage.clone().unwrap_or_else(|| default_linkage(domain, self.mode));
        config.linkage = load_linkage(linkage, problem.number_of_variables())?;
        config.budget = problem.default_budget();
        let b = &mut config.budget;
        b.value_to_reach = self.value_to_reach.or(b.value_to_reach);
        b.max_evaluations = self.max_evaluations.or(b.max_evaluations);
        b.max_seconds = self.max_seconds.or(b.max_seconds);
        b.max_generations = self.max_generations.or(b.max_generations);
        let ims = &mut config.ims;
        ims.base_population_size = self.base_population_size.unwrap_or(ims.base_population_size);
        ims.subgeneration_factor = self.subgeneration_factor.unwrap_or(ims.subgeneration_factor);
        ims.max_populations = self.max_populations.unwrap_or(ims.max_populations);
        config.rv.lower_init_range = self.lower_init_range.unwrap_or(config.rv.lower_init_range);
        config.rv.upper_init_range = self.upper_init_range.unwrap_or(config.rv.upper_init_range);
        Ok((problem, config))
    }

    /// Prepares and performs the run. The statistics' configuration echo
    /// gains the problem, its size and the mode.
    pub fn execute(&self, clock: &dyn Clock) -> Result<(Problem, Outcome)> {
        let (problem, config) = self.prepare()?;
        let linkage_text = self.linkage.as_ref().map(ToString::to_string);
        let mut outcome = problem.run(self.mode, config, clock)?;
        let echo = &mut outcome.statistics.config;
        if let (Some(text), Some(entry)) = (linkage_text, echo.iter_mut().find(|(k, _)| k == "linkage")) {
            entry.1 = text;
        }
        echo.insert(0, ("problem".into(), problem.name().into()));
        echo.insert(1, ("number_of_variables".into(), problem.number_of_variables().to_string()));
        echo.insert(2, ("mode".into(), self.mode.as_str().into()));
        outcome.statistics.termination = Some(outcome.termination.to_string());
        Ok((problem, outcome))
    }
}
