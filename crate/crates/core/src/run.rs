//! Run configuration and the top-level optimizer: populations interleaved
//! by the IMS, budgets, statistics.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::clock::Clock;
use crate::discrete::DiscretePopulation;
use crate::error::{Error, Result};
use crate::fitness::{Evaluator, Fitness, Solution};
use crate::ims::{ims_step, Flow, ImsConfig, Interleaved};
use crate::linkage::{Linkage, LinkageModel};
use crate::realvalued::{RvConfig, RvPopulation, REFRESH_INTERVAL};
use crate::stats::{should_record, Record, RunStatistics};
use crate::types::{make_rng, Domain, Gene, RngStream};

pub use crate::ims::TerminationReason;

/// Global stopping criteria; `None` means unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Budget {
    /// Generations each population may perform.
    pub max_generations: Option<u64>,
    /// Evaluation units (partial evaluations count fractionally).
    pub max_evaluations: Option<f64>,
    pub max_seconds: Option<f64>,
    /// Stop once a feasible solution at least this good is found.
    pub value_to_reach: Option<f64>,
}

impl Budget {
    pub fn validate(&self) -> Result<()> {
        if self.max_generations == Some(0) {
            return Err(Error::config("max_generations must be positive"));
        }
        if self.max_evaluations.is_some_and(|e| !(e > 0.0)) {
            return Err(Error::config("max_evaluations must be positive"));
        }
        if self.max_seconds.is_some_and(|s| !(s > 0.0)) {
            return Err(Error::config("max_seconds must be positive"));
        }
        if self.value_to_reach.is_some_and(f64::is_nan) {
            return Err(Error::config("value_to_reach must be a number"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub linkage: LinkageModel,
    pub ims: ImsConfig,
    pub budget: Budget,
    pub seed: u64,
    /// Only used for real-valued runs.
    pub rv: RvConfig,
}

impl RunConfig {
    /// Defaults for `domain`: static linkage tree, default IMS, no budget.
    pub fn new(domain: Domain, seed: u64) -> Self {
        Self {
            linkage: LinkageModel::default(),
            ims: ImsConfig::default_for(domain),
            budget: Budget::default(),
            seed,
            rv: RvConfig::default(),
        }
    }

    /// `key = value` pairs describing this configuration.
    pub fn describe(&self) -> Vec<(String, String)> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-1".into());
        alloc::vec![
            ("linkage".into(), self.linkage.to_string()),
            ("base_population_size".into(), self.ims.base_population_size.to_string()),
            ("IMS_subgeneration_factor".into(), self.ims.subgeneration_factor.to_string()),
            ("max_number_of_populations".into(), self.ims.max_populations.to_string()),
            ("max_number_of_generations".into(), opt(self.budget.max_generations.map(|v| v.to_string()))),
            ("max_number_of_evaluations".into(), opt(self.budget.max_evaluations.map(|v| v.to_string()))),
            ("max_number_of_seconds".into(), opt(self.budget.max_seconds.map(|v| v.to_string()))),
            ("value_to_reach".into(), self.budget.value_to_reach.map_or_else(|| "none".into(), |v| v.to_string())),
            ("lower_init_range".into(), self.rv.lower_init_range.to_string()),
            ("upper_init_range".into(), self.rv.upper_init_range.to_string()),
        ]
    }
}

/// A population of one gene type.
pub trait Population<G: Gene>: Sized {
    fn initialize(n: usize, rv: &RvConfig, evaluator: &mut Evaluator<'_, G>, rng: &mut RngStream) -> Result<Self>;
    fn run_generation(&mut self, linkage: &Linkage, evaluator: &mut Evaluator<'_, G>, rng: &mut RngStream) -> Result<()>;
    fn generations(&self) -> u64;
    fn len(&self) -> usize;
    fn is_terminated(&self) -> bool;
    fn terminate(&mut self);
    fn mean_objective(&self) -> f64;
}

/// Gene types GOMEA can optimize, tied to their domain and population.
pub trait GomeaGene: Gene {
    const DOMAIN: Domain;
    type Population: Population<Self>;
}

impl Population<u8> for DiscretePopulation {
    fn initialize(n: usize, _: &RvConfig, evaluator: &mut Evaluator<'_, u8>, rng: &mut RngStream) -> Result<Self> {
        DiscretePopulation::initialize(n, evaluator, rng)
    }
    fn run_generation(&mut self, linkage: &Linkage, evaluator: &mut Evaluator<'_, u8>, rng: &mut RngStream) -> Result<()> {
        DiscretePopulation::run_generation(self, linkage, evaluator, rng)
    }
    fn generations(&self) -> u64 {
        DiscretePopulation::generations(self)
    }
    fn len(&self) -> usize {
        DiscretePopulation::len(self)
    }
    fn is_terminated(&self) -> bool {
        DiscretePopulation::is_terminated(self)
    }
    fn terminate(&mut self) {
        DiscretePopulation::terminate(self)
    }
    fn mean_objective(&self) -> f64 {
        DiscretePopulation::mean_objective(self)
    }
}

impl Population<f64> for RvPopulation {
    fn initialize(n: usize, rv: &RvConfig, evaluator: &mut Evaluator<'_, f64>, rng: &mut RngStream) -> Result<Self> {
        RvPopulation::initialize(n, *rv, evaluator, rng)
    }
    fn run_generation(&mut self, linkage: &Linkage, evaluator: &mut Evaluator<'_, f64>, rng: &mut RngStream) -> Result<()> {
        RvPopulation::run_generation(self, linkage, evaluator, rng)
    }
    fn generations(&self) -> u64 {
        RvPopulation::generations(self)
    }
    fn len(&self) -> usize {
        RvPopulation::len(self)
    }
    fn is_terminated(&self) -> bool {
        RvPopulation::is_terminated(self)
    }
    fn terminate(&mut self) {
        RvPopulation::terminate(self)
    }
    fn mean_objective(&self) -> f64 {
        RvPopulation::mean_objective(self)
    }
}

impl GomeaGene for u8 {
    const DOMAIN: Domain = Domain::Discrete;
    type Population = DiscretePopulation;
}

impl GomeaGene for f64 {
    const DOMAIN: Domain = Domain::RealValued;
    type Population = RvPopulation;
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<G: Gene> {
    pub statistics: RunStatistics,
    /// Best solution evaluated during the run.
    pub best: Solution<G>,
    pub termination: TerminationReason,
    pub evaluations: f64,
    /// Seconds since the start of the run, per the supplied clock.
    pub elapsed: f64,
    pub eval_time: f64,
    /// Generations performed, summed over populations.
    pub generations: u64,
    pub populations: usize,
}

impl<G: Gene> RunResult<G> {
    /// Whether the run stopped because the value to reach was attained.
    pub fn reached_target(&self) -> bool {
        self.termination == TerminationReason::ValueToReach
    }
}

/// One optimization run. Use [`Optimizer::run`] for a complete run or
/// [`Optimizer::step`] to drive the schedule manually.
pub struct Optimizer<'a, G: GomeaGene> {
    evaluator: Evaluator<'a, G>,
    linkage: Linkage,
    populations: Vec<G::Population>,
    config: RunConfig,
    rng: RngStream,
    statistics: RunStatistics,
    clock: &'a dyn Clock,
    start: f64,
    generations: u64,
    stopped: Option<TerminationReason>,
}

impl<'a, G: GomeaGene> Optimizer<'a, G> {
    pub fn new(config: RunConfig, fitness: Fitness<'a, G>, clock: &'a dyn Clock) -> Result<Self> {
        config.ims.validate()?;
        config.budget.validate()?;
        if G::DOMAIN == Domain::RealValued {
            config.rv.validate()?;
        }
        let start = clock.now();
        let mut rng = make_rng(config.seed);
        let linkage = Linkage::resolve(&config.linkage, G::DOMAIN, &fitness, &mut rng)?;
        let refresh = (G::DOMAIN == Domain::RealValued).then_some(REFRESH_INTERVAL);
        let evaluator = Evaluator::new(fitness, G::DOMAIN.sense(), clock)?.with_refresh_interval(refresh);
        let mut statistics = RunStatistics::new();
        statistics.seed = Some(config.seed);
        statistics.config = config.describe();
        Ok(Self {
            evaluator,
            linkage,
            populations: Vec::new(),
            config,
            rng,
            statistics,
            clock,
            start,
            generations: 0,
            stopped: None,
        })
    }

    pub fn evaluator(&self) -> &Evaluator<'a, G> {
        &self.evaluator
    }

    pub fn linkage(&self) -> &Linkage {
        &self.linkage
    }

    pub fn populations(&self) -> &[G::Population] {
        &self.populations
    }

    pub fn statistics(&self) -> &RunStatistics {
        &self.statistics
    }

    pub fn stopped(&self) -> Option<TerminationReason> {
        self.stopped
    }

    /// Performs one IMS step: one generation of the smallest live population
    /// plus any generations of larger populations that are due.
    pub fn step(&mut self) -> Result<Flow> {
        if let Some(r) = self.stopped {
            return Ok(Flow::Stop(r));
        }
        if let Flow::Stop(r) = self.check_budget() {
            self.stopped = Some(r);
            return Ok(Flow::Stop(r));
        }
        let ims = self.config.ims;
        let flow = ims_step(self, &ims)?;
        if let Flow::Stop(r) = flow {
            self.stopped = Some(r);
        }
        Ok(flow)
    }

    /// Runs until a stopping criterion is met.
    pub fn run(mut self) -> Result<RunResult<G>> {
        let reason = loop {
            if let Flow::Stop(r) = self.step()? {
                break r;
            }
        };
        self.finish(reason)
    }

    fn finish(mut self, termination: TerminationReason) -> Result<RunResult<G>> {
        let best = self
            .evaluator
            .best()
            .cloned()
            .ok_or_else(|| Error::Contract("run ended before any evaluation".into()))?;
        self.statistics.termination = Some(termination.as_str().into());
        Ok(RunResult {
            statistics: self.statistics,
            best,
            termination,
            evaluations: self.evaluator.counter().total(),
            elapsed: self.clock.now() - self.start,
            eval_time: self.evaluator.counter().eval_time,
            generations: self.generations,
            populations: self.populations.len(),
        })
    }

    fn reached_target(&self) -> bool {
        match (self.config.budget.value_to_reach, self.evaluator.best()) {
            (Some(vtr), Some(b)) => b.is_feasible() && self.evaluator.sense().at_least_as_good(b.objective, vtr),
            _ => false,
        }
    }

    fn check_budget(&self) -> Flow {
        let b = &self.config.budget;
        if self.reached_target() {
            return Flow::Stop(TerminationReason::ValueToReach);
        }
        if b.max_evaluations.is_some_and(|m| self.evaluator.counter().total() >= m) {
            return Flow::Stop(TerminationReason::EvaluationBudget);
        }
        if b.max_seconds.is_some_and(|m| self.clock.now() - self.start >= m) {
            return Flow::Stop(TerminationReason::TimeBudget);
        }
        Flow::Continue
    }

    fn capped(&self, index: usize) -> bool {
        self.config
            .budget
            .max_generations
            .is_some_and(|m| self.populations[index].generations() >= m)
    }

    /// Terminates every population whose mean objective is strictly worse
    /// than that of some larger population.
    fn cull(&mut self) {
        let sense = self.evaluator.sense();
        let mut best_larger: Option<f64> = None;
        for i in (0..self.populations.len()).rev() {
            let p = &mut self.populations[i];
            if p.is_terminated() {
                continue;
            }
            let mean = p.mean_objective();
            match best_larger {
                Some(b) if sense.strictly_better(b, mean) => p.terminate(),
                Some(b) if !sense.strictly_better(mean, b) => {}
                _ => best_larger = Some(mean),
            }
        }
    }

    fn record(&mut self, index: usize) {
        let best = self.evaluator.best().expect("populations are evaluated on creation");
        let counter = self.evaluator.counter();
        let record = Record {
            generation: self.populations[index].generations(),
            evaluations: counter.total(),
            time: self.clock.now() - self.start,
            eval_time: counter.eval_time,
            population_index: index,
            population_size: self.populations[index].len(),
            best_obj_val: best.objective,
            best_cons_val: best.constraint,
        };
        self.statistics.push(record);
    }
}

impl<G: GomeaGene> Interleaved for Optimizer<'_, G> {
    fn population_count(&self) -> usize {
        self.populations.len()
    }

    fn create_population(&mut self, index: usize) -> Result<()> {
        let n = self.config.ims.population_size(index);
        let p = G::Population::initialize(n, &self.config.rv, &mut self.evaluator, &mut self.rng)?;
        self.populations.push(p);
        Ok(())
    }

    fn generations(&self, index: usize) -> u64 {
        self.populations[index].generations()
    }

    fn is_live(&self, index: usize) -> bool {
        !self.populations[index].is_terminated() && !self.capped(index)
    }

    fn run_generation(&mut self, index: usize) -> Result<Flow> {
        if let Flow::Stop(r) = self.check_budget() {
            return Ok(Flow::Stop(r));
        }
        let p = &mut self.populations[index];
        p.run_generation(&self.linkage, &mut self.evaluator, &mut self.rng)?;
        self.generations += 1;
        let ims = self.config.ims.enabled();
        if ims {
            self.cull();
        }
        if should_record(ims, self.populations[index].generations()) {
            self.record(index);
        }
        Ok(self.check_budget())
    }

    fn exhausted_reason(&self) -> TerminationReason {
        if (0..self.populations.len()).all(|i| self.capped(i)) {
            TerminationReason::GenerationLimit
        } else {
            TerminationReason::AllPopulationsTerminated
        }
    }
}

/// Runs GOMEA on `fitness` to completion.
pub fn optimize<'a, G: GomeaGene>(
    config: RunConfig,
    fitness: Fitness<'a, G>,
    clock: &'a dyn Clock,
) -> Result<RunResult<G>> {
    Optimizer::new(config, fitness, clock)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{Rosenbrock, Trap};
    use crate::clock::NoClock;
    use crate::fitness::SubfunctionDecomposition;
    use crate::stats::IMS_RECORD_INTERVAL;
    use core::cell::Cell;

    fn trap_config(seed: u64) -> RunConfig {
        let mut c = RunConfig::new(Domain::Discrete, seed);
        c.linkage = LinkageModel::BlockMarginalProduct { block_size: 5 };
        c.budget.max_evaluations = Some(1e5);
        c
    }

    #[test]
    fn trap_reaches_optimum_and_stops_at_vtr() {
        let trap = Trap::new(20, 5).unwrap();
        let mut c = trap_config(3);
        c.budget.value_to_reach = Some(20.0);
        let r = optimize(c, Fitness::GrayBox(SubfunctionDecomposition::new(&trap).unwrap()), &NoClock).unwrap();
        assert_eq!(r.termination, TerminationReason::ValueToReach);
        assert_eq!(r.best.objective, 20.0);
        assert!(r.reached_target());
    }

    #[test]
    fn rosenbrock_two_variables_reaches_vtr() {
        let f = Rosenbrock::new(2).unwrap();
        let mut c = RunConfig::new(Domain::RealValued, 1);
        c.linkage = LinkageModel::Univariate;
        c.budget.value_to_reach = Some(1e-10);
        c.budget.max_evaluations = Some(1e7);
        let r = optimize(c, Fitness::GrayBox(SubfunctionDecomposition::new(&f).unwrap()), &NoClock).unwrap();
        assert_eq!(r.termination, TerminationReason::ValueToReach);
        assert!(r.best.objective <= 1e-10);
    }

    #[test]
    fn evaluation_budget_overshoot_is_one_generation() {
        let trap = Trap::new(40, 5).unwrap();
        let mut c = trap_config(4);
        c.budget.max_evaluations = Some(300.0);
        c.ims.max_populations = 1;
        c.ims.base_population_size = 20;
        let r = optimize(c, Fitness::GrayBox(SubfunctionDecomposition::new(&trap).unwrap()), &NoClock).unwrap();
        if r.termination == TerminationReason::EvaluationBudget {
            assert!(r.evaluations >= 300.0);
            // a generation of 20 solutions over 8 blocks costs at most 20 * 8 / 8 units
            assert!(r.evaluations < 300.0 + 20.0 + 1e-9);
        }
    }

    #[test]
    fn generation_cap_stops_every_population() {
        let trap = Trap::new(20, 5).unwrap();
        let mut c = trap_config(5);
        c.budget.max_generations = Some(5);
        c.budget.max_evaluations = None;
        c.ims.max_populations = 3;
        let d = SubfunctionDecomposition::new(&trap).unwrap();
        let mut opt = Optimizer::new(c, Fitness::GrayBox(d), &NoClock).unwrap();
        let reason = loop {
            if let Flow::Stop(r) = opt.step().unwrap() {
                break r;
            }
        };
        for p in opt.populations() {
            assert!(p.generations() <= 5);
            assert!(p.generations() == 5 || p.is_terminated());
        }
        assert!(matches!(reason, TerminationReason::GenerationLimit | TerminationReason::AllPopulationsTerminated));
    }

    #[test]
    fn single_population_records_every_generation() {
        let trap = Trap::new(20, 5).unwrap();
        let mut c = trap_config(6);
        c.ims.max_populations = 1;
        c.ims.base_population_size = 16;
        c.budget.max_generations = Some(7);
        let r = optimize(c, Fitness::GrayBox(SubfunctionDecomposition::new(&trap).unwrap()), &NoClock).unwrap();
        let g: Vec<u64> = r.statistics.records().iter().map(|r| r.generation).collect();
        assert_eq!(g, (1..=g.len() as u64).collect::<Vec<_>>());
        assert!(r.statistics.len() <= 7);
    }

    #[test]
    fn interleaved_records_every_tenth_generation() {
        let trap = Trap::new(40, 5).unwrap();
        let mut c = trap_config(7);
        c.budget.max_evaluations = Some(2e4);
        let r = optimize(c, Fitness::GrayBox(SubfunctionDecomposition::new(&trap).unwrap()), &NoClock).unwrap();
        for rec in r.statistics.records() {
            assert_eq!(rec.generation % IMS_RECORD_INTERVAL, 0);
            assert_eq!(rec.population_size, 2 << rec.population_index);
        }
        let evals: Vec<f64> = r.statistics.records().iter().map(|r| r.evaluations).collect();
        assert!(evals.windows(2).all(|w| w[0] <= w[1]));
        let best: Vec<f64> = r.statistics.records().iter().map(|r| r.best_obj_val).collect();
        assert!(best.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn same_seed_same_statistics() {
        let trap = Trap::new(20, 5).unwrap();
        let run = || {
            optimize(trap_config(9), Fitness::GrayBox(SubfunctionDecomposition::new(&trap).unwrap()), &NoClock)
                .unwrap()
                .statistics
        };
        assert_eq!(run(), run());
    }

    struct Ticker(Cell<f64>);

    impl Clock for Ticker {
        fn now(&self) -> f64 {
            let t = self.0.get() + 0.5;
            self.0.set(t);
            t
        }
    }

    #[test]
    fn time_budget() {
        let trap = Trap::new(40, 5).unwrap();
        let mut c = trap_config(2);
        c.budget.max_evaluations = None;
        c.budget.max_seconds = Some(50.0);
        let clock = Ticker(Cell::new(0.0));
        let r = optimize(c, Fitness::GrayBox(SubfunctionDecomposition::new(&trap).unwrap()), &clock).unwrap();
        assert_eq!(r.termination, TerminationReason::TimeBudget);
    }

    #[test]
    fn invalid_budget_is_config_error() {
        let trap = Trap::new(10, 5).unwrap();
        let mut c = trap_config(0);
        c.budget.max_evaluations = Some(-1.0);
        let r = Optimizer::new(c, Fitness::GrayBox(SubfunctionDecomposition::new(&trap).unwrap()), &NoClock);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn domain_mismatched_linkage_is_rejected() {
        let trap = Trap::new(10, 5).unwrap();
        let mut c = trap_config(0);
        c.linkage = LinkageModel::Full;
        let r = Optimizer::new(c, Fitness::GrayBox(SubfunctionDecomposition::new(&trap).unwrap()), &NoClock);
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
