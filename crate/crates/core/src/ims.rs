//! Interleaved multi-start scheme.
//!
//! Populations of sizes `n_base * 2^j` run interleaved: after every `c`
//! generations of population `j`, population `j + 1` runs one generation.
//! Unrolled with `c = 4`: `P0 P0 P0 P0 P1 P0 P0 P0 P0 P1 ...`, and after
//! the fourth generation of `P1`, `P2` runs once.

use crate::error::{Error, Result};
use crate::types::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImsConfig {
    pub base_population_size: usize,
    pub subgeneration_factor: u64,
    /// 1 disables interleaving.
    pub max_populations: usize,
}

impl ImsConfig {
    pub fn default_for(domain: Domain) -> Self {
        match domain {
            Domain::Discrete => Self {
                base_population_size: 2,
                subgeneration_factor: 4,
                max_populations: 25,
            },
            Domain::RealValued => Self {
                base_population_size: 10,
                subgeneration_factor: 8,
                max_populations: 25,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_population_size == 0 || self.subgeneration_factor == 0 || self.max_populations == 0 {
            return Err(Error::config("IMS parameters must all be positive"));
        }
        Ok(())
    }

    pub fn enabled(&self) -> bool {
        self.max_populations > 1
    }

    pub fn population_size(&self, index: usize) -> usize {
        self.base_population_size.saturating_mul(1usize.checked_shl(index as u32).unwrap_or(usize::MAX))
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    ValueToReach,
    EvaluationBudget,
    TimeBudget,
    GenerationLimit,
    AllPopulationsTerminated,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::ValueToReach => "value_to_reach",
            TerminationReason::EvaluationBudget => "max_evaluations",
            TerminationReason::TimeBudget => "max_seconds",
            TerminationReason::GenerationLimit => "max_generations",
            TerminationReason::AllPopulationsTerminated => "all_populations_terminated",
        }
    }
}

impl core::fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop(TerminationReason),
}

/// The populations driven by the scheduler.
pub trait Interleaved {
    /// Number of populations created so far.
    fn population_count(&self) -> usize;
    /// Creates population `index` (always the next one).
    fn create_population(&mut self, index: usize) -> Result<()>;
    fn generations(&self, index: usize) -> u64;
    /// Not terminated and below any generation cap.
    fn is_live(&self, index: usize) -> bool;
    /// Runs one generation of population `index` and checks global budgets.
    fn run_generation(&mut self, index: usize) -> Result<Flow>;
    /// Reason to report when nothing is live and no population can be added.
    fn exhausted_reason(&self) -> TerminationReason {
        TerminationReason::AllPopulationsTerminated
    }
}

/// One scheduling round: a generation of the smallest live population,
/// cascading to larger populations whenever the one just run completed a
/// multiple of `c` generations. Populations are created lazily when first
/// scheduled.
pub fn ims_step<I: Interleaved + ?Sized>(state: &mut I, config: &ImsConfig) -> Result<Flow> {
    let c = config.subgeneration_factor;
    let count = state.population_count();
    let mut j = match (0..count).find(|&i| state.is_live(i)) {
        Some(j) => j,
        None if count < config.max_populations => {
            state.create_population(count)?;
            count
        }
        None => return Ok(Flow::Stop(state.exhausted_reason())),
    };
    loop {
        if let Flow::Stop(r) = state.run_generation(j)? {
            return Ok(Flow::Stop(r));
        }
        if state.generations(j) % c != 0 {
            return Ok(Flow::Continue);
        }
        let count = state.population_count();
        let next = match (j + 1..count).find(|&i| state.is_live(i)) {
            Some(n) => n,
            None if count < config.max_populations => {
                state.create_population(count)?;
                count
            }
            None => return Ok(Flow::Continue),
        };
        j = next;
    }
}
