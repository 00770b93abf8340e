//! Discrete GOMEA: gene-pool optimal mixing with donor crossover.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fitness::{Evaluator, Solution, Undo};
use crate::linkage::{Fos, Linkage};
use crate::types::{RngStream, ALPHABET_SIZE};

/// Generations without improvement of the population's elitist after which
/// the population terminates.
pub const STALL_LIMIT: u64 = 100;

/// What one GOM application did to its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GomOutcome {
    /// The genotype changed.
    pub changed: bool,
    /// The objective strictly improved.
    pub improved: bool,
}

#[derive(Debug, Clone)]
pub struct DiscretePopulation {
    solutions: Vec<Solution<u8>>,
    elitist: Solution<u8>,
    generation: u64,
    stall: u64,
    terminated: bool,
}

impl DiscretePopulation {
    /// `n` uniformly random binary genotypes, fully evaluated.
    pub fn initialize(n: usize, evaluator: &mut Evaluator<'_, u8>, rng: &mut RngStream) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("population size must be at least 1"));
        }
        let ell = evaluator.size().get();
        let mut solutions = Vec::with_capacity(n);
        for _ in 0..n {
            let genotype = (0..ell).map(|_| rng.random_range(0..ALPHABET_SIZE)).collect();
            solutions.push(evaluator.full_evaluate(genotype)?);
        }
        let mut elitist = 0;
        for i in 1..n {
            if evaluator.strictly_better(&solutions[i], &solutions[elitist]) {
                elitist = i;
            }
        }
        Ok(Self {
            elitist: solutions[elitist].clone(),
            solutions,
            generation: 0,
            stall: 0,
            terminated: false,
        })
    }

    pub fn solutions(&self) -> &[Solution<u8>] {
        &self.solutions
    }

    pub fn elitist(&self) -> &Solution<u8> {
        &self.elitist
    }

    pub fn generations(&self) -> u64 {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn terminate(&mut self) {
        self.terminated = true;
    }

    pub fn mean_objective(&self) -> f64 {
        self.solutions.iter().map(|s| s.objective).sum::<f64>() / self.solutions.len() as f64
    }

    fn all_identical(&self) -> bool {
        let first = &self.solutions[0].genotype;
        self.solutions[1..].iter().all(|s| &s.genotype == first)
    }

    fn note(&mut self, index: usize, evaluator: &Evaluator<'_, u8>) {
        if evaluator.strictly_better(&self.solutions[index], &self.elitist) {
            self.elitist = self.solutions[index].clone();
        }
    }

    /// Gene-pool optimal mixing of solution `index`: for every linkage set,
    /// in random order, copy the values of a random donor at the set's
    /// indices and keep the result unless it is worse. Donors are drawn from
    /// the current population, including offspring already produced this
    /// generation.
    pub fn gom(
        &mut self,
        index: usize,
        fos: &Fos,
        evaluator: &mut Evaluator<'_, u8>,
        rng: &mut RngStream,
    ) -> Result<GomOutcome> {
        let mut order: Vec<usize> = (0..fos.len()).collect();
        order.shuffle(rng);
        let start_objective = self.solutions[index].objective;
        let mut outcome = GomOutcome::default();
        let mut changes = Vec::new();
        let mut undo = Undo::default();
        for &k in &order {
            let donor = rng.random_range(0..self.solutions.len());
            changes.clear();
            let (parent, donor) = (&self.solutions[index].genotype, &self.solutions[donor].genotype);
            changes.extend(fos.sets()[k].iter().filter(|&&u| parent[u] != donor[u]).map(|&u| (u, donor[u])));
            if changes.is_empty() {
                continue;
            }
            let s = &mut self.solutions[index];
            evaluator.apply_partial(s, &changes, &mut undo)?;
            if evaluator.accepts_change(s, &undo) {
                outcome.changed = true;
                self.note(index, evaluator);
            } else {
                evaluator.revert(s, &undo);
            }
        }
        outcome.improved = evaluator.sense().strictly_better(self.solutions[index].objective, start_objective);
        Ok(outcome)
    }

    /// Forced improvement: mix in the elitist's values set by set until one
    /// step strictly improves; failing that, become a copy of the elitist.
    fn forced_improvement(
        &mut self,
        index: usize,
        fos: &Fos,
        evaluator: &mut Evaluator<'_, u8>,
        rng: &mut RngStream,
    ) -> Result<()> {
        let mut order: Vec<usize> = (0..fos.len()).collect();
        order.shuffle(rng);
        let mut changes = Vec::new();
        let mut undo = Undo::default();
        for &k in &order {
            changes.clear();
            let parent = &self.solutions[index].genotype;
            let donor = &self.elitist.genotype;
            changes.extend(fos.sets()[k].iter().filter(|&&u| parent[u] != donor[u]).map(|&u| (u, donor[u])));
            if changes.is_empty() {
                continue;
            }
            let s = &mut self.solutions[index];
            evaluator.apply_partial(s, &changes, &mut undo)?;
            if evaluator.improved_by_change(s, &undo) {
                self.note(index, evaluator);
                return Ok(());
            }
            evaluator.revert(s, &undo);
        }
        self.solutions[index] = self.elitist.clone();
        Ok(())
    }

    /// One generation: choose the FOS (relearned if the model is learned),
    /// apply GOM to every solution in place, with forced improvement for
    /// solutions GOM left unchanged.
    pub fn run_generation(
        &mut self,
        linkage: &Linkage,
        evaluator: &mut Evaluator<'_, u8>,
        rng: &mut RngStream,
    ) -> Result<()> {
        let ell = evaluator.size().get();
        let fos = {
            let views: Vec<&[u8]> = self.solutions.iter().map(|s| s.genotype.as_slice()).collect();
            linkage.for_discrete(&views, ell, rng)
        };
        let best_before = self.elitist.clone();
        for i in 0..self.solutions.len() {
            let outcome = self.gom(i, &fos, evaluator, rng)?;
            if !outcome.changed {
                self.forced_improvement(i, &fos, evaluator, rng)?;
            }
        }
        self.generation += 1;
        if evaluator.strictly_better(&self.elitist, &best_before) {
            self.stall = 0;
        } else {
            self.stall += 1;
        }
        if self.all_identical() || self.stall >= STALL_LIMIT {
            self.terminated = true;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::Trap;
    use crate::clock::NoClock;
    use crate::fitness::{Fitness, SubfunctionDecomposition};
    use crate::linkage::build_block_mp;
    use crate::types::{make_rng, Sense};
    use alloc::vec;

    fn trap_eval(trap: &Trap) -> Evaluator<'_, u8> {
        let d = SubfunctionDecomposition::new(trap).unwrap();
        Evaluator::new(Fitness::GrayBox(d), Sense::Maximize, &NoClock).unwrap()
    }

    fn population(ev: &mut Evaluator<'_, u8>, genotypes: &[Vec<u8>]) -> DiscretePopulation {
        let solutions: Vec<_> = genotypes.iter().map(|g| ev.full_evaluate(g.clone()).unwrap()).collect();
        let mut elitist = solutions[0].clone();
        for s in &solutions {
            if ev.strictly_better(s, &elitist) {
                elitist = s.clone();
            }
        }
        DiscretePopulation { solutions, elitist, generation: 0, stall: 0, terminated: false }
    }

    #[test]
    fn donor_block_of_ones_is_accepted() {
        let trap = Trap::new(10, 5).unwrap();
        let mut ev = trap_eval(&trap);
        let mut pop = population(&mut ev, &[vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1], vec![1; 10]]);
        let fos = crate::linkage::build_custom(&[vec![0, 1, 2, 3, 4]], 10).unwrap();
        let mut rng = make_rng(3);
        // the donor is random; repeat until the all-ones donor is drawn
        for _ in 0..64 {
            pop.gom(0, &fos, &mut ev, &mut rng).unwrap();
        }
        assert_eq!(pop.solutions[0].genotype, vec![1; 10]);
        assert_eq!(pop.solutions[0].objective, 10.0);
        assert_eq!(pop.elitist.objective, 10.0);
    }

    #[test]
    fn identical_donor_costs_nothing() {
        let trap = Trap::new(10, 5).unwrap();
        let mut ev = trap_eval(&trap);
        let mut pop = population(&mut ev, &[vec![1; 10], vec![1; 10]]);
        let fos = build_block_mp(10, 5).unwrap();
        let before = *ev.counter();
        let out = pop.gom(0, &fos, &mut ev, &mut make_rng(1)).unwrap();
        assert!(!out.changed);
        assert_eq!(ev.counter().units_since(&before), 0.0);
    }

    #[test]
    fn onemax_objectives_never_decrease() {
        let trap = Trap::new(24, 1).unwrap();
        let mut ev = trap_eval(&trap);
        let mut rng = make_rng(11);
        let mut pop = DiscretePopulation::initialize(16, &mut ev, &mut rng).unwrap();
        let linkage = Linkage::Fixed(crate::linkage::build_univariate(24));
        let mut last_best = pop.elitist().objective;
        while !pop.is_terminated() && pop.generations() < 200 {
            let before: Vec<f64> = pop.solutions().iter().map(|s| s.objective).collect();
            pop.run_generation(&linkage, &mut ev, &mut rng).unwrap();
            for (b, s) in before.iter().zip(pop.solutions()) {
                assert!(s.objective >= *b);
            }
            assert!(pop.elitist().objective >= last_best);
            last_best = pop.elitist().objective;
        }
        assert_eq!(last_best, 24.0);
    }

    #[test]
    fn same_seed_same_population() {
        let trap = Trap::new(20, 5).unwrap();
        let run = || {
            let mut ev = trap_eval(&trap);
            let mut rng = make_rng(42);
            let mut pop = DiscretePopulation::initialize(8, &mut ev, &mut rng).unwrap();
            let linkage = Linkage::Fixed(build_block_mp(20, 5).unwrap());
            for _ in 0..5 {
                pop.run_generation(&linkage, &mut ev, &mut rng).unwrap();
            }
            (pop.solutions().iter().map(|s| s.genotype.clone()).collect::<Vec<_>>(), ev.counter().total())
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn converged_population_terminates() {
        let trap = Trap::new(10, 5).unwrap();
        let mut ev = trap_eval(&trap);
        let mut pop = population(&mut ev, &[vec![0; 10], vec![0; 10], vec![0; 10]]);
        let linkage = Linkage::Fixed(build_block_mp(10, 5).unwrap());
        pop.run_generation(&linkage, &mut ev, &mut make_rng(0)).unwrap();
        assert!(pop.is_terminated());
    }

    #[test]
    fn empty_population_is_rejected() {
        let trap = Trap::new(10, 5).unwrap();
        let mut ev = trap_eval(&trap);
        assert!(DiscretePopulation::initialize(0, &mut ev, &mut make_rng(0)).is_err());
    }
}
