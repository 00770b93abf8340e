//! Fitness contracts, fitness buffers and partial evaluations.
//!
//! A [`GrayBoxFunction`] exposes its structure: `q` subfunctions, the input
//! indices of each, the fitness buffer each one is summed into, and the
//! combiners mapping buffers to an objective and a constraint value. A
//! [`BlackBoxFunction`] only maps a full genotype to an objective.
//!
//! The [`Evaluator`] owns the evaluation counter. A full evaluation costs one
//! unit; a partial evaluation that recomputes `k` of the `q` subfunctions
//! costs `k/q`.

mod evaluator;
mod solution;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CallbackError, Error, Result};
use crate::types::{Gene, ProblemSize};

pub use evaluator::{EvaluationCounter, Evaluator, Fitness, Undo};
pub use solution::{accepts, is_improvement, strictly_better, Solution};

/// Gray-box fitness function: `f(x) = g(beta)` with each buffer `beta_b` the
/// sum of the subfunctions routed to it.
///
/// `subfunction` receives the full variable vector but must only read the
/// indices returned by `inputs_to_subfunction`; reading anything else makes
/// partial evaluations inconsistent. The combiners only see buffer values.
pub trait GrayBoxFunction<G: Gene> {
    fn number_of_variables(&self) -> usize;

    fn number_of_subfunctions(&self) -> usize;

    fn inputs_to_subfunction(&self, subfunction_index: usize) -> Vec<usize>;

    fn subfunction(&self, subfunction_index: usize, variables: &[G]) -> Result<f64, CallbackError>;

    fn number_of_fitness_buffers(&self) -> usize {
        1
    }

    fn fitness_buffer_index_for_subfunction(&self, _subfunction_index: usize) -> usize {
        0
    }

    /// Defaults to the identity over buffer 0.
    fn objective_function(
        &self,
        _objective_index: usize,
        fitness_buffers: &[f64],
    ) -> Result<f64, CallbackError> {
        Ok(fitness_buffers[0])
    }

    /// Defaults to 0: every solution is feasible.
    fn constraint_function(&self, _fitness_buffers: &[f64]) -> Result<f64, CallbackError> {
        Ok(0.0)
    }

    /// Optional replacement for the interaction-graph similarity used by the
    /// static linkage tree. Must be symmetric.
    fn similarity_measure(&self, _var_a: usize, _var_b: usize) -> Option<f64> {
        None
    }
}

/// Black-box fitness function. Only full evaluations are possible.
pub trait BlackBoxFunction<G: Gene> {
    fn number_of_variables(&self) -> usize;

    fn objective_function(&self, objective_index: usize, variables: &[G]) -> Result<f64, CallbackError>;

    fn constraint_function(&self, _variables: &[G]) -> Result<f64, CallbackError> {
        Ok(0.0)
    }
}

/// For each variable, the sorted subfunction indices that read it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyIndex {
    dependents: Vec<Vec<usize>>,
}

impl DependencyIndex {
    /// Inverts the subfunction input sets. Fails on an index outside
    /// `0..size`.
    pub fn build(inputs: &[Vec<usize>], size: ProblemSize) -> Result<Self> {
        let mut dependents = vec![Vec::new(); size.get()];
        for (i, set) in inputs.iter().enumerate() {
            for &u in set {
                if !size.contains(u) {
                    return Err(Error::config(alloc::format!(
                        "subfunction {i} reads variable {u}, outside [0, {}]",
                        size.get() - 1
                    )));
                }
                dependents[u].push(i);
            }
        }
        for list in &mut dependents {
            list.dedup();
        }
        Ok(Self { dependents })
    }

    pub fn of(&self, variable: usize) -> &[usize] {
        &self.dependents[variable]
    }

    pub fn len(&self) -> usize {
        self.dependents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dependents.is_empty()
    }
}

/// A gray-box function with its structure queried once and validated.
pub struct SubfunctionDecomposition<'a, G: Gene> {
    function: &'a dyn GrayBoxFunction<G>,
    size: ProblemSize,
    inputs: Vec<Vec<usize>>,
    buffer_of: Vec<usize>,
    buffer_count: usize,
    dependents: DependencyIndex,
}

impl<'a, G: Gene> SubfunctionDecomposition<'a, G> {
    pub fn new(function: &'a dyn GrayBoxFunction<G>) -> Result<Self> {
        let size = ProblemSize::new(function.number_of_variables())?;
        let q = function.number_of_subfunctions();
        if q == 0 {
            return Err(Error::config("a gray-box function needs at least one subfunction"));
        }
        let buffer_count = function.number_of_fitness_buffers();
        if buffer_count == 0 {
            return Err(Error::config("at least one fitness buffer is required"));
        }
        let mut inputs = Vec::with_capacity(q);
        let mut buffer_of = Vec::with_capacity(q);
        for i in 0..q {
            let mut set = function.inputs_to_subfunction(i);
            if set.is_empty() {
                return Err(Error::config(alloc::format!("subfunction {i} has no inputs")));
            }
            set.sort_unstable();
            set.dedup();
            inputs.push(set);
            let b = function.fitness_buffer_index_for_subfunction(i);
            if b >= buffer_count {
                return Err(Error::config(alloc::format!(
                    "subfunction {i} routed to buffer {b}, but only {buffer_count} buffers exist"
                )));
            }
            buffer_of.push(b);
        }
        let dependents = DependencyIndex::build(&inputs, size)?;
        Ok(Self {
            function,
            size,
            inputs,
            buffer_of,
            buffer_count,
            dependents,
        })
    }

    pub fn function(&self) -> &'a dyn GrayBoxFunction<G> {
        self.function
    }

    pub fn size(&self) -> ProblemSize {
        self.size
    }

    pub fn number_of_subfunctions(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[Vec<usize>] {
        &self.inputs
    }

    pub fn buffer_of(&self, subfunction_index: usize) -> usize {
        self.buffer_of[subfunction_index]
    }

    pub fn buffer_count(&self) -> usize {
        self.buffer_count
    }

    pub fn dependency_index(&self) -> &DependencyIndex {
        &self.dependents
    }
}

impl<G: Gene> core::fmt::Debug for SubfunctionDecomposition<'_, G> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SubfunctionDecomposition")
            .field("ell", &self.size.get())
            .field("q", &self.inputs.len())
            .field("buffer_count", &self.buffer_count)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{Rosenbrock, Trap};

    #[test]
    fn trap_dependency_index() {
        let trap = Trap::new(10, 5).unwrap();
        let d = SubfunctionDecomposition::<u8>::new(&trap).unwrap();
        assert_eq!(d.dependency_index().of(3), &[0]);
        assert_eq!(d.dependency_index().of(7), &[1]);
    }

    #[test]
    fn rosenbrock_dependency_index() {
        let f = Rosenbrock::new(4).unwrap();
        let d = SubfunctionDecomposition::<f64>::new(&f).unwrap();
        assert_eq!(d.dependency_index().of(1), &[0, 1]);
        assert_eq!(d.dependency_index().of(0), &[0]);
        assert_eq!(d.dependency_index().of(3), &[2]);
    }

    #[test]
    fn single_subfunction_covers_everything() {
        let inputs = vec![vec![0, 1, 2, 3]];
        let idx = DependencyIndex::build(&inputs, ProblemSize::new(4).unwrap()).unwrap();
        for u in 0..4 {
            assert_eq!(idx.of(u), &[0]);
        }
    }

    #[test]
    fn out_of_range_input_is_config_error() {
        let inputs = vec![vec![0, 4]];
        let err = DependencyIndex::build(&inputs, ProblemSize::new(4).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    struct BadRouting;
    impl GrayBoxFunction<u8> for BadRouting {
        fn number_of_variables(&self) -> usize {
            2
        }
        fn number_of_subfunctions(&self) -> usize {
            1
        }
        fn inputs_to_subfunction(&self, _: usize) -> Vec<usize> {
            vec![0, 1]
        }
        fn subfunction(&self, _: usize, _: &[u8]) -> Result<f64, CallbackError> {
            Ok(0.0)
        }
        fn fitness_buffer_index_for_subfunction(&self, _: usize) -> usize {
            1
        }
    }

    #[test]
    fn buffer_routing_validated() {
        assert!(matches!(
            SubfunctionDecomposition::new(&BadRouting),
            Err(Error::Config(_))
        ));
    }
}
