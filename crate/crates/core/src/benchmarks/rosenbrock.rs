use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CallbackError, Error, Result};
use crate::fitness::{BlackBoxFunction, GrayBoxFunction};

/// Rosenbrock function, `sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2`.
/// Minimization; one subfunction per consecutive pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rosenbrock {
    ell: usize,
}

impl Rosenbrock {
    pub fn new(ell: usize) -> Result<Self> {
        if ell < 2 {
            return Err(Error::config("Rosenbrock needs at least 2 variables"));
        }
        Ok(Self { ell })
    }
}

#[inline]
fn term(a: f64, b: f64) -> f64 {
    let d = b - a * a;
    100.0 * d * d + (1.0 - a) * (1.0 - a)
}

impl GrayBoxFunction<f64> for Rosenbrock {
    fn number_of_variables(&self) -> usize {
        self.ell
    }

    fn number_of_subfunctions(&self) -> usize {
        self.ell - 1
    }

    fn inputs_to_subfunction(&self, subfunction_index: usize) -> Vec<usize> {
        vec![subfunction_index, subfunction_index + 1]
    }

    fn subfunction(&self, i: usize, variables: &[f64]) -> Result<f64, CallbackError> {
        Ok(term(variables[i], variables[i + 1]))
    }
}

impl BlackBoxFunction<f64> for Rosenbrock {
    fn number_of_variables(&self) -> usize {
        self.ell
    }

    fn objective_function(&self, _objective_index: usize, x: &[f64]) -> Result<f64, CallbackError> {
        Ok(x.windows(2).map(|w| term(w[0], w[1])).sum())
    }
}
