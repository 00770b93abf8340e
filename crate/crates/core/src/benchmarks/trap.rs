use alloc::vec::Vec;

use crate::error::{CallbackError, Error, Result};
use crate::fitness::{BlackBoxFunction, GrayBoxFunction};

/// Concatenated deceptive trap of size `k` over `ell / k` consecutive blocks.
/// Maximization; the optimum is all ones with value `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trap {
    ell: usize,
    k: usize,
}

impl Trap {
    pub fn new(ell: usize, k: usize) -> Result<Self> {
        if k == 0 || ell == 0 || !ell.is_multiple_of(k) {
            return Err(Error::config(alloc::format!(
                "trap needs the number of variables ({ell}) to be a positive multiple of the trap size ({k})"
            )));
        }
        Ok(Self { ell, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> usize {
        self.ell / self.k
    }

    pub fn optimum(&self) -> f64 {
        self.ell as f64
    }
}

/// Trap value of a block with `unitation` ones out of `k`.
#[inline]
pub fn trap_value(unitation: usize, k: usize) -> f64 {
    if unitation == k {
        k as f64
    } else {
        (k - unitation - 1) as f64
    }
}

impl GrayBoxFunction<u8> for Trap {
    fn number_of_variables(&self) -> usize {
        self.ell
    }

    fn number_of_subfunctions(&self) -> usize {
        self.blocks()
    }

    fn inputs_to_subfunction(&self, subfunction_index: usize) -> Vec<usize> {
        (self.k * subfunction_index..self.k * subfunction_index + self.k).collect()
    }

    fn subfunction(&self, subfunction_index: usize, variables: &[u8]) -> Result<f64, CallbackError> {
        let start = self.k * subfunction_index;
        let unitation = variables[start..start + self.k]
            .iter()
            .filter(|&&v| v == 1)
            .count();
        Ok(trap_value(unitation, self.k))
    }
}

impl BlackBoxFunction<u8> for Trap {
    fn number_of_variables(&self) -> usize {
        self.ell
    }

    fn objective_function(&self, _objective_index: usize, variables: &[u8]) -> Result<f64, CallbackError> {
        Ok(variables
            .chunks(self.k)
            .map(|block| trap_value(block.iter().map(|&v| v as usize).sum(), self.k))
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_values() {
        assert_eq!(trap_value(5, 5), 5.0);
        assert_eq!(trap_value(0, 5), 4.0);
        assert_eq!(trap_value(3, 5), 1.0);
        assert_eq!(trap_value(4, 5), 0.0);
    }

    #[test]
    fn divisibility_enforced() {
        assert!(Trap::new(10, 3).is_err());
        assert!(Trap::new(10, 5).is_ok());
    }

    #[test]
    fn optimum_and_deceptive_attractor() {
        let t = Trap::new(20, 5).unwrap();
        let f = |x: &[u8]| BlackBoxFunction::objective_function(&t, 0, x).unwrap();
        assert_eq!(f(&[1; 20]), 20.0);
        assert_eq!(f(&[0; 20]), 16.0);
        assert_eq!(t.optimum(), 20.0);
    }

    #[test]
    fn inputs_are_consecutive_blocks() {
        let t = Trap::new(10, 5).unwrap();
        assert_eq!(GrayBoxFunction::<u8>::inputs_to_subfunction(&t, 1), alloc::vec![5, 6, 7, 8, 9]);
    }
}
