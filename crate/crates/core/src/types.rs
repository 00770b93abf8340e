//! Value types shared by every module.

use core::fmt::Debug;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Number of problem variables, `ell >= 1`. Variables are indexed `0..ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemSize(usize);

impl ProblemSize {
    pub fn new(ell: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::config("number of variables must be at least 1"));
        }
        Ok(Self(ell))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    pub fn contains(self, index: usize) -> bool {
        index < self.0
    }
}

/// Variable domain of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Discrete,
    RealValued,
}

impl Domain {
    /// Discrete problems are maximized, real-valued problems minimized.
    pub fn sense(self) -> Sense {
        match self {
            Domain::Discrete => Sense::Maximize,
            Domain::RealValued => Sense::Minimize,
        }
    }
}

/// Direction of optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// `a` is at least as good as `b`.
    #[inline]
    pub fn at_least_as_good(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a <= b,
            Sense::Maximize => a >= b,
        }
    }

    #[inline]
    pub fn strictly_better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }

    /// Worst representable objective in this sense.
    pub fn worst(self) -> f64 {
        match self {
            Sense::Minimize => f64::INFINITY,
            Sense::Maximize => f64::NEG_INFINITY,
        }
    }
}

/// A single problem variable value.
///
/// Discrete genes are small non-negative integers (`u8`, binary alphabet),
/// real-valued genes are finite `f64`s.
pub trait Gene: Copy + PartialEq + Debug + 'static {
    /// Whether this value is admissible for the domain.
    fn is_valid(&self) -> bool;
}

/// Alphabet size of discrete genotypes.
pub const ALPHABET_SIZE: u8 = 2;

impl Gene for u8 {
    #[inline]
    fn is_valid(&self) -> bool {
        *self < ALPHABET_SIZE
    }
}

impl Gene for f64 {
    #[inline]
    fn is_valid(&self) -> bool {
        self.is_finite()
    }
}

pub fn genotype_is_valid<G: Gene>(genotype: &[G], size: ProblemSize) -> bool {
    genotype.len() == size.get() && genotype.iter().all(Gene::is_valid)
}

/// Seeded pseudo-random stream used for every stochastic decision in a run.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Creates the run's random stream. Seeds drawn from entropy are resolved by
/// the caller (this crate has no entropy source) and passed in verbatim.
pub fn make_rng(seed: u64) -> RngStream {
    RngStream {
        seed,
        inner: ChaCha8Rng::seed_from_u64(seed),
    }
}
