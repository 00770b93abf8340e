//! Wall clock and entropy for the standard-library front end.

use std::hash::{BuildHasher, Hasher};
use std::time::Instant;

use gomea_core::Clock;

/// Monotonic wall clock measuring seconds since its creation.
#[derive(Debug, Clone, Copy)]
pub struct StdClock {
    origin: Instant,
}

impl StdClock {
    pub fn new() -> Self {
        Self { origin: Instant::now() }
    }
}

impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for StdClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// The given seed, or a fresh one from the process's hashing entropy.
pub fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let mut h = std::hash::RandomState::new().build_hasher();
        h.write_u128(std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_nanos()));
        h.finish()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_is_monotone() {
        let c = StdClock::new();
        let a = c.now();
        assert!(c.now() >= a && a >= 0.0);
    }

    #[test]
    fn explicit_seed_wins() {
        assert_eq!(resolve_seed(Some(7)), 7);
        assert_ne!(resolve_seed(None), resolve_seed(None));
    }
}
