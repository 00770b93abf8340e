//! Time source injected into the optimizer.

/// Monotonic clock reporting seconds since an arbitrary fixed origin.
pub trait Clock {
    fn now(&self) -> f64;
}

/// A clock that never advances. Time budgets are then never hit and every
/// time metric reads zero, which keeps statistics bit-reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

impl<C: Clock + ?Sized> Clock for &C {
    fn now(&self) -> f64 {
        (**self).now()
    }
}
