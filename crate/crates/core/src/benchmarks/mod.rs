//! Reference problems: concatenated deceptive trap, MaxCut on a torus grid,
//! and Rosenbrock. Each implements both the gray-box and the black-box
//! contract; the two code paths are independent so they can check each
//! other.

mod maxcut;
mod rosenbrock;
mod trap;

pub use maxcut::MaxCut;
pub use rosenbrock::Rosenbrock;
pub use trap::{trap_value, Trap};
