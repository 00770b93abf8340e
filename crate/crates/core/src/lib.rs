//! Gene-pool Optimal Mixing Evolutionary Algorithms (GOMEA) for discrete and
//! real-valued single-objective optimization, with native support for
//! gray-box fitness functions.
//!
//! A gray-box function is a sum of subfunctions over known subsets of the
//! variables, combined through an arbitrary function of one or more *fitness
//! buffers*. Storing the buffers per solution lets a variation step that
//! touches a handful of variables be evaluated by recomputing only the
//! subfunctions that depend on them (a *partial evaluation*), charged as the
//! fraction `k/q` of a full evaluation.
//!
//! The crate is `no_std` (with `alloc`). Everything that touches the
//! operating system (wall clocks, entropy, files) is injected by the caller;
//! see the `gomea` crate for the standard-library front end.
//!
//! # Layout
//!
//! * [`types`]: problem size, genes, the seeded random stream.
//! * [`fitness`]: gray-box and black-box contracts, solutions, the evaluator
//!   with fitness buffers and fractional accounting.
//! * [`linkage`]: families of subsets (FOS), similarity estimation, UPGMA,
//!   the variable interaction graph and conditional factorizations.
//! * [`discrete`] and [`realvalued`]: the two GOMEA generation loops.
//! * [`ims`]: the interleaved multi-start scheme.
//! * [`benchmarks`]: concatenated trap, torus MaxCut and Rosenbrock.
//! * [`stats`]: per-generation run statistics.
//! * [`run`]: configuration and the top-level optimizer.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod benchmarks;
pub mod clock;
pub mod discrete;
pub mod error;
pub mod fitness;
pub mod gaussian;
pub mod ims;
pub mod linkage;
pub mod realvalued;
pub mod run;
pub mod stats;
pub mod types;

pub use clock::{Clock, NoClock};
pub use error::{CallbackError, Error, Result};
pub use fitness::{
    BlackBoxFunction, EvaluationCounter, Evaluator, Fitness, GrayBoxFunction, Solution,
    SubfunctionDecomposition,
};
pub use linkage::{Fos, FosKind, LinkageModel, SimilarityMeasure};
pub use run::{optimize, Budget, GomeaGene, Optimizer, RunConfig, RunResult, TerminationReason};
pub use stats::{Record, RunStatistics, METRICS};
pub use types::{make_rng, Domain, Gene, ProblemSize, RngStream, Sense};
