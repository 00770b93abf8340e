use alloc::vec::Vec;

use crate::types::{Gene, Sense};

/// A genotype with its cached evaluation state.
///
/// For gray-box fitness, `subfunction_values[i]` holds `f_i` of the current
/// genotype and `buffers[b]` the sum of the values routed to buffer `b`.
/// Both are empty under black-box fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<G: Gene> {
    pub genotype: Vec<G>,
    pub buffers: Vec<f64>,
    pub subfunction_values: Vec<f64>,
    pub objective: f64,
    pub constraint: f64,
    pub evaluated: bool,
    /// Partial updates applied since the buffers were last recomputed from
    /// scratch.
    pub(crate) partial_updates: u32,
}

impl<G: Gene> Solution<G> {
    pub fn new(genotype: Vec<G>) -> Self {
        Self {
            genotype,
            buffers: Vec::new(),
            subfunction_values: Vec::new(),
            objective: f64::NAN,
            constraint: 0.0,
            evaluated: false,
            partial_updates: 0,
        }
    }

    #[inline]
    pub fn is_feasible(&self) -> bool {
        self.constraint <= 0.0
    }

    pub fn len(&self) -> usize {
        self.genotype.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genotype.is_empty()
    }
}

/// Constraint-domination acceptance test: `candidate` may replace
/// `incumbent`. Feasible beats infeasible, a smaller violation beats a larger
/// one, and between feasible solutions an equal objective is accepted.
pub fn is_improvement<G: Gene>(candidate: &Solution<G>, incumbent: &Solution<G>, sense: Sense) -> bool {
    debug_assert!(candidate.evaluated && incumbent.evaluated);
    accepts(
        (candidate.objective, candidate.constraint),
        (incumbent.objective, incumbent.constraint),
        sense,
    )
}

/// [`is_improvement`] on `(objective, constraint)` pairs.
pub fn accepts(candidate: (f64, f64), incumbent: (f64, f64), sense: Sense) -> bool {
    let (co, cc) = candidate;
    let (io, ic) = incumbent;
    match (cc <= 0.0, ic <= 0.0) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => sense.at_least_as_good(co, io),
        (false, false) if cc == ic => sense.at_least_as_good(co, io),
        (false, false) => cc < ic,
    }
}

/// Strict version of [`is_improvement`].
pub fn strictly_better<G: Gene>(a: &Solution<G>, b: &Solution<G>, sense: Sense) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => sense.strictly_better(a.objective, b.objective),
        (false, false) => {
            if a.constraint == b.constraint {
                sense.strictly_better(a.objective, b.objective)
            } else {
                a.constraint < b.constraint
            }
        }
    }
}
