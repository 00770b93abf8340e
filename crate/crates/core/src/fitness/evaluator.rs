use alloc::vec;
use alloc::vec::Vec;

use super::{accepts, is_improvement, strictly_better, BlackBoxFunction, Solution, SubfunctionDecomposition};
use crate::clock::Clock;
use crate::error::{Error, Result};
use crate::types::{genotype_is_valid, Gene, ProblemSize, Sense};

/// The fitness function of a run: gray-box with partial evaluations, or
/// black-box with full evaluations only.
pub enum Fitness<'a, G: Gene> {
    GrayBox(SubfunctionDecomposition<'a, G>),
    BlackBox(&'a dyn BlackBoxFunction<G>),
}

impl<G: Gene> Fitness<'_, G> {
    pub fn size(&self) -> Result<ProblemSize> {
        match self {
            Fitness::GrayBox(d) => Ok(d.size()),
            Fitness::BlackBox(f) => ProblemSize::new(f.number_of_variables()),
        }
    }

    pub fn decomposition(&self) -> Option<&SubfunctionDecomposition<'_, G>> {
        match self {
            Fitness::GrayBox(d) => Some(d),
            Fitness::BlackBox(_) => None,
        }
    }
}

/// Evaluation units spent, in fractions of a full evaluation.
///
/// Counts are kept as integers (full evaluations and recomputed
/// subfunctions) so the fractional total is exact up to one final division.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvaluationCounter {
    full: u64,
    partial_subfunctions: u64,
    subfunctions: u64,
    /// Seconds spent inside fitness callbacks.
    pub eval_time: f64,
}

impl EvaluationCounter {
    fn new(subfunctions: usize) -> Self {
        Self {
            subfunctions: subfunctions.max(1) as u64,
            ..Self::default()
        }
    }

    pub fn total(&self) -> f64 {
        self.full as f64 + self.partial_subfunctions as f64 / self.subfunctions as f64
    }

    /// Units spent since an earlier snapshot of this counter, computed from
    /// the integer counts so fractional charges are exact.
    pub fn units_since(&self, earlier: &EvaluationCounter) -> f64 {
        (self.full - earlier.full) as f64
            + (self.partial_subfunctions - earlier.partial_subfunctions) as f64 / self.subfunctions as f64
    }

    pub fn full_evaluations(&self) -> u64 {
        self.full
    }

    pub fn partial_subfunction_evaluations(&self) -> u64 {
        self.partial_subfunctions
    }
}

/// State needed to roll a solution back after a rejected partial update.
#[derive(Debug, Clone)]
pub struct Undo<G: Gene> {
    genes: Vec<(usize, G)>,
    subfunction_values: Vec<(usize, f64)>,
    buffers: Vec<f64>,
    objective: f64,
    constraint: f64,
    partial_updates: u32,
}

impl<G: Gene> Default for Undo<G> {
    fn default() -> Self {
        Self {
            genes: Vec::new(),
            subfunction_values: Vec::new(),
            buffers: Vec::new(),
            objective: f64::NAN,
            constraint: 0.0,
            partial_updates: 0,
        }
    }
}

/// Applies the fitness function, keeps fitness buffers consistent, counts
/// evaluation units, and tracks the best solution ever evaluated.
pub struct Evaluator<'a, G: Gene> {
    fitness: Fitness<'a, G>,
    size: ProblemSize,
    sense: Sense,
    clock: &'a dyn Clock,
    counter: EvaluationCounter,
    refresh_interval: Option<u32>,
    // scratch for deduplicating touched subfunctions
    stamps: Vec<u32>,
    stamp: u32,
    touched: Vec<usize>,
    new_values: Vec<f64>,
    best: Option<Solution<G>>,
}

impl<'a, G: Gene> Evaluator<'a, G> {
    pub fn new(fitness: Fitness<'a, G>, sense: Sense, clock: &'a dyn Clock) -> Result<Self> {
        let size = fitness.size()?;
        let q = fitness.decomposition().map_or(1, |d| d.number_of_subfunctions());
        let stamps = match &fitness {
            Fitness::GrayBox(d) => vec![0; d.number_of_subfunctions()],
            Fitness::BlackBox(_) => Vec::new(),
        };
        Ok(Self {
            fitness,
            size,
            sense,
            clock,
            counter: EvaluationCounter::new(q),
            refresh_interval: None,
            stamps,
            stamp: 0,
            touched: Vec::new(),
            new_values: Vec::new(),
            best: None,
        })
    }

    /// Recompute the buffers of a solution from scratch after this many
    /// partial updates. The refresh costs time but no evaluation units.
    pub fn with_refresh_interval(mut self, interval: Option<u32>) -> Self {
        self.refresh_interval = interval.filter(|&n| n > 0);
        self
    }

    pub fn size(&self) -> ProblemSize {
        self.size
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn fitness(&self) -> &Fitness<'a, G> {
        &self.fitness
    }

    pub fn counter(&self) -> &EvaluationCounter {
        &self.counter
    }

    pub fn is_gray_box(&self) -> bool {
        matches!(self.fitness, Fitness::GrayBox(_))
    }

    /// Best solution evaluated so far, by the strict constraint-domination
    /// order.
    pub fn best(&self) -> Option<&Solution<G>> {
        self.best.as_ref()
    }

    pub fn is_improvement(&self, candidate: &Solution<G>, incumbent: &Solution<G>) -> bool {
        is_improvement(candidate, incumbent, self.sense)
    }

    pub fn strictly_better(&self, a: &Solution<G>, b: &Solution<G>) -> bool {
        strictly_better(a, b, self.sense)
    }

    /// Whether the state of `s` after [`Evaluator::apply_partial`] may be
    /// kept, judged against the state recorded in `undo`.
    pub fn accepts_change(&self, s: &Solution<G>, undo: &Undo<G>) -> bool {
        accepts((s.objective, s.constraint), (undo.objective, undo.constraint), self.sense)
    }

    /// Whether the last change applied to `s` strictly improved it.
    pub fn improved_by_change(&self, s: &Solution<G>, undo: &Undo<G>) -> bool {
        let (after, before) = ((s.objective, s.constraint), (undo.objective, undo.constraint));
        accepts(after, before, self.sense) && !accepts(before, after, self.sense)
    }

    /// Evaluates a genotype from scratch.
    pub fn full_evaluate(&mut self, genotype: Vec<G>) -> Result<Solution<G>> {
        let mut s = Solution::new(genotype);
        self.evaluate(&mut s)?;
        Ok(s)
    }

    /// Full evaluation in place; charges one unit.
    pub fn evaluate(&mut self, s: &mut Solution<G>) -> Result<()> {
        debug_assert!(genotype_is_valid(&s.genotype, self.size));
        let start = self.clock.now();
        let r = self.compute_full(s);
        self.counter.eval_time += self.clock.now() - start;
        r?;
        self.counter.full += 1;
        self.observe(s);
        Ok(())
    }

    fn compute_full(&self, s: &mut Solution<G>) -> Result<()> {
        match &self.fitness {
            Fitness::GrayBox(d) => {
                let f = d.function();
                let q = d.number_of_subfunctions();
                s.subfunction_values.clear();
                s.subfunction_values.reserve(q);
                s.buffers.clear();
                s.buffers.resize(d.buffer_count(), 0.0);
                for i in 0..q {
                    let v = f
                        .subfunction(i, &s.genotype)
                        .map_err(|source| Error::Subfunction { index: i, source })?;
                    s.subfunction_values.push(v);
                    s.buffers[d.buffer_of(i)] += v;
                }
                s.objective = f.objective_function(0, &s.buffers).map_err(Error::Callback)?;
                s.constraint = f.constraint_function(&s.buffers).map_err(Error::Callback)?;
            }
            Fitness::BlackBox(f) => {
                s.objective = f.objective_function(0, &s.genotype).map_err(Error::Callback)?;
                s.constraint = f.constraint_function(&s.genotype).map_err(Error::Callback)?;
            }
        }
        s.evaluated = true;
        s.partial_updates = 0;
        Ok(())
    }

    /// Returns a copy of `parent` with `changes` applied and re-evaluated
    /// incrementally. The parent is left untouched.
    pub fn partial_evaluate(&mut self, parent: &Solution<G>, changes: &[(usize, G)]) -> Result<Solution<G>> {
        let mut child = parent.clone();
        let mut undo = Undo::default();
        self.apply_partial(&mut child, changes, &mut undo)?;
        Ok(child)
    }

    /// Applies `changes` to `s` in place and updates its buffers, recomputing
    /// only the subfunctions that read a changed variable. On success `undo`
    /// holds what [`Evaluator::revert`] needs; on error `s` is unchanged.
    ///
    /// Gray-box: charges `|D|/q` for the set `D` of dependent subfunctions.
    /// Black-box: falls back to a full evaluation and charges one unit.
    pub fn apply_partial(&mut self, s: &mut Solution<G>, changes: &[(usize, G)], undo: &mut Undo<G>) -> Result<()> {
        if !s.evaluated {
            return Err(Error::Contract("partial evaluation of an unevaluated solution".into()));
        }
        undo.genes.clear();
        undo.subfunction_values.clear();
        undo.buffers.clear();
        if let (Some(limit), true) = (self.refresh_interval, self.is_gray_box()) {
            if s.partial_updates >= limit {
                self.refresh(s)?;
            }
        }
        undo.buffers.extend_from_slice(&s.buffers);
        undo.objective = s.objective;
        undo.constraint = s.constraint;
        undo.partial_updates = s.partial_updates;
        for &(u, v) in changes {
            debug_assert!(self.size.contains(u) && v.is_valid());
            undo.genes.push((u, s.genotype[u]));
            s.genotype[u] = v;
        }

        let start = self.clock.now();
        let r = self.compute_partial(s, changes, undo);
        self.counter.eval_time += self.clock.now() - start;
        if let Err(e) = r {
            self.revert(s, undo);
            return Err(e);
        }
        self.observe(s);
        Ok(())
    }

    fn compute_partial(&mut self, s: &mut Solution<G>, changes: &[(usize, G)], undo: &mut Undo<G>) -> Result<()> {
        let d = match &self.fitness {
            Fitness::GrayBox(d) => d,
            Fitness::BlackBox(_) => {
                self.compute_full(s)?;
                self.counter.full += 1;
                return Ok(());
            }
        };
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.stamps.iter_mut().for_each(|x| *x = 0);
            self.stamp = 1;
        }
        self.touched.clear();
        for &(u, _) in changes {
            for &i in d.dependency_index().of(u) {
                if self.stamps[i] != self.stamp {
                    self.stamps[i] = self.stamp;
                    self.touched.push(i);
                }
            }
        }
        let f = d.function();
        self.new_values.clear();
        for &i in &self.touched {
            let v = f
                .subfunction(i, &s.genotype)
                .map_err(|source| Error::Subfunction { index: i, source })?;
            self.new_values.push(v);
        }
        for (&i, &v) in self.touched.iter().zip(&self.new_values) {
            let old = s.subfunction_values[i];
            undo.subfunction_values.push((i, old));
            let b = d.buffer_of(i);
            s.buffers[b] = s.buffers[b] - old + v;
            s.subfunction_values[i] = v;
        }
        s.objective = f.objective_function(0, &s.buffers).map_err(Error::Callback)?;
        s.constraint = f.constraint_function(&s.buffers).map_err(Error::Callback)?;
        s.partial_updates = s.partial_updates.saturating_add(1);
        self.counter.partial_subfunctions += self.touched.len() as u64;
        Ok(())
    }

    /// Restores the state captured by the last [`Evaluator::apply_partial`].
    pub fn revert(&self, s: &mut Solution<G>, undo: &Undo<G>) {
        for &(u, v) in undo.genes.iter().rev() {
            s.genotype[u] = v;
        }
        for &(i, v) in undo.subfunction_values.iter().rev() {
            s.subfunction_values[i] = v;
        }
        s.buffers.clear();
        s.buffers.extend_from_slice(&undo.buffers);
        s.objective = undo.objective;
        s.constraint = undo.constraint;
        s.partial_updates = undo.partial_updates;
    }

    /// Recomputes buffers from scratch without charging evaluation units.
    fn refresh(&mut self, s: &mut Solution<G>) -> Result<()> {
        let start = self.clock.now();
        let r = self.compute_full(s);
        self.counter.eval_time += self.clock.now() - start;
        r
    }

    fn observe(&mut self, s: &Solution<G>) {
        let better = match &self.best {
            None => true,
            Some(b) => strictly_better(s, b, self.sense),
        };
        if better {
            self.best = Some(s.clone());
        }
    }
}
