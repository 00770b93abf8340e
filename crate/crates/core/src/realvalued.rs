//! Real-valued GOMEA: Gaussian sampling per linkage set, optionally
//! conditioned on neighbouring variables in the VIG.

use alloc::vec::Vec;
use core::cmp::Ordering;

use libm::sqrt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fitness::{Evaluator, Solution, Undo};
use crate::gaussian::ConditionalGaussian;
use crate::linkage::{Fos, Linkage};
use crate::types::RngStream;

pub use crate::discrete::STALL_LIMIT;

/// Evaluations between from-scratch refreshes of a partially updated
/// solution, bounding floating-point drift in the fitness buffers.
pub const REFRESH_INTERVAL: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvConfig {
    pub lower_init_range: f64,
    pub upper_init_range: f64,
    /// Fraction of the population, best first, used to estimate the models.
    pub selection_fraction: f64,
    pub multiplier_min: f64,
    pub multiplier_max: f64,
    pub multiplier_increase: f64,
    pub multiplier_decrease: f64,
    /// Generations a solution may go without strict improvement before it is
    /// pulled towards the elitist.
    pub no_improvement_limit: u32,
    /// Fraction of the population whose samples are shifted along the
    /// recent movement of the selection mean.
    pub ams_fraction: f64,
    /// Length of that shift, in multiples of the mean's last displacement.
    pub ams_factor: f64,
}

impl Default for RvConfig {
    fn default() -> Self {
        Self {
            lower_init_range: 0.0,
            upper_init_range: 1.0,
            selection_fraction: 0.35,
            multiplier_min: 1e-10,
            multiplier_max: 1e3,
            multiplier_increase: 1.1,
            multiplier_decrease: 0.9,
            no_improvement_limit: 25,
            ams_fraction: 0.5 * 0.35,
            ams_factor: 2.0,
        }
    }
}

impl RvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lower_init_range.is_finite() && self.upper_init_range.is_finite()) {
            return Err(Error::config("initialization range bounds must be finite"));
        }
        if self.lower_init_range >= self.upper_init_range {
            return Err(Error::config(alloc::format!(
                "lower_init_range ({}) must be below upper_init_range ({})",
                self.lower_init_range,
                self.upper_init_range
            )));
        }
        if !(self.selection_fraction > 0.0 && self.selection_fraction <= 1.0) {
            return Err(Error::config("selection fraction must lie in (0, 1]"));
        }
        if !(self.multiplier_min > 0.0 && self.multiplier_min <= 1.0 && self.multiplier_max >= 1.0) {
            return Err(Error::config("multiplier bounds must satisfy 0 < min <= 1 <= max"));
        }
        Ok(())
    }
}

/// The distribution used to resample one linkage set: a single conditional
/// Gaussian, or a chain of them applied in order (forward sampling).
#[derive(Debug, Clone)]
pub enum SetModel {
    Single(ConditionalGaussian),
    Forward(Vec<ConditionalGaussian>),
}

impl SetModel {
    fn steps(&self) -> &[ConditionalGaussian] {
        match self {
            SetModel::Single(m) => core::slice::from_ref(m),
            SetModel::Forward(v) => v,
        }
    }
}

/// Maximum-likelihood models for every FOS element, fitted on `samples`.
pub fn estimate_models(samples: &[&[f64]], fos: &Fos) -> Vec<SetModel> {
    (0..fos.len())
        .map(|i| {
            if fos.is_generational(i) {
                SetModel::Forward(
                    fos.forward_steps()
                        .iter()
                        .map(|s| ConditionalGaussian::estimate(samples, &s.variables, &s.conditioning))
                        .collect(),
                )
            } else {
                SetModel::Single(ConditionalGaussian::estimate(samples, &fos.sets()[i], fos.conditioning(i)))
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
struct SetProgress {
    improved: bool,
    far: bool,
    stretch: u32,
}

#[derive(Debug, Clone)]
pub struct RvPopulation {
    solutions: Vec<Solution<f64>>,
    elitist: Solution<f64>,
    sets: Vec<Vec<usize>>,
    multipliers: Vec<f64>,
    progress: Vec<SetProgress>,
    no_improvement: Vec<u32>,
    selection_mean: Option<Vec<f64>>,
    generation: u64,
    stall: u64,
    terminated: bool,
    config: RvConfig,
}

impl RvPopulation {
    /// `n` genotypes drawn uniformly from `[lower, upper)`, fully evaluated.
    pub fn initialize(
        n: usize,
        config: RvConfig,
        evaluator: &mut Evaluator<'_, f64>,
        rng: &mut RngStream,
    ) -> Result<Self> {
        config.validate()?;
        if n == 0 {
            return Err(Error::config("population size must be at least 1"));
        }
        let ell = evaluator.size().get();
        let (lo, hi) = (config.lower_init_range, config.upper_init_range);
        let mut solutions = Vec::with_capacity(n);
        for _ in 0..n {
            let genotype = (0..ell)
                .map(|_| {
                    let v = lo + rng.random::<f64>() * (hi - lo);
                    if v < hi { v } else { lo }
                })
                .collect();
            solutions.push(evaluator.full_evaluate(genotype)?);
        }
        let mut elitist = 0;
        for i in 1..n {
            if evaluator.strictly_better(&solutions[i], &solutions[elitist]) {
                elitist = i;
            }
        }
        Ok(Self {
            elitist: solutions[elitist].clone(),
            solutions,
            sets: Vec::new(),
            multipliers: Vec::new(),
            progress: Vec::new(),
            no_improvement: alloc::vec![0; n],
            selection_mean: None,
            generation: 0,
            stall: 0,
            terminated: false,
            config,
        })
    }

    pub fn solutions(&self) -> &[Solution<f64>] {
        &self.solutions
    }

    pub fn elitist(&self) -> &Solution<f64> {
        &self.elitist
    }

    pub fn generations(&self) -> u64 {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn terminate(&mut self) {
        self.terminated = true;
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn mean_objective(&self) -> f64 {
        self.solutions.iter().map(|s| s.objective).sum::<f64>() / self.solutions.len() as f64
    }

    /// Indices of the best `ceil(fraction * n)` solutions.
    fn selection(&self, evaluator: &Evaluator<'_, f64>) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.solutions.len()).collect();
        order.sort_by(|&a, &b| {
            let (sa, sb) = (&self.solutions[a], &self.solutions[b]);
            if evaluator.strictly_better(sa, sb) {
                Ordering::Less
            } else if evaluator.strictly_better(sb, sa) {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        });
        let k = libm::ceil(self.config.selection_fraction * order.len() as f64) as usize;
        order.truncate(k.clamp(1, order.len()));
        order
    }

    /// Carries multipliers over to a new FOS; sets not seen before start at 1.
    fn sync_multipliers(&mut self, fos: &Fos) {
        if self.sets.as_slice() == fos.sets() {
            return;
        }
        let multipliers = fos
            .sets()
            .iter()
            .map(|s| self.sets.iter().position(|t| t == s).map_or(1.0, |i| self.multipliers[i]))
            .collect();
        self.multipliers = multipliers;
        self.progress = alloc::vec![SetProgress::default(); fos.len()];
        self.sets = fos.sets().to_vec();
    }

    /// GOM for solution `index`: resample each FOS element in random order
    /// and keep the sample unless it is worse. Returns per-element
    /// acceptance flags (OR-ed into `accepted`).
    pub fn gom(
        &mut self,
        index: usize,
        fos: &Fos,
        models: &[SetModel],
        shift: Option<&[f64]>,
        evaluator: &mut Evaluator<'_, f64>,
        rng: &mut RngStream,
    ) -> Result<()> {
        let mut order: Vec<usize> = (0..fos.len()).collect();
        order.shuffle(rng);
        let mut scratch = self.solutions[index].genotype.clone();
        let (mut out, mut z, mut changes) = (Vec::new(), Vec::new(), Vec::new());
        let mut undo = Undo::default();
        for &k in &order {
            let m = self.multipliers[k];
            scratch.copy_from_slice(&self.solutions[index].genotype);
            let mut z2 = 0.0;
            let mut dim = 0usize;
            for step in models[k].steps() {
                let norm = step.sample(&scratch, m, rng, &mut out, &mut z);
                z2 += norm * norm;
                dim += step.dim();
                for (&u, &v) in step.variables.iter().zip(&out) {
                    scratch[u] = v;
                }
            }
            if let Some(shift) = shift {
                for &u in &fos.sets()[k] {
                    scratch[u] += self.config.ams_factor * m * shift[u];
                }
            }
            let parent = &self.solutions[index].genotype;
            changes.clear();
            changes.extend(
                fos.sets()[k]
                    .iter()
                    .filter(|&&u| scratch[u].to_bits() != parent[u].to_bits())
                    .map(|&u| (u, scratch[u])),
            );
            if changes.is_empty() {
                continue;
            }
            let s = &mut self.solutions[index];
            evaluator.apply_partial(s, &changes, &mut undo)?;
            if evaluator.accepts_change(s, &undo) {
                if evaluator.strictly_better(s, &self.elitist) {
                    let sdr = m * sqrt(z2 / dim.max(1) as f64);
                    let p = &mut self.progress[k];
                    p.improved = true;
                    p.far |= sdr > 1.0;
                    self.elitist = s.clone();
                }
            } else {
                evaluator.revert(s, &undo);
            }
        }
        Ok(())
    }

    /// Per-set multiplier update: a set whose samples improved the elitist
    /// is reset to at least 1 and enlarged if the improving sample lay more
    /// than one standard deviation out; otherwise an enlarged multiplier
    /// shrinks, and one at or below 1 shrinks only after a long stretch
    /// without improvement.
    fn adapt_multipliers(&mut self) {
        let c = &self.config;
        for (m, p) in self.multipliers.iter_mut().zip(&mut self.progress) {
            if p.improved {
                p.stretch = 0;
                if *m < 1.0 {
                    *m = 1.0;
                }
                if p.far {
                    *m *= c.multiplier_increase;
                }
            } else {
                if *m <= 1.0 {
                    p.stretch += 1;
                }
                if *m > 1.0 || p.stretch >= c.no_improvement_limit {
                    *m *= c.multiplier_decrease;
                }
                if *m < 1.0 && p.stretch < c.no_improvement_limit {
                    *m = 1.0;
                }
            }
            *m = m.clamp(c.multiplier_min, c.multiplier_max);
        }
    }

    /// Moves solution `index` towards the elitist, set by set with shrinking
    /// step weights, until one move strictly improves it; failing that, the
    /// solution becomes a copy of the elitist.
    fn forced_improvement(
        &mut self,
        index: usize,
        fos: &Fos,
        evaluator: &mut Evaluator<'_, f64>,
        rng: &mut RngStream,
    ) -> Result<()> {
        let mut order: Vec<usize> = (0..fos.len()).collect();
        let mut changes = Vec::new();
        let mut undo = Undo::default();
        let mut alpha = 1.0;
        while alpha >= 0.01 {
            alpha *= 0.5;
            order.shuffle(rng);
            for &k in &order {
                let (parent, elitist) = (&self.solutions[index].genotype, &self.elitist.genotype);
                changes.clear();
                changes.extend(fos.sets()[k].iter().filter_map(|&u| {
                    let v = alpha * parent[u] + (1.0 - alpha) * elitist[u];
                    (v.to_bits() != parent[u].to_bits()).then_some((u, v))
                }));
                if changes.is_empty() {
                    continue;
                }
                let s = &mut self.solutions[index];
                evaluator.apply_partial(s, &changes, &mut undo)?;
                if evaluator.improved_by_change(s, &undo) {
                    if evaluator.strictly_better(s, &self.elitist) {
                        self.elitist = s.clone();
                    }
                    return Ok(());
                }
                evaluator.revert(s, &undo);
            }
        }
        self.solutions[index] = self.elitist.clone();
        Ok(())
    }

    /// One generation: pick the FOS, fit the models on the selection, apply
    /// GOM to every solution in place and adapt the multipliers.
    pub fn run_generation(
        &mut self,
        linkage: &Linkage,
        evaluator: &mut Evaluator<'_, f64>,
        rng: &mut RngStream,
    ) -> Result<()> {
        let ell = evaluator.size().get();
        let fos = {
            let views: Vec<&[f64]> = self.solutions.iter().map(|s| s.genotype.as_slice()).collect();
            linkage.for_real(&views, ell, rng)
        };
        self.sync_multipliers(&fos);
        let (models, mean) = {
            let selected = self.selection(evaluator);
            let samples: Vec<&[f64]> = selected.iter().map(|&i| self.solutions[i].genotype.as_slice()).collect();
            let mut mean = alloc::vec![0.0; ell];
            for x in &samples {
                mean.iter_mut().zip(x.iter()).for_each(|(m, v)| *m += v);
            }
            mean.iter_mut().for_each(|m| *m /= samples.len() as f64);
            (estimate_models(&samples, &fos), mean)
        };
        let shift: Option<Vec<f64>> =
            self.selection_mean.as_ref().map(|prev| mean.iter().zip(prev).map(|(a, b)| a - b).collect());
        self.selection_mean = Some(mean);
        let ams_count = (self.config.ams_fraction * self.solutions.len() as f64) as usize;
        let best_before = self.elitist.clone();
        self.progress.iter_mut().for_each(|p| (p.improved, p.far) = (false, false));
        for i in 0..self.solutions.len() {
            let before = self.solutions[i].clone();
            let shift = shift.as_deref().filter(|_| i < ams_count);
            self.gom(i, &fos, &models, shift, evaluator, rng)?;
            if evaluator.strictly_better(&self.solutions[i], &before) {
                self.no_improvement[i] = 0;
            } else {
                self.no_improvement[i] += 1;
                if self.no_improvement[i] > self.config.no_improvement_limit {
                    self.forced_improvement(i, &fos, evaluator, rng)?;
                    self.no_improvement[i] = 0;
                }
            }
        }
        self.adapt_multipliers();
        self.generation += 1;
        if evaluator.strictly_better(&self.elitist, &best_before) {
            self.stall = 0;
        } else {
            self.stall += 1;
        }
        let first = &self.solutions[0].genotype;
        if self.stall >= STALL_LIMIT || self.solutions[1..].iter().all(|s| &s.genotype == first) {
            self.terminated = true;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::Rosenbrock;
    use crate::clock::NoClock;
    use crate::fitness::{Fitness, SubfunctionDecomposition};
    use crate::linkage::{build_univariate, LinkageModel};
    use crate::types::{make_rng, Domain, Sense};
    use alloc::vec;

    fn rosen_eval(r: &Rosenbrock) -> Evaluator<'_, f64> {
        let d = SubfunctionDecomposition::new(r).unwrap();
        Evaluator::new(Fitness::GrayBox(d), Sense::Minimize, &NoClock)
            .unwrap()
            .with_refresh_interval(Some(REFRESH_INTERVAL))
    }

    #[test]
    fn init_ranges() {
        let r = Rosenbrock::new(5).unwrap();
        let mut ev = rosen_eval(&r);
        let mut rng = make_rng(1);
        let p = RvPopulation::initialize(50, RvConfig::default(), &mut ev, &mut rng).unwrap();
        assert!(p.solutions().iter().flat_map(|s| &s.genotype).all(|&v| (0.0..1.0).contains(&v)));
        let cfg = RvConfig { lower_init_range: -5.0, upper_init_range: 5.0, ..RvConfig::default() };
        let p = RvPopulation::initialize(50, cfg, &mut ev, &mut rng).unwrap();
        let all: Vec<f64> = p.solutions().iter().flat_map(|s| s.genotype.clone()).collect();
        assert!(all.iter().all(|&v| (-5.0..5.0).contains(&v)));
        assert!(all.iter().any(|&v| v < 0.0) && all.iter().any(|&v| v > 1.0));
        let bad = RvConfig { lower_init_range: 1.0, upper_init_range: 0.0, ..RvConfig::default() };
        assert!(matches!(RvPopulation::initialize(5, bad, &mut ev, &mut rng), Err(Error::Config(_))));
    }

    #[test]
    fn zero_covariance_model_keeps_parent() {
        let r = Rosenbrock::new(2).unwrap();
        let mut ev = rosen_eval(&r);
        let mut rng = make_rng(2);
        let mut p = RvPopulation::initialize(3, RvConfig::default(), &mut ev, &mut rng).unwrap();
        let g = vec![0.3, 0.7];
        for s in &mut p.solutions {
            *s = ev.full_evaluate(g.clone()).unwrap();
        }
        let fos = build_univariate(2);
        p.sync_multipliers(&fos);
        let views: Vec<&[f64]> = p.solutions.iter().map(|s| s.genotype.as_slice()).collect();
        let models = estimate_models(&views, &fos);
        let before = p.solutions[0].objective;
        p.gom(0, &fos, &models, None, &mut ev, &mut rng).unwrap();
        assert!((p.solutions[0].genotype[0] - 0.3).abs() < 1e-4);
        assert!((p.solutions[0].genotype[1] - 0.7).abs() < 1e-4);
        assert!(p.solutions[0].objective <= before);
    }

    #[test]
    fn elitist_is_monotone() {
        let r = Rosenbrock::new(2).unwrap();
        let mut ev = rosen_eval(&r);
        let mut rng = make_rng(5);
        let mut p = RvPopulation::initialize(40, RvConfig::default(), &mut ev, &mut rng).unwrap();
        let linkage = Linkage::Fixed(build_univariate(2));
        let start = p.elitist().objective;
        let mut best = start;
        while !p.is_terminated() && p.generations() < 500 {
            p.run_generation(&linkage, &mut ev, &mut rng).unwrap();
            assert!(p.elitist().objective <= best);
            best = p.elitist().objective;
            for s in p.solutions() {
                assert!(s.genotype.iter().all(|v| v.is_finite()));
            }
        }
        assert!(best < start.min(1e-3));
    }

    #[test]
    fn conditional_models_run() {
        let r = Rosenbrock::new(6).unwrap();
        let mut rng = make_rng(8);
        for model in [LinkageModel::ucond_gg(), LinkageModel::ucond_fg(), LinkageModel::ucond_hg()] {
            let mut ev = rosen_eval(&r);
            let linkage = Linkage::resolve(&model, Domain::RealValued, ev.fitness(), &mut rng).unwrap();
            let mut p = RvPopulation::initialize(20, RvConfig::default(), &mut ev, &mut rng).unwrap();
            let start = p.elitist().objective;
            for _ in 0..30 {
                p.run_generation(&linkage, &mut ev, &mut rng).unwrap();
            }
            assert!(p.elitist().objective < start);
        }
    }

    #[test]
    fn same_seed_same_population() {
        let r = Rosenbrock::new(4).unwrap();
        let run = || {
            let mut ev = rosen_eval(&r);
            let mut rng = make_rng(77);
            let mut p = RvPopulation::initialize(10, RvConfig::default(), &mut ev, &mut rng).unwrap();
            let linkage = Linkage::Fixed(build_univariate(4));
            for _ in 0..10 {
                p.run_generation(&linkage, &mut ev, &mut rng).unwrap();
            }
            p.solutions().iter().map(|s| s.genotype.clone()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
