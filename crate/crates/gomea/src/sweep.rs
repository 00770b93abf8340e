//! Scalability sweeps: repeated seeded runs per dimension, aggregated over
//! the successful ones.

use std::path::Path;

use gomea_core::{Clock, NoClock};
use rayon::prelude::*;
use statrs::statistics::{Data, OrderStatistics};

use crate::clock::StdClock;
use crate::error::{CliError, Result};
use crate::problem::{Outcome, ProblemKind};
use crate::request::{default_linkage, RunRequest};

pub const SUMMARY_COLUMNS: [&str; 12] = [
    "problem",
    "ell",
    "mode",
    "linkage",
    "runs",
    "successes",
    "median_evals",
    "p10_evals",
    "p90_evals",
    "median_time",
    "p10_time",
    "p90_time",
];

/// Median, 10th and 90th percentile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
}

impl Spread {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut data = Data::new(values.to_vec());
        Some(Self { median: data.quantile(0.5), p10: data.quantile(0.1), p90: data.quantile(0.9) })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub ell: usize,
    pub mode: String,
    pub linkage: String,
    pub runs: usize,
    pub successes: usize,
    /// Over successful runs only.
    pub evaluations: Option<Spread>,
    pub time: Option<Spread>,
}

impl SummaryRow {
    pub fn new(problem: &str, ell: usize, mode: &str, linkage: &str, outcomes: &[Outcome]) -> Self {
        let ok: Vec<&Outcome> = outcomes.iter().filter(|o| o.success).collect();
        let evals: Vec<f64> = ok.iter().map(|o| o.evaluations).collect();
        let times: Vec<f64> = ok.iter().map(|o| o.elapsed).collect();
        Self {
            problem: problem.into(),
            ell,
            mode: mode.into(),
            linkage: linkage.into(),
            runs: outcomes.len(),
            successes: ok.len(),
            evaluations: Spread::of(&evals),
            time: Spread::of(&times),
        }
    }

    fn fields(&self) -> Vec<String> {
        let spread = |s: Option<Spread>| match s {
            Some(s) => [s.median, s.p10, s.p90].map(|v| v.to_string()),
            None => Default::default(),
        };
        let mut out = vec![
            self.problem.clone(),
            self.ell.to_string(),
            self.mode.clone(),
            self.linkage.clone(),
            self.runs.to_string(),
            self.successes.to_string(),
        ];
        out.extend(spread(self.evaluations));
        out.extend(spread(self.time));
        out
    }
}

pub fn summary_csv_string(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_COLUMNS).unwrap();
    for r in rows {
        w.write_record(r.fields()).unwrap();
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 output")
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    std::fs::write(path, summary_csv_string(rows)).map_err(CliError::io(path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Template for every run; its size and seed are overwritten.
    pub template: RunRequest,
    /// Problem sizes: ℓ for trap and rosenbrock, the torus side for maxcut.
    pub dims: Vec<usize>,
    pub repeats: usize,
    /// Run `r` of every dimension uses seed `base_seed + r`.
    pub base_seed: u64,
    pub parallel: bool,
    /// Measure wall-clock time; off gives reproducible output.
    pub timing: bool,
}

impl Sweep {
    fn request(&self, dim: usize, repeat: usize) -> RunRequest {
        let mut r = self.template.clone();
        match r.problem.kind {
            ProblemKind::Maxcut => {
                r.problem.m = Some(dim);
                r.problem.instance = None;
            }
            _ => r.problem.ell = Some(dim),
        }
        r.seed = Some(self.base_seed + repeat as u64);
        r
    }

    fn one(&self, dim: usize, repeat: usize) -> Result<Outcome> {
        let clock: Box<dyn Clock> = if self.timing { Box::new(StdClock::new()) } else { Box::new(NoClock) };
        Ok(self.request(dim, repeat).execute(clock.as_ref())?.1)
    }

    /// One summary row per dimension, in the order given.
    pub fn run(&self) -> Result<Vec<SummaryRow>> {
        if self.repeats == 0 {
            return Err(gomea_core::Error::Config("repeats must be at least 1".into()).into());
        }
        let jobs: Vec<(usize, usize)> =
            self.dims.iter().flat_map(|&d| (0..self.repeats).map(move |r| (d, r))).collect();
        let outcomes: Vec<Outcome> = if self.parallel {
            jobs.par_iter().map(|&(d, r)| self.one(d, r)).collect::<Result<_>>()?
        } else {
            jobs.iter().map(|&(d, r)| self.one(d, r)).collect::<Result<_>>()?
        };
        let mut rows = Vec::new();
        for (dim, chunk) in self.dims.iter().zip(outcomes.chunks(self.repeats)) {
            let problem = self.request(*dim, 0).problem.build()?;
            let linkage = match &self.template.linkage {
                Some(l) => l.to_string(),
                None => default_linkage(problem.domain(), self.template.mode).to_string(),
            };
            rows.push(SummaryRow::new(
                problem.name(),
                problem.number_of_variables(),
                self.template.mode.as_str(),
                &linkage,
                chunk,
            ));
        }
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemSpec;

    fn outcome(success: bool, evaluations: f64) -> Outcome {
        Outcome {
            statistics: Default::default(),
            best_objective: 0.0,
            best_constraint: 0.0,
            evaluations,
            elapsed: evaluations / 100.0,
            eval_time: 0.0,
            termination: gomea_core::TerminationReason::ValueToReach,
            generations: 1,
            populations: 1,
            success,
        }
    }

    #[test]
    fn single_value_percentiles_equal_it() {
        let s = Spread::of(&[7.5]).unwrap();
        assert_eq!((s.median, s.p10, s.p90), (7.5, 7.5, 7.5));
        let s = Spread::of(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(s.median, 3.0);
        assert!(s.p10 >= 1.0 && s.p10 < 2.0 && s.p90 > 4.0 && s.p90 <= 5.0);
    }

    #[test]
    fn zero_successes_leave_percentiles_empty() {
        let row = SummaryRow::new("trap", 20, "gbo", "slt", &[outcome(false, 10.0), outcome(false, 20.0)]);
        assert_eq!((row.runs, row.successes), (2, 0));
        let text = summary_csv_string(&[row]);
        assert_eq!(text.lines().next().unwrap(), SUMMARY_COLUMNS.join(","));
        assert_eq!(text.lines().nth(1).unwrap(), "trap,20,gbo,slt,2,0,,,,,,");
    }

    #[test]
    fn only_successes_are_aggregated() {
        let row = SummaryRow::new("trap", 20, "gbo", "slt", &[outcome(true, 10.0), outcome(false, 1e9)]);
        assert_eq!(row.evaluations.unwrap().median, 10.0);
    }

    #[test]
    fn trap_sweep_medians_grow_with_size() {
        let mut spec = ProblemSpec::new(ProblemKind::Trap);
        spec.k = 5;
        let sweep = Sweep {
            template: RunRequest::new(spec),
            dims: vec![20, 40, 80],
            repeats: 10,
            base_seed: 0,
            parallel: true,
            timing: false,
        };
        let rows = sweep.run().unwrap();
        assert!(rows.iter().all(|r| r.successes == 10));
        let medians: Vec<f64> = rows.iter().map(|r| r.evaluations.unwrap().median).collect();
        assert!(medians.windows(2).all(|w| w[0] <= w[1]), "{medians:?}");
        // aggregation is independent of scheduling
        assert_eq!(Sweep { parallel: false, ..sweep }.run().unwrap(), rows);
    }
}
