//! Run statistics, recorded at generation boundaries.

use alloc::string::String;
use alloc::vec::Vec;

/// Metric keys, in output column order.
pub const METRICS: [&str; 8] = [
    "generation",
    "evaluations",
    "time",
    "eval_time",
    "population_index",
    "population_size",
    "best_obj_val",
    "best_cons_val",
];

/// Interval, in generations of one population, between records when
/// several populations are interleaved.
pub const IMS_RECORD_INTERVAL: u64 = 10;

/// One data point; all fields describe the same instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    /// Generations completed by the population that triggered the record.
    pub generation: u64,
    pub evaluations: f64,
    pub time: f64,
    pub eval_time: f64,
    pub population_index: usize,
    pub population_size: usize,
    pub best_obj_val: f64,
    pub best_cons_val: f64,
}

impl Record {
    /// The value of metric `key` as a float.
    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "generation" => self.generation as f64,
            "evaluations" => self.evaluations,
            "time" => self.time,
            "eval_time" => self.eval_time,
            "population_index" => self.population_index as f64,
            "population_size" => self.population_size as f64,
            "best_obj_val" => self.best_obj_val,
            "best_cons_val" => self.best_cons_val,
            _ => return None,
        })
    }
}

/// Whether a population that just completed `generation` generations should
/// be recorded: every generation without interleaving, every
/// [`IMS_RECORD_INTERVAL`] generations with it.
pub fn should_record(ims_enabled: bool, generation: u64) -> bool {
    !ims_enabled || (generation > 0 && generation.is_multiple_of(IMS_RECORD_INTERVAL))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStatistics {
    records: Vec<Record>,
    /// Seed the run used (drawn or supplied).
    pub seed: Option<u64>,
    /// Free-form `key = value` description of the configuration.
    pub config: Vec<(String, String)>,
    pub termination: Option<String>,
}

impl RunStatistics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn metrics(&self) -> &'static [&'static str] {
        &METRICS
    }

    pub fn push(&mut self, record: Record) {
        debug_assert!(self
            .records
            .last()
            .is_none_or(|r| r.evaluations <= record.evaluations && r.time <= record.time));
        self.records.push(record);
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Column of one metric across all records.
    pub fn metric(&self, key: &str) -> Option<Vec<f64>> {
        if !METRICS.contains(&key) {
            return None;
        }
        Some(self.records.iter().filter_map(|r| r.get(key)).collect())
    }
}
