//! CSV serialization of [`RunStatistics`].
//!
//! Layout: `# key: value` metadata lines (seed, termination, configuration
//! echo), a header with the metric keys in [`METRICS`] order, then one row
//! per record. Every value round-trips exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use gomea_core::{Record, RunStatistics, METRICS};

use crate::error::{CliError, Result};

const SEED: &str = "seed";
const TERMINATION: &str = "termination";

/// Three decimals when that is exact, otherwise the shortest exact form.
fn format_units(v: f64) -> String {
    let fixed = format!("{v:.3}");
    if fixed.parse::<f64>() == Ok(v) {
        fixed
    } else {
        v.to_string()
    }
}

/// 17 significant digits.
fn format_objective(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn row(r: &Record) -> [String; 8] {
    [
        r.generation.to_string(),
        format_units(r.evaluations),
        r.time.to_string(),
        r.eval_time.to_string(),
        r.population_index.to_string(),
        r.population_size.to_string(),
        format_objective(r.best_obj_val),
        format_objective(r.best_cons_val),
    ]
}

/// Serializes `stats` to a string.
pub fn to_csv_string(stats: &RunStatistics) -> String {
    let mut out = Vec::new();
    if let Some(seed) = stats.seed {
        writeln!(out, "# {SEED}: {seed}").unwrap();
    }
    if let Some(t) = &stats.termination {
        writeln!(out, "# {TERMINATION}: {t}").unwrap();
    }
    for (k, v) in &stats.config {
        writeln!(out, "# {k}: {v}").unwrap();
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS).unwrap();
    for r in stats.records() {
        w.write_record(row(r)).unwrap();
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ascii output")
}

pub fn write_csv(stats: &RunStatistics, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    fs::write(path, to_csv_string(stats)).map_err(CliError::io(path))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| CliError::Format(format!("line {line}: bad value in column {}", METRICS[i])))
}

/// Parses text produced by [`to_csv_string`].
pub fn parse_csv(text: &str) -> Result<RunStatistics> {
    let mut stats = RunStatistics::new();
    let mut body = 0;
    for line in text.split_inclusive('\n') {
        let Some(meta) = line.strip_prefix('#') else { break };
        body += line.len();
        let (key, value) = meta
            .trim()
            .split_once(": ")
            .ok_or_else(|| CliError::Format(format!("metadata line without \"key: value\": {line:?}")))?;
        match key {
            SEED => stats.seed = Some(value.parse().map_err(|_| CliError::Format(format!("bad seed {value:?}")))?),
            TERMINATION => stats.termination = Some(value.to_string()),
            _ => stats.config.push((key.to_string(), value.to_string())),
        }
    }
    let mut reader = csv::Reader::from_reader(&text.as_bytes()[body..]);
    let header = reader.headers().map_err(|e| CliError::Format(e.to_string()))?;
    if header.iter().ne(METRICS) {
        return Err(CliError::Format(format!("expected header {METRICS:?}, found {header:?}")));
    }
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::Format(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        stats.push(Record {
            generation: field(&rec, 0, line)?,
            evaluations: field(&rec, 1, line)?,
            time: field(&rec, 2, line)?,
            eval_time: field(&rec, 3, line)?,
            population_index: field(&rec, 4, line)?,
            population_size: field(&rec, 5, line)?,
            best_obj_val: field(&rec, 6, line)?,
            best_cons_val: field(&rec, 7, line)?,
        });
    }
    Ok(stats)
}

pub fn read_csv(path: &Path) -> Result<RunStatistics> {
    parse_csv(&fs::read_to_string(path).map_err(CliError::io(path))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(generation: u64, evaluations: f64, best: f64) -> Record {
        Record {
            generation,
            evaluations,
            time: 0.1 * generation as f64,
            eval_time: 0.01 * generation as f64,
            population_index: 1,
            population_size: 16,
            best_obj_val: best,
            best_cons_val: 0.0,
        }
    }

    fn sample() -> RunStatistics {
        let mut s = RunStatistics::new();
        s.seed = Some(42);
        s.termination = Some("value_to_reach".into());
        s.config = vec![("linkage".into(), "lt:nmi:filtered".into()), ("value_to_reach".into(), "none".into())];
        s.push(record(1, 32.5, 0.1 + 0.2));
        s.push(record(2, 100.0 + 2.0 / 3.0, 1.0 / 3.0));
        s.push(record(3, 1e7, -1234.5678e-300));
        s
    }

    #[test]
    fn empty_statistics_give_header_only() {
        let text = to_csv_string(&RunStatistics::new());
        assert_eq!(text, format!("{}\n", METRICS.join(",")));
    }

    #[test]
    fn round_trip_is_exact() {
        let s = sample();
        let text = to_csv_string(&s);
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
        assert_eq!(parse_csv(&text).unwrap(), s);
    }

    #[test]
    fn number_formats() {
        assert_eq!(format_units(32.5), "32.500");
        assert_eq!(format_units(2.0 / 3.0).parse::<f64>().unwrap(), 2.0 / 3.0);
        assert_eq!(format_objective(40.0), "4.0000000000000000e1");
    }

    #[test]
    fn file_round_trip_and_io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/run.csv");
        write_csv(&sample(), &path).unwrap();
        assert_eq!(read_csv(&path).unwrap(), sample());
        let missing = dir.path().join("missing.csv");
        let err = read_csv(&missing).unwrap_err().to_string();
        assert!(err.contains("missing.csv"), "{err}");
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }
}
