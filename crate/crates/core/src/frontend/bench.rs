use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::dispatch::dispatch;
use super::{random_spec, CoeffClass, Engine, ProblemKind, ProblemSpec};
use crate::counter::{CounterSnapshot, OpCounter};
use crate::error::{Error, Result};
use crate::field::{Field, FieldDescriptor, PrimeField, Rationals};
use crate::series::Ring;

pub const CSV_HEADER: [&str; 7] = ["engine", "problem", "r", "N", "seconds", "field_muls", "mat_muls"];

/// One grid point: a random instance of the given shape solved by `engine`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchPoint {
    pub problem: ProblemKind,
    pub engine: Engine,
    pub r: usize,
    pub n: usize,
    pub coeffs: CoeffClass,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub engine: String,
    pub problem: String,
    pub r: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Median wall time; NaN when the solve failed.
    pub seconds: f64,
    pub counters: CounterSnapshot,
    pub error: Option<String>,
}

/// Grid lines `problem engine r N [coeffs]`, separated by blanks or commas.
pub fn parse_grid(text: &str) -> Result<Vec<BenchPoint>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if fields.is_empty() {
            continue;
        }
        let at = |e: Error| match e {
            Error::Parse { message, .. } => Error::parse(idx + 1, 1, message),
            other => other,
        };
        if fields.len() != 4 && fields.len() != 5 {
            return Err(Error::parse(idx + 1, 1, "expected `problem engine r N [coeffs]`"));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::parse(idx + 1, 1, format!("`{s}` is not a positive integer")))
        };
        out.push(BenchPoint {
            problem: fields[0].parse().map_err(at)?,
            engine: fields[1].parse().map_err(at)?,
            r: num(fields[2])?,
            n: num(fields[3])?,
            coeffs: fields.get(4).map_or(Ok(CoeffClass::Series), |c| c.parse()).map_err(at)?,
        });
    }
    Ok(out)
}

fn run_point<F: Field>(field: &F, spec: &ProblemSpec, engine: Engine, reps: usize) -> Result<(Engine, f64, CounterSnapshot)> {
    let mut times = Vec::with_capacity(reps);
    let mut last = (engine, CounterSnapshot::default());
    for _ in 0..reps.max(1) {
        let counter = Arc::new(OpCounter::new());
        let ring = Ring::with_counter(field.clone(), counter.clone());
        let start = Instant::now();
        let (used, _) = dispatch(&ring, spec, engine)?;
        times.push(start.elapsed().as_secs_f64());
        last = (used, counter.snapshot());
    }
    times.sort_by(f64::total_cmp);
    Ok((last.0, times[times.len() / 2], last.1))
}

/// Median-of-`reps` timings of every grid point on instances drawn with
/// `seed`. Failures become rows with NaN seconds.
pub fn bench(points: &[BenchPoint], reps: usize, field: FieldDescriptor, seed: u64) -> Vec<BenchRecord> {
    points
        .iter()
        .map(|pt| {
            let outcome = random_spec(pt.problem, pt.coeffs, field, pt.r, pt.n, seed).and_then(|spec| match field {
                FieldDescriptor::Prime(p) => run_point(&PrimeField::new(p)?, &spec, pt.engine, reps),
                FieldDescriptor::Rationals => run_point(&Rationals, &spec, pt.engine, reps),
            });
            let base = BenchRecord {
                engine: pt.engine.to_string(),
                problem: pt.problem.to_string(),
                r: pt.r,
                n: pt.n,
                seconds: f64::NAN,
                counters: CounterSnapshot::default(),
                error: None,
            };
            match outcome {
                Ok((used, seconds, counters)) => BenchRecord {
                    engine: used.to_string(),
                    seconds,
                    counters,
                    ..base
                },
                Err(e) => {
                    log::warn!("{} {} r={} N={}: {e}", pt.problem, pt.engine, pt.r, pt.n);
                    BenchRecord {
                        error: Some(e.to_string()),
                        ..base
                    }
                }
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for rec in records {
        w.write_record([
            rec.engine.clone(),
            rec.problem.clone(),
            rec.r.to_string(),
            rec.n.to_string(),
            format!("{:.6}", rec.seconds),
            rec.counters.field_muls.to_string(),
            rec.counters.mat_muls.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid_writes_header() {
        let mut out = Vec::new();
        write_csv(&bench(&[], 3, FieldDescriptor::Rationals, 1), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "engine,problem,r,N,seconds,field_muls,mat_muls\n");
    }

    #[test]
    fn grid_rows() {
        let grid = parse_grid("# comment\nII dac 2 32\nI, newton, 2, 16\nii const 2 16 constant\nII const 2 16\n").unwrap();
        assert_eq!(grid.len(), 4);
        assert!(parse_grid("II dac 2").is_err());
        assert!(matches!(parse_grid("II fast 2 8"), Err(Error::Parse { line: 1, .. })));
        let recs = bench(&grid, 2, FieldDescriptor::Prime(2_013_265_921), 5);
        assert!(recs[..3].iter().all(|r| r.seconds >= 0.0 && r.error.is_none()));
        assert!(recs[1].counters.mat_muls > 0);
        // const engine on series coefficients
        assert!(recs[3].seconds.is_nan() && recs[3].error.is_some());
        let mut out = Vec::new();
        write_csv(&recs, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(4).unwrap().starts_with("const,II,2,16,NaN,0,0"));
    }
}
