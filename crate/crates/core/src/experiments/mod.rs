//! Seeded experiments emitting CSV tables.
//!
//! Every row is a pure function of `(spec, seed, parameters, row index)`, so
//! rows are computed in parallel and any single row can be replayed. Columns
//! that summarise earlier rows (running minima, fitted slopes) are filled in a
//! serial pass afterwards and are excluded from single-row replay.

mod decay;
mod gap_scan;
mod orbit;
mod strict;

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;

pub use decay::{NonconvexDecay, DECAY_STEPS};
pub use gap_scan::GapScan;
pub use orbit::{cap, grid, Orbit, CAP_LEVEL, GRID_RADII};
pub use strict::{StrictLimit, DEFAULT_DISTS};

use crate::error::{Error, Result};

/// Floats are written with 17 significant digits so they round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub trait Experiment: Sync {
    fn id(&self) -> &'static str;
    fn spec_hash(&self) -> String;
    fn seed(&self) -> u64;
    /// Experiment-specific column names.
    fn columns(&self) -> Vec<String>;
    /// How many of the trailing columns are filled by [`Experiment::finish`].
    fn summary_columns(&self) -> usize {
        0
    }
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Independent cells of row `i` (without the summary columns).
    fn row(&self, i: usize) -> Result<Vec<String>>;
    /// Appends the summary cells to every row.
    fn finish(&self, _rows: &mut [Vec<String>]) -> Result<()> {
        Ok(())
    }
}

/// Leading columns shared by every experiment.
const COMMON: [&str; 4] = ["experiment", "spec_hash", "seed", "row"];

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Cells of a column parsed as floats (empty or unparsable cells are NaN).
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(c) = self.column(name) else { return Vec::new() };
        self.rows.iter().map(|r| r[c].parse().unwrap_or(f64::NAN)).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::InvalidBody(format!("csv: {e}"));
        out.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            out.write_record(r).map_err(io)?;
        }
        out.flush().map_err(|e| Error::InvalidBody(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 cells")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Table> {
        let mut rdr = csv::Reader::from_reader(r);
        let io = |e: csv::Error| Error::InvalidBody(format!("csv: {e}"));
        let header = rdr.headers().map_err(io)?.iter().map(String::from).collect();
        let rows = rdr
            .records()
            .map(|rec| rec.map(|r| r.iter().map(String::from).collect()).map_err(io))
            .collect::<Result<_>>()?;
        Ok(Table { header, rows })
    }
}

fn prefix(exp: &dyn Experiment, i: usize) -> Vec<String> {
    vec![exp.id().to_string(), exp.spec_hash(), exp.seed().to_string(), i.to_string()]
}

/// Runs every row in parallel and assembles the table in row order. With
/// `timing`, a trailing `runtime_ms` column is added (and the output is no
/// longer reproducible byte for byte).
pub fn run(exp: &dyn Experiment, timing: bool) -> Result<Table> {
    let computed: Vec<(Vec<String>, f64)> = (0..exp.len())
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let mut cells = prefix(exp, i);
            cells.extend(exp.row(i)?);
            Ok((cells, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<_>>()?;
    let (mut rows, times): (Vec<_>, Vec<_>) = computed.into_iter().unzip();
    exp.finish(&mut rows)?;
    let mut header: Vec<String> = COMMON.iter().map(|s| s.to_string()).collect();
    header.extend(exp.columns());
    if timing {
        header.push("runtime_ms".into());
        for (r, t) in rows.iter_mut().zip(times) {
            r.push(format!("{t:.3}"));
        }
    }
    Ok(Table { header, rows })
}

/// Outcome of replaying one row against a previously written table.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub row: usize,
    /// `(column, recorded, recomputed)` for every differing cell.
    pub mismatches: Vec<(String, String, String)>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recomputes row `i` and compares it with the recorded table cell by cell
/// (summary and timing columns are skipped).
pub fn verify(exp: &dyn Experiment, recorded: &Table, i: usize) -> Result<Verification> {
    let c_row = recorded.column("row").ok_or_else(|| Error::InvalidBody("table has no row column".into()))?;
    let stored = recorded
        .rows
        .iter()
        .find(|r| r.get(c_row).map(String::as_str) == Some(i.to_string().as_str()))
        .ok_or_else(|| Error::InvalidBody(format!("row {i} not in table")))?;
    let mut fresh = prefix(exp, i);
    fresh.extend(exp.row(i)?);
    let mut names: Vec<String> = COMMON.iter().map(|s| s.to_string()).collect();
    names.extend(exp.columns());
    let checked = names.len() - exp.summary_columns();
    let mut mismatches = Vec::new();
    for (k, name) in names.iter().enumerate().take(checked) {
        let Some(col) = recorded.column(name) else {
            mismatches.push((name.clone(), String::new(), fresh[k].clone()));
            continue;
        };
        if stored[col] != fresh[k] {
            mismatches.push((name.clone(), stored[col].clone(), fresh[k].clone()));
        }
    }
    Ok(Verification { row: i, mismatches })
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Squares;

    impl Experiment for Squares {
        fn id(&self) -> &'static str {
            "squares"
        }
        fn spec_hash(&self) -> String {
            "0".into()
        }
        fn seed(&self) -> u64 {
            1
        }
        fn columns(&self) -> Vec<String> {
            vec!["x".into(), "x2".into(), "total".into()]
        }
        fn summary_columns(&self) -> usize {
            1
        }
        fn len(&self) -> usize {
            5
        }
        fn row(&self, i: usize) -> Result<Vec<String>> {
            Ok(vec![fmt_f64(i as f64), fmt_f64((i * i) as f64)])
        }
        fn finish(&self, rows: &mut [Vec<String>]) -> Result<()> {
            let total: f64 = rows.iter().map(|r| r[5].parse::<f64>().unwrap()).sum();
            rows.iter_mut().for_each(|r| r.push(fmt_f64(total)));
            Ok(())
        }
    }

    #[test]
    fn run_verify_round_trip() {
        let t = run(&Squares, false).unwrap();
        assert_eq!(t.floats("total")[0], 30.0);
        let csv = t.to_csv_string();
        let back = Table::read_csv(csv.as_bytes()).unwrap();
        assert_eq!(back, t);
        assert!(verify(&Squares, &back, 3).unwrap().ok());
        let mut tampered = back.clone();
        tampered.rows[3][5] = "1".into();
        assert_eq!(verify(&Squares, &tampered, 3).unwrap().mismatches.len(), 1);
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, -7.25e12] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn slope_of_line() {
        assert!((fit_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }
}
