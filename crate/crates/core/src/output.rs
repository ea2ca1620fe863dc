//! CSV writers for snapshots, gauges and reports.
//!
//! Every number is written in scientific notation with 17 significant
//! digits, so files read back bit-exactly and identical runs give identical
//! bytes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{EnergyReport, PowerReport};
use crate::error::{OwcError, Result};
use crate::model::{Grid, State};
use crate::physics::Cons;
use crate::scenario::GaugeRecord;

/// Full-precision text for one value.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Buffered CSV file that writes its header on creation.
pub struct CsvWriter {
    inner: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> Result<Self> {
        let mut inner = BufWriter::new(File::create(path)?);
        writeln!(inner, "{header}")?;
        Ok(CsvWriter { inner })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.inner, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// One row of a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRow {
    pub x: f64,
    pub zeta: f64,
    pub q: f64,
    pub segment: String,
}

pub const SNAPSHOT_HEADER: &str = "x,zeta,q,segment";

/// Writes one row per grid node, ordered by `x`; nodes under the structure
/// carry `zeta_w` and `q_i`.
pub fn write_snapshot(state: &State, grid: &Grid, path: &Path) -> Result<()> {
    let mut w = CsvWriter::create(path, SNAPSHOT_HEADER)?;
    for i in 0..grid.node_count() {
        let (zeta, q, segment) = state.node(grid, i);
        w.row(&[num(grid.x[i]), num(zeta), num(q), segment.label().to_string()])?;
    }
    w.finish()
}

pub fn read_snapshot(path: &Path) -> Result<Vec<SnapshotRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, SNAPSHOT_HEADER)) => {}
        _ => {
            return Err(OwcError::Parse { line: 1, message: format!("expected header '{SNAPSHOT_HEADER}'") })
        }
    }
    lines
        .map(|(index, line)| {
            let line_no = index + 1;
            let bad = |message: String| OwcError::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", fields.len())));
            }
            let value = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("'{s}' is not a number")));
            Ok(SnapshotRow {
                x: value(fields[0])?,
                zeta: value(fields[1])?,
                q: value(fields[2])?,
                segment: fields[3].to_string(),
            })
        })
        .collect()
}

/// Profile of a single-domain state (no segment column).
pub fn write_profile(x: &[f64], u: &[Cons], path: &Path) -> Result<()> {
    let mut w = CsvWriter::create(path, "x,zeta,q")?;
    for (x, u) in x.iter().zip(u) {
        w.row(&[num(*x), num(u.zeta), num(u.q)])?;
    }
    w.finish()
}

pub const GAUGE_HEADER: &str = "t,x,zeta,q";

pub fn gauge_row(record: &GaugeRecord) -> Vec<String> {
    vec![num(record.t), num(record.x), num(record.zeta), num(record.q)]
}

pub const ENERGY_HEADER: &str =
    "t,e_fluid,e_int,f_entry,f_step_left,f_step_right,balance,q_i,f_int_jump";

pub fn energy_row(t: f64, q_i: f64, report: &EnergyReport) -> Vec<String> {
    vec![
        num(t),
        num(report.e_fluid),
        num(report.e_int),
        num(report.f_entry),
        num(report.f_step_left),
        num(report.f_step_right),
        num(report.boundary_balance()),
        num(q_i),
        num(report.f_int_jump),
    ]
}

pub fn write_power(report: &PowerReport, path: &Path) -> Result<()> {
    let mut w = CsvWriter::create(path, "omega,k,c_g,c_g_shallow,e_inc,p_inc,width,p_reg,efficiency")?;
    w.row(&[
        num(report.omega),
        num(report.k),
        num(report.c_g),
        num(report.c_g_shallow),
        num(report.e_inc),
        num(report.p_inc),
        num(report.width),
        opt(report.p_reg),
        opt(report.efficiency),
    ])?;
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, initial_state, PhysicalConfig};

    #[test]
    fn rest_snapshot() {
        let cfg = PhysicalConfig::reference();
        let grid = build_grid(&cfg, 0.02).unwrap();
        let state = initial_state(&cfg, &grid);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.csv");
        write_snapshot(&state, &grid, &path).unwrap();
        let rows = read_snapshot(&path).unwrap();
        assert_eq!(rows.len(), grid.n1 + grid.n2 + grid.n3 + grid.n4 + 1);
        assert!(rows.windows(2).all(|w| w[0].x < w[1].x));
        for row in &rows {
            if row.segment == "I" {
                assert_eq!((row.zeta, row.q), (cfg.zeta_w, 0.0));
            } else {
                assert_eq!((row.zeta, row.q), (0.0, 0.0));
            }
        }
        for label in ["E0", "E1", "I", "E2"] {
            assert!(rows.iter().any(|r| r.segment == label));
        }
    }

    #[test]
    fn snapshot_round_trip_is_exact() {
        let cfg = PhysicalConfig::reference();
        let grid = build_grid(&cfg, 0.1).unwrap();
        let mut state = initial_state(&cfg, &grid);
        for (k, u) in state.e0.iter_mut().enumerate() {
            u.zeta = (k as f64 * 0.37).sin() / 3.0;
            u.q = 1.0 / (k as f64 + 0.7);
        }
        state.q_i = -std::f64::consts::PI * 1e-7;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.csv");
        write_snapshot(&state, &grid, &path).unwrap();
        let rows = read_snapshot(&path).unwrap();
        for (i, row) in rows.iter().enumerate() {
            let (zeta, q, segment) = state.node(&grid, i);
            assert_eq!(row.x.to_bits(), grid.x[i].to_bits());
            assert_eq!(row.zeta.to_bits(), zeta.to_bits());
            assert_eq!(row.q.to_bits(), q.to_bits());
            assert_eq!(row.segment, segment.label());
        }
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, -0.0, 1.0 / 3.0, 1e-300, -2.5e300, 0.1 + 0.2, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn bad_snapshot_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "x,zeta,q,segment\n1,2,three,E0\n").unwrap();
        assert!(matches!(read_snapshot(&path).unwrap_err(), OwcError::Parse { line: 2, .. }));
    }
}
