//! Experiment drivers behind the command line.
//!
//! Every driver streams its time series to disk while the simulation runs.
//! When a step fails, files written so far are flushed before the error is
//! returned.

use std::fs;
use std::path::{Path, PathBuf};

use crate::diagnostics::{energy_audit, incident_power};
use crate::error::{OwcError, Result};
use crate::model::{build_grid, PhysicalConfig, Segment, TimeControls};
use crate::output::{
    energy_row, gauge_row, num, write_power, write_profile, write_snapshot, CsvWriter, ENERGY_HEADER,
    GAUGE_HEADER,
};
use crate::reference::ClassicalRun;
use crate::scenario::{GaugeRecord, Mode, Scenario};
use crate::stepper::Simulation;

/// Fraction of the forcing amplitude a gauge must exceed to register a crest.
pub const CREST_FRACTION: f64 = 0.5;

/// Fraction of the forcing amplitude at which the incident wave counts as
/// having reached the structure in the accuracy comparison.
pub const CONTACT_FRACTION: f64 = 1e-6;

/// First crest arrival at one gauge for one step height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub step_height: f64,
    pub x: f64,
    pub t: Option<f64>,
}

/// Headline numbers of an accuracy comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySummary {
    /// Last time before the incident wave reaches the structure.
    pub window_end: f64,
    /// Largest `|zeta_owc - zeta_classical|` on `[-l, l0 - r]` within the window.
    pub max_diff_window: f64,
    /// Same maximum over the whole run and every exterior node.
    pub max_diff_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub mode: Mode,
    pub dt: f64,
    pub steps: u64,
    pub files: Vec<PathBuf>,
    pub arrivals: Vec<Arrival>,
    pub accuracy: Option<AccuracySummary>,
}

/// Run the scenario's mode, writing all outputs into `out`.
pub fn run(scenario: &Scenario, out: &Path) -> Result<RunSummary> {
    scenario.validate()?;
    fs::create_dir_all(out)?;
    match scenario.mode {
        Mode::Owc => run_owc(scenario, out),
        Mode::ClassicalNsw => run_classical(scenario, out),
        Mode::AccuracyCheck => run_accuracy_check(scenario, out),
        Mode::CompareStep => {
            run_compare(scenario, [0.0, scenario.physical.step_height()], CREST_FRACTION, out)
        }
    }
}

/// Steps at which the requested snapshot times are written.
fn snapshot_steps(times: &[f64], dt: f64, steps: u64) -> Vec<(f64, u64)> {
    times.iter().map(|&t| (t, ((t / dt).round() as u64).min(steps))).collect()
}

struct VariantFiles {
    gauges: String,
    energy: String,
    snapshot: Box<dyn Fn(f64) -> String>,
}

struct VariantResult {
    dt: f64,
    steps: u64,
    arrivals: Vec<(f64, Option<f64>)>,
}

/// One OWC simulation with gauges, energy series and snapshots.
fn simulate(
    config: PhysicalConfig,
    scenario: &Scenario,
    names: &VariantFiles,
    crest_fraction: f64,
    out: &Path,
    files: &mut Vec<PathBuf>,
) -> Result<VariantResult> {
    let mut sim = Simulation::new(config, scenario.dx, scenario.cfl, scenario.t_end)?;
    let (dt, steps) = (sim.controls.dt, sim.controls.steps());
    let probes: Vec<(f64, usize)> = scenario.gauges.iter().map(|&x| (x, sim.grid.nearest_node(x))).collect();
    let snapshots = snapshot_steps(&scenario.snapshot_times, dt, steps);
    let threshold = crest_fraction * sim.config.amplitude;
    let mut arrivals: Vec<Option<f64>> = vec![None; probes.len()];

    let gauge_path = out.join(&names.gauges);
    let energy_path = out.join(&names.energy);
    let mut gauges = CsvWriter::create(&gauge_path, GAUGE_HEADER)?;
    let mut energy = CsvWriter::create(&energy_path, ENERGY_HEADER)?;
    files.extend([gauge_path, energy_path]);

    let outcome = sim.run(|s| {
        let state = &s.state;
        for (k, &(x, node)) in probes.iter().enumerate() {
            let (zeta, q, _) = state.node(&s.grid, node);
            gauges.row(&gauge_row(&GaugeRecord { t: state.t, x, zeta, q }))?;
            if arrivals[k].is_none() && zeta > threshold {
                arrivals[k] = Some(state.t);
            }
        }
        energy.row(&energy_row(state.t, state.q_i, &energy_audit(state, &s.config, &s.grid)?))?;
        for &(t, step) in &snapshots {
            if step == state.step {
                let path = out.join((names.snapshot)(t));
                write_snapshot(state, &s.grid, &path)?;
                files.push(path);
            }
        }
        Ok(())
    });
    let flushed = gauges.finish().and(energy.finish());
    outcome?;
    flushed?;
    Ok(VariantResult {
        dt,
        steps,
        arrivals: probes.iter().map(|p| p.0).zip(arrivals).collect(),
    })
}

fn run_owc(scenario: &Scenario, out: &Path) -> Result<RunSummary> {
    let mut files = Vec::new();
    let power_path = out.join("power.csv");
    write_power(&incident_power(&scenario.physical, 1.0)?, &power_path)?;
    files.push(power_path);
    let names = VariantFiles {
        gauges: "gauges.csv".into(),
        energy: "energy.csv".into(),
        snapshot: Box::new(|t| format!("snapshot_t{t:.3}.csv")),
    };
    let result = simulate(scenario.physical.clone(), scenario, &names, CREST_FRACTION, out, &mut files)?;
    Ok(RunSummary {
        mode: Mode::Owc,
        dt: result.dt,
        steps: result.steps,
        files,
        arrivals: Vec::new(),
        accuracy: None,
    })
}

/// Run the step comparison for two step heights `s` (so `h_0 = h_s - s`).
pub fn run_compare(scenario: &Scenario, heights: [f64; 2], crest_fraction: f64, out: &Path) -> Result<RunSummary> {
    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let mut arrivals = Vec::new();
    let mut timing = (0.0, 0);
    for s in heights {
        let config = scenario.physical.with_step_height(s);
        config.validate().map_err(|e| OwcError::Config(format!("step height {s}: {e}")))?;
        let names = VariantFiles {
            gauges: format!("gauges_s{s}.csv"),
            energy: format!("energy_s{s}.csv"),
            snapshot: Box::new(move |t| format!("snapshot_s{s}_t{t:.3}.csv")),
        };
        let result = simulate(config, scenario, &names, crest_fraction, out, &mut files)?;
        timing = (result.dt, result.steps);
        arrivals.extend(result.arrivals.into_iter().map(|(x, t)| Arrival { step_height: s, x, t }));
    }
    let path = out.join("arrivals.csv");
    let mut w = CsvWriter::create(&path, "step_height,x,arrival_t")?;
    for a in &arrivals {
        w.row(&[num(a.step_height), num(a.x), a.t.map(num).unwrap_or_default()])?;
    }
    w.finish()?;
    files.push(path);
    Ok(RunSummary {
        mode: Mode::CompareStep,
        dt: timing.0,
        steps: timing.1,
        files,
        arrivals,
        accuracy: None,
    })
}

fn classical_controls(scenario: &Scenario, config: &PhysicalConfig) -> Result<TimeControls> {
    let grid = build_grid(config, scenario.dx)?;
    TimeControls::new(scenario.cfl, scenario.t_end, config, &grid)
}

fn run_classical(scenario: &Scenario, out: &Path) -> Result<RunSummary> {
    let config = &scenario.physical;
    let controls = classical_controls(scenario, config)?;
    let mut run = ClassicalRun::new(config, scenario.dx, scenario.cfl)?;
    let steps = controls.steps();
    let probes: Vec<(f64, usize)> = scenario
        .gauges
        .iter()
        .map(|&x| (x, ((x + config.l) / scenario.dx).round() as usize))
        .collect();
    let snapshots = snapshot_steps(&scenario.snapshot_times, run.dt, steps);
    let mut files = Vec::new();
    let gauge_path = out.join("gauges.csv");
    let mut gauges = CsvWriter::create(&gauge_path, GAUGE_HEADER)?;
    files.push(gauge_path);

    let mut observe = |run: &ClassicalRun, files: &mut Vec<PathBuf>| -> Result<()> {
        for &(x, node) in &probes {
            let u = run.u[node.min(run.u.len() - 1)];
            gauges.row(&gauge_row(&GaugeRecord { t: run.time(), x, zeta: u.zeta, q: u.q }))?;
        }
        for &(t, step) in &snapshots {
            if step == run.step {
                let path = out.join(format!("classical_t{t:.3}.csv"));
                write_profile(&run.x, &run.u, &path)?;
                files.push(path);
            }
        }
        Ok(())
    };
    let mut outcome = observe(&run, &mut files);
    while outcome.is_ok() && run.step < steps {
        outcome = run.step().map_err(|e| e.at(run.time(), "classical run")).and_then(|_| observe(&run, &mut files));
    }
    let flushed = gauges.finish();
    outcome?;
    flushed?;
    Ok(RunSummary {
        mode: Mode::ClassicalNsw,
        dt: run.dt,
        steps,
        files,
        arrivals: Vec::new(),
        accuracy: None,
    })
}

fn run_accuracy_check(scenario: &Scenario, out: &Path) -> Result<RunSummary> {
    let config = scenario.physical.with_step_height(0.0);
    config.validate()?;
    let mut sim = Simulation::new(config.clone(), scenario.dx, scenario.cfl, scenario.t_end)?;
    let mut reference = ClassicalRun::new(&config, scenario.dx, scenario.cfl)?;
    let (dt, steps) = (sim.controls.dt, sim.controls.steps());
    let grid = sim.grid.clone();
    let contact_node = grid.i_wall_left;
    let contact = CONTACT_FRACTION * config.amplitude.abs();
    let snapshots = snapshot_steps(&scenario.snapshot_times, dt, steps);

    let mut files = Vec::new();
    let series_path = out.join("accuracy.csv");
    let mut series = CsvWriter::create(&series_path, "t,max_diff_front,max_diff_exterior,in_window")?;
    files.push(series_path);

    let mut summary = AccuracySummary { window_end: 0.0, max_diff_window: 0.0, max_diff_total: 0.0 };
    let mut in_window = true;
    let mut step_pair = |sim: &Simulation, reference: &ClassicalRun, files: &mut Vec<PathBuf>| -> Result<()> {
        let state = &sim.state;
        let mut front = 0.0f64;
        let mut exterior = 0.0f64;
        let mut profile = Vec::new();
        for i in 0..grid.node_count() {
            let (zeta, _, segment) = state.node(&grid, i);
            if segment == Segment::Interior {
                continue;
            }
            let diff = (zeta - reference.u[i].zeta).abs();
            exterior = exterior.max(diff);
            if i <= contact_node {
                front = front.max(diff);
            }
            profile.push((grid.x[i], zeta, reference.u[i].zeta, diff));
        }
        if in_window && reference.u[contact_node].zeta.abs() > contact {
            in_window = false;
        }
        if in_window {
            summary.window_end = state.t;
            summary.max_diff_window = summary.max_diff_window.max(front);
        }
        summary.max_diff_total = summary.max_diff_total.max(exterior);
        series.row(&[num(state.t), num(front), num(exterior), (in_window as u8).to_string()])?;
        for &(t, step) in &snapshots {
            if step == state.step {
                let path = out.join(format!("diff_t{t:.3}.csv"));
                let mut w = CsvWriter::create(&path, "x,zeta_owc,zeta_classical,abs_diff")?;
                for &(x, a, b, d) in &profile {
                    w.row(&[num(x), num(a), num(b), num(d)])?;
                }
                w.finish()?;
                files.push(path);
            }
        }
        Ok(())
    };

    let mut outcome = step_pair(&sim, &reference, &mut files);
    while outcome.is_ok() && sim.state.step < steps {
        outcome = sim
            .step()
            .and_then(|_| reference.step().map_err(|e| e.at(reference.time(), "classical run")))
            .and_then(|_| step_pair(&sim, &reference, &mut files));
    }
    let flushed = series.finish();
    outcome?;
    flushed?;

    let path = out.join("accuracy_summary.csv");
    let mut w = CsvWriter::create(&path, "dx,dt,window_end,max_diff_window,max_diff_total")?;
    w.row(&[
        num(scenario.dx),
        num(dt),
        num(summary.window_end),
        num(summary.max_diff_window),
        num(summary.max_diff_total),
    ])?;
    w.finish()?;
    files.push(path);
    Ok(RunSummary {
        mode: Mode::AccuracyCheck,
        dt,
        steps,
        files,
        arrivals: Vec::new(),
        accuracy: Some(summary),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: Mode) -> Scenario {
        Scenario {
            physical: PhysicalConfig::reference(),
            dx: 0.25,
            cfl: 0.7,
            t_end: 0.5,
            gauges: vec![-29.0, 0.0, 11.0],
            snapshot_times: vec![0.0, 0.25],
            mode,
        }
    }

    #[test]
    fn owc_mode_writes_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&small(Mode::Owc), dir.path()).unwrap();
        let names: Vec<String> = summary
            .files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        for expected in ["power.csv", "gauges.csv", "energy.csv", "snapshot_t0.000.csv", "snapshot_t0.250.csv"] {
            assert!(names.iter().any(|n| n == expected), "{expected} missing from {names:?}");
        }
        let gauges = fs::read_to_string(dir.path().join("gauges.csv")).unwrap();
        assert_eq!(gauges.lines().count(), 1 + 3 * (summary.steps as usize + 1));
    }

    #[test]
    fn snapshot_steps_round_and_clamp() {
        assert_eq!(snapshot_steps(&[0.0, 0.26, 9.0], 0.1, 50), vec![(0.0, 0), (0.26, 3), (9.0, 50)]);
    }

    #[test]
    fn abort_flushes_partial_series() {
        let mut scenario = small(Mode::Owc);
        // a huge wave dries the entry within a few steps
        scenario.physical.amplitude = 40.0;
        scenario.t_end = 2.0;
        let dir = tempfile::tempdir().unwrap();
        let err = run(&scenario, dir.path()).unwrap_err();
        assert!(err.is_numerical(), "{err}");
        let gauges = fs::read_to_string(dir.path().join("gauges.csv")).unwrap();
        assert!(gauges.lines().count() > 1);
        assert!(gauges.ends_with('\n'));
    }

    #[test]
    fn classical_and_accuracy_modes_run() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&small(Mode::ClassicalNsw), dir.path()).unwrap();
        assert!(dir.path().join("classical_t0.250.csv").exists());
        assert_eq!(summary.steps, TimeControls::new(0.7, 0.5, &PhysicalConfig::reference(), &build_grid(&PhysicalConfig::reference(), 0.25).unwrap()).unwrap().steps());
        let summary = run(&small(Mode::AccuracyCheck), dir.path()).unwrap();
        let acc = summary.accuracy.unwrap();
        assert_eq!(acc.window_end, summary.steps as f64 * summary.dt);
        assert!(acc.max_diff_window < 1e-12);
        assert!(dir.path().join("diff_t0.250.csv").exists());
    }

    #[test]
    fn compare_writes_arrivals_for_each_height() {
        let mut scenario = small(Mode::CompareStep);
        scenario.t_end = 1.0;
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&scenario, dir.path()).unwrap();
        assert_eq!(summary.arrivals.len(), 6);
        assert!(dir.path().join("snapshot_s0_t0.250.csv").exists());
        assert!(dir.path().join("snapshot_s5_t0.250.csv").exists());
        let near_entry: Vec<_> = summary.arrivals.iter().filter(|a| a.x == -29.0).collect();
        assert!(near_entry.iter().all(|a| a.t.is_some()));
        let text = fs::read_to_string(dir.path().join("arrivals.csv")).unwrap();
        assert_eq!(text.lines().count(), 7);
    }
}
