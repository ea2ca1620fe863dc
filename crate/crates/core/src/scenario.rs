//! Scenario files: flat `key = value` text with `#` comments.
//!
//! ```text
//! # geometry
//! l = 30
//! l0 = 11
//! r = 1
//! l1 = 17
//! h_s = 15
//! h_0 = 10
//! zeta_w = -7.5
//! period = 1.5
//! dx = 0.02
//! t_end = 5
//! mode = compare_step
//! gauges = -10, 0, 10
//! snapshot_times = 1.7, 3.3, 5
//! ```

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{OwcError, Result};
use crate::model::{build_grid, PhysicalConfig, TimeControls};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Owc,
    ClassicalNsw,
    CompareStep,
    AccuracyCheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Owc => "owc",
            Mode::ClassicalNsw => "classical_nsw",
            Mode::CompareStep => "compare_step",
            Mode::AccuracyCheck => "accuracy_check",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "owc" => Ok(Mode::Owc),
            "classical_nsw" => Ok(Mode::ClassicalNsw),
            "compare_step" => Ok(Mode::CompareStep),
            "accuracy_check" => Ok(Mode::AccuracyCheck),
            other => Err(format!(
                "unknown mode '{other}' (expected owc, classical_nsw, compare_step or accuracy_check)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub physical: PhysicalConfig,
    pub dx: f64,
    pub cfl: f64,
    pub t_end: f64,
    /// Probe positions in `[-l, l1]`.
    pub gauges: Vec<f64>,
    /// Output times in `[0, t_end]`.
    pub snapshot_times: Vec<f64>,
    pub mode: Mode,
}

/// One sample of a gauge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeRecord {
    pub t: f64,
    pub x: f64,
    pub zeta: f64,
    pub q: f64,
}

const KEYS: [&str; 17] = [
    "g",
    "rho",
    "l",
    "l0",
    "r",
    "l1",
    "h_s",
    "h_0",
    "zeta_w",
    "amplitude",
    "period",
    "dx",
    "cfl",
    "t_end",
    "mode",
    "gauges",
    "snapshot_times",
];

impl Scenario {
    /// The reference OWC set-up at `dx = 0.02` over 5 s.
    pub fn reference() -> Self {
        Scenario {
            physical: PhysicalConfig::reference(),
            dx: 0.02,
            cfl: 0.7,
            t_end: 5.0,
            gauges: vec![-10.0, 0.0, 10.0, 14.0],
            snapshot_times: vec![1.7, 3.3, 5.0],
            mode: Mode::Owc,
        }
    }

    /// Checks every invariant, including that the segments fit the mesh.
    pub fn validate(&self) -> Result<()> {
        self.physical.validate()?;
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(OwcError::Config(format!("dx must be positive (got {})", self.dx)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(OwcError::Config(format!("t_end must be positive (got {})", self.t_end)));
        }
        let grid = build_grid(&self.physical, self.dx)?;
        TimeControls::new(self.cfl, self.t_end, &self.physical, &grid)?;
        let (lo, hi) = (-self.physical.l, self.physical.l1);
        if let Some(x) = self.gauges.iter().find(|x| !(lo..=hi).contains(*x)) {
            return Err(OwcError::Config(format!("gauge {x} lies outside [{lo}, {hi}]")));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(0.0..=self.t_end).contains(*t)) {
            return Err(OwcError::Config(format!(
                "snapshot time {t} lies outside [0, {}]",
                self.t_end
            )));
        }
        if self.mode == Mode::CompareStep && self.physical.step_height() <= 0.0 {
            return Err(OwcError::Config(
                "compare_step needs two distinct step heights: h_s must exceed h_0".into(),
            ));
        }
        Ok(())
    }
}

fn parse_number(key: &str, value: &str, line: usize) -> Result<f64> {
    let v: f64 = value.parse().map_err(|_| OwcError::Parse {
        line,
        message: format!("'{value}' is not a number for key '{key}'"),
    })?;
    if !v.is_finite() {
        return Err(OwcError::Parse { line, message: format!("'{key}' must be finite") });
    }
    Ok(v)
}

fn parse_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|item| parse_number(key, item.trim(), line)).collect()
}

/// Parse and validate scenario text.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut numbers: Vec<(&str, f64)> = Vec::new();
    let mut mode = Mode::Owc;
    let mut gauges = Vec::new();
    let mut snapshot_times = Vec::new();
    let mut seen: Vec<&str> = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| OwcError::Parse {
            line,
            message: format!("expected key = value, found '{content}'"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let key = *KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| OwcError::Parse { line, message: format!("unknown key '{key}'") })?;
        if seen.contains(&key) {
            return Err(OwcError::Parse { line, message: format!("duplicate key '{key}'") });
        }
        seen.push(key);
        match key {
            "mode" => mode = value.parse().map_err(|message| OwcError::Parse { line, message })?,
            "gauges" => gauges = parse_list(key, value, line)?,
            "snapshot_times" => snapshot_times = parse_list(key, value, line)?,
            _ => numbers.push((key, parse_number(key, value, line)?)),
        }
    }

    let get = |key: &str, default: Option<f64>| -> Result<f64> {
        numbers
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .or(default)
            .ok_or_else(|| OwcError::Config(format!("missing key '{key}'")))
    };
    let scenario = Scenario {
        physical: PhysicalConfig {
            g: get("g", Some(9.81))?,
            rho: get("rho", Some(1000.0))?,
            l: get("l", None)?,
            l0: get("l0", None)?,
            r: get("r", None)?,
            l1: get("l1", None)?,
            h_s: get("h_s", None)?,
            h_0: get("h_0", None)?,
            zeta_w: get("zeta_w", None)?,
            amplitude: get("amplitude", Some(1.0))?,
            period: get("period", None)?,
        },
        dx: get("dx", None)?,
        cfl: get("cfl", Some(0.7))?,
        t_end: get("t_end", None)?,
        gauges,
        snapshot_times,
        mode,
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario(&fs::read_to_string(path)?)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// Scenario text that parses back to exactly `scenario`.
pub fn format_scenario(scenario: &Scenario) -> String {
    let p = &scenario.physical;
    let mut out = String::new();
    let numbers = [
        ("g", p.g),
        ("rho", p.rho),
        ("l", p.l),
        ("l0", p.l0),
        ("r", p.r),
        ("l1", p.l1),
        ("h_s", p.h_s),
        ("h_0", p.h_0),
        ("zeta_w", p.zeta_w),
        ("amplitude", p.amplitude),
        ("period", p.period),
        ("dx", scenario.dx),
        ("cfl", scenario.cfl),
        ("t_end", scenario.t_end),
    ];
    for (key, value) in numbers {
        // f64 Display is the shortest text that reads back to the same bits
        let _ = writeln!(out, "{key} = {value}");
    }
    let _ = writeln!(out, "mode = {}", scenario.mode);
    let _ = writeln!(out, "gauges = {}", join(&scenario.gauges));
    let _ = writeln!(out, "snapshot_times = {}", join(&scenario.snapshot_times));
    out
}

pub fn write_scenario(scenario: &Scenario, path: &Path) -> Result<()> {
    fs::write(path, format_scenario(scenario))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = "l = 30\nl0 = 11\nr = 1\nl1 = 17\nh_s = 15\nh_0 = 10\nzeta_w = -7.5\nperiod = 1.5\ndx = 0.02\nt_end = 5\n";

    #[test]
    fn defaults_fill_in() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.physical, PhysicalConfig::reference());
        assert_eq!(s.cfl, 0.7);
        assert_eq!(s.mode, Mode::Owc);
        assert!(s.gauges.is_empty() && s.snapshot_times.is_empty());
    }

    #[test]
    fn comments_and_lists() {
        let text = format!("# header\n{MINIMAL}gauges = -10, 0 ,10 # probes\nsnapshot_times=1.7,3.3,5\nmode = compare_step\n");
        let s = parse_scenario(&text).unwrap();
        assert_eq!(s.gauges, vec![-10.0, 0.0, 10.0]);
        assert_eq!(s.snapshot_times, vec![1.7, 3.3, 5.0]);
        assert_eq!(s.mode, Mode::CompareStep);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_scenario(&format!("{MINIMAL}\nspeed = 3\n")).unwrap_err();
        assert!(matches!(err, OwcError::Parse { line: 12, .. }), "{err}");
        let err = parse_scenario(&format!("dx = 0.0x\n{MINIMAL}")).unwrap_err();
        assert!(matches!(err, OwcError::Parse { line: 1, .. }), "{err}");
        let err = parse_scenario(&format!("{MINIMAL}dx = 0.01\n")).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
        let err = parse_scenario(&format!("{MINIMAL}mode = fast\n")).unwrap_err();
        assert!(err.to_string().contains("unknown mode"), "{err}");
    }

    #[test]
    fn invariants_are_enforced() {
        let err = parse_scenario(&MINIMAL.replace("l0 = 11", "l0 = 17")).unwrap_err();
        assert!(err.to_string().contains("l1>l0>r"), "{err}");
        assert!(parse_scenario(&format!("{MINIMAL}gauges = 18\n")).is_err());
        assert!(parse_scenario(&format!("{MINIMAL}snapshot_times = 6\n")).is_err());
        assert!(parse_scenario(&MINIMAL.replace("dx = 0.02", "dx = 0.03")).is_err());
        assert!(parse_scenario(&MINIMAL.replace("h_0 = 10", "h_0 = 15")).is_ok());
        assert!(parse_scenario(&format!("{}mode = compare_step\n", MINIMAL.replace("h_0 = 10", "h_0 = 15"))).is_err());
        assert!(matches!(
            parse_scenario(&MINIMAL.replace("dx = 0.02\n", "")).unwrap_err(),
            OwcError::Config(_)
        ));
    }

    #[test]
    fn reference_round_trips() {
        let s = Scenario::reference();
        assert_eq!(parse_scenario(&format_scenario(&s)).unwrap(), s);
    }

    fn any_mode() -> impl Strategy<Value = Mode> {
        prop_oneof![
            Just(Mode::Owc),
            Just(Mode::ClassicalNsw),
            Just(Mode::CompareStep),
            Just(Mode::AccuracyCheck)
        ]
    }

    proptest! {
        #[test]
        fn write_then_load_is_identity(
            g in 1.0..20.0f64,
            rho in 500.0..2000.0f64,
            cells in (50usize..2000, 10usize..500, 2usize..50, 5usize..200),
            dx in 0.001..0.1f64,
            h_0 in 1.0..20.0f64,
            step in 0.0..10.0f64,
            immersion in 0.01..0.99f64,
            amplitude in 0.0..2.0f64,
            period in 0.1..10.0f64,
            cfl in 0.05..0.99f64,
            t_end in 0.01..20.0f64,
            gauge_fracs in proptest::collection::vec(0.0..1.0f64, 0..5),
            snap_fracs in proptest::collection::vec(0.0..1.0f64, 0..5),
            mode in any_mode(),
        ) {
            let (c1, c2, c3, c4) = cells;
            let r = c3 as f64 * dx / 2.0;
            let l0 = c2 as f64 * dx + r;
            let physical = PhysicalConfig {
                g, rho,
                l: c1 as f64 * dx,
                l0, r,
                l1: l0 + r + c4 as f64 * dx,
                h_s: h_0 + step + if mode == Mode::CompareStep { 0.5 } else { 0.0 },
                h_0,
                zeta_w: -immersion * h_0,
                amplitude, period,
            };
            let gauges = gauge_fracs.iter().map(|f| -physical.l + f * (physical.l + physical.l1)).collect();
            let snapshot_times = snap_fracs.iter().map(|f| f * t_end).collect();
            let s = Scenario { physical, dx, cfl, t_end, gauges, snapshot_times, mode };
            prop_assume!(s.validate().is_ok());
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("s.txt");
            write_scenario(&s, &path).unwrap();
            prop_assert_eq!(load_scenario(&path).unwrap(), s);
        }
    }
}
