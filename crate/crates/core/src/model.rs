//! Problem definition, mesh, time controls and the evolving state.

use std::f64::consts::PI;

use crate::error::{OwcError, Result};
use crate::physics::Cons;

/// Geometry, bathymetry, fluid constants and forcing of an OWC configuration.
///
/// Lengths are in metres, `zeta_w` is the (negative) elevation of the wetted
/// surface of the structure.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig {
    pub g: f64,
    pub rho: f64,
    /// Entry at `x = -l`.
    pub l: f64,
    /// Centre of the structure.
    pub l0: f64,
    /// Half length of the structure.
    pub r: f64,
    /// End wall of the chamber.
    pub l1: f64,
    /// Rest depth before the step.
    pub h_s: f64,
    /// Rest depth after the step.
    pub h_0: f64,
    pub zeta_w: f64,
    pub amplitude: f64,
    pub period: f64,
}

impl PhysicalConfig {
    /// The stepped OWC used throughout the validation runs: 30 m of offshore
    /// channel, a 5 m step and a structure spanning `[10, 12]` with a 17 m
    /// chamber end.
    pub fn reference() -> Self {
        PhysicalConfig {
            g: 9.81,
            rho: 1000.0,
            l: 30.0,
            l0: 11.0,
            r: 1.0,
            l1: 17.0,
            h_s: 15.0,
            h_0: 10.0,
            zeta_w: -7.5,
            amplitude: 1.0,
            period: 1.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(OwcError::Config(msg));
        let all = [
            self.g,
            self.rho,
            self.l,
            self.l0,
            self.r,
            self.l1,
            self.h_s,
            self.h_0,
            self.zeta_w,
            self.amplitude,
            self.period,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return fail("all physical parameters must be finite".into());
        }
        if self.g <= 0.0 {
            return fail(format!("g must be positive, got {}", self.g));
        }
        if self.rho <= 0.0 {
            return fail(format!("rho must be positive, got {}", self.rho));
        }
        if self.l <= 0.0 {
            return fail(format!("l must be positive, got {}", self.l));
        }
        if !(self.l1 > self.l0 && self.l0 > self.r && self.r > 0.0) {
            return fail(format!(
                "geometry requires l1>l0>r>0, got l1={}, l0={}, r={}",
                self.l1, self.l0, self.r
            ));
        }
        if self.l1 <= self.l0 + self.r {
            return fail(format!(
                "chamber end l1={} must lie beyond the structure at l0+r={}",
                self.l1,
                self.l0 + self.r
            ));
        }
        if !(self.h_0 > 0.0 && self.h_s >= self.h_0) {
            return fail(format!(
                "depths require h_s >= h_0 > 0, got h_s={}, h_0={}",
                self.h_s, self.h_0
            ));
        }
        if self.wetted_depth() <= 0.0 {
            return fail(format!(
                "wetted depth h_0 + zeta_w = {} must be positive",
                self.wetted_depth()
            ));
        }
        if self.period <= 0.0 {
            return fail(format!("period must be positive, got {}", self.period));
        }
        Ok(())
    }

    pub fn step_height(&self) -> f64 {
        self.h_s - self.h_0
    }

    /// Depth of fluid under the structure, `h_w = h_0 + zeta_w`.
    pub fn wetted_depth(&self) -> f64 {
        self.h_0 + self.zeta_w
    }

    /// Inertia coefficient of the water under the structure, `2r / h_w`.
    pub fn alpha(&self) -> f64 {
        2.0 * self.r / self.wetted_depth()
    }

    /// Same configuration with a different step height, keeping `h_s` fixed.
    pub fn with_step_height(&self, s: f64) -> Self {
        PhysicalConfig {
            h_0: self.h_s - s,
            ..self.clone()
        }
    }
}

/// Incoming surface elevation imposed at `x = -l`.
pub fn forcing(t: f64, config: &PhysicalConfig) -> f64 {
    config.amplitude * (2.0 * PI * t / config.period).sin()
}

/// Four-segment mesh `[-l,0] | [0,l0-r] | [l0-r,l0+r] | [l0+r,l1]` with shared
/// nodes at the interfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dx: f64,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
    pub x: Vec<f64>,
    pub i_step: usize,
    pub i_wall_left: usize,
    pub i_wall_right: usize,
    pub i_end: usize,
}

fn cells(segment: &'static str, length: f64, dx: f64) -> Result<usize> {
    let n = (length / dx).round();
    if n < 1.0 || (n * dx - length).abs() > 1e-9 * length {
        return Err(OwcError::Geometry { segment, length, dx });
    }
    Ok(n as usize)
}

pub fn build_grid(config: &PhysicalConfig, dx: f64) -> Result<Grid> {
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(OwcError::Config(format!("dx must be positive, got {dx}")));
    }
    let c = config;
    let bounds = [-c.l, 0.0, c.l0 - c.r, c.l0 + c.r, c.l1];
    let n1 = cells("[-l,0]", c.l, dx)?;
    let n2 = cells("[0,l0-r]", c.l0 - c.r, dx)?;
    let n3 = cells("[l0-r,l0+r]", 2.0 * c.r, dx)?;
    let n4 = cells("[l0+r,l1]", c.l1 - (c.l0 + c.r), dx)?;

    let mut x = Vec::with_capacity(n1 + n2 + n3 + n4 + 1);
    x.push(bounds[0]);
    for (k, &n) in [n1, n2, n3, n4].iter().enumerate() {
        let (a, b) = (bounds[k], bounds[k + 1]);
        for j in 1..=n {
            // interpolate so the interface nodes land exactly on the bounds
            x.push(if j == n { b } else { a + (b - a) * (j as f64 / n as f64) });
        }
    }

    Ok(Grid {
        dx,
        n1,
        n2,
        n3,
        n4,
        x,
        i_step: n1,
        i_wall_left: n1 + n2,
        i_wall_right: n1 + n2 + n3,
        i_end: n1 + n2 + n3 + n4,
    })
}

impl Grid {
    pub fn node_count(&self) -> usize {
        self.x.len()
    }

    /// Index of the grid node closest to `x`.
    pub fn nearest_node(&self, x: f64) -> usize {
        let i = ((x - self.x[0]) / self.dx).round();
        (i.max(0.0) as usize).min(self.i_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeControls {
    pub cfl: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl TimeControls {
    /// Fixed step `dt = cfl * dx / sqrt(g h_s)` from the fastest rest-state speed.
    pub fn new(cfl: f64, t_end: f64, config: &PhysicalConfig, grid: &Grid) -> Result<Self> {
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(OwcError::Config(format!("cfl must lie in (0,1), got {cfl}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(OwcError::Config(format!("t_end must be non-negative, got {t_end}")));
        }
        let dt = cfl * grid.dx / (config.g * config.h_s).sqrt();
        Ok(TimeControls { cfl, t_end, dt })
    }

    /// Number of steps needed to reach or pass `t_end`.
    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as u64
    }
}

/// Exterior samples per segment plus the interior discharge.
///
/// Segment arrays include both end nodes, so the node at `x = 0` is stored as
/// the last entry of `e0` and the first of `e1` (left and right traces), and
/// likewise the wall traces are the last node of `e1` and the first of `e2`.
/// Under the structure the elevation is pinned to `zeta_w` and the discharge
/// is the single scalar `q_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub step: u64,
    pub e0: Vec<Cons>,
    pub e1: Vec<Cons>,
    pub e2: Vec<Cons>,
    pub q_i: f64,
    /// Rate of change of `q_i` over the last step, used for the interior
    /// pressure reconstruction.
    pub dq_i_dt: f64,
    pub zeta_i: f64,
}

pub fn initial_state(config: &PhysicalConfig, grid: &Grid) -> State {
    State {
        t: 0.0,
        step: 0,
        e0: vec![Cons::at_rest(config.h_s); grid.n1 + 1],
        e1: vec![Cons::at_rest(config.h_0); grid.n2 + 1],
        e2: vec![Cons::at_rest(config.h_0); grid.n4 + 1],
        q_i: 0.0,
        dq_i_dt: 0.0,
        zeta_i: config.zeta_w,
    }
}

impl State {
    /// Largest absolute elevation and discharge over the exterior and interior.
    pub fn max_abs(&self) -> (f64, f64) {
        self.exterior().fold((0.0f64, self.q_i.abs()), |(z, q), u| {
            (z.max(u.zeta.abs()), q.max(u.q.abs()))
        })
    }

    pub fn exterior(&self) -> impl Iterator<Item = &Cons> {
        self.e0.iter().chain(&self.e1).chain(&self.e2)
    }

    pub fn is_finite(&self) -> bool {
        self.q_i.is_finite() && self.exterior().all(Cons::is_finite)
    }

    /// Elevation and discharge at global node `i`, using the labelling of
    /// snapshots: `x = 0` reads from the pre-step segment, `l0 - r` and
    /// `l0 + r` read the exterior traces, nodes strictly under the structure
    /// report `(zeta_w, q_i)`.
    pub fn node(&self, grid: &Grid, i: usize) -> (f64, f64, Segment) {
        if i <= grid.i_step {
            let u = self.e0[i];
            (u.zeta, u.q, Segment::E0)
        } else if i <= grid.i_wall_left {
            let u = self.e1[i - grid.i_step];
            (u.zeta, u.q, Segment::E1)
        } else if i < grid.i_wall_right {
            (self.zeta_i, self.q_i, Segment::Interior)
        } else {
            let u = self.e2[i - grid.i_wall_right];
            (u.zeta, u.q, Segment::E2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    E0,
    E1,
    Interior,
    E2,
}

impl Segment {
    pub fn label(self) -> &'static str {
        match self {
            Segment::E0 => "E0",
            Segment::E1 => "E1",
            Segment::Interior => "I",
            Segment::E2 => "E2",
        }
    }
}
