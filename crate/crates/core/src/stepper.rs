//! Lax-Friedrichs time stepping of the exterior segments.

use crate::boundary::{
    end_wall_update, entry_update, step_coupler_update, wall_ode_update, wall_trace_update,
    WallState,
};
use crate::error::{OwcError, Result};
use crate::model::{build_grid, initial_state, Grid, PhysicalConfig, State, TimeControls};
use crate::physics::{flux, wave_speeds, Cons};
use crate::solvers::NewtonOptions;

/// Numerical flux at the face between `u_left` and `u_right`:
/// `(F(u_l) + F(u_r))/2 - dx/(2 dt) (u_r - u_l)`.
pub fn lax_friedrichs_flux(u_left: Cons, u_right: Cons, dx: f64, dt: f64, g: f64) -> Result<(f64, f64)> {
    let (ml, pl) = flux(u_left, g)?;
    let (mr, pr) = flux(u_right, g)?;
    let k = dx / (2.0 * dt);
    Ok((
        0.5 * (ml + mr) - k * (u_right.zeta - u_left.zeta),
        0.5 * (pl + pr) - k * (u_right.q - u_left.q),
    ))
}

/// Largest Courant number over a run of points, with the offending node.
fn courant_check(points: &[Cons], dx: f64, dt: f64, g: f64) -> Result<()> {
    for (node, u) in points.iter().enumerate() {
        let (lp, lm) = wave_speeds(*u, g)?;
        let speed = lp.abs().max(lm.abs());
        let courant = speed * dt / dx;
        if courant > 1.0 {
            return Err(OwcError::Cfl { node, speed, courant });
        }
    }
    Ok(())
}

/// One conservative update of `states`, whose outer neighbours are the ghosts.
///
/// Only the given points are advanced; the caller owns the ghost values.
pub fn step_segment(
    states: &[Cons],
    ghost_left: Cons,
    ghost_right: Cons,
    dx: f64,
    dt: f64,
    g: f64,
) -> Result<Vec<Cons>> {
    let n = states.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let point = |i: usize| -> Cons {
        match i {
            0 => ghost_left,
            i if i == n + 1 => ghost_right,
            i => states[i - 1],
        }
    };
    // widened stencil (ghosts included) so the check sees every flux input
    let mut stencil = Vec::with_capacity(n + 2);
    stencil.extend((0..n + 2).map(point));
    courant_check(&stencil, dx, dt, g)?;

    let fluxes = stencil
        .windows(2)
        .map(|w| lax_friedrichs_flux(w[0], w[1], dx, dt, g))
        .collect::<Result<Vec<_>>>()?;
    let ratio = dt / dx;
    Ok(states
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let (fl, fr) = (fluxes[i], fluxes[i + 1]);
            Cons {
                zeta: u.zeta - ratio * (fr.0 - fl.0),
                q: u.q - ratio * (fr.1 - fl.1),
                depth_rest: u.depth_rest,
            }
        })
        .collect())
}

/// Interior nodes of a segment advanced with its own end nodes as ghosts.
fn step_interior(seg: &[Cons], dx: f64, dt: f64, g: f64) -> Result<Vec<Cons>> {
    let n = seg.len();
    step_segment(&seg[1..n - 1], seg[0], seg[n - 1], dx, dt, g)
}

/// Advance the whole configuration by one time step.
///
/// Boundary and transmission values are computed from the old state first;
/// the Lax-Friedrichs update of each exterior segment then fills the nodes in
/// between.
pub fn advance(
    state: &State,
    config: &PhysicalConfig,
    grid: &Grid,
    controls: &TimeControls,
    newton: &NewtonOptions,
) -> Result<State> {
    let t = state.t;
    let dt = controls.dt;
    let dx = grid.dx;
    let g = config.g;
    let step = state.step + 1;
    let t_next = step as f64 * dt;

    let (zeta_entry, q_entry) =
        entry_update(state, t_next, config, grid, controls).map_err(|e| e.at(t, "entry"))?;
    let traces =
        step_coupler_update(state, config, grid, controls, newton).map_err(|e| e.at(t, "step"))?;
    let q_wall = wall_ode_update(&WallState::from_state(state, config), config, dt)
        .map_err(|e| e.at(t, "wall ode"))?;
    let (zeta_left, zeta_right) =
        wall_trace_update(state, q_wall, config, grid, controls).map_err(|e| e.at(t, "walls"))?;
    let (zeta_end, q_end) =
        end_wall_update(state, config, grid, controls).map_err(|e| e.at(t, "end wall"))?;

    let assemble = |seg: &[Cons], left: (f64, f64), right: (f64, f64), location| -> Result<Vec<Cons>> {
        let depth = seg[0].depth_rest;
        let inner = step_interior(seg, dx, dt, g).map_err(|e| e.at(t, location))?;
        let mut out = Vec::with_capacity(seg.len());
        out.push(Cons::new(left.0, left.1, depth));
        out.extend(inner);
        out.push(Cons::new(right.0, right.1, depth));
        Ok(out)
    };
    let e0 = assemble(&state.e0, (zeta_entry, q_entry), (traces.zeta, traces.q), "segment E0")?;
    let e1 = assemble(&state.e1, (traces.zeta, traces.q), (zeta_left, q_wall), "segment E1")?;
    let e2 = assemble(&state.e2, (zeta_right, q_wall), (zeta_end, q_end), "segment E2")?;

    let next = State {
        t: t_next,
        step,
        e0,
        e1,
        e2,
        q_i: q_wall,
        dq_i_dt: (q_wall - state.q_i) / dt,
        zeta_i: state.zeta_i,
    };
    if !next.is_finite() {
        return Err(OwcError::NonFinite(format!("state after step {step} (t = {t_next})")));
    }
    for (location, seg) in [("segment E0", &next.e0), ("segment E1", &next.e1), ("segment E2", &next.e2)] {
        if let Some(u) = seg.iter().find(|u| u.depth() <= 0.0) {
            return Err(OwcError::DryState { depth: u.depth() }.at(t_next, location));
        }
    }
    Ok(next)
}

/// A configured run: problem, mesh, time controls and the current state.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: PhysicalConfig,
    pub grid: Grid,
    pub controls: TimeControls,
    pub newton: NewtonOptions,
    pub state: State,
}

impl Simulation {
    pub fn new(config: PhysicalConfig, dx: f64, cfl: f64, t_end: f64) -> Result<Self> {
        config.validate()?;
        let grid = build_grid(&config, dx)?;
        let controls = TimeControls::new(cfl, t_end, &config, &grid)?;
        let state = initial_state(&config, &grid);
        Ok(Simulation {
            config,
            grid,
            controls,
            newton: NewtonOptions::default(),
            state,
        })
    }

    pub fn step(&mut self) -> Result<()> {
        self.state = advance(&self.state, &self.config, &self.grid, &self.controls, &self.newton)?;
        Ok(())
    }

    /// Step until `t_end`, calling `observe` on the initial state and after every step.
    pub fn run<F>(&mut self, mut observe: F) -> Result<()>
    where
        F: FnMut(&Simulation) -> Result<()>,
    {
        observe(self)?;
        for _ in 0..self.controls.steps() {
            self.step()?;
            observe(self)?;
        }
        Ok(())
    }
}
