//! Characteristic boundary and transmission updates.
//!
//! Each update reads the state at the previous time level only and produces
//! the endpoint values of the exterior segments at the new level:
//!
//! * entry at `x = -l`: forced elevation, discharge from the transported `L`;
//! * step at `x = 0`: `R` from the left and `L` from the right, joined by
//!   continuity of elevation and discharge (a 2x2 nonlinear system);
//! * structure walls at `l0 -/+ r`: the interior discharge follows the
//!   inertia equation `-alpha dq_i/dt = [[q^2/(2h^2) + g zeta]]`, the
//!   elevation traces then come from the transported invariants;
//! * end wall at `l1`: zero discharge, elevation from the transported `R`.
//!
//! The jump `[[v]]` is always `v(l0 + r) - v(l0 - r)`.

use crate::error::{OwcError, Result};
use crate::model::{forcing, Grid, PhysicalConfig, State, TimeControls};
use crate::physics::{to_riemann, wave_speeds, Cons};
use crate::solvers::{bracketed_newton, newton_2x2, NewtonOptions};

/// Effective transport speed at a boundary node and the matching
/// interpolation weight `beta = lambda dt / dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicSpeedEstimate {
    pub lambda: f64,
    pub beta: f64,
}

/// Speed at the foot of the characteristic through the boundary node,
/// linearly interpolated between the boundary value and its neighbour.
pub fn interp_speed(
    lambda_at_boundary: f64,
    lambda_at_neighbor: f64,
    dt: f64,
    dx: f64,
) -> Result<CharacteristicSpeedEstimate> {
    let nu = dt / dx;
    let denominator = 1.0 + nu * lambda_at_neighbor - nu * lambda_at_boundary;
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(OwcError::CharacteristicDirection { denominator });
    }
    let lambda = lambda_at_neighbor / denominator;
    Ok(CharacteristicSpeedEstimate { lambda, beta: lambda * nu })
}

/// Upwind transport of an invariant into a boundary node:
/// `(1 - lambda dt/dx) boundary + lambda dt/dx neighbor`.
pub fn transport_update(
    boundary_value_prev: f64,
    neighbor_value_prev: f64,
    lambda: f64,
    dt: f64,
    dx: f64,
) -> Result<f64> {
    let courant = lambda * dt / dx;
    if !(0.0..=1.0).contains(&courant) {
        return Err(OwcError::Cfl { node: 0, speed: lambda, courant });
    }
    Ok((1.0 - courant) * boundary_value_prev + courant * neighbor_value_prev)
}

/// New `R` at a right boundary whose upwind neighbour lies to its left.
pub fn transported_r(boundary: Cons, neighbor: Cons, g: f64, dt: f64, dx: f64) -> Result<f64> {
    let (lp0, _) = wave_speeds(boundary, g)?;
    let (lp1, _) = wave_speeds(neighbor, g)?;
    let speed = interp_speed(lp0, lp1, dt, dx)?;
    transport_update(
        to_riemann(boundary, g)?.r,
        to_riemann(neighbor, g)?.r,
        speed.lambda,
        dt,
        dx,
    )
}

/// New `L` at a left boundary whose upwind neighbour lies to its right.
pub fn transported_l(boundary: Cons, neighbor: Cons, g: f64, dt: f64, dx: f64) -> Result<f64> {
    let (_, lm0) = wave_speeds(boundary, g)?;
    let (_, lm1) = wave_speeds(neighbor, g)?;
    let speed = interp_speed(lm0, lm1, dt, dx)?;
    transport_update(
        to_riemann(boundary, g)?.l,
        to_riemann(neighbor, g)?.l,
        speed.lambda,
        dt,
        dx,
    )
}

/// Discharge carried by a right-going invariant: `h (R - 2(sqrt(g h) - sqrt(g h_ref)))`.
fn discharge_from_r(zeta: f64, r: f64, h_ref: f64, g: f64) -> f64 {
    let h = h_ref + zeta;
    h * (r - 2.0 * ((g * h).sqrt() - (g * h_ref).sqrt()))
}

/// Discharge carried by a left-going invariant: `h (2(sqrt(g h) - sqrt(g h_ref)) - L)`.
fn discharge_from_l(zeta: f64, l: f64, h_ref: f64, g: f64) -> f64 {
    let h = h_ref + zeta;
    h * (2.0 * ((g * h).sqrt() - (g * h_ref).sqrt()) - l)
}

fn endpoints(seg: &[Cons]) -> Result<(Cons, Cons, Cons, Cons)> {
    let n = seg.len();
    if n < 2 {
        return Err(OwcError::Config("exterior segment needs at least one cell".into()));
    }
    Ok((seg[0], seg[1], seg[n - 1], seg[n - 2]))
}

/// Elevation and discharge at the entry `x = -l` at time `t_next`.
pub fn entry_update(
    state_prev: &State,
    t_next: f64,
    config: &PhysicalConfig,
    grid: &Grid,
    controls: &TimeControls,
) -> Result<(f64, f64)> {
    let (first, second, _, _) = endpoints(&state_prev.e0)?;
    let l = transported_l(first, second, config.g, controls.dt, grid.dx)?;
    let zeta = forcing(t_next, config);
    let h = config.h_s + zeta;
    if h <= 0.0 {
        return Err(OwcError::DryState { depth: h });
    }
    Ok((zeta, discharge_from_l(zeta, l, config.h_s, config.g)))
}

/// Residual of the step transmission system at `(x1, x2) = (zeta, q)`.
pub fn step_residual(
    x1: f64,
    x2: f64,
    r_l: f64,
    l_r: f64,
    config: &PhysicalConfig,
) -> Result<(f64, f64)> {
    let depth = (config.h_s + x1).min(config.h_0 + x1);
    if depth <= 0.0 {
        return Err(OwcError::DryState { depth });
    }
    Ok((
        discharge_from_r(x1, r_l, config.h_s, config.g) - x2,
        discharge_from_l(x1, l_r, config.h_0, config.g) - x2,
    ))
}

/// Shared elevation and discharge at the step from the incoming invariants.
///
/// Damped Newton from `(0, 0)` with the analytic Jacobian; both unknowns are
/// the common traces on either side of the step.
pub fn solve_step_coupling(
    r_l: f64,
    l_r: f64,
    config: &PhysicalConfig,
    opts: &NewtonOptions,
) -> Result<(f64, f64)> {
    if !(r_l.is_finite() && l_r.is_finite()) {
        return Err(OwcError::NonFinite("step invariants".into()));
    }
    let g = config.g;
    let cs_ref = (g * config.h_s).sqrt();
    let c0_ref = (g * config.h_0).sqrt();
    let system = |x: [f64; 2]| {
        let res = step_residual(x[0], x[1], r_l, l_r, config).ok()?;
        let cs = (g * (config.h_s + x[0])).sqrt();
        let c0 = (g * (config.h_0 + x[0])).sqrt();
        let jac = [
            [r_l + 2.0 * cs_ref - 3.0 * cs, -1.0],
            [3.0 * c0 - 2.0 * c0_ref - l_r, -1.0],
        ];
        Some(([res.0, res.1], jac))
    };
    let sol = newton_2x2(system, [0.0, 0.0], opts)?;
    Ok((sol.x[0], sol.x[1]))
}

/// Result of the step coupler for one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTraces {
    pub zeta: f64,
    pub q: f64,
    pub r_l: f64,
    pub l_r: f64,
}

pub fn step_coupler_update(
    state_prev: &State,
    config: &PhysicalConfig,
    grid: &Grid,
    controls: &TimeControls,
    opts: &NewtonOptions,
) -> Result<StepTraces> {
    let (_, _, last0, before_last0) = endpoints(&state_prev.e0)?;
    let (first1, second1, _, _) = endpoints(&state_prev.e1)?;
    let r_l = transported_r(last0, before_last0, config.g, controls.dt, grid.dx)?;
    let l_r = transported_l(first1, second1, config.g, controls.dt, grid.dx)?;
    let (zeta, q) = solve_step_coupling(r_l, l_r, config, opts)?;
    Ok(StepTraces { zeta, q, r_l, l_r })
}

/// Exterior traces on both sides of the structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallState {
    pub q_wall: f64,
    /// Elevation at `(l0 - r)^-`.
    pub zeta_left: f64,
    /// Elevation at `(l0 + r)^+`.
    pub zeta_right: f64,
    pub alpha: f64,
}

impl WallState {
    pub fn from_state(state: &State, config: &PhysicalConfig) -> Self {
        WallState {
            q_wall: state.q_i,
            zeta_left: state.e1.last().map_or(0.0, |u| u.zeta),
            zeta_right: state.e2.first().map_or(0.0, |u| u.zeta),
            alpha: config.alpha(),
        }
    }
}

/// Explicit update of the interior discharge driven by the jump of
/// `q^2/(2h^2) + g zeta` across the structure.
pub fn wall_ode_update(traces_prev: &WallState, config: &PhysicalConfig, dt: f64) -> Result<f64> {
    let w = traces_prev;
    if w.alpha.is_nan() || w.alpha <= 0.0 {
        return Err(OwcError::Config(format!("alpha must be positive, got {}", w.alpha)));
    }
    let g = config.g;
    let head = |zeta: f64| -> Result<f64> {
        let h = config.h_0 + zeta;
        if h <= 0.0 {
            return Err(OwcError::DryState { depth: h });
        }
        Ok(w.q_wall * w.q_wall / (2.0 * h * h) + g * zeta)
    };
    let jump = head(w.zeta_right)? - head(w.zeta_left)?;
    Ok(w.q_wall - dt / w.alpha * jump)
}

/// Solve `q = (h_ref + zeta) (inv - 2 (sqrt(g (h_ref + zeta)) - sqrt(g h_ref)))`
/// for `zeta` in `[-0.9 h_ref, 5 h_ref]`, returning the root nearest `prev`.
///
/// The left-hand side is a cubic in `sqrt(h)` that rises to a maximum at the
/// critical depth and falls after it, so the bracket is split there and each
/// monotone piece holds at most one root.
pub fn solve_trace(q: f64, invariant: f64, h_ref: f64, g: f64, prev: f64) -> Result<f64> {
    let lo = -0.9 * h_ref;
    let hi = 5.0 * h_ref;
    let c_ref = (g * h_ref).sqrt();
    let f = |zeta: f64| {
        let c = (g * (h_ref + zeta)).sqrt();
        let value = discharge_from_r(zeta, invariant, h_ref, g) - q;
        (value, invariant + 2.0 * c_ref - 3.0 * c)
    };

    let c_crit = (invariant + 2.0 * c_ref) / 3.0;
    let zeta_crit = if c_crit > 0.0 { c_crit * c_crit / g - h_ref } else { f64::NEG_INFINITY };
    let pieces: Vec<(f64, f64)> = if zeta_crit > lo && zeta_crit < hi {
        vec![(lo, zeta_crit), (zeta_crit, hi)]
    } else {
        vec![(lo, hi)]
    };

    let tolerance = 1e-12 * (1.0 + q.abs());
    let mut best: Option<f64> = None;
    for (a, b) in pieces {
        let seed = prev.clamp(a, b);
        match bracketed_newton(f, a, b, seed, tolerance, "wall trace") {
            Ok(root) => {
                if best.is_none_or(|z| (root - prev).abs() < (z - prev).abs()) {
                    best = Some(root);
                }
            }
            Err(OwcError::NoRoot { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or(OwcError::NoRoot { what: "wall trace", lo, hi })
}

/// Elevation traces at both walls once the new wall discharge is known.
pub fn wall_trace_update(
    state_prev: &State,
    q_wall_new: f64,
    config: &PhysicalConfig,
    grid: &Grid,
    controls: &TimeControls,
) -> Result<(f64, f64)> {
    if !q_wall_new.is_finite() {
        return Err(OwcError::NonFinite("wall discharge".into()));
    }
    let g = config.g;
    let (_, _, last1, before_last1) = endpoints(&state_prev.e1)?;
    let (first2, second2, _, _) = endpoints(&state_prev.e2)?;
    let r_left = transported_r(last1, before_last1, g, controls.dt, grid.dx)?;
    let l_right = transported_l(first2, second2, g, controls.dt, grid.dx)?;

    let zeta_left = solve_trace(q_wall_new, r_left, config.h_0, g, last1.zeta)?;
    // q = h (2(c - c_ref) - L)  <=>  -q = h (L - 2(c - c_ref))
    let zeta_right = solve_trace(-q_wall_new, l_right, config.h_0, g, first2.zeta)?;
    Ok((zeta_left, zeta_right))
}

/// Reflecting end wall at `x = l1`.
pub fn end_wall_update(
    state_prev: &State,
    config: &PhysicalConfig,
    grid: &Grid,
    controls: &TimeControls,
) -> Result<(f64, f64)> {
    let (_, _, last, before_last) = endpoints(&state_prev.e2)?;
    let r = transported_r(last, before_last, config.g, controls.dt, grid.dx)?;
    let c = 0.5 * r + (config.g * config.h_0).sqrt();
    Ok((c * c / config.g - config.h_0, 0.0))
}
