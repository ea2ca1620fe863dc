//! Energy accounting and wave-power quantities.

use std::f64::consts::PI;

use crate::error::{OwcError, Result};
use crate::model::{Grid, PhysicalConfig, State};
use crate::physics::Cons;
use crate::solvers::bracketed_newton;

/// Discrete energy densities and fluxes of a state (pressure gauge `P_atm = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// `rho q^2/(2h) + rho g zeta^2/2` at every exterior node (E0, E1, E2 in order).
    pub e_ext: Vec<f64>,
    /// `rho q^3/(2h^2) + rho g zeta q` at every exterior node.
    pub f_ext: Vec<f64>,
    /// Kinetic energy density under the structure, `rho q_i^2/(2 h_w)`.
    pub e_int: f64,
    /// Constant potential part `rho g zeta_w^2 / 2` of the interior density;
    /// kept apart so the lake at rest has zero fluid energy.
    pub e_int_rest: f64,
    /// `[[q_i P_i]]` across the structure from the reconstructed pressure.
    pub f_int_jump: f64,
    /// Exterior densities integrated by the trapezoidal rule plus `2r e_int`.
    pub e_fluid: f64,
    /// The structure is fixed, so its energy is a constant taken as zero.
    pub e_solid: f64,
    pub f_entry: f64,
    /// Flux at `x = 0^-` (pre-step side).
    pub f_step_left: f64,
    /// Flux at `x = 0^+`.
    pub f_step_right: f64,
}

impl EnergyReport {
    /// Right-hand side of the global balance: entry flux plus the flux
    /// mismatch across the step.
    pub fn boundary_balance(&self) -> f64 {
        self.f_entry + self.f_step_right - self.f_step_left
    }
}

fn densities(u: &Cons, rho: f64, g: f64) -> Result<(f64, f64)> {
    let h = u.depth();
    if h <= 0.0 {
        return Err(OwcError::DryState { depth: h });
    }
    let e = rho * u.q * u.q / (2.0 * h) + rho * g * u.zeta * u.zeta / 2.0;
    let f = rho * u.q.powi(3) / (2.0 * h * h) + rho * g * u.zeta * u.q;
    Ok((e, f))
}

fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dx * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

pub fn energy_audit(state: &State, config: &PhysicalConfig, grid: &Grid) -> Result<EnergyReport> {
    let (rho, g) = (config.rho, config.g);
    let mut e_ext = Vec::with_capacity(grid.node_count() + 2);
    let mut f_ext = Vec::with_capacity(grid.node_count() + 2);
    let mut e_fluid = 0.0;
    for seg in [&state.e0, &state.e1, &state.e2] {
        let start = e_ext.len();
        for u in seg.iter() {
            let (e, f) = densities(u, rho, g)?;
            e_ext.push(e);
            f_ext.push(f);
        }
        e_fluid += trapezoid(&e_ext[start..], grid.dx);
    }
    let h_w = config.wetted_depth();
    let e_int = rho * state.q_i * state.q_i / (2.0 * h_w);
    e_fluid += 2.0 * config.r * e_int;

    let gradient = pressure_gradient_from_rate(state.dq_i_dt, config);
    let f_int_jump = state.q_i * 2.0 * config.r * gradient;

    let n0 = state.e0.len();
    Ok(EnergyReport {
        f_entry: f_ext[0],
        f_step_left: f_ext[n0 - 1],
        f_step_right: f_ext[n0],
        e_ext,
        f_ext,
        e_int,
        e_int_rest: rho * g * config.zeta_w * config.zeta_w / 2.0,
        f_int_jump,
        e_fluid,
        e_solid: 0.0,
    })
}

fn pressure_gradient_from_rate(dq_dt: f64, config: &PhysicalConfig) -> f64 {
    -(config.rho / config.wetted_depth()) * dq_dt
}

/// Constant pressure gradient under the structure from two consecutive
/// interior discharges: `dP/dx = -(rho/h_w) dq_i/dt`.
pub fn interior_pressure_gradient(q_i_prev: f64, q_i_new: f64, dt: f64, config: &PhysicalConfig) -> f64 {
    pressure_gradient_from_rate((q_i_new - q_i_prev) / dt, config)
}

/// Linear interior pressure profile, gauged to zero at `x = l0 - r`.
pub fn interior_pressure(x: f64, gradient: f64, config: &PhysicalConfig) -> f64 {
    gradient * (x - (config.l0 - config.r))
}

/// Positive wavenumber solving `omega^2 = g k tanh(k h)`.
pub fn solve_dispersion(omega: f64, depth: f64, g: f64) -> Result<f64> {
    if !(omega > 0.0 && depth > 0.0 && g > 0.0) {
        return Err(OwcError::Config(format!(
            "dispersion needs omega, depth, g > 0 (got {omega}, {depth}, {g})"
        )));
    }
    let w2 = omega * omega;
    let f = |k: f64| {
        let th = (k * depth).tanh();
        let sech2 = 1.0 - th * th;
        (g * k * th - w2, g * th + g * k * depth * sech2)
    };
    let mut lo = w2 / (g * (depth * w2 / g + 1.0));
    let mut hi = 2.0 * w2 / g;
    while f(lo).0 > 0.0 {
        lo *= 0.5;
    }
    while f(hi).0 < 0.0 {
        hi *= 2.0;
    }
    // shallow-water estimate, pulled into the bracket
    let seed = (omega / (g * depth).sqrt()).clamp(lo, hi);
    bracketed_newton(f, lo, hi, seed, 1e-13 * w2.max(1.0), "dispersion relation")
}

/// Incident wave power and the quantities it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    pub omega: f64,
    pub k: f64,
    /// Finite-depth group velocity.
    pub c_g: f64,
    /// Shallow-water limit `sqrt(g h_s)`.
    pub c_g_shallow: f64,
    pub e_inc: f64,
    pub p_inc: f64,
    pub width: f64,
    pub p_reg: Option<f64>,
    pub efficiency: Option<f64>,
}

impl PowerReport {
    /// Fill in absorbed power and the resulting primary efficiency.
    pub fn with_absorbed(mut self, p_reg: f64) -> Self {
        self.p_reg = Some(p_reg);
        self.efficiency = Some(p_reg / self.p_inc);
        self
    }
}

pub fn incident_power(config: &PhysicalConfig, width: f64) -> Result<PowerReport> {
    let omega = 2.0 * PI / config.period;
    let h = config.h_s;
    let k = solve_dispersion(omega, h, config.g)?;
    let kh2 = 2.0 * k * h;
    // sinh overflows for very deep water where the correction vanishes anyway
    let correction = if kh2 > 700.0 { 0.0 } else { kh2 / kh2.sinh() };
    let c_g = omega / (2.0 * k) * (1.0 + correction);
    let e_inc = 0.5 * config.rho * config.g * width * config.amplitude * config.amplitude;
    Ok(PowerReport {
        omega,
        k,
        c_g,
        c_g_shallow: (config.g * h).sqrt(),
        e_inc,
        p_inc: e_inc * c_g,
        width,
        p_reg: None,
        efficiency: None,
    })
}

/// Time average of `P Q` over the last full period of uniformly sampled traces.
pub fn absorbed_power_trace(times: &[f64], pressure: &[f64], flux: &[f64], period: f64) -> Result<f64> {
    let n = times.len();
    if pressure.len() != n || flux.len() != n {
        return Err(OwcError::Config("pressure, flux and time traces differ in length".into()));
    }
    if n < 2 || times[n - 1] - times[0] < period * (1.0 - 1e-9) {
        return Err(OwcError::Config(format!(
            "traces must span at least one period ({period} s)"
        )));
    }
    let t_start = times[n - 1] - period;
    let first = times.iter().position(|&t| t >= t_start - 1e-12 * period).unwrap_or(0);
    let product: Vec<f64> = (first..n).map(|i| pressure[i] * flux[i]).collect();
    let mut integral = 0.0;
    for (k, w) in times[first..].windows(2).enumerate() {
        integral += 0.5 * (w[1] - w[0]) * (product[k] + product[k + 1]);
    }
    Ok(integral / (times[n - 1] - times[first]))
}

/// Absorbed power of a linear turbine in time-harmonic operation, `lambda |p|^2 / 2`.
pub fn harmonic_absorbed_power(turbine_constant: f64, pressure_amplitude: f64) -> f64 {
    0.5 * turbine_constant * pressure_amplitude * pressure_amplitude
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, initial_state};

    #[test]
    fn rest_audit_is_zero() {
        let cfg = PhysicalConfig::reference();
        let grid = build_grid(&cfg, 0.02).unwrap();
        let s = initial_state(&cfg, &grid);
        let rep = energy_audit(&s, &cfg, &grid).unwrap();
        assert!(rep.e_ext.iter().chain(&rep.f_ext).all(|&v| v == 0.0));
        assert_eq!(rep.e_fluid, 0.0);
        assert_eq!(rep.e_int, 0.0);
        assert_eq!(rep.f_int_jump, 0.0);
        assert_eq!(rep.boundary_balance(), 0.0);
        assert_eq!(rep.e_ext.len(), 1501 + 501 + 251);
    }

    #[test]
    fn single_node_density() {
        let cfg = PhysicalConfig { h_s: 10.0, ..PhysicalConfig::reference() };
        let grid = build_grid(&cfg, 0.02).unwrap();
        let mut s = initial_state(&cfg, &grid);
        s.e0[100].zeta = 1.0;
        let rep = energy_audit(&s, &cfg, &grid).unwrap();
        assert!((rep.e_ext[100] - 4905.0).abs() < 1e-9);
        assert!((rep.e_fluid - 4905.0 * 0.02).abs() < 1e-9);
    }

    #[test]
    fn pressure_gradient() {
        let cfg = PhysicalConfig::reference();
        assert_eq!(interior_pressure_gradient(0.3, 0.3, 1e-3, &cfg), 0.0);
        let grad = interior_pressure_gradient(0.0, -0.001_226_25, 0.001, &cfg);
        assert!((grad - 490.5).abs() < 1e-9);
        let jump = interior_pressure(cfg.l0 + cfg.r, grad, &cfg) - interior_pressure(cfg.l0 - cfg.r, grad, &cfg);
        assert!((jump - 2.0 * cfg.r * grad).abs() < 1e-12);
    }

    fn bisection_oracle(omega: f64, h: f64, g: f64) -> f64 {
        let f = |k: f64| g * k * (k * h).tanh() - omega * omega;
        let (mut a, mut b) = (1e-12, 1.0);
        while f(b) < 0.0 {
            b *= 2.0;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn dispersion_deep_and_shallow() {
        let omega = 2.0 * PI / 1.5;
        let k = solve_dispersion(omega, 15.0, 9.81).unwrap();
        assert!((k - omega * omega / 9.81).abs() < 1e-4);
        assert!((k - 1.788_6).abs() < 1e-4);
        assert!((k - bisection_oracle(omega, 15.0, 9.81)).abs() < 1e-10);

        let omega = 0.01;
        let k = solve_dispersion(omega, 15.0, 9.81).unwrap();
        assert!((k - omega / (9.81f64 * 15.0).sqrt()).abs() / k < 1e-4);
    }

    #[test]
    fn dispersion_is_monotone() {
        let ks: Vec<f64> = (1..200).map(|i| solve_dispersion(0.05 * i as f64, 7.0, 9.81).unwrap()).collect();
        assert!(ks.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn incident_power_values() {
        let cfg = PhysicalConfig::reference();
        let rep = incident_power(&cfg, 1.0).unwrap();
        assert!((rep.e_inc - 4905.0).abs() < 1e-9);
        assert!((rep.c_g_shallow - 12.130_539_971_493_437).abs() < 1e-12);
        // deep water: group velocity is half the phase velocity
        assert!((rep.c_g - 0.5 * rep.omega / rep.k).abs() < 1e-6);
        let doubled = incident_power(&PhysicalConfig { amplitude: 2.0, ..cfg }, 1.0).unwrap();
        assert!((doubled.e_inc - 4.0 * rep.e_inc).abs() < 1e-9);
        assert!((doubled.p_inc - 4.0 * rep.p_inc).abs() < 1e-6);
        let eff = rep.with_absorbed(0.25 * rep.p_inc);
        assert!((eff.efficiency.unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn absorbed_power_values() {
        let period = 2.0;
        let n = 10_001;
        let times: Vec<f64> = (0..n).map(|i| period * i as f64 / (n - 1) as f64).collect();
        let w = 2.0 * PI / period;
        let cos: Vec<f64> = times.iter().map(|t| (w * t).cos()).collect();
        let ones = vec![3.0; n];
        let p = absorbed_power_trace(&times, &ones, &cos, period).unwrap();
        assert!(p.abs() < 1e-6);
        let p = absorbed_power_trace(&times, &cos, &cos, period).unwrap();
        assert!((p - 0.5).abs() < 1e-6);
        assert!(absorbed_power_trace(&times[..100], &cos[..100], &cos[..100], period).is_err());
        assert_eq!(harmonic_absorbed_power(2.0, 3.0), 9.0);
    }
}
