//! Classical single-domain shallow-water run used as the reference for the
//! transmission model.
//!
//! Flat bottom of depth `h_s` over `[-l, l1]`, no structure, the same forced
//! entry and a reflecting wall at `l1`. The update loop is deliberately
//! monolithic and shares nothing with the stepper or the couplers except the
//! pointwise algebra in [`crate::physics`].

use crate::error::{OwcError, Result};
use crate::model::{forcing, PhysicalConfig};
use crate::physics::{flux, to_riemann, wave_speeds, Cons};

#[derive(Debug, Clone)]
pub struct ClassicalRun {
    pub config: PhysicalConfig,
    pub dx: f64,
    pub dt: f64,
    pub x: Vec<f64>,
    pub u: Vec<Cons>,
    pub step: u64,
}

impl ClassicalRun {
    /// Same node positions as the OWC grid over `[-l, l1]`, same `dt`.
    pub fn new(config: &PhysicalConfig, dx: f64, cfl: f64) -> Result<Self> {
        let length = config.l + config.l1;
        let n = (length / dx).round();
        if n < 2.0 || (n * dx - length).abs() > 1e-9 * length {
            return Err(OwcError::Geometry { segment: "[-l,l1]", length, dx });
        }
        let n = n as usize;
        let x = (0..=n)
            .map(|i| if i == n { config.l1 } else { -config.l + length * (i as f64 / n as f64) })
            .collect();
        Ok(ClassicalRun {
            config: config.clone(),
            dx,
            dt: cfl * dx / (config.g * config.h_s).sqrt(),
            x,
            u: vec![Cons::at_rest(config.h_s); n + 1],
            step: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn step(&mut self) -> Result<()> {
        let g = self.config.g;
        let h = self.config.h_s;
        let n = self.u.len() - 1;
        let nu = self.dt / self.dx;
        let u = &self.u;
        let t_next = (self.step + 1) as f64 * self.dt;
        let mut next = u.clone();

        for (node, v) in u.iter().enumerate() {
            let (lp, lm) = wave_speeds(*v, g)?;
            let speed = lp.abs().max(lm.abs());
            if speed * nu > 1.0 {
                return Err(OwcError::Cfl { node, speed, courant: speed * nu });
            }
        }

        // Lax-Friedrichs on interior nodes, written in its averaged form
        let f: Vec<(f64, f64)> = u.iter().map(|v| flux(*v, g)).collect::<Result<_>>()?;
        for i in 1..n {
            next[i].zeta = 0.5 * (u[i - 1].zeta + u[i + 1].zeta) - 0.5 * nu * (f[i + 1].0 - f[i - 1].0);
            next[i].q = 0.5 * (u[i - 1].q + u[i + 1].q) - 0.5 * nu * (f[i + 1].1 - f[i - 1].1);
        }

        // entry: forced elevation, L carried in from the right
        let (_, s0) = wave_speeds(u[0], g)?;
        let (_, s1) = wave_speeds(u[1], g)?;
        let speed = s1 / (1.0 + nu * (s1 - s0));
        let w = speed * nu;
        let l_new = (1.0 - w) * to_riemann(u[0], g)?.l + w * to_riemann(u[1], g)?.l;
        let zeta = forcing(t_next, &self.config);
        let depth = h + zeta;
        next[0].zeta = zeta;
        next[0].q = depth * (2.0 * ((g * depth).sqrt() - (g * h).sqrt()) - l_new);

        // wall: no flux, R carried in from the left
        let (s0, _) = wave_speeds(u[n], g)?;
        let (s1, _) = wave_speeds(u[n - 1], g)?;
        let speed = s1 / (1.0 + nu * (s1 - s0));
        let w = speed * nu;
        let r_new = (1.0 - w) * to_riemann(u[n], g)?.r + w * to_riemann(u[n - 1], g)?.r;
        let c = 0.5 * r_new + (g * h).sqrt();
        next[n].zeta = c * c / g - h;
        next[n].q = 0.0;

        if next.iter().any(|v| !v.is_finite() || v.depth() <= 0.0) {
            return Err(OwcError::NonFinite(format!("classical run at t = {t_next}")));
        }
        self.u = next;
        self.step += 1;
        Ok(())
    }
}
