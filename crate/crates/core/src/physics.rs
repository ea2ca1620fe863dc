//! Pointwise shallow-water algebra.
//!
//! Every exterior point carries its own rest depth (`h_s` before the step,
//! `h_0` after it). The momentum flux and the Riemann invariants are both
//! measured relative to that rest depth, so the lake at rest has zero flux
//! and zero invariants on either side of the step.

use crate::error::{OwcError, Result};

/// Conservative state `(zeta, q)` at a point, together with the rest depth of
/// the segment it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cons {
    pub zeta: f64,
    pub q: f64,
    pub depth_rest: f64,
}

impl Cons {
    pub fn new(zeta: f64, q: f64, depth_rest: f64) -> Self {
        Cons { zeta, q, depth_rest }
    }

    pub fn at_rest(depth_rest: f64) -> Self {
        Cons::new(0.0, 0.0, depth_rest)
    }

    /// Total water depth `h = depth_rest + zeta`.
    pub fn depth(&self) -> f64 {
        self.depth_rest + self.zeta
    }

    fn wet_depth(&self) -> Result<f64> {
        let h = self.depth();
        if h > 0.0 {
            Ok(h)
        } else {
            Err(OwcError::DryState { depth: h })
        }
    }

    pub fn velocity(&self) -> Result<f64> {
        Ok(self.q / self.wet_depth()?)
    }

    pub fn is_finite(&self) -> bool {
        self.zeta.is_finite() && self.q.is_finite()
    }
}

/// Right- and left-going characteristic variables at a point.
///
/// `r` is advected with speed `lambda_plus`, `l` with speed `-lambda_minus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannPair {
    pub r: f64,
    pub l: f64,
    pub depth_ref: f64,
}

/// Physical flux `(q, g/2 (h^2 - h_ref^2) + q^2/h)`.
pub fn flux(u: Cons, g: f64) -> Result<(f64, f64)> {
    let h = u.wet_depth()?;
    let h_ref = u.depth_rest;
    let momentum = 0.5 * g * (h * h - h_ref * h_ref) + u.q * u.q / h;
    Ok((u.q, momentum))
}

/// Characteristic speeds `(lambda_plus, lambda_minus)`; the left-going wave
/// travels at `-lambda_minus`.
pub fn wave_speeds(u: Cons, g: f64) -> Result<(f64, f64)> {
    let h = u.wet_depth()?;
    let c = (g * h).sqrt();
    let v = u.q / h;
    Ok((v + c, c - v))
}

pub fn to_riemann(u: Cons, g: f64) -> Result<RiemannPair> {
    let h = u.wet_depth()?;
    let depth_term = 2.0 * ((g * h).sqrt() - (g * u.depth_rest).sqrt());
    let v = u.q / h;
    Ok(RiemannPair {
        r: depth_term + v,
        l: depth_term - v,
        depth_ref: u.depth_rest,
    })
}

pub fn from_riemann(p: RiemannPair, g: f64) -> Result<Cons> {
    let c_ref = (g * p.depth_ref).sqrt();
    // relative change of the wave celerity; zeta = h_ref ((1 + s)^2 - 1)
    let s = 0.25 * (p.r + p.l) / c_ref;
    if s <= -1.0 {
        return Err(OwcError::DryState { depth: p.depth_ref * (1.0 + s) * (1.0 + s) });
    }
    let zeta = p.depth_ref * s * (2.0 + s);
    let h = p.depth_ref + zeta;
    Ok(Cons {
        zeta,
        q: 0.5 * h * (p.r - p.l),
        depth_rest: p.depth_ref,
    })
}
