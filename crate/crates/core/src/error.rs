use std::io;

use thiserror::Error;

/// Everything that can go wrong while configuring or advancing a simulation.
#[derive(Debug, Error)]
pub enum OwcError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("segment {segment} has length {length} which is not a multiple of dx = {dx}")]
    Geometry {
        segment: &'static str,
        length: f64,
        dx: f64,
    },

    #[error("dry state: water depth {depth} is not positive")]
    DryState { depth: f64 },

    #[error("CFL violation at node {node}: speed {speed} gives Courant number {courant}")]
    Cfl { node: usize, speed: f64, courant: f64 },

    #[error("characteristic direction failure: interpolation denominator {denominator} is not positive")]
    CharacteristicDirection { denominator: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("no root for {what} in [{lo}, {hi}]")]
    NoRoot { what: &'static str, lo: f64, hi: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("at t = {t} ({location}): {source}")]
    At {
        t: f64,
        location: &'static str,
        #[source]
        source: Box<OwcError>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl OwcError {
    /// Attach the simulation time and the place in the update where the error surfaced.
    pub fn at(self, t: f64, location: &'static str) -> Self {
        OwcError::At {
            t,
            location,
            source: Box::new(self),
        }
    }

    /// True for failures of the numerics (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        match self {
            OwcError::At { source, .. } => source.is_numerical(),
            OwcError::DryState { .. }
            | OwcError::Cfl { .. }
            | OwcError::CharacteristicDirection { .. }
            | OwcError::NoConvergence { .. }
            | OwcError::NoRoot { .. }
            | OwcError::NonFinite(_) => true,
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, OwcError>;
