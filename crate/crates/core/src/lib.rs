//! Nonlinear shallow-water model of an oscillating water column (OWC) wave
//! energy converter.
//!
//! Waves forced at `x = -l` travel over a bottom step at `x = 0`, meet a fixed
//! partially immersed structure on `[l0 - r, l0 + r]` and enter a chamber
//! closed by a wall at `x = l1`. The exterior is split into three flat-bottom
//! segments advanced with Lax-Friedrichs; every interface is handled through
//! Riemann invariants:
//!
//! * [`model`]: configuration, grid, time controls and state;
//! * [`physics`]: flux, wave speeds and Riemann invariant maps;
//! * [`stepper`]: segment updates and the per-step orchestration;
//! * [`boundary`]: entry, step, structure-wall and end-wall couplers;
//! * [`diagnostics`]: energy audit, interior pressure and wave power;
//! * [`reference`]: a classical single-domain run for comparisons;
//! * [`scenario`], [`output`], [`run`]: scenario files, CSV output and the
//!   experiment drivers behind the `owc` binary.

pub mod boundary;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod output;
pub mod physics;
pub mod reference;
pub mod run;
pub mod scenario;
pub mod solvers;
pub mod stepper;

pub use error::{OwcError, Result};
pub use model::{build_grid, forcing, initial_state, Grid, PhysicalConfig, State, TimeControls};
pub use physics::{Cons, RiemannPair};
pub use stepper::{advance, Simulation};
