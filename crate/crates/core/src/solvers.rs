//! Small root finders used by the boundary couplers and the dispersion solver.

use crate::error::{OwcError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Stop once the max-norm of the residual falls below this.
    pub tolerance: f64,
    /// Hard acceptance bound checked on the returned point.
    pub accept: f64,
    /// Smallest damping factor tried by the line search.
    pub min_damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iterations: 50,
            tolerance: 1e-12,
            accept: 1e-10,
            min_damping: 1.0 / 1024.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSolution {
    pub x: [f64; 2],
    pub residual: f64,
    pub iterations: usize,
}

fn norm(r: [f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Damped Newton iteration for a 2x2 system.
///
/// `system` returns the residual and Jacobian at a point, or `None` when the
/// point lies outside the domain of the residual (e.g. a dry state); the line
/// search then halves the step.
pub fn newton_2x2<F>(system: F, x0: [f64; 2], opts: &NewtonOptions) -> Result<NewtonSolution>
where
    F: Fn([f64; 2]) -> Option<([f64; 2], [[f64; 2]; 2])>,
{
    let no_convergence = |iterations, residual| OwcError::NoConvergence {
        what: "2x2 Newton",
        iterations,
        residual,
    };

    let mut x = x0;
    let (mut res, mut jac) = system(x).ok_or(OwcError::DryState { depth: f64::NAN })?;
    let mut iterations = 0;

    while norm(res) > opts.tolerance {
        if iterations == opts.max_iterations {
            break;
        }
        iterations += 1;

        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(no_convergence(iterations, norm(res)));
        }
        let dx0 = (-res[0] * jac[1][1] + res[1] * jac[0][1]) / det;
        let dx1 = (-res[1] * jac[0][0] + res[0] * jac[1][0]) / det;

        let mut damping = 1.0;
        let accepted = loop {
            let trial = [x[0] + damping * dx0, x[1] + damping * dx1];
            if let Some((r, j)) = system(trial) {
                if norm(r) < norm(res) {
                    break Some((trial, r, j));
                }
            }
            damping *= 0.5;
            if damping < opts.min_damping {
                break None;
            }
        };
        match accepted {
            Some((trial, r, j)) => {
                x = trial;
                res = r;
                jac = j;
            }
            // no decrease possible: we are at round-off level or stuck
            None => break,
        }
    }

    let residual = norm(res);
    if residual < opts.accept {
        Ok(NewtonSolution { x, residual, iterations })
    } else {
        Err(no_convergence(iterations, residual))
    }
}

/// Safeguarded Newton on a bracket `[lo, hi]` where `f` changes sign.
///
/// Newton steps that leave the current bracket (or fail to shrink it fast
/// enough) are replaced by bisection.
pub fn bracketed_newton<F>(
    f: F,
    lo: f64,
    hi: f64,
    seed: f64,
    tolerance: f64,
    what: &'static str,
) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(OwcError::NoRoot { what, lo, hi });
    }
    // orient so that f(a) < 0 < f(b)
    let (mut a, mut b) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };

    let mut x = if seed > lo.min(hi) && seed < lo.max(hi) {
        seed
    } else {
        0.5 * (lo + hi)
    };
    // previous step length; Newton is only trusted while it at least halves it
    let mut last_step = (b - a).abs();
    let max_iterations = 200;
    for _ in 0..max_iterations {
        let (fx, dfx) = f(x);
        if fx.abs() < tolerance {
            return Ok(x);
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        if (b - a).abs() <= f64::EPSILON * (1.0 + x.abs()) {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        let inside = newton.is_finite() && (newton - a) * (newton - b) < 0.0;
        let next = if inside && 2.0 * (newton - x).abs() <= last_step {
            newton
        } else {
            0.5 * (a + b)
        };
        last_step = (next - x).abs();
        x = next;
    }
    let (fx, _) = f(x);
    if fx.abs() < tolerance {
        Ok(x)
    } else {
        Err(OwcError::NoConvergence {
            what,
            iterations: max_iterations,
            residual: fx.abs(),
        })
    }
}
