//! Finite-difference solvers and diagnostics for birth-and-spread growth models.
//!
//! The library simulates height functions `u(x, t)` on a uniform square grid
//! that grow under a localized source `f(x)` while each level set of `u`
//! spreads horizontally with a prescribed normal velocity:
//!
//! * forced mean curvature flow, `V = kappa + 1`;
//! * truncated inverse mean curvature flow, `V = 1/chi(kappa)` (the volcano
//!   model);
//! * plain eikonal spreading, `V = delta`.
//!
//! The quantity of interest is the asymptotic growth speed `u(x, t)/t` for
//! large `t`. The crate ships the discrete spatial operators ([`stencils`]),
//! the explicit time steppers and the nucleation/propagation splitting driver
//! ([`solvers`]), the source-term families used in the experiments
//! ([`sources`]), independent ground truths for the expected speeds and
//! profiles ([`oracles`]), and speed estimation plus structural-invariant
//! monitors ([`analysis`]).

pub mod analysis;
pub mod grid;
pub mod oracles;
pub mod solvers;
pub mod sources;
pub mod stencils;

use std::fmt;

/// Errors shared across the solver and diagnostic modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented constraint.
    Config(String),
    /// A time stepper produced a non-finite value.
    BlowUp {
        scheme: &'static str,
        step: usize,
        time: f64,
        sup_abs: f64,
    },
    /// The tracked circle radius reached zero before the requested time.
    Collapse { time: f64 },
    /// No crossing of the requested level was found along a grid ray.
    NoCrossing { level: f64 },
    /// A least-squares fit was requested on degenerate abscissae.
    DegenerateFit,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::BlowUp {
                scheme,
                step,
                time,
                sup_abs,
            } => write!(
                f,
                "solver blow-up: scheme {scheme} produced a non-finite value at step {step} \
                 (t = {time}), sup |u| of finite entries = {sup_abs}"
            ),
            Error::Collapse { time } => {
                write!(f, "circle collapsed to zero radius at t = {time}")
            }
            Error::NoCrossing { level } => {
                write!(f, "no crossing of level {level} along an axis ray")
            }
            Error::DegenerateFit => write!(f, "least-squares fit needs two distinct x values"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
