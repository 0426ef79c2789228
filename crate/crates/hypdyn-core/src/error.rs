use thiserror::Error;

use crate::spaces::{BoundaryLabel, Point};

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the lab. Numerical non-convergence is distinguished
/// from domain/configuration problems so callers can map them to exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point ({}, {}) violates the domain of {space}: {reason}", .point.c0, .point.c1)]
    Domain {
        space: &'static str,
        point: Point,
        reason: &'static str,
    },

    #[error("label {label:?} is not valid for {space}")]
    InvalidLabel {
        space: &'static str,
        label: BoundaryLabel,
    },

    #[error("no exact Busemann formula declared for this (space, label)")]
    NotAvailable,

    #[error("map has no exact inverse")]
    NoInverse,

    #[error("tail certificate failed: |g(T) - g(T/2)| = {gap:.3e} > {tol:.3e} at T = {t_max}")]
    TailNotConverged { gap: f64, tol: f64, t_max: f64 },

    #[error("dilation trace decreased by {drop:.3e} at t = {t}: non-geodesic anchor or numerical fault")]
    MonotonicityViolated { t: f64, drop: f64 },

    #[error("solver failed after {steps} completed steps: best residual {residual:.3e}")]
    SolverFailed { steps: usize, residual: f64 },

    #[error("map is not certified repelling at the requested anchor")]
    NoRepellingCertificate,

    #[error("pulled-back families did not settle within budget: spread {spread:.3e} > {tol:.3e} at depth {depth}")]
    ClustersDiverged { spread: f64, tol: f64, depth: usize },

    #[error("horosphere level c = {c} was never exited by a forward probe within {steps} steps")]
    HorosphereExitFailed { c: f64, steps: usize },

    #[error("operation requires an elliptic map; classification was {class}")]
    NotElliptic { class: String },

    #[error("orbit is not escaping with bounded step: {reason}")]
    OrbitPrecondition { reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors that signal numerical non-convergence rather than a
    /// misuse of the API or an out-of-domain input.
    pub fn is_nonconvergence(&self) -> bool {
        matches!(
            self,
            Error::TailNotConverged { .. }
                | Error::ClustersDiverged { .. }
                | Error::SolverFailed { .. }
                | Error::MonotonicityViolated { .. }
        )
    }
}
