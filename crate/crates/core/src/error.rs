use thiserror::Error;

use crate::model::MethodId;

/// Errors raised by the solvers and their helpers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} is outside the domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid `{field}`: {reason} (got {value})")]
    Validation {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("no convergence after {iterations} iterations (bracket width {width})")]
    Convergence { iterations: usize, width: f64 },

    #[error(
        "invariant violated for {method} at Ste = {ste}, Bi = {bi}: \
         p(lo) = {p_lo}, p(hi) = {p_hi}"
    )]
    EndpointSign {
        method: MethodId,
        ste: f64,
        bi: f64,
        p_lo: f64,
        p_hi: f64,
    },

    #[error("invariant violated for {method}: {detail}")]
    Invariant { method: MethodId, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
