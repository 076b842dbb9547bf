use thiserror::Error;

/// Failures reported by the special functions, quadrature and solvers.
///
/// Payloads are stored as `f64` regardless of the scalar type the caller
/// computed with.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("argument {x} out of domain for {function}: {reason}")]
    Domain {
        function: &'static str,
        x: f64,
        reason: &'static str,
    },

    #[error("{function}({x}) overflows the scalar range")]
    Overflow { function: &'static str, x: f64 },

    #[error("quadrature on [{a}, {b}] did not converge within depth {max_depth}")]
    QuadratureNonConvergence { a: f64, b: f64, max_depth: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(
        "delta = {delta} outside the contraction range [0, {delta0}) of the fixed-point operator"
    )]
    DeltaOutOfRange { delta: f64, delta0: f64 },

    #[error("delta = {0} must exceed -1 (positive conductivity)")]
    DeltaBelowMinusOne(f64),

    #[error(
        "fixed-point iteration for delta = {delta} did not converge in {iterations} iterations \
         (last increment {increment:e})"
    )]
    FixedPointNonConvergence {
        delta: f64,
        iterations: usize,
        increment: f64,
    },

    #[error("singularity 1 + delta*y -> 0 at x = {x} (delta = {delta}, slope = {slope})")]
    Singularity { x: f64, delta: f64, slope: f64 },

    #[error("integrator exceeded {steps} steps at x = {x} (delta = {delta}, slope = {slope})")]
    StepLimit {
        x: f64,
        delta: f64,
        slope: f64,
        steps: usize,
    },

    #[error(
        "slope bracket [{lo}, {hi}] does not bracket the far-field condition for delta = {delta} \
         (F(lo) = {f_lo}, F(hi) = {f_hi})"
    )]
    BracketFailure {
        delta: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("shooting for delta = {delta} did not converge in {iterations} root iterations (F = {residual:e})")]
    ShootingNonConvergence {
        delta: f64,
        iterations: usize,
        residual: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
