//! The modified error function `Φ_δ`: the solution of
//! `[(1+δy)y']' + 2xy' = 0`, `y(0) = 0`, `y(∞) = 1`, which appears in the
//! similarity solution of a one-phase Stefan problem whose thermal
//! conductivity depends linearly on temperature.
//!
//! `Φ_δ` is computed three independent ways:
//!
//! * [`picard`] — fixed point of an integral operator (contraction for `0 ≤ δ < δ₀`);
//! * [`shooting`] — shooting on the initial slope, valid for any `δ > −1`;
//! * [`series`] — partial sums `Ψ_{δ,m}` of the power series in `δ`.
//!
//! [`analysis`] compares them and checks qualitative properties; [`cli`]
//! backs the `moderf` binary.
//!
//! All numerics are generic over [`Real`]; the aliases below fix `f64`.

// `!(x > 0)` is used on purpose so that NaN arguments are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod grid;
pub mod picard;
pub mod scalar;
pub mod series;
pub mod shooting;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;
pub use series::{ApproxOrder, DeltaParam};

pub type GridFunction = grid::GridFunction<f64>;
pub type GridFunction32 = grid::GridFunction<f32>;
pub type PicardConfig = picard::PicardConfig<f64>;
pub type PicardConfig32 = picard::PicardConfig<f32>;
pub type ShootingConfig = shooting::ShootingConfig<f64>;
pub type ShootingConfig32 = shooting::ShootingConfig<f32>;
pub type QuadratureSpec = specfun::QuadratureSpec<f64>;
pub type QuadratureSpec32 = specfun::QuadratureSpec<f32>;
pub type SolverConfig = analysis::SolverConfig<f64>;
pub type SeriesGrid = series::SeriesGrid<f64>;
pub type ErrorReport = analysis::ErrorReport<f64>;
pub type PropertyReport = analysis::PropertyReport<f64>;
pub type Delta = series::DeltaParam<f64>;
