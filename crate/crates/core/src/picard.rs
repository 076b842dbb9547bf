//! `Φ_δ` as the fixed point of the integral operator
//!
//! ```text
//! τ_δ(h)(x) = C_{δ,h} ∫₀ˣ H(η) dη,   H(η) = exp(−2∫₀^η ξ/(1+δh(ξ)) dξ) / (1+δh(η)),
//! ```
//!
//! with `1/C_{δ,h} = ∫₀^∞ H`. The operator is a contraction on non-negative
//! functions bounded by 1 for `0 ≤ δ < δ₀`, where `δ₀` is the positive root
//! of `(x/2)(1+x)^{3/2}(3+x)[1+(1+x)^{3/2}] = 1`.
//!
//! Both integrals are running integrals over the sampling grid, so one
//! application of `τ_δ` is `O(N)`. The `∫₀^∞` is truncated at `x_max`; the
//! integrand is below `exp(−η²/(1+δ₀))`, i.e. `< 1e−36` at `η = 10`.

use crate::error::{Error, Result};
use crate::grid::{cumulative_integral, GridFunction};
use crate::scalar::Real;
use crate::series::DeltaParam;
use crate::specfun::erf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig<T> {
    pub x_max: T,
    pub step: T,
    /// Stop once the sup-norm of successive iterates drops below this.
    pub fp_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for PicardConfig<T> {
    fn default() -> Self {
        Self {
            x_max: T::lit(10.0),
            step: T::lit(1e-2),
            fp_tol: T::lit(1e-10),
            max_iter: 200,
        }
    }
}

impl<T: Real> PicardConfig<T> {
    pub fn validate(&self) -> Result<()> {
        crate::grid::interval_count(self.x_max, self.step)?;
        if !(self.fp_tol > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "fp_tol must be positive, got {}",
                self.fp_tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

fn delta0_lhs<T: Real>(x: T) -> T {
    let s = (T::one() + x).powf(T::lit(1.5));
    x * T::lit(0.5) * s * (T::lit(3.0) + x) * (T::one() + s)
}

/// Positive root of `(x/2)(1+x)^{3/2}(3+x)[1+(1+x)^{3/2}] = 1` by bisection on `[0, 1]`,
/// to a bracket width of `tol`.
pub fn solve_delta0<T: Real>(tol: T) -> Result<T> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let (mut lo, mut hi) = (T::zero(), T::one());
    let half = T::lit(0.5);
    while hi - lo > tol {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if delta0_lhs(mid) < T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * half)
}

/// `δ₀ ≈ 0.2037`, to machine precision.
pub fn delta0<T: Real>() -> T {
    solve_delta0(T::epsilon()).expect("positive tolerance")
}

/// `C = 2/(1+(1+δ₀)^{3/2})`.
pub fn contraction_constant<T: Real>() -> T {
    let d0 = delta0::<T>();
    T::lit(2.0) / (T::one() + (T::one() + d0).powf(T::lit(1.5)))
}

/// `C = δ₀(1+δ₀)^{3/2}(3+δ₀)`; equal to [`contraction_constant`] because `δ₀` solves its defining equation.
pub fn contraction_constant_product<T: Real>() -> T {
    let d0 = delta0::<T>();
    d0 * (T::one() + d0).powf(T::lit(1.5)) * (T::lit(3.0) + d0)
}

/// `L = C/(δ₀(1−C))`, bounding `‖Φ_{δ₁} − Φ_{δ₂}‖_∞ / |δ₁ − δ₂|` on `[0, δ₀)`.
pub fn lipschitz_constant<T: Real>() -> T {
    let c = contraction_constant::<T>();
    c / (delta0::<T>() * (T::one() - c))
}

fn check_delta<T: Real>(delta: DeltaParam<T>) -> Result<T> {
    let d = delta.value();
    let d0 = delta0::<T>();
    if d >= T::zero() && d < d0 {
        Ok(d)
    } else {
        Err(Error::DeltaOutOfRange {
            delta: d.as_f64(),
            delta0: d0.as_f64(),
        })
    }
}

fn check_unit_range<T: Real>(h: &GridFunction<T>) -> Result<()> {
    let slack = T::lit(64.0) * T::epsilon();
    match h
        .values()
        .iter()
        .position(|&v| v < -slack || v > T::one() + slack)
    {
        None => Ok(()),
        Some(i) => Err(Error::InvalidArgument(format!(
            "input must take values in [0, 1]; h({}) = {}",
            h.x(i),
            h.values()[i]
        ))),
    }
}

/// Running integral of `H`; its last entry is `1/C_{δ,h}`.
fn running_kernel_integral<T: Real>(h: &GridFunction<T>, d: T) -> Vec<T> {
    let step = h.step();
    let conductivity: Vec<T> = h.values().iter().map(|&v| T::one() + d * v).collect();
    let inner: Vec<T> = conductivity
        .iter()
        .enumerate()
        .map(|(i, k)| h.x(i) / *k)
        .collect();
    let inner = cumulative_integral(&inner, step);
    let kernel: Vec<T> = inner
        .iter()
        .zip(&conductivity)
        .map(|(p, k)| (T::lit(-2.0) * *p).exp() / *k)
        .collect();
    cumulative_integral(&kernel, step)
}

/// `1/C_{δ,h} = ∫₀^∞ H(η) dη`, truncated at the grid end.
pub fn inverse_normalization<T: Real>(h: &GridFunction<T>, delta: DeltaParam<T>) -> Result<T> {
    let d = check_delta(delta)?;
    check_unit_range(h)?;
    Ok(running_kernel_integral(h, d)[h.len() - 1])
}

/// One application of `τ_δ` on the grid of `h`.
pub fn apply_tau<T: Real>(h: &GridFunction<T>, delta: DeltaParam<T>) -> Result<GridFunction<T>> {
    let d = check_delta(delta)?;
    check_unit_range(h)?;
    tau(h, d)
}

fn tau<T: Real>(h: &GridFunction<T>, d: T) -> Result<GridFunction<T>> {
    let running = running_kernel_integral(h, d);
    let total = running[running.len() - 1];
    let values = running.into_iter().map(|q| q / total).collect();
    GridFunction::from_values(h.x_max(), h.step(), values)
}

/// Result of [`solve_fixed_point`].
#[derive(Debug, Clone)]
pub struct FixedPointSolution<T> {
    pub solution: GridFunction<T>,
    pub iterations: usize,
    /// `sup|h_{k+1} − h_k|` for every iteration performed.
    pub increments: Vec<T>,
}

impl<T: Real> FixedPointSolution<T> {
    /// Successive increment ratios `‖h_{k+1}−h_k‖ / ‖h_k−h_{k−1}‖`.
    pub fn contraction_ratios(&self) -> Vec<T> {
        self.increments
            .windows(2)
            .filter(|w| w[0] > T::zero())
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Iterates `h_{k+1} = τ_δ(h_k)` from `h₀ = erf` until successive iterates
/// differ by less than `fp_tol` in the sup norm.
pub fn solve_fixed_point<T: Real>(
    delta: DeltaParam<T>,
    cfg: &PicardConfig<T>,
) -> Result<FixedPointSolution<T>> {
    cfg.validate()?;
    let d = check_delta(delta)?;
    let mut h = GridFunction::from_fn(cfg.x_max, cfg.step, erf)?;
    let mut increments = Vec::new();
    for k in 1..=cfg.max_iter {
        // Iterates are not re-checked against [0, 1]: on coarse grids the
        // quadrature may overshoot 1 slightly, which the iteration tolerates.
        let next = tau(&h, d)?;
        let inc = next.sup_distance(&h)?;
        increments.push(inc);
        h = next;
        // τ₀ ignores its argument: one application is already the fixed point.
        if inc < cfg.fp_tol || d == T::zero() {
            return Ok(FixedPointSolution {
                solution: h,
                iterations: k,
                increments,
            });
        }
    }
    Err(Error::FixedPointNonConvergence {
        delta: d.as_f64(),
        iterations: cfg.max_iter,
        increment: increments.last().map_or(f64::NAN, |v| v.as_f64()),
    })
}
