//! Coefficients of the expansion `Φ_δ = Σ φₙ δⁿ` and its partial sums `Ψ_{δ,m}`.
//!
//! `φ₀ = erf` and `φ₁` are closed forms in `erf` and `exp`. The second
//! coefficient solves `φ₂'' + 2xφ₂' = g₂`, `φ₂(0) = φ₂(∞) = 0`, where `g₂`
//! is the eight-term source built from `φ₀` and `φ₁`. With the homogeneous
//! pair `erf` (zero at 0) and `erfc` (zero at ∞), whose Wronskian is
//! `−(2/√π)e^{−x²}`,
//!
//! ```text
//! φ₂(x) = −(√π/2) [ erfc(x) ∫₀ˣ erf(s) g₂(s) e^{s²} ds + erf(x) ∫ₓ^∞ erfc(s) g₂(s) e^{s²} ds ].
//! ```
//!
//! The frequently quoted shortcut `(√π/2)·g₂(x)·[∫₀ˣ erfc·e^{y²} − (√π/2)·erfc·erfi]`,
//! which takes `g₂` outside both integrals, does not satisfy that equation;
//! it is kept as [`phi2_printed`] so its approximation error can be reported
//! next to the exact coefficient.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::scalar::Real;
use crate::specfun::{
    adaptive_quad, dawson_nonneg, erf, erfc, erfcx_nonneg, integral_erfc_exp, QuadratureSpec,
};

/// Order `m ∈ {0, 1, 2}` of the partial sum `Ψ_{δ,m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ApproxOrder {
    Zero,
    One,
    Two,
}

impl ApproxOrder {
    pub const ALL: [ApproxOrder; 3] = [ApproxOrder::Zero, ApproxOrder::One, ApproxOrder::Two];

    pub fn new(m: usize) -> Result<Self> {
        match m {
            0 => Ok(Self::Zero),
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            _ => Err(Error::InvalidArgument(format!(
                "approximation order must be 0, 1 or 2, got {m}"
            ))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Self::Zero => 0,
            Self::One => 1,
            Self::Two => 2,
        }
    }
}

/// Dimensionless conductivity slope `δ`, restricted to `δ > −1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DeltaParam<T>(T);

impl<T: Real> DeltaParam<T> {
    pub fn new(delta: T) -> Result<Self> {
        if delta > -T::one() && delta.is_finite() {
            Ok(Self(delta))
        } else {
            Err(Error::DeltaBelowMinusOne(delta.as_f64()))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

fn require_nonneg<T: Real>(function: &'static str, x: T) -> Result<()> {
    if x >= T::zero() {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            x: x.as_f64(),
            reason: "requires x >= 0",
        })
    }
}

/// `φ₀ = erf`.
pub fn phi0<T: Real>(x: T) -> T {
    erf(x)
}

/// `φ₁(x) = (½ − 1/π) erf x + (1/π)(1 − e^{−2x²}) − (1/√π) x erf(x) e^{−x²} − ½ erf²x`.
pub fn phi1<T: Real>(x: T) -> T {
    let pi = T::PI();
    let half = T::lit(0.5);
    let e = erf(x);
    let g = (-x * x).exp();
    (half - pi.recip()) * e + (T::one() - g * g) / pi - x * e * g / pi.sqrt() - half * e * e
}

/// `e^{x²}·g₂(x)`: every exponential in `g₂` lowered by one power of `e^{−x²}`.
fn g2_unscaled<T: Real>(x: T) -> T {
    let pi = T::PI();
    let sqrt_pi = pi.sqrt();
    let pi_sqrt_pi = pi * sqrt_pi;
    let e = erf(x);
    let g = (-x * x).exp();
    let c = T::lit;
    c(16.0) / pi * e * g + c(4.0) / pi * (c(2.0) / pi - T::one()) * g
        - c(12.0) / pi_sqrt_pi * x * g * g
        + (c(4.0) / sqrt_pi - c(8.0) / pi_sqrt_pi) * x * e
        - c(12.0) / sqrt_pi * x * e * e
        + c(4.0) / pi_sqrt_pi * x
        - c(8.0) / pi * x * x * e * g
        + c(4.0) / sqrt_pi * x * x * x * e * e
}

/// Source term `g₂` of the second-order coefficient equation, term by term.
pub fn g2<T: Real>(x: T) -> T {
    let pi = T::PI();
    let sqrt_pi = pi.sqrt();
    let pi_sqrt_pi = pi * sqrt_pi;
    let e = erf(x);
    let g1 = (-x * x).exp();
    let g2 = (T::lit(-2.0) * x * x).exp();
    let g3 = (T::lit(-3.0) * x * x).exp();
    let c = T::lit;
    c(16.0) / pi * e * g2 + c(4.0) / pi * (c(2.0) / pi - T::one()) * g2
        - c(12.0) / pi_sqrt_pi * x * g3
        + (c(4.0) / sqrt_pi - c(8.0) / pi_sqrt_pi) * x * e * g1
        - c(12.0) / sqrt_pi * x * e * e * g1
        + c(4.0) / pi_sqrt_pi * x * g1
        - c(8.0) / pi * x * x * e * g2
        + c(4.0) / sqrt_pi * x * x * x * e * e * g1
}

/// Upper limit standing in for `+∞` in the tail integral of `φ₂`; the
/// integrand there is below `e^{−100}` relative to its peak.
fn tail_limit<T: Real>(x: T) -> T {
    (x + T::lit(3.0)).max(T::lit(10.0))
}

/// Second coefficient `φ₂`, the solution of `φ₂'' + 2xφ₂' = g₂` vanishing at 0 and ∞.
pub fn phi2<T: Real>(x: T, spec: &QuadratureSpec<T>) -> Result<T> {
    require_nonneg("phi2", x)?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    let inner = adaptive_quad(|s| erf(s) * g2_unscaled(s), T::zero(), x, spec)?;
    let tail = adaptive_quad(|s| erfc(s) * g2_unscaled(s), x, tail_limit(x), spec)?;
    let half_sqrt_pi = T::PI().sqrt() * T::lit(0.5);
    Ok(-half_sqrt_pi * (erfc(x) * inner + erf(x) * tail))
}

/// The closed form `(√π/2)·g₂(x)·[∫₀ˣ erfc(y)e^{y²}dy − (√π/2)·erfc(x)·erfi(x)]`,
/// evaluated with the product through `erfc_scaled·dawson`.
///
/// Satisfies both boundary conditions but not the coefficient ODE; see the
/// module docs.
pub fn phi2_printed<T: Real>(x: T, spec: &QuadratureSpec<T>) -> Result<T> {
    require_nonneg("phi2_printed", x)?;
    let bracket = integral_erfc_exp(x, spec)? - erfcx_nonneg(x) * dawson_nonneg(x);
    Ok(T::PI().sqrt() * T::lit(0.5) * g2(x) * bracket)
}

/// Partial sum `Ψ_{δ,m}(x) = Σ_{n≤m} φₙ(x) δⁿ`.
pub fn psi<T: Real>(
    delta: DeltaParam<T>,
    order: ApproxOrder,
    x: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    require_nonneg("psi", x)?;
    let d = delta.value();
    let mut sum = phi0(x);
    if order >= ApproxOrder::One {
        sum = sum + d * phi1(x);
    }
    if order >= ApproxOrder::Two && d != T::zero() {
        sum = sum + d * d * phi2(x, spec)?;
    }
    Ok(sum)
}

/// `φ₀, φ₁, φ₂` (and the printed variant of `φ₂`) sampled once on a grid, so
/// that partial sums for many `δ` cost one pass each.
#[derive(Debug, Clone)]
pub struct SeriesGrid<T> {
    pub phi0: GridFunction<T>,
    pub phi1: GridFunction<T>,
    pub phi2: GridFunction<T>,
    pub phi2_printed: GridFunction<T>,
}

impl<T: Real> SeriesGrid<T> {
    pub fn new(x_max: T, step: T, spec: &QuadratureSpec<T>) -> Result<Self> {
        Ok(Self {
            phi0: GridFunction::from_fn(x_max, step, phi0)?,
            phi1: GridFunction::from_fn(x_max, step, phi1)?,
            phi2: GridFunction::try_from_fn(x_max, step, |x| phi2(x, spec))?,
            phi2_printed: GridFunction::try_from_fn(x_max, step, |x| phi2_printed(x, spec))?,
        })
    }

    /// `Ψ_{δ,m}` on the grid.
    pub fn psi(&self, delta: DeltaParam<T>, order: ApproxOrder) -> GridFunction<T> {
        self.combine(delta, order, &self.phi2)
    }

    /// `Ψ_{δ,2}` built with the printed closed form of `φ₂`.
    pub fn psi2_printed(&self, delta: DeltaParam<T>) -> GridFunction<T> {
        self.combine(delta, ApproxOrder::Two, &self.phi2_printed)
    }

    fn combine(
        &self,
        delta: DeltaParam<T>,
        order: ApproxOrder,
        second: &GridFunction<T>,
    ) -> GridFunction<T> {
        let d = delta.value();
        let values = (0..self.phi0.len())
            .map(|i| {
                let mut v = self.phi0.values()[i];
                if order >= ApproxOrder::One {
                    v = v + d * self.phi1.values()[i];
                }
                if order >= ApproxOrder::Two {
                    v = v + d * d * second.values()[i];
                }
                v
            })
            .collect();
        GridFunction::from_values(self.phi0.x_max(), self.phi0.step(), values)
            .expect("finite combination on a validated grid")
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // oracle digits quoted verbatim
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Same 40-term alternating series as the specfun oracle.
    fn erf_oracle(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for n in 0..60 {
            if n > 0 {
                fact *= n as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * x.powi(2 * n + 1) / (fact * (2 * n + 1) as f64);
        }
        sum * 2.0 / PI.sqrt()
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn order_and_delta_validation() {
        assert_eq!(ApproxOrder::new(2).unwrap(), ApproxOrder::Two);
        assert!(ApproxOrder::new(3).is_err());
        assert_eq!(ApproxOrder::One.index(), 1);
        assert!(DeltaParam::new(-1.0f64).is_err());
        assert!(DeltaParam::new(f64::NAN).is_err());
        assert_eq!(DeltaParam::new(-0.9f64).unwrap().value(), -0.9);
    }

    #[test]
    fn phi0_values() {
        assert_eq!(phi0(0.0f64), 0.0);
        assert!(phi0(6.0f64) > 1.0 - 1e-15);
        assert!((phi0(1.0f64) - 0.8427007929497149).abs() < 1e-14);
    }

    #[test]
    fn phi1_values() {
        assert_eq!(phi1(0.0f64), 0.0);
        assert!(phi1(8.0f64).abs() < 1e-12);
        let e = erf_oracle(1.0);
        let oracle = (0.5 - 1.0 / PI) * e + (1.0 - (-2.0f64).exp()) / PI
            - e * (-1.0f64).exp() / PI.sqrt()
            - 0.5 * e * e;
        // mpmath at 40 digits: -0.10163629127275558
        assert!((oracle + 0.10163629127275558).abs() < 1e-15);
        assert!((phi1(1.0f64) - oracle).abs() < 1e-14);
    }

    #[test]
    fn g2_values() {
        let at_zero = 4.0 / PI * (2.0 / PI - 1.0);
        assert!((g2(0.0f64) - at_zero).abs() < 1e-15);
        // (4/π)(2/π − 1) = −0.46267007559646051…
        assert!((at_zero + 0.462_670_075_596_460_5).abs() < 1e-15);
        assert!(g2(8.0f64).abs() < 1e-12);
        // mpmath: g2(1) = -0.54014098708356295
        assert!((g2(1.0f64) + 0.54014098708356295).abs() < 1e-14);
        for &x in &[0.0f64, 0.3, 1.0, 2.5, 4.0] {
            let scaled = g2_unscaled(x) * (-x * x).exp();
            assert!((scaled - g2(x)).abs() < 1e-15, "x = {x}");
        }
    }

    #[test]
    fn phi2_values() {
        let spec = QuadratureSpec::default();
        assert_eq!(phi2(0.0f64, &spec).unwrap(), 0.0);
        assert!(phi2(8.0f64, &spec).unwrap().abs() < 1e-10);
        // brute-force oracle: composite Simpson on both integrals
        let inner = simpson(|s| erf_oracle(s) * g2_unscaled(s), 0.0, 1.0, 20_000);
        let tail = simpson(|s| erfc(s) * g2_unscaled(s), 1.0, 12.0, 220_000);
        let oracle =
            -(PI.sqrt() / 2.0) * ((1.0 - erf_oracle(1.0)) * inner + erf_oracle(1.0) * tail);
        // mpmath (40 digits, exact ODE solution): 0.041815205880264176
        assert!((oracle - 0.041815205880264176).abs() < 1e-12);
        assert!((phi2(1.0f64, &spec).unwrap() - 0.041815205880264176).abs() < 1e-9);
        assert!(phi2(-1.0f64, &spec).is_err());
    }

    #[test]
    fn phi2_printed_values() {
        let spec = QuadratureSpec::default();
        assert_eq!(phi2_printed(0.0f64, &spec).unwrap(), 0.0);
        assert!(phi2_printed(8.0f64, &spec).unwrap().abs() < 1e-10);
        // mpmath: -0.19970136598619776
        assert!((phi2_printed(1.0f64, &spec).unwrap() + 0.19970136598619776).abs() < 1e-9);
    }

    #[test]
    fn psi_collapses() {
        let spec = QuadratureSpec::default();
        let zero = DeltaParam::new(0.0f64).unwrap();
        let d = DeltaParam::new(0.3f64).unwrap();
        for &x in &[0.0, 0.5, 1.0, 3.0] {
            assert_eq!(psi(zero, ApproxOrder::Two, x, &spec).unwrap(), erf(x));
            assert_eq!(psi(d, ApproxOrder::Zero, x, &spec).unwrap(), erf(x));
        }
        let d = DeltaParam::new(0.2f64).unwrap();
        let expected = erf_oracle(1.0) + 0.2 * -0.10163629127275558;
        assert!((psi(d, ApproxOrder::One, 1.0, &spec).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn phi1_sign_structure() {
        // φ₁ ≈ (½ − 1/π)(2/√π)x > 0 near the origin, crosses zero once at
        // x* = 0.34911850854515426 (mpmath), and stays negative beyond.
        let root = 0.349_118_508_545_154_26f64;
        assert!(phi1(root).abs() < 1e-15);
        for i in 1..=800 {
            let x = i as f64 * 0.01;
            let v = phi1(x);
            if x < root {
                assert!(v > 0.0, "phi1({x}) = {v}");
            } else if x < 5.0 {
                assert!(v < 0.0, "phi1({x}) = {v}");
            } else {
                // the tail cancels to exactly zero in double precision
                assert!(v <= 0.0, "phi1({x}) = {v}");
            }
        }
        // mpmath: min over the 0.01 grid on (0, 8] is −0.10179308417886018
        let min = (1..=800)
            .map(|i| phi1(i as f64 * 0.01))
            .fold(f64::INFINITY, f64::min);
        assert!((min + 0.101_793_084_178_860_18).abs() < 1e-14);
    }

    #[test]
    fn series_grid_matches_pointwise() {
        let spec = QuadratureSpec::default();
        let grid = SeriesGrid::new(4.0f64, 0.5, &spec).unwrap();
        let d = DeltaParam::new(0.15f64).unwrap();
        let psi2 = grid.psi(d, ApproxOrder::Two);
        for (x, v) in psi2.iter() {
            assert!((v - psi(d, ApproxOrder::Two, x, &spec).unwrap()).abs() < 1e-15);
        }
        let printed = grid.psi2_printed(d);
        let x = printed.x(2);
        let expected = erf(x) + 0.15 * phi1(x) + 0.0225 * phi2_printed(x, &spec).unwrap();
        assert!((printed.values()[2] - expected).abs() < 1e-15);
    }
}
