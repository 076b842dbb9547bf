//! Uniformly sampled functions on `[0, x_max]`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A real function sampled at `x_i = i·step`, `i = 0..=n`, with `n·step = x_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    x_max: T,
    step: T,
    values: Vec<T>,
}

/// Number of intervals for `[0, x_max]` at `step`, rejecting non-commensurate pairs.
pub fn interval_count<T: Real>(x_max: T, step: T) -> Result<usize> {
    if !(x_max > T::zero() && x_max.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "x_max must be positive, got {x_max}"
        )));
    }
    if !(step > T::zero() && step < x_max) {
        return Err(Error::InvalidGrid(format!(
            "step must satisfy 0 < step < x_max, got {step}"
        )));
    }
    let ratio = x_max / step;
    let n = ratio.round();
    if (n - ratio).abs() > T::lit(1e-6) * n.max(T::one()) {
        return Err(Error::InvalidGrid(format!(
            "x_max = {x_max} is not a whole multiple of step = {step}"
        )));
    }
    n.to_usize()
        .ok_or_else(|| Error::InvalidGrid(format!("too many grid nodes for step {step}")))
}

impl<T: Real> GridFunction<T> {
    /// Samples `f` on the grid.
    pub fn from_fn(x_max: T, step: T, mut f: impl FnMut(T) -> T) -> Result<Self> {
        let n = interval_count(x_max, step)?;
        let values = (0..=n).map(|i| f(node(x_max, n, i))).collect();
        Self::from_values(x_max, step, values)
    }

    /// Samples a fallible `f` on the grid, stopping at the first error.
    pub fn try_from_fn(x_max: T, step: T, mut f: impl FnMut(T) -> Result<T>) -> Result<Self> {
        let n = interval_count(x_max, step)?;
        let values = (0..=n)
            .map(|i| f(node(x_max, n, i)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(x_max, step, values)
    }

    pub fn from_values(x_max: T, step: T, values: Vec<T>) -> Result<Self> {
        let n = interval_count(x_max, step)?;
        if values.len() != n + 1 {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                n + 1,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "non-finite value {} at node {i}",
                values[i]
            )));
        }
        Ok(Self {
            x_max,
            step,
            values,
        })
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn last(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Abscissa of node `i`.
    pub fn x(&self, i: usize) -> T {
        node(self.x_max, self.values.len() - 1, i)
    }

    /// `(x_i, value_i)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.x(i), v))
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && (self.x_max - other.x_max).abs() <= T::epsilon() * T::lit(16.0) * self.x_max
    }

    /// Discrete sup-norm distance; grids must match.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        if !self.same_grid(other) {
            return Err(Error::InvalidGrid(format!(
                "grids differ: {} nodes on [0, {}] vs {} nodes on [0, {}]",
                self.len(),
                self.x_max,
                other.len(),
                other.x_max
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }

    /// Node index and value of the largest `|self − other|`.
    pub fn sup_witness(&self, other: &Self) -> Result<(usize, T)> {
        self.sup_distance(other)?;
        let mut best = (0, T::zero());
        for (i, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            let d = (*a - *b).abs();
            if d > best.1 {
                best = (i, d);
            }
        }
        Ok(best)
    }

    /// Five-point central first derivative at interior node `i` (`2 ≤ i ≤ len−3`).
    pub fn first_derivative(&self, i: usize) -> T {
        let v = &self.values;
        (v[i - 2] - T::lit(8.0) * v[i - 1] + T::lit(8.0) * v[i + 1] - v[i + 2])
            / (T::lit(12.0) * self.step)
    }

    /// Five-point central second derivative at interior node `i` (`2 ≤ i ≤ len−3`).
    pub fn second_derivative(&self, i: usize) -> T {
        let v = &self.values;
        (-v[i - 2] + T::lit(16.0) * v[i - 1] - T::lit(30.0) * v[i] + T::lit(16.0) * v[i + 1]
            - v[i + 2])
            / (T::lit(12.0) * self.step * self.step)
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::InvalidGrid("grids differ".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Self::from_values(self.x_max, self.step, values)
    }
}

#[inline]
fn node<T: Real>(x_max: T, n: usize, i: usize) -> T {
    if i == n {
        x_max
    } else {
        x_max * T::from_index(i) / T::from_index(n)
    }
}

/// Running integral `∫₀^{x_i} f` of uniformly sampled `f`, fourth order.
///
/// Each interval is integrated with the cubic through its four nearest
/// samples: `h/24·(−f₋₁ + 13f₀ + 13f₁ − f₂)` in the interior and the
/// one-sided `h/24·(9f₀ + 19f₁ − 5f₂ + f₃)` at both ends. Fewer than four
/// samples fall back to the trapezoid rule.
pub fn cumulative_integral<T: Real>(f: &[T], h: T) -> Vec<T> {
    let n = f.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(T::zero());
    let w = h / T::lit(24.0);
    let (c9, c19, c5, c13) = (T::lit(9.0), T::lit(19.0), T::lit(5.0), T::lit(13.0));
    let mut acc = T::zero();
    for i in 0..n - 1 {
        let piece = if n < 4 {
            h * (f[i] + f[i + 1]) * T::lit(0.5)
        } else if i == 0 {
            w * (c9 * f[0] + c19 * f[1] - c5 * f[2] + f[3])
        } else if i == n - 2 {
            w * (c9 * f[n - 1] + c19 * f[n - 2] - c5 * f[n - 3] + f[n - 4])
        } else {
            w * (c13 * (f[i] + f[i + 1]) - f[i - 1] - f[i + 2])
        };
        acc = acc + piece;
        out.push(acc);
    }
    out
}
