//! Error-function family and the quadrature used by the series coefficients.
//!
//! Everything that would overflow for moderate arguments is routed through
//! scaled forms: `erfc_scaled(x) = e^{x²} erfc(x)` and Dawson's integral
//! `F(x) = e^{-x²} ∫₀ˣ e^{t²} dt`. The imaginary error function is only
//! evaluated directly where `e^{x²}` is representable.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SERIES_TERMS: usize = 500;
const MAX_CF_TERMS: usize = 5000;

/// Tolerance policy for [`adaptive_quad`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub max_depth: usize,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(abs_tol: T, max_depth: usize) -> Result<Self> {
        if !(abs_tol > T::zero()) || !abs_tol.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "quadrature abs_tol must be positive, got {abs_tol}"
            )));
        }
        if max_depth < 1 {
            return Err(Error::InvalidArgument(
                "quadrature max_depth must be at least 1".into(),
            ));
        }
        Ok(Self { abs_tol, max_depth })
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            max_depth: 40,
        }
    }
}

#[inline]
fn two_over_sqrt_pi<T: Real>() -> T {
    T::FRAC_2_SQRT_PI()
}

/// `e^{-x²} Σ 2ⁿ x^{2n+1} / (2n+1)!!` — every term positive, no cancellation.
fn erf_series<T: Real>(x: T) -> T {
    let x2 = x * x;
    let two_x2 = x2 + x2;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_SERIES_TERMS {
        term = term * two_x2 / T::from_index(2 * n + 1);
        sum = sum + term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    two_over_sqrt_pi::<T>() * (-x2).exp() * sum
}

/// Continued fraction for `e^{x²} erfc(x)`, evaluated with modified Lentz.
///
/// `√π e^{x²} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`
fn erfcx_continued_fraction<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value().sqrt();
    let mut f = x;
    let mut c = f;
    let mut d = T::zero();
    let half = T::lit(0.5);
    for n in 1..MAX_CF_TERMS {
        let a = half * T::from_index(n);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    T::one() / (T::PI().sqrt() * f)
}

/// Error function `(2/√π) ∫₀ˣ e^{-t²} dt`.
///
/// Odd by construction: the magnitude is computed from `|x|` and the sign
/// reattached.
pub fn erf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let v = if ax.is_infinite() {
        T::one()
    } else if ax < T::lit(2.0) {
        erf_series(ax)
    } else {
        T::one() - (-ax * ax).exp() * erfcx_continued_fraction(ax)
    };
    if x.is_sign_negative() {
        -v
    } else {
        v
    }
}

/// Scaled complementary error function `e^{x²} erfc(x)` for `x ≥ 0`.
pub fn erfc_scaled<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::Domain {
            function: "erfc_scaled",
            x: x.as_f64(),
            reason: "requires x >= 0 (use erfc(x) = 2 - erfc(-x))",
        });
    }
    Ok(erfcx_nonneg(x))
}

pub(crate) fn erfcx_nonneg<T: Real>(x: T) -> T {
    if x.is_infinite() {
        return T::zero();
    }
    if x < T::lit(2.0) {
        (T::one() - erf_series(x)) * (x * x).exp()
    } else {
        erfcx_continued_fraction(x)
    }
}

/// Complementary error function `1 − erf(x)` without cancellation for large `x`.
pub fn erfc<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x >= T::zero() {
        if x < T::lit(0.5) {
            T::one() - erf(x)
        } else {
            erfcx_nonneg(x) * (-x * x).exp()
        }
    } else {
        T::lit(2.0) - erfc(-x)
    }
}

/// `Σ x^{2n+1} / (n! (2n+1))`, the positive power series of `(√π/2) erfi(x)`.
fn erfi_half_sqrt_pi_series<T: Real>(x: T) -> T {
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    for n in 1..MAX_SERIES_TERMS {
        power = power * x2 / T::from_index(n);
        let term = power / T::from_index(2 * n + 1);
        sum = sum + term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    sum
}

/// Alternating Taylor series of Dawson's integral, used for `x < 1`.
fn dawson_taylor<T: Real>(x: T) -> T {
    let minus_two_x2 = -(x * x + x * x);
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_SERIES_TERMS {
        term = term * minus_two_x2 / T::from_index(2 * n + 1);
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

/// `F(x) ~ (1/2x) Σ (2n−1)!! / (2x²)ⁿ`, truncated at the smallest term.
fn dawson_asymptotic<T: Real>(x: T) -> T {
    let inv_two_x2 = T::one() / (T::lit(2.0) * x * x);
    let mut term = T::one();
    let mut sum = T::one();
    for n in 1..MAX_SERIES_TERMS {
        let next = term * T::from_index(2 * n - 1) * inv_two_x2;
        if next >= term {
            break;
        }
        term = next;
        sum = sum + term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    sum / (T::lit(2.0) * x)
}

const DAWSON_ASYMPTOTIC_FROM: f64 = 6.0;

/// Dawson's integral `F(x) = e^{-x²} ∫₀ˣ e^{t²} dt` for `x ≥ 0`.
///
/// Bounded by `0.5410442246…` (attained near `x ≈ 0.924`) and decaying like
/// `1/(2x)`.
pub fn dawson<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::Domain {
            function: "dawson",
            x: x.as_f64(),
            reason: "requires x >= 0",
        });
    }
    Ok(dawson_nonneg(x))
}

pub(crate) fn dawson_nonneg<T: Real>(x: T) -> T {
    if x.is_infinite() {
        T::zero()
    } else if x < T::one() {
        dawson_taylor(x)
    } else if x < T::lit(DAWSON_ASYMPTOTIC_FROM) {
        (-x * x).exp() * erfi_half_sqrt_pi_series(x)
    } else {
        dawson_asymptotic(x)
    }
}

/// Imaginary error function `(2/√π) ∫₀ˣ e^{t²} dt` for `0 ≤ x ≤ 30`.
///
/// Returns [`Error::Overflow`] when the value is not representable
/// (`x ≳ 26.64` in `f64`); use [`dawson`] there.
pub fn erfi<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::Domain {
            function: "erfi",
            x: x.as_f64(),
            reason: "requires x >= 0",
        });
    }
    if x > T::lit(30.0) {
        return Err(Error::Domain {
            function: "erfi",
            x: x.as_f64(),
            reason: "x > 30 overflows; use dawson",
        });
    }
    let v = if x < T::lit(DAWSON_ASYMPTOTIC_FROM) {
        two_over_sqrt_pi::<T>() * erfi_half_sqrt_pi_series(x)
    } else {
        two_over_sqrt_pi::<T>() * (x * x).exp() * dawson_asymptotic(x)
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow {
            function: "erfi",
            x: x.as_f64(),
        })
    }
}

/// `erfc(x)·erfi(x)` evaluated as `erfc_scaled(x)·(2/√π)·dawson(x)`; finite for all `x ≥ 0`.
pub fn erfc_erfi_product<T: Real>(x: T) -> Result<T> {
    Ok(erfc_scaled(x)? * two_over_sqrt_pi::<T>() * dawson(x)?)
}

/// `∫₀ˣ erfc(y) e^{y²} dy`, integrated as `∫₀ˣ erfc_scaled(y) dy`.
pub fn integral_erfc_exp<T: Real>(x: T, spec: &QuadratureSpec<T>) -> Result<T> {
    if !(x >= T::zero() && x <= T::lit(50.0)) {
        return Err(Error::Domain {
            function: "integral_erfc_exp",
            x: x.as_f64(),
            reason: "requires 0 <= x <= 50",
        });
    }
    adaptive_quad(erfcx_nonneg, T::zero(), x, spec)
}

struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

/// Adaptive Simpson quadrature with interval bisection and Richardson correction.
///
/// A panel is accepted once `|S_left + S_right − S_whole| ≤ 15·tol`, with the
/// tolerance halved at each bisection. A panel that is already converged to
/// machine precision relative to its own value is accepted as well, so that
/// tolerances below the rounding floor of large integrals do not spin to
/// `max_depth`.
pub fn adaptive_quad<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(a <= b) {
        return Err(Error::InvalidArgument(format!(
            "quadrature bounds must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    let m = (a + b) * half;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    let panel = Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
    };
    refine(&f, panel, spec.abs_tol, spec.max_depth).ok_or(Error::QuadratureNonConvergence {
        a: a.as_f64(),
        b: b.as_f64(),
        max_depth: spec.max_depth,
    })
}

#[inline]
fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

fn refine<T, F>(f: &F, p: Panel<T>, tol: T, depth: usize) -> Option<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    let half = T::lit(0.5);
    let m = (p.a + p.b) * half;
    let lm = (p.a + m) * half;
    let rm = (m + p.b) * half;
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    let fifteen = T::lit(15.0);
    let floor = T::lit(64.0) * T::epsilon() * (left.abs() + right.abs());
    if delta.abs() <= fifteen * tol || delta.abs() <= floor {
        return Some(left + right + delta / fifteen);
    }
    if !delta.is_finite() || depth <= 1 || !(lm > p.a && rm < p.b) {
        return None;
    }
    let l = refine(
        f,
        Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        },
        tol * half,
        depth - 1,
    )?;
    let r = refine(
        f,
        Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        },
        tol * half,
        depth - 1,
    )?;
    Some(l + r)
}
