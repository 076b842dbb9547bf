//! Reference solver for `[(1+δy)y']' + 2xy' = 0`, `y(0) = 0`, `y(∞) = 1`,
//! by shooting on the initial slope.
//!
//! The far-field condition is imposed at `x_max`. The IVP
//! `y'' = −(δ y'² + 2x y')/(1 + δy)` is integrated with the Dormand–Prince
//! 5(4) pair; steps are clipped so that every grid node is an integrator
//! node, which makes the sampled solution free of interpolation error.

use crate::error::{Error, Result};
use crate::grid::{interval_count, GridFunction};
use crate::scalar::Real;
use crate::series::DeltaParam;

/// `1 + δy` below this aborts the integration.
const SINGULAR_FLOOR: f64 = 1e-8;
const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig<T> {
    pub x_max: T,
    pub step: T,
    /// Absolute and relative local error tolerance of the integrator.
    pub ivp_tol: T,
    pub slope_bracket: (T, T),
    /// Target for `|y(x_max) − 1|`.
    pub root_tol: T,
    pub max_root_iter: usize,
}

impl<T: Real> Default for ShootingConfig<T> {
    fn default() -> Self {
        Self {
            x_max: T::lit(10.0),
            step: T::lit(1e-2),
            ivp_tol: T::lit(1e-10),
            slope_bracket: (T::lit(0.1), T::lit(5.0)),
            root_tol: T::lit(1e-10),
            max_root_iter: 100,
        }
    }
}

impl<T: Real> ShootingConfig<T> {
    pub fn validate(&self) -> Result<()> {
        interval_count(self.x_max, self.step)?;
        let (lo, hi) = self.slope_bracket;
        if !(lo > T::zero() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "slope bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(self.ivp_tol > T::zero() && self.root_tol > T::zero()) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.max_root_iter < 1 {
            return Err(Error::InvalidArgument(
                "max_root_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

type State<T> = [T; 2];

fn rhs<T: Real>(d: T, x: T, s: State<T>) -> Option<State<T>> {
    let k = T::one() + d * s[0];
    if !(k >= T::lit(SINGULAR_FLOOR)) {
        return None;
    }
    let p = s[1];
    Some([p, -(d * p * p + T::lit(2.0) * x * p) / k])
}

#[inline]
fn axpy<T: Real>(y: State<T>, h: T, terms: &[(f64, &State<T>)]) -> State<T> {
    let mut out = y;
    for (c, k) in terms {
        let c = T::lit(*c) * h;
        out[0] = out[0] + c * k[0];
        out[1] = out[1] + c * k[1];
    }
    out
}

/// One Dormand–Prince step; `None` if a stage hits the singular region.
/// Returns the fifth-order solution, the derivative there (FSAL) and the
/// embedded error estimate.
fn dopri_step<T: Real>(
    d: T,
    x: T,
    y: State<T>,
    k1: State<T>,
    h: T,
) -> Option<(State<T>, State<T>, State<T>)> {
    let c = T::lit;
    let k2 = rhs(d, x + c(1.0 / 5.0) * h, axpy(y, h, &[(1.0 / 5.0, &k1)]))?;
    let k3 = rhs(
        d,
        x + c(3.0 / 10.0) * h,
        axpy(y, h, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]),
    )?;
    let k4 = rhs(
        d,
        x + c(4.0 / 5.0) * h,
        axpy(
            y,
            h,
            &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)],
        ),
    )?;
    let k5 = rhs(
        d,
        x + c(8.0 / 9.0) * h,
        axpy(
            y,
            h,
            &[
                (19372.0 / 6561.0, &k1),
                (-25360.0 / 2187.0, &k2),
                (64448.0 / 6561.0, &k3),
                (-212.0 / 729.0, &k4),
            ],
        ),
    )?;
    let k6 = rhs(
        d,
        x + h,
        axpy(
            y,
            h,
            &[
                (9017.0 / 3168.0, &k1),
                (-355.0 / 33.0, &k2),
                (46732.0 / 5247.0, &k3),
                (49.0 / 176.0, &k4),
                (-5103.0 / 18656.0, &k5),
            ],
        ),
    )?;
    let y5 = axpy(
        y,
        h,
        &[
            (35.0 / 384.0, &k1),
            (500.0 / 1113.0, &k3),
            (125.0 / 192.0, &k4),
            (-2187.0 / 6784.0, &k5),
            (11.0 / 84.0, &k6),
        ],
    );
    let k7 = rhs(d, x + h, y5)?;
    // difference between the 5th- and embedded 4th-order weights
    let err = axpy(
        [T::zero(), T::zero()],
        h,
        &[
            (71.0 / 57600.0, &k1),
            (-71.0 / 16695.0, &k3),
            (71.0 / 1920.0, &k4),
            (-17253.0 / 339200.0, &k5),
            (22.0 / 525.0, &k6),
            (-1.0 / 40.0, &k7),
        ],
    );
    Some((y5, k7, err))
}

/// Solves `y(0) = 0`, `y'(0) = slope` and samples `y` on the configured grid.
pub fn integrate_ivp<T: Real>(
    delta: DeltaParam<T>,
    slope: T,
    cfg: &ShootingConfig<T>,
) -> Result<GridFunction<T>> {
    let n = interval_count(cfg.x_max, cfg.step)?;
    if !(slope > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "slope must be positive, got {slope}"
        )));
    }
    let d = delta.value();
    let tol = cfg.ivp_tol;
    let singular = |x: T| Error::Singularity {
        x: x.as_f64(),
        delta: d.as_f64(),
        slope: slope.as_f64(),
    };

    let mut values = Vec::with_capacity(n + 1);
    values.push(T::zero());
    let mut x = T::zero();
    let mut y: State<T> = [T::zero(), slope];
    let mut k1 = rhs(d, x, y).ok_or_else(|| singular(x))?;
    let mut h = cfg.step;
    let h_min = cfg.x_max * T::lit(1e-14);
    let mut steps = 0usize;

    for i in 1..=n {
        let target = cfg.x_max * T::from_index(i) / T::from_index(n);
        while x < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepLimit {
                    x: x.as_f64(),
                    delta: d.as_f64(),
                    slope: slope.as_f64(),
                    steps: MAX_STEPS,
                });
            }
            let remaining = target - x;
            let lands = h >= remaining;
            let trial = if lands { remaining } else { h };
            match dopri_step(d, x, y, k1, trial) {
                Some((y_new, k_new, err)) => {
                    let scale0 = tol + tol * y[0].abs().max(y_new[0].abs());
                    let scale1 = tol + tol * y[1].abs().max(y_new[1].abs());
                    let e = (err[0] / scale0).abs().max((err[1] / scale1).abs());
                    let factor = if e > T::zero() {
                        (T::lit(0.9) * e.powf(T::lit(-0.2)))
                            .min(T::lit(5.0))
                            .max(T::lit(0.2))
                    } else {
                        T::lit(5.0)
                    };
                    if e <= T::one() && e.is_finite() {
                        x = if lands { target } else { x + trial };
                        y = y_new;
                        k1 = k_new;
                        if !lands || trial * factor > h {
                            h = trial * factor;
                        }
                    } else {
                        h = trial * factor;
                    }
                }
                None => h = trial * T::lit(0.25),
            }
            if h < h_min {
                return Err(singular(x));
            }
        }
        values.push(y[0]);
    }
    GridFunction::from_values(cfg.x_max, cfg.step, values)
}

/// Result of [`solve_bvp`].
#[derive(Debug, Clone)]
pub struct ShootingSolution<T> {
    pub solution: GridFunction<T>,
    /// `y'(0)` of the returned solution.
    pub slope: T,
    pub root_iterations: usize,
    /// Slope bracket that was actually used (after any widening).
    pub bracket: (T, T),
    /// Whether `F(s) = y_s(x_max) − 1`, sampled across the bracket, was nondecreasing.
    pub monotone_in_bracket: bool,
}

/// Far-field mismatch `y_s(x_max) − 1`. For `δ < 0`, running into the
/// singularity means the trajectory overshot `1/|δ| > 1`, so it counts as `+∞`.
fn mismatch<T: Real>(
    delta: DeltaParam<T>,
    slope: T,
    cfg: &ShootingConfig<T>,
) -> Result<(T, Option<GridFunction<T>>)> {
    match integrate_ivp(delta, slope, cfg) {
        Ok(g) => Ok((g.last() - T::one(), Some(g))),
        Err(Error::Singularity { .. }) if delta.value() < T::zero() => Ok((T::infinity(), None)),
        Err(e) => Err(e),
    }
}

/// Finds `y'(0)` such that `y(x_max) = 1` by bisection to a bracket width of
/// `1e−6`, then safeguarded secant steps to `|y(x_max) − 1| < root_tol`.
/// A bracket without a sign change is widened once to `[lo/2, 2·hi]`.
pub fn solve_bvp<T: Real>(
    delta: DeltaParam<T>,
    cfg: &ShootingConfig<T>,
) -> Result<ShootingSolution<T>> {
    cfg.validate()?;
    let d = delta.value();
    let (mut lo, mut hi) = cfg.slope_bracket;
    let (mut f_lo, _) = mismatch(delta, lo, cfg)?;
    let (mut f_hi, _) = mismatch(delta, hi, cfg)?;
    if !(f_lo < T::zero() && f_hi > T::zero()) {
        lo = lo * T::lit(0.5);
        hi = hi * T::lit(2.0);
        f_lo = mismatch(delta, lo, cfg)?.0;
        f_hi = mismatch(delta, hi, cfg)?.0;
        if !(f_lo < T::zero() && f_hi > T::zero()) {
            return Err(Error::BracketFailure {
                delta: d.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
                f_lo: f_lo.as_f64(),
                f_hi: f_hi.as_f64(),
            });
        }
    }
    let bracket = (lo, hi);
    let monotone_in_bracket = sample_monotone(delta, bracket, (f_lo, f_hi), cfg)?;

    let half = T::lit(0.5);
    let width = T::lit(1e-6);
    let mut iterations = 0usize;
    let mut best: Option<(T, T, GridFunction<T>)> = None;
    let record =
        |s: T, f: T, g: Option<GridFunction<T>>, best: &mut Option<(T, T, GridFunction<T>)>| {
            if let Some(g) = g {
                if best.as_ref().is_none_or(|b| f.abs() < b.1.abs()) {
                    *best = Some((s, f, g));
                }
            }
        };

    // bisection phase
    while hi - lo > width && iterations < cfg.max_root_iter {
        iterations += 1;
        let mid = (lo + hi) * half;
        let (f_mid, g) = mismatch(delta, mid, cfg)?;
        record(mid, f_mid, g, &mut best);
        if f_mid.abs() < cfg.root_tol {
            break;
        }
        if f_mid < T::zero() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }

    // secant phase, kept inside the bracket
    while best.as_ref().is_none_or(|b| b.1.abs() >= cfg.root_tol) && iterations < cfg.max_root_iter
    {
        iterations += 1;
        let mut s = if f_hi.is_finite() {
            hi - f_hi * (hi - lo) / (f_hi - f_lo)
        } else {
            (lo + hi) * half
        };
        if !(s > lo && s < hi) {
            s = (lo + hi) * half;
        }
        let (f_s, g) = mismatch(delta, s, cfg)?;
        record(s, f_s, g, &mut best);
        if f_s < T::zero() {
            lo = s;
            f_lo = f_s;
        } else {
            hi = s;
            f_hi = f_s;
        }
        if hi - lo <= T::epsilon() * hi {
            break;
        }
    }

    match best {
        Some((slope, f, solution)) if f.abs() < cfg.root_tol => Ok(ShootingSolution {
            solution,
            slope,
            root_iterations: iterations,
            bracket,
            monotone_in_bracket,
        }),
        other => Err(Error::ShootingNonConvergence {
            delta: d.as_f64(),
            iterations,
            residual: other.map_or(f64::INFINITY, |b| b.1.as_f64()),
        }),
    }
}

fn sample_monotone<T: Real>(
    delta: DeltaParam<T>,
    (lo, hi): (T, T),
    (f_lo, f_hi): (T, T),
    cfg: &ShootingConfig<T>,
) -> Result<bool> {
    const SAMPLES: usize = 9;
    let mut prev = f_lo;
    for i in 1..=SAMPLES {
        let s = lo + (hi - lo) * T::from_index(i) / T::from_index(SAMPLES + 1);
        let (f, _) = mismatch(delta, s, cfg)?;
        if f < prev {
            return Ok(false);
        }
        prev = f;
    }
    Ok(f_hi >= prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::erf;
    use std::f64::consts::PI;

    fn delta(d: f64) -> DeltaParam<f64> {
        DeltaParam::new(d).unwrap()
    }

    fn erf_grid() -> GridFunction<f64> {
        GridFunction::from_fn(10.0, 0.01, erf).unwrap()
    }

    // Fixed-step classical RK4 at step 1e-5, sampled every 1000 steps.
    fn rk4_oracle(d: f64, slope: f64) -> Vec<f64> {
        let h = 1e-5;
        let f =
            |x: f64, y: [f64; 2]| [y[1], -(d * y[1] * y[1] + 2.0 * x * y[1]) / (1.0 + d * y[0])];
        let mut y = [0.0, slope];
        let mut out = vec![0.0];
        for i in 0..1_000_000usize {
            let x = i as f64 * h;
            let k1 = f(x, y);
            let k2 = f(
                x + h / 2.0,
                [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]],
            );
            let k3 = f(
                x + h / 2.0,
                [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]],
            );
            let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for j in 0..2 {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            if (i + 1) % 1000 == 0 {
                out.push(y[0]);
            }
        }
        out
    }

    #[test]
    fn ivp_at_zero_delta_is_erf() {
        let cfg = ShootingConfig::default();
        let g = integrate_ivp(delta(0.0), 2.0 / PI.sqrt(), &cfg).unwrap();
        assert!(g.sup_distance(&erf_grid()).unwrap() < 1e-8);
    }

    #[test]
    fn ivp_at_zero_delta_is_linear_in_slope() {
        let cfg = ShootingConfig::default();
        let g = integrate_ivp(delta(0.0), 1.0, &cfg).unwrap();
        let expected = GridFunction::from_fn(10.0, 0.01, |x| PI.sqrt() / 2.0 * erf(x)).unwrap();
        assert!(g.sup_distance(&expected).unwrap() < 1e-8);
    }

    #[test]
    fn ivp_matches_fixed_step_oracle() {
        let cfg = ShootingConfig::default();
        let g = integrate_ivp(delta(0.1), 1.2, &cfg).unwrap();
        let oracle = rk4_oracle(0.1, 1.2);
        let worst = g
            .values()
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-7, "worst = {worst}");
    }

    #[test]
    fn ivp_reports_singularity() {
        let cfg = ShootingConfig::default();
        match integrate_ivp(delta(-0.9), 5.0, &cfg) {
            Err(Error::Singularity { x, .. }) => assert!(x > 0.0 && x < 10.0),
            other => panic!("expected singularity, got {other:?}"),
        }
        assert!(integrate_ivp(delta(0.1), 0.0, &cfg).is_err());
    }

    #[test]
    fn bvp_at_zero_delta() {
        let cfg = ShootingConfig::default();
        let sol = solve_bvp(delta(0.0), &cfg).unwrap();
        assert!((sol.slope - 2.0 / PI.sqrt()).abs() < 1e-8);
        assert!(sol.solution.sup_distance(&erf_grid()).unwrap() < 1e-8);
        assert!(sol.monotone_in_bracket);
    }

    #[test]
    fn bvp_negative_delta() {
        let cfg = ShootingConfig::default();
        let sol = solve_bvp(delta(-0.9), &cfg).unwrap();
        let y = sol.solution.values();
        assert_eq!(y[0], 0.0);
        assert!((sol.solution.last() - 1.0).abs() < cfg.root_tol);
        assert!(y.iter().all(|&v| (0.0..=1.0 + 1e-8).contains(&v)));
        assert!(y.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn bvp_bracket_failure_and_widening() {
        // [1.2, 2] misses the root for delta = 0; widening to [0.6, 4] recovers it
        let cfg = ShootingConfig {
            slope_bracket: (1.2, 2.0),
            ..ShootingConfig::default()
        };
        let sol = solve_bvp(delta(0.0), &cfg).unwrap();
        assert_eq!(sol.bracket, (0.6, 4.0));
        let cfg = ShootingConfig {
            slope_bracket: (3.0, 4.0),
            ..ShootingConfig::default()
        };
        assert!(matches!(
            solve_bvp(delta(0.0), &cfg),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let bad = ShootingConfig {
            slope_bracket: (2.0, 1.0),
            ..ShootingConfig::default()
        };
        assert!(solve_bvp(delta(0.1), &bad).is_err());
        let bad = ShootingConfig {
            root_tol: 0.0,
            ..ShootingConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
