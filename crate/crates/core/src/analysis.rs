//! Error tables, qualitative property checks and Lipschitz bounds on computed `Φ_δ`.

use std::fmt;

use crate::error::Result;
use crate::grid::GridFunction;
use crate::picard::{self, lipschitz_constant, PicardConfig};
use crate::scalar::Real;
use crate::series::{phi0, phi1, phi2, psi, ApproxOrder, DeltaParam, SeriesGrid};
use crate::shooting::{self, ShootingConfig};
use crate::specfun::QuadratureSpec;

/// Solver that produced a reference `Φ_δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Picard,
    Shooting,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Picard => "picard",
            Backend::Shooting => "shooting",
        })
    }
}

/// Backend request; `Auto` uses Picard inside `[0, δ₀)` and shooting elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BackendChoice {
    Picard,
    Shooting,
    #[default]
    Auto,
}

impl BackendChoice {
    pub fn resolve<T: Real>(self, delta: DeltaParam<T>) -> Backend {
        match self {
            BackendChoice::Picard => Backend::Picard,
            BackendChoice::Shooting => Backend::Shooting,
            BackendChoice::Auto => {
                let d = delta.value();
                if d >= T::zero() && d < picard::delta0::<T>() {
                    Backend::Picard
                } else {
                    Backend::Shooting
                }
            }
        }
    }
}

/// Everything needed to produce `Φ_δ` and the partial sums on one grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub picard: PicardConfig<T>,
    pub shooting: ShootingConfig<T>,
    pub quad: QuadratureSpec<T>,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            picard: PicardConfig::default(),
            shooting: ShootingConfig::default(),
            quad: QuadratureSpec::default(),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    /// Default tolerances on `[0, x_max]` with the given step for both backends.
    pub fn with_grid(x_max: T, step: T) -> Self {
        let mut cfg = Self::default();
        cfg.picard.x_max = x_max;
        cfg.picard.step = step;
        cfg.shooting.x_max = x_max;
        cfg.shooting.step = step;
        cfg
    }

    pub fn x_max(&self) -> T {
        self.picard.x_max
    }

    pub fn step(&self) -> T {
        self.picard.step
    }

    pub fn series_grid(&self) -> Result<SeriesGrid<T>> {
        SeriesGrid::new(self.x_max(), self.step(), &self.quad)
    }
}

/// Computes `Φ_δ` with the requested backend.
pub fn solve<T: Real>(
    delta: DeltaParam<T>,
    choice: BackendChoice,
    cfg: &SolverConfig<T>,
) -> Result<(Backend, GridFunction<T>)> {
    let backend = choice.resolve(delta);
    let phi = match backend {
        Backend::Picard => picard::solve_fixed_point(delta, &cfg.picard)?.solution,
        Backend::Shooting => shooting::solve_bvp(delta, &cfg.shooting)?.solution,
    };
    Ok((backend, phi))
}

/// Discrete error `E_{δ,m} = max_i |Ψ_{δ,m}(x_i) − Φ_δ(x_i)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport<T> {
    pub delta: T,
    pub order: ApproxOrder,
    pub error: T,
    pub x_max: T,
    pub step: T,
    pub backend: Backend,
}

/// `E_{δ,m}` of a computed `Φ_δ`, evaluating `Ψ_{δ,m}` pointwise on its grid.
pub fn discrete_error<T: Real>(
    phi: &GridFunction<T>,
    delta: DeltaParam<T>,
    order: ApproxOrder,
    backend: Backend,
    quad: &QuadratureSpec<T>,
) -> Result<ErrorReport<T>> {
    let mut error = T::zero();
    for (x, v) in phi.iter() {
        error = error.max((psi(delta, order, x, quad)? - v).abs());
    }
    Ok(ErrorReport {
        delta: delta.value(),
        order,
        error,
        x_max: phi.x_max(),
        step: phi.step(),
        backend,
    })
}

/// One `δ` of the error experiment: `E_{δ,0..2}` plus `E_{δ,2}` with the printed `φ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow<T> {
    pub delta: T,
    pub backend: Backend,
    pub errors: [T; 3],
    pub error_printed_phi2: T,
}

impl<T: Real> ErrorRow<T> {
    pub fn error(&self, order: ApproxOrder) -> T {
        self.errors[order.index()]
    }
}

/// Solves for every `δ` (auto backend) and tabulates all partial-sum errors.
pub fn error_table<T: Real>(
    deltas: &[T],
    cfg: &SolverConfig<T>,
    series: &SeriesGrid<T>,
) -> Result<Vec<ErrorRow<T>>> {
    deltas
        .iter()
        .map(|&d| {
            let delta = DeltaParam::new(d)?;
            let (backend, phi) = solve(delta, BackendChoice::Auto, cfg)?;
            let errors = ApproxOrder::ALL.map(|m| {
                series
                    .psi(delta, m)
                    .sup_distance(&phi)
                    .expect("series grid matches solver grid")
            });
            let error_printed_phi2 = series.psi2_printed(delta).sup_distance(&phi)?;
            Ok(ErrorRow {
                delta: d,
                backend,
                errors,
                error_printed_phi2,
            })
        })
        .collect()
}

/// One [`ErrorReport`] per `(δ, m)` pair, `δ` outer.
pub fn error_sweep<T: Real>(
    deltas: &[T],
    orders: &[ApproxOrder],
    cfg: &SolverConfig<T>,
) -> Result<Vec<ErrorReport<T>>> {
    let series = cfg.series_grid()?;
    let rows = error_table(deltas, cfg, &series)?;
    Ok(rows
        .iter()
        .flat_map(|row| {
            orders.iter().map(move |&order| ErrorReport {
                delta: row.delta,
                order,
                error: row.error(order),
                x_max: cfg.x_max(),
                step: cfg.step(),
                backend: row.backend,
            })
        })
        .collect())
}

/// Pass/fail with the worst offending node `(x, value)` when failing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict<T> {
    pub pass: bool,
    pub witness: Option<(T, T)>,
}

impl<T: Real> Verdict<T> {
    fn from_worst(worst: Option<(T, T, T)>) -> Self {
        match worst {
            None => Self {
                pass: true,
                witness: None,
            },
            Some((x, v, _)) => Self {
                pass: false,
                witness: Some((x, v)),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyReport<T> {
    pub delta: T,
    /// `−1e−8 ≤ Φ ≤ 1 + 1e−8`; witness is `(x, Φ(x))`.
    pub bounded: Verdict<T>,
    /// First differences `> −1e−10`; witness is `(x, Φ(x) − Φ(x − step))`.
    pub increasing: Verdict<T>,
    /// Divided second differences `< 1e−8` on interior nodes; witness is `(x, Φ''(x))`.
    pub concave: Verdict<T>,
    pub residual: T,
}

impl<T: Real> PropertyReport<T> {
    pub fn all_pass(&self) -> bool {
        self.bounded.pass && self.increasing.pass && self.concave.pass
    }
}

const BOUND_SLACK: f64 = 1e-8;
const INCREASE_SLACK: f64 = 1e-10;
const CONCAVITY_SLACK: f64 = 1e-8;

/// Keeps the largest violation `(x, value, excess)`.
fn worse<T: Real>(acc: Option<(T, T, T)>, cand: (T, T, T)) -> Option<(T, T, T)> {
    match acc {
        Some(a) if a.2 >= cand.2 => Some(a),
        _ => Some(cand),
    }
}

/// Boundedness, monotonicity and concavity of a sampled `Φ_δ`, plus its ODE residual.
pub fn check_properties<T: Real>(phi: &GridFunction<T>, delta: DeltaParam<T>) -> PropertyReport<T> {
    let v = phi.values();
    let h = phi.step();
    let (lo, hi) = (-T::lit(BOUND_SLACK), T::one() + T::lit(BOUND_SLACK));

    let mut bounded = None;
    let mut increasing = None;
    let mut concave = None;
    for (i, &y) in v.iter().enumerate() {
        let x = phi.x(i);
        if y < lo {
            bounded = worse(bounded, (x, y, lo - y));
        } else if y > hi {
            bounded = worse(bounded, (x, y, y - hi));
        }
        if i >= 1 {
            let diff = y - v[i - 1];
            if diff <= -T::lit(INCREASE_SLACK) {
                increasing = worse(increasing, (x, diff, -diff));
            }
        }
        if i >= 1 && i + 1 < v.len() {
            let second = (v[i + 1] - y - y + v[i - 1]) / (h * h);
            if second >= T::lit(CONCAVITY_SLACK) {
                concave = worse(concave, (x, second, second));
            }
        }
    }
    PropertyReport {
        delta: delta.value(),
        bounded: Verdict::from_worst(bounded),
        increasing: Verdict::from_worst(increasing),
        concave: Verdict::from_worst(concave),
        residual: ode_residual(phi, delta),
    }
}

/// `max |(1+δy)y'' + δy'² + 2xy'| / (1 + 2x|y'|)` over nodes in `[0.1, x_max − 0.1]`,
/// with five-point central differences.
pub fn ode_residual<T: Real>(phi: &GridFunction<T>, delta: DeltaParam<T>) -> T {
    let d = delta.value();
    let margin = T::lit(0.1);
    let upper = phi.x_max() - margin;
    let mut worst = T::zero();
    for i in 2..phi.len().saturating_sub(2) {
        let x = phi.x(i);
        if x < margin - T::lit(1e-9) || x > upper + T::lit(1e-9) {
            continue;
        }
        let y = phi.values()[i];
        let dy = phi.first_derivative(i);
        let d2y = phi.second_derivative(i);
        let two_x_dy = T::lit(2.0) * x * dy;
        let r =
            ((T::one() + d * y) * d2y + d * dy * dy + two_x_dy).abs() / (T::one() + two_x_dy.abs());
        worst = worst.max(r);
    }
    worst
}

/// Outcome of comparing two fixed points against `L·|δ₁ − δ₂|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzCheck<T> {
    pub delta1: T,
    pub delta2: T,
    pub bound: T,
    pub observed: T,
    pub pass: bool,
}

fn lipschitz_outcome<T: Real>(
    (d1, phi1): (T, &GridFunction<T>),
    (d2, phi2): (T, &GridFunction<T>),
) -> Result<LipschitzCheck<T>> {
    let observed = phi1.sup_distance(phi2)?;
    let bound = lipschitz_constant::<T>() * (d1 - d2).abs();
    Ok(LipschitzCheck {
        delta1: d1,
        delta2: d2,
        bound,
        observed,
        pass: observed <= bound,
    })
}

/// `‖Φ_{δ₁} − Φ_{δ₂}‖_∞ ≤ L|δ₁ − δ₂|` for two Picard fixed points.
pub fn lipschitz_check<T: Real>(
    delta1: T,
    delta2: T,
    cfg: &PicardConfig<T>,
) -> Result<LipschitzCheck<T>> {
    let a = picard::solve_fixed_point(DeltaParam::new(delta1)?, cfg)?.solution;
    let b = if delta1 == delta2 {
        a.clone()
    } else {
        picard::solve_fixed_point(DeltaParam::new(delta2)?, cfg)?.solution
    };
    lipschitz_outcome((delta1, &a), (delta2, &b))
}

/// [`lipschitz_check`] for every unordered pair of `deltas`, solving each once.
pub fn lipschitz_pairs<T: Real>(
    deltas: &[T],
    cfg: &PicardConfig<T>,
) -> Result<Vec<LipschitzCheck<T>>> {
    let solutions = deltas
        .iter()
        .map(|&d| Ok(picard::solve_fixed_point(DeltaParam::new(d)?, cfg)?.solution))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..deltas.len() {
        for j in i + 1..deltas.len() {
            out.push(lipschitz_outcome(
                (deltas[i], &solutions[i]),
                (deltas[j], &solutions[j]),
            )?);
        }
    }
    Ok(out)
}

/// Finite-difference residuals of the coefficient equations
/// `φ₀'' + 2xφ₀' = 0` and `φₙ'' + 2xφₙ' = −Σ_{k=1}^{n} (φ'_{k−1}φ'_{n−k} + φ_{k−1}φ''_{n−k})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResiduals<T> {
    pub phi0: T,
    pub phi1: T,
    pub phi2: T,
}

/// Derivatives by five-point stencils of width `h`, checked at `x = lo, lo + spacing, …, hi`.
pub fn series_residuals<T: Real>(
    lo: T,
    hi: T,
    spacing: T,
    h: T,
    quad: &QuadratureSpec<T>,
) -> Result<SeriesResiduals<T>> {
    let c = T::lit;
    let mut worst = SeriesResiduals {
        phi0: T::zero(),
        phi1: T::zero(),
        phi2: T::zero(),
    };
    let steps = ((hi - lo) / spacing).round().to_usize().unwrap_or(0);
    for k in 0..=steps {
        let x = lo + spacing * T::from_index(k);
        let nodes = [x - h - h, x - h, x, x + h, x + h + h];
        let f0 = nodes.map(phi0);
        let f1 = nodes.map(phi1);
        let mut f2 = [T::zero(); 5];
        for (slot, &n) in f2.iter_mut().zip(&nodes) {
            *slot = phi2(n, quad)?;
        }
        let d1 = |f: &[T; 5]| (f[0] - c(8.0) * f[1] + c(8.0) * f[3] - f[4]) / (c(12.0) * h);
        let d2 = |f: &[T; 5]| {
            (-f[0] + c(16.0) * f[1] - c(30.0) * f[2] + c(16.0) * f[3] - f[4]) / (c(12.0) * h * h)
        };
        let op = |f: &[T; 5]| d2(f) + c(2.0) * x * d1(f);
        let (p0, p0d, p0dd) = (f0[2], d1(&f0), d2(&f0));
        let (p1, p1d, p1dd) = (f1[2], d1(&f1), d2(&f1));
        let r0 = op(&f0).abs();
        let r1 = (op(&f1) + p0d * p0d + p0 * p0dd).abs();
        let r2 = (op(&f2) + c(2.0) * p0d * p1d + p0 * p1dd + p1 * p0dd).abs();
        worst.phi0 = worst.phi0.max(r0);
        worst.phi1 = worst.phi1.max(r1);
        worst.phi2 = worst.phi2.max(r2);
    }
    Ok(worst)
}
