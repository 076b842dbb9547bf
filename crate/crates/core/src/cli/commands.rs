//! `eval`, `solve`, `delta0` and `figure`.

use clap::ValueEnum;

use super::table::{format_real, OutputTable};
use super::{config_lines, table_for, CliError, Delta0Args, EvalArgs, GridArgs, SolveArgs};
use crate::analysis::{error_table, solve, Backend, BackendChoice};
use crate::error::Result;
use crate::picard::{contraction_constant, delta0, lipschitz_constant, solve_delta0};
use crate::series::{self, ApproxOrder, DeltaParam};
use crate::specfun::{self, QuadratureSpec};
use crate::{GridFunction, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFn {
    Erf,
    Erfc,
    ErfcScaled,
    Erfi,
    Dawson,
    Phi0,
    Phi1,
    G2,
    /// φ₂ as the solution of its coefficient equation.
    Phi2,
    /// φ₂ in the closed form `(√π/2)g₂[I − erfcx·F]`.
    Phi2Printed,
    Psi,
}

impl EvalFn {
    fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_owned()
    }

    fn uses_quadrature(self) -> bool {
        matches!(self, EvalFn::Phi2 | EvalFn::Phi2Printed | EvalFn::Psi)
    }
}

pub fn cmd_eval(args: &EvalArgs) -> Result<OutputTable, CliError> {
    let f = args.function;
    let series_params = match (f, args.delta, args.m) {
        (EvalFn::Psi, Some(d), Some(m)) => Some((DeltaParam::new(d)?, ApproxOrder::new(m.into())?)),
        (EvalFn::Psi, _, _) => {
            return Err(CliError::Usage(
                "--fn psi requires both --delta and --m".into(),
            ))
        }
        (_, None, None) => None,
        (_, _, _) => {
            return Err(CliError::Usage(format!(
                "--delta and --m only apply to --fn psi, not --fn {}",
                f.name()
            )))
        }
    };
    let mut quad = QuadratureSpec::default();
    if let Some(tol) = args.tol {
        if !f.uses_quadrature() {
            return Err(CliError::Usage(format!(
                "--tol does not apply to --fn {}",
                f.name()
            )));
        }
        quad = QuadratureSpec::new(tol, quad.max_depth)?;
    }

    let mut table = table_for("eval", "eval", &["x", &f.name()]);
    table.comment("function", f.name());
    if let Some((d, m)) = series_params {
        table.comment("delta", d.value()).comment("m", m.index());
    }
    if f.uses_quadrature() {
        table
            .comment("quad.abs_tol", quad.abs_tol)
            .comment("quad.max_depth", quad.max_depth);
    }
    for &x in &args.x {
        let v = match f {
            EvalFn::Erf => specfun::erf(x),
            EvalFn::Erfc => specfun::erfc(x),
            EvalFn::ErfcScaled => specfun::erfc_scaled(x)?,
            EvalFn::Erfi => specfun::erfi(x)?,
            EvalFn::Dawson => specfun::dawson(x)?,
            EvalFn::Phi0 => series::phi0(x),
            EvalFn::Phi1 => series::phi1(x),
            EvalFn::G2 => series::g2(x),
            EvalFn::Phi2 => series::phi2(x, &quad)?,
            EvalFn::Phi2Printed => series::phi2_printed(x, &quad)?,
            EvalFn::Psi => {
                let (d, m) = series_params.expect("checked above");
                series::psi(d, m, x, &quad)?
            }
        };
        table.push_reals(&[x, v]);
    }
    Ok(table)
}

fn grid_table(
    command: &str,
    name: String,
    column: &str,
    cfg: &SolverConfig,
    g: &GridFunction,
    keep: impl Fn(f64) -> bool,
) -> OutputTable {
    let mut t = table_for(command, name, &["x", column]);
    t.comments(&config_lines(cfg));
    for (x, v) in g.iter().filter(|&(x, _)| keep(x)) {
        t.push_reals(&[x, v]);
    }
    t
}

pub fn cmd_solve(args: &SolveArgs) -> Result<OutputTable, CliError> {
    let cfg = args.grid.solver_config()?;
    let delta = DeltaParam::new(args.delta)?;
    let (backend, phi) = solve(delta, args.backend.into(), &cfg)?;
    let mut t = grid_table("solve", "solve".into(), "phi", &cfg, &phi, |_| true);
    t.comment("delta", args.delta).comment("backend", backend);
    Ok(t)
}

pub fn cmd_delta0(args: &Delta0Args) -> Result<OutputTable, CliError> {
    let root = match args.tol {
        Some(tol) => solve_delta0(tol)?,
        None => delta0(),
    };
    let mut t = table_for("delta0", "delta0", &["delta0", "C", "L"]);
    match args.tol {
        Some(tol) => t.comment("bisection_tol", tol),
        None => t.comment("bisection_tol", "machine precision"),
    };
    t.comment("C_L_from", "delta0 at machine precision");
    t.push_reals(&[root, contraction_constant(), lipschitz_constant()]);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// Φ_δ on the full grid for δ ∈ {−0.9, −0.5, 0, 0.5, 1, 2}.
    Fig1,
    /// φ₀, φ₁, φ₂ (and the closed-form φ₂).
    Fig2,
    /// The same curves as fig1 restricted to x ∈ [0, 1.6].
    Fig3,
    /// E_{δ,m} for m = 0, 1, 2 and δ = 0, 0.01, …, 0.2.
    Fig4a,
    /// Φ_{0.2} and Ψ_{0.2,1}.
    Fig4b,
    /// Φ_δ and Ψ_{δ,1} for δ ∈ {−0.9, −0.5, 0.5, 1, 1.5, 2}.
    Fig5,
}

pub const FIG1_DELTAS: [f64; 6] = [-0.9, -0.5, 0.0, 0.5, 1.0, 2.0];
pub const FIG3_X_MAX: f64 = 1.6;
pub const FIG4B_DELTA: f64 = 0.2;
pub const FIG5_DELTAS: [f64; 6] = [-0.9, -0.5, 0.5, 1.0, 1.5, 2.0];

/// `δ = 0, 0.01, …, 0.2`, each the nearest double to its decimal.
pub fn fig4a_deltas() -> Vec<f64> {
    (0..=20).map(|i| f64::from(i) / 100.0).collect()
}

/// Solves every `δ` on its own thread; results keep the input order.
fn solve_all(deltas: &[f64], cfg: &SolverConfig) -> Result<Vec<(Backend, GridFunction)>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = deltas
            .iter()
            .map(|&d| s.spawn(move || solve(DeltaParam::new(d)?, BackendChoice::Auto, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    })
}

fn delta_curves(
    fig: &str,
    deltas: &[f64],
    cfg: &SolverConfig,
    keep: impl Fn(f64) -> bool + Copy,
) -> Result<Vec<OutputTable>> {
    let solutions = solve_all(deltas, cfg)?;
    Ok(deltas
        .iter()
        .zip(solutions)
        .map(|(&d, (backend, phi))| {
            let mut t = grid_table("figure", format!("{fig}_delta_{d}"), "phi", cfg, &phi, keep);
            t.comment("figure", fig)
                .comment("delta", d)
                .comment("backend", backend);
            t
        })
        .collect())
}

/// Every table of one figure, computed in memory before anything is written.
pub fn cmd_figure(id: FigureId, grid: &GridArgs) -> Result<Vec<OutputTable>, CliError> {
    let cfg = grid.solver_config()?;
    let tables = match id {
        FigureId::Fig1 => delta_curves("fig1", &FIG1_DELTAS, &cfg, |_| true)?,
        FigureId::Fig3 => {
            if cfg.x_max() < FIG3_X_MAX {
                return Err(CliError::Usage(format!(
                    "fig3 needs --xmax >= {FIG3_X_MAX}"
                )));
            }
            delta_curves("fig3", &FIG1_DELTAS, &cfg, |x| x <= FIG3_X_MAX + 1e-9)?
        }
        FigureId::Fig2 => {
            let s = cfg.series_grid()?;
            [
                ("phi0", &s.phi0),
                ("phi1", &s.phi1),
                ("phi2", &s.phi2),
                ("phi2_printed", &s.phi2_printed),
            ]
            .into_iter()
            .map(|(name, g)| {
                let mut t = grid_table("figure", format!("fig2_{name}"), name, &cfg, g, |_| true);
                t.comment("figure", "fig2");
                t
            })
            .collect()
        }
        FigureId::Fig4a => {
            let deltas = fig4a_deltas();
            let series = cfg.series_grid()?;
            let rows = std::thread::scope(|s| {
                let handles: Vec<_> = deltas
                    .chunks(3)
                    .map(|chunk| s.spawn(|| error_table(chunk, &cfg, &series)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("solver thread panicked"))
                    .collect::<Result<Vec<_>>>()
            })?
            .concat();
            let curve = |name: &str, pick: &dyn Fn(usize) -> f64| {
                let mut t = table_for("figure", format!("fig4a_{name}"), &["delta", "error"]);
                t.comments(&config_lines(&cfg));
                t.comment("figure", "fig4a").comment("curve", name);
                let backends: Vec<String> = rows.iter().map(|r| r.backend.to_string()).collect();
                t.comment("backend", backends.join(" "));
                for (i, r) in rows.iter().enumerate() {
                    t.push_reals(&[r.delta, pick(i)]);
                }
                t
            };
            vec![
                curve("E0", &|i| rows[i].errors[0]),
                curve("E1", &|i| rows[i].errors[1]),
                curve("E2", &|i| rows[i].errors[2]),
                curve("E2_printed", &|i| rows[i].error_printed_phi2),
            ]
        }
        FigureId::Fig4b => {
            let delta = DeltaParam::new(FIG4B_DELTA)?;
            let (backend, phi) = solve(delta, BackendChoice::Auto, &cfg)?;
            let psi1 = cfg.series_grid()?.psi(delta, ApproxOrder::One);
            let e1 = psi1.sup_distance(&phi)?;
            let mut out = Vec::new();
            for (name, col, g) in [("fig4b_phi", "phi", &phi), ("fig4b_psi1", "psi1", &psi1)] {
                let mut t = grid_table("figure", name.into(), col, &cfg, g, |_| true);
                t.comment("figure", "fig4b")
                    .comment("delta", FIG4B_DELTA)
                    .comment("backend", backend)
                    .comment("sup_distance", format_real(e1));
                out.push(t);
            }
            out
        }
        FigureId::Fig5 => {
            let series = cfg.series_grid()?;
            let solutions = solve_all(&FIG5_DELTAS, &cfg)?;
            let mut summary = table_for("figure", "fig5_agreement", &["delta", "sup_distance"]);
            summary.comments(&config_lines(&cfg));
            summary.comment("figure", "fig5");
            let mut out = Vec::new();
            for (&d, (backend, phi)) in FIG5_DELTAS.iter().zip(solutions) {
                let psi1 = series.psi(DeltaParam::new(d)?, ApproxOrder::One);
                summary.push_reals(&[d, psi1.sup_distance(&phi)?]);
                for (kind, g) in [("phi", &phi), ("psi1", &psi1)] {
                    let name = format!("fig5_delta_{d}_{kind}");
                    let mut t = grid_table("figure", name, kind, &cfg, g, |_| true);
                    t.comment("figure", "fig5")
                        .comment("delta", d)
                        .comment("backend", backend);
                    out.push(t);
                }
            }
            out.push(summary);
            out
        }
    };
    Ok(tables)
}
