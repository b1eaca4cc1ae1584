//! Subcommand implementations for the `mvdrisk` binary.
//!
//! Each command validates its whole configuration first, then computes, and
//! only returns output once everything has succeeded.

pub mod config;
pub mod format;

use std::fmt::Write as _;

use mvdrisk::{
    implied_pd_curve, invert_el_to_pm, risk_curve, simulate, ElCurve, InversionConfig,
    LoanContext, MvdDistribution, ParametricElCurve, RiskError, SimulationResult, SimulationSpec,
};
use serde::Serialize;
use thiserror::Error;

use config::{require, ScenarioConfig};
use format::{fmt_num, round_sig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(#[from] RiskError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numeric(_) => 3,
        }
    }
}

/// Masses smaller than this in magnitude are round-off, not negative strips.
pub const MASS_NOISE: f64 = 1e-9;

fn config_err(e: RiskError) -> CliError {
    CliError::Config(e.to_string())
}

/// What a command writes: the payload for standard output and any summary
/// lines for standard error.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: Vec<String>,
}

/// Overrides applied on top of the config file by `forward`.
#[derive(Debug, Clone, Default)]
pub struct ForwardOverrides {
    pub p_a: Option<f64>,
    pub lgd_min: Option<f64>,
    pub quad_step: Option<f64>,
}

/// `lvr,el,lgd_a,pd_l,lgd_l`, one row per gridpoint.
pub fn cmd_forward(cfg: &ScenarioConfig, ov: &ForwardOverrides) -> Result<CommandOutput, CliError> {
    let dist = require(&cfg.distribution, "distribution")?;
    let p_a = ov.p_a.or(cfg.p_a);
    let p_a = require(&p_a, "p_a")?;
    let lgd_min = ov.lgd_min.or(cfg.lgd_min).unwrap_or(0.0);
    let ctx = LoanContext::new(p_a, lgd_min).map_err(config_err)?;
    let grid = require(&cfg.lvr_grid, "lvr_grid")?.points()?;
    let mut quad = cfg.quadrature.unwrap_or_default();
    if let Some(step) = ov.quad_step {
        quad.step = step;
    }
    quad.validate().map_err(config_err)?;

    let curve = risk_curve(&grid, &dist, &ctx, &quad)?;
    let mut out = String::from("lvr,el,lgd_a,pd_l,lgd_l\n");
    for r in &curve.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(r.lvr),
            fmt_num(r.el),
            fmt_num(r.lgd_a),
            fmt_num(r.pd_l),
            fmt_num(r.lgd_l)
        );
    }
    Ok(CommandOutput {
        stdout: out,
        stderr: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InvertFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default)]
pub struct InvertOverrides {
    pub step: Option<f64>,
    pub p_a: Option<f64>,
    pub max_lvr: Option<f64>,
    pub format: InvertFormat,
}

fn check_curve_covers(curve: &ElCurve, inv: &InversionConfig) -> Result<(), CliError> {
    let grid = inv.lvr_grid().map_err(config_err)?;
    if let (ElCurve::Tabulated(_), Some(&last)) = (curve, grid.last()) {
        for lvr in [grid[0], last] {
            curve.eval_el(lvr).map_err(|e| {
                CliError::Config(format!("el_curve does not cover the inversion grid: {e}"))
            })?;
        }
    }
    Ok(())
}

/// Implied strip masses as CSV `m_mid,mass,density` (or tabulated JSON).
/// Negative masses are reported on standard error, not treated as errors.
pub fn cmd_invert(cfg: &ScenarioConfig, ov: &InvertOverrides) -> Result<CommandOutput, CliError> {
    let curve = require(&cfg.el_curve, "el_curve")?;
    let mut inv = cfg.inversion.unwrap_or_default();
    if let Some(v) = ov.step {
        inv.step = v;
    }
    if let Some(v) = ov.p_a {
        inv.p_a = v;
    }
    if let Some(v) = ov.max_lvr {
        inv.max_lvr = v;
    }
    check_curve_covers(&curve, &inv)?;

    let implied = invert_el_to_pm(&curve, &inv)?;
    let negatives = implied.negative_strip_count(MASS_NOISE);
    let table = implied.table();
    let stdout = match ov.format {
        InvertFormat::Csv => {
            let mut out = String::from("m_mid,mass,density\n");
            for (i, (mass, density)) in table.masses().iter().zip(table.densities()).enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt_num(table.strip_midpoint(i)),
                    fmt_num(*mass),
                    fmt_num(density)
                );
            }
            out
        }
        InvertFormat::Json => {
            let rounded = mvdrisk::TabulatedMvd::new(
                table.grid_origin(),
                table.step(),
                table.masses().iter().map(|&m| round_sig(m)).collect(),
            )?;
            let mut s = serde_json::to_string_pretty(&MvdDistribution::Tabulated(rounded))
                .expect("distribution serializes");
            s.push('\n');
            s
        }
    };
    let max_pd = implied_pd_curve(&implied, inv.p_a, &inv.lvr_grid().map_err(config_err)?)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CommandOutput {
        stdout,
        stderr: vec![
            format!("negative-mass strips: {negatives}"),
            format!("max implied liquidation PD: {}", fmt_num(max_pd)),
        ],
    })
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOverrides {
    pub p_a: Option<f64>,
    pub lvr: Option<f64>,
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct SimulationRecord<'a> {
    lvr: f64,
    p_a: f64,
    #[serde(flatten)]
    result: &'a SimulationResult,
}

/// Monte Carlo estimates as a JSON record, including seed and generator.
pub fn cmd_simulate(
    cfg: &ScenarioConfig,
    ov: &SimulateOverrides,
) -> Result<CommandOutput, CliError> {
    let dist = require(&cfg.distribution, "distribution")?;
    let p_a = require(&ov.p_a.or(cfg.p_a), "p_a")?;
    let sim = cfg.simulation.clone().unwrap_or_default();
    let lvr = require(&ov.lvr.or(sim.lvr), "simulation.lvr")?;
    let n_trials = ov.n_trials.or(sim.n_trials).unwrap_or(1_000_000);
    let seed = ov.seed.or(sim.seed).unwrap_or(0);
    if n_trials == 0 {
        return Err(CliError::Config("simulation.n_trials must be >= 1".into()));
    }
    LoanContext::with_pd(p_a).map_err(config_err)?;
    if !(lvr > 0.0 && lvr.is_finite()) {
        return Err(config_err(RiskError::InvalidLvr(lvr)));
    }

    let mut result = simulate(&SimulationSpec {
        n_trials,
        seed,
        lvr,
        p_a,
        dist,
    })?;
    for v in [
        &mut result.mean_loss,
        &mut result.loss_frequency,
        &mut result.mean_loss_given_loss,
        &mut result.std_error_mean_loss,
        &mut result.std_error_loss_frequency,
        &mut result.std_error_mean_loss_given_loss,
    ] {
        *v = round_sig(*v);
    }
    let record = SimulationRecord {
        lvr: round_sig(lvr),
        p_a: round_sig(p_a),
        result: &result,
    };
    let mut stdout = serde_json::to_string_pretty(&record).expect("result serializes");
    stdout.push('\n');
    Ok(CommandOutput {
        stdout,
        stderr: Vec::new(),
    })
}

/// The reference parametric EL curve on LVR 0.01 to 1.80 in 0.01 steps.
pub fn cmd_example_curves() -> CommandOutput {
    let curve = ElCurve::from(ParametricElCurve::reference());
    let mut out = String::from("lvr,el\n");
    for k in 1..=180 {
        let lvr = k as f64 * 0.01;
        let el = curve.eval_el(lvr).expect("positive LVR");
        let _ = writeln!(out, "{},{}", fmt_num(lvr), fmt_num(el));
    }
    CommandOutput {
        stdout: out,
        stderr: Vec::new(),
    }
}
