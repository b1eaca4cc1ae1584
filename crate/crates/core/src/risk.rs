//! Forward risk measures as functions of the loan-to-value ratio (LVR).
//!
//! Two default definitions share one expected loss:
//!
//! * arrears default: constant PD `p_a`, LGD is the expected shortfall of the
//!   security over the MVD distribution;
//! * liquidation default: PD is `p_a` times the probability that the
//!   security is worth less than the balance (`M < L - 1`), LGD is the
//!   shortfall conditional on that event.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{MvdDistribution, MVD_FLOOR};
use crate::error::{check_param, Result, RiskError};
use crate::quadrature::QuadratureConfig;

/// Loan characteristics other than LVR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoanContext {
    p_a: f64,
    lgd_min: f64,
}

impl LoanContext {
    pub fn new(p_a: f64, lgd_min: f64) -> Result<Self> {
        check_param("p_a", p_a, (0.0..=1.0).contains(&p_a), "must lie in [0, 1]")?;
        check_param(
            "lgd_min",
            lgd_min,
            (0.0..=1.0).contains(&lgd_min),
            "must lie in [0, 1]",
        )?;
        Ok(Self { p_a, lgd_min })
    }

    /// Arrears-default probability with no LGD floor.
    pub fn with_pd(p_a: f64) -> Result<Self> {
        Self::new(p_a, 0.0)
    }

    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn lgd_min(&self) -> f64 {
        self.lgd_min
    }
}

fn require_positive_lvr(lvr: f64) -> Result<()> {
    if lvr > 0.0 && lvr.is_finite() {
        Ok(())
    } else {
        Err(RiskError::InvalidLvr(lvr))
    }
}

/// Single-valued LGD: `max(lgd_min, (L - m - 1) / L)`, capped at 1.
pub fn lgd_single(lvr: f64, m: f64, lgd_min: f64) -> Result<f64> {
    require_positive_lvr(lvr)?;
    check_param("m", m, m >= MVD_FLOOR, "MVD must be >= -1")?;
    check_param(
        "lgd_min",
        lgd_min,
        (0.0..=1.0).contains(&lgd_min),
        "must lie in [0, 1]",
    )?;
    Ok(lgd_min.max((lvr - m - 1.0) / lvr).min(1.0))
}

/// Arrears-framework LGD: expected shortfall per unit balance,
/// `∫_{-1}^{L-1} (L - M - 1) / L · P(M) dM`. Zero at `lvr == 0`.
pub fn lgd_arrears(lvr: f64, dist: &MvdDistribution, quad: &QuadratureConfig) -> Result<f64> {
    if lvr == 0.0 {
        return Ok(0.0);
    }
    require_positive_lvr(lvr)?;
    Ok(dist.shortfall(lvr - 1.0, quad) / lvr)
}

/// `p_a · lgd_arrears`; identical under both default definitions.
pub fn expected_loss(
    lvr: f64,
    dist: &MvdDistribution,
    ctx: &LoanContext,
    quad: &QuadratureConfig,
) -> Result<f64> {
    Ok(ctx.p_a * lgd_arrears(lvr, dist, quad)?)
}

/// Liquidation-framework PD: `p_a · P(M < L - 1)`.
pub fn pd_liquidation(lvr: f64, dist: &MvdDistribution, ctx: &LoanContext) -> Result<f64> {
    require_positive_lvr(lvr)?;
    Ok(ctx.p_a * dist.mass_between(MVD_FLOOR, lvr - 1.0)?)
}

/// Liquidation-framework LGD: the arrears LGD divided by `P(M < L - 1)`.
/// Reported as zero where that probability is at or below
/// `quad.zero_mass_epsilon`, since no loss can occur there.
pub fn lgd_liquidation(lvr: f64, dist: &MvdDistribution, quad: &QuadratureConfig) -> Result<f64> {
    require_positive_lvr(lvr)?;
    let mass = dist.mass_between(MVD_FLOOR, lvr - 1.0)?;
    if mass > quad.zero_mass_epsilon {
        Ok(lgd_arrears(lvr, dist, quad)? / mass)
    } else {
        Ok(0.0)
    }
}

/// All four measures at one LVR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub lvr: f64,
    pub el: f64,
    pub lgd_a: f64,
    pub pd_l: f64,
    pub lgd_l: f64,
}

/// Risk measures over an LVR grid for one distribution and one `p_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    pub p_a: f64,
    pub rows: Vec<RiskRow>,
}

impl RiskCurve {
    pub fn lvr_grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.lvr)
    }

    pub fn el(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.el).collect()
    }
}

/// Evaluates a single row. The shortfall integral and the loss-event mass
/// are each computed once and shared by all four measures.
pub fn risk_row(
    lvr: f64,
    dist: &MvdDistribution,
    ctx: &LoanContext,
    quad: &QuadratureConfig,
) -> Result<RiskRow> {
    let lgd_a = lgd_arrears(lvr, dist, quad)?;
    require_positive_lvr(lvr)?;
    let mass = dist.mass_between(MVD_FLOOR, lvr - 1.0)?;
    let lgd_l = if mass > quad.zero_mass_epsilon {
        lgd_a / mass
    } else {
        0.0
    };
    Ok(RiskRow {
        lvr,
        el: ctx.p_a * lgd_a,
        lgd_a,
        pd_l: ctx.p_a * mass,
        lgd_l,
    })
}

/// Evaluates every measure on a strictly increasing grid of positive LVRs.
/// Gridpoints are computed in parallel; row order follows the grid.
pub fn risk_curve(
    lvr_grid: &[f64],
    dist: &MvdDistribution,
    ctx: &LoanContext,
    quad: &QuadratureConfig,
) -> Result<RiskCurve> {
    quad.validate()?;
    for (i, &lvr) in lvr_grid.iter().enumerate() {
        if let Err(e) = require_positive_lvr(lvr) {
            return Err(RiskError::AtLvr {
                lvr,
                source: Box::new(e),
            });
        }
        if i > 0 && lvr <= lvr_grid[i - 1] {
            return Err(RiskError::GridMismatch(format!(
                "LVR grid must be strictly increasing; {lvr} follows {}",
                lvr_grid[i - 1]
            )));
        }
    }
    let rows = lvr_grid
        .par_iter()
        .map(|&lvr| {
            risk_row(lvr, dist, ctx, quad).map_err(|e| RiskError::AtLvr {
                lvr,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RiskCurve { p_a: ctx.p_a, rows })
}
