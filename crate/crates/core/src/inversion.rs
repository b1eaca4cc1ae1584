//! Recovering a discrete MVD distribution from a target EL curve.
//!
//! With strips of width `ΔM` starting at `M = -1` and LVR gridpoints
//! `L_k = k·ΔM`, the discrete expected loss is
//!
//! ```text
//! EL(L_k) = p_a / L_k · Σ_{i ≤ k} (L_k - 1 - M_i) · mass_i
//! ```
//!
//! Strip `i` (1-based) is represented by its lower edge `M_i = -1 + (i-1)·ΔM`,
//! so `L_k - 1 - M_i = (k - i + 1)·ΔM`. The system is lower triangular and
//! the newest strip always enters with coefficient `ΔM > 0`, so forward
//! substitution determines every mass exactly, one strip at a time.

use serde::{Deserialize, Serialize};

use crate::distribution::{MvdDistribution, TabulatedMvd, MVD_FLOOR};
use crate::el_curve::ElCurve;
use crate::error::{check_param, Result, RiskError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InversionConfig {
    /// Strip width `ΔM`, also the LVR increment.
    pub step: f64,
    /// Arrears-default probability assumed by the inversion.
    pub p_a: f64,
    /// Highest LVR matched; must be a whole number of steps.
    pub max_lvr: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            step: 0.01,
            p_a: 0.10,
            max_lvr: 1.80,
        }
    }
}

impl InversionConfig {
    /// Validates the config and returns the number of strips.
    pub fn strip_count(&self) -> Result<usize> {
        check_param("inversion.step", self.step, self.step > 0.0, "must be > 0")?;
        check_param(
            "inversion.p_a",
            self.p_a,
            (0.0..=1.0).contains(&self.p_a),
            "must lie in (0, 1]",
        )?;
        if self.p_a == 0.0 {
            return Err(RiskError::Degenerate(
                "p_a = 0 leaves the expected loss independent of the distribution",
            ));
        }
        check_param(
            "inversion.max_lvr",
            self.max_lvr,
            self.max_lvr > 0.0,
            "must be > 0",
        )?;
        let n = (self.max_lvr / self.step).round();
        if n < 1.0 || (n * self.step - self.max_lvr).abs() > 1e-9 * self.max_lvr {
            return Err(RiskError::GridMismatch(format!(
                "max_lvr {} is not a whole multiple of step {}",
                self.max_lvr, self.step
            )));
        }
        Ok(n as usize)
    }

    /// The LVR gridpoints `step, 2·step, …, max_lvr`.
    pub fn lvr_grid(&self) -> Result<Vec<f64>> {
        let n = self.strip_count()?;
        Ok((1..=n).map(|k| k as f64 * self.step).collect())
    }
}

/// Signed strip masses implied by an EL curve, on `[-1, max_lvr - 1)`.
/// Negative masses are a legitimate diagnostic output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImpliedMvd(TabulatedMvd);

impl ImpliedMvd {
    pub fn table(&self) -> &TabulatedMvd {
        &self.0
    }

    pub fn into_table(self) -> TabulatedMvd {
        self.0
    }

    pub fn into_distribution(self) -> MvdDistribution {
        MvdDistribution::Tabulated(self.0)
    }

    /// Strips with mass below `-noise`; round-off in the triangular solve
    /// leaves residues of order 1e-12 where the true mass is zero.
    pub fn negative_strip_count(&self, noise: f64) -> usize {
        self.0.masses().iter().filter(|&&m| m < -noise).count()
    }
}

impl From<TabulatedMvd> for ImpliedMvd {
    fn from(t: TabulatedMvd) -> Self {
        Self(t)
    }
}

fn check_aligned(pm: &TabulatedMvd, lvr: f64) -> Result<()> {
    if !pm.is_aligned(MVD_FLOOR) {
        return Err(RiskError::GridMismatch(format!(
            "strip grid origin {} is not on a lattice through -1 with step {}",
            pm.grid_origin(),
            pm.step()
        )));
    }
    if !pm.is_aligned(lvr - 1.0) {
        return Err(RiskError::GridMismatch(format!(
            "LVR {lvr} is not a multiple of the strip width {}",
            pm.step()
        )));
    }
    Ok(())
}

/// Discrete EL at a gridpoint LVR: `p_a · Σ (L - 1 - M_i)/L · mass_i` over
/// strips with `M_i < L - 1`. Zero at `lvr == 0`.
pub fn forward_discrete(pm: &TabulatedMvd, p_a: f64, lvr: f64) -> Result<f64> {
    check_param("p_a", p_a, (0.0..=1.0).contains(&p_a), "must lie in [0, 1]")?;
    if lvr == 0.0 {
        return Ok(0.0);
    }
    if !(lvr > 0.0 && lvr.is_finite()) {
        return Err(RiskError::InvalidLvr(lvr));
    }
    check_aligned(pm, lvr)?;
    let dist = MvdDistribution::Tabulated(pm.clone());
    crate::risk::expected_loss(
        lvr,
        &dist,
        &crate::risk::LoanContext::with_pd(p_a)?,
        &Default::default(),
    )
}

/// Solves for the strip masses that reproduce `curve` at every LVR
/// gridpoint of `cfg`, lowest strip first.
pub fn invert_el_to_pm(curve: &ElCurve, cfg: &InversionConfig) -> Result<ImpliedMvd> {
    let n = cfg.strip_count()?;
    let step = cfg.step;
    let mut masses = vec![0.0; n];
    for k in 1..=n {
        let lvr = k as f64 * step;
        let el = curve
            .eval_el(lvr)
            .map_err(|e| RiskError::AtLvr {
                lvr,
                source: Box::new(e),
            })?;
        // Σ_{i ≤ k} (k - i + 1)·ΔM·mass_i must equal L·EL/p_a.
        let target = lvr * el / cfg.p_a;
        let known: f64 = masses[..k - 1]
            .iter()
            .enumerate()
            .map(|(i, m)| (k - i) as f64 * step * m)
            .sum();
        let coefficient = step;
        assert!(coefficient > 0.0, "newest strip has a zero coefficient");
        masses[k - 1] = (target - known) / coefficient;
    }
    Ok(ImpliedMvd(TabulatedMvd::new(MVD_FLOOR, step, masses)?))
}

/// `p_a` times the cumulative signed mass strictly below `L - 1`, at each
/// gridpoint. Values above 1, or dips after a negative strip, are reported
/// as they are.
pub fn implied_pd_curve(pm: &ImpliedMvd, p_a: f64, lvr_grid: &[f64]) -> Result<Vec<f64>> {
    check_param("p_a", p_a, (0.0..=1.0).contains(&p_a), "must lie in [0, 1]")?;
    let dist = MvdDistribution::Tabulated(pm.0.clone());
    lvr_grid
        .iter()
        .map(|&lvr| {
            if !(lvr > 0.0 && lvr.is_finite()) {
                return Err(RiskError::InvalidLvr(lvr));
            }
            check_aligned(&pm.0, lvr)?;
            Ok(p_a * dist.mass_between(MVD_FLOOR, lvr - 1.0)?)
        })
        .collect()
}
