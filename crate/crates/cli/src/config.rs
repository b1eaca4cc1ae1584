//! Scenario configuration read by every subcommand.
//!
//! ```json
//! {
//!   "distribution": {"type": "normal", "mean": 0.0, "std_dev": 0.20},
//!   "p_a": 0.075,
//!   "lgd_min": 0.0,
//!   "lvr_grid": {"start": 0.01, "stop": 1.50, "step": 0.01},
//!   "quadrature": {"step": 0.0001},
//!   "inversion": {"step": 0.01, "p_a": 0.10, "max_lvr": 1.80},
//!   "el_curve": {"type": "parametric", "pd_scale": 0.015, "pd_exponent": 20, "mvd": 0.40, "cap": 1.0},
//!   "simulation": {"n_trials": 1000000, "seed": 42, "lvr": 1.0}
//! }
//! ```
//!
//! Every section is optional; each subcommand requires the ones it uses.

use mvdrisk::{ElCurve, InversionConfig, MvdDistribution, QuadratureConfig};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub distribution: Option<MvdDistribution>,
    pub p_a: Option<f64>,
    pub lgd_min: Option<f64>,
    pub lvr_grid: Option<GridSpec>,
    pub quadrature: Option<QuadratureConfig>,
    pub inversion: Option<InversionConfig>,
    pub el_curve: Option<ElCurve>,
    pub simulation: Option<SimulationSection>,
}

/// An LVR grid: either an inclusive range or explicit points.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range { start: f64, stop: f64, step: f64 },
    Points(Vec<f64>),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
    pub lvr: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }
}

pub(crate) fn require<T: Clone>(value: &Option<T>, field: &str) -> Result<T, CliError> {
    value
        .clone()
        .ok_or_else(|| CliError::Config(format!("missing required field `{field}`")))
}

impl GridSpec {
    /// Expands the grid. Range points are `start + i·step` up to and
    /// including `stop` (within round-off); `stop < start` gives no points.
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let bad = |what: &str| CliError::Config(format!("lvr_grid: {what}"));
        let pts = match *self {
            Self::Range { start, stop, step } => {
                if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
                    return Err(bad("start, stop and step must be finite"));
                }
                if step <= 0.0 {
                    return Err(bad("step must be > 0"));
                }
                if stop < start {
                    Vec::new()
                } else {
                    let n = ((stop - start) / step + 1e-9).floor() as usize;
                    (0..=n).map(|i| start + i as f64 * step).collect()
                }
            }
            Self::Points(ref v) => v.clone(),
        };
        for (i, &l) in pts.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(bad(&format!("LVR {l} must be positive")));
            }
            if i > 0 && l <= pts[i - 1] {
                return Err(bad("LVRs must be strictly increasing"));
            }
        }
        Ok(pts)
    }
}
