//! Uniform-strip midpoint rectangle rule used by the forward risk integrals.

use serde::{Deserialize, Serialize};

use crate::error::{check_param, Result};

/// Default strip width for continuous integrals over MVD.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Mass below which the liquidation-default LGD is reported as zero.
pub const DEFAULT_ZERO_MASS_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    #[default]
    MidpointRectangle,
}

/// Settings for the forward integrals over the MVD density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Target strip width. The actual width is shrunk so strips tile the
    /// integration interval exactly.
    pub step: f64,
    pub method: QuadratureMethod,
    /// A liquidation PD mass at or below this is treated as zero.
    pub zero_mass_epsilon: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            method: QuadratureMethod::MidpointRectangle,
            zero_mass_epsilon: DEFAULT_ZERO_MASS_EPSILON,
        }
    }
}

impl QuadratureConfig {
    pub fn with_step(step: f64) -> Result<Self> {
        let cfg = Self {
            step,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_param("quadrature.step", self.step, self.step > 0.0, "must be > 0")?;
        check_param(
            "quadrature.zero_mass_epsilon",
            self.zero_mass_epsilon,
            self.zero_mass_epsilon >= 0.0,
            "must be >= 0",
        )
    }
}

/// Integrates `f` over `[a, b]` with the midpoint rule on `ceil((b - a) / step)`
/// equal strips. Returns 0 for an empty or reversed interval.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, step: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}
