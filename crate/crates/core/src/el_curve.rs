//! Target expected-loss curves as functions of LVR.

use serde::{Deserialize, Serialize};

use crate::error::{check_param, Result, RiskError};

/// Power-law PD times a single-valued LGD, capped:
///
/// `EL(L) = min(cap, pd_scale · L^pd_exponent · max(0, (L + mvd - 1) / L))`
///
/// `mvd` is the assumed decline as a positive fraction (0.40 for a 40% fall).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParametric")]
pub struct ParametricElCurve {
    pd_scale: f64,
    pd_exponent: f64,
    mvd: f64,
    cap: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParametric {
    pd_scale: f64,
    pd_exponent: f64,
    mvd: f64,
    #[serde(default = "default_cap")]
    cap: f64,
}

fn default_cap() -> f64 {
    1.0
}

impl TryFrom<RawParametric> for ParametricElCurve {
    type Error = RiskError;
    fn try_from(r: RawParametric) -> Result<Self> {
        Self::new(r.pd_scale, r.pd_exponent, r.mvd, r.cap)
    }
}

impl ParametricElCurve {
    pub fn new(pd_scale: f64, pd_exponent: f64, mvd: f64, cap: f64) -> Result<Self> {
        check_param("pd_scale", pd_scale, pd_scale >= 0.0, "must be >= 0")?;
        check_param("pd_exponent", pd_exponent, pd_exponent >= 0.0, "must be >= 0")?;
        check_param("mvd", mvd, (0.0..=1.0).contains(&mvd), "must lie in [0, 1]")?;
        check_param("cap", cap, cap > 0.0 && cap <= 1.0, "must lie in (0, 1]")?;
        Ok(Self {
            pd_scale,
            pd_exponent,
            mvd,
            cap,
        })
    }

    /// `0.015 · L^20`, 40% MVD, capped at 100%.
    pub fn reference() -> Self {
        Self {
            pd_scale: 0.015,
            pd_exponent: 20.0,
            mvd: 0.40,
            cap: 1.0,
        }
    }

    pub fn pd_scale(&self) -> f64 {
        self.pd_scale
    }

    pub fn pd_exponent(&self) -> f64 {
        self.pd_exponent
    }

    pub fn mvd(&self) -> f64 {
        self.mvd
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    fn eval(&self, lvr: f64) -> f64 {
        let lgd = ((lvr + self.mvd - 1.0) / lvr).max(0.0);
        if lgd == 0.0 {
            return 0.0;
        }
        (self.pd_scale * lvr.powf(self.pd_exponent) * lgd).min(self.cap)
    }
}

/// EL values on an LVR grid, linearly interpolated inside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTabulatedEl")]
pub struct TabulatedElCurve {
    #[serde(rename = "lvr")]
    lvr_grid: Vec<f64>,
    #[serde(rename = "el")]
    el_values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTabulatedEl {
    lvr: Vec<f64>,
    el: Vec<f64>,
}

impl TryFrom<RawTabulatedEl> for TabulatedElCurve {
    type Error = RiskError;
    fn try_from(r: RawTabulatedEl) -> Result<Self> {
        Self::new(r.lvr, r.el)
    }
}

impl TabulatedElCurve {
    pub fn new(lvr_grid: Vec<f64>, el_values: Vec<f64>) -> Result<Self> {
        if lvr_grid.len() != el_values.len() {
            return Err(RiskError::GridMismatch(format!(
                "{} LVR points but {} EL values",
                lvr_grid.len(),
                el_values.len()
            )));
        }
        if lvr_grid.is_empty() {
            return Err(RiskError::Degenerate("tabulated EL curve has no points"));
        }
        for &l in &lvr_grid {
            check_param("lvr", l, true, "must be finite")?;
        }
        for &v in &el_values {
            check_param("el", v, true, "must be finite")?;
        }
        if lvr_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RiskError::GridMismatch(
                "tabulated EL curve LVRs must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            lvr_grid,
            el_values,
        })
    }

    pub fn lvr_grid(&self) -> &[f64] {
        &self.lvr_grid
    }

    pub fn el_values(&self) -> &[f64] {
        &self.el_values
    }

    fn eval(&self, lvr: f64) -> Result<f64> {
        let (lo, hi) = (self.lvr_grid[0], *self.lvr_grid.last().unwrap());
        // Allow round-off at the ends so grids built as k·step still hit them.
        let slack = 1e-9 * hi.abs().max(1.0);
        if lvr < lo - slack || lvr > hi + slack {
            return Err(RiskError::OutOfRange { lvr, lo, hi });
        }
        let lvr = lvr.clamp(lo, hi);
        let j = self.lvr_grid.partition_point(|&x| x < lvr);
        if j < self.lvr_grid.len() && (self.lvr_grid[j] - lvr).abs() <= slack {
            return Ok(self.el_values[j]);
        }
        if j > 0 && (lvr - self.lvr_grid[j - 1]).abs() <= slack {
            return Ok(self.el_values[j - 1]);
        }
        let (x0, x1) = (self.lvr_grid[j - 1], self.lvr_grid[j]);
        let (y0, y1) = (self.el_values[j - 1], self.el_values[j]);
        Ok(y0 + (y1 - y0) * (lvr - x0) / (x1 - x0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ElCurve {
    Parametric(ParametricElCurve),
    Tabulated(TabulatedElCurve),
}

impl ElCurve {
    /// Expected loss at `lvr > 0`.
    pub fn eval_el(&self, lvr: f64) -> Result<f64> {
        if !(lvr > 0.0 && lvr.is_finite()) {
            return Err(RiskError::InvalidLvr(lvr));
        }
        match self {
            Self::Parametric(p) => Ok(p.eval(lvr)),
            Self::Tabulated(t) => t.eval(lvr),
        }
    }
}

impl From<ParametricElCurve> for ElCurve {
    fn from(p: ParametricElCurve) -> Self {
        Self::Parametric(p)
    }
}

impl From<TabulatedElCurve> for ElCurve {
    fn from(t: TabulatedElCurve) -> Self {
        Self::Tabulated(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference() -> ElCurve {
        ParametricElCurve::reference().into()
    }

    #[test]
    fn reference_curve_values() {
        let c = reference();
        assert_eq!(c.eval_el(0.60).unwrap(), 0.0);
        assert!((c.eval_el(1.00).unwrap() - 0.006).abs() < 1e-15);
        assert_eq!(c.eval_el(1.40).unwrap(), 1.0);
    }

    #[test]
    fn reference_cap_first_binds_between_127_and_128() {
        let c = reference();
        assert!(c.eval_el(1.27).unwrap() < 1.0);
        assert_eq!(c.eval_el(1.28).unwrap(), 1.0);
    }

    #[test]
    fn tabulated_interpolates_and_refuses_extrapolation() {
        let c: ElCurve = TabulatedElCurve::new(vec![0.5, 1.0, 1.5], vec![0.0, 0.01, 0.03])
            .unwrap()
            .into();
        assert!((c.eval_el(0.75).unwrap() - 0.005).abs() < 1e-15);
        assert!((c.eval_el(1.25).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(c.eval_el(1.5).unwrap(), 0.03);
        assert!(matches!(c.eval_el(1.6), Err(RiskError::OutOfRange { .. })));
        assert!(matches!(c.eval_el(0.4), Err(RiskError::OutOfRange { .. })));
    }

    #[test]
    fn tabulated_validation() {
        assert!(TabulatedElCurve::new(vec![0.5, 1.0], vec![0.0]).is_err());
        assert!(TabulatedElCurve::new(vec![1.0, 0.5], vec![0.0, 0.0]).is_err());
        assert!(TabulatedElCurve::new(vec![], vec![]).is_err());
    }

    #[test]
    fn parametric_validation() {
        assert!(ParametricElCurve::new(-0.1, 20.0, 0.4, 1.0).is_err());
        assert!(ParametricElCurve::new(0.1, 20.0, 1.4, 1.0).is_err());
        assert!(ParametricElCurve::new(0.1, 20.0, 0.4, 0.0).is_err());
        assert!(reference().eval_el(0.0).is_err());
    }

    #[test]
    fn json_forms() {
        let c: ElCurve = serde_json::from_str(
            r#"{"type":"parametric","pd_scale":0.015,"pd_exponent":20,"mvd":0.40,"cap":1.0}"#,
        )
        .unwrap();
        assert_eq!(c, reference());
        let t: ElCurve =
            serde_json::from_str(r#"{"type":"tabulated","lvr":[0.5,1.0],"el":[0.0,0.1]}"#).unwrap();
        assert!((t.eval_el(0.75).unwrap() - 0.05).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn parametric_never_exceeds_cap(
            scale in 0.0..1.0f64, exp in 0.0..30.0f64, mvd in 0.0..1.0f64,
            cap in 0.01..1.0f64, lvr in 0.01..3.0f64,
        ) {
            let c = ParametricElCurve::new(scale, exp, mvd, cap).unwrap();
            let v = ElCurve::from(c).eval_el(lvr).unwrap();
            prop_assert!((0.0..=cap).contains(&v));
        }

        #[test]
        fn parametric_zero_below_buffer_and_monotone_above(
            scale in 0.0..1.0f64, exp in 0.0..30.0f64, mvd in 0.0..1.0f64,
            a in 0.01..3.0f64, b in 0.01..3.0f64,
        ) {
            let c = ElCurve::from(ParametricElCurve::new(scale, exp, mvd, 1.0).unwrap());
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if lo <= 1.0 - mvd {
                prop_assert_eq!(c.eval_el(lo).unwrap(), 0.0);
            } else {
                prop_assert!(c.eval_el(hi).unwrap() >= c.eval_el(lo).unwrap());
            }
        }
    }
}
