//! Market-value-decline (MVD) distributions.
//!
//! `M` is the proportional change in the security value between assessment
//! and liquidation; negative values are declines and `M = -1` means the
//! property is worthless. Every distribution here lives on `[-1, inf)`:
//! queries below `-1` see no mass. Continuous laws are cut at `-1` without
//! renormalization.
//!
//! Tabulated distributions hold one signed mass per strip of width `step`.
//! Each strip is represented by its lower edge, so strip `i` sits at
//! `grid_origin + i * step` and covers `[edge_i, edge_i + step)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{check_param, Result, RiskError};
use crate::quadrature::{midpoint, QuadratureConfig};

/// Lowest attainable MVD: total loss of property value.
pub const MVD_FLOOR: f64 = -1.0;

// Tails of a normal beyond this many standard deviations are ignored in the
// shortfall quadrature (density < 1e-31).
const NORMAL_QUAD_HALF_WIDTH: f64 = 12.0;

// Relative slack when snapping a query point onto a tabulated lattice.
const LATTICE_SNAP: f64 = 1e-9;

/// Single-valued MVD carrying all probability mass at `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDirac", deny_unknown_fields)]
pub struct DiracParams {
    m: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDirac {
    m: f64,
}

impl TryFrom<RawDirac> for DiracParams {
    type Error = RiskError;
    fn try_from(raw: RawDirac) -> Result<Self> {
        Self::new(raw.m)
    }
}

impl DiracParams {
    pub fn new(m: f64) -> Result<Self> {
        check_param("m", m, m >= MVD_FLOOR, "MVD must be >= -1")?;
        Ok(Self { m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }
}

/// Normal MVD law, hard-truncated at `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNormal")]
pub struct NormalParams {
    mean: f64,
    std_dev: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNormal {
    #[serde(default)]
    mean: f64,
    std_dev: f64,
}

impl TryFrom<RawNormal> for NormalParams {
    type Error = RiskError;
    fn try_from(raw: RawNormal) -> Result<Self> {
        Self::new(raw.mean, raw.std_dev)
    }
}

impl NormalParams {
    pub fn new(mean: f64, std_dev: f64) -> Result<Self> {
        check_param("mean", mean, true, "must be finite")?;
        check_param("std_dev", std_dev, std_dev > 0.0, "must be > 0")?;
        Ok(Self { mean, std_dev })
    }

    /// Zero-mean normal with the given standard deviation.
    pub fn centered(std_dev: f64) -> Result<Self> {
        Self::new(0.0, std_dev)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    pub fn density(&self, m: f64) -> f64 {
        if m < MVD_FLOOR {
            return 0.0;
        }
        let z = (m - self.mean) / self.std_dev;
        (-0.5 * z * z).exp() / (self.std_dev * (2.0 * PI).sqrt())
    }

    /// Untruncated normal mass on `[a, b]`, computed from whichever tail
    /// keeps the subtraction well conditioned.
    fn raw_mass(&self, a: f64, b: f64) -> f64 {
        let za = (a - self.mean) / self.std_dev;
        let zb = (b - self.mean) / self.std_dev;
        if za >= 0.0 {
            0.5 * (libm::erfc(za * FRAC_1_SQRT_2) - libm::erfc(zb * FRAC_1_SQRT_2))
        } else {
            0.5 * (libm::erfc(-zb * FRAC_1_SQRT_2) - libm::erfc(-za * FRAC_1_SQRT_2))
        }
    }
}

/// Signed per-strip masses on a uniform MVD grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTabulated")]
pub struct TabulatedMvd {
    grid_origin: f64,
    step: f64,
    masses: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTabulated {
    grid_origin: f64,
    step: f64,
    masses: Vec<f64>,
}

impl TryFrom<RawTabulated> for TabulatedMvd {
    type Error = RiskError;
    fn try_from(raw: RawTabulated) -> Result<Self> {
        Self::new(raw.grid_origin, raw.step, raw.masses)
    }
}

impl TabulatedMvd {
    pub fn new(grid_origin: f64, step: f64, masses: Vec<f64>) -> Result<Self> {
        check_param("step", step, step > 0.0, "must be > 0")?;
        check_param(
            "grid_origin",
            grid_origin,
            grid_origin >= MVD_FLOOR,
            "must be >= -1",
        )?;
        if let Some(bad) = masses.iter().find(|v| !v.is_finite()) {
            return Err(RiskError::InvalidParameter {
                name: "masses",
                value: *bad,
                reason: "masses must be finite",
            });
        }
        Ok(Self {
            grid_origin,
            step,
            masses,
        })
    }

    /// Discretizes `dist` into `n_strips` strips of width `step` starting at
    /// `grid_origin`. Each strip receives the mass of `[edge, edge + step)`.
    pub fn discretize(
        dist: &MvdDistribution,
        grid_origin: f64,
        step: f64,
        n_strips: usize,
    ) -> Result<Self> {
        let mut table = Self::new(grid_origin, step, vec![0.0; n_strips])?;
        match dist {
            // A point mass goes to the strip whose lattice cell contains it,
            // with the same snapping the queries use.
            MvdDistribution::Dirac(d) => {
                let pos = table.lattice_position(d.m).floor();
                if pos >= 0.0 && (pos as usize) < n_strips {
                    table.masses[pos as usize] = 1.0;
                }
            }
            _ => {
                for i in 0..n_strips {
                    let lo = table.edge(i);
                    let hi = table.edge(i + 1);
                    table.masses[i] = dist.mass_between(lo, hi)?;
                }
            }
        }
        Ok(table)
    }

    pub fn grid_origin(&self) -> f64 {
        self.grid_origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Lower edge of strip `i`, which is also its representative MVD.
    pub fn edge(&self, i: usize) -> f64 {
        self.grid_origin + i as f64 * self.step
    }

    /// Geometric centre of strip `i`.
    pub fn strip_midpoint(&self, i: usize) -> f64 {
        self.grid_origin + (i as f64 + 0.5) * self.step
    }

    /// Per-strip density `mass / step`.
    pub fn densities(&self) -> impl Iterator<Item = f64> + '_ {
        self.masses.iter().map(move |m| m / self.step)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Position of `x` in strip units, snapped to the nearest lattice point
    /// when within round-off of it.
    pub(crate) fn lattice_position(&self, x: f64) -> f64 {
        let pos = (x - self.grid_origin) / self.step;
        let nearest = pos.round();
        if (pos - nearest).abs() <= LATTICE_SNAP * nearest.abs().max(1.0) {
            nearest
        } else {
            pos
        }
    }

    /// Whether `x` lies on the strip lattice.
    pub fn is_aligned(&self, x: f64) -> bool {
        let pos = self.lattice_position(x);
        pos == pos.round()
    }

    /// Number of strips whose representative lies strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        if x == f64::INFINITY {
            return self.masses.len();
        }
        let pos = self.lattice_position(x).ceil();
        if pos <= 0.0 {
            0
        } else {
            (pos as usize).min(self.masses.len())
        }
    }

    fn mass_between(&self, a: f64, b: f64) -> f64 {
        let lo = self.count_below(a);
        let hi = self.count_below(b);
        if hi <= lo {
            return 0.0;
        }
        self.masses[lo..hi].iter().sum()
    }

    /// `sum (t - M_i) * mass_i` over strips with `lower <= M_i < t`, with
    /// the distance measured in lattice units so aligned grids are exact.
    fn shortfall(&self, lower: f64, t: f64) -> f64 {
        let lo = self.count_below(lower);
        let hi = self.count_below(t);
        if hi <= lo {
            return 0.0;
        }
        let pos_t = self.lattice_position(t);
        (lo..hi)
            .map(|i| (pos_t - i as f64) * self.step * self.masses[i])
            .sum()
    }
}

/// A distribution renormalized to unit mass above `floor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTruncated", into = "RawTruncated")]
pub struct TruncatedMvd {
    base: Box<MvdDistribution>,
    floor: f64,
    scale: f64,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruncated {
    floor: f64,
    base: Box<MvdDistribution>,
}

impl TryFrom<RawTruncated> for TruncatedMvd {
    type Error = RiskError;
    fn try_from(raw: RawTruncated) -> Result<Self> {
        match raw.base.truncate_renormalize(raw.floor)? {
            MvdDistribution::Truncated(t) => Ok(t),
            // A Dirac survives truncation unchanged.
            other => Ok(TruncatedMvd {
                base: Box::new(other),
                floor: raw.floor,
                scale: 1.0,
            }),
        }
    }
}

impl From<TruncatedMvd> for RawTruncated {
    fn from(t: TruncatedMvd) -> Self {
        RawTruncated {
            floor: t.floor,
            base: t.base,
        }
    }
}

impl TruncatedMvd {
    pub fn base(&self) -> &MvdDistribution {
        &self.base
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Renormalization factor applied to the base mass above `floor`.
    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// A probability law for the market value decline `M` on `[-1, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MvdDistribution {
    Dirac(DiracParams),
    Normal(NormalParams),
    Tabulated(TabulatedMvd),
    Truncated(TruncatedMvd),
}

impl MvdDistribution {
    pub fn dirac(m: f64) -> Result<Self> {
        DiracParams::new(m).map(Self::Dirac)
    }

    pub fn normal(mean: f64, std_dev: f64) -> Result<Self> {
        NormalParams::new(mean, std_dev).map(Self::Normal)
    }

    /// Signed mass on `[a, b)` (continuous variants: `[a, b]`), with the
    /// interval clipped to the support `[-1, inf)`.
    pub fn mass_between(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() || a > b {
            return Err(RiskError::InvalidInterval { a, b });
        }
        let a = a.max(MVD_FLOOR);
        let b = b.max(MVD_FLOOR);
        Ok(self.clipped_mass(a, b))
    }

    fn clipped_mass(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::Dirac(d) => {
                if a <= d.m && d.m < b {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Normal(n) => {
                if b <= a {
                    0.0
                } else {
                    n.raw_mass(a, b)
                }
            }
            Self::Tabulated(t) => t.mass_between(a, b),
            Self::Truncated(t) => {
                t.scale * t.base.clipped_mass(a.max(t.floor), b.max(t.floor))
            }
        }
    }

    /// Total mass on the support.
    pub fn total_mass(&self) -> f64 {
        self.clipped_mass(MVD_FLOOR, f64::INFINITY)
    }

    /// Returns a copy with no mass below `floor` and unit mass above it,
    /// proportional to the original there.
    pub fn truncate_renormalize(&self, floor: f64) -> Result<Self> {
        check_param("floor", floor, floor >= MVD_FLOOR, "must be >= -1")?;
        match self {
            Self::Dirac(d) => {
                if d.m >= floor {
                    Ok(self.clone())
                } else {
                    Err(RiskError::DegenerateTruncation { floor })
                }
            }
            Self::Truncated(t) => t.base.truncate_renormalize(floor.max(t.floor)),
            _ => {
                let surviving = self.clipped_mass(floor, f64::INFINITY);
                if !(surviving > 0.0) || !surviving.is_finite() {
                    return Err(RiskError::DegenerateTruncation { floor });
                }
                Ok(Self::Truncated(TruncatedMvd {
                    base: Box::new(self.clone()),
                    floor,
                    scale: 1.0 / surviving,
                }))
            }
        }
    }

    /// `∫_{-1}^{t} (t - M) P(M) dM`, the expected shortfall of the security
    /// below a balance-to-value threshold `t = L - 1`. Strictly `M < t`.
    pub(crate) fn shortfall(&self, t: f64, quad: &QuadratureConfig) -> f64 {
        self.shortfall_from(MVD_FLOOR, t, quad)
    }

    fn shortfall_from(&self, lower: f64, t: f64, quad: &QuadratureConfig) -> f64 {
        let lower = lower.max(MVD_FLOOR);
        if t <= lower {
            return 0.0;
        }
        match self {
            Self::Dirac(d) => {
                if lower <= d.m && d.m < t {
                    t - d.m
                } else {
                    0.0
                }
            }
            Self::Normal(n) => {
                let lo = lower.max(n.mean - NORMAL_QUAD_HALF_WIDTH * n.std_dev);
                let hi = t.min(n.mean + NORMAL_QUAD_HALF_WIDTH * n.std_dev);
                midpoint(|m| (t - m) * n.density(m), lo, hi, quad.step)
            }
            Self::Tabulated(tab) => tab.shortfall(lower, t),
            Self::Truncated(tr) => tr.scale * tr.base.shortfall_from(lower.max(tr.floor), t, quad),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(z: f64) -> f64 {
        0.5 * libm::erfc(-z / 2f64.sqrt())
    }

    /// Trapezoid integral of the normal density, independent of erfc.
    fn trapezoid_mass(mean: f64, sd: f64, a: f64, b: f64, h: f64) -> f64 {
        let n = ((b - a) / h).round() as usize;
        let h = (b - a) / n as f64;
        let f = |x: f64| {
            let z = (x - mean) / sd;
            (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
        };
        let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
        h * (0.5 * f(a) + inner + 0.5 * f(b))
    }

    #[test]
    fn normal_half_mass_below_zero() {
        let d = MvdDistribution::normal(0.0, 0.20).unwrap();
        let v = d.mass_between(-1.0, 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-6, "{v}");
    }

    #[test]
    fn dirac_inside_interval() {
        let d = MvdDistribution::dirac(-0.45).unwrap();
        assert_eq!(d.mass_between(-0.5, -0.4).unwrap(), 1.0);
        assert_eq!(d.mass_between(-0.45, -0.4).unwrap(), 1.0);
        assert_eq!(d.mass_between(-0.5, -0.45).unwrap(), 0.0);
    }

    #[test]
    fn normal_tail_mass_matches_trapezoid_oracle() {
        let d = MvdDistribution::normal(0.0, 0.30).unwrap();
        let oracle = trapezoid_mass(0.0, 0.30, -1.0, -0.40, 1e-5);
        let v = d.mass_between(-1.0, -0.40).unwrap();
        assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");
        assert!((v - (phi(-4.0 / 3.0) - phi(-10.0 / 3.0))).abs() < 1e-14);
    }

    #[test]
    fn reversed_interval_is_an_error() {
        let d = MvdDistribution::normal(0.0, 0.1).unwrap();
        assert!(matches!(
            d.mass_between(0.1, 0.0),
            Err(RiskError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn no_mass_below_minus_one() {
        let d = MvdDistribution::normal(-0.9, 0.5).unwrap();
        assert_eq!(d.mass_between(-3.0, -1.0).unwrap(), 0.0);
        let t = TabulatedMvd::new(-1.0, 0.1, vec![0.5, 0.5]).unwrap();
        assert_eq!(MvdDistribution::Tabulated(t).mass_between(-2.0, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn truncation_renormalizes_to_unit_mass() {
        let d = MvdDistribution::normal(0.0, 0.20).unwrap();
        let t = d.truncate_renormalize(0.0).unwrap();
        assert!((t.mass_between(0.0, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(t.mass_between(-1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn truncating_dirac_above_its_point_is_degenerate() {
        let d = MvdDistribution::dirac(-0.45).unwrap();
        assert_eq!(
            d.truncate_renormalize(-0.40),
            Err(RiskError::DegenerateTruncation { floor: -0.40 })
        );
        assert_eq!(d.truncate_renormalize(-0.50).unwrap(), d);
    }

    #[test]
    fn truncated_mass_ratio_matches_trapezoid_oracle() {
        let d = MvdDistribution::normal(0.0, 0.10).unwrap();
        let t = d.truncate_renormalize(-0.10).unwrap();
        let num = trapezoid_mass(0.0, 0.10, -0.10, 0.0, 1e-6);
        let den = 1.0 - trapezoid_mass(0.0, 0.10, -1.0, -0.10, 1e-6) - phi(-10.0);
        let v = t.mass_between(-0.10, 0.0).unwrap();
        assert!((v - num / den).abs() < 1e-9, "{v} vs {}", num / den);
    }

    #[test]
    fn nested_truncation_uses_the_higher_floor() {
        let d = MvdDistribution::normal(0.0, 0.2).unwrap();
        let once = d.truncate_renormalize(-0.1).unwrap().truncate_renormalize(-0.3).unwrap();
        let direct = d.truncate_renormalize(-0.1).unwrap();
        assert_eq!(once, direct);
    }

    #[test]
    fn truncated_tabulated_with_no_surviving_mass() {
        let t = TabulatedMvd::new(-1.0, 0.5, vec![1.0, 0.0, 0.0]).unwrap();
        let d = MvdDistribution::Tabulated(t);
        assert!(matches!(
            d.truncate_renormalize(-0.5),
            Err(RiskError::DegenerateTruncation { .. })
        ));
    }

    #[test]
    fn tabulated_rejects_bad_inputs() {
        assert!(TabulatedMvd::new(-1.0, 0.0, vec![]).is_err());
        assert!(TabulatedMvd::new(-1.5, 0.1, vec![]).is_err());
        assert!(TabulatedMvd::new(-1.0, 0.1, vec![f64::NAN]).is_err());
        assert!(DiracParams::new(-1.01).is_err());
        assert!(NormalParams::new(0.0, 0.0).is_err());
    }

    #[test]
    fn tabulated_uses_lower_edge_representative() {
        let t = TabulatedMvd::new(-1.0, 0.25, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let d = MvdDistribution::Tabulated(t);
        // Strip 1 sits at -0.75.
        assert_eq!(d.mass_between(-0.75, -0.70).unwrap(), 0.2);
        assert_eq!(d.mass_between(-0.80, -0.75).unwrap(), 0.0);
        // Round-off in the query point does not move a lattice boundary.
        let b = -1.0 + 3.0 * 0.25 + 1e-15;
        assert!((d.mass_between(-1.0, b).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn discretized_dirac_lands_on_its_lattice_cell() {
        let d = MvdDistribution::dirac(-0.45).unwrap();
        let t = TabulatedMvd::discretize(&d, -1.0, 0.01, 200).unwrap();
        assert_eq!(t.masses()[55], 1.0);
        assert_eq!(t.total_mass(), 1.0);
    }

    #[test]
    fn json_round_trip_of_each_variant() {
        for src in [
            r#"{"type":"dirac","m":-0.45}"#,
            r#"{"type":"normal","mean":0.0,"std_dev":0.2}"#,
            r#"{"type":"tabulated","grid_origin":-1.0,"step":0.5,"masses":[0.25,0.75]}"#,
            r#"{"type":"truncated","floor":-0.2,"base":{"type":"normal","mean":0.0,"std_dev":0.2}}"#,
        ] {
            let d: MvdDistribution = serde_json::from_str(src).unwrap();
            let back: MvdDistribution =
                serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
            assert_eq!(d, back);
        }
    }

    #[test]
    fn json_defaults_and_validation() {
        let d: MvdDistribution = serde_json::from_str(r#"{"type":"normal","std_dev":0.1}"#).unwrap();
        assert_eq!(d, MvdDistribution::normal(0.0, 0.1).unwrap());
        assert!(serde_json::from_str::<MvdDistribution>(r#"{"type":"normal","std_dev":-0.1}"#).is_err());
        assert!(serde_json::from_str::<MvdDistribution>(r#"{"type":"dirac","m":-2}"#).is_err());
        assert!(serde_json::from_str::<MvdDistribution>(r#"{"type":"gamma"}"#).is_err());
    }
}
