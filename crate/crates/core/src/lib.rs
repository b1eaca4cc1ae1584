//! Credit-risk measures for asset-backed loans derived from a distribution
//! of the market value decline (MVD) of the security property.
//!
//! The library evaluates expected loss (EL), the arrears-default LGD, and
//! the liquidation-default PD and LGD as functions of the loan-to-value
//! ratio, inverts a target EL curve into the implied discrete MVD
//! distribution, and estimates the same measures by Monte Carlo.
//!
//! ```
//! use mvdrisk::{expected_loss, LoanContext, MvdDistribution, QuadratureConfig};
//!
//! let dist = MvdDistribution::dirac(-0.45).unwrap();
//! let ctx = LoanContext::with_pd(0.075).unwrap();
//! let el = expected_loss(1.0, &dist, &ctx, &QuadratureConfig::default()).unwrap();
//! assert!((el - 0.03375).abs() < 1e-12);
//! ```

pub mod distribution;
pub mod el_curve;
pub mod error;
pub mod inversion;
pub mod quadrature;
pub mod risk;
pub mod simulation;

pub use distribution::{DiracParams, MvdDistribution, NormalParams, TabulatedMvd, TruncatedMvd};
pub use el_curve::{ElCurve, ParametricElCurve, TabulatedElCurve};
pub use error::{Result, RiskError};
pub use inversion::{forward_discrete, implied_pd_curve, invert_el_to_pm, ImpliedMvd, InversionConfig};
pub use quadrature::QuadratureConfig;
pub use risk::{
    expected_loss, lgd_arrears, lgd_liquidation, lgd_single, pd_liquidation, risk_curve, risk_row,
    LoanContext, RiskCurve, RiskRow,
};
pub use simulation::{simulate, SimulationResult, SimulationSpec};
