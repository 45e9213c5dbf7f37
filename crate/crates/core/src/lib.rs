//! Risk distributions implied by familial relative risks (FRRs).
//!
//! * [`dichotomous`]: two-group model, forward FRR maps and their inversion
//!   for the individual relative risk (IRR) and high-risk fraction q.
//! * [`beta_model`]: beta-distributed family risk fitted from lifetime risk
//!   and FRR, with Lorenz curve, Gini index and burden shares.
//! * [`simulation`]: Monte Carlo family registry used as an oracle.
//! * [`dataset`] and [`report`]: bundled disease estimates, analyses and
//!   rendered tables, delimited data, JSON and SVG figures.

pub mod beta_model;
pub mod dataset;
pub mod dichotomous;
pub mod error;
pub mod quadrature;
pub mod report;
pub mod simulation;
pub mod special;

pub use beta_model::{fit_from_risk_and_frr, BetaRiskModel, LorenzCurve};
pub use dichotomous::{
    frr_curve, irr_given_frr, peak_q, solve_risk_structure, Affected, DichotomousRiskModel,
    RiskStructureSolution, Sweep,
};
pub use error::{Error, Result};
pub use special::BetaParams;
