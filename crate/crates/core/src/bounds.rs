//! Closed-form VC-dimension and sample-complexity calculators.
//!
//! The source bounds write bare `log`; here the VC combination bounds use
//! base 2 and the generalization bound uses the natural log (it already
//! contains `e`). Both choices, and the O(1) constants set to 1, are
//! surfaced as metadata so downstream comparisons stay honest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Log base used inside the VC combination bounds.
pub const VC_LOG_BASE: f64 = 2.0;
/// The generalization bound uses natural logarithms.
pub const GEN_ERR_LOG: &str = "natural";
/// Every O(1) constant is pinned to 1.
pub const O_CONSTANT: f64 = 1.0;

/// Inputs shared by the calculators; mainly a CLI/reporting convenience.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundInputs {
    pub gamma: Option<f64>,
    pub t: Option<usize>,
    pub d: Option<usize>,
    pub m: Option<usize>,
    pub eps: Option<f64>,
    pub delta_conf: Option<f64>,
}

/// VC-dimension bound for gamma-fat hyperplanes: `(2/gamma + 1)^2`.
pub fn vc_fat_hyperplane(gamma: f64) -> Result<f64> {
    if gamma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let v = 2.0 / gamma + 1.0;
    Ok(v * v)
}

/// VC-dimension bound for gamma-fat t-polytopes:
/// `min(2(d+1) t log2(3t), 2 v t log2(3t))` with `v = (2/gamma + 1)^2`.
pub fn vc_fat_polytope(d: usize, t: usize, gamma: f64) -> Result<f64> {
    if t < 1 || d < 1 {
        return Err(Error::InvalidParameter(
            "d and t must be >= 1".into(),
        ));
    }
    let v = vc_fat_hyperplane(gamma)?;
    let log_term = (3.0 * t as f64).log2();
    let by_dim = 2.0 * (d as f64 + 1.0) * t as f64 * log_term;
    let by_margin = 2.0 * v * t as f64 * log_term;
    Ok(by_dim.min(by_margin))
}

/// VC-dimension bound for t-polytopes with envelope gamma; equals the fat
/// bound at margin `gamma^2 / 2`.
pub fn vc_envelope_polytope(d: usize, t: usize, gamma: f64) -> Result<f64> {
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "envelope gamma must be in (0,1), got {gamma}"
        )));
    }
    vc_fat_polytope(d, t, gamma * gamma / 2.0)
}

/// Consistent-learner generalization bound:
/// `(2/m)(d_vc ln(2em/d_vc) + ln(2/delta))`.
pub fn generalization_error(m: usize, d_vc: f64, delta: f64) -> Result<f64> {
    if d_vc < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "d_vc must be >= 1, got {d_vc}"
        )));
    }
    if (m as f64) <= d_vc {
        return Err(Error::InvalidParameter(format!(
            "bound vacuous: m = {m} must exceed d_vc = {d_vc}"
        )));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    let m = m as f64;
    Ok((2.0 / m)
        * (d_vc * (2.0 * std::f64::consts::E * m / d_vc).ln() + (2.0 / delta).ln()))
}

/// PAC sample size for learning gamma-fat t-polytopes:
/// `ceil((t/(eps gamma^2)) ln^2(max(t/(eps gamma), e)) + ln(1/delta))`.
pub fn pac_sample_size(t: usize, gamma: f64, eps: f64, delta: f64) -> Result<usize> {
    if t < 1 {
        return Err(Error::InvalidParameter("t must be >= 1".into()));
    }
    if !(0.0 < gamma && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be in (0,1], got {gamma}"
        )));
    }
    if !(0.0 < eps && eps < 1.0) || !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter(
            "eps and delta must be in (0,1)".into(),
        ));
    }
    let t = t as f64;
    let log_arg = (t / (eps * gamma)).max(std::f64::consts::E);
    let ln = log_arg.ln();
    let m = (t / (eps * gamma * gamma)) * ln * ln + (1.0 / delta).ln();
    Ok(m.ceil() as usize)
}
