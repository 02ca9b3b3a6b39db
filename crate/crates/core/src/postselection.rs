//! Alice's Gaussian post-selection filter `F(x, p) = exp(-g²(x² + p²))`.
//!
//! The filter acts on Alice's stored modulation record after Bob's rescaling
//! and parameter estimation. For Gaussian-distributed symbols it is
//! equivalent to having prepared the smaller variance
//! `Ṽ_mod = V_mod / (2g²V_mod + 1)`, paid for by the acceptance probability.

use crate::error::{domain, Result};
use crate::gaussian::TwoModeCm;
use crate::sqcc::{build_data_cm, build_eve_cm, ProtocolParams, SqccDerived};

/// Acceptance probability `P_A = 1 / (2g²V_mod + 1)`.
pub fn acceptance_probability(g: f64, v_mod: f64) -> Result<f64> {
    check(g, v_mod)?;
    Ok(1.0 / (2.0 * g * g * v_mod + 1.0))
}

/// Post-selected modulation variance `Ṽ_mod = V_mod·P_A`.
pub fn effective_modulation_variance(g: f64, v_mod: f64) -> Result<f64> {
    check(g, v_mod)?;
    Ok(v_mod / (2.0 * g * g * v_mod + 1.0))
}

/// Gain that maps `v_mod` onto the target variance `v_target ∈ (0, v_mod]`.
pub fn gain_for_target_variance(v_mod: f64, v_target: f64) -> Result<f64> {
    if !(v_target > 0.0 && v_target <= v_mod) {
        return Err(domain(format!(
            "target variance {v_target} outside (0, {v_mod}]"
        )));
    }
    Ok(((v_mod - v_target) / (2.0 * v_mod * v_target)).sqrt())
}

fn check(g: f64, v_mod: f64) -> Result<()> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(domain(format!("filter gain {g} must be finite and >= 0")));
    }
    if !(v_mod > 0.0) {
        return Err(domain(format!("modulation variance {v_mod} must be > 0")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostSelected {
    pub data_cm: TwoModeCm,
    pub eve_cm: TwoModeCm,
    pub p_accept: f64,
    /// Pre-filter SQCC quantities of the data view.
    pub derived: SqccDerived,
}

/// Full post-selected pipeline: rescaling (at the prepared variance), then
/// filtering. Both matrices use `Ṽ = Ṽ_mod + 1` on Alice's side, while `N_d`
/// and `δ` stay at their pre-filter values.
pub fn post_selected_pipeline(p: &ProtocolParams, g: f64) -> Result<PostSelected> {
    let derived = SqccDerived::compute(p)?;
    let p_accept = acceptance_probability(g, p.v_mod)?;
    let v_tilde = effective_modulation_variance(g, p.v_mod)? + 1.0;
    let data_cm = build_data_cm(p, &derived, v_tilde)?;
    let eve_cm = build_eve_cm(p, v_tilde)?;
    Ok(PostSelected {
        data_cm,
        eve_cm,
        p_accept,
        derived,
    })
}

/// Recovers `(T, W)` from a data-view matrix given the receiver and the
/// classical-error corrections that were applied.
pub fn infer_channel(
    cm: &TwoModeCm,
    eta: f64,
    v_el: f64,
    n_d: f64,
    delta: f64,
) -> Result<(f64, f64)> {
    let corr = cm.c / (n_d * (1.0 - delta));
    let t = corr * corr / (eta * (cm.a * cm.a - 1.0));
    if !(t > 0.0 && t <= 1.0 + 1e-12) {
        return Err(domain(format!("inferred transmittance {t} outside (0, 1]")));
    }
    if t >= 1.0 {
        return Ok((1.0, 1.0));
    }
    let w = ((cm.b - (1.0 - eta) - 2.0 * v_el) / eta - t * cm.a) / (1.0 - t);
    Ok((t, w))
}
