//! Mutual information, Holevo bound, and the (post-selected) key rate under
//! trusted- or untrusted-receiver assumptions, plus the filter-gain and
//! modulation-variance optimizers.

use crate::error::{domain, Result};
use crate::finite_size::{finite_size_key_rate, FiniteSizeParams};
use crate::gaussian::{bosonic_entropy, conditional_after_heterodyne, entropy_of_cm, TwoModeCm};
use crate::optimize::maximize;
use crate::postselection::post_selected_pipeline;
use crate::sqcc::ProtocolParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SecurityModel {
    /// Detector loss and electronic noise are local to Bob; Eve is bounded on
    /// the ideal-receiver matrix.
    #[default]
    TrustedReceiver,
    /// All receiver imperfections are conceded to Eve.
    UntrustedReceiver,
}

impl SecurityModel {
    pub fn name(&self) -> &'static str {
        match self {
            SecurityModel::TrustedReceiver => "trusted",
            SecurityModel::UntrustedReceiver => "untrusted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateReport {
    /// Secret key rate in bits per channel use; negative when insecure.
    pub key_rate: f64,
    pub i_ab: f64,
    pub i_e: f64,
    pub p_accept: f64,
    /// Filter gain at which the rate was evaluated.
    pub g_opt: f64,
    /// Modulation variance at which the rate was evaluated.
    pub v_mod: f64,
    pub mode: SecurityModel,
}

impl KeyRateReport {
    /// Key rate with insecure (negative) values mapped to zero.
    pub fn clamped_key_rate(&self) -> f64 {
        self.key_rate.max(0.0)
    }
}

/// Search settings for [`optimize_gain`] and [`optimize_modulation_variance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub g_max: f64,
    pub v_mod_max: f64,
    pub grid_points: usize,
    pub tolerance: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            g_max: 3.0,
            v_mod_max: 50.0,
            grid_points: 64,
            tolerance: 1e-4,
        }
    }
}

/// Heterodyne mutual information `log₂(V_A / V_{A|B})`.
pub fn mutual_information(cm: &TwoModeCm) -> Result<f64> {
    let va = 0.5 * (cm.a + 1.0);
    let vb = 0.5 * (cm.b + 1.0);
    let phi = 0.5 * cm.c;
    let ratio = phi * phi / (va * vb);
    if !(ratio < 1.0) || va <= 0.0 || vb <= 0.0 {
        return Err(domain(format!(
            "conditional variance V_A|B non-positive for {cm:?}"
        )));
    }
    // log₂(V_A / (V_A - φ²/V_B)) = -log₂(1 - φ²/(V_A V_B))
    Ok(-(-ratio).ln_1p() / std::f64::consts::LN_2)
}

/// Holevo bound `S(σ_AB) - S(σ_A|b)` with heterodyne conditioning on Bob.
pub fn holevo_bound(cm: &TwoModeCm) -> Result<f64> {
    let joint = entropy_of_cm(cm)?;
    let cond = bosonic_entropy(conditional_after_heterodyne(cm)?)?;
    Ok(joint - cond)
}

/// Asymptotic rate `P_A(β I_AB - I_E)` at filter gain `g`.
pub fn asymptotic_key_rate(p: &ProtocolParams, g: f64, mode: SecurityModel) -> Result<KeyRateReport> {
    let ps = post_selected_pipeline(p, g)?;
    let i_ab = mutual_information(&ps.data_cm)?;
    let i_e = match mode {
        SecurityModel::TrustedReceiver => holevo_bound(&ps.eve_cm)?,
        SecurityModel::UntrustedReceiver => holevo_bound(&ps.data_cm)?,
    };
    Ok(KeyRateReport {
        key_rate: ps.p_accept * (p.beta * i_ab - i_e),
        i_ab,
        i_e,
        p_accept: ps.p_accept,
        g_opt: g,
        v_mod: p.v_mod,
        mode,
    })
}

fn rate_at(
    p: &ProtocolParams,
    g: f64,
    mode: SecurityModel,
    fs: Option<&FiniteSizeParams>,
) -> Result<KeyRateReport> {
    match fs {
        None => asymptotic_key_rate(p, g, mode),
        Some(fs) => finite_size_key_rate(p, g, fs, mode),
    }
}

/// Maximizes the key rate over the filter gain `g ∈ [0, g_max]`.
///
/// `g = 0` is always a candidate, so the result never falls below the
/// unfiltered rate. With `fs` the finite-size rate is the objective.
pub fn optimize_gain(
    p: &ProtocolParams,
    mode: SecurityModel,
    fs: Option<&FiniteSizeParams>,
    settings: &OptimizerSettings,
) -> Result<KeyRateReport> {
    let base = rate_at(p, 0.0, mode, fs);
    let objective = |g: f64| {
        rate_at(p, g, mode, fs)
            .map(|r| r.key_rate)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (g, k) = maximize(objective, 0.0, settings.g_max, settings.grid_points, settings.tolerance);
    match base {
        Ok(b) if b.key_rate >= k || !k.is_finite() => Ok(b),
        Ok(_) => rate_at(p, g, mode, fs),
        Err(e) if !k.is_finite() => Err(e),
        Err(_) => rate_at(p, g, mode, fs),
    }
}

/// Maximizes the unfiltered key rate over `V_mod ∈ (0, v_mod_max]`: the
/// benchmark protocol with a channel-optimized modulation variance.
pub fn optimize_modulation_variance(
    p: &ProtocolParams,
    mode: SecurityModel,
    fs: Option<&FiniteSizeParams>,
    settings: &OptimizerSettings,
) -> Result<KeyRateReport> {
    let lo = 1e-3_f64.min(settings.v_mod_max);
    let objective = |v: f64| {
        rate_at(&p.with_v_mod(v), 0.0, mode, fs)
            .map(|r| r.key_rate)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (v, k) = maximize(objective, lo, settings.v_mod_max, settings.grid_points, settings.tolerance);
    if !k.is_finite() {
        return rate_at(p, 0.0, mode, fs);
    }
    rate_at(&p.with_v_mod(v), 0.0, mode, fs)
}
