//! Composable finite-size key rate with worst-case covariance estimation.
//!
//! Parameter estimation on `N` symbols inflates the diagonal variances by
//! `1 + δ_Var` and shrinks the correlation by `1 - 2√(ab/c²)·δ_Cov`, where the
//! confidence widths come from quantiles of `Beta(N/2, N/2)`.

use crate::error::{domain, Error, Result};
use crate::gaussian::TwoModeCm;
use crate::keyrate::{holevo_bound, mutual_information, KeyRateReport, SecurityModel};
use crate::postselection::post_selected_pipeline;
use crate::special::{beta_reg_inv, normal_quantile};
use crate::sqcc::ProtocolParams;

/// Above this block size `A(z)` uses the normal limit of `Beta(N/2, N/2)`.
pub const EXACT_BETA_MAX_N: f64 = 1e6;

/// Penalty terms of the composable rate, each a function of the block
/// parameters. Swap any of them to change the proof toolbox without touching
/// callers.
#[derive(Debug, Clone, Copy)]
pub struct Corrections {
    pub aep: fn(&FiniteSizeParams) -> f64,
    pub entropy: fn(&FiniteSizeParams) -> f64,
    pub smoothing: fn(&FiniteSizeParams) -> f64,
    pub hashing: fn(&FiniteSizeParams) -> f64,
}

impl Default for Corrections {
    fn default() -> Self {
        Self {
            aep: delta_aep,
            entropy: delta_ent,
            smoothing: delta_smoothing,
            hashing: delta_hashing,
        }
    }
}

/// `Δ_AEP = 4 log₂(2^d + 2) √(log₂(18 / (p_f² ε_s⁴)))`.
pub fn delta_aep(fs: &FiniteSizeParams) -> f64 {
    let d = fs.d_rx as f64;
    4.0 * (d.exp2() + 2.0).log2()
        * (18.0 / (fs.p_f * fs.p_f * fs.eps_s.powi(4))).log2().sqrt()
}

/// `Δ_ent = √(log₂(2/ε_ent))`: confidence width of the entropy estimate.
pub fn delta_ent(fs: &FiniteSizeParams) -> f64 {
    (2.0 / fs.eps_ent).log2().sqrt()
}

/// Alternative entropy penalty `log₂(8/ε_s²)`; far more conservative than
/// [`delta_ent`] (it costs ~5 km of post-selected range at N = 1e10).
pub fn delta_ent_log_inverse_square(fs: &FiniteSizeParams) -> f64 {
    (8.0 / (fs.eps_s * fs.eps_s)).log2()
}

/// `Δ_S = log₂(p_f (1 - ε_s²/3))`.
pub fn delta_smoothing(fs: &FiniteSizeParams) -> f64 {
    (fs.p_f * (1.0 - fs.eps_s * fs.eps_s / 3.0)).log2()
}

/// `Δ_H = 2 log₂(2 ε_h)`.
pub fn delta_hashing(fs: &FiniteSizeParams) -> f64 {
    2.0 * (2.0 * fs.eps_h).log2()
}

#[derive(Debug, Clone, Copy)]
pub struct FiniteSizeParams {
    /// Block size (symbols used for parameter estimation).
    pub n: f64,
    pub eps_pe: f64,
    pub eps_s: f64,
    pub eps_h: f64,
    pub eps_ent: f64,
    /// Frame error-correction success probability.
    pub p_f: f64,
    /// ADC discretization bits per quadrature.
    pub d_rx: u32,
    pub corrections: Corrections,
}

impl FiniteSizeParams {
    /// Block of `n` symbols with the default security parameters
    /// (ε = 1e-10, p_f = 0.9964, d_rx = 6).
    pub fn with_block_size(n: f64) -> Self {
        Self {
            n,
            eps_pe: 1e-10,
            eps_s: 1e-10,
            eps_h: 1e-10,
            eps_ent: 1e-10,
            p_f: 0.9964,
            d_rx: 6,
            corrections: Corrections::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 2.0 && self.n.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "n",
                value: self.n,
                reason: "block size must be finite and >= 2",
            });
        }
        for (name, eps) in [
            ("eps_pe", self.eps_pe),
            ("eps_s", self.eps_s),
            ("eps_h", self.eps_h),
            ("eps_ent", self.eps_ent),
        ] {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: eps,
                    reason: "must lie in (0, 1)",
                });
            }
        }
        if !(self.p_f > 0.0 && self.p_f <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "p_f",
                value: self.p_f,
                reason: "must lie in (0, 1]",
            });
        }
        if self.d_rx < 1 {
            return Err(Error::InvalidParameter {
                name: "d_rx",
                value: self.d_rx as f64,
                reason: "must be >= 1",
            });
        }
        Ok(())
    }
}

/// `A(z) = 2·invcdf_{Beta(N/2, N/2)}(z)`.
///
/// Exact bisection on the regularized incomplete beta for `N ≤ 1e6`; above
/// that the normal limit `1 + Φ⁻¹(z)/√(N+1)`.
pub fn beta_confidence(z: f64, n: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(domain(format!("confidence level {z} outside (0, 1)")));
    }
    if !(n >= 2.0) {
        return Err(domain(format!("block size {n} below 2")));
    }
    if n <= EXACT_BETA_MAX_N {
        Ok(2.0 * beta_reg_inv(0.5 * n, 0.5 * n, z)?)
    } else {
        Ok(beta_confidence_normal(z, n)?)
    }
}

/// Normal approximation branch of [`beta_confidence`], exposed for checks.
pub fn beta_confidence_normal(z: f64, n: f64) -> Result<f64> {
    Ok(1.0 + normal_quantile(z)? / (n + 1.0).sqrt())
}

/// Relative estimation widths `(δ_Var, δ_Cov)`.
pub fn estimation_widths(fs: &FiniteSizeParams) -> Result<(f64, f64)> {
    fs.validate()?;
    let a1 = beta_confidence(fs.eps_pe / 12.0, fs.n)?;
    let a2 = beta_confidence(fs.eps_pe * fs.eps_pe / 1296.0, fs.n)?;
    // (240/ε)·e^(-N/32) in log space; underflows to 0 cleanly for large N.
    let tail = (240f64.ln() - fs.eps_pe.ln() - fs.n / 32.0).exp();
    let delta_var = (2.0 - a1) * (1.0 + tail) - 1.0;
    let delta_cov = 0.5 * (1.0 - a1) + (1.0 - a2);
    Ok((delta_var, delta_cov))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCaseCm {
    pub a_max: f64,
    pub b_max: f64,
    pub c_min: f64,
}

impl WorstCaseCm {
    pub fn cm(&self) -> TwoModeCm {
        TwoModeCm::new(self.a_max, self.b_max, self.c_min)
    }
}

/// Pessimistic covariance matrix consistent with the estimate `cm`.
pub fn worst_case_cm(cm: &TwoModeCm, fs: &FiniteSizeParams) -> Result<WorstCaseCm> {
    let (dv, dc) = estimation_widths(fs)?;
    worst_case_with_widths(cm, dv, dc)
}

fn worst_case_with_widths(cm: &TwoModeCm, dv: f64, dc: f64) -> Result<WorstCaseCm> {
    if !(cm.c > 0.0) {
        return Err(Error::NonPositiveCorrelation(cm.c));
    }
    let c_min = (1.0 - 2.0 * (cm.a * cm.b / (cm.c * cm.c)).sqrt() * dc) * cm.c;
    if c_min <= 0.0 {
        return Err(Error::NonPositiveCorrelation(c_min));
    }
    Ok(WorstCaseCm {
        a_max: (1.0 + dv) * cm.a,
        b_max: (1.0 + dv) * cm.b,
        c_min,
    })
}

/// Composable post-selected key rate
///
/// ```text
/// K = P_A p_f (β I_AB - I_E) - √(p_f P_A / N) Δ_AEP
///     - √(p_f P_A log₂(p_f P_A N) / N) Δ_ent + Δ_S/N + Δ_H/N
/// ```
///
/// with `I_AB` on the worst-case data matrix and `I_E` on the worst-case
/// eavesdropper matrix (ideal receiver when trusted).
pub fn finite_size_key_rate(
    p: &ProtocolParams,
    g: f64,
    fs: &FiniteSizeParams,
    mode: SecurityModel,
) -> Result<KeyRateReport> {
    let (dv, dc) = estimation_widths(fs)?;
    let ps = post_selected_pipeline(p, g)?;
    let data = worst_case_with_widths(&ps.data_cm, dv, dc)?.cm();
    let eve = match mode {
        SecurityModel::TrustedReceiver => worst_case_with_widths(&ps.eve_cm, dv, dc)?.cm(),
        SecurityModel::UntrustedReceiver => data,
    };
    let i_ab = mutual_information(&data)?;
    let i_e = holevo_bound(&eve)?;

    let pa = ps.p_accept;
    let n = fs.n;
    let kept = fs.p_f * pa;
    let c = &fs.corrections;
    let key_rate = kept * (p.beta * i_ab - i_e)
        - (kept / n).sqrt() * (c.aep)(fs)
        - (kept * (kept * n).log2().max(0.0) / n).sqrt() * (c.entropy)(fs)
        + (c.smoothing)(fs) / n
        + (c.hashing)(fs) / n;
    Ok(KeyRateReport {
        key_rate,
        i_ab,
        i_e,
        p_accept: pa,
        g_opt: g,
        v_mod: p.v_mod,
        mode,
    })
}
