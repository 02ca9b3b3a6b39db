//! SQCC-specific quantities: classical bit-error rate, correlation decay from
//! re-displacement mistakes, Bob's rescaling gain, and the pre-filter
//! covariance matrices for the data view and the eavesdropper view.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::gaussian::TwoModeCm;
use crate::special::{erfc, erfc_inv};

/// How thermal channel noise is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelNoise {
    /// Excess noise ξ referred to the channel input; `W = ξT/(1-T) + 1`.
    Excess(f64),
    /// Thermal variance `W` given directly.
    Thermal(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Alice's Gaussian modulation variance V_mod (SNU).
    pub v_mod: f64,
    /// Classical displacement magnitude d (√SNU).
    pub displacement: f64,
    /// Channel transmittance T ∈ (0, 1].
    pub transmittance: f64,
    pub noise: ChannelNoise,
    /// Detection efficiency η ∈ (0, 1].
    pub eta: f64,
    /// Electronic noise v_el (SNU).
    pub v_el: f64,
    /// Reconciliation efficiency β ∈ [0, 1).
    pub beta: f64,
}

fn bad(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("v_mod", self.v_mod),
            ("displacement", self.displacement),
            ("transmittance", self.transmittance),
            ("eta", self.eta),
            ("v_el", self.v_el),
            ("beta", self.beta),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput(name));
            }
        }
        if self.v_mod <= 0.0 {
            return Err(bad("v_mod", self.v_mod, "must be > 0"));
        }
        if self.displacement < 0.0 {
            return Err(bad("displacement", self.displacement, "must be >= 0"));
        }
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(bad("transmittance", self.transmittance, "must lie in (0, 1]"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(bad("eta", self.eta, "must lie in (0, 1]"));
        }
        if self.v_el < 0.0 {
            return Err(bad("v_el", self.v_el, "must be >= 0"));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(bad("beta", self.beta, "must lie in [0, 1)"));
        }
        self.channel_noise().map(|_| ())
    }

    /// Alice's EB-mode variance `V = V_mod + 1`.
    pub fn v(&self) -> f64 {
        self.v_mod + 1.0
    }

    /// Thermal channel variance `W`.
    pub fn thermal_noise(&self) -> Result<f64> {
        let t = self.transmittance;
        match self.noise {
            ChannelNoise::Excess(xi) => {
                if !xi.is_finite() {
                    return Err(Error::NonFiniteInput("excess noise"));
                }
                if xi < 0.0 {
                    return Err(bad("xi", xi, "must be >= 0"));
                }
                if t < 1.0 {
                    Ok(xi * t / (1.0 - t) + 1.0)
                } else if xi == 0.0 {
                    Ok(1.0)
                } else {
                    Err(bad(
                        "xi",
                        xi,
                        "W diverges at T = 1 with excess noise; use channel_noise",
                    ))
                }
            }
            ChannelNoise::Thermal(w) => {
                if !w.is_finite() {
                    return Err(Error::NonFiniteInput("thermal noise"));
                }
                if w < 1.0 {
                    return Err(bad("W", w, "must be >= 1"));
                }
                Ok(w)
            }
        }
    }

    /// Noise the channel injects into Bob's mode, `(1-T)·W`. With excess
    /// noise this is `ξT + 1 - T`, finite even at `T = 1` where `W` is not.
    pub fn channel_noise(&self) -> Result<f64> {
        let t = self.transmittance;
        match self.noise {
            ChannelNoise::Excess(xi) => {
                if !xi.is_finite() {
                    return Err(Error::NonFiniteInput("excess noise"));
                }
                if xi < 0.0 {
                    return Err(bad("xi", xi, "must be >= 0"));
                }
                Ok(xi * t + (1.0 - t))
            }
            ChannelNoise::Thermal(_) => Ok((1.0 - t) * self.thermal_noise()?),
        }
    }

    /// Excess noise ξ corresponding to the configured channel (0 at T = 1, W = 1).
    pub fn excess_noise(&self) -> Result<f64> {
        match self.noise {
            ChannelNoise::Excess(xi) => Ok(xi),
            ChannelNoise::Thermal(w) => {
                let t = self.transmittance;
                if t < 1.0 {
                    Ok((w - 1.0) * (1.0 - t) / t)
                } else {
                    Ok(0.0)
                }
            }
        }
    }

    /// Same parameters with an ideal receiver (η = 1, v_el = 0).
    pub fn with_ideal_detector(&self) -> Self {
        Self {
            eta: 1.0,
            v_el: 0.0,
            ..*self
        }
    }

    pub fn with_transmittance(&self, transmittance: f64) -> Self {
        Self {
            transmittance,
            ..*self
        }
    }

    pub fn with_v_mod(&self, v_mod: f64) -> Self {
        Self { v_mod, ..*self }
    }

    /// Re-displacement amplitude `α = √(ηT)·d`.
    pub fn alpha(&self) -> f64 {
        (self.eta * self.transmittance).sqrt() * self.displacement
    }
}

/// `V_b = η(T·V + (1-T)W) + (1-η) + 2v_el` at Alice variance `v_eff`.
pub fn bob_variance(p: &ProtocolParams, v_eff: f64) -> Result<f64> {
    if !(v_eff >= 1.0 - 1e-12) {
        return Err(domain(format!("effective variance {v_eff} below vacuum")));
    }
    let t = p.transmittance;
    Ok(p.eta * (t * v_eff + p.channel_noise()?) + (1.0 - p.eta) + 2.0 * p.v_el)
}

/// `SNR = α² / (V_b + 1)` with `V_b` at the prepared variance.
pub fn signal_to_noise(p: &ProtocolParams) -> Result<f64> {
    p.validate()?;
    let vb = bob_variance(p, p.v())?;
    let alpha = p.alpha();
    Ok(alpha * alpha / (vb + 1.0))
}

/// Per-quadrature classical bit-error rate `½ erfc(√SNR / 2)`.
pub fn classical_bit_error_rate(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(domain(format!("SNR {snr} must be >= 0")));
    }
    Ok(0.5 * erfc(0.5 * snr.sqrt()))
}

/// Correlation decay `δ = √(SNR/π)·exp(-SNR/4)`; maximal at SNR = 2.
pub fn correlation_decay(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(domain(format!("SNR {snr} must be >= 0")));
    }
    Ok((snr / PI).sqrt() * (-snr / 4.0).exp())
}

/// Derived SQCC quantities, all evaluated at the prepared (pre-filter) variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqccDerived {
    pub alpha: f64,
    pub snr: f64,
    pub e_c: f64,
    pub delta: f64,
    pub n_d: f64,
    pub v_b: f64,
    pub v_bd: f64,
}

impl SqccDerived {
    pub fn compute(p: &ProtocolParams) -> Result<Self> {
        p.validate()?;
        let alpha = p.alpha();
        let v_b = bob_variance(p, p.v())?;
        let snr = alpha * alpha / (v_b + 1.0);
        let e_c = classical_bit_error_rate(snr)?;
        let delta = correlation_decay(snr)?;
        let v_bd = redisplaced_variance(alpha, v_b, e_c, delta);
        let n_d = gain_from_variances(v_b, v_bd)?;
        Ok(Self {
            alpha,
            snr,
            e_c,
            delta,
            n_d,
            v_b,
            v_bd,
        })
    }
}

/// `V_bd = V_b + 2α²e_C - 2(V_b+1)δ - 2α²e_C²`.
pub fn redisplaced_variance(alpha: f64, v_b: f64, e_c: f64, delta: f64) -> f64 {
    let a2 = alpha * alpha;
    v_b + 2.0 * a2 * e_c - 2.0 * (v_b + 1.0) * delta - 2.0 * a2 * e_c * e_c
}

fn gain_from_variances(v_b: f64, v_bd: f64) -> Result<f64> {
    if v_bd <= -1.0 {
        return Err(Error::NonPhysicalRescale(v_bd));
    }
    Ok(((v_b + 1.0) / (v_bd + 1.0)).sqrt())
}

/// Bob's electronic rescaling gain `N_d = √((V_b+1)/(V_bd+1))`.
pub fn rescaling_gain(sd: &SqccDerived) -> Result<f64> {
    let v_bd = redisplaced_variance(sd.alpha, sd.v_b, sd.e_c, sd.delta);
    gain_from_variances(sd.v_b, v_bd)
}

/// Alice–Bob matrix at Alice variance `v_eff`, with `N_d` and `δ` taken from
/// `sd` (the pre-filter values).
pub fn build_data_cm(p: &ProtocolParams, sd: &SqccDerived, v_eff: f64) -> Result<TwoModeCm> {
    let b = bob_variance(p, v_eff)?;
    let c = sd.n_d * (p.eta * p.transmittance * (v_eff * v_eff - 1.0).max(0.0)).sqrt()
        * (1.0 - sd.delta);
    Ok(TwoModeCm::new(v_eff, b, c))
}

/// Matrix seen by the eavesdropper: every Bob-side quantity recomputed with an
/// ideal receiver, Alice's diagonal shared with the data view.
pub fn build_eve_cm(p: &ProtocolParams, v_eff: f64) -> Result<TwoModeCm> {
    let ideal = p.with_ideal_detector();
    let sd = SqccDerived::compute(&ideal)?;
    build_data_cm(&ideal, &sd, v_eff)
}

/// Smallest displacement meeting a target classical bit-error rate:
/// `d = 2 erfc⁻¹(2W) √((V_b+1)/T)`.
pub fn min_displacement(p: &ProtocolParams, target_ber: f64) -> Result<f64> {
    if !(target_ber > 0.0 && target_ber < 0.5) {
        return Err(domain(format!("target bit-error rate {target_ber} outside (0, 1/2)")));
    }
    p.validate()?;
    let vb = bob_variance(p, p.v())?;
    Ok(2.0 * erfc_inv(2.0 * target_ber)? * ((vb + 1.0) / p.transmittance).sqrt())
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen reference values, as printed
mod tests {
    use super::*;

    fn table1(t: f64) -> ProtocolParams {
        ProtocolParams {
            v_mod: 7.0,
            displacement: 60.0,
            transmittance: t,
            noise: ChannelNoise::Excess(0.05),
            eta: 0.95,
            v_el: 0.01,
            beta: 0.95,
        }
    }

    fn ideal() -> ProtocolParams {
        ProtocolParams {
            v_mod: 7.0,
            displacement: 0.0,
            transmittance: 1.0,
            noise: ChannelNoise::Excess(0.0),
            eta: 1.0,
            v_el: 0.0,
            beta: 0.95,
        }
    }

    fn with_d(p: ProtocolParams, d: f64) -> ProtocolParams {
        ProtocolParams {
            displacement: d,
            ..p
        }
    }

    #[test]
    fn snr_zero_without_displacement() {
        assert_eq!(signal_to_noise(&with_d(table1(0.5), 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn vacuum_limited_snr() {
        let p = ProtocolParams {
            v_mod: 1e-300,
            displacement: 3.0,
            ..ideal()
        };
        let vb = bob_variance(&p, 1.0).unwrap();
        assert_eq!(vb, 1.0);
        assert!((signal_to_noise(&p).unwrap() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn bit_error_rate_values() {
        assert_eq!(classical_bit_error_rate(0.0).unwrap(), 0.5);
        let e = classical_bit_error_rate(4.0).unwrap();
        assert!((e - 0.078_649_603_525_142_57).abs() < 1e-15);
        assert!(classical_bit_error_rate(-1.0).is_err());
    }

    #[test]
    fn correlation_decay_values() {
        assert_eq!(correlation_decay(0.0).unwrap(), 0.0);
        assert!((correlation_decay(4.0).unwrap() - 0.415_107_497_420_594_7).abs() < 1e-15);
        assert!((correlation_decay(2.0).unwrap() - 0.483_941_449_038_286_7).abs() < 1e-15);
        // 1-D scan: SNR = 2 is the global maximum.
        let peak = correlation_decay(2.0).unwrap();
        for i in 0..20_000 {
            let s = i as f64 * 1e-3;
            assert!(correlation_decay(s).unwrap() <= peak + 1e-15);
        }
    }

    #[test]
    fn identity_channel_bob_variance() {
        let p = ideal();
        assert_eq!(bob_variance(&p, 8.0).unwrap(), 8.0);
    }

    #[test]
    fn bob_variance_has_loss_floor() {
        for t in [1e-9, 1e-3, 0.2, 0.7] {
            let vb = bob_variance(&table1(t), 8.0).unwrap();
            assert!(vb >= 1.0);
        }
    }

    #[test]
    fn rescaling_gain_is_unity_without_errors() {
        let sd = SqccDerived::compute(&table1(0.151_356_124_843_620_8)).unwrap();
        assert!(sd.e_c < 1e-15 && sd.delta < 1e-15);
        assert!((sd.n_d - 1.0).abs() < 1e-14);
        let sd0 = SqccDerived::compute(&with_d(table1(0.3), 0.0)).unwrap();
        assert_eq!(sd0.e_c, 0.5);
        assert_eq!(sd0.delta, 0.0);
        assert_eq!(sd0.v_bd, sd0.v_b);
        assert_eq!(sd0.n_d, 1.0);
        assert_eq!(rescaling_gain(&sd0).unwrap(), 1.0);
    }

    #[test]
    fn rescaling_gain_compensates_correlation_loss() {
        for d in [4.0, 6.0, 8.0, 10.0] {
            let sd = SqccDerived::compute(&with_d(table1(0.3), d)).unwrap();
            if sd.delta > 0.0 && sd.e_c < 0.1 {
                assert!(sd.n_d >= 1.0, "d={d}: N_d={}", sd.n_d);
            }
        }
    }

    #[test]
    fn non_physical_rescale_reported() {
        let sd = SqccDerived {
            alpha: 0.0,
            snr: 0.0,
            e_c: 0.0,
            delta: 10.0,
            n_d: 1.0,
            v_b: 1.0,
            v_bd: 0.0,
        };
        assert!(matches!(rescaling_gain(&sd), Err(Error::NonPhysicalRescale(_))));
    }

    #[test]
    fn textbook_thermal_loss_matrix_without_errors() {
        let p = with_d(table1(0.4), 0.0);
        let mut sd = SqccDerived::compute(&p).unwrap();
        sd.delta = 0.0;
        sd.n_d = 1.0;
        let cm = build_data_cm(&p, &sd, 8.0).unwrap();
        assert_eq!(cm.a, 8.0);
        assert!((cm.c - (0.95f64 * 0.4 * 63.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn eve_view_coincides_with_ideal_detector() {
        let p = ProtocolParams {
            eta: 1.0,
            v_el: 0.0,
            ..table1(0.3)
        };
        let sd = SqccDerived::compute(&p).unwrap();
        assert_eq!(build_eve_cm(&p, 8.0).unwrap(), build_data_cm(&p, &sd, 8.0).unwrap());
    }

    #[test]
    fn eve_correlation_dominates_data_correlation() {
        for i in 1..=20 {
            let t = i as f64 / 20.0;
            let p = table1(t.min(0.999));
            let sd = SqccDerived::compute(&p).unwrap();
            let data = build_data_cm(&p, &sd, p.v()).unwrap();
            let eve = build_eve_cm(&p, p.v()).unwrap();
            assert!(eve.c >= data.c);
        }
    }

    #[test]
    fn unit_transmittance_with_excess_noise() {
        let mut p = table1(1.0);
        assert!(p.validate().is_ok());
        assert!(p.thermal_noise().is_err());
        assert!((p.channel_noise().unwrap() - 0.05).abs() < 1e-15);
        // Continuous in T through the singular W.
        let near = bob_variance(&table1(1.0 - 1e-9), 8.0).unwrap();
        assert!((bob_variance(&p, 8.0).unwrap() - near).abs() < 1e-7);
        p.noise = ChannelNoise::Thermal(1.05);
        assert!(p.validate().is_ok());
        assert_eq!(p.channel_noise().unwrap(), 0.0);
        p.noise = ChannelNoise::Excess(0.0);
        assert_eq!(p.thermal_noise().unwrap(), 1.0);
    }

    #[test]
    fn min_displacement_values() {
        let p = table1(0.2);
        let vb = bob_variance(&p, 8.0).unwrap();
        let d = min_displacement(&p, 0.25).unwrap();
        let want = 2.0 * 0.476_936_276_204_469_87 * ((vb + 1.0) / 0.2).sqrt();
        assert!((d - want).abs() < 1e-10 * want);
        assert!(min_displacement(&p, 0.5 - 1e-12).unwrap() < 1e-9);
        assert!(min_displacement(&p, 0.5).is_err());
        assert!(min_displacement(&p, 0.0).is_err());
    }

    #[test]
    fn min_displacement_round_trip_with_ideal_detector() {
        let base = ProtocolParams {
            eta: 1.0,
            ..table1(0.3)
        };
        for target in [1e-6, 1e-3, 0.01, 0.1, 0.3] {
            let d = min_displacement(&base, target).unwrap();
            let snr = signal_to_noise(&with_d(base, d)).unwrap();
            let e = classical_bit_error_rate(snr).unwrap();
            assert!(e <= target * (1.0 + 1e-9), "target {target}: got {e}");
        }
    }
}
