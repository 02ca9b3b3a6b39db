//! Run configuration: a TOML document whose keys carry their units.
//!
//! Every field is optional in the file. Protocol defaults depend on the
//! channel: the terrestrial parameter set for fibre, the satellite parameter
//! set for the free-space downlink.

use serde::Deserialize;
use sqcc_core::channels::{AtmosphericPath, SatLink, TimeMap, TurbulenceModel};
use sqcc_core::finite_size::{delta_ent, delta_ent_log_inverse_square, FiniteSizeParams};
use sqcc_core::{ChannelNoise, OptimizerSettings, ProtocolParams, SecurityModel};

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub finite_size: FiniteSizeSection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub duty_cycle: DutyCycleSection,
    #[serde(default)]
    pub mc: McSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub v_mod_snu: Option<f64>,
    /// Alice's total variance `V = V_mod + 1`; alternative to `v_mod_snu`.
    pub v_snu: Option<f64>,
    pub excess_noise_snu: Option<f64>,
    pub detector_efficiency: Option<f64>,
    pub v_el_snu: Option<f64>,
    pub displacement_snu: Option<f64>,
    pub reconciliation_efficiency: Option<f64>,
    pub security_model: Option<SecurityModelName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecurityModelName {
    Trusted,
    Untrusted,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiniteSizeSection {
    /// Block sizes to evaluate in addition to the asymptotic rate.
    pub block_sizes: Vec<f64>,
    pub adc_bits: u32,
    pub frame_success_probability: f64,
    pub eps_ent: f64,
    pub eps_smoothing: f64,
    pub eps_hash: f64,
    pub eps_pe: f64,
    pub entropy_correction: EntropyCorrection,
}

impl Default for FiniteSizeSection {
    fn default() -> Self {
        Self {
            block_sizes: Vec::new(),
            adc_bits: 6,
            frame_success_probability: 0.9964,
            eps_ent: 1e-10,
            eps_smoothing: 1e-10,
            eps_hash: 1e-10,
            eps_pe: 1e-10,
            entropy_correction: EntropyCorrection::SqrtLog,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyCorrection {
    /// `√(log₂(2/ε_ent))`.
    SqrtLog,
    /// `log₂(8/ε_s²)`.
    LogInverseSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    #[default]
    Fiber,
    Satellite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weather {
    #[default]
    Good,
    Bad,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    #[serde(default)]
    pub kind: ChannelKind,
    pub fiber_loss_db_per_km: Option<f64>,
    #[serde(default)]
    pub weather: Weather,
    #[serde(default)]
    pub satellite: SatelliteSection,
}

/// Link-budget overrides; unset keys take the defaults of the chosen weather.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteSection {
    pub earth_radius_km: Option<f64>,
    pub altitude_km: Option<f64>,
    pub ogs_altitude_km: Option<f64>,
    pub tx_aperture_m: Option<f64>,
    pub rx_aperture_m: Option<f64>,
    pub tx_optics_efficiency: Option<f64>,
    pub rx_optics_efficiency: Option<f64>,
    pub pointing_loss: Option<f64>,
    pub atmosphere_thickness_km: Option<f64>,
    pub turbulence_layer_km: Option<f64>,
    pub visibility_km: Option<f64>,
    pub cn2_m_minus_2_3: Option<f64>,
    pub probability_threshold: Option<f64>,
    pub wavelength_nm: Option<f64>,
    pub turbulence_model: Option<TurbulenceName>,
    pub atmospheric_path: Option<PathName>,
    pub transmittance_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TurbulenceName {
    SurfaceLayer,
    FullPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathName {
    Spherical,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    /// Fibre length in km.
    #[default]
    Distance,
    /// Elevation in degrees.
    Elevation,
    /// Filter gain at a fixed operating point.
    Gain,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Operating point of a gain sweep: fibre length (km) ...
    pub distance_km: Option<f64>,
    /// ... or satellite elevation (degrees).
    pub elevation_deg: Option<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            axis: Axis::Distance,
            start: 0.0,
            stop: 80.0,
            step: 0.5,
            distance_km: None,
            elevation_deg: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub g_max: f64,
    pub v_mod_max_snu: f64,
    pub grid_points: usize,
    pub tolerance: f64,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let s = OptimizerSettings::default();
        Self {
            g_max: s.g_max,
            v_mod_max_snu: s.v_mod_max,
            grid_points: s.grid_points,
            tolerance: s.tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeMapName {
    #[default]
    Linear,
    Orbital,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DutyCycleSection {
    pub threshold_bits_per_use: f64,
    pub window_hours: f64,
    pub time_map: TimeMapName,
}

impl Default for DutyCycleSection {
    fn default() -> Self {
        Self {
            threshold_bits_per_use: 1e-4,
            window_hours: 3.0,
            time_map: TimeMapName::Linear,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub pulses: u64,
    pub seed: Option<u64>,
    /// z-score bound for each check.
    pub sigma: f64,
    /// Fault injection: multiplies Bob's rescaling gain in the simulation.
    pub gain_multiplier: f64,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            pulses: 10_000_000,
            seed: None,
            sigma: 3.0,
            gain_multiplier: 1.0,
        }
    }
}

fn cfg_err(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

impl RunConfig {
    /// Parses a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn security_model(&self) -> SecurityModel {
        match self.protocol.security_model {
            Some(SecurityModelName::Untrusted) => SecurityModel::UntrustedReceiver,
            _ => SecurityModel::TrustedReceiver,
        }
    }

    /// Protocol parameters at transmittance 1; callers set `T` per point.
    pub fn protocol(&self) -> Result<ProtocolParams, CliError> {
        let sat = self.channel.kind == ChannelKind::Satellite;
        let pick = |v: Option<f64>, fiber: f64, satellite: f64| v.unwrap_or(if sat { satellite } else { fiber });
        let s = &self.protocol;
        let v_mod = match (s.v_mod_snu, s.v_snu) {
            (Some(_), Some(_)) => {
                return Err(cfg_err("protocol", "set at most one of v_mod_snu and v_snu"))
            }
            (None, Some(v)) => Some(v - 1.0),
            (v, None) => v,
        };
        let p = ProtocolParams {
            v_mod: pick(v_mod, 7.0, 7.0),
            displacement: pick(s.displacement_snu, 60.0, 50.0),
            transmittance: 1.0,
            noise: ChannelNoise::Excess(pick(s.excess_noise_snu, 0.05, 0.02)),
            eta: pick(s.detector_efficiency, 0.95, 0.985),
            v_el: pick(s.v_el_snu, 0.01, 0.01),
            beta: pick(s.reconciliation_efficiency, 0.95, 0.92),
        };
        p.validate().map_err(|e| cfg_err("protocol", e))?;
        Ok(p)
    }

    pub fn finite_size(&self) -> Result<Vec<FiniteSizeParams>, CliError> {
        let f = &self.finite_size;
        f.block_sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let mut fs = FiniteSizeParams::with_block_size(n);
                fs.d_rx = f.adc_bits;
                fs.p_f = f.frame_success_probability;
                fs.eps_ent = f.eps_ent;
                fs.eps_s = f.eps_smoothing;
                fs.eps_h = f.eps_hash;
                fs.eps_pe = f.eps_pe;
                fs.corrections.entropy = match f.entropy_correction {
                    EntropyCorrection::SqrtLog => delta_ent,
                    EntropyCorrection::LogInverseSquare => delta_ent_log_inverse_square,
                };
                fs.validate()
                    .map_err(|e| cfg_err(&format!("finite_size.block_sizes[{i}]"), e))?;
                Ok(fs)
            })
            .collect()
    }

    pub fn fiber_loss(&self) -> Result<f64, CliError> {
        let l = self.channel.fiber_loss_db_per_km.unwrap_or(0.2);
        if !(l >= 0.0 && l.is_finite()) {
            return Err(cfg_err("channel.fiber_loss_db_per_km", "must be finite and >= 0"));
        }
        Ok(l)
    }

    pub fn sat_link(&self) -> Result<SatLink, CliError> {
        let base = match self.channel.weather {
            Weather::Good => SatLink::good_weather(),
            Weather::Bad => SatLink::bad_weather(),
        };
        let s = &self.channel.satellite;
        let link = SatLink {
            earth_radius_km: s.earth_radius_km.unwrap_or(base.earth_radius_km),
            altitude_km: s.altitude_km.unwrap_or(base.altitude_km),
            ogs_altitude_km: s.ogs_altitude_km.unwrap_or(base.ogs_altitude_km),
            d_t_m: s.tx_aperture_m.unwrap_or(base.d_t_m),
            d_r_m: s.rx_aperture_m.unwrap_or(base.d_r_m),
            t_t: s.tx_optics_efficiency.unwrap_or(base.t_t),
            t_r: s.rx_optics_efficiency.unwrap_or(base.t_r),
            pointing_loss: s.pointing_loss.unwrap_or(base.pointing_loss),
            atm_height_km: s.atmosphere_thickness_km.unwrap_or(base.atm_height_km),
            turbulence_layer_km: s.turbulence_layer_km.unwrap_or(base.turbulence_layer_km),
            visibility_km: s.visibility_km.unwrap_or(base.visibility_km),
            cn2: s.cn2_m_minus_2_3.unwrap_or(base.cn2),
            p_th: s.probability_threshold.unwrap_or(base.p_th),
            wavelength_nm: s.wavelength_nm.unwrap_or(base.wavelength_nm),
            excess_noise: match self.protocol()?.noise {
                ChannelNoise::Excess(xi) => xi,
                ChannelNoise::Thermal(_) => base.excess_noise,
            },
            atm_path: match s.atmospheric_path {
                Some(PathName::Flat) => AtmosphericPath::Flat,
                Some(PathName::Spherical) => AtmosphericPath::Spherical,
                None => base.atm_path,
            },
            turbulence: match s.turbulence_model {
                Some(TurbulenceName::FullPath) => TurbulenceModel::FullPath,
                Some(TurbulenceName::SurfaceLayer) => TurbulenceModel::SurfaceLayer,
                None => base.turbulence,
            },
            scale: s.transmittance_scale.unwrap_or(base.scale),
        };
        link.validate().map_err(|e| cfg_err("channel.satellite", e))?;
        Ok(link)
    }

    pub fn optimizer(&self) -> Result<OptimizerSettings, CliError> {
        let o = &self.optimizer;
        if !(o.g_max > 0.0 && o.g_max.is_finite()) {
            return Err(cfg_err("optimizer.g_max", "must be finite and > 0"));
        }
        if !(o.v_mod_max_snu > 1e-3 && o.v_mod_max_snu.is_finite()) {
            return Err(cfg_err("optimizer.v_mod_max_snu", "must be finite and > 1e-3"));
        }
        if o.grid_points < 3 {
            return Err(cfg_err("optimizer.grid_points", "must be >= 3"));
        }
        if !(o.tolerance > 0.0) {
            return Err(cfg_err("optimizer.tolerance", "must be > 0"));
        }
        Ok(OptimizerSettings {
            g_max: o.g_max,
            v_mod_max: o.v_mod_max_snu,
            grid_points: o.grid_points,
            tolerance: o.tolerance,
        })
    }

    pub fn time_map(&self) -> Result<TimeMap, CliError> {
        Ok(match self.duty_cycle.time_map {
            TimeMapName::Linear => TimeMap::Linear,
            TimeMapName::Orbital => TimeMap::orbital(&self.sat_link()?),
        })
    }

    /// Grid points of the sweep axis, inclusive of `stop` up to rounding.
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let s = &self.sweep;
        for (key, v) in [("start", s.start), ("stop", s.stop), ("step", s.step)] {
            if !v.is_finite() {
                return Err(cfg_err(&format!("sweep.{key}"), "must be finite"));
            }
        }
        if !(s.step > 0.0) {
            return Err(cfg_err("sweep.step", "must be > 0"));
        }
        if s.stop < s.start {
            return Err(cfg_err("sweep", "empty grid: stop < start"));
        }
        let n = ((s.stop - s.start) / s.step + 1e-9).floor() as usize + 1;
        let grid: Vec<f64> = (0..n).map(|i| s.start + i as f64 * s.step).collect();
        let (lo, hi) = match s.axis {
            Axis::Distance => (0.0, f64::INFINITY),
            Axis::Elevation => (f64::MIN_POSITIVE, 180.0 - 1e-12),
            Axis::Gain => (0.0, f64::INFINITY),
        };
        if grid.iter().any(|&x| x < lo || x > hi) {
            return Err(cfg_err("sweep", format!("grid leaves the valid range of the {:?} axis", s.axis)));
        }
        Ok(grid)
    }

    /// Cross-field checks that individual accessors cannot see.
    pub fn validate(&self) -> Result<(), CliError> {
        self.protocol()?;
        self.finite_size()?;
        self.optimizer()?;
        self.grid()?;
        match (self.channel.kind, self.sweep.axis) {
            (ChannelKind::Fiber, Axis::Elevation) => {
                return Err(cfg_err("sweep.axis", "elevation axis needs channel.kind = \"satellite\""))
            }
            (ChannelKind::Satellite, Axis::Distance) => {
                return Err(cfg_err("sweep.axis", "distance axis needs channel.kind = \"fiber\""))
            }
            _ => {}
        }
        match self.channel.kind {
            ChannelKind::Fiber => {
                self.fiber_loss()?;
            }
            ChannelKind::Satellite => {
                self.sat_link()?;
            }
        }
        if self.sweep.axis == Axis::Gain {
            let point = match self.channel.kind {
                ChannelKind::Fiber => self.sweep.distance_km,
                ChannelKind::Satellite => self.sweep.elevation_deg,
            };
            if point.is_none() {
                return Err(cfg_err(
                    "sweep",
                    "gain axis needs sweep.distance_km (fibre) or sweep.elevation_deg (satellite)",
                ));
            }
        }
        if !(self.duty_cycle.window_hours >= 0.0 && self.duty_cycle.threshold_bits_per_use.is_finite()) {
            return Err(cfg_err("duty_cycle", "window must be >= 0 and threshold finite"));
        }
        if !(self.mc.sigma > 0.0 && self.mc.gain_multiplier > 0.0) {
            return Err(cfg_err("mc", "sigma and gain_multiplier must be > 0"));
        }
        Ok(())
    }
}
