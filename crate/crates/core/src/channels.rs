//! Physical links mapped to `(T, ξ)`: fibre attenuation and a
//! satellite-to-ground link budget over elevation, plus duty-cycle
//! bookkeeping over a pass.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::keyrate::{asymptotic_key_rate, SecurityModel};
use crate::optimize::bisect;
use crate::special::normal_quantile;
use crate::sqcc::{ChannelNoise, ProtocolParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberLink {
    pub length_km: f64,
    pub loss_db_per_km: f64,
}

impl FiberLink {
    pub fn new(length_km: f64) -> Self {
        Self {
            length_km,
            loss_db_per_km: 0.2,
        }
    }
}

pub fn fiber_transmittance(link: &FiberLink) -> Result<f64> {
    if !(link.length_km >= 0.0 && link.length_km.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "length_km",
            value: link.length_km,
            reason: "must be finite and >= 0",
        });
    }
    if !(link.loss_db_per_km >= 0.0 && link.loss_db_per_km.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "loss_db_per_km",
            value: link.loss_db_per_km,
            reason: "must be finite and >= 0",
        });
    }
    Ok(10f64.powf(-link.loss_db_per_km * link.length_km / 10.0))
}

/// How the slant path through the absorbing layer of height `L_atm` is
/// measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AtmosphericPath {
    /// Chord through a spherical shell; finite at the horizon.
    #[default]
    Spherical,
    /// Flat-earth `L_atm / sin θ`; diverges at the horizon.
    Flat,
}

/// Scintillation model behind the worst-case fading cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TurbulenceModel {
    /// Rytov variance over the slant path through a turbulent surface layer,
    /// aperture-averaged, with log-normal variance `ln(1 + σ_I²)`.
    #[default]
    SurfaceLayer,
    /// Rytov variance over the whole absorbing-atmosphere slant path used
    /// directly as the log-intensity variance, without aperture averaging.
    FullPath,
}

/// Fitted once so the fixed-variance good-weather window opens at 18°
/// (see [`calibrate_transmittance_scale`]).
pub const CALIBRATED_SCALE: f64 = 2.131_013_711_220_952;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatLink {
    /// Earth radius (km).
    pub earth_radius_km: f64,
    /// Satellite altitude (km).
    pub altitude_km: f64,
    /// Ground station altitude (km).
    pub ogs_altitude_km: f64,
    /// Transmitter aperture diameter (m).
    pub d_t_m: f64,
    /// Receiver aperture diameter (m).
    pub d_r_m: f64,
    pub t_t: f64,
    pub t_r: f64,
    /// Pointing loss; the link keeps `1 - L_p`.
    pub pointing_loss: f64,
    /// Height of the absorbing atmosphere (km).
    pub atm_height_km: f64,
    /// Height of the turbulent surface layer (km).
    pub turbulence_layer_km: f64,
    /// Visibility (km).
    pub visibility_km: f64,
    /// Refractive-index structure parameter (m^-2/3).
    pub cn2: f64,
    /// Quantile at which the worst-case fading transmittance is taken.
    pub p_th: f64,
    pub wavelength_nm: f64,
    /// Excess channel noise ξ (SNU), independent of elevation.
    pub excess_noise: f64,
    pub atm_path: AtmosphericPath,
    pub turbulence: TurbulenceModel,
    /// Multiplicative calibration of the whole budget.
    pub scale: f64,
}

impl Default for SatLink {
    fn default() -> Self {
        Self::good_weather()
    }
}

impl SatLink {
    fn base(visibility_km: f64, cn2: f64) -> Self {
        Self {
            earth_radius_km: 6371.0,
            altitude_km: 500.0,
            ogs_altitude_km: 0.0,
            d_t_m: 0.3,
            d_r_m: 1.0,
            t_t: 0.95,
            t_r: 0.95,
            pointing_loss: 0.1,
            atm_height_km: 20.0,
            turbulence_layer_km: 1.0,
            visibility_km,
            cn2,
            p_th: 1e-6,
            wavelength_nm: 1550.0,
            excess_noise: 0.02,
            atm_path: AtmosphericPath::Spherical,
            turbulence: TurbulenceModel::SurfaceLayer,
            scale: CALIBRATED_SCALE,
        }
    }

    pub fn good_weather() -> Self {
        Self::base(200.0, 1e-16)
    }

    pub fn bad_weather() -> Self {
        Self::base(20.0, 1e-13)
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "good" => Some(Self::good_weather()),
            "bad" => Some(Self::bad_weather()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("earth_radius_km", self.earth_radius_km),
            ("d_t_m", self.d_t_m),
            ("d_r_m", self.d_r_m),
            ("visibility_km", self.visibility_km),
            ("wavelength_nm", self.wavelength_nm),
            ("scale", self.scale),
        ];
        for (name, v) in positive {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput(name));
            }
            if v <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be > 0",
                });
            }
        }
        let non_negative = [
            ("ogs_altitude_km", self.ogs_altitude_km),
            ("atm_height_km", self.atm_height_km),
            ("turbulence_layer_km", self.turbulence_layer_km),
            ("cn2", self.cn2),
            ("excess_noise", self.excess_noise),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite and >= 0",
                });
            }
        }
        if !(self.altitude_km > self.ogs_altitude_km && self.altitude_km.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "altitude_km",
                value: self.altitude_km,
                reason: "must exceed the ground station altitude",
            });
        }
        for (name, v) in [("t_t", self.t_t), ("t_r", self.t_r)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must lie in (0, 1]",
                });
            }
        }
        if !(0.0..1.0).contains(&self.pointing_loss) {
            return Err(Error::InvalidParameter {
                name: "pointing_loss",
                value: self.pointing_loss,
                reason: "must lie in [0, 1)",
            });
        }
        if !(self.p_th > 0.0 && self.p_th < 1.0) {
            return Err(Error::InvalidParameter {
                name: "p_th",
                value: self.p_th,
                reason: "must lie in (0, 1)",
            });
        }
        Ok(())
    }
}

fn effective_elevation(elevation_deg: f64) -> Result<f64> {
    if !elevation_deg.is_finite() {
        return Err(Error::NonFiniteInput("elevation"));
    }
    if !(elevation_deg > 0.0 && elevation_deg < 180.0) {
        return Err(domain(format!("elevation {elevation_deg}° outside (0°, 180°)")));
    }
    Ok(elevation_deg.min(180.0 - elevation_deg).to_radians())
}

/// Distance from a point at radius `r` to the shell of radius `r + h` along
/// a ray at effective elevation `te` (radians).
fn shell_chord(r: f64, h: f64, te: f64) -> f64 {
    let s = te.sin();
    (r * r * s * s + 2.0 * r * h + h * h).sqrt() - r * s
}

/// Ground-station-to-satellite distance (km) at elevation `θ`, mirrored
/// about the zenith.
pub fn slant_range(link: &SatLink, elevation_deg: f64) -> Result<f64> {
    let te = effective_elevation(elevation_deg)?;
    let r = link.earth_radius_km + link.ogs_altitude_km;
    Ok(shell_chord(r, link.altitude_km - link.ogs_altitude_km, te))
}

/// Kim visibility model: extinction coefficient (1/km).
pub fn kim_extinction(visibility_km: f64, wavelength_nm: f64) -> f64 {
    let v = visibility_km;
    let q = if v > 50.0 {
        1.6
    } else if v > 6.0 {
        1.3
    } else if v > 1.0 {
        0.16 * v + 0.34
    } else if v > 0.5 {
        v - 0.5
    } else {
        0.0
    };
    3.91 / v * (wavelength_nm / 550.0).powf(-q)
}

/// Individual factors of the link budget at one elevation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub slant_range_km: f64,
    pub diffraction: f64,
    pub atmospheric: f64,
    pub turbulence: f64,
    /// Product of all factors including optics, pointing and scale, capped at 1.
    pub transmittance: f64,
}

pub fn link_budget(link: &SatLink, elevation_deg: f64) -> Result<LinkBudget> {
    link.validate()?;
    let te = effective_elevation(elevation_deg)?;
    let r = link.earth_radius_km + link.ogs_altitude_km;
    let lambda = link.wavelength_nm * 1e-9;
    let k = 2.0 * PI / lambda;

    let range_km = shell_chord(r, link.altitude_km - link.ogs_altitude_km, te);
    let range_m = range_km * 1e3;
    let w0 = 0.5 * link.d_t_m;
    let z_r = PI * w0 * w0 / lambda;
    let w = w0 * (1.0 + (range_m / z_r).powi(2)).sqrt();
    let rx = 0.5 * link.d_r_m;
    let diffraction = -(-2.0 * rx * rx / (w * w)).exp_m1();

    let atm_km = match link.atm_path {
        AtmosphericPath::Spherical => shell_chord(r, link.atm_height_km, te),
        AtmosphericPath::Flat => link.atm_height_km / te.sin(),
    };
    let atmospheric = (-kim_extinction(link.visibility_km, link.wavelength_nm) * atm_km).exp();

    let turb_m = match link.turbulence {
        TurbulenceModel::SurfaceLayer => shell_chord(r, link.turbulence_layer_km, te) * 1e3,
        TurbulenceModel::FullPath => atm_km * 1e3,
    };
    let turbulence = if turb_m > 0.0 && link.cn2 > 0.0 {
        let rytov = 1.23 * link.cn2 * k.powf(7.0 / 6.0) * turb_m.powf(11.0 / 6.0);
        let sigma2 = match link.turbulence {
            TurbulenceModel::SurfaceLayer => {
                let averaging =
                    (1.0 + 1.062 * k * link.d_r_m * link.d_r_m / (4.0 * turb_m)).powf(-7.0 / 6.0);
                (averaging * rytov).ln_1p()
            }
            TurbulenceModel::FullPath => rytov,
        };
        (-0.5 * sigma2 + sigma2.sqrt() * normal_quantile(link.p_th)?).exp().min(1.0)
    } else {
        1.0
    };

    let transmittance = (link.scale
        * link.t_t
        * link.t_r
        * (1.0 - link.pointing_loss)
        * diffraction
        * atmospheric
        * turbulence)
        .min(1.0);
    Ok(LinkBudget {
        slant_range_km: range_km,
        diffraction,
        atmospheric,
        turbulence,
        transmittance,
    })
}

/// `(T, ξ)` of the downlink at the given elevation.
pub fn satellite_transmittance(link: &SatLink, elevation_deg: f64) -> Result<(f64, f64)> {
    let t = link_budget(link, elevation_deg)?.transmittance;
    if !(t >= 1e-12) {
        return Err(Error::DegenerateLink(t));
    }
    Ok((t, link.excess_noise))
}

/// Protocol parameters used for the satellite downlink at transmittance `t`:
/// V_mod = 7, d = 50, η = 0.985, v_el = 0.01, β = 0.92.
pub fn satellite_protocol(link: &SatLink, t: f64) -> ProtocolParams {
    ProtocolParams {
        v_mod: 7.0,
        displacement: 50.0,
        transmittance: t,
        noise: ChannelNoise::Excess(link.excess_noise),
        eta: 0.985,
        v_el: 0.01,
        beta: 0.92,
    }
}

/// Scale factor that places the zero crossing of the unfiltered asymptotic
/// trusted-receiver rate of `p` at `elevation_deg` under `link`.
pub fn calibrate_transmittance_scale(
    link: &SatLink,
    p: &ProtocolParams,
    elevation_deg: f64,
) -> Result<f64> {
    let rate = |t: f64| {
        asymptotic_key_rate(&p.with_transmittance(t), 0.0, SecurityModel::TrustedReceiver)
            .map(|r| r.key_rate)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let t_cut = bisect(|lt: f64| rate(lt.exp()), (1e-6f64).ln(), (0.999f64).ln(), 1e-13)
        .map(f64::exp)
        .ok_or_else(|| domain("key rate has no zero crossing in T ∈ [1e-6, 0.999]"))?;
    let unscaled = link_budget(&SatLink { scale: 1.0, ..*link }, elevation_deg)?.transmittance;
    Ok(t_cut / unscaled)
}

/// Mapping from elevation to pass time used to weight grid points.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TimeMap {
    /// Uniform angular rate: time is proportional to elevation.
    #[default]
    Linear,
    /// Circular orbit at constant angular speed; time follows the
    /// earth-central angle between sub-satellite point and station.
    Orbital {
        earth_radius_km: f64,
        altitude_km: f64,
    },
}

impl TimeMap {
    pub fn orbital(link: &SatLink) -> Self {
        TimeMap::Orbital {
            earth_radius_km: link.earth_radius_km + link.ogs_altitude_km,
            altitude_km: link.altitude_km - link.ogs_altitude_km,
        }
    }

    /// Monotone pass clock on `[0°, 180°]`, in arbitrary units.
    fn clock(&self, elevation_deg: f64) -> f64 {
        match *self {
            TimeMap::Linear => elevation_deg,
            TimeMap::Orbital {
                earth_radius_km: r,
                altitude_km: h,
            } => {
                let central = |e: f64| {
                    let e = e.to_radians();
                    (r * e.cos() / (r + h)).clamp(-1.0, 1.0).acos() - e
                };
                let horizon = central(0.0);
                if elevation_deg <= 90.0 {
                    horizon - central(elevation_deg)
                } else {
                    horizon + central(180.0 - elevation_deg)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutyCycle {
    pub fraction: f64,
    /// `fraction × total_window`, in the units of the window.
    pub duration: f64,
}

/// Time weight of each sample: the clock span of its cell, with cell edges
/// at midpoints between neighbours and outer edges extended by half a
/// spacing and clipped to `[0°, 180°]`.
fn cell_weights(elevations: &[f64], map: TimeMap) -> Vec<f64> {
    let n = elevations.len();
    if n == 1 {
        return vec![1.0];
    }
    let mut edges = Vec::with_capacity(n + 1);
    edges.push((elevations[0] - 0.5 * (elevations[1] - elevations[0])).clamp(0.0, 180.0));
    for w in elevations.windows(2) {
        edges.push(0.5 * (w[0] + w[1]));
    }
    edges.push((elevations[n - 1] + 0.5 * (elevations[n - 1] - elevations[n - 2])).clamp(0.0, 180.0));
    edges
        .windows(2)
        .map(|e| (map.clock(e[1]) - map.clock(e[0])).abs())
        .collect()
}

/// Fraction of the pass with key rate at or above `threshold`.
///
/// `rates` are `(elevation°, key_rate)` samples on an increasing grid.
/// Under [`TimeMap::Linear`] on a uniform grid this is simply the share of
/// grid points above threshold.
pub fn duty_cycle(
    rates: &[(f64, f64)],
    threshold: f64,
    total_window: f64,
    map: TimeMap,
) -> Result<DutyCycle> {
    if rates.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let elevations: Vec<f64> = rates.iter().map(|r| r.0).collect();
    if elevations.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("elevation grid must be strictly increasing"));
    }
    let weights = cell_weights(&elevations, map);
    let total: f64 = weights.iter().sum();
    let above: f64 = rates
        .iter()
        .zip(&weights)
        .filter(|((_, k), _)| *k >= threshold)
        .fold(0.0, |acc, (_, w)| acc + w);
    let fraction = if total > 0.0 { above / total } else { 0.0 };
    Ok(DutyCycle {
        fraction,
        duration: fraction * total_window,
    })
}

/// First and last elevation with key rate at or above `threshold`.
pub fn key_window(rates: &[(f64, f64)], threshold: f64) -> Option<(f64, f64)> {
    let mut it = rates.iter().filter(|(_, k)| *k >= threshold).map(|(e, _)| *e);
    let first = it.next()?;
    Some((first, it.next_back().unwrap_or(first)))
}

/// Uniform grid of `n` cell-centred elevations covering `(0°, 180°)`.
pub fn elevation_grid(n: usize) -> Vec<f64> {
    let step = 180.0 / n as f64;
    (0..n).map(|i| (i as f64 + 0.5) * step).collect()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen reference values, as printed
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fiber_values() {
        assert_eq!(fiber_transmittance(&FiberLink::new(0.0)).unwrap(), 1.0);
        let t41 = fiber_transmittance(&FiberLink::new(41.0)).unwrap();
        assert!((t41 - 0.151_356_124_843_620_83).abs() < 1e-15);
        let t375 = fiber_transmittance(&FiberLink::new(37.5)).unwrap();
        assert!((t375 - 0.177_827_941_003_892_28).abs() < 1e-15);
        assert!(fiber_transmittance(&FiberLink::new(-1.0)).is_err());
    }

    #[test]
    fn zenith_range_is_altitude() {
        let l = slant_range(&SatLink::default(), 90.0).unwrap();
        assert!((l - 500.0).abs() < 1e-9);
    }

    #[test]
    fn slant_range_matches_coordinate_geometry() {
        // Station at (0, R); satellite on the circle of radius R + h, found by
        // walking along the elevation ray until the distance from the origin
        // reaches R + h.
        let link = SatLink::default();
        let (r, h) = (link.earth_radius_km, link.altitude_km);
        let e = 30f64.to_radians();
        let dir = (e.cos(), e.sin());
        let reach = |s: f64| (s * dir.0).hypot(r + s * dir.1) - (r + h);
        let s = bisect(reach, 0.0, 1e4, 1e-10).unwrap();
        let sat = (s * dir.0, r + s * dir.1);
        let dist = sat.0.hypot(sat.1 - r);
        assert!((slant_range(&link, 30.0).unwrap() - dist).abs() < 1e-8);
    }

    #[test]
    fn slant_range_rejects_horizon() {
        let link = SatLink::default();
        assert!(slant_range(&link, 0.0).is_err());
        assert!(slant_range(&link, 180.0).is_err());
        assert!(slant_range(&link, f64::NAN).is_err());
    }

    #[test]
    fn kim_brackets() {
        let s = |v: f64, q: f64| 3.91 / v * (1550.0f64 / 550.0).powf(-q);
        for (v, q) in [(200.0, 1.6), (20.0, 1.3), (3.0, 0.82), (0.8, 0.3), (0.2, 0.0)] {
            let k = kim_extinction(v, 1550.0);
            assert!((k / s(v, q) - 1.0).abs() < 1e-13, "V={v}");
        }
    }

    #[test]
    fn flat_path_is_longer_near_horizon() {
        let flat = SatLink {
            atm_path: AtmosphericPath::Flat,
            ..SatLink::default()
        };
        let sph = SatLink::default();
        let a = link_budget(&sph, 2.0).unwrap().atmospheric;
        let b = link_budget(&flat, 2.0).unwrap().atmospheric;
        assert!(b < a);
        let z1 = link_budget(&sph, 90.0).unwrap().atmospheric;
        let z2 = link_budget(&flat, 90.0).unwrap().atmospheric;
        assert!((z1 - z2).abs() < 1e-12);
    }

    #[test]
    fn full_path_turbulence_is_harsher() {
        for base in [SatLink::good_weather(), SatLink::bad_weather()] {
            let full = SatLink {
                turbulence: TurbulenceModel::FullPath,
                ..base
            };
            for e in [10.0, 45.0, 90.0] {
                let a = link_budget(&base, e).unwrap().turbulence;
                let b = link_budget(&full, e).unwrap().turbulence;
                assert!(b < a);
            }
        }
        // Ground-level Cn² = 1e-13 over 20 km leaves no usable link at all.
        let bad = SatLink {
            turbulence: TurbulenceModel::FullPath,
            ..SatLink::bad_weather()
        };
        assert!(matches!(satellite_transmittance(&bad, 90.0), Err(Error::DegenerateLink(_))));
    }

    #[test]
    fn calibration_reproduces_frozen_scale() {
        let link = SatLink::good_weather();
        let s = calibrate_transmittance_scale(&link, &satellite_protocol(&link, 0.5), 18.0).unwrap();
        assert!((s - CALIBRATED_SCALE).abs() < 1e-9, "{s}");
    }

    #[test]
    fn calibrated_window_opens_at_18_degrees() {
        let link = SatLink::good_weather();
        let k = |e: f64| {
            let (t, _) = satellite_transmittance(&link, e).unwrap();
            asymptotic_key_rate(&satellite_protocol(&link, t), 0.0, SecurityModel::TrustedReceiver)
                .unwrap()
                .key_rate
        };
        assert!(k(17.9) < 0.0 && k(18.1) > 0.0);
        assert!(k(161.9) > 0.0 && k(162.1) < 0.0);
    }

    #[test]
    fn degenerate_link() {
        let link = SatLink {
            visibility_km: 0.05,
            ..SatLink::bad_weather()
        };
        assert!(matches!(
            satellite_transmittance(&link, 1.0),
            Err(Error::DegenerateLink(_))
        ));
    }

    #[test]
    fn duty_cycle_examples() {
        let grid = elevation_grid(180);
        let all: Vec<_> = grid.iter().map(|&e| (e, 1.0)).collect();
        let d = duty_cycle(&all, 1e-4, 3.0, TimeMap::Linear).unwrap();
        assert_eq!(d.fraction, 1.0);
        assert_eq!(d.duration, 3.0);
        let none: Vec<_> = grid.iter().map(|&e| (e, -1.0)).collect();
        assert_eq!(duty_cycle(&none, 1e-4, 3.0, TimeMap::Linear).unwrap().fraction, 0.0);
        let ramp: Vec<_> = grid.iter().map(|&e| (e, e - 90.0)).collect();
        let half = duty_cycle(&ramp, 0.0, 3.0, TimeMap::Linear).unwrap();
        assert!((half.fraction - 0.5).abs() < 1e-12);
        assert!(matches!(duty_cycle(&[], 0.0, 3.0, TimeMap::Linear), Err(Error::EmptyGrid)));
    }

    #[test]
    fn orbital_clock_spans_central_angle() {
        let map = TimeMap::orbital(&SatLink::default());
        let psi0 = (6371.0f64 / 6871.0).acos();
        assert!((map.clock(90.0) - psi0).abs() < 1e-12);
        assert!((map.clock(180.0) - 2.0 * psi0).abs() < 1e-12);
        assert!((psi0.to_degrees() - 22.0).abs() < 0.05);
    }

    #[test]
    fn orbital_map_favours_low_elevations() {
        // Above 30° the satellite is overhead for far less than 2/3 of the pass.
        let grid = elevation_grid(180);
        let high: Vec<_> = grid.iter().map(|&e| (e, if (30.0..=150.0).contains(&e) { 1.0 } else { 0.0 })).collect();
        let lin = duty_cycle(&high, 0.5, 1.0, TimeMap::Linear).unwrap().fraction;
        let orb = duty_cycle(&high, 0.5, 1.0, TimeMap::orbital(&SatLink::default())).unwrap().fraction;
        assert!((lin - 2.0 / 3.0).abs() < 1e-12);
        assert!(orb < 0.3, "{orb}");
    }

    #[test]
    fn window_helper() {
        let rates = [(10.0, -1.0), (20.0, 1.0), (30.0, 2.0), (40.0, -0.5)];
        assert_eq!(key_window(&rates, 0.0), Some((20.0, 30.0)));
        assert_eq!(key_window(&rates, 5.0), None);
    }

    proptest! {
        #[test]
        fn transmittance_symmetric_about_zenith(e in 0.5f64..89.5, bad in any::<bool>()) {
            let link = if bad { SatLink::bad_weather() } else { SatLink::good_weather() };
            let a = link_budget(&link, e).unwrap().transmittance;
            let b = link_budget(&link, 180.0 - e).unwrap().transmittance;
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }

        #[test]
        fn transmittance_increases_towards_zenith(e in 0.5f64..89.0, de in 0.01f64..1.0, bad in any::<bool>()) {
            let link = if bad { SatLink::bad_weather() } else { SatLink::good_weather() };
            let a = link_budget(&link, e).unwrap().transmittance;
            let b = link_budget(&link, (e + de).min(90.0)).unwrap().transmittance;
            prop_assert!(b > a);
        }

        #[test]
        fn good_weather_beats_bad(e in 0.5f64..179.5) {
            let g = link_budget(&SatLink::good_weather(), e).unwrap().transmittance;
            let b = link_budget(&SatLink::bad_weather(), e).unwrap().transmittance;
            prop_assert!(g > b);
        }

        #[test]
        fn transmittance_decreasing_in_cn2(e in 0.5f64..179.5, lc in -17.0f64..-12.0, d in 0.1f64..1.0) {
            let lo = SatLink { cn2: 10f64.powf(lc), ..SatLink::good_weather() };
            let hi = SatLink { cn2: 10f64.powf(lc + d), ..lo };
            prop_assert!(link_budget(&hi, e).unwrap().transmittance < link_budget(&lo, e).unwrap().transmittance);
        }

        #[test]
        fn transmittance_increasing_in_visibility(e in 0.5f64..179.5, v in 0.6f64..300.0, f in 1.01f64..3.0) {
            let lo = SatLink { visibility_km: v, ..SatLink::good_weather() };
            let hi = SatLink { visibility_km: v * f, ..lo };
            prop_assert!(link_budget(&hi, e).unwrap().transmittance > link_budget(&lo, e).unwrap().transmittance);
        }

        #[test]
        fn fiber_decreasing_in_length(l in 0.0f64..300.0, d in 0.01f64..50.0) {
            let a = fiber_transmittance(&FiberLink::new(l)).unwrap();
            let b = fiber_transmittance(&FiberLink::new(l + d)).unwrap();
            prop_assert!(b < a);
        }

        #[test]
        fn duty_cycle_monotone_in_threshold(
            rates in proptest::collection::vec(-1e-2f64..1e-2, 1..200),
            t1 in -1e-2f64..1e-2,
            dt in 0.0f64..1e-2,
            orbital in any::<bool>(),
        ) {
            let grid = elevation_grid(rates.len());
            let samples: Vec<_> = grid.into_iter().zip(rates).collect();
            let map = if orbital { TimeMap::orbital(&SatLink::default()) } else { TimeMap::Linear };
            let a = duty_cycle(&samples, t1, 1.0, map).unwrap().fraction;
            let b = duty_cycle(&samples, t1 + dt, 1.0, map).unwrap().fraction;
            prop_assert!(b <= a + 1e-15);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        }
    }
}
