//! Key-rate sweeps over fibre length, satellite elevation or filter gain.

use rayon::prelude::*;
use sqcc_core::channels::{fiber_transmittance, link_budget, satellite_transmittance, FiberLink};
use sqcc_core::{
    asymptotic_key_rate, finite_size_key_rate, optimize_gain, optimize_modulation_variance, ChannelNoise,
    Error, FiniteSizeParams, KeyRateReport, OptimizerSettings, ProtocolParams, SecurityModel,
};

use crate::config::{Axis, ChannelKind, RunConfig};
use crate::{fmt, CliError, Table};

/// Everything needed to evaluate one grid point.
struct Plan {
    axis: Axis,
    kind: ChannelKind,
    protocol: ProtocolParams,
    mode: SecurityModel,
    blocks: Vec<FiniteSizeParams>,
    opt: OptimizerSettings,
    cfg: RunConfig,
}

/// Channel state at a grid point; `None` when the link is degenerate.
struct Point {
    t: f64,
    xi: f64,
    params: Option<ProtocolParams>,
    gain: Option<f64>,
}

fn axis_name(axis: Axis) -> &'static str {
    match axis {
        Axis::Distance => "distance_km",
        Axis::Elevation => "elevation_deg",
        Axis::Gain => "gain",
    }
}

/// Tag used in finite-size column names, e.g. `1e10`.
fn block_tag(n: f64) -> String {
    format!("{n:e}")
}

impl Plan {
    fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        Ok(Self {
            axis: cfg.sweep.axis,
            kind: cfg.channel.kind,
            protocol: cfg.protocol()?,
            mode: cfg.security_model(),
            blocks: cfg.finite_size()?,
            opt: cfg.optimizer()?,
            cfg: cfg.clone(),
        })
    }

    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = [
            axis_name(self.axis),
            "T",
            "xi",
            "key_rate_fixed",
            "key_rate_ps",
            "g_opt",
            "P_A",
            "I_AB",
            "I_E",
            "key_rate_optV",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for fs in &self.blocks {
            let n = block_tag(fs.n);
            h.push(format!("key_rate_fixed_n{n}"));
            h.push(format!("key_rate_ps_n{n}"));
            h.push(format!("g_opt_n{n}"));
        }
        h
    }

    fn xi(&self) -> f64 {
        match self.protocol.noise {
            ChannelNoise::Excess(xi) => xi,
            ChannelNoise::Thermal(_) => f64::NAN,
        }
    }

    /// Channel at fibre length or elevation `x`.
    fn channel(&self, x: f64) -> Result<Point, CliError> {
        let (t, xi) = match self.kind {
            ChannelKind::Fiber => {
                let link = FiberLink {
                    length_km: x,
                    loss_db_per_km: self.cfg.fiber_loss()?,
                };
                (fiber_transmittance(&link)?, self.xi())
            }
            ChannelKind::Satellite => {
                let link = self.cfg.sat_link()?;
                match satellite_transmittance(&link, x) {
                    Ok(v) => v,
                    Err(Error::DegenerateLink(_)) => {
                        let t = link_budget(&link, x)?.transmittance;
                        return Ok(Point {
                            t,
                            xi: link.excess_noise,
                            params: None,
                            gain: None,
                        });
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        };
        let mut p = self.protocol.with_transmittance(t);
        p.noise = ChannelNoise::Excess(xi);
        Ok(Point {
            t,
            xi,
            params: Some(p),
            gain: None,
        })
    }

    fn point(&self, x: f64) -> Result<Point, CliError> {
        match self.axis {
            Axis::Distance | Axis::Elevation => self.channel(x),
            Axis::Gain => {
                let at = match self.kind {
                    ChannelKind::Fiber => self.cfg.sweep.distance_km,
                    ChannelKind::Satellite => self.cfg.sweep.elevation_deg,
                }
                .ok_or_else(|| CliError::Config("sweep: gain axis needs an operating point".into()))?;
                Ok(Point {
                    gain: Some(x),
                    ..self.channel(at)?
                })
            }
        }
    }

    fn ps_rate(&self, p: &ProtocolParams, gain: Option<f64>, fs: Option<&FiniteSizeParams>) -> sqcc_core::Result<KeyRateReport> {
        match (gain, fs) {
            (Some(g), None) => asymptotic_key_rate(p, g, self.mode),
            (Some(g), Some(fs)) => finite_size_key_rate(p, g, fs, self.mode),
            (None, fs) => optimize_gain(p, self.mode, fs, &self.opt),
        }
    }

    fn row(&self, x: f64) -> Result<Vec<String>, CliError> {
        let pt = self.point(x)?;
        let mut row = vec![fmt(x), fmt(pt.t), fmt(pt.xi)];
        let Some(p) = pt.params else {
            // No usable photons: every rate is zero and nothing is filtered.
            row.extend(["0", "0", "0", "1", "0", "0", "0"].map(String::from));
            for _ in &self.blocks {
                row.extend(["0", "0", "0"].map(String::from));
            }
            return Ok(row);
        };
        let fixed = asymptotic_key_rate(&p, 0.0, self.mode)?;
        let ps = self.ps_rate(&p, pt.gain, None)?;
        let opt_v = optimize_modulation_variance(&p, self.mode, None, &self.opt)?;
        row.extend([
            fmt(fixed.key_rate),
            fmt(ps.key_rate),
            fmt(ps.g_opt),
            fmt(ps.p_accept),
            fmt(ps.i_ab),
            fmt(ps.i_e),
            fmt(opt_v.key_rate),
        ]);
        for fs in &self.blocks {
            let fixed = zero_if_unestimable(finite_size_key_rate(&p, 0.0, fs, self.mode))?;
            let ps = zero_if_unestimable(self.ps_rate(&p, pt.gain, Some(fs)))?;
            row.push(fmt(fixed.map_or(0.0, |r| r.key_rate)));
            row.push(fmt(ps.map_or(0.0, |r| r.key_rate)));
            row.push(fmt(ps.map_or(0.0, |r| r.g_opt)));
        }
        Ok(row)
    }
}

/// A block too small to estimate a positive correlation yields no key.
fn zero_if_unestimable(r: sqcc_core::Result<KeyRateReport>) -> Result<Option<KeyRateReport>, CliError> {
    match r {
        Ok(r) => Ok(Some(r)),
        Err(Error::NonPositiveCorrelation(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// One row per grid point, in axis order.
///
/// Rates are reported signed (negative means insecure). Points are
/// evaluated on the rayon pool; the output does not depend on its size.
pub fn run_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let plan = Plan::new(cfg)?;
    let grid = cfg.grid()?;
    let rows = grid
        .par_iter()
        .map(|&x| plan.row(x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table {
        header: plan.header(),
        rows,
    })
}

/// Single-row table at axis value `x`.
pub fn run_point(cfg: &RunConfig, x: f64) -> Result<Table, CliError> {
    if !x.is_finite() {
        return Err(CliError::Config(format!("--at {x}: must be finite")));
    }
    let plan = Plan::new(cfg)?;
    Ok(Table {
        header: plan.header(),
        rows: vec![plan.row(x)?],
    })
}
