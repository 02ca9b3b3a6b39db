//! Agreement suite between the analytic model and the Monte Carlo oracle.

use sqcc_core::postselection::{effective_modulation_variance, post_selected_pipeline};
use sqcc_core::{ChannelNoise, ProtocolParams};
use sqcc_oracle::{simulate_block_with, Estimate, SimOptions};

use crate::config::RunConfig;
use crate::{fmt, CliError, Table};

/// Grid point of the suite: transmittance, filter gain and optional
/// overrides of the configured protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McPoint {
    pub transmittance: f64,
    pub gain: f64,
    pub excess_noise: Option<f64>,
    pub displacement: Option<f64>,
}

/// Five points covering T ∈ [0.03, 1] and g ∈ {0, 0.25, 0.8}: a noiseless
/// identity channel, two filtered mid-range channels (the second at 41 km of
/// fibre), a lossy heavily filtered channel, and a weak displacement that
/// makes classical decoding errors frequent.
pub const DEFAULT_GRID: [McPoint; 5] = [
    McPoint { transmittance: 1.0, gain: 0.0, excess_noise: Some(0.0), displacement: None },
    McPoint { transmittance: 0.5, gain: 0.25, excess_noise: None, displacement: None },
    McPoint { transmittance: 0.1514, gain: 0.25, excess_noise: None, displacement: None },
    McPoint { transmittance: 0.03, gain: 0.8, excess_noise: None, displacement: None },
    McPoint { transmittance: 0.3, gain: 0.0, excess_noise: None, displacement: Some(8.0) },
];

#[derive(Debug, Clone, PartialEq)]
pub struct McCheck {
    pub point: usize,
    pub quantity: &'static str,
    pub measured: Estimate,
    pub expected: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub checks: Vec<McCheck>,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn table(&self) -> Table {
        let header = ["point", "quantity", "measured", "std_err", "expected", "z", "pass"]
            .map(String::from)
            .to_vec();
        let rows = self
            .checks
            .iter()
            .map(|c| {
                vec![
                    c.point.to_string(),
                    c.quantity.to_owned(),
                    fmt(c.measured.value),
                    fmt(c.measured.std_err),
                    fmt(c.expected),
                    fmt(c.z),
                    c.pass.to_string(),
                ]
            })
            .collect();
        Table { header, rows }
    }

    /// Error describing every failed check, or `Ok` when all pass.
    pub fn into_result(self) -> Result<Self, CliError> {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("point {} {} z={:.2}", c.point, c.quantity, c.z))
            .collect();
        if failed.is_empty() {
            Ok(self)
        } else {
            Err(CliError::Validation(failed.join("; ")))
        }
    }
}

fn point_params(base: &ProtocolParams, pt: &McPoint) -> ProtocolParams {
    let mut p = base.with_transmittance(pt.transmittance);
    if let Some(xi) = pt.excess_noise {
        p.noise = ChannelNoise::Excess(xi);
    }
    if let Some(d) = pt.displacement {
        p.displacement = d;
    }
    p
}

/// Simulates each grid point with seed `seed + i` and compares the empirical
/// covariance matrix, acceptance rate, effective modulation variance,
/// classical bit-error rate and rescaling gain with the model.
///
/// A failed check is reported, not raised; see [`McReport::into_result`].
pub fn run_mc_validation(cfg: &RunConfig, seed: Option<u64>, grid: &[McPoint]) -> Result<McReport, CliError> {
    let seed = seed.or(cfg.mc.seed);
    let base = cfg.protocol()?;
    let opts = SimOptions {
        gain_multiplier: cfg.mc.gain_multiplier,
    };
    let sigma = cfg.mc.sigma;
    let mut checks = Vec::new();
    for (i, pt) in grid.iter().enumerate() {
        let p = point_params(&base, pt);
        let model = post_selected_pipeline(&p, pt.gain)?;
        let r = simulate_block_with(&p, pt.gain, cfg.mc.pulses, seed.map(|s| s.wrapping_add(i as u64)), &opts)?;
        let expected = [
            ("a", r.a, model.data_cm.a),
            ("b", r.b, model.data_cm.b),
            ("c", r.c, model.data_cm.c),
            ("P_A", r.p_accept, model.p_accept),
            ("V_mod_eff", r.v_mod_eff, effective_modulation_variance(pt.gain, p.v_mod)?),
            ("e_C", r.e_c, model.derived.e_c),
            ("N_d", r.n_d, model.derived.n_d),
        ];
        for (quantity, measured, want) in expected {
            let z = measured.z_score(want);
            checks.push(McCheck {
                point: i + 1,
                quantity,
                measured,
                expected: want,
                z,
                pass: z.abs() <= sigma,
            });
        }
    }
    Ok(McReport { checks })
}
