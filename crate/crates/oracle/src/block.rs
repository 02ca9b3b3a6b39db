use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use sqcc_core::{ProtocolParams, TwoModeCm};

use crate::pulse::{chunk_len, chunk_rng, symbol_signs, Physics, CHUNKS};
use crate::{OracleError, Result, MIN_BLOCK_PULSES};

/// A point estimate with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    /// Standardized deviation of `expected` from this estimate.
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = self.value - expected;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_err
        }
    }
}

/// Knobs for fault injection in tests of the validation harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Multiplies the moment-matching gain Bob applies after re-displacement.
    pub gain_multiplier: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            gain_multiplier: 1.0,
        }
    }
}

/// Empirical statistics of one simulated block.
///
/// `a`, `b`, `c` come from accepted pulses only; `e_c`, `n_d` and `snr` from
/// all pulses, matching the pre-filter role these quantities play in the
/// analytic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockReport {
    pub n_pulses: u64,
    pub n_accepted: u64,
    pub a: Estimate,
    pub b: Estimate,
    pub c: Estimate,
    pub p_accept: Estimate,
    pub v_mod_eff: Estimate,
    pub e_c: Estimate,
    pub n_d: Estimate,
    pub snr: Estimate,
}

impl BlockReport {
    pub fn cm(&self) -> TwoModeCm {
        TwoModeCm::new(self.a.value, self.b.value, self.c.value)
    }
}

/// Additive sufficient statistics; per-quadrature sums pool x and p.
#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    n: u64,
    n_acc: u64,
    errors: u64,
    genie1: f64,
    genie2: f64,
    red_s: f64,
    red2: f64,
    het_s: f64,
    het2: f64,
    xa1: f64,
    xa2: f64,
    acc_red1: f64,
    acc_red_s: f64,
    acc_red2: f64,
    xa_red: f64,
}

impl Sums {
    fn merge(mut self, o: &Sums) -> Sums {
        self.n += o.n;
        self.n_acc += o.n_acc;
        self.errors += o.errors;
        self.genie1 += o.genie1;
        self.genie2 += o.genie2;
        self.red_s += o.red_s;
        self.red2 += o.red2;
        self.het_s += o.het_s;
        self.het2 += o.het2;
        self.xa1 += o.xa1;
        self.xa2 += o.xa2;
        self.acc_red1 += o.acc_red1;
        self.acc_red_s += o.acc_red_s;
        self.acc_red2 += o.acc_red2;
        self.xa_red += o.xa_red;
        self
    }

    fn point(&self, opts: &SimOptions) -> Option<[f64; 8]> {
        if self.n == 0 || self.n_acc < 2 {
            return None;
        }
        let q = 2.0 * self.n as f64;
        let qa = 2.0 * self.n_acc as f64;
        let var_genie = self.genie2 / q - (self.genie1 / q).powi(2);
        let var_ws = self.red2 / q - (self.red_s / q).powi(2);
        let n_d = (var_genie / var_ws).sqrt() * opts.gain_multiplier;
        let xa_mean = self.xa1 / qa;
        let v_mod_eff = self.xa2 / qa - xa_mean * xa_mean;
        let a = v_mod_eff + 1.0;
        let acc_var_ws = self.acc_red2 / qa - (self.acc_red_s / qa).powi(2);
        let b = n_d * n_d * acc_var_ws - 1.0;
        let cov = self.xa_red / qa - xa_mean * self.acc_red1 / qa;
        let c = ((a + 1.0) / v_mod_eff).sqrt() * n_d * cov;
        let het_mean = self.het_s / q;
        let snr = 2.0 * het_mean * het_mean / (self.het2 / q - het_mean * het_mean);
        Some([
            a,
            b,
            c,
            self.n_acc as f64 / self.n as f64,
            v_mod_eff,
            self.errors as f64 / q,
            n_d,
            snr,
        ])
    }
}

fn chunk_sums(ph: &Physics, seed: u64, chunk: u64, n: u64) -> Sums {
    let mut rng = chunk_rng(seed, chunk);
    let m = SQRT_2 * ph.half_alpha();
    let mut s = Sums::default();
    for _ in 0..chunk_len(n, chunk) {
        let r = ph.draw(&mut rng);
        let (sx, sp) = symbol_signs(r.sym);
        s.n += 1;
        if r.acc {
            s.n_acc += 1;
        }
        for (xa, xb, sgn) in [(r.x_a, r.x_b, sx), (r.p_a, r.p_b, sp)] {
            let dec = if xb >= 0.0 { 1.0 } else { -1.0 };
            if dec != sgn {
                s.errors += 1;
            }
            let u = SQRT_2 * xb;
            let genie = u - sgn * m;
            let red = u - dec * m;
            s.genie1 += genie;
            s.genie2 += genie * genie;
            s.red_s += sgn * red;
            s.red2 += red * red;
            s.het_s += sgn * xb;
            s.het2 += xb * xb;
            if r.acc {
                s.xa1 += xa;
                s.xa2 += xa * xa;
                s.acc_red1 += red;
                s.acc_red_s += sgn * red;
                s.acc_red2 += red * red;
                s.xa_red += xa * red;
            }
        }
    }
    s
}

pub fn simulate_block(
    p: &ProtocolParams,
    g: f64,
    n_pulses: u64,
    seed: Option<u64>,
) -> Result<BlockReport> {
    simulate_block_with(p, g, n_pulses, seed, &SimOptions::default())
}

/// Simulates `n_pulses` pulses split over independent seeded streams, runs
/// the streams in parallel, and merges their statistics in stream order, so
/// the result is bit-identical for a given seed whatever the thread count.
pub fn simulate_block_with(
    p: &ProtocolParams,
    g: f64,
    n_pulses: u64,
    seed: Option<u64>,
    opts: &SimOptions,
) -> Result<BlockReport> {
    let seed = seed.ok_or(OracleError::SeedRequired)?;
    if n_pulses < MIN_BLOCK_PULSES {
        return Err(OracleError::InsufficientSamples {
            got: n_pulses,
            need: MIN_BLOCK_PULSES,
        });
    }
    let ph = Physics::new(p, g)?;
    let chunks: Vec<Sums> = (0..CHUNKS)
        .into_par_iter()
        .map(|i| chunk_sums(&ph, seed, i, n_pulses))
        .collect();
    let total = chunks.iter().fold(Sums::default(), |acc, s| acc.merge(s));
    let point = total.point(opts).ok_or(OracleError::InsufficientSamples {
        got: total.n_acc,
        need: 2,
    })?;

    let batches: Vec<[f64; 8]> = chunks.iter().filter_map(|s| s.point(opts)).collect();
    let k = batches.len() as f64;
    let std_err = |j: usize| {
        if batches.len() < 2 {
            return f64::NAN;
        }
        let mean = batches.iter().map(|b| b[j]).sum::<f64>() / k;
        let var = batches.iter().map(|b| (b[j] - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    };
    let est = |j: usize| Estimate {
        value: point[j],
        std_err: std_err(j),
    };
    // A proportion that never (or always) fires has zero batch spread; floor
    // its error at one event in the block.
    let proportion = |j: usize, trials: f64| Estimate {
        value: point[j],
        std_err: std_err(j).max(1.0 / trials),
    };
    Ok(BlockReport {
        n_pulses,
        n_accepted: total.n_acc,
        a: est(0),
        b: est(1),
        c: est(2),
        p_accept: proportion(3, total.n as f64),
        v_mod_eff: est(4),
        e_c: proportion(5, 2.0 * total.n as f64),
        n_d: est(6),
        snr: est(7),
    })
}
