use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sqcc_core::sqcc::bob_variance;
use sqcc_core::ProtocolParams;

use crate::{OracleError, Result, MIN_SNR_RECORDS};

/// Number of independently seeded streams a block is split into.
pub(crate) const CHUNKS: u64 = 64;

/// One transmitted pulse as seen by both parties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseRecord {
    /// Alice's Gaussian symbol (√SNU).
    pub x_a: f64,
    pub p_a: f64,
    /// Transmitted QPSK symbol, Gray-labelled 0..4.
    pub sym: u8,
    /// Bob's heterodyne outcomes before re-displacement.
    pub x_b: f64,
    pub p_b: f64,
    /// Symbol Bob decoded.
    pub dec: u8,
    /// Whether Alice's filter kept the pulse.
    pub acc: bool,
}

/// Quadrature signs of a Gray-labelled QPSK symbol.
pub(crate) fn symbol_signs(sym: u8) -> (f64, f64) {
    match sym & 3 {
        0 => (1.0, 1.0),
        1 => (-1.0, 1.0),
        3 => (-1.0, -1.0),
        _ => (1.0, -1.0),
    }
}

pub(crate) fn symbol_from_signs(sx: f64, sp: f64) -> u8 {
    match (sx > 0.0, sp > 0.0) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 3,
        (true, false) => 2,
    }
}

/// Per-pulse constants of the physical model.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Physics {
    pub sd_mod: f64,
    /// √(ηT): amplitude transmission to Bob's detector.
    pub amp: f64,
    /// Per-quadrature displacement `d/√2`.
    pub disp: f64,
    /// Std dev of the added noise, heterodyne vacuum included, in mode units.
    pub sd_noise: f64,
    pub g2: f64,
}

impl Physics {
    pub fn new(p: &ProtocolParams, g: f64) -> Result<Self> {
        p.validate()?;
        if !(g >= 0.0 && g.is_finite()) {
            return Err(sqcc_core::Error::Domain(format!("filter gain {g} must be finite and >= 0")).into());
        }
        let v_b = bob_variance(p, p.v())?;
        let eta_t = p.eta * p.transmittance;
        Ok(Self {
            sd_mod: p.v_mod.sqrt(),
            amp: eta_t.sqrt(),
            disp: p.displacement / SQRT_2,
            sd_noise: (v_b + 1.0 - eta_t * p.v_mod).sqrt(),
            g2: g * g,
        })
    }

    /// Mean heterodyne outcome of a `+` quadrature symbol, `α/2`.
    pub fn half_alpha(&self) -> f64 {
        self.amp * self.disp / SQRT_2
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> PulseRecord {
        let x_a = self.sd_mod * rng.sample::<f64, _>(StandardNormal);
        let p_a = self.sd_mod * rng.sample::<f64, _>(StandardNormal);
        let sym = (rng.random::<u32>() & 3) as u8;
        let (sx, sp) = symbol_signs(sym);
        let nx = self.sd_noise * rng.sample::<f64, _>(StandardNormal);
        let np = self.sd_noise * rng.sample::<f64, _>(StandardNormal);
        let x_b = (self.amp * (x_a + sx * self.disp) + nx) / SQRT_2;
        let p_b = (self.amp * (p_a + sp * self.disp) + np) / SQRT_2;
        let dec = symbol_from_signs(if x_b >= 0.0 { 1.0 } else { -1.0 }, if p_b >= 0.0 { 1.0 } else { -1.0 });
        let keep = (-self.g2 * (x_a * x_a + p_a * p_a)).exp();
        let acc = rng.random::<f64>() < keep;
        PulseRecord {
            x_a,
            p_a,
            sym,
            x_b,
            p_b,
            dec,
            acc,
        }
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Pulses `[start, end)` of chunk `i` out of [`CHUNKS`] for a block of `n`.
pub(crate) fn chunk_len(n: u64, i: u64) -> u64 {
    let start = n * i / CHUNKS;
    let end = n * (i + 1) / CHUNKS;
    end - start
}

/// Streaming iterator over the records of a block; yields exactly the pulses
/// [`crate::simulate_block`] aggregates for the same arguments.
pub struct Records {
    physics: Physics,
    seed: u64,
    n: u64,
    chunk: u64,
    left_in_chunk: u64,
    rng: ChaCha8Rng,
}

impl Iterator for Records {
    type Item = PulseRecord;

    fn next(&mut self) -> Option<PulseRecord> {
        while self.left_in_chunk == 0 {
            self.chunk += 1;
            if self.chunk >= CHUNKS {
                return None;
            }
            self.rng = chunk_rng(self.seed, self.chunk);
            self.left_in_chunk = chunk_len(self.n, self.chunk);
        }
        self.left_in_chunk -= 1;
        Some(self.physics.draw(&mut self.rng))
    }
}

pub fn pulse_records(p: &ProtocolParams, g: f64, n_pulses: u64, seed: Option<u64>) -> Result<Records> {
    let seed = seed.ok_or(OracleError::SeedRequired)?;
    Ok(Records {
        physics: Physics::new(p, g)?,
        seed,
        n: n_pulses,
        chunk: 0,
        left_in_chunk: chunk_len(n_pulses, 0),
        rng: chunk_rng(seed, 0),
    })
}

/// Classical signal-to-noise ratio of Bob's heterodyne record: squared mean
/// of the symbol-aligned outcome over its variance, times two (one
/// quadrature carries half the displacement energy), pooled over quadratures.
pub fn empirical_snr<I>(records: I) -> Result<f64>
where
    I: IntoIterator<Item = PulseRecord>,
{
    let (mut n, mut s1, mut s2) = (0u64, 0.0, 0.0);
    for r in records {
        let (sx, sp) = symbol_signs(r.sym);
        for y in [sx * r.x_b, sp * r.p_b] {
            s1 += y;
            s2 += y * y;
        }
        n += 1;
    }
    if n < MIN_SNR_RECORDS as u64 {
        return Err(OracleError::InsufficientSamples {
            got: n,
            need: MIN_SNR_RECORDS as u64,
        });
    }
    let m = s1 / (2 * n) as f64;
    let var = s2 / (2 * n) as f64 - m * m;
    Ok(2.0 * m * m / var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_labels_round_trip() {
        for sym in 0..4u8 {
            let (sx, sp) = symbol_signs(sym);
            assert_eq!(symbol_from_signs(sx, sp), sym);
        }
        // Neighbouring constellation points differ in one bit.
        for (a, b) in [(0u8, 1u8), (1, 3), (3, 2), (2, 0)] {
            assert_eq!((a ^ b).count_ones(), 1);
        }
    }

    #[test]
    fn chunks_partition_the_block() {
        for n in [0u64, 1, 63, 64, 65, 10_000, 10_000_001] {
            assert_eq!((0..CHUNKS).map(|i| chunk_len(n, i)).sum::<u64>(), n);
        }
    }

    #[test]
    fn short_record_streams_skip_empty_chunks() {
        let p = ProtocolParams {
            v_mod: 7.0,
            displacement: 60.0,
            transmittance: 0.5,
            noise: sqcc_core::ChannelNoise::Excess(0.05),
            eta: 0.95,
            v_el: 0.01,
            beta: 0.95,
        };
        assert_eq!(pulse_records(&p, 0.0, 5, Some(1)).unwrap().count(), 5);
        assert_eq!(pulse_records(&p, 0.0, 0, Some(1)).unwrap().count(), 0);
    }
}
