//! Prepare-and-measure Monte Carlo simulation of the SQCC protocol.
//!
//! Alice draws Gaussian symbols and a QPSK classical symbol, the pulse
//! crosses a thermal-loss channel into a noisy heterodyne receiver, Bob
//! decodes the classical symbol by quadrature sign, re-displaces by what he
//! decoded, rescales, and Alice's Gaussian filter accepts or rejects the
//! pulse. Empirical moments of the resulting records are the ground truth the
//! analytic model is checked against.

// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod block;
mod dump;
mod pulse;

pub use block::{simulate_block, simulate_block_with, BlockReport, Estimate, SimOptions};
pub use dump::write_records_csv;
pub use pulse::{empirical_snr, pulse_records, PulseRecord, Records};

use thiserror::Error;

/// Minimum pulses per simulated block.
pub const MIN_BLOCK_PULSES: u64 = 10_000;
/// Minimum records for [`empirical_snr`].
pub const MIN_SNR_RECORDS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("a seed is required for reproducible simulation")]
    SeedRequired,
    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: u64, need: u64 },
    #[error(transparent)]
    Model(#[from] sqcc_core::Error),
}

pub type Result<T> = std::result::Result<T, OracleError>;
