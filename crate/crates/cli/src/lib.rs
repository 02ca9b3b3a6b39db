//! Experiment drivers behind the `sqcc` binary: configuration loading,
//! key-rate sweeps, duty-cycle summaries and the Monte Carlo agreement suite.
//! Every driver returns a [`Table`] that is written out as CSV.

// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod duty;
pub mod presets;
pub mod sweep;
pub mod validate;

use std::io::Write;

use sqcc_oracle::OracleError;
use thiserror::Error;

pub use config::RunConfig;
pub use duty::run_duty_cycle;
pub use presets::load_config;
pub use sweep::{run_point, run_sweep};
pub use validate::{run_mc_validation, McReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] sqcc_core::Error),
    #[error(transparent)]
    Oracle(OracleError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Model(m) => CliError::Model(m),
            other => CliError::Oracle(other),
        }
    }
}

impl CliError {
    /// Process exit code: 2 for bad input, 3 for a failed validation, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Oracle(OracleError::SeedRequired | OracleError::InsufficientSamples { .. }) => 2,
            CliError::Model(sqcc_core::Error::InvalidParameter { .. } | sqcc_core::Error::NonFiniteInput(_)) => 2,
            CliError::Validation(_) => 3,
            _ => 1,
        }
    }
}

/// Header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Column parsed back to numbers.
    pub fn numeric(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip form, so equal values always print equally.
/// Very small or large magnitudes use exponent notation.
pub(crate) fn fmt(x: f64) -> String {
    let m = x.abs();
    if m != 0.0 && m.is_finite() && !(1e-5..1e16).contains(&m) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}
