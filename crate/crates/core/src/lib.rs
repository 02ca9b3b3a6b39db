//! Key-rate analysis for continuous-variable QKD with a superposed quantum
//! and classical channel (SQCC): Gaussian state algebra, the SQCC noise
//! model, Gaussian post-selection, asymptotic and finite-size key rates, and
//! fibre or satellite link models.

// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod finite_size;
pub mod gaussian;
pub mod keyrate;
pub mod optimize;
pub mod postselection;
pub mod special;
pub mod sqcc;

pub use error::{Error, Result};
pub use finite_size::{finite_size_key_rate, FiniteSizeParams};
pub use gaussian::{SymplecticSpectrum, TwoModeCm};
pub use keyrate::{
    asymptotic_key_rate, optimize_gain, optimize_modulation_variance, KeyRateReport,
    OptimizerSettings, SecurityModel,
};
pub use postselection::{post_selected_pipeline, PostSelected};
pub use sqcc::{ChannelNoise, ProtocolParams, SqccDerived};
