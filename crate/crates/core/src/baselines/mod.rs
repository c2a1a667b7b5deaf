//! Comparison de-noisers: ensemble empirical mode decomposition and
//! discrete-wavelet thresholding.

mod dwt;
mod emd;

pub use dwt::{dwt_denoise, dwt_forward, dwt_inverse, DwtConfig, ThresholdMode, Wavelet};
pub use emd::{eemd_denoise, emd, EemdReport, EmdConfig, EmdResult};

use thiserror::Error;

use crate::denoise::DenoiseError;
use crate::signal::SignalError;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Denoise(#[from] DenoiseError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}
