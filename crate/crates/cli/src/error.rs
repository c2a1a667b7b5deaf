//! Mapping from library errors onto the CLI's exit-code classes.

use std::fmt;

use gpr_core::baselines::BaselineError;
use gpr_core::denoise::DenoiseError;
use gpr_core::entropy::EntropyError;
use gpr_core::eval::EvalError;
use gpr_core::io::IoError;
use gpr_core::signal::SignalError;
use gpr_core::synth::SynthError;
use gpr_core::vmd::VmdError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag values. Exit 1.
    Usage(String),
    /// Unreadable, corrupt or inconsistent data. Exit 2.
    Data(String),
    /// The numerics refused: empty mode selection, undefined statistic.
    /// Exit 3.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SignalError> for CliError {
    fn from(e: SignalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::InvalidSpec(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<VmdError> for CliError {
    fn from(e: VmdError) -> Self {
        match e {
            VmdError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            VmdError::Signal(inner) => inner.into(),
        }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        match e {
            EntropyError::InvalidInput(_) => CliError::Usage(e.to_string()),
            EntropyError::Undefined => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<DenoiseError> for CliError {
    fn from(e: DenoiseError) -> Self {
        match e {
            DenoiseError::EmptySelection { .. } => CliError::Numeric(e.to_string()),
            DenoiseError::Vmd(inner) => inner.into(),
            DenoiseError::Entropy(inner) => inner.into(),
            DenoiseError::Signal(inner) => inner.into(),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::InvalidInput(_) => CliError::Usage(e.to_string()),
            BaselineError::Denoise(inner) => inner.into(),
            BaselineError::Signal(inner) => inner.into(),
        }
    }
}
