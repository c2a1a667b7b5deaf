//! Signal-decomposition and de-noising toolkit for ground-penetrating-radar
//! traces and radargrams.
//!
//! The centrepiece is a frequency-domain variational mode decomposition
//! solver ([`vmd`]) combined with sample-entropy mode gating ([`entropy`],
//! [`denoise`]): a noisy trace is split into narrow-band modes, modes whose
//! sample entropy stays below a threshold are kept, and their sum is the
//! de-noised trace. Around that sit synthetic data generators ([`synth`]:
//! Ricker wavelets and a 2D FDTD forward model), reference de-noisers for
//! comparison ([`baselines`]: EEMD and wavelet thresholding), an SNR
//! evaluation harness ([`eval`]) and file formats plus B-scan rendering
//! ([`io`]).
//!
//! Unit conventions used throughout: time in nanoseconds, frequency in
//! megahertz, distance in metres. Amplitudes are dimensionless.

pub mod baselines;
pub mod denoise;
pub mod entropy;
pub mod eval;
pub mod io;
pub mod signal;
pub mod spectrum;
pub mod synth;
pub mod vmd;

mod rng;

pub use denoise::{DenoiseConfig, DenoiseReport, GateConfig, Strategy};
pub use entropy::{SampEnParams, Tolerance};
pub use eval::{SnrMeasure, SnrOutcome};
pub use signal::{Radargram, Trace};
pub use spectrum::Spectrum;
pub use synth::{ForwardModel, RickerSpec};
pub use vmd::{VmdConfig, VmdResult};
