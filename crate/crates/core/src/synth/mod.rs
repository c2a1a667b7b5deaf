//! Synthetic data: Ricker wavelet traces and a 2D FDTD forward model for
//! radargrams.

mod fdtd;
mod model;

pub use fdtd::{fdtd_forward, simulate_trace, TraceDiagnostics};
pub use model::{
    parse_model_file, sand_void_model, ForwardModel, Material, MaterialRegion, Shape,
};

use thiserror::Error;

use crate::signal::{SignalError, Trace, MHZ_NS};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid wavelet spec: {0}")]
    InvalidSpec(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Parameters of a sampled Ricker wavelet.
#[derive(Debug, Clone, Copy)]
pub struct RickerSpec {
    /// Center frequency in MHz; the wavelet's amplitude spectrum peaks here.
    pub fc_mhz: f64,
    /// Sampling interval in ns.
    pub dt_ns: f64,
    /// Sample count.
    pub n: usize,
    /// Peak time in ns.
    pub t0_ns: f64,
}

impl Default for RickerSpec {
    /// 50 MHz wavelet sampled over a 1000 ns window with 1024 samples,
    /// peaking at 30 ns.
    fn default() -> Self {
        RickerSpec {
            fc_mhz: 50.0,
            dt_ns: 1000.0 / 1024.0,
            n: 1024,
            t0_ns: 30.0,
        }
    }
}

impl RickerSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.fc_mhz > 0.0) {
            return Err(SynthError::InvalidSpec(format!(
                "center frequency must be positive, got {}",
                self.fc_mhz
            )));
        }
        // at least 10 samples per period at fc
        let max_dt = 1.0 / (10.0 * self.fc_mhz * MHZ_NS);
        if !(self.dt_ns > 0.0 && self.dt_ns < max_dt) {
            return Err(SynthError::InvalidSpec(format!(
                "dt {} ns undersamples a {} MHz wavelet (need dt < {:.4} ns)",
                self.dt_ns, self.fc_mhz, max_dt
            )));
        }
        if self.n < 2 {
            return Err(SynthError::InvalidSpec("need at least 2 samples".into()));
        }
        if !self.t0_ns.is_finite() {
            return Err(SynthError::InvalidSpec("peak time must be finite".into()));
        }
        Ok(())
    }
}

/// Sampled Ricker wavelet `r(t) = (1 - 2 pi^2 fc^2 tau^2) exp(-pi^2 fc^2 tau^2)`
/// with `tau = t - t0`; peak amplitude is exactly 1 at `t0`.
pub fn ricker(spec: &RickerSpec) -> Result<Trace, SynthError> {
    spec.validate()?;
    let samples = (0..spec.n)
        .map(|i| {
            let tau = i as f64 * spec.dt_ns - spec.t0_ns;
            ricker_value(spec.fc_mhz, tau)
        })
        .collect();
    Ok(Trace {
        samples,
        dt: spec.dt_ns,
        t0: 0.0,
    })
}

/// Ricker amplitude at `tau` ns from the peak, for center frequency
/// `fc_mhz`.
pub fn ricker_value(fc_mhz: f64, tau_ns: f64) -> f64 {
    let u = std::f64::consts::PI * fc_mhz * MHZ_NS * tau_ns;
    let u2 = u * u;
    (1.0 - 2.0 * u2) * (-u2).exp()
}
