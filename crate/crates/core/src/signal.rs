//! Core data types: a single trace (A-scan) and a radargram (B-scan).

use thiserror::Error;

/// Conversion factor between the MHz/ns unit system and cycles:
/// `f [MHz] * t [ns] * MHZ_NS` is a phase in cycles.
pub const MHZ_NS: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A uniformly sampled real-valued time series.
///
/// `dt` is the sampling interval in nanoseconds, `t0` the time of the first
/// sample. Samples are dimensionless amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub samples: Vec<f64>,
    pub dt: f64,
    pub t0: f64,
}

impl Trace {
    /// Build a trace, checking the type invariants: at least two samples,
    /// positive `dt`, all samples finite.
    pub fn new(samples: Vec<f64>, dt: f64, t0: f64) -> Result<Self, SignalError> {
        let t = Trace { samples, dt, t0 };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if self.samples.len() < 2 {
            return Err(SignalError::InvalidInput(format!(
                "trace needs at least 2 samples, got {}",
                self.samples.len()
            )));
        }
        if !(self.dt > 0.0) {
            return Err(SignalError::InvalidInput(format!(
                "sampling interval must be positive, got {}",
                self.dt
            )));
        }
        if let Some(i) = self.samples.iter().position(|s| !s.is_finite()) {
            return Err(SignalError::InvalidInput(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of sample `i` in ns.
    pub fn time_at(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Nyquist frequency in MHz.
    pub fn nyquist_mhz(&self) -> f64 {
        0.5 / (self.dt * MHZ_NS)
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    /// Same time axis, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Trace {
        debug_assert_eq!(samples.len(), self.samples.len());
        Trace {
            samples,
            dt: self.dt,
            t0: self.t0,
        }
    }
}

/// An ordered collection of equal-length traces sharing one sampling
/// interval, spaced `dx` metres apart along the survey line.
#[derive(Debug, Clone, PartialEq)]
pub struct Radargram {
    pub traces: Vec<Trace>,
    pub dx: f64,
}

impl Radargram {
    pub fn new(traces: Vec<Trace>, dx: f64) -> Result<Self, SignalError> {
        if traces.is_empty() {
            return Err(SignalError::InvalidInput(
                "radargram needs at least one trace".into(),
            ));
        }
        let len = traces[0].len();
        let dt = traces[0].dt;
        for (i, t) in traces.iter().enumerate() {
            t.validate()?;
            if t.len() != len {
                return Err(SignalError::InvalidInput(format!(
                    "trace {i} has {} samples, expected {len}",
                    t.len()
                )));
            }
            if t.dt != dt {
                return Err(SignalError::InvalidInput(format!(
                    "trace {i} has dt {}, expected {dt}",
                    t.dt
                )));
            }
        }
        Ok(Radargram { traces, dx })
    }

    pub fn trace_count(&self) -> usize {
        self.traces.len()
    }

    pub fn samples_per_trace(&self) -> usize {
        self.traces.first().map_or(0, |t| t.len())
    }

    pub fn dt(&self) -> f64 {
        self.traces.first().map_or(0.0, |t| t.dt)
    }

    /// All samples, trace-major.
    pub fn flat_samples(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.trace_count() * self.samples_per_trace());
        for t in &self.traces {
            out.extend_from_slice(&t.samples);
        }
        out
    }

    pub fn energy(&self) -> f64 {
        self.traces.iter().map(|t| t.energy()).sum()
    }
}

/// Sum of squared values.
pub fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Pearson correlation coefficient. Returns 0 when either input has zero
/// variance.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// Population standard deviation.
pub fn std_dev(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_rejects_short_and_nonfinite() {
        assert!(Trace::new(vec![1.0], 1.0, 0.0).is_err());
        assert!(Trace::new(vec![1.0, f64::NAN], 1.0, 0.0).is_err());
        assert!(Trace::new(vec![1.0, 2.0], 0.0, 0.0).is_err());
        assert!(Trace::new(vec![1.0, 2.0], 1.0, 0.0).is_ok());
    }

    #[test]
    fn radargram_requires_consistent_traces() {
        let a = Trace::new(vec![1.0, 2.0, 3.0], 1.0, 0.0).unwrap();
        let b = Trace::new(vec![1.0, 2.0], 1.0, 0.0).unwrap();
        assert!(Radargram::new(vec![a.clone(), b], 1.0).is_err());
        let c = Trace::new(vec![1.0, 2.0, 3.0], 2.0, 0.0).unwrap();
        assert!(Radargram::new(vec![a.clone(), c], 1.0).is_err());
        assert!(Radargram::new(vec![], 1.0).is_err());
        assert!(Radargram::new(vec![a.clone(), a], 1.0).is_ok());
    }

    #[test]
    fn correlation_of_identical_is_one() {
        let x = vec![1.0, -2.0, 3.5, 0.2];
        assert!((correlation(&x, &x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nyquist_units() {
        // dt = 1 ns -> Nyquist 500 MHz
        let t = Trace::new(vec![0.0; 8], 1.0, 0.0).unwrap();
        assert!((t.nyquist_mhz() - 500.0).abs() < 1e-12);
    }
}
