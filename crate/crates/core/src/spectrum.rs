//! Spectral primitives: DFT, analytic signal, mirror boundary extension.
//!
//! DFT convention: forward transform uses `e^{-j omega t}` and is
//! unnormalized; the inverse carries the `1/n` factor. Arbitrary (not just
//! power-of-two) lengths are supported.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::signal::{SignalError, Trace, MHZ_NS};

/// Full two-sided spectrum of a trace. `bins.len() == n`, bin spacing `df`
/// in MHz. `t0` carries the source trace's start time through round trips.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub bins: Vec<Complex64>,
    pub df: f64,
    pub n: usize,
    pub t0: f64,
}

pub(crate) fn fft_forward(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

pub(crate) fn fft_inverse(bins: &[Complex64]) -> Vec<Complex64> {
    let mut buf = bins.to_vec();
    FftPlanner::new()
        .plan_fft_inverse(buf.len())
        .process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Forward DFT of a trace. `df = 1/(n*dt)`, converted to MHz.
pub fn forward_spectrum(t: &Trace) -> Result<Spectrum, SignalError> {
    t.validate()?;
    let n = t.len();
    let bins = fft_forward(&t.samples);
    let df = 1.0 / (n as f64 * t.dt * MHZ_NS);
    Ok(Spectrum {
        bins,
        df,
        n,
        t0: t.t0,
    })
}

/// Inverse DFT back to a real trace.
///
/// The reconstruction must be real: if the imaginary residue exceeds 1e-10
/// of the signal norm the spectrum is not conjugate-symmetric and an error
/// is returned. Otherwise the residue is discarded.
pub fn inverse_spectrum(s: &Spectrum) -> Result<Trace, SignalError> {
    if s.bins.len() != s.n {
        return Err(SignalError::InvalidInput(format!(
            "spectrum has {} bins but declares n = {}",
            s.bins.len(),
            s.n
        )));
    }
    if s.n < 2 || !(s.df > 0.0) {
        return Err(SignalError::InvalidInput(
            "spectrum needs n >= 2 and positive df".into(),
        ));
    }
    let time = fft_inverse(&s.bins);
    let norm: f64 = time.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let imag: f64 = time.iter().map(|v| v.im * v.im).sum::<f64>().sqrt();
    if imag > 1e-10 * norm {
        return Err(SignalError::InvalidInput(format!(
            "inverse transform is not real (imaginary residue {:.3e} of norm {:.3e}); \
             spectrum lacks conjugate symmetry",
            imag, norm
        )));
    }
    let dt = 1.0 / (s.n as f64 * s.df * MHZ_NS);
    Ok(Trace {
        samples: time.iter().map(|v| v.re).collect(),
        dt,
        t0: s.t0,
    })
}

/// Analytic signal via the frequency domain: negative-frequency bins are
/// zeroed, positive bins doubled, DC and Nyquist kept as-is. The real part
/// of the result equals the input.
pub fn analytic_signal(t: &Trace) -> Result<Vec<Complex64>, SignalError> {
    t.validate()?;
    let n = t.len();
    if n < 4 {
        return Err(SignalError::InvalidInput(format!(
            "analytic signal needs at least 4 samples, got {n}"
        )));
    }
    let mut bins = fft_forward(&t.samples);
    let half = n / 2;
    for (i, b) in bins.iter_mut().enumerate() {
        if i == 0 || (n % 2 == 0 && i == half) {
            // DC and Nyquist unchanged
        } else if i < half || (n % 2 == 1 && i == half) {
            *b *= 2.0;
        } else {
            *b = Complex64::new(0.0, 0.0);
        }
    }
    Ok(fft_inverse(&bins))
}

/// Mirror extension to twice the length: the first half is reflected in
/// front, the second half reflected behind, original centered. For odd
/// lengths the front gets `floor(n/2)` samples and the back the remaining
/// `ceil(n/2)`.
pub fn mirror_extend(t: &Trace) -> Trace {
    let n = t.len();
    let left = n / 2;
    let right = n - left;
    let mut out = Vec::with_capacity(2 * n);
    out.extend(t.samples[..left].iter().rev());
    out.extend_from_slice(&t.samples);
    out.extend(t.samples[n - right..].iter().rev());
    Trace {
        samples: out,
        dt: t.dt,
        t0: t.t0 - left as f64 * t.dt,
    }
}

/// Undo [`mirror_extend`]: take the centered `original_len` samples back
/// out of an extended trace.
pub fn trim_mirror(extended: &Trace, original_len: usize) -> Trace {
    let left = original_len / 2;
    Trace {
        samples: extended.samples[left..left + original_len].to_vec(),
        dt: extended.dt,
        t0: extended.t0 + left as f64 * extended.dt,
    }
}
