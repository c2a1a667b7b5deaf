//! Variational mode decomposition.
//!
//! A trace is decomposed into `K` band-limited modes by minimizing the sum
//! of the modes' bandwidths subject to the modes reconstructing the input.
//! The solver works in the frequency domain on the one-sided (analytic)
//! spectrum and alternates three updates until the modes stop moving:
//!
//! * mode:   `u_k <- (f - sum_{i!=k} u_i + lambda/2) / (1 + 2 alpha (nu - omega_k)^2)`
//! * centre: `omega_k <- sum(nu |u_k|^2) / sum(|u_k|^2)` over positive frequencies
//! * dual:   `lambda <- lambda + tau (f - sum_k u_k)`
//!
//! `alpha` is defined against normalized frequency (cycles per sample), so
//! the same value behaves identically regardless of the sampling interval.
//! The input is mirror-extended before the solve and trimmed afterwards to
//! suppress endpoint leakage.

use num_complex::Complex64;
use thiserror::Error;

use crate::rng;
use crate::signal::{SignalError, Trace, MHZ_NS};
use crate::spectrum::{fft_forward, fft_inverse, mirror_extend, trim_mirror};

#[derive(Debug, Error)]
pub enum VmdError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Center-frequency initialization policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaInit {
    /// Evenly spread over `[0, Nyquist/2]`.
    Uniform,
    /// All centers start at zero.
    Zero,
    /// Seeded uniform draws over `[0, Nyquist/2]`, sorted ascending.
    Random(u64),
}

#[derive(Debug, Clone)]
pub struct VmdConfig {
    /// Number of modes K.
    pub modes: usize,
    /// Bandwidth penalty; larger means narrower modes.
    pub alpha: f64,
    /// Dual ascent step. 0 disables the reconstruction constraint
    /// (noise-robust, the right choice for de-noising).
    pub tau: f64,
    /// Stop when the summed relative change of the modes drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub omega_init: OmegaInit,
}

impl Default for VmdConfig {
    fn default() -> Self {
        VmdConfig {
            modes: 4,
            alpha: 2000.0,
            tau: 0.0,
            tol: 1e-7,
            max_iter: 500,
            omega_init: OmegaInit::Uniform,
        }
    }
}

impl VmdConfig {
    pub fn validate(&self) -> Result<(), VmdError> {
        if self.modes < 1 {
            return Err(VmdError::InvalidConfig("modes must be >= 1".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(VmdError::InvalidConfig(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.tau >= 0.0) {
            return Err(VmdError::InvalidConfig(format!(
                "tau must be non-negative, got {}",
                self.tau
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(VmdError::InvalidConfig(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(VmdError::InvalidConfig("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Decomposition output. Modes are sorted by ascending center frequency and
/// live on the same grid as the input; `residual` is defined so that
/// `input = sum(modes) + residual` sample for sample.
#[derive(Debug, Clone)]
pub struct VmdResult {
    pub modes: Vec<Trace>,
    /// Center frequencies in MHz, ascending, each in `[0, Nyquist]`.
    pub omegas_mhz: Vec<f64>,
    pub residual: Trace,
    pub iterations: usize,
    pub converged: bool,
    /// Relative mode change at the last iteration.
    pub final_change: f64,
}

impl VmdResult {
    /// Sum of all modes.
    pub fn reconstruction(&self) -> Trace {
        let mut samples = vec![0.0; self.residual.len()];
        for m in &self.modes {
            for (s, v) in samples.iter_mut().zip(&m.samples) {
                *s += v;
            }
        }
        self.residual.with_samples(samples)
    }
}

/// Per-iteration snapshot handed to the observer of
/// [`decompose_observed`]. Mode iterates are reported on the solver's
/// internal mirror-extended grid.
#[derive(Debug, Clone)]
pub struct VmdIterate {
    pub iteration: usize,
    pub omegas_mhz: Vec<f64>,
    pub modes_extended: Vec<Vec<f64>>,
    /// `sum_k ||u_k - u_k_prev||^2 / ||u_k_prev||^2`.
    pub mode_change: f64,
    /// `||f - sum u_k|| / ||f||` over the one-sided spectrum.
    pub residual_ratio: f64,
}

/// Decompose a trace into `cfg.modes` band-limited modes.
///
/// A zero-energy input short-circuits to all-zero modes with
/// `converged = true`. Hitting `max_iter` is reported via
/// `converged = false`, not as an error.
pub fn decompose(t: &Trace, cfg: &VmdConfig) -> Result<VmdResult, VmdError> {
    decompose_observed(t, cfg, |_| {})
}

/// [`decompose`] with a per-iteration observer, for convergence diagnostics.
pub fn decompose_observed(
    t: &Trace,
    cfg: &VmdConfig,
    mut observer: impl FnMut(&VmdIterate),
) -> Result<VmdResult, VmdError> {
    t.validate()?;
    cfg.validate()?;

    let k = cfg.modes;
    let mut omega = init_omegas(cfg, k);

    if t.energy() == 0.0 {
        let zero = t.with_samples(vec![0.0; t.len()]);
        let omegas_mhz: Vec<f64> = omega.iter().map(|nu| nu / (t.dt * MHZ_NS)).collect();
        return Ok(VmdResult {
            modes: vec![zero.clone(); k],
            omegas_mhz,
            residual: zero,
            iterations: 0,
            converged: true,
            final_change: 0.0,
        });
    }

    let extended = mirror_extend(t);
    let n_ext = extended.len();
    let half = n_ext / 2;
    let f_full = fft_forward(&extended.samples);
    let f_plus: Vec<Complex64> = f_full[..=half].to_vec();
    let freqs: Vec<f64> = (0..=half).map(|i| i as f64 / n_ext as f64).collect();
    let f_norm: f64 = f_plus.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();

    let mut u = vec![vec![Complex64::new(0.0, 0.0); half + 1]; k];
    let mut u_prev = u.clone();
    let mut lambda = vec![Complex64::new(0.0, 0.0); half + 1];
    let mut sum_u = vec![Complex64::new(0.0, 0.0); half + 1];

    let mut iterations = 0;
    let mut converged = false;
    let mut change = f64::INFINITY;

    for iter in 0..cfg.max_iter {
        for (pk, uk) in u_prev.iter_mut().zip(&u) {
            pk.copy_from_slice(uk);
        }

        for ki in 0..k {
            let wk = omega[ki];
            let mut weighted = 0.0;
            let mut power = 0.0;
            for i in 0..=half {
                let others = sum_u[i] - u[ki][i];
                let num = f_plus[i] - others + lambda[i] * 0.5;
                let d = freqs[i] - wk;
                let new = num * (1.0 / (1.0 + 2.0 * cfg.alpha * d * d));
                sum_u[i] += new - u[ki][i];
                u[ki][i] = new;
                let p = new.norm_sqr();
                weighted += freqs[i] * p;
                power += p;
            }
            if power > 1e-300 {
                omega[ki] = weighted / power;
            }
        }

        if cfg.tau > 0.0 {
            for i in 0..=half {
                lambda[i] += (f_plus[i] - sum_u[i]) * cfg.tau;
            }
        }

        change = 0.0;
        for ki in 0..k {
            let mut diff = 0.0;
            let mut prev = 0.0;
            for i in 0..=half {
                diff += (u[ki][i] - u_prev[ki][i]).norm_sqr();
                prev += u_prev[ki][i].norm_sqr();
            }
            if prev > 0.0 {
                change += diff / prev;
            }
        }

        iterations = iter + 1;

        observer(&VmdIterate {
            iteration: iterations,
            omegas_mhz: omega.iter().map(|nu| nu / (t.dt * MHZ_NS)).collect(),
            modes_extended: (0..k).map(|ki| one_sided_to_time(&u[ki], n_ext)).collect(),
            mode_change: change,
            residual_ratio: {
                let r: f64 = f_plus
                    .iter()
                    .zip(&sum_u)
                    .map(|(f, s)| (f - s).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                r / f_norm
            },
        });

        if iter > 0 && change < cfg.tol {
            converged = true;
            break;
        }
    }

    // Sort modes by ascending center frequency, then trim back to the
    // original grid.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| omega[a].partial_cmp(&omega[b]).unwrap());

    let n = t.len();
    let mut modes = Vec::with_capacity(k);
    let mut omegas_mhz = Vec::with_capacity(k);
    for &ki in &order {
        let time = one_sided_to_time(&u[ki], n_ext);
        let ext_trace = Trace {
            samples: time,
            dt: extended.dt,
            t0: extended.t0,
        };
        modes.push(trim_mirror(&ext_trace, n));
        omegas_mhz.push(omega[ki] / (t.dt * MHZ_NS));
    }

    // residual is defined as input minus the mode sum, computed with the
    // same summation order `reconstruction()` uses
    let mut mode_sum = vec![0.0; n];
    for m in &modes {
        for (s, v) in mode_sum.iter_mut().zip(&m.samples) {
            *s += v;
        }
    }
    let residual: Vec<f64> = t
        .samples
        .iter()
        .zip(&mode_sum)
        .map(|(x, s)| x - s)
        .collect();

    Ok(VmdResult {
        modes,
        omegas_mhz,
        residual: t.with_samples(residual),
        iterations,
        converged,
        final_change: change,
    })
}

/// The closed-form first mode iterate for `K = 1`, `lambda = 0`,
/// `omega_1 = 0`: the inverse transform of `f_hat(nu) / (1 + 2 alpha nu^2)`.
///
/// Exposes the Wiener-filter structure of the mode update on the raw
/// (unextended) spectrum of the input.
pub fn single_mode_first_step(t: &Trace, alpha: f64) -> Result<Trace, VmdError> {
    t.validate()?;
    if !(alpha > 0.0) {
        return Err(VmdError::InvalidConfig(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let n = t.len();
    let mut bins = fft_forward(&t.samples);
    for (i, b) in bins.iter_mut().enumerate() {
        let nu = signed_freq(i, n);
        *b *= 1.0 / (1.0 + 2.0 * alpha * nu * nu);
    }
    let time = fft_inverse(&bins);
    Ok(t.with_samples(time.iter().map(|v| v.re).collect()))
}

/// Signed normalized frequency of DFT bin `i` for length `n`.
fn signed_freq(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64 / n as f64
    } else {
        i as f64 / n as f64 - 1.0
    }
}

fn init_omegas(cfg: &VmdConfig, k: usize) -> Vec<f64> {
    match cfg.omega_init {
        OmegaInit::Uniform => (0..k).map(|i| 0.25 * i as f64 / k as f64).collect(),
        OmegaInit::Zero => vec![0.0; k],
        OmegaInit::Random(seed) => {
            let mut r = rng::seeded(seed);
            let mut v: Vec<f64> = (0..k)
                .map(|_| {
                    use rand::Rng;
                    r.gen_range(0.0..0.25)
                })
                .collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        }
    }
}

/// Rebuild a real time-domain signal from a one-sided spectrum by conjugate
/// symmetrization.
fn one_sided_to_time(u_plus: &[Complex64], n: usize) -> Vec<f64> {
    let half = n / 2;
    debug_assert_eq!(u_plus.len(), half + 1);
    let mut full = vec![Complex64::new(0.0, 0.0); n];
    full[0] = u_plus[0];
    for i in 1..half {
        full[i] = u_plus[i];
        full[n - i] = u_plus[i].conj();
    }
    full[half] = u_plus[half];
    fft_inverse(&full).iter().map(|v| v.re).collect()
}
