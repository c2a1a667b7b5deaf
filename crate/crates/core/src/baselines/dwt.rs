//! Discrete-wavelet-transform de-noising with the universal threshold.

use super::BaselineError;
use crate::signal::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wavelet {
    Haar,
    /// Daubechies wavelet with four vanishing moments (8 taps).
    Db4,
}

impl Wavelet {
    /// Low-pass (scaling) decomposition filter.
    fn scaling_filter(&self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &[std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
            Wavelet::Db4 => &[
                -0.010597401784997278,
                0.032883011666982945,
                0.030841381835986965,
                -0.18703481171888114,
                -0.027983769416983849,
                0.6308807679295904,
                0.7148465705525415,
                0.23037781330885523,
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    Soft,
    Hard,
}

#[derive(Debug, Clone, Copy)]
pub struct DwtConfig {
    pub wavelet: Wavelet,
    pub levels: usize,
    pub mode: ThresholdMode,
}

impl Default for DwtConfig {
    fn default() -> Self {
        DwtConfig {
            wavelet: Wavelet::Db4,
            levels: 4,
            mode: ThresholdMode::Soft,
        }
    }
}

/// High-pass filter from the low-pass by the alternating flip
/// `g[k] = (-1)^k h[L-1-k]`.
fn wavelet_filter(h: &[f64]) -> Vec<f64> {
    let l = h.len();
    (0..l)
        .map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] })
        .collect()
}

/// Multi-level periodized DWT. The input length must be divisible by
/// `2^levels`. `details[0]` is the finest scale.
pub fn dwt_forward(
    x: &[f64],
    wavelet: Wavelet,
    levels: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), BaselineError> {
    if levels < 1 {
        return Err(BaselineError::InvalidInput("levels must be >= 1".into()));
    }
    if x.len() % (1 << levels) != 0 || x.is_empty() {
        return Err(BaselineError::InvalidInput(format!(
            "length {} is not divisible by 2^{levels}",
            x.len()
        )));
    }
    let h = wavelet.scaling_filter();
    let g = wavelet_filter(h);
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analysis_step(&approx, h, &g);
        details.push(d);
        approx = a;
    }
    Ok((approx, details))
}

/// Inverse of [`dwt_forward`].
pub fn dwt_inverse(approx: &[f64], details: &[Vec<f64>], wavelet: Wavelet) -> Vec<f64> {
    let h = wavelet.scaling_filter();
    let g = wavelet_filter(h);
    let mut current = approx.to_vec();
    for d in details.iter().rev() {
        current = synthesis_step(&current, d, h, &g);
    }
    current
}

/// `a[k] = sum_j h[j] x[(2k - j) mod N]`, likewise for the detail.
fn analysis_step(x: &[f64], h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (j, (&hj, &gj)) in h.iter().zip(g).enumerate() {
            let idx = (2 * k + n - (j % n)) % n;
            a += hj * x[idx];
            d += gj * x[idx];
        }
        approx[k] = a;
        detail[k] = d;
    }
    (approx, detail)
}

/// Transpose of the analysis step: scatter each coefficient pair back to
/// `(2k - j) mod N`.
fn synthesis_step(approx: &[f64], detail: &[f64], h: &[f64], g: &[f64]) -> Vec<f64> {
    let half = approx.len();
    let n = half * 2;
    let mut out = vec![0.0; n];
    for k in 0..half {
        for (j, (&hj, &gj)) in h.iter().zip(g).enumerate() {
            let idx = (2 * k + n - (j % n)) % n;
            out[idx] += hj * approx[k] + gj * detail[k];
        }
    }
    out
}

/// De-noise by thresholding every detail level with the universal
/// threshold `sigma * sqrt(2 ln n)`, `sigma` estimated from the finest
/// details as `median(|d|)/0.6745`. The approximation band passes through
/// untouched. Arbitrary lengths are handled by symmetric padding, trimmed
/// after reconstruction.
pub fn dwt_denoise(t: &Trace, cfg: &DwtConfig) -> Result<Trace, BaselineError> {
    t.validate()?;
    let n = t.len();
    if cfg.levels < 1 || (1usize << cfg.levels) > n {
        return Err(BaselineError::InvalidInput(format!(
            "{} levels exceed log2({n})",
            cfg.levels
        )));
    }
    let padded = pad_symmetric(&t.samples, 1 << cfg.levels);
    let (approx, details) = dwt_forward(&padded, cfg.wavelet, cfg.levels)?;

    let sigma = {
        let mut abs: Vec<f64> = details[0].iter().map(|v| v.abs()).collect();
        abs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = abs.len() / 2;
        let median = if abs.len() % 2 == 0 {
            0.5 * (abs[mid - 1] + abs[mid])
        } else {
            abs[mid]
        };
        median / 0.6745
    };
    let threshold = sigma * (2.0 * (n as f64).ln()).sqrt();

    let thresholded: Vec<Vec<f64>> = details
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|&c| match cfg.mode {
                    ThresholdMode::Hard => {
                        if c.abs() >= threshold {
                            c
                        } else {
                            0.0
                        }
                    }
                    ThresholdMode::Soft => {
                        if c.abs() >= threshold {
                            c.signum() * (c.abs() - threshold)
                        } else {
                            0.0
                        }
                    }
                })
                .collect()
        })
        .collect();

    let mut out = dwt_inverse(&approx, &thresholded, cfg.wavelet);
    out.truncate(n);
    Ok(t.with_samples(out))
}

fn pad_symmetric(x: &[f64], multiple: usize) -> Vec<f64> {
    let n = x.len();
    let target = n.div_ceil(multiple) * multiple;
    let mut out = x.to_vec();
    for k in 0..target - n {
        out.push(x[n - 1 - (k % n)]);
    }
    out
}
