//! Empirical mode decomposition by sifting, and its noise-assisted
//! ensemble variant with the entropy gate on top.

use rayon::prelude::*;

use super::BaselineError;
use crate::denoise::{gate_components, GateConfig};
use crate::rng;
use crate::signal::{std_dev, Trace};

#[derive(Debug, Clone)]
pub struct EmdConfig {
    /// Cap on the number of IMFs; `None` means `floor(log2 n)`.
    pub max_imfs: Option<usize>,
    /// Sifting stops once the relative change between successive sifts
    /// drops below this.
    pub sift_stop: f64,
    /// Sifting iterations allowed per IMF.
    pub max_sifts: usize,
    /// Ensemble members for [`eemd_denoise`].
    pub ensemble_size: usize,
    /// Ensemble noise level as a fraction of the input's standard
    /// deviation.
    pub ensemble_noise_std: f64,
    pub seed: u64,
}

impl Default for EmdConfig {
    fn default() -> Self {
        EmdConfig {
            max_imfs: None,
            sift_stop: 0.2,
            max_sifts: 10,
            ensemble_size: 100,
            ensemble_noise_std: 0.2,
            seed: 0,
        }
    }
}

impl EmdConfig {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if !(self.sift_stop > 0.0 && self.sift_stop < 1.0) {
            return Err(BaselineError::InvalidInput(format!(
                "sift_stop must lie in (0, 1), got {}",
                self.sift_stop
            )));
        }
        if self.max_sifts < 1 {
            return Err(BaselineError::InvalidInput("max_sifts must be >= 1".into()));
        }
        if self.ensemble_size < 1 {
            return Err(BaselineError::InvalidInput(
                "ensemble_size must be >= 1".into(),
            ));
        }
        if !(self.ensemble_noise_std >= 0.0) {
            return Err(BaselineError::InvalidInput(
                "ensemble_noise_std must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// IMFs ordered fastest first, plus the leftover trend.
#[derive(Debug, Clone)]
pub struct EmdResult {
    pub imfs: Vec<Trace>,
    pub residue: Trace,
}

/// Decompose by sifting: cubic-spline envelopes through the maxima and
/// minima are averaged and subtracted until the candidate stabilizes, then
/// the accepted IMF is peeled off. Stops once the residue is monotonic,
/// has too few extrema, or the IMF cap is reached. An input with fewer
/// than four interior extrema comes back untouched as the residue.
pub fn emd(t: &Trace, cfg: &EmdConfig) -> Result<EmdResult, BaselineError> {
    t.validate()?;
    cfg.validate()?;
    let n = t.len();
    let cap = cfg
        .max_imfs
        .unwrap_or_else(|| (n as f64).log2().floor() as usize);

    let mut residue = t.samples.clone();
    let mut imfs = Vec::new();
    while imfs.len() < cap {
        let (maxima, minima) = find_extrema(&residue);
        if maxima.len() < 2 || minima.len() < 2 || maxima.len() + minima.len() < 4 {
            break;
        }
        let imf = sift(&residue, cfg);
        for (r, v) in residue.iter_mut().zip(&imf) {
            *r -= v;
        }
        imfs.push(t.with_samples(imf));
        if is_monotonic(&residue) {
            break;
        }
    }
    Ok(EmdResult {
        imfs,
        residue: t.with_samples(residue),
    })
}

/// Gate verdict over the averaged ensemble components, ordered by
/// ascending frequency content (residue first, fastest IMF last).
#[derive(Debug, Clone)]
pub struct EemdReport {
    pub entropies: Vec<f64>,
    pub retained: Vec<bool>,
    /// Number of averaged IMF ranks (the residue adds one more component).
    pub imf_ranks: usize,
}

/// Ensemble EMD de-noising: EMD runs on `ensemble_size` noise-perturbed
/// copies of the input, IMFs are averaged rank-wise (missing ranks count
/// as zero), and the averaged components pass through the same sample-
/// entropy gate as the VMD pipeline. The output is the sum of the retained
/// components.
///
/// Member noise comes from independent substreams of `cfg.seed`, so the
/// result does not depend on scheduling order.
pub fn eemd_denoise(
    t: &Trace,
    cfg: &EmdConfig,
    gate: &GateConfig,
) -> Result<(Trace, EemdReport), BaselineError> {
    t.validate()?;
    cfg.validate()?;
    let n = t.len();
    let noise_scale = cfg.ensemble_noise_std * std_dev(&t.samples);

    let members: Vec<EmdResult> = (0..cfg.ensemble_size)
        .into_par_iter()
        .map(|member| {
            let input = if noise_scale > 0.0 {
                let mut r = rng::seeded_stream(cfg.seed, member as u64);
                let noise = rng::normal_vec(&mut r, n);
                t.with_samples(
                    t.samples
                        .iter()
                        .zip(&noise)
                        .map(|(x, w)| x + noise_scale * w)
                        .collect(),
                )
            } else {
                t.clone()
            };
            emd(&input, cfg)
        })
        .collect::<Result<_, _>>()?;

    let ranks = members.iter().map(|m| m.imfs.len()).max().unwrap_or(0);
    let inv = 1.0 / cfg.ensemble_size as f64;
    let mut avg_imfs = vec![vec![0.0; n]; ranks];
    let mut avg_residue = vec![0.0; n];
    for member in &members {
        for (rank, imf) in member.imfs.iter().enumerate() {
            for (a, v) in avg_imfs[rank].iter_mut().zip(&imf.samples) {
                *a += v;
            }
        }
        for (a, v) in avg_residue.iter_mut().zip(&member.residue.samples) {
            *a += v;
        }
    }
    for imf in avg_imfs.iter_mut() {
        for v in imf.iter_mut() {
            *v *= inv;
        }
    }
    for v in avg_residue.iter_mut() {
        *v *= inv;
    }

    // ascending frequency: residue, slowest IMF, ..., fastest IMF
    let mut components = Vec::with_capacity(ranks + 1);
    components.push(avg_residue);
    components.extend(avg_imfs.into_iter().rev());

    let selection = gate_components(&components, gate)?;
    let mut out = vec![0.0; n];
    for (component, &keep) in components.iter().zip(&selection.retained) {
        if keep {
            for (o, v) in out.iter_mut().zip(component) {
                *o += v;
            }
        }
    }
    Ok((
        t.with_samples(out),
        EemdReport {
            entropies: selection.entropies,
            retained: selection.retained,
            imf_ranks: ranks,
        },
    ))
}

/// One sifting pass: subtract the mean envelope until the stop criterion
/// or the sift cap is hit; returns the accepted IMF.
fn sift(x: &[f64], cfg: &EmdConfig) -> Vec<f64> {
    let n = x.len();
    let mut h = x.to_vec();
    for _ in 0..cfg.max_sifts {
        let (maxima, minima) = find_extrema(&h);
        if maxima.len() < 2 || minima.len() < 2 {
            break;
        }
        let upper = envelope(&maxima, n);
        let lower = envelope(&minima, n);
        let mut diff_energy = 0.0;
        let mut prev_energy = 0.0;
        for i in 0..n {
            let mean = 0.5 * (upper[i] + lower[i]);
            prev_energy += h[i] * h[i];
            h[i] -= mean;
            diff_energy += mean * mean;
        }
        if prev_energy == 0.0 || diff_energy / prev_energy < cfg.sift_stop {
            break;
        }
    }
    h
}

/// Interior extrema as (fractional index, value); plateaus collapse to
/// their midpoint.
fn find_extrema(x: &[f64]) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let n = x.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut prev_dir: i8 = 0;
    let mut turn_start = 0usize;
    for i in 0..n - 1 {
        let d = x[i + 1] - x[i];
        let dir: i8 = if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            continue;
        };
        if prev_dir == 1 && dir == -1 {
            maxima.push(((turn_start + i) as f64 / 2.0, x[i]));
        } else if prev_dir == -1 && dir == 1 {
            minima.push(((turn_start + i) as f64 / 2.0, x[i]));
        }
        prev_dir = dir;
        turn_start = i + 1;
    }
    (maxima, minima)
}

fn is_monotonic(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] >= w[0]) || x.windows(2).all(|w| w[1] <= w[0])
}

/// Natural cubic spline through the extrema, mirrored past each end to tame
/// the boundary, evaluated on the integer sample grid.
fn envelope(extrema: &[(f64, f64)], n: usize) -> Vec<f64> {
    debug_assert!(extrema.len() >= 2);
    let last = (n - 1) as f64;
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(extrema.len() + 4);
    // reflect the two nearest extrema about each end
    for &(xi, yi) in extrema.iter().take(2).rev() {
        if -xi < extrema[0].0 {
            knots.push((-xi, yi));
        }
    }
    knots.extend_from_slice(extrema);
    let m = extrema.len();
    for &(xi, yi) in extrema[m.saturating_sub(2)..].iter().rev() {
        if 2.0 * last - xi > extrema[m - 1].0 {
            knots.push((2.0 * last - xi, yi));
        }
    }
    knots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    knots.dedup_by(|a, b| a.0 == b.0);

    let spline = CubicSpline::natural(&knots);
    (0..n).map(|i| spline.eval(i as f64)).collect()
}

/// Natural cubic spline (second derivatives zero at both ends) solved with
/// the Thomas algorithm.
struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    fn natural(knots: &[(f64, f64)]) -> CubicSpline {
        let n = knots.len();
        let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let ys: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let mut second = vec![0.0; n];
        if n > 2 {
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut lower = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                lower[i] = h0;
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            // Thomas sweep
            for i in 1..m {
                let w = lower[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (1..m).rev() {
                second[i] = (rhs[i - 1] - upper[i - 1] * second[i + 1]) / diag[i - 1];
            }
        }
        CubicSpline { xs, ys, second }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        // clamp outside the knot span
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let mut k = match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).unwrap())
        {
            Ok(i) => return self.ys[i],
            Err(i) => i,
        };
        k -= 1;
        let h = self.xs[k + 1] - self.xs[k];
        let a = (self.xs[k + 1] - x) / h;
        let b = (x - self.xs[k]) / h;
        a * self.ys[k]
            + b * self.ys[k + 1]
            + ((a * a * a - a) * self.second[k] + (b * b * b - b) * self.second[k + 1]) * h * h
                / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{correlation, MHZ_NS};
    use std::f64::consts::TAU;

    fn tone(f_mhz: f64, n: usize, dt: f64, amp: f64) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (TAU * f_mhz * MHZ_NS * i as f64 * dt).sin())
            .collect()
    }

    #[test]
    fn monotonic_ramp_yields_no_imfs() {
        let t = Trace::new((0..64).map(|i| i as f64).collect(), 1.0, 0.0).unwrap();
        let r = emd(&t, &EmdConfig::default()).unwrap();
        assert!(r.imfs.is_empty());
        assert_eq!(r.residue, t);
    }

    #[test]
    fn fast_tone_lands_in_the_first_imf() {
        let n = 2048;
        let dt = 0.25;
        let fast = tone(300.0, n, dt, 1.0);
        let slow = tone(30.0, n, dt, 1.0);
        let sum: Vec<f64> = fast.iter().zip(&slow).map(|(a, b)| a + b).collect();
        let t = Trace::new(sum, dt, 0.0).unwrap();
        let r = emd(&t, &EmdConfig::default()).unwrap();
        assert!(!r.imfs.is_empty());
        let center = n / 4..3 * n / 4;
        let c = correlation(&r.imfs[0].samples[center.clone()], &fast[center]);
        assert!(c >= 0.95, "first-IMF correlation with fast tone: {c}");
    }

    #[test]
    fn imfs_plus_residue_reconstruct_the_input() {
        let n = 1024;
        let dt = 0.25;
        let mut samples = tone(300.0, n, dt, 1.0);
        for (i, s) in samples.iter_mut().enumerate() {
            *s += 0.8 * (TAU * 30.0 * MHZ_NS * i as f64 * dt).cos() + 0.001 * i as f64;
        }
        let t = Trace::new(samples, dt, 0.0).unwrap();
        let r = emd(&t, &EmdConfig::default()).unwrap();
        let mut recon = r.residue.samples.clone();
        for imf in &r.imfs {
            for (a, v) in recon.iter_mut().zip(&imf.samples) {
                *a += v;
            }
        }
        let scale = t.energy().sqrt();
        let err: f64 = t
            .samples
            .iter()
            .zip(&recon)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-10 * scale, "reconstruction error {err:e}");
    }

    #[test]
    fn degenerate_ensemble_equals_plain_emd_with_gate() {
        let n = 1024;
        let dt = 0.25;
        let mixed: Vec<f64> = tone(300.0, n, dt, 0.3)
            .iter()
            .zip(&tone(30.0, n, dt, 1.0))
            .map(|(a, b)| a + b)
            .collect();
        let t = Trace::new(mixed, dt, 0.0).unwrap();
        let cfg = EmdConfig {
            ensemble_size: 1,
            ensemble_noise_std: 0.0,
            ..EmdConfig::default()
        };
        let gate = GateConfig {
            threshold: 1.0,
            ..GateConfig::default()
        };
        let (out, report) = eemd_denoise(&t, &cfg, &gate).unwrap();

        let plain = emd(&t, &cfg).unwrap();
        let mut components = vec![plain.residue.samples.clone()];
        components.extend(plain.imfs.iter().rev().map(|i| i.samples.clone()));
        let selection = gate_components(&components, &gate).unwrap();
        let mut want = vec![0.0; n];
        for (c, &keep) in components.iter().zip(&selection.retained) {
            if keep {
                for (w, v) in want.iter_mut().zip(c) {
                    *w += v;
                }
            }
        }
        assert_eq!(out.samples, want);
        assert_eq!(report.retained, selection.retained);
    }

    #[test]
    fn fixed_seed_is_bit_reproducible() {
        let n = 512;
        let clean = Trace::new(tone(50.0, n, 1.0, 1.0), 1.0, 0.0).unwrap();
        let noisy = crate::eval::add_noise_trace(&clean, -5.0, 11).unwrap();
        let cfg = EmdConfig {
            ensemble_size: 8,
            seed: 3,
            ..EmdConfig::default()
        };
        let gate = GateConfig::default();
        let (a, _) = eemd_denoise(&noisy, &cfg, &gate).unwrap();
        let (b, _) = eemd_denoise(&noisy, &cfg, &gate).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bigger_ensembles_stabilize_the_output() {
        let clean = crate::synth::ricker(&crate::synth::RickerSpec {
            n: 512,
            dt_ns: 1.0,
            ..Default::default()
        })
        .unwrap();
        let noisy = crate::eval::add_noise_trace(&clean, -5.0, 7).unwrap();
        let gate = GateConfig::default();

        let spread = |size: usize| -> f64 {
            let outputs: Vec<Vec<f64>> = (0..5)
                .map(|seed| {
                    let cfg = EmdConfig {
                        ensemble_size: size,
                        seed,
                        ..EmdConfig::default()
                    };
                    eemd_denoise(&noisy, &cfg, &gate).unwrap().0.samples
                })
                .collect();
            let n = outputs[0].len();
            let mut total = 0.0;
            for i in 0..n {
                let mean: f64 = outputs.iter().map(|o| o[i]).sum::<f64>() / outputs.len() as f64;
                total += outputs
                    .iter()
                    .map(|o| (o[i] - mean) * (o[i] - mean))
                    .sum::<f64>()
                    / outputs.len() as f64;
            }
            total / n as f64
        };

        let v1 = spread(1);
        let v4 = spread(4);
        let v16 = spread(16);
        assert!(
            v1 > v4 && v4 > v16,
            "ensemble variance should shrink: {v1:e} -> {v4:e} -> {v16:e}"
        );
    }
}
