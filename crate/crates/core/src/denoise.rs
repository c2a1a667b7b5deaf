//! The de-noising pipeline: decompose, gate modes by sample entropy,
//! reconstruct from the retained modes.
//!
//! Low-entropy modes are regular (signal-like) and kept; high-entropy modes
//! are noise-like and dropped. Two gate strategies are offered: `Prefix`
//! keeps the longest run of low-entropy modes counted from the lowest
//! center frequency upwards, `PerMode` judges every mode on its own.

use rayon::prelude::*;
use thiserror::Error;

use crate::entropy::{sample_entropy, EntropyError, SampEnParams};
use crate::signal::{std_dev, Radargram, SignalError, Trace};
use crate::vmd::{decompose, VmdConfig, VmdError, VmdResult};

#[derive(Debug, Error)]
pub enum DenoiseError {
    /// Every mode was rejected by the gate; the entropies are attached so
    /// the caller can decide on a fallback.
    #[error("entropy gate rejected all modes (entropies {entropies:?})")]
    EmptySelection { entropies: Vec<f64> },
    #[error(transparent)]
    Vmd(#[from] VmdError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Keep modes `1..=M` (in ascending center-frequency order) where `M`
    /// is the longest prefix with every entropy at or below the threshold.
    Prefix,
    /// Keep every mode whose entropy is at or below the threshold.
    PerMode,
}

/// Entropy-gate parameters, shared by the VMD pipeline and the EEMD
/// baseline.
#[derive(Debug, Clone, Copy)]
pub struct GateConfig {
    pub sampen: SampEnParams,
    /// Retention threshold on the mode entropy.
    pub threshold: f64,
    pub strategy: Strategy,
    /// Modes longer than this are strided down before the entropy
    /// evaluation. Keeps the O(N^2) statistic affordable on long traces
    /// and, more importantly, keeps heavily oversampled noise modes from
    /// masquerading as regular. 0 disables the cap.
    pub max_eval_len: usize,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            sampen: SampEnParams::default(),
            threshold: 0.6,
            strategy: Strategy::Prefix,
            max_eval_len: 2048,
        }
    }
}

impl GateConfig {
    pub fn validate(&self) -> Result<(), DenoiseError> {
        if !(self.threshold > 0.0) {
            return Err(DenoiseError::Entropy(EntropyError::InvalidInput(format!(
                "gate threshold must be positive, got {}",
                self.threshold
            ))));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DenoiseConfig {
    pub vmd: VmdConfig,
    pub gate: GateConfig,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        DenoiseConfig {
            vmd: VmdConfig::default(),
            gate: GateConfig::default(),
        }
    }
}

/// Entropy gate verdict over an ordered set of components.
#[derive(Debug, Clone)]
pub struct GateSelection {
    pub entropies: Vec<f64>,
    pub retained: Vec<bool>,
}

impl GateSelection {
    pub fn retained_count(&self) -> usize {
        self.retained.iter().filter(|&&r| r).count()
    }
}

/// Per-trace de-noising report.
#[derive(Debug, Clone)]
pub struct DenoiseReport {
    /// Mode entropies in ascending center-frequency order.
    pub entropies: Vec<f64>,
    pub retained: Vec<bool>,
    /// Number of retained modes.
    pub retained_count: usize,
    pub iterations: usize,
    pub converged: bool,
    /// True when the gate rejected everything and the trace passed through
    /// unchanged (batch mode only).
    pub passthrough: bool,
    pub snr_before_db: Option<f64>,
    pub snr_after_db: Option<f64>,
}

/// Entropy of one component as seen by the gate, with stride promotion
/// enabled. See [`gate_components`] for how the pipeline applies it.
pub fn gate_entropy(samples: &[f64], gate: &GateConfig) -> Result<f64, DenoiseError> {
    component_entropy(samples, gate, true)
}

/// The statistic behind the gate.
///
/// Components are strided before the entropy evaluation: at least enough
/// to stay within `max_eval_len` samples, and (when `promote` is set) with
/// the stride picked inside one octave so the component's dominant
/// frequency lands mid-band. Sample entropy reads both near-DC (smooth)
/// and near-Nyquist (alternating) content as regular, so without the
/// adjustment a narrowband noise mode whose carrier is oversampled or
/// aliases onto those nulls would slip through the gate.
///
/// A (numerically) constant component counts as maximally regular
/// (entropy 0); one so irregular that no templates match counts as
/// infinitely entropic.
fn component_entropy(
    samples: &[f64],
    gate: &GateConfig,
    promote: bool,
) -> Result<f64, DenoiseError> {
    if std_dev(samples) == 0.0 {
        return Ok(0.0);
    }
    let view = gate_stride_view(samples, gate.max_eval_len, promote);
    if std_dev(&view) == 0.0 {
        return Ok(0.0);
    }
    match sample_entropy(&view, &gate.sampen) {
        Ok(se) => Ok(se),
        Err(EntropyError::Undefined) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

/// Apparent frequencies at least this far from both 0 and 1/2 keep their
/// irregularity visible to the entropy statistic.
const GATE_ALIAS_LO: f64 = 0.08;
const GATE_ALIAS_HI: f64 = 0.35;
/// Never stride below this many evaluation samples.
const GATE_MIN_EVAL: usize = 128;

fn gate_stride_view(x: &[f64], max_len: usize, promote: bool) -> Vec<f64> {
    let base = if max_len > 0 {
        x.len().div_ceil(max_len)
    } else {
        1
    };
    let mut stride = base;
    if promote {
        let hi = (2 * base).max(2).min((x.len() / GATE_MIN_EVAL).max(1));
        let nu = dominant_frequency(x);
        for s in base..=hi {
            let apparent = (s as f64 * nu).rem_euclid(1.0);
            let apparent = apparent.min(1.0 - apparent);
            if (GATE_ALIAS_LO..=GATE_ALIAS_HI).contains(&apparent) {
                stride = s;
                break;
            }
        }
    }
    if stride <= 1 {
        x.to_vec()
    } else {
        x.iter().copied().step_by(stride).collect()
    }
}

/// Dominant frequency in cycles per sample, from the spectral peak.
fn dominant_frequency(x: &[f64]) -> f64 {
    let bins = crate::spectrum::fft_forward(x);
    let half = x.len() / 2;
    let mut best = (1usize, 0.0);
    for (i, b) in bins.iter().enumerate().take(half + 1).skip(1) {
        let p = b.norm_sqr();
        if p > best.1 {
            best = (i, p);
        }
    }
    best.0 as f64 / x.len() as f64
}

/// Apply the gate to components ordered by ascending frequency content.
///
/// The first (slowest) component carries the pipeline's low-frequency
/// signal hypothesis and is always examined at its natural scale; the
/// higher components get the stride promotion described at
/// [`gate_entropy`].
pub fn gate_components<S: AsRef<[f64]>>(
    components: &[S],
    gate: &GateConfig,
) -> Result<GateSelection, DenoiseError> {
    gate.validate()?;
    let entropies: Vec<f64> = components
        .iter()
        .enumerate()
        .map(|(idx, c)| component_entropy(c.as_ref(), gate, idx > 0))
        .collect::<Result<_, _>>()?;
    let retained = apply_threshold(&entropies, gate.threshold, gate.strategy);
    if retained.iter().all(|&r| !r) {
        return Err(DenoiseError::EmptySelection { entropies });
    }
    Ok(GateSelection { entropies, retained })
}

fn apply_threshold(entropies: &[f64], r: f64, strategy: Strategy) -> Vec<bool> {
    match strategy {
        Strategy::PerMode => entropies.iter().map(|&se| se <= r).collect(),
        Strategy::Prefix => {
            let mut keep = true;
            entropies
                .iter()
                .map(|&se| {
                    keep = keep && se <= r;
                    keep
                })
                .collect()
        }
    }
}

/// Gate the modes of a decomposition (already sorted by ascending center
/// frequency).
pub fn select_modes(
    result: &VmdResult,
    cfg: &DenoiseConfig,
) -> Result<GateSelection, DenoiseError> {
    let mode_samples: Vec<&[f64]> = result.modes.iter().map(|m| m.samples.as_slice()).collect();
    gate_components(&mode_samples, &cfg.gate)
}

fn sum_retained(modes: &[Trace], retained: &[bool], template: &Trace) -> Trace {
    let mut samples = vec![0.0; template.len()];
    for (m, &keep) in modes.iter().zip(retained) {
        if keep {
            for (s, v) in samples.iter_mut().zip(&m.samples) {
                *s += v;
            }
        }
    }
    template.with_samples(samples)
}

/// De-noise one trace: VMD-decompose, gate, sum the retained modes.
pub fn denoise_trace(t: &Trace, cfg: &DenoiseConfig) -> Result<(Trace, DenoiseReport), DenoiseError> {
    let decomposition = decompose(t, &cfg.vmd)?;
    let selection = select_modes(&decomposition, cfg)?;
    let out = sum_retained(&decomposition.modes, &selection.retained, t);
    let report = DenoiseReport {
        retained_count: selection.retained_count(),
        entropies: selection.entropies,
        retained: selection.retained,
        iterations: decomposition.iterations,
        converged: decomposition.converged,
        passthrough: false,
        snr_before_db: None,
        snr_after_db: None,
    };
    Ok((out, report))
}

/// De-noise every trace of a radargram independently with the same
/// configuration. A trace whose gate rejects all modes passes through
/// unchanged, flagged in its report; the batch always completes.
pub fn denoise_radargram(
    r: &Radargram,
    cfg: &DenoiseConfig,
) -> Result<(Radargram, Vec<DenoiseReport>), DenoiseError> {
    let results: Vec<Result<(Trace, DenoiseReport), DenoiseError>> = r
        .traces
        .par_iter()
        .map(|t| match denoise_trace(t, cfg) {
            Ok(pair) => Ok(pair),
            Err(DenoiseError::EmptySelection { entropies }) => {
                let k = entropies.len();
                Ok((
                    t.clone(),
                    DenoiseReport {
                        entropies,
                        retained: vec![false; k],
                        retained_count: 0,
                        iterations: 0,
                        converged: false,
                        passthrough: true,
                        snr_before_db: None,
                        snr_after_db: None,
                    },
                ))
            }
            Err(e) => Err(e),
        })
        .collect();

    let mut traces = Vec::with_capacity(r.traces.len());
    let mut reports = Vec::with_capacity(r.traces.len());
    for res in results {
        let (t, rep) = res?;
        traces.push(t);
        reports.push(rep);
    }
    Ok((
        Radargram {
            traces,
            dx: r.dx,
        },
        reports,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{add_noise_trace, snr_trace, SnrOutcome};
    use crate::signal::correlation;
    use crate::synth::{ricker, RickerSpec};

    fn gate(threshold: f64, strategy: Strategy) -> GateConfig {
        GateConfig {
            threshold,
            strategy,
            ..GateConfig::default()
        }
    }

    #[test]
    fn prefix_gate_stops_at_first_rejection() {
        let mask = apply_threshold(&[0.3, 0.5, 2.1], 1.0, Strategy::Prefix);
        assert_eq!(mask, vec![true, true, false]);

        let mask = apply_threshold(&[0.3, 2.1, 0.5], 1.0, Strategy::Prefix);
        assert_eq!(mask, vec![true, false, false]);

        let mask = apply_threshold(&[0.3, 2.1, 0.5], 1.0, Strategy::PerMode);
        assert_eq!(mask, vec![true, false, true]);
    }

    #[test]
    fn rejecting_everything_is_an_error_with_entropies() {
        let noise = crate::rng::normal_vec(&mut crate::rng::seeded(2), 256);
        let comps = [noise];
        let err = gate_components(&comps, &gate(0.001, Strategy::Prefix)).unwrap_err();
        match err {
            DenoiseError::EmptySelection { entropies } => assert_eq!(entropies.len(), 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn raising_threshold_never_drops_a_retained_mode() {
        let mut r = crate::rng::seeded(8);
        for _ in 0..200 {
            let k = 2 + (crate::rng::standard_normal(&mut r).abs() * 3.0) as usize;
            let entropies: Vec<f64> = (0..k)
                .map(|_| crate::rng::standard_normal(&mut r).abs() * 2.0)
                .collect();
            for strategy in [Strategy::Prefix, Strategy::PerMode] {
                let low = apply_threshold(&entropies, 0.5, strategy);
                let high = apply_threshold(&entropies, 1.5, strategy);
                for (l, h) in low.iter().zip(&high) {
                    assert!(!l | h, "mode retained at R=0.5 but dropped at R=1.5");
                }
            }
        }
    }

    #[test]
    fn noiseless_wavelet_survives_the_pipeline() {
        let clean = ricker(&RickerSpec::default()).unwrap();
        let cfg = DenoiseConfig {
            gate: gate(1.0, Strategy::Prefix),
            ..DenoiseConfig::default()
        };
        let (out, report) = denoise_trace(&clean, &cfg).unwrap();
        let c = correlation(&out.samples, &clean.samples);
        assert!(c >= 0.99, "correlation {c}, report {report:?}");
        assert!(out.energy() <= 1.2 * clean.energy());
    }

    #[test]
    fn heavy_noise_is_suppressed_by_at_least_10_db() {
        let clean = ricker(&RickerSpec::default()).unwrap();
        let noisy = add_noise_trace(&clean, -13.769, 42).unwrap();
        let cfg = DenoiseConfig::default();
        let (out, _) = denoise_trace(&noisy, &cfg).unwrap();

        let before = match snr_trace(&clean, &noisy).unwrap() {
            SnrOutcome::Finite(m) => m.db,
            SnrOutcome::Infinite => unreachable!(),
        };
        let after = match snr_trace(&clean, &out).unwrap() {
            SnrOutcome::Finite(m) => m.db,
            SnrOutcome::Infinite => unreachable!(),
        };
        assert!(
            after >= before + 10.0,
            "SNR {before:.2} dB -> {after:.2} dB; improvement below 10 dB"
        );
        assert!(out.energy() <= 1.2 * noisy.energy());
    }

    #[test]
    fn zero_trace_passes_through_as_zero() {
        let t = Trace::new(vec![0.0; 128], 1.0, 0.0).unwrap();
        let (out, report) = denoise_trace(&t, &DenoiseConfig::default()).unwrap();
        assert!(out.samples.iter().all(|&x| x == 0.0));
        // zero modes are maximally regular, so everything is retained
        assert!(report.entropies.iter().all(|&se| se == 0.0));
        assert_eq!(report.retained_count, report.entropies.len());
    }

    #[test]
    fn identical_traces_denoise_identically() {
        let clean = ricker(&RickerSpec {
            n: 512,
            dt_ns: 1.0,
            ..RickerSpec::default()
        })
        .unwrap();
        let noisy = add_noise_trace(&clean, -5.0, 3).unwrap();
        let r = Radargram::new(vec![noisy.clone(), noisy.clone(), noisy], 0.5).unwrap();
        let (out, reports) = denoise_radargram(&r, &DenoiseConfig::default()).unwrap();
        assert_eq!(out.traces[0], out.traces[1]);
        assert_eq!(out.traces[1], out.traces[2]);
        assert_eq!(reports.len(), 3);
    }

    #[test]
    fn clean_radargram_is_nearly_unchanged() {
        let base = RickerSpec {
            n: 512,
            dt_ns: 1.0,
            ..RickerSpec::default()
        };
        let traces: Vec<Trace> = (0..4)
            .map(|i| {
                ricker(&RickerSpec {
                    t0_ns: 30.0 + 5.0 * i as f64,
                    ..base
                })
                .unwrap()
            })
            .collect();
        let r = Radargram::new(traces, 0.5).unwrap();
        let cfg = DenoiseConfig {
            gate: gate(1.0, Strategy::Prefix),
            ..DenoiseConfig::default()
        };
        let (out, _) = denoise_radargram(&r, &cfg).unwrap();
        let mean_corr: f64 = r
            .traces
            .iter()
            .zip(&out.traces)
            .map(|(a, b)| correlation(&a.samples, &b.samples))
            .sum::<f64>()
            / r.trace_count() as f64;
        assert!(mean_corr >= 0.99, "mean correlation {mean_corr}");
    }

    #[test]
    fn batch_mode_passes_through_on_empty_selection() {
        // pure noise with a threshold nothing can meet
        let noise = Trace::new(
            crate::rng::normal_vec(&mut crate::rng::seeded(5), 256),
            1.0,
            0.0,
        )
        .unwrap();
        let r = Radargram::new(vec![noise.clone()], 1.0).unwrap();
        let cfg = DenoiseConfig {
            gate: gate(1e-6, Strategy::Prefix),
            ..DenoiseConfig::default()
        };
        let (out, reports) = denoise_radargram(&r, &cfg).unwrap();
        assert_eq!(out.traces[0], noise, "passthrough must not alter the trace");
        assert!(reports[0].passthrough);
        assert_eq!(reports[0].retained_count, 0);

        // the same input as a single trace is a hard error
        assert!(matches!(
            denoise_trace(&noise, &cfg),
            Err(DenoiseError::EmptySelection { .. })
        ));
    }
}
