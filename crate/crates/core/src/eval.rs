//! SNR measurement, calibrated noise injection and the method-comparison
//! harness.

use std::time::Instant;

use thiserror::Error;

use crate::baselines::{dwt_denoise, eemd_denoise, BaselineError, DwtConfig, EmdConfig};
use crate::denoise::{denoise_radargram, denoise_trace, DenoiseConfig, DenoiseError, GateConfig};
use crate::rng;
use crate::signal::{energy, Radargram, Trace};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Signal-to-noise ratio as the energy ratio `||clean||^2 / ||test - clean||^2`
/// together with its dB form `10 log10(ratio)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrMeasure {
    pub ratio: f64,
    pub db: f64,
}

impl SnrMeasure {
    fn from_ratio(ratio: f64) -> SnrMeasure {
        SnrMeasure {
            ratio,
            db: 10.0 * ratio.log10(),
        }
    }
}

/// A test signal identical to the reference has no noise to measure;
/// that case is reported as `Infinite` rather than as an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrOutcome {
    Finite(SnrMeasure),
    Infinite,
}

impl SnrOutcome {
    /// dB value, `+inf` for the infinite case.
    pub fn db(&self) -> f64 {
        match self {
            SnrOutcome::Finite(m) => m.db,
            SnrOutcome::Infinite => f64::INFINITY,
        }
    }
}

/// SNR of `test` against the clean reference, over flat sample slices.
pub fn snr_samples(clean: &[f64], test: &[f64]) -> Result<SnrOutcome, EvalError> {
    if clean.len() != test.len() {
        return Err(EvalError::InvalidInput(format!(
            "shape mismatch: clean has {} samples, test has {}",
            clean.len(),
            test.len()
        )));
    }
    let signal = energy(clean);
    if signal == 0.0 {
        return Err(EvalError::InvalidInput(
            "clean reference has zero energy".into(),
        ));
    }
    let noise: f64 = clean
        .iter()
        .zip(test)
        .map(|(m, s)| (s - m) * (s - m))
        .sum();
    if noise == 0.0 {
        return Ok(SnrOutcome::Infinite);
    }
    Ok(SnrOutcome::Finite(SnrMeasure::from_ratio(signal / noise)))
}

pub fn snr_trace(clean: &Trace, test: &Trace) -> Result<SnrOutcome, EvalError> {
    snr_samples(&clean.samples, &test.samples)
}

/// Aggregate SNR over all samples of a radargram.
pub fn snr_radargram(clean: &Radargram, test: &Radargram) -> Result<SnrOutcome, EvalError> {
    if clean.trace_count() != test.trace_count()
        || clean.samples_per_trace() != test.samples_per_trace()
    {
        return Err(EvalError::InvalidInput("radargram shapes differ".into()));
    }
    snr_samples(&clean.flat_samples(), &test.flat_samples())
}

/// Add zero-mean white Gaussian noise scaled so the measured SNR against
/// `clean` equals `target_db` exactly (the scale is computed from the
/// realized noise vector, not its expectation). Deterministic per seed.
fn add_noise_samples(clean: &[f64], target_db: f64, rng: &mut rand_chacha::ChaCha12Rng) -> Vec<f64> {
    let noise = rng::normal_vec(rng, clean.len());
    let target_ratio = 10f64.powf(target_db / 10.0);
    let scale = (energy(clean) / (target_ratio * energy(&noise))).sqrt();
    clean
        .iter()
        .zip(&noise)
        .map(|(c, n)| c + scale * n)
        .collect()
}

pub fn add_noise_trace(clean: &Trace, target_db: f64, seed: u64) -> Result<Trace, EvalError> {
    if clean.energy() == 0.0 {
        return Err(EvalError::InvalidInput(
            "cannot scale noise against a zero-energy trace".into(),
        ));
    }
    let mut r = rng::seeded(seed);
    Ok(clean.with_samples(add_noise_samples(&clean.samples, target_db, &mut r)))
}

/// Noise over a whole radargram, scaled against the aggregate energy so the
/// radargram-level SNR hits the target.
pub fn add_noise_radargram(
    clean: &Radargram,
    target_db: f64,
    seed: u64,
) -> Result<Radargram, EvalError> {
    if clean.energy() == 0.0 {
        return Err(EvalError::InvalidInput(
            "cannot scale noise against a zero-energy radargram".into(),
        ));
    }
    let flat = clean.flat_samples();
    let mut r = rng::seeded(seed);
    let noisy = add_noise_samples(&flat, target_db, &mut r);
    let spt = clean.samples_per_trace();
    let traces = clean
        .traces
        .iter()
        .enumerate()
        .map(|(i, t)| t.with_samples(noisy[i * spt..(i + 1) * spt].to_vec()))
        .collect();
    Ok(Radargram {
        traces,
        dx: clean.dx,
    })
}

/// De-noising methods known to the comparison harness, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Dwt,
    Eemd,
    Vmd,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Dwt => "dwt",
            Method::Eemd => "eemd",
            Method::Vmd => "vmd",
        }
    }
}

/// EEMD baseline setup: sifting parameters plus the entropy gate.
#[derive(Debug, Clone)]
pub struct EemdSetup {
    pub emd: EmdConfig,
    pub gate: GateConfig,
}

/// Which methods to run, each with its configuration. `None` skips a
/// method.
#[derive(Debug, Clone, Default)]
pub struct MethodConfigs {
    pub dwt: Option<DwtConfig>,
    pub eemd: Option<EemdSetup>,
    pub vmd: Option<DenoiseConfig>,
}

/// One comparison result. `output_snr_db` is absent when the method
/// failed; the failure is kept in `error`.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub method: Method,
    pub seed: u64,
    pub input_snr_db: f64,
    pub output_snr_db: Option<f64>,
    pub runtime_ms: f64,
    pub error: Option<String>,
}

enum Data<'a> {
    Trace(&'a Trace),
    Radargram(&'a Radargram),
}

/// Run each configured method on the noisy trace and score it against the
/// clean reference. Rows come back ordered by method name; method failures
/// are recorded in their row rather than aborting the table.
pub fn compare_methods_trace(
    clean: &Trace,
    noisy: &Trace,
    cfgs: &MethodConfigs,
    seed: u64,
) -> Result<Vec<CompareRow>, EvalError> {
    let input = snr_trace(clean, noisy)?.db();
    compare_impl(Data::Trace(clean), Data::Trace(noisy), cfgs, seed, input)
}

/// Radargram flavour of [`compare_methods_trace`]; each method is applied
/// per trace and scored on the aggregate SNR.
pub fn compare_methods_radargram(
    clean: &Radargram,
    noisy: &Radargram,
    cfgs: &MethodConfigs,
    seed: u64,
) -> Result<Vec<CompareRow>, EvalError> {
    let input = snr_radargram(clean, noisy)?.db();
    compare_impl(
        Data::Radargram(clean),
        Data::Radargram(noisy),
        cfgs,
        seed,
        input,
    )
}

fn compare_impl(
    clean: Data,
    noisy: Data,
    cfgs: &MethodConfigs,
    seed: u64,
    input_snr_db: f64,
) -> Result<Vec<CompareRow>, EvalError> {
    let mut rows = Vec::new();
    for method in [Method::Dwt, Method::Eemd, Method::Vmd] {
        let configured = match method {
            Method::Dwt => cfgs.dwt.is_some(),
            Method::Eemd => cfgs.eemd.is_some(),
            Method::Vmd => cfgs.vmd.is_some(),
        };
        if !configured {
            continue;
        }
        let start = Instant::now();
        let outcome = run_method(method, &noisy, cfgs);
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let row = match outcome {
            Ok(out) => {
                let score = match (&clean, &out) {
                    (Data::Trace(c), Denoised::Trace(t)) => snr_trace(c, t)?.db(),
                    (Data::Radargram(c), Denoised::Radargram(r)) => snr_radargram(c, r)?.db(),
                    _ => unreachable!("method output shape follows its input"),
                };
                CompareRow {
                    method,
                    seed,
                    input_snr_db,
                    output_snr_db: Some(score),
                    runtime_ms,
                    error: None,
                }
            }
            Err(msg) => CompareRow {
                method,
                seed,
                input_snr_db,
                output_snr_db: None,
                runtime_ms,
                error: Some(msg),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

enum Denoised {
    Trace(Trace),
    Radargram(Radargram),
}

fn run_method(method: Method, noisy: &Data, cfgs: &MethodConfigs) -> Result<Denoised, String> {
    match (method, noisy) {
        (Method::Dwt, Data::Trace(t)) => {
            let cfg = cfgs.dwt.as_ref().unwrap();
            dwt_denoise(t, cfg)
                .map(Denoised::Trace)
                .map_err(|e| e.to_string())
        }
        (Method::Dwt, Data::Radargram(r)) => {
            let cfg = cfgs.dwt.as_ref().unwrap();
            map_traces(r, |t| dwt_denoise(t, cfg).map_err(|e| e.to_string()))
                .map(Denoised::Radargram)
        }
        (Method::Eemd, Data::Trace(t)) => {
            let setup = cfgs.eemd.as_ref().unwrap();
            eemd_denoise(t, &setup.emd, &setup.gate)
                .map(|(out, _)| Denoised::Trace(out))
                .map_err(|e| e.to_string())
        }
        (Method::Eemd, Data::Radargram(r)) => {
            let setup = cfgs.eemd.as_ref().unwrap();
            // batch robustness: a trace whose gate rejects everything
            // passes through, as in the VMD pipeline
            map_traces(r, |t| match eemd_denoise(t, &setup.emd, &setup.gate) {
                Ok((out, _)) => Ok(out),
                Err(BaselineError::Denoise(DenoiseError::EmptySelection { .. })) => Ok(t.clone()),
                Err(e) => Err(e.to_string()),
            })
            .map(Denoised::Radargram)
        }
        (Method::Vmd, Data::Trace(t)) => {
            let cfg = cfgs.vmd.as_ref().unwrap();
            denoise_trace(t, cfg)
                .map(|(out, _)| Denoised::Trace(out))
                .map_err(|e| e.to_string())
        }
        (Method::Vmd, Data::Radargram(r)) => {
            let cfg = cfgs.vmd.as_ref().unwrap();
            denoise_radargram(r, cfg)
                .map(|(out, _)| Denoised::Radargram(out))
                .map_err(|e| e.to_string())
        }
    }
}

fn map_traces(
    r: &Radargram,
    f: impl Fn(&Trace) -> Result<Trace, String> + Sync + Send,
) -> Result<Radargram, String> {
    use rayon::prelude::*;
    let traces: Result<Vec<Trace>, String> = r.traces.par_iter().map(f).collect();
    Ok(Radargram {
        traces: traces?,
        dx: r.dx,
    })
}
