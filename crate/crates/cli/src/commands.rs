//! Subcommand definitions and implementations.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gpr_core::baselines::{DwtConfig, EmdConfig};
use gpr_core::denoise::{self, DenoiseConfig, GateConfig, Strategy};
use gpr_core::entropy::{SampEnParams, Tolerance};
use gpr_core::eval::{self, EemdSetup, MethodConfigs, SnrOutcome};
use gpr_core::io;
use gpr_core::signal::Radargram;
use gpr_core::synth::{self, RickerSpec};
use gpr_core::vmd::{self, OmegaInit, VmdConfig};

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "gpr",
    version,
    about = "GPR trace/radargram de-noising toolkit: mode decomposition with \
             entropy gating, synthetic data generators, baselines and an SNR harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a Ricker wavelet trace
    Ricker(RickerArgs),
    /// Run the 2D FDTD forward model (built-in scene or --config file)
    Forward(ForwardArgs),
    /// Add seeded white Gaussian noise at a prescribed SNR
    Addnoise(AddnoiseArgs),
    /// Decompose one trace into band-limited modes
    Decompose(DecomposeArgs),
    /// De-noise a radargram via decomposition and entropy gating
    Denoise(DenoiseArgs),
    /// Measure SNR against a clean reference
    Snr(SnrArgs),
    /// Compare de-noising methods and write a CSV table
    Compare(CompareArgs),
    /// Render a grayscale B-scan image (binary PGM)
    Render(RenderArgs),
}

#[derive(Args)]
pub struct RickerArgs {
    /// Center frequency in MHz
    #[arg(long, default_value_t = 50.0)]
    pub fc: f64,
    /// Sample count
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    /// Sampling interval in ns
    #[arg(long, default_value_t = 1000.0 / 1024.0)]
    pub dt_ns: f64,
    /// Peak time in ns
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub t0_ns: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ForwardArgs {
    /// Model description file; defaults to the built-in air-over-sand
    /// void scene
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the grid cell size in m
    #[arg(long)]
    pub cell: Option<f64>,
    /// Override the trace count (midpoints re-spread across the width)
    #[arg(long)]
    pub traces: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct AddnoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Target SNR in dB
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct DecomposeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Modes are written as the traces of this file
    #[arg(long)]
    pub out: PathBuf,
    /// Trace index to decompose
    #[arg(long, default_value_t = 0)]
    pub trace: usize,
    /// Number of modes K
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    /// Bandwidth penalty
    #[arg(long, default_value_t = 2000.0)]
    pub alpha: f64,
    /// Dual ascent step
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Prefix,
    PerMode,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Prefix => Strategy::Prefix,
            StrategyArg::PerMode => Strategy::PerMode,
        }
    }
}

#[derive(Args)]
pub struct DenoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Clean reference; adds SNR before/after to the summary
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    #[arg(long, default_value_t = 2000.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    /// Sample-entropy embedding dimension
    #[arg(long, default_value_t = 2)]
    pub sampen_m: usize,
    /// Sample-entropy tolerance as a fraction of each mode's std
    #[arg(long, default_value_t = 0.2)]
    pub sampen_r: f64,
    /// Entropy retention threshold R
    #[arg(long, default_value_t = 0.6)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Prefix)]
    pub strategy: StrategyArg,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args)]
pub struct SnrArgs {
    /// Signal under test
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Clean reference
    #[arg(long)]
    pub reference: PathBuf,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Noisy input
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    /// Comma-separated subset of vmd,eemd,dwt
    #[arg(long, default_value = "vmd,eemd,dwt")]
    pub methods: String,
    /// Seed recorded in the table and used by the EEMD ensemble
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    #[arg(long, default_value_t = 2000.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 2)]
    pub sampen_m: usize,
    #[arg(long, default_value_t = 0.2)]
    pub sampen_r: f64,
    #[arg(long, default_value_t = 0.6)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Prefix)]
    pub strategy: StrategyArg,
    /// EEMD ensemble size
    #[arg(long, default_value_t = 30)]
    pub ensemble: usize,
    /// Entropy threshold for the EEMD gate (defaults to --threshold)
    #[arg(long)]
    pub eemd_threshold: Option<f64>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Symmetric clip percentile of |amplitude|
    #[arg(long, default_value_t = 99.0)]
    pub clip: f64,
}

type CmdResult = Result<String, CliError>;

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            if n == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Data(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn ricker(args: RickerArgs) -> CmdResult {
    let spec = RickerSpec {
        fc_mhz: args.fc,
        dt_ns: args.dt_ns,
        n: args.samples,
        t0_ns: args.t0_ns,
    };
    let trace = synth::ricker(&spec)?;
    let r = Radargram::new(vec![trace], 0.0)?;
    io::write_radargram(&r, &args.out)?;
    Ok(format!(
        "wrote {}: 1 trace x {} samples, dt {:.6} ns, fc {} MHz",
        args.out.display(),
        args.samples,
        args.dt_ns,
        args.fc
    ))
}

pub fn forward(args: ForwardArgs) -> CmdResult {
    let mut model = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            synth::parse_model_file(&text)?
        }
        None => synth::sand_void_model(),
    };
    if let Some(cell) = args.cell {
        model = model.with_cell(cell);
    }
    if let Some(traces) = args.traces {
        model = model.with_trace_count(traces);
    }
    for warning in model.validate()? {
        eprintln!("warning: {warning}");
    }
    let radargram = with_jobs(args.jobs, || synth::fdtd_forward(&model))??;
    io::write_radargram(&radargram, &args.out)?;
    Ok(format!(
        "wrote {}: {} traces x {} samples over {} ns ({} MHz source, {} m cells)",
        args.out.display(),
        radargram.trace_count(),
        radargram.samples_per_trace(),
        model.time_window_ns,
        model.fc_mhz,
        model.cell_m
    ))
}

pub fn addnoise(args: AddnoiseArgs) -> CmdResult {
    let clean = io::read_radargram(&args.input)?;
    require_traces(&clean, &args.input)?;
    let noisy = eval::add_noise_radargram(&clean, args.snr_db, args.seed)?;
    let measured = eval::snr_radargram(&clean, &noisy)?.db();
    io::write_radargram(&noisy, &args.out)?;
    Ok(format!(
        "wrote {}: measured SNR {measured:.3} dB (target {}, seed {})",
        args.out.display(),
        args.snr_db,
        args.seed
    ))
}

pub fn decompose(args: DecomposeArgs) -> CmdResult {
    let input = io::read_radargram(&args.input)?;
    require_traces(&input, &args.input)?;
    let trace = input.traces.get(args.trace).ok_or_else(|| {
        CliError::Usage(format!(
            "--trace {} out of range ({} traces)",
            args.trace,
            input.trace_count()
        ))
    })?;
    let cfg = VmdConfig {
        modes: args.modes,
        alpha: args.alpha,
        tau: args.tau,
        ..VmdConfig::default()
    };
    let result = vmd::decompose(trace, &cfg)?;
    let modes = Radargram {
        traces: result.modes.clone(),
        dx: 0.0,
    };
    io::write_radargram(&modes, &args.out)?;
    let centers: Vec<String> = result
        .omegas_mhz
        .iter()
        .map(|w| format!("{w:.2}"))
        .collect();
    Ok(format!(
        "wrote {}: {} modes, centers [{}] MHz, {} iterations ({})",
        args.out.display(),
        args.modes,
        centers.join(", "),
        result.iterations,
        if result.converged { "converged" } else { "hit max-iter" }
    ))
}

fn gate_from(sampen_m: usize, sampen_r: f64, threshold: f64, strategy: StrategyArg) -> GateConfig {
    GateConfig {
        sampen: SampEnParams {
            m: sampen_m,
            r: Tolerance::FractionOfStd(sampen_r),
        },
        threshold,
        strategy: strategy.into(),
        ..GateConfig::default()
    }
}

pub fn denoise(args: DenoiseArgs) -> CmdResult {
    let input = io::read_radargram(&args.input)?;
    require_traces(&input, &args.input)?;
    let cfg = DenoiseConfig {
        vmd: VmdConfig {
            modes: args.modes,
            alpha: args.alpha,
            tau: args.tau,
            omega_init: OmegaInit::Uniform,
            ..VmdConfig::default()
        },
        gate: gate_from(args.sampen_m, args.sampen_r, args.threshold, args.strategy),
    };

    // single-trace inputs fail hard on an empty selection; batches pass
    // the offending trace through and keep going
    let (output, reports) = if input.trace_count() == 1 {
        let (trace, report) = with_jobs(args.jobs, || denoise::denoise_trace(&input.traces[0], &cfg))??;
        (
            Radargram {
                traces: vec![trace],
                dx: input.dx,
            },
            vec![report],
        )
    } else {
        with_jobs(args.jobs, || denoise::denoise_radargram(&input, &cfg))??
    };

    for (i, report) in reports.iter().enumerate() {
        if report.passthrough {
            eprintln!("warning: trace {i}: all modes rejected, passed through unchanged");
        }
    }
    let mean_retained: f64 =
        reports.iter().map(|r| r.retained_count as f64).sum::<f64>() / reports.len() as f64;

    let mut summary = format!(
        "wrote {}: {} traces, mean retained {:.1}/{} modes",
        args.out.display(),
        output.trace_count(),
        mean_retained,
        args.modes
    );
    if let Some(ref_path) = &args.reference {
        let clean = io::read_radargram(ref_path)?;
        let before = eval::snr_radargram(&clean, &input)?.db();
        let after = eval::snr_radargram(&clean, &output)?.db();
        summary.push_str(&format!(", SNR {before:.3} dB -> {after:.3} dB"));
    }
    io::write_radargram(&output, &args.out)?;
    Ok(summary)
}

pub fn snr(args: SnrArgs) -> CmdResult {
    let test = io::read_radargram(&args.input)?;
    let reference = io::read_radargram(&args.reference)?;
    match eval::snr_radargram(&reference, &test)? {
        SnrOutcome::Finite(m) => Ok(format!("SNR {:.6} ({:.3} dB)", m.ratio, m.db)),
        SnrOutcome::Infinite => Ok("SNR infinite (signal equals reference)".into()),
    }
}

pub fn compare(args: CompareArgs) -> CmdResult {
    let noisy = io::read_radargram(&args.input)?;
    let clean = io::read_radargram(&args.reference)?;
    require_traces(&noisy, &args.input)?;

    let gate = gate_from(args.sampen_m, args.sampen_r, args.threshold, args.strategy);
    let mut cfgs = MethodConfigs::default();
    for name in args.methods.split(',').filter(|s| !s.is_empty()) {
        match name.trim() {
            "vmd" => {
                cfgs.vmd = Some(DenoiseConfig {
                    vmd: VmdConfig {
                        modes: args.modes,
                        alpha: args.alpha,
                        tau: args.tau,
                        ..VmdConfig::default()
                    },
                    gate,
                })
            }
            "eemd" => {
                cfgs.eemd = Some(EemdSetup {
                    emd: EmdConfig {
                        ensemble_size: args.ensemble,
                        seed: args.seed,
                        ..EmdConfig::default()
                    },
                    gate: GateConfig {
                        threshold: args.eemd_threshold.unwrap_or(args.threshold),
                        ..gate
                    },
                })
            }
            "dwt" => cfgs.dwt = Some(DwtConfig::default()),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown method `{other}` (expected vmd, eemd or dwt)"
                )))
            }
        }
    }

    let rows = with_jobs(args.jobs, || {
        if noisy.trace_count() == 1 && clean.trace_count() == 1 {
            eval::compare_methods_trace(&clean.traces[0], &noisy.traces[0], &cfgs, args.seed)
        } else {
            eval::compare_methods_radargram(&clean, &noisy, &cfgs, args.seed)
        }
    })??;
    for row in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: {} failed: {}",
            row.method.name(),
            row.error.as_deref().unwrap_or("")
        );
    }
    io::write_compare_table(&rows, &args.out)?;

    let mut summary = format!("wrote {}: {} method rows", args.out.display(), rows.len());
    if let Some(input_db) = rows.first().map(|r| r.input_snr_db) {
        summary.push_str(&format!(", input {input_db:.3} dB"));
        for row in &rows {
            if let Some(out) = row.output_snr_db {
                summary.push_str(&format!(", {} {out:.3} dB", row.method.name()));
            }
        }
    }
    Ok(summary)
}

pub fn render(args: RenderArgs) -> CmdResult {
    let r = io::read_radargram(&args.input)?;
    require_traces(&r, &args.input)?;
    io::render_bscan(&r, &args.out, args.clip)?;
    Ok(format!(
        "wrote {}: {} x {} pixels (clip p{})",
        args.out.display(),
        r.trace_count(),
        r.samples_per_trace(),
        args.clip
    ))
}

fn require_traces(r: &Radargram, path: &std::path::Path) -> Result<(), CliError> {
    if r.traces.is_empty() {
        return Err(CliError::Data(format!(
            "{} holds an empty radargram",
            path.display()
        )));
    }
    Ok(())
}
