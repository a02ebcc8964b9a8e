//! Command-line interface: `degrade`, `reconstruct`, `evaluate` and `demo`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use regar_core::solver::{default_tau_grid, progressive_schedule, Acceleration, SolverConfig, Strategy};
use regar_core::{consistency_distance, quantization_step, sdr, segment, FrameLayout, SignalWeight};
use serde::{Deserialize, Serialize};

use crate::audio::{read_wav, write_wav, AudioBuffer, WavFormat};
use crate::pipeline::{degrade, reconstruct_channel, ChannelResult, Degradation, Observation, PipelineConfig};
use crate::report::{format_real, frame_delta_sdr, frame_sdr, mean_db, write_report, Aggregate, FrameRow, Report};
use crate::synth::synthetic_ar_signal;

/// Environment variable consulted for the worker count when `--workers` is absent.
pub const THREADS_ENV: &str = "REGAR_THREADS";

#[derive(Debug, Parser)]
#[command(name = "regar", version, about = "Audio declipping, dequantization and inpainting with regularized AR models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clip, quantize or drop samples of a WAV file.
    Degrade(DegradeArgs),
    /// Restore a degraded WAV file.
    Reconstruct(ReconstructArgs),
    /// Compare an estimate against a reference.
    Evaluate(EvaluateArgs),
    /// Synthetic AR signal, clipped and restored end to end.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Clip,
    Quantize,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Inpaint,
    Glp,
    Declip,
    Dequant,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Inpaint => Strategy::Inpaint,
            StrategyArg::Glp => Strategy::Glp,
            StrategyArg::Declip => Strategy::Declip,
            StrategyArg::Dequant => Strategy::Dequant,
        }
    }
}

#[derive(Debug, Args)]
struct DegradeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Clipping threshold (clip mode).
    #[arg(long)]
    theta: Option<f64>,
    /// Quantizer word length (quantize mode).
    #[arg(long)]
    bits: Option<u32>,
    /// Fraction of samples to drop (drop mode).
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output encoding; defaults to 32-bit float.
    #[arg(long, value_enum, default_value_t = WavFormat::F32)]
    format: WavFormat,
    /// Where drop mode writes the missing-sample indices (default: `<output>.mask.json`).
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

/// Solver and framing flags shared by `reconstruct` and `demo`.
#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long)]
    lambda_c: Option<f64>,
    /// Consistency weight: a non-negative number or `inf` for the hard constraint.
    #[arg(long)]
    lambda_s: Option<String>,
    #[arg(long)]
    gamma_c: Option<f64>,
    #[arg(long)]
    gamma_s: Option<f64>,
    /// AR model order.
    #[arg(long)]
    order: Option<usize>,
    /// Frame length in samples.
    #[arg(long)]
    frame: Option<usize>,
    /// Hop in samples (default: a quarter frame).
    #[arg(long)]
    hop: Option<usize>,
    /// Outer (alternation) iterations; 0 passes frames through.
    #[arg(long)]
    outer: Option<usize>,
    /// Inner DRA iterations per outer iteration.
    #[arg(long, conflicts_with = "inner_schedule")]
    inner: Option<usize>,
    /// Progressive schedule `n1,nI`: 10^n1 inner iterations at first, 10^nI at the end.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    inner_schedule: Option<Vec<f64>>,
    /// Comma-separated: fft, extrapolate, extrapolate-signal, extrapolate-coefs, linesearch, none.
    #[arg(long, value_delimiter = ',')]
    accel: Option<Vec<String>>,
    /// Worker threads (default: $REGAR_THREADS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Write zero wall-clock times so that reports are byte-reproducible.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Clipping threshold; defaults to the peak magnitude of the input.
    #[arg(long, conflicts_with_all = ["bits", "mask"])]
    theta: Option<f64>,
    /// Word length of the quantized input (dequant strategy).
    #[arg(long, conflicts_with = "mask")]
    bits: Option<u32>,
    /// Missing-sample sidecar written by `degrade --mode drop`.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Clean signal, used only to fill the SDR columns of the report.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Report files (`.csv` or `.json`); may be repeated.
    #[arg(long)]
    report: Vec<PathBuf>,
    /// Output encoding; defaults to that of the input.
    #[arg(long, value_enum)]
    format: Option<WavFormat>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    reference: PathBuf,
    /// The estimate to score.
    #[arg(long)]
    input: PathBuf,
    /// The degraded signal, for ΔSDR and consistency.
    #[arg(long)]
    degraded: Option<PathBuf>,
    #[arg(long, requires = "degraded", conflicts_with_all = ["bits", "mask"])]
    theta: Option<f64>,
    #[arg(long, requires = "degraded", conflicts_with = "mask")]
    bits: Option<u32>,
    #[arg(long, requires = "degraded")]
    mask: Option<PathBuf>,
    #[arg(long, default_value_t = 2048)]
    frame: usize,
    #[arg(long)]
    hop: Option<usize>,
    #[arg(long)]
    report: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// Directory receiving clean.wav, degraded.wav, restored.wav and the reports.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Order of the synthetic AR process (even).
    #[arg(long, default_value_t = 16)]
    synth_order: usize,
    #[arg(long, default_value_t = 16384)]
    length: usize,
    #[arg(long, default_value_t = 16000)]
    sample_rate: u32,
    /// Clipping level relative to the signal peak.
    #[arg(long, default_value_t = 0.2)]
    clip_ratio: f64,
    #[arg(long, value_enum, default_value_t = WavFormat::F32)]
    format: WavFormat,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Per-command fallbacks for the shared solver flags.
struct SolverDefaults {
    strategy: Strategy,
    order: usize,
    frame: usize,
    outer: usize,
    inner: usize,
}

/// Sidecar listing the missing samples of each channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskFile {
    pub len: usize,
    pub missing: Vec<Vec<usize>>,
}

/// Parses and runs a command line; returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Degrade(args) => run_degrade(args),
        Command::Reconstruct(args) => run_reconstruct(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::Demo(args) => run_demo(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

/// `--workers`, else `$REGAR_THREADS`, else the available parallelism.
pub fn resolve_workers(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        ensure!(n >= 1, "--workers must be at least 1");
        return Ok(n);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().with_context(|| format!("{THREADS_ENV}={v:?} is not a count"))?;
        ensure!(n >= 1, "{THREADS_ENV} must be at least 1");
        return Ok(n);
    }
    Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

pub fn parse_lambda_s(token: &str) -> Result<SignalWeight> {
    match token.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(SignalWeight::Indicator),
        other => {
            let w: f64 = other.parse().with_context(|| format!("--lambda-s {token:?} is neither a number nor inf"))?;
            Ok(SignalWeight::Finite(w).validate()?)
        }
    }
}

pub fn parse_accel(tokens: &[String]) -> Result<Acceleration> {
    let mut acc = Acceleration::default();
    for t in tokens {
        match t.trim().to_ascii_lowercase().as_str() {
            "fft" => acc.fft = true,
            "extrapolate" | "extrapolate-signal" => acc.extrapolate_signal = true,
            "extrapolate-coefs" => acc.extrapolate_coefs = true,
            "linesearch" | "line-search" => acc.line_search = true,
            "none" | "" => {}
            other => bail!("unknown acceleration {other:?}"),
        }
    }
    if acc.line_search && (acc.extrapolate_signal || acc.extrapolate_coefs) {
        bail!("line search cannot be combined with fixed extrapolation");
    }
    Ok(acc)
}

impl SolverArgs {
    fn pipeline(&self, d: SolverDefaults) -> Result<PipelineConfig> {
        let strategy = self.strategy.map(Strategy::from).unwrap_or(d.strategy);
        let order = self.order.unwrap_or(d.order);
        let outer = self.outer.unwrap_or(d.outer);
        let mut solver = SolverConfig::new(order, strategy);
        if let Some(l) = self.lambda_c {
            solver.lambda_c = l;
        }
        if let Some(l) = &self.lambda_s {
            solver.lambda_s = parse_lambda_s(l)?;
        }
        if let Some(g) = self.gamma_c {
            solver.gamma_c = g;
        }
        if let Some(g) = self.gamma_s {
            solver.gamma_s = g;
        }
        solver.inner_schedule = match &self.inner_schedule {
            Some(exps) => progressive_schedule(exps[0], exps[1], outer),
            None => vec![self.inner.unwrap_or(d.inner); outer],
        };
        if let Some(tokens) = &self.accel {
            solver.acceleration = parse_accel(tokens)?;
        }
        solver.tau_grid = default_tau_grid();
        if outer > 0 {
            solver.validate()?;
        }
        let frame_length = self.frame.unwrap_or(d.frame);
        ensure!(frame_length >= 1, "--frame must be at least 1");
        let hop = self.hop.unwrap_or((frame_length / 4).max(1));
        Ok(PipelineConfig {
            solver,
            frame_length,
            hop,
            workers: resolve_workers(self.workers)?,
            timings: !self.no_timings,
        })
    }
}

fn write_mask(path: &Path, mask: &MaskFile) -> Result<()> {
    let text = serde_json::to_string(mask)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

fn read_mask(path: &Path) -> Result<MaskFile> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed mask file {}", path.display()))
}

fn default_mask_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".mask.json");
    PathBuf::from(s)
}

fn run_degrade(args: DegradeArgs) -> Result<()> {
    let (audio, _) = read_wav(&args.input)?;
    let degradation = match args.mode {
        Mode::Clip => {
            ensure!(args.bits.is_none() && args.ratio.is_none(), "clip mode takes --theta only");
            let theta = args.theta.context("clip mode needs --theta")?;
            // the clipping level must survive the round trip through the file
            let snapped = args.format.snap(theta);
            ensure!(snapped > 0.0, "--theta {theta} rounds to zero in the output format");
            Degradation::Clip { theta: snapped }
        }
        Mode::Quantize => {
            ensure!(args.theta.is_none() && args.ratio.is_none(), "quantize mode takes --bits only");
            let word_length = args.bits.context("quantize mode needs --bits")?;
            println!("quantization step {} ({word_length} bits)", format_real(quantization_step(word_length)?));
            Degradation::Quantize { word_length }
        }
        Mode::Drop => {
            ensure!(args.theta.is_none() && args.bits.is_none(), "drop mode takes --ratio and --seed only");
            let ratio = args.ratio.context("drop mode needs --ratio")?;
            Degradation::Drop { ratio, seed: args.seed }
        }
    };
    let observations: Vec<Observation> = audio
        .channels
        .iter()
        .enumerate()
        .map(|(c, x)| degrade(x, degradation, c))
        .collect::<Result<_>>()?;
    let out = AudioBuffer::new(observations.iter().map(|o| o.samples().to_vec()).collect(), audio.sample_rate)?;
    write_wav(&args.output, &out, args.format)?;

    match degradation {
        Degradation::Clip { theta } => {
            let clipped: usize = out.channels.iter().flatten().filter(|v| v.abs() >= theta).count();
            println!("theta {} ({clipped} clipped samples)", format_real(theta));
        }
        Degradation::Drop { .. } => {
            let missing = observations
                .iter()
                .map(|o| match o {
                    Observation::Dropped { missing, .. } => missing.clone(),
                    _ => unreachable!("drop mode yields dropped observations"),
                })
                .collect::<Vec<_>>();
            let path = args.mask_out.unwrap_or_else(|| default_mask_path(&args.output));
            write_mask(&path, &MaskFile { len: audio.len(), missing })?;
            println!("mask written to {}", path.display());
        }
        Degradation::Quantize { .. } => {}
    }
    Ok(())
}

/// Interprets the input channels according to the strategy and side information.
fn observations_for(
    audio: &AudioBuffer,
    format: WavFormat,
    strategy: Strategy,
    theta: Option<f64>,
    bits: Option<u32>,
    mask: Option<&Path>,
) -> Result<Vec<Observation>> {
    if let Some(path) = mask {
        ensure!(
            matches!(strategy, Strategy::Inpaint | Strategy::Declip),
            "a missing-sample mask needs the inpaint or declip strategy"
        );
        let m = read_mask(path)?;
        ensure!(m.len == audio.len(), "mask covers {} samples, audio has {}", m.len, audio.len());
        ensure!(m.missing.len() == audio.n_channels(), "mask has {} channels, audio has {}", m.missing.len(), audio.n_channels());
        return Ok(audio
            .channels
            .iter()
            .zip(m.missing)
            .map(|(y, missing)| Observation::Dropped { y: y.clone(), missing })
            .collect());
    }
    match strategy {
        Strategy::Dequant => {
            let word_length = bits.context("the dequant strategy needs --bits")?;
            Ok(audio.channels.iter().map(|y| Observation::Quantized { y: y.clone(), word_length }).collect())
        }
        _ => {
            ensure!(bits.is_none(), "--bits applies only to the dequant strategy");
            let peak = audio.channels.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            let theta = format.snap(theta.unwrap_or(peak));
            ensure!(theta > 0.0, "clipping threshold must be positive (silent input?)");
            Ok(audio.channels.iter().map(|y| Observation::Clipped { y: y.clone(), theta }).collect())
        }
    }
}

fn check_same_shape(a: &AudioBuffer, b: &AudioBuffer, what: &str) -> Result<()> {
    ensure!(
        a.n_channels() == b.n_channels() && a.len() == b.len(),
        "{what} has {} channels x {} samples, expected {} x {}",
        b.n_channels(),
        b.len(),
        a.n_channels(),
        a.len()
    );
    Ok(())
}

/// Fills the SDR columns and the aggregates of per-channel row blocks.
fn finish_report(
    mut blocks: Vec<Vec<FrameRow>>,
    estimate: &[Vec<f64>],
    reference: Option<&[Vec<f64>]>,
    degraded: Option<&[Vec<f64>]>,
    layout: &FrameLayout,
    wall_seconds: f64,
) -> Result<Report> {
    let mut channel_sdr = Vec::new();
    let mut channel_delta = Vec::new();
    if let Some(reference) = reference {
        for (c, rows) in blocks.iter_mut().enumerate() {
            let sdrs = frame_sdr(&reference[c], &estimate[c], layout)?;
            let deltas = match degraded {
                Some(d) => frame_delta_sdr(&reference[c], &d[c], &estimate[c], layout)?,
                None => vec![None; layout.n_frames],
            };
            for ((row, s), d) in rows.iter_mut().zip(sdrs).zip(deltas) {
                row.sdr_db = s;
                row.delta_sdr_db = d;
            }
            let out = sdr(&reference[c], &estimate[c]).ok();
            channel_sdr.push(out);
            channel_delta.push(match (out, degraded) {
                (Some(o), Some(d)) => sdr(&reference[c], &d[c]).ok().map(|i| regar_core::metrics::difference_db(o, i)),
                _ => None,
            });
        }
    }
    let n_frames = layout.n_frames;
    let mut rows: Vec<FrameRow> = Vec::new();
    for (c, block) in blocks.into_iter().enumerate() {
        for mut row in block {
            row.frame_index += c * n_frames;
            rows.push(row);
        }
    }
    let consistency: Vec<f64> = rows.iter().filter_map(|r| r.consistency_sq).collect();
    let aggregate = Aggregate {
        channels: estimate.len(),
        frames: rows.len(),
        sdr_db: mean_db(channel_sdr),
        delta_sdr_db: mean_db(channel_delta),
        mean_frame_sdr_db: mean_db(rows.iter().map(|r| r.sdr_db)),
        mean_frame_delta_sdr_db: mean_db(rows.iter().map(|r| r.delta_sdr_db)),
        consistency_sq: (!consistency.is_empty()).then(|| consistency.iter().sum()),
        wall_seconds,
    };
    Ok(Report { rows, aggregate })
}

fn rows_from_outcomes(result: &ChannelResult) -> Vec<FrameRow> {
    result
        .frames
        .iter()
        .map(|f| FrameRow {
            frame_index: f.frame_index,
            consistency_sq: Some(f.consistency_sq),
            outer_iter: Some(f.outer_iter),
            objective: f.objective,
            inner_iters: Some(f.inner_iters),
            wall_ms: Some(f.wall_ms),
            ..FrameRow::default()
        })
        .collect()
}

fn print_summary(report: &Report) {
    let a = &report.aggregate;
    let show = |v: Option<f64>| v.map(format_real).unwrap_or_else(|| "-".into());
    println!(
        "frames {}  sdr_db {}  delta_sdr_db {}  consistency_sq {}",
        a.frames,
        show(a.sdr_db),
        show(a.delta_sdr_db),
        show(a.consistency_sq)
    );
}

/// Runs the pipeline on every channel and assembles output audio and report.
fn restore(
    observations: &[Observation],
    cfg: &PipelineConfig,
    sample_rate: u32,
    reference: Option<&[Vec<f64>]>,
) -> Result<(AudioBuffer, Report)> {
    let started = Instant::now();
    let results: Vec<ChannelResult> =
        observations.iter().map(|o| reconstruct_channel(o, cfg)).collect::<Result<_>>()?;
    let wall = if cfg.timings { started.elapsed().as_secs_f64() } else { 0.0 };
    let estimate: Vec<Vec<f64>> = results.iter().map(|r| r.signal.clone()).collect();
    let degraded: Vec<Vec<f64>> = observations.iter().map(|o| o.samples().to_vec()).collect();
    let layout = FrameLayout::new(estimate[0].len(), cfg.frame_length, cfg.hop)?;
    let blocks = results.iter().map(rows_from_outcomes).collect();
    let report = finish_report(blocks, &estimate, reference, Some(&degraded), &layout, wall)?;
    Ok((AudioBuffer::new(estimate, sample_rate)?, report))
}

fn run_reconstruct(args: ReconstructArgs) -> Result<()> {
    let (audio, input_format) = read_wav(&args.input)?;
    ensure!(!audio.is_empty(), "{} holds no samples", args.input.display());
    let cfg = args.solver.pipeline(SolverDefaults {
        strategy: Strategy::Declip,
        order: 32,
        frame: 2048,
        outer: 10,
        inner: 1000,
    })?;
    let observations = observations_for(
        &audio,
        input_format,
        cfg.solver.strategy,
        args.theta,
        args.bits,
        args.mask.as_deref(),
    )?;
    let reference = match &args.reference {
        Some(p) => {
            let (r, _) = read_wav(p)?;
            check_same_shape(&audio, &r, "reference")?;
            Some(r.channels)
        }
        None => None,
    };
    let (restored, report) = restore(&observations, &cfg, audio.sample_rate, reference.as_deref())?;
    write_wav(&args.output, &restored, args.format.unwrap_or(input_format))?;
    for path in &args.report {
        write_report(&report, path)?;
    }
    print_summary(&report);
    Ok(())
}

fn run_evaluate(args: EvaluateArgs) -> Result<()> {
    let (reference, _) = read_wav(&args.reference)?;
    let (estimate, _) = read_wav(&args.input)?;
    check_same_shape(&reference, &estimate, "estimate")?;
    ensure!(!reference.is_empty(), "reference holds no samples");
    let hop = args.hop.unwrap_or((args.frame / 4).max(1));
    let layout = FrameLayout::new(reference.len(), args.frame, hop)?;

    let degraded = match &args.degraded {
        Some(p) => {
            let (d, format) = read_wav(p)?;
            check_same_shape(&reference, &d, "degraded signal")?;
            Some((d, format))
        }
        None => None,
    };
    let observations = match &degraded {
        Some((d, format)) if args.theta.is_some() || args.bits.is_some() || args.mask.is_some() => {
            let strategy = if args.bits.is_some() { Strategy::Dequant } else { Strategy::Declip };
            Some(observations_for(d, *format, strategy, args.theta, args.bits, args.mask.as_deref())?)
        }
        _ => None,
    };

    let mut blocks = Vec::new();
    for c in 0..estimate.n_channels() {
        let mut rows: Vec<FrameRow> =
            (0..layout.n_frames).map(|k| FrameRow { frame_index: k, ..FrameRow::default() }).collect();
        if let Some(obs) = &observations {
            let specs = obs[c].frame_specs(&layout)?;
            let frames = segment(&estimate.channels[c], &layout)?;
            for ((row, spec), frame) in rows.iter_mut().zip(&specs).zip(&frames) {
                row.consistency_sq = Some(consistency_distance(frame, spec)?);
            }
        }
        blocks.push(rows);
    }
    let degraded_channels = degraded.as_ref().map(|(d, _)| d.channels.as_slice());
    let report = finish_report(blocks, &estimate.channels, Some(&reference.channels), degraded_channels, &layout, 0.0)?;
    for path in &args.report {
        write_report(&report, path)?;
    }
    print_summary(&report);
    Ok(())
}

fn run_demo(args: DemoArgs) -> Result<()> {
    ensure!(args.clip_ratio > 0.0 && args.clip_ratio <= 1.0, "--clip-ratio must lie in (0, 1]");
    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let cfg = args.solver.pipeline(SolverDefaults {
        strategy: Strategy::Declip,
        order: args.synth_order,
        frame: 1024,
        outer: 5,
        inner: 200,
    })?;
    let (clean, _) = synthetic_ar_signal(args.seed, args.synth_order, args.length, 0.9)?;
    // stored as written, so that every later stage sees exactly the file contents
    let clean: Vec<f64> = clean.iter().map(|&v| args.format.snap(v)).collect();
    let peak = clean.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let theta = args.format.snap(args.clip_ratio * peak);

    let degradation = match cfg.solver.strategy {
        Strategy::Dequant => bail!("the demo clips its input; use declip, glp or inpaint"),
        _ => Degradation::Clip { theta },
    };
    let observation = degrade(&clean, degradation, 0)?;
    let clean_audio = AudioBuffer::mono(clean.clone(), args.sample_rate);
    let degraded_audio = AudioBuffer::mono(observation.samples().to_vec(), args.sample_rate);
    write_wav(&args.out_dir.join("clean.wav"), &clean_audio, args.format)?;
    write_wav(&args.out_dir.join("degraded.wav"), &degraded_audio, args.format)?;

    let (restored, report) = restore(&[observation], &cfg, args.sample_rate, Some(&[clean]))?;
    write_wav(&args.out_dir.join("restored.wav"), &restored, args.format)?;
    write_report(&report, &args.out_dir.join("report.csv"))?;
    write_report(&report, &args.out_dir.join("report.json"))?;
    println!("theta {}", format_real(theta));
    print_summary(&report);
    Ok(())
}
