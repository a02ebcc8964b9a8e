//! Per-channel degradation and frame-parallel reconstruction.
//!
//! A channel is cut into rectangular frames, each frame gets its own
//! consistency set and an independent ACS run, and the restored frames are
//! joined by sine-window overlap-add. Frames are solved on a worker pool, but
//! every frame depends only on its own data and the results are collected and
//! summed in index order, so the output does not depend on the worker count.

use std::time::Instant;

use anyhow::{anyhow, bail, ensure, Context, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use regar_core::solver::{acs_run, SolverConfig};
use regar_core::{
    consistency_distance, derive_clip_masks, drop_samples, hard_clip, overlap_add,
    quantization_step, segment, sine_window, uniform_quantize, ConsistencySpec, FrameLayout,
    ReliabilityMasks, SampleClass,
};

/// A forward degradation applied to clean audio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Degradation {
    Clip { theta: f64 },
    Quantize { word_length: u32 },
    /// Drops `round(ratio·N)` uniformly chosen samples per channel.
    Drop { ratio: f64, seed: u64 },
}

/// One degraded channel together with what is known about the degradation.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    Clipped { y: Vec<f64>, theta: f64 },
    Quantized { y: Vec<f64>, word_length: u32 },
    Dropped { y: Vec<f64>, missing: Vec<usize> },
}

pub fn degrade(x: &[f64], degradation: Degradation, channel: usize) -> Result<Observation> {
    ensure!(!x.is_empty(), "cannot degrade an empty signal");
    Ok(match degradation {
        Degradation::Clip { theta } => Observation::Clipped { y: hard_clip(x, theta)?.y, theta },
        Degradation::Quantize { word_length } => {
            Observation::Quantized { y: uniform_quantize(x, word_length)?.y, word_length }
        }
        Degradation::Drop { ratio, seed } => {
            ensure!((0.0..=1.0).contains(&ratio), "drop ratio must lie in [0, 1], got {ratio}");
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(channel as u64));
            let n_missing = (ratio * x.len() as f64).round() as usize;
            let mut missing = sample(&mut rng, x.len(), n_missing).into_vec();
            missing.sort_unstable();
            let mut is_missing = vec![false; x.len()];
            missing.iter().for_each(|&i| is_missing[i] = true);
            let reliable: Vec<usize> = (0..x.len()).filter(|&i| !is_missing[i]).collect();
            Observation::Dropped { y: drop_samples(x, &reliable)?.y, missing }
        }
    })
}

impl Observation {
    pub fn samples(&self) -> &[f64] {
        match self {
            Self::Clipped { y, .. } | Self::Quantized { y, .. } | Self::Dropped { y, .. } => y,
        }
    }

    fn masks(&self) -> Result<Option<ReliabilityMasks>> {
        let Self::Dropped { y, missing } = self else {
            return Ok(None);
        };
        let mut labels = vec![SampleClass::Reliable; y.len()];
        for &i in missing {
            ensure!(i < y.len(), "missing index {i} out of range for {} samples", y.len());
            labels[i] = SampleClass::Missing;
        }
        Ok(Some(ReliabilityMasks::from_labels(labels)))
    }

    /// Consistency set of the whole channel.
    pub fn spec(&self) -> Result<ConsistencySpec> {
        let n = self.samples().len();
        self.spec_for(&FrameLayout::new(n, n, n)?, 0, self.masks()?.as_ref())
    }

    /// Consistency sets of every frame, re-derived from the framed observation.
    pub fn frame_specs(&self, layout: &FrameLayout) -> Result<Vec<ConsistencySpec>> {
        let masks = self.masks()?;
        (0..layout.n_frames).map(|k| self.spec_for(layout, k, masks.as_ref())).collect()
    }

    fn spec_for(&self, layout: &FrameLayout, k: usize, masks: Option<&ReliabilityMasks>) -> Result<ConsistencySpec> {
        let y = self.samples();
        let start = layout.frame_start(k);
        let mut frame = vec![0.0; layout.frame_length];
        let valid = layout.valid_len(k);
        frame[..valid].copy_from_slice(&y[start..start + valid]);
        Ok(match self {
            Self::Clipped { theta, .. } => {
                let frame_masks = derive_clip_masks(&frame, *theta)?;
                ConsistencySpec::declip(frame, *theta, frame_masks)?
            }
            Self::Quantized { word_length, .. } => {
                ConsistencySpec::dequant(frame, quantization_step(*word_length)?)?
            }
            Self::Dropped { .. } => {
                let masks = masks.expect("dropped observations always carry masks");
                ConsistencySpec::inpaint(frame, masks.slice(start, layout.frame_length, SampleClass::Reliable))?
            }
        })
    }
}

/// Framing, solver and threading settings of a reconstruction.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    pub frame_length: usize,
    pub hop: usize,
    pub workers: usize,
    /// Record wall-clock time per frame; off gives byte-reproducible reports.
    pub timings: bool,
}

/// What happened to one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub frame_index: usize,
    /// `½d_Γ²` of the restored frame before overlap-add.
    pub consistency_sq: f64,
    /// Outer iterations completed.
    pub outer_iter: usize,
    /// Final objective value, when the solver ran.
    pub objective: Option<f64>,
    /// Inner DRA iterations summed over the outer loop.
    pub inner_iters: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelResult {
    pub signal: Vec<f64>,
    pub frames: Vec<FrameOutcome>,
}

/// Restores one channel. With an empty inner schedule (zero outer iterations)
/// the frames pass through unchanged.
pub fn reconstruct_channel(observation: &Observation, cfg: &PipelineConfig) -> Result<ChannelResult> {
    let y = observation.samples();
    let layout = FrameLayout::new(y.len(), cfg.frame_length, cfg.hop)?;
    if cfg.solver.order >= cfg.frame_length {
        bail!("model order {} must be smaller than the frame length {}", cfg.solver.order, cfg.frame_length);
    }
    let passthrough = cfg.solver.inner_schedule.is_empty();
    if !passthrough {
        cfg.solver.validate()?;
    }
    let frames = segment(y, &layout)?;
    let specs = observation.frame_specs(&layout)?;

    let solve = |k: usize| -> Result<(Vec<f64>, FrameOutcome)> {
        let started = Instant::now();
        let spec = &specs[k];
        let (out, outer_iter, objective, inner_iters) = if passthrough {
            (frames[k].clone(), 0, None, 0)
        } else {
            let run = acs_run(spec, &cfg.solver, None)
                .map_err(|abort| anyhow!("frame {k}: {abort}"))?;
            let last = run.trace.last().map(|r| r.objective.total);
            let inner: usize = run.trace.records.iter().map(|r| r.inner_iters).sum();
            (run.signal.into_vec(), run.trace.len(), last, inner)
        };
        let consistency_sq = consistency_distance(&out, spec)?;
        let wall_ms = if cfg.timings { started.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
        Ok((out, FrameOutcome { frame_index: k, consistency_sq, outer_iter, objective, inner_iters, wall_ms }))
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .context("cannot start the worker pool")?;
    let solved: Vec<(Vec<f64>, FrameOutcome)> =
        pool.install(|| (0..layout.n_frames).into_par_iter().map(solve).collect::<Result<_>>())?;
    let (restored, outcomes): (Vec<_>, Vec<_>) = solved.into_iter().unzip();
    let signal = overlap_add(&restored, &layout, &sine_window(cfg.frame_length))?;
    Ok(ChannelResult { signal, frames: outcomes })
}
