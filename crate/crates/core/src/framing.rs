//! Frame segmentation (rectangular analysis) and normalized overlap-add
//! synthesis.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Frames of `frame_length` samples every `hop` samples, starting at sample 0.
/// The last frame is zero-padded past the end of the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub frame_length: usize,
    pub hop: usize,
    pub n_frames: usize,
    pub signal_len: usize,
}

impl FrameLayout {
    pub fn new(signal_len: usize, frame_length: usize, hop: usize) -> Result<Self> {
        if signal_len == 0 {
            return Err(Error::EmptySignal);
        }
        if frame_length == 0 {
            return Err(Error::InvalidLayout("frame length must be at least 1"));
        }
        if hop == 0 || hop > frame_length {
            return Err(Error::InvalidLayout("hop must lie in 1..=frame_length"));
        }
        Ok(Self { frame_length, hop, n_frames: signal_len.div_ceil(hop), signal_len })
    }

    pub fn frame_start(&self, k: usize) -> usize {
        k * self.hop
    }

    /// Zero samples appended after the signal to fill the last frame.
    pub fn trailing_pad(&self) -> usize {
        (self.frame_start(self.n_frames - 1) + self.frame_length).saturating_sub(self.signal_len)
    }

    /// Number of real (non-padding) samples in frame `k`.
    pub fn valid_len(&self, k: usize) -> usize {
        self.frame_length.min(self.signal_len - self.frame_start(k))
    }
}

pub fn segment(x: &[f64], layout: &FrameLayout) -> Result<Vec<Vec<f64>>> {
    if x.is_empty() {
        return Err(Error::EmptySignal);
    }
    if x.len() != layout.signal_len {
        return Err(Error::DimensionMismatch { expected: layout.signal_len, actual: x.len() });
    }
    Ok((0..layout.n_frames)
        .map(|k| {
            let start = layout.frame_start(k);
            let mut frame = alloc::vec![0.0; layout.frame_length];
            let n = layout.valid_len(k);
            frame[..n].copy_from_slice(&x[start..start + n]);
            frame
        })
        .collect())
}

/// `g[n] = sin(π(n + ½)/w)`.
pub fn sine_window(w: usize) -> Vec<f64> {
    (0..w)
        .map(|n| libm::sin(core::f64::consts::PI * (n as f64 + 0.5) / w as f64))
        .collect()
}

/// `Σ_k shift(g ⊙ frame_k) / Σ_k shift(g)`, accumulated in ascending `k`.
pub fn overlap_add(frames: &[Vec<f64>], layout: &FrameLayout, window: &[f64]) -> Result<Vec<f64>> {
    if frames.len() != layout.n_frames {
        return Err(Error::DimensionMismatch { expected: layout.n_frames, actual: frames.len() });
    }
    if window.len() != layout.frame_length {
        return Err(Error::DimensionMismatch { expected: layout.frame_length, actual: window.len() });
    }
    let total = layout.signal_len + layout.trailing_pad();
    let mut acc = alloc::vec![0.0; total];
    let mut weight = alloc::vec![0.0; total];
    for (k, frame) in frames.iter().enumerate() {
        if frame.len() != layout.frame_length {
            return Err(Error::DimensionMismatch { expected: layout.frame_length, actual: frame.len() });
        }
        let start = layout.frame_start(k);
        for (n, (&v, &g)) in frame.iter().zip(window).enumerate() {
            acc[start + n] += g * v;
            weight[start + n] += g;
        }
    }
    acc.truncate(layout.signal_len);
    for (i, (a, &w)) in acc.iter_mut().zip(&weight).enumerate() {
        if w == 0.0 {
            return Err(Error::Uncovered(i));
        }
        *a /= w;
    }
    Ok(acc)
}
