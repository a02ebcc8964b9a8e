//! Forward degradation models: hard clipping, mid-riser uniform quantization
//! and sample dropping, plus the per-sample reliability labels they induce.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Class of a single observed sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleClass {
    Reliable,
    /// Saturated at `+theta`; the true value is `>= theta`.
    ClippedHigh,
    /// Saturated at `-theta`; the true value is `<= -theta`.
    ClippedLow,
    /// Entirely unobserved.
    Missing,
}

/// Per-sample labels. Each index carries exactly one class, so the reliable,
/// high, low and missing sets always partition `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReliabilityMasks {
    labels: Vec<SampleClass>,
}

impl ReliabilityMasks {
    pub fn from_labels(labels: Vec<SampleClass>) -> Self {
        Self { labels }
    }

    pub fn all_reliable(len: usize) -> Self {
        Self { labels: alloc::vec![SampleClass::Reliable; len] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[SampleClass] {
        &self.labels
    }

    pub fn class(&self, index: usize) -> SampleClass {
        self.labels[index]
    }

    pub fn is_reliable(&self, index: usize) -> bool {
        self.labels[index] == SampleClass::Reliable
    }

    fn indices_of(&self, class: SampleClass) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == class)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn reliable(&self) -> Vec<usize> {
        self.indices_of(SampleClass::Reliable)
    }

    pub fn high(&self) -> Vec<usize> {
        self.indices_of(SampleClass::ClippedHigh)
    }

    pub fn low(&self) -> Vec<usize> {
        self.indices_of(SampleClass::ClippedLow)
    }

    pub fn missing(&self) -> Vec<usize> {
        self.indices_of(SampleClass::Missing)
    }

    /// Every index that is not reliable (clipped or missing).
    pub fn unreliable(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != SampleClass::Reliable)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count(&self, class: SampleClass) -> usize {
        self.labels.iter().filter(|&&c| c == class).count()
    }

    /// Sub-range of the labels, used when framing a long observation.
    pub fn slice(&self, start: usize, len: usize, pad: SampleClass) -> Self {
        let labels = (start..start + len)
            .map(|i| self.labels.get(i).copied().unwrap_or(pad))
            .collect();
        Self { labels }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipObservation {
    pub y: Vec<f64>,
    pub theta: f64,
    pub masks: ReliabilityMasks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantObservation {
    pub y: Vec<f64>,
    pub word_length: u32,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropObservation {
    /// Observed samples; missing entries are stored as 0.
    pub y: Vec<f64>,
    pub masks: ReliabilityMasks,
}

fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteSample { index }),
        None => Ok(()),
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(theta))
    }
}

/// Saturates every sample with `|x_n| >= theta` to `theta * sgn(x_n)`.
pub fn hard_clip(x: &[f64], theta: f64) -> Result<ClipObservation> {
    check_theta(theta)?;
    check_finite(x)?;
    let y: Vec<f64> = x
        .iter()
        .map(|&v| if v.abs() < theta { v } else { theta.copysign(v) })
        .collect();
    let masks = derive_clip_masks(&y, theta)?;
    Ok(ClipObservation { y, theta, masks })
}

/// Labels samples with `|y_n| >= theta` as clipped. Magnitudes up to one ulp
/// above `theta` are accepted; anything further out is an error.
pub fn derive_clip_masks(y: &[f64], theta: f64) -> Result<ReliabilityMasks> {
    check_theta(theta)?;
    check_finite(y)?;
    let ulp = next_up(theta) - theta;
    let labels = y
        .iter()
        .enumerate()
        .map(|(index, &v)| {
            let mag = v.abs();
            if mag > theta + ulp {
                Err(Error::AboveThreshold { index, value: v, theta })
            } else if mag < theta {
                Ok(SampleClass::Reliable)
            } else if v > 0.0 {
                Ok(SampleClass::ClippedHigh)
            } else {
                Ok(SampleClass::ClippedLow)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReliabilityMasks { labels })
}

fn next_up(v: f64) -> f64 {
    f64::from_bits(v.to_bits() + 1)
}

/// Quantization step of a `word_length`-bit mid-riser quantizer on `[-1, 1]`.
pub fn quantization_step(word_length: u32) -> Result<f64> {
    if word_length < 1 {
        return Err(Error::InvalidWordLength(word_length));
    }
    Ok(libm::ldexp(1.0, 1 - word_length as i32))
}

/// Mid-riser uniform quantizer: `y = sgn⁺(x)·Δ·(⌊|x|/Δ⌋ + ½)`.
pub fn uniform_quantize(x: &[f64], word_length: u32) -> Result<QuantObservation> {
    let delta = quantization_step(word_length)?;
    check_finite(x)?;
    let y = x
        .iter()
        .map(|&v| {
            let sign = if v >= 0.0 { 1.0 } else { -1.0 };
            sign * delta * (libm::floor(v.abs() / delta) + 0.5)
        })
        .collect();
    Ok(QuantObservation { y, word_length, delta })
}

/// Keeps `x` on `reliable` and marks every other index missing (stored as 0).
pub fn drop_samples(x: &[f64], reliable: &[usize]) -> Result<DropObservation> {
    let mut labels = alloc::vec![SampleClass::Missing; x.len()];
    for &index in reliable {
        if index >= x.len() {
            return Err(Error::IndexOutOfRange { index, len: x.len() });
        }
        labels[index] = SampleClass::Reliable;
    }
    let y = x
        .iter()
        .zip(&labels)
        .map(|(&v, &c)| if c == SampleClass::Reliable { v } else { 0.0 })
        .collect();
    Ok(DropObservation { y, masks: ReliabilityMasks { labels } })
}
