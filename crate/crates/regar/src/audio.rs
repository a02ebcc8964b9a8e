//! WAV reading and writing (PCM 16/24-bit and 32-bit float).

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

/// Sample encoding of a WAV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum WavFormat {
    #[value(name = "f32")]
    F32,
    #[value(name = "pcm16")]
    Pcm16,
    #[value(name = "pcm24")]
    Pcm24,
}

impl WavFormat {
    fn spec(self, channels: u16, sample_rate: u32) -> WavSpec {
        let (bits_per_sample, sample_format) = match self {
            WavFormat::F32 => (32, SampleFormat::Float),
            WavFormat::Pcm16 => (16, SampleFormat::Int),
            WavFormat::Pcm24 => (24, SampleFormat::Int),
        };
        WavSpec { channels, sample_rate, bits_per_sample, sample_format }
    }

    fn pcm_scale(self) -> Option<f64> {
        match self {
            WavFormat::F32 => None,
            WavFormat::Pcm16 => Some(32768.0),
            WavFormat::Pcm24 => Some(8_388_608.0),
        }
    }

    /// The nearest value representable in this format (magnitudes within [−1, 1]
    /// for PCM). Used to place clipping levels exactly on the sample grid.
    pub fn snap(self, value: f64) -> f64 {
        match self.pcm_scale() {
            None => value as f32 as f64,
            Some(scale) => {
                let code = (value * scale).round().clamp(-scale, scale - 1.0);
                code / scale
            }
        }
    }
}

/// Multichannel audio with equal-length channels.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub channels: Vec<Vec<f64>>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Result<Self> {
        ensure!(!channels.is_empty(), "audio needs at least one channel");
        let len = channels[0].len();
        ensure!(channels.iter().all(|c| c.len() == len), "channels have different lengths");
        Ok(Self { channels, sample_rate })
    }

    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self { channels: vec![samples], sample_rate }
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Reads a WAV file. Integer PCM is scaled by `2^{bits−1}` into `[−1, 1)`.
pub fn read_wav(path: &Path) -> Result<(AudioBuffer, WavFormat)> {
    let reader = WavReader::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let spec = reader.spec();
    let format = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => WavFormat::F32,
        (SampleFormat::Int, 16) => WavFormat::Pcm16,
        (SampleFormat::Int, 24) => WavFormat::Pcm24,
        (f, b) => bail!("unsupported WAV encoding in {}: {b}-bit {f:?}", path.display()),
    };
    let interleaved: Vec<f64> = match format.pcm_scale() {
        None => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>(),
        Some(scale) => reader
            .into_samples::<i32>()
            .map(|s| s.map(|v| f64::from(v) / scale))
            .collect::<std::result::Result<_, _>>(),
    }
    .with_context(|| format!("truncated or corrupt WAV data in {}", path.display()))?;

    let n_channels = usize::from(spec.channels);
    ensure!(n_channels >= 1, "WAV file declares zero channels");
    ensure!(interleaved.len().is_multiple_of(n_channels), "truncated final frame in {}", path.display());
    let mut channels = vec![Vec::with_capacity(interleaved.len() / n_channels); n_channels];
    for (i, v) in interleaved.into_iter().enumerate() {
        channels[i % n_channels].push(v);
    }
    Ok((AudioBuffer::new(channels, spec.sample_rate)?, format))
}

/// Writes a WAV file. PCM output rejects samples outside `[−1, 1]`; `1.0` maps
/// to the largest code. Float output keeps any finite value.
pub fn write_wav(path: &Path, audio: &AudioBuffer, format: WavFormat) -> Result<()> {
    let n_channels = u16::try_from(audio.n_channels()).context("too many channels")?;
    let spec = format.spec(n_channels, audio.sample_rate);
    let mut writer =
        WavWriter::create(path, spec).with_context(|| format!("cannot write {}", path.display()))?;
    for i in 0..audio.len() {
        for (c, channel) in audio.channels.iter().enumerate() {
            let v = channel[i];
            ensure!(v.is_finite(), "non-finite sample {i} on channel {c}");
            match format.pcm_scale() {
                None => writer.write_sample(v as f32)?,
                Some(scale) => {
                    ensure!(
                        (-1.0..=1.0).contains(&v),
                        "sample {i} on channel {c} is {v}, outside [-1, 1]; PCM output does not clip"
                    );
                    let code = (v * scale).round().min(scale - 1.0) as i32;
                    writer.write_sample(code)?;
                }
            }
        }
    }
    writer.finalize()?;
    Ok(())
}
