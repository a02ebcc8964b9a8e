//! Audio restoration with regularized AR models: WAV IO, synthetic test
//! signals, a frame-parallel reconstruction pipeline, reports and the `regar`
//! command line. The numerical work lives in [`regar_core`].

pub mod audio;
pub mod cli;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use regar_core as core;
