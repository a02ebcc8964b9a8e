//! Regularized autoregressive modelling for audio restoration.
//!
//! The AR coefficients and the signal are estimated jointly by alternating
//! between two convex subproblems, each solved with Douglas–Rachford
//! splitting. The signal is tied to the observation through a consistency set
//! (clipping, quantization or missing samples). Quadratic proximal steps run
//! either on dense Toeplitz systems or on FFT-diagonalized circulant
//! embeddings.
//!
//! The crate is `no_std` and needs only `alloc`.
#![cfg_attr(not(test), no_std)]
// `!(v > 0.0)` style checks are used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod armodel;
pub mod degrade;
pub mod error;
pub mod fastops;
pub mod fft;
pub mod framing;
pub mod metrics;
pub mod prox;
pub mod solver;

pub use armodel::{
    autocorrelation, build_toeplitz, levinson_durbin, objective, residual, ArCoefficients,
    ObjectiveValue, TimeFrame,
};
pub use degrade::{
    derive_clip_masks, drop_samples, hard_clip, quantization_step, uniform_quantize,
    ClipObservation, DropObservation, QuantObservation, ReliabilityMasks, SampleClass,
};
pub use error::{Error, Result};
pub use fastops::{
    circulant_embed_filter, prox_quadratic_circulant, prox_regularizer_extended,
    CirculantOperator, CirculantQuadratic,
};
pub use framing::{overlap_add, segment, sine_window, FrameLayout};
pub use metrics::{consistency_distance, delta_sdr, sdr, sdr_on, FrameReport, ReconstructionReport};
pub use prox::{
    consistency_distance_sq, prox_quadratic_dense, prox_signal_penalty, project_consistency,
    shrink, soft_threshold_anchored, ConsistencySpec, DenseQuadratic, SignalWeight,
};
pub use solver::*;
