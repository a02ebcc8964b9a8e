//! Alternate convex search over the AR coefficients and the signal.
//!
//! Each outer iteration solves the coefficient subproblem with the signal
//! fixed, then re-estimates the signal with the new coefficients. Both
//! subproblems are solved approximately by Douglas–Rachford, and their states
//! persist across outer iterations so every inner solve is warm-started.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use thiserror::Error as ThisError;

use crate::armodel::{
    autocorrelation, levinson_durbin, objective, ArCoefficients, ObjectiveValue, TimeFrame,
};
use crate::degrade::{ReliabilityMasks, SampleClass};
use crate::error::{Error, Result};
use crate::fastops::{circulant_embed_filter, prox_regularizer_extended, CirculantQuadratic};
use crate::metrics::sdr;
use crate::prox::{prox_signal_in_place, shrink, ConsistencySpec, DenseQuadratic, SignalWeight};
use crate::solver::accel::{extrapolate, extrapolate_coefficients, extrapolation_steps, line_search};
use crate::solver::config::{SolverConfig, Strategy};
use crate::solver::dra::DraState;
use crate::solver::janssen::{glp_rectify, janssen_with_mask};

/// Above this magnitude the coefficients are considered to have blown up.
pub const COEFFICIENT_LIMIT: f64 = 1e6;

/// Reuses a DRA state when its dimension still fits, otherwise starts at `z0`.
fn reuse_state(slot: &mut Option<DraState>, dim: usize, z0: impl FnOnce() -> Vec<f64>) -> &mut DraState {
    if slot.as_ref().is_none_or(|s| s.dim() != dim) {
        *slot = Some(DraState::new(z0()));
    }
    slot.as_mut().expect("state initialized above")
}

/// The DRA step actually used: the configured relative step divided by the
/// mean curvature of the quadratic term (the energy of the convolution
/// filter), which makes the step invariant to signal scaling.
pub fn effective_step(relative: f64, filter_energy: f64) -> f64 {
    if filter_energy > 0.0 && filter_energy.is_finite() {
        relative / filter_energy
    } else {
        relative
    }
}

fn padded(head: &[f64], len: usize) -> Vec<f64> {
    let mut v = alloc::vec![0.0; len];
    v[..head.len()].copy_from_slice(head);
    v
}

fn toeplitz_from_autocorrelation(r: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| r.get(i.abs_diff(j)).copied().unwrap_or(0.0))
}

/// Warm-startable solver for `min_a ½‖e(a, x)‖² + λ_C‖a‖₁` with `a₁ = 1`.
///
/// The DRA variable is the free part `a[1..]` (dense path) or that free part
/// followed by a zero tail of the circulant embedding (FFT path).
#[derive(Debug, Clone, Default)]
pub struct CoefficientStep {
    state: Option<DraState>,
}

impl CoefficientStep {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(
        &mut self,
        x: &[f64],
        a_prev: &[f64],
        cfg: &SolverConfig,
        iters: usize,
    ) -> Result<ArCoefficients> {
        let p = cfg.order;
        let n = x.len();
        if a_prev.len() != p + 1 {
            return Err(Error::DimensionMismatch { expected: p + 1, actual: a_prev.len() });
        }
        if p >= n {
            return Err(Error::OrderTooLarge { order: p, len: n });
        }
        if p == 0 {
            return Ok(ArCoefficients::identity(0));
        }
        let lambda = cfg.lambda_c;
        if !(lambda >= 0.0) {
            return Err(Error::NegativeWeight(lambda));
        }
        let free = &a_prev[1..];
        let gamma = effective_step(cfg.gamma_c, autocorrelation(x, 0)[0]);

        let u = if cfg.acceleration.fft {
            let op = circulant_embed_filter(x, p);
            let l = op.len();
            // e[m + 1] = x[m + 1] + (T b)[m]; the row e[0] = x[0] is constant
            let mut offset = alloc::vec![0.0; l];
            offset[..n - 1].copy_from_slice(&x[1..]);
            let mut quad = CirculantQuadratic::new(op, &offset)?;
            let mut prox_f = |v: &[f64], g: f64, out: &mut [f64]| quad.apply(v, g, out);
            let mut prox_g = |v: &[f64], g: f64, out: &mut [f64]| {
                out.copy_from_slice(v);
                prox_regularizer_extended(out, p, |head| {
                    head.iter_mut().for_each(|b| *b = shrink(*b, g * lambda))
                });
                Ok(())
            };
            let state = reuse_state(&mut self.state, l, || padded(free, l));
            state.run(&mut prox_f, &mut prox_g, gamma, iters)?[..p].to_vec()
        } else {
            let r = autocorrelation(x, p);
            let mut quad = DenseQuadratic::from_gram(toeplitz_from_autocorrelation(&r[..p], p), r[1..].to_vec());
            let mut prox_f = |v: &[f64], g: f64, out: &mut [f64]| quad.apply(v, g, out);
            let mut prox_g = |v: &[f64], g: f64, out: &mut [f64]| {
                for (o, &b) in out.iter_mut().zip(v) {
                    *o = shrink(b, g * lambda);
                }
                Ok(())
            };
            let state = reuse_state(&mut self.state, p, || free.to_vec());
            state.run(&mut prox_f, &mut prox_g, gamma, iters)?.to_vec()
        };
        Ok(ArCoefficients::from_free(&u))
    }

    /// Moves the warm start by `delta` on the free coefficients.
    pub fn translate(&mut self, delta: &[f64]) {
        if let Some(s) = &mut self.state {
            s.translate(delta);
        }
    }
}

/// Warm-startable solver for `min_x ½‖e(a, x)‖² + λ_S·f_S(x)`.
#[derive(Debug, Clone, Default)]
pub struct SignalStep {
    state: Option<DraState>,
}

impl SignalStep {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(
        &mut self,
        a: &[f64],
        x_prev: &[f64],
        cfg: &SolverConfig,
        spec: &ConsistencySpec,
        iters: usize,
    ) -> Result<Vec<f64>> {
        let n = spec.len();
        if x_prev.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: x_prev.len() });
        }
        if a.first() != Some(&1.0) || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedSpec("AR coefficients must be finite with a leading 1"));
        }
        let weight = cfg.lambda_s.validate()?;
        let gamma = effective_step(cfg.gamma_s, a.iter().map(|v| v * v).sum());

        if cfg.acceleration.fft {
            let op = circulant_embed_filter(a, n);
            let l = op.len();
            let zeros = alloc::vec![0.0; l];
            let mut quad = CirculantQuadratic::new(op, &zeros)?;
            let mut prox_f = |v: &[f64], g: f64, out: &mut [f64]| quad.apply(v, g, out);
            let mut prox_g = |v: &[f64], g: f64, out: &mut [f64]| {
                out.copy_from_slice(v);
                prox_regularizer_extended(out, n, |head| {
                    prox_signal_in_place(head, weight.scaled(g), spec)
                });
                Ok(())
            };
            let state = reuse_state(&mut self.state, l, || padded(x_prev, l));
            Ok(state.run(&mut prox_f, &mut prox_g, gamma, iters)?[..n].to_vec())
        } else {
            let r = autocorrelation(a, a.len() - 1);
            let mut quad = DenseQuadratic::from_gram(toeplitz_from_autocorrelation(&r, n), alloc::vec![0.0; n]);
            let mut prox_f = |v: &[f64], g: f64, out: &mut [f64]| quad.apply(v, g, out);
            let mut prox_g = |v: &[f64], g: f64, out: &mut [f64]| {
                out.copy_from_slice(v);
                prox_signal_in_place(out, weight.scaled(g), spec);
                Ok(())
            };
            let state = reuse_state(&mut self.state, n, || x_prev.to_vec());
            Ok(state.run(&mut prox_f, &mut prox_g, gamma, iters)?.to_vec())
        }
    }

    pub fn translate(&mut self, delta: &[f64]) {
        if let Some(s) = &mut self.state {
            s.translate(delta);
        }
    }
}

/// One cold-started coefficient update from `a_prev`.
pub fn update_coefficients(
    x: &[f64],
    a_prev: &[f64],
    cfg: &SolverConfig,
    iters: usize,
) -> Result<ArCoefficients> {
    CoefficientStep::new().solve(x, a_prev, cfg, iters)
}

/// One cold-started signal update from `x_prev`. With `λ_S = ∞` the result
/// lies in Γ exactly.
pub fn update_signal(
    a: &[f64],
    x_prev: &[f64],
    cfg: &SolverConfig,
    spec: &ConsistencySpec,
    iters: usize,
) -> Result<TimeFrame> {
    TimeFrame::new(SignalStep::new().solve(a, x_prev, cfg, spec, iters)?)
}

/// Whether `strategy` can run on the observation behind `spec`.
pub fn strategy_accepts(strategy: Strategy, spec: &ConsistencySpec) -> bool {
    matches!(
        (strategy, spec),
        (Strategy::Inpaint | Strategy::Declip, ConsistencySpec::Declip { .. } | ConsistencySpec::Inpaint { .. })
            | (Strategy::Glp, ConsistencySpec::Declip { .. })
            | (Strategy::Dequant, ConsistencySpec::Dequant { .. })
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// 1-based outer iteration index.
    pub outer: usize,
    pub objective: ObjectiveValue,
    pub inner_iters: usize,
    pub wall_seconds: f64,
    /// SDR against the ground truth, when one was supplied.
    pub sdr_db: Option<f64>,
    /// `‖a⁽ⁱ⁾ − a⁽ⁱ⁻¹⁾‖ / ‖a⁽ⁱ⁾‖`.
    pub coef_change: f64,
    pub tau_signal: f64,
    pub tau_coefs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AcsTrace {
    pub records: Vec<IterationRecord>,
}

impl AcsTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective.total).collect()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcsOutput {
    pub coefficients: ArCoefficients,
    pub signal: TimeFrame,
    pub trace: AcsTrace,
}

/// An aborted run together with the iterations completed before the error.
#[derive(Debug, Clone, PartialEq, ThisError)]
#[error("{error} (after {} outer iterations)", trace.len())]
pub struct AcsAbort {
    pub error: Error,
    pub trace: AcsTrace,
}

/// The set and weight the objective is reported against. Janssen-based
/// strategies keep the reliable samples fixed, so they are measured against
/// the indicator of their own constraint set.
fn objective_target(spec: &ConsistencySpec, cfg: &SolverConfig) -> Result<(ConsistencySpec, SignalWeight)> {
    match (cfg.strategy, spec) {
        (Strategy::Inpaint, ConsistencySpec::Declip { y, masks, .. }) => {
            let labels = masks
                .labels()
                .iter()
                .map(|&c| if c == SampleClass::Reliable { c } else { SampleClass::Missing })
                .collect();
            let y = y.iter().zip(masks.labels()).map(|(&v, &c)| if c == SampleClass::Reliable { v } else { 0.0 }).collect();
            Ok((ConsistencySpec::inpaint(y, ReliabilityMasks::from_labels(labels))?, SignalWeight::Indicator))
        }
        (Strategy::Inpaint | Strategy::Glp, _) => Ok((spec.clone(), SignalWeight::Indicator)),
        _ => Ok((spec.clone(), cfg.lambda_s.validate()?)),
    }
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn difference(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Runs the full ACS loop without timing.
pub fn acs_run(
    spec: &ConsistencySpec,
    cfg: &SolverConfig,
    ground_truth: Option<&[f64]>,
) -> core::result::Result<AcsOutput, AcsAbort> {
    acs_run_timed(spec, cfg, ground_truth, &|| 0.0)
}

/// Runs the full ACS loop; `now` returns a monotonic time in seconds.
pub fn acs_run_timed(
    spec: &ConsistencySpec,
    cfg: &SolverConfig,
    ground_truth: Option<&[f64]>,
    now: &dyn Fn() -> f64,
) -> core::result::Result<AcsOutput, AcsAbort> {
    let mut trace = AcsTrace::default();
    match acs_loop(spec, cfg, ground_truth, now, &mut trace) {
        Ok((coefficients, signal)) => Ok(AcsOutput { coefficients, signal, trace }),
        Err(error) => Err(AcsAbort { error, trace }),
    }
}

fn acs_loop(
    spec: &ConsistencySpec,
    cfg: &SolverConfig,
    ground_truth: Option<&[f64]>,
    now: &dyn Fn() -> f64,
    trace: &mut AcsTrace,
) -> Result<(ArCoefficients, TimeFrame)> {
    cfg.validate()?;
    let n = spec.len();
    if n == 0 {
        return Err(Error::EmptySignal);
    }
    if !strategy_accepts(cfg.strategy, spec) {
        return Err(Error::InvalidConfig("strategy does not match the observation type"));
    }
    if let Some(truth) = ground_truth {
        if truth.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: truth.len() });
        }
    }
    let p = cfg.order;
    let (target, weight) = objective_target(spec, cfg)?;
    let q = |a: &[f64], x: &[f64]| objective(a, x, cfg.lambda_c, weight, &target);

    let reliable: Vec<bool> = match spec.masks() {
        Some(m) => m.labels().iter().map(|&c| c == SampleClass::Reliable).collect(),
        None => alloc::vec![true; n],
    };
    let observed = x_observed(spec);
    let mut x = observed.clone();
    let mut a = match levinson_durbin(&x, p) {
        Ok(a) => a.into_vec(),
        Err(Error::DegenerateAutocorrelation) => ArCoefficients::identity(p).into_vec(),
        Err(e) => return Err(e),
    };

    let outer = cfg.outer_iters();
    let acc = cfg.acceleration;
    let mut coef_step = CoefficientStep::new();
    let mut signal_step = SignalStep::new();

    for (i, &iters) in (1..=outer).zip(&cfg.inner_schedule) {
        let started = now();
        let (tau_s, tau_c) = extrapolation_steps(i, outer);
        let tau_s = if acc.extrapolate_signal { tau_s } else { 0.0 };
        let tau_c = if acc.extrapolate_coefs { tau_c } else { 0.0 };

        let a_half = coef_step.solve(&x, &a, cfg, iters)?.into_vec();
        let a_next = if tau_c > 0.0 {
            let moved = extrapolate_coefficients(&a_half, &a, tau_c);
            coef_step.translate(&difference(&moved[1..], &a_half[1..]));
            moved
        } else {
            a_half.clone()
        };

        let x_half = match cfg.strategy {
            Strategy::Inpaint => janssen_with_mask(&a_next, &observed, &reliable)?,
            Strategy::Glp => glp_rectify(&janssen_with_mask(&a_next, &observed, &reliable)?, spec)?,
            Strategy::Declip | Strategy::Dequant => signal_step.solve(&a_next, &x, cfg, spec, iters)?,
        };
        let mut x_next = if tau_s > 0.0 {
            let mut moved = extrapolate(&x_half, &x, tau_s);
            if weight == SignalWeight::Indicator {
                target.project_in_place(&mut moved);
            }
            signal_step.translate(&difference(&moved, &x_half));
            moved
        } else {
            x_half.clone()
        };
        let mut a_next = a_next;
        let (mut tau_s, mut tau_c) = (tau_s, tau_c);

        if acc.line_search {
            // under a hard constraint the ray is followed through its projection
            // onto Γ; x_half is feasible already, so τ = 0 is unaffected
            let repaired = |x: &[f64]| {
                let mut v = x.to_vec();
                if weight == SignalWeight::Indicator {
                    target.project_in_place(&mut v);
                }
                v
            };
            let mut found = line_search(&a_half, &a, &x_half, &x, |a, x| q(a, &repaired(x)).total, &cfg.tau_grid);
            found.x = repaired(&found.x);
            coef_step.translate(&difference(&found.a[1..], &a_half[1..]));
            signal_step.translate(&difference(&found.x, &x_half));
            a_next = found.a;
            x_next = found.x;
            tau_s = found.tau;
            tau_c = found.tau;
        }

        let max_abs = a_next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(max_abs <= COEFFICIENT_LIMIT) {
            return Err(Error::CoefficientBlowup { iteration: i, max_abs });
        }
        let change = norm(&difference(&a_next, &a));
        let coef_change = if change == 0.0 { 0.0 } else { change / norm(&a_next) };

        a = a_next;
        x = x_next;
        trace.records.push(IterationRecord {
            outer: i,
            objective: q(&a, &x),
            inner_iters: iters,
            wall_seconds: now() - started,
            sdr_db: ground_truth.and_then(|t| sdr(t, &x).ok()),
            coef_change,
            tau_signal: tau_s,
            tau_coefs: tau_c,
        });
    }
    Ok((ArCoefficients::new(a)?, TimeFrame::new(x)?))
}

/// The observed samples with unobserved entries zeroed.
fn x_observed(spec: &ConsistencySpec) -> Vec<f64> {
    match spec.masks() {
        Some(m) => spec
            .observed()
            .iter()
            .zip(m.labels())
            .map(|(&v, &c)| if c == SampleClass::Missing { 0.0 } else { v })
            .collect(),
        None => spec.observed().to_vec(),
    }
}
