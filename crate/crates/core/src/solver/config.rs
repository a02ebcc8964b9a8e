use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::prox::SignalWeight;
use crate::solver::accel::default_tau_grid;

/// How the signal is re-estimated after each coefficient update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Janssen: unreliable samples are treated as missing.
    Inpaint,
    /// Janssen followed by flipping constraint violations around `±θ`.
    Glp,
    /// Regularized signal update against the declipping (or inpainting) set.
    Declip,
    /// Regularized signal update against the dequantization box.
    Dequant,
}

/// Optional accelerations of the outer loop and the inner solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Acceleration {
    /// Circulant-embedded, FFT-diagonalized quadratic proxes.
    pub fft: bool,
    pub extrapolate_signal: bool,
    pub extrapolate_coefs: bool,
    pub line_search: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// AR order `p`.
    pub order: usize,
    pub lambda_c: f64,
    pub lambda_s: SignalWeight,
    /// Relative DRA step for the coefficient subproblem, in units of `1/‖x‖²`.
    pub gamma_c: f64,
    /// Relative DRA step for the signal subproblem, in units of `1/‖a‖²`.
    pub gamma_s: f64,
    /// Inner DRA iteration count per outer iteration; its length is the outer count.
    pub inner_schedule: Vec<usize>,
    pub strategy: Strategy,
    pub acceleration: Acceleration,
    /// Candidate extrapolation lengths for the line search (0 is always added).
    pub tau_grid: Vec<f64>,
}

impl SolverConfig {
    /// Consistent declipping defaults: `λ_C = 1e-3`, `λ_S = ∞`, unit steps,
    /// 10 outer × 1000 inner iterations on the FFT path.
    pub fn new(order: usize, strategy: Strategy) -> Self {
        Self {
            order,
            lambda_c: 1e-3,
            lambda_s: SignalWeight::Indicator,
            gamma_c: 1.0,
            gamma_s: 1.0,
            inner_schedule: alloc::vec![1000; 10],
            strategy,
            acceleration: Acceleration { fft: true, ..Acceleration::default() },
            tau_grid: default_tau_grid(),
        }
    }

    pub fn with_iterations(mut self, outer: usize, inner: usize) -> Self {
        self.inner_schedule = alloc::vec![inner; outer];
        self
    }

    pub fn outer_iters(&self) -> usize {
        self.inner_schedule.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_c >= 0.0 && self.lambda_c.is_finite()) {
            return Err(Error::NegativeWeight(self.lambda_c));
        }
        self.lambda_s.validate()?;
        for gamma in [self.gamma_c, self.gamma_s] {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::InvalidStep(gamma));
            }
        }
        if self.inner_schedule.is_empty() {
            return Err(Error::InvalidConfig("at least one outer iteration is required"));
        }
        if self.inner_schedule.contains(&0) {
            return Err(Error::InvalidConfig("inner iteration counts must be at least 1"));
        }
        let acc = self.acceleration;
        if acc.line_search && (acc.extrapolate_signal || acc.extrapolate_coefs) {
            return Err(Error::InvalidConfig("line search cannot be combined with fixed extrapolation"));
        }
        if acc.line_search && self.tau_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::InvalidConfig("line-search grid must hold finite non-negative values"));
        }
        Ok(())
    }
}
