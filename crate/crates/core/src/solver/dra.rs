//! Douglas–Rachford splitting for `min f + g`.
//!
//! ```text
//! u_k     = prox_{γg}(z_k)
//! z_{k+1} = z_k + prox_{γf}(2u_k − z_k) − u_k
//! ```
//! The solution reported is the `prox_g`-side iterate `u`, so any hard
//! constraint encoded in `g` holds exactly.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A proximal map `(input, γ, output)` evaluating `prox_{γh}(input)`.
pub trait Prox {
    fn prox(&mut self, input: &[f64], gamma: f64, out: &mut [f64]) -> Result<()>;
}

impl<F> Prox for F
where
    F: FnMut(&[f64], f64, &mut [f64]) -> Result<()>,
{
    fn prox(&mut self, input: &[f64], gamma: f64, out: &mut [f64]) -> Result<()> {
        self(input, gamma, out)
    }
}

/// Persistent DRA state; keeping it across calls warm-starts the next solve.
#[derive(Debug, Clone)]
pub struct DraState {
    z: Vec<f64>,
    u: Vec<f64>,
    reflected: Vec<f64>,
    f_out: Vec<f64>,
    iterations: usize,
}

impl DraState {
    pub fn new(z0: Vec<f64>) -> Self {
        let n = z0.len();
        Self {
            u: z0.clone(),
            z: z0,
            reflected: alloc::vec![0.0; n],
            f_out: alloc::vec![0.0; n],
            iterations: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// Total iterations run on this state.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// Latest `prox_g`-side iterate.
    pub fn solution(&self) -> &[f64] {
        &self.u
    }

    /// Shifts the leading coordinates of both `z` and `u` by `delta`, moving
    /// the warm start along with an externally modified iterate.
    pub fn translate(&mut self, delta: &[f64]) {
        for ((z, u), d) in self.z.iter_mut().zip(self.u.iter_mut()).zip(delta) {
            *z += d;
            *u += d;
        }
    }

    /// One update of `z`, leaving `u = prox_g(z_k)` of the pre-update point.
    pub fn step(&mut self, prox_f: &mut impl Prox, prox_g: &mut impl Prox, gamma: f64) -> Result<()> {
        prox_g.prox(&self.z, gamma, &mut self.u)?;
        for ((r, &u), &z) in self.reflected.iter_mut().zip(&self.u).zip(&self.z) {
            *r = 2.0 * u - z;
        }
        prox_f.prox(&self.reflected, gamma, &mut self.f_out)?;
        self.iterations += 1;
        let mut finite = true;
        for ((z, &f), &u) in self.z.iter_mut().zip(&self.f_out).zip(&self.u) {
            *z += f - u;
            finite &= z.is_finite();
        }
        if finite {
            Ok(())
        } else {
            Err(Error::Diverged { iteration: self.iterations })
        }
    }

    /// Runs `iters` updates and returns `u = prox_g(z_iters)`.
    pub fn run(
        &mut self,
        prox_f: &mut impl Prox,
        prox_g: &mut impl Prox,
        gamma: f64,
        iters: usize,
    ) -> Result<&[f64]> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidStep(gamma));
        }
        for _ in 0..iters {
            self.step(prox_f, prox_g, gamma)?;
        }
        prox_g.prox(&self.z, gamma, &mut self.u)?;
        if self.u.iter().all(|v| v.is_finite()) {
            Ok(&self.u)
        } else {
            Err(Error::Diverged { iteration: self.iterations })
        }
    }
}

/// Cold-start DRA from `z0`.
pub fn douglas_rachford(
    mut prox_f: impl Prox,
    mut prox_g: impl Prox,
    z0: &[f64],
    gamma: f64,
    iters: usize,
) -> Result<Vec<f64>> {
    let mut state = DraState::new(z0.to_vec());
    state.run(&mut prox_f, &mut prox_g, gamma, iters).map(|u| u.to_vec())
}
