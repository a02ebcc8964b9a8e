//! Proximal operators: consistency-set projections, the squared-distance
//! penalty, anchored soft thresholding, and the dense quadratic prox.

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::degrade::{
    ClipObservation, DropObservation, QuantObservation, ReliabilityMasks, SampleClass,
};
use crate::error::{Error, Result};

/// Weight `λ_S` of the signal prior. `Indicator` stands for `λ_S = ∞`, i.e. the
/// hard constraint `x ∈ Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalWeight {
    Finite(f64),
    Indicator,
}

impl SignalWeight {
    pub fn validate(self) -> Result<Self> {
        match self {
            SignalWeight::Finite(w) if !(w >= 0.0) => Err(Error::NegativeWeight(w)),
            SignalWeight::Finite(w) if w.is_infinite() => Ok(SignalWeight::Indicator),
            other => Ok(other),
        }
    }

    /// The weight scaled by a DRA step size.
    pub fn scaled(self, gamma: f64) -> Self {
        match self {
            SignalWeight::Finite(w) => SignalWeight::Finite(w * gamma),
            SignalWeight::Indicator => SignalWeight::Indicator,
        }
    }
}

/// The consistency set Γ of an observation.
#[derive(Debug, Clone, PartialEq)]
pub enum ConsistencySpec {
    /// Reliable samples fixed to `y`, clipped samples beyond `±theta`.
    Declip { y: Vec<f64>, theta: f64, masks: ReliabilityMasks },
    /// The box `‖x − y‖_∞ ≤ Δ/2` (closed).
    Dequant { y: Vec<f64>, delta: f64 },
    /// Reliable samples fixed to `y`, missing samples free.
    Inpaint { y: Vec<f64>, masks: ReliabilityMasks },
}

impl ConsistencySpec {
    pub fn declip(y: Vec<f64>, theta: f64, masks: ReliabilityMasks) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidThreshold(theta));
        }
        if masks.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: y.len(), actual: masks.len() });
        }
        if masks.count(SampleClass::Missing) > 0 {
            return Err(Error::MalformedSpec("declipping masks cannot contain missing samples"));
        }
        Ok(Self::Declip { y, theta, masks })
    }

    pub fn dequant(y: Vec<f64>, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::MalformedSpec("quantization step must be positive"));
        }
        Ok(Self::Dequant { y, delta })
    }

    pub fn inpaint(y: Vec<f64>, masks: ReliabilityMasks) -> Result<Self> {
        if masks.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: y.len(), actual: masks.len() });
        }
        if masks.count(SampleClass::ClippedHigh) + masks.count(SampleClass::ClippedLow) > 0 {
            return Err(Error::MalformedSpec("inpainting masks cannot contain clipped samples"));
        }
        Ok(Self::Inpaint { y, masks })
    }

    pub fn from_clip(obs: &ClipObservation) -> Self {
        Self::Declip { y: obs.y.clone(), theta: obs.theta, masks: obs.masks.clone() }
    }

    pub fn from_quant(obs: &QuantObservation) -> Self {
        Self::Dequant { y: obs.y.clone(), delta: obs.delta }
    }

    pub fn from_drop(obs: &DropObservation) -> Self {
        Self::Inpaint { y: obs.y.clone(), masks: obs.masks.clone() }
    }

    pub fn len(&self) -> usize {
        self.observed().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The observed signal `y` (missing samples read as 0).
    pub fn observed(&self) -> &[f64] {
        match self {
            Self::Declip { y, .. } | Self::Dequant { y, .. } | Self::Inpaint { y, .. } => y,
        }
    }

    pub fn masks(&self) -> Option<&ReliabilityMasks> {
        match self {
            Self::Declip { masks, .. } | Self::Inpaint { masks, .. } => Some(masks),
            Self::Dequant { .. } => None,
        }
    }

    /// Projects `x` onto Γ in place.
    pub fn project_in_place(&self, x: &mut [f64]) {
        match self {
            Self::Declip { y, theta, masks } => {
                for ((xi, &yi), &c) in x.iter_mut().zip(y).zip(masks.labels()) {
                    *xi = match c {
                        SampleClass::Reliable => yi,
                        SampleClass::ClippedHigh => xi.max(*theta),
                        SampleClass::ClippedLow => xi.min(-*theta),
                        SampleClass::Missing => *xi,
                    };
                }
            }
            Self::Dequant { y, delta } => {
                let half = 0.5 * delta;
                for (xi, &yi) in x.iter_mut().zip(y) {
                    *xi = xi.clamp(yi - half, yi + half);
                }
            }
            Self::Inpaint { y, masks } => {
                for ((xi, &yi), &c) in x.iter_mut().zip(y).zip(masks.labels()) {
                    if c == SampleClass::Reliable {
                        *xi = yi;
                    }
                }
            }
        }
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Euclidean projection onto the closed consistency set.
pub fn project_consistency(x: &[f64], spec: &ConsistencySpec) -> Result<Vec<f64>> {
    check_len(spec.len(), x.len())?;
    let mut out = x.to_vec();
    spec.project_in_place(&mut out);
    Ok(out)
}

/// `½‖x − proj_Γ(x)‖²`. Lengths are assumed to match.
pub fn consistency_distance_sq(x: &[f64], spec: &ConsistencySpec) -> f64 {
    let mut p = x.to_vec();
    spec.project_in_place(&mut p);
    0.5 * x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

/// Prox of `λ_S·½·d_Γ²` (finite weight) or the projection (indicator), in place.
pub(crate) fn prox_signal_in_place(x: &mut [f64], weight: SignalWeight, spec: &ConsistencySpec) {
    match weight {
        SignalWeight::Indicator => spec.project_in_place(x),
        SignalWeight::Finite(0.0) => {}
        SignalWeight::Finite(w) => {
            let mut p = x.to_vec();
            spec.project_in_place(&mut p);
            let (wp, wx) = (w / (w + 1.0), 1.0 / (w + 1.0));
            for (xi, pi) in x.iter_mut().zip(&p) {
                *xi = wp * pi + wx * *xi;
            }
        }
    }
}

/// `λ/(λ+1)·proj_Γ(x) + 1/(λ+1)·x`, or `proj_Γ(x)` for the indicator.
pub fn prox_signal_penalty(
    x: &[f64],
    lambda_s: SignalWeight,
    spec: &ConsistencySpec,
) -> Result<Vec<f64>> {
    let weight = lambda_s.validate()?;
    check_len(spec.len(), x.len())?;
    let mut out = x.to_vec();
    prox_signal_in_place(&mut out, weight, spec);
    Ok(out)
}

/// Scalar soft thresholding.
#[inline]
pub fn shrink(v: f64, t: f64) -> f64 {
    if v >= t {
        v - t
    } else if v <= -t {
        v + t
    } else {
        0.0
    }
}

/// Prox of `t‖·‖₁` restricted to `{u : u₁ = 1}`: the first entry becomes 1,
/// the rest are soft-thresholded.
pub fn soft_threshold_anchored(a: &[f64], threshold: f64) -> Result<Vec<f64>> {
    if !(threshold >= 0.0) {
        return Err(Error::NegativeWeight(threshold));
    }
    if a.is_empty() {
        return Err(Error::EmptySignal);
    }
    let mut out: Vec<f64> = a.iter().map(|&v| shrink(v, threshold)).collect();
    out[0] = 1.0;
    Ok(out)
}

/// `argmin_u ½‖u − v‖² + γ·½‖Tu + offset‖² = (I + γTᵀT)⁻¹(v − γTᵀ·offset)`.
pub fn prox_quadratic_dense(
    v: &[f64],
    gamma: f64,
    t: &DMatrix<f64>,
    offset: &[f64],
) -> Result<Vec<f64>> {
    check_len(t.ncols(), v.len())?;
    check_len(t.nrows(), offset.len())?;
    let mut q = DenseQuadratic::from_matrix(t, offset);
    let mut out = alloc::vec![0.0; v.len()];
    q.apply(v, gamma, &mut out)?;
    Ok(out)
}

/// The prox of `γ·(½uᵀGu + cᵀu)` with `G ⪰ 0`, factorized once per step size.
#[derive(Debug, Clone)]
pub struct DenseQuadratic {
    gram: DMatrix<f64>,
    linear: DVector<f64>,
    factor: Option<(f64, Cholesky<f64, Dyn>)>,
}

impl DenseQuadratic {
    /// Quadratic `½‖Tu + offset‖²`.
    pub fn from_matrix(t: &DMatrix<f64>, offset: &[f64]) -> Self {
        let gram = t.transpose() * t;
        let linear = t.transpose() * DVector::from_column_slice(offset);
        Self { gram, linear, factor: None }
    }

    /// Quadratic `½uᵀGu + cᵀu`.
    pub fn from_gram(gram: DMatrix<f64>, linear: Vec<f64>) -> Self {
        assert_eq!(gram.nrows(), linear.len());
        Self { gram, linear: DVector::from_vec(linear), factor: None }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn apply(&mut self, v: &[f64], gamma: f64, out: &mut [f64]) -> Result<()> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidStep(gamma));
        }
        check_len(self.dim(), v.len())?;
        check_len(self.dim(), out.len())?;
        let stale = !matches!(&self.factor, Some((g, _)) if *g == gamma);
        if stale {
            let n = self.dim();
            let system = DMatrix::<f64>::identity(n, n) + &self.gram * gamma;
            // I + γG is positive definite for G ⪰ 0
            let chol = Cholesky::new(system).ok_or(Error::InvalidStep(gamma))?;
            self.factor = Some((gamma, chol));
        }
        let (_, chol) = self.factor.as_ref().expect("factorized above");
        let rhs = DVector::from_iterator(
            v.len(),
            v.iter().zip(self.linear.iter()).map(|(vi, ci)| vi - gamma * ci),
        );
        out.copy_from_slice(chol.solve(&rhs).as_slice());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::armodel::build_toeplitz;
    use crate::degrade::{hard_clip, uniform_quantize};
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn box_spec(len: usize, lo: f64, hi: f64) -> ConsistencySpec {
        // dequant set with y at the box centre
        ConsistencySpec::dequant(vec![0.5 * (lo + hi); len], hi - lo).unwrap()
    }

    fn random_spec(rng: &mut ChaCha8Rng, n: usize) -> ConsistencySpec {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        match rng.random_range(0..3) {
            0 => ConsistencySpec::from_clip(&hard_clip(&x, 0.4).unwrap()),
            1 => ConsistencySpec::from_quant(&uniform_quantize(&x, 3).unwrap()),
            _ => {
                let keep: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.6)).collect();
                ConsistencySpec::from_drop(&crate::degrade::drop_samples(&x, &keep).unwrap())
            }
        }
    }

    #[test]
    fn projection_examples() {
        let clip = hard_clip(&[0.1, 0.9, -0.9], 0.5).unwrap();
        let spec = ConsistencySpec::from_clip(&clip);
        let feasible = [0.1, 0.8, -0.5];
        assert_eq!(project_consistency(&feasible, &spec).unwrap(), feasible.to_vec());
        assert_eq!(project_consistency(&[0.0, 0.3, 0.0], &spec).unwrap(), vec![0.1, 0.5, -0.5]);

        let spec = ConsistencySpec::dequant(vec![0.375], 0.25).unwrap();
        assert_eq!(project_consistency(&[0.9], &spec).unwrap(), vec![0.5]);

        assert_eq!(
            project_consistency(&[0.0; 2], &spec),
            Err(Error::DimensionMismatch { expected: 1, actual: 2 })
        );
    }

    #[test]
    fn malformed_specs_are_rejected() {
        let masks = ReliabilityMasks::from_labels(vec![SampleClass::Missing]);
        assert!(ConsistencySpec::declip(vec![0.0], 0.5, masks.clone()).is_err());
        let masks = ReliabilityMasks::from_labels(vec![SampleClass::ClippedHigh]);
        assert!(ConsistencySpec::inpaint(vec![0.0], masks).is_err());
        assert!(ConsistencySpec::dequant(vec![0.0], 0.0).is_err());
    }

    #[test]
    fn signal_penalty_examples() {
        let spec = box_spec(1, -1.0, 1.0);
        assert_eq!(prox_signal_penalty(&[2.0], SignalWeight::Finite(0.0), &spec).unwrap(), vec![2.0]);
        assert_eq!(prox_signal_penalty(&[2.0], SignalWeight::Indicator, &spec).unwrap(), vec![1.0]);
        assert_eq!(prox_signal_penalty(&[2.0], SignalWeight::Finite(1.0), &spec).unwrap(), vec![1.5]);
        assert_eq!(
            prox_signal_penalty(&[2.0], SignalWeight::Finite(-1.0), &spec),
            Err(Error::NegativeWeight(-1.0))
        );
    }

    fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let r = (libm::sqrt(5.0) - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - r * (hi - lo);
            let m2 = lo + r * (hi - lo);
            if f(m1) < f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn signal_penalty_matches_scalar_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let spec = random_spec(&mut rng, 1);
            let u = rng.random_range(-2.0..2.0);
            let w = rng.random_range(0.0..20.0);
            let fast = prox_signal_penalty(&[u], SignalWeight::Finite(w), &spec).unwrap()[0];
            let obj = |v: f64| 0.5 * (v - u) * (v - u) + w * consistency_distance_sq(&[v], &spec);
            let brute = golden_section(obj, -5.0, 5.0);
            // golden section only resolves a smooth minimum to about sqrt(eps)
            assert!((fast - brute).abs() < 1e-7, "{fast} vs {brute}");
            assert!(obj(fast) <= obj(brute) + 1e-14);
        }
    }

    #[test]
    fn projection_is_closest_feasible_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let n = 12;
            let spec = random_spec(&mut rng, n);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let p = project_consistency(&x, &spec).unwrap();
            assert_eq!(project_consistency(&p, &spec).unwrap(), p);
            let dist = |z: &[f64]| x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            for _ in 0..100 {
                let z: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
                let z = project_consistency(&z, &spec).unwrap();
                assert!(dist(&p) <= dist(&z) + 1e-12);
            }
        }
    }

    #[test]
    fn proxes_are_firmly_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10;
        let t_mat = build_toeplitz(&[1.0, -0.7, 0.2], n);
        let offset: Vec<f64> = (0..n + 2).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..50 {
            let spec = random_spec(&mut rng, n);
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let w = SignalWeight::Finite(rng.random_range(0.0..5.0));
            let proxes: [&dyn Fn(&[f64]) -> Vec<f64>; 4] = [
                &|z| project_consistency(z, &spec).unwrap(),
                &|z| prox_signal_penalty(z, w, &spec).unwrap(),
                // anchored threshold restricted to its free coordinates
                &|z| soft_threshold_anchored(&[&[1.0][..], z].concat(), 0.3).unwrap()[1..].to_vec(),
                &|z| prox_quadratic_dense(z, 0.8, &t_mat, &offset).unwrap(),
            ];
            for (k, prox) in proxes.iter().enumerate() {
                let (pu, pv) = (prox(&u), prox(&v));
                let d2: f64 = pu.iter().zip(&pv).map(|(a, b)| (a - b) * (a - b)).sum();
                let inner: f64 = pu
                    .iter()
                    .zip(&pv)
                    .zip(u.iter().zip(&v))
                    .map(|((a, b), (c, d))| (a - b) * (c - d))
                    .sum();
                assert!(d2 <= inner + 1e-10, "prox {k}: {d2} > {inner}");
            }
        }
    }

    #[test]
    fn anchored_threshold_examples() {
        assert_eq!(soft_threshold_anchored(&[0.3, 2.0, -0.5, 0.1], 1.0).unwrap(), vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(soft_threshold_anchored(&[1.0, -3.0], 1.0).unwrap(), vec![1.0, -2.0]);
        assert_eq!(soft_threshold_anchored(&[5.0, 0.2, -0.7], 0.0).unwrap(), vec![1.0, 0.2, -0.7]);
        assert_eq!(soft_threshold_anchored(&[1.0], -0.1), Err(Error::NegativeWeight(-0.1)));
    }

    #[test]
    fn anchored_threshold_matches_grid_search() {
        // u = [1, u2]; minimise ½‖u − a‖² + t‖u‖₁ over a fine grid of u2
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let a = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let t = rng.random_range(0.0..1.5);
            let obj = |u2: f64| {
                0.5 * ((1.0 - a[0]) * (1.0 - a[0]) + (u2 - a[1]) * (u2 - a[1])) + t * (1.0 + u2.abs())
            };
            let mut best = (f64::INFINITY, 0.0);
            for i in 0..=80_000 {
                let u2 = -4.0 + 8.0 * i as f64 / 80_000.0;
                let f = obj(u2);
                if f < best.0 {
                    best = (f, u2);
                }
            }
            let fast = soft_threshold_anchored(&a, t).unwrap();
            assert_eq!(fast[0], 1.0);
            assert!((fast[1] - best.1).abs() <= 1e-4);
        }
    }

    #[test]
    fn dense_quadratic_examples() {
        let v = [0.5, -1.0, 2.0];
        let eye = DMatrix::<f64>::identity(3, 3);
        let out = prox_quadratic_dense(&v, 3.0, &eye, &[0.0; 3]).unwrap();
        for (o, vi) in out.iter().zip(&v) {
            assert!((o - vi / 4.0).abs() < 1e-15);
        }
        let tiny = prox_quadratic_dense(&v, 1e-12, &build_toeplitz(&[1.0, 2.0], 3), &[1.0; 4]).unwrap();
        for (o, vi) in tiny.iter().zip(&v) {
            assert!((o - vi).abs() < 1e-10);
        }
        assert!(prox_quadratic_dense(&v, 1.0, &eye, &[0.0; 2]).is_err());
        assert!(prox_quadratic_dense(&v, 0.0, &eye, &[0.0; 3]).is_err());
    }

    #[test]
    fn dense_quadratic_matches_generic_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let (m, n) = (9, 6);
            let t = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
            let offset: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let gamma = rng.random_range(0.1..5.0);
            let sys = DMatrix::<f64>::identity(n, n) + t.transpose() * &t * gamma;
            let rhs = DVector::from_column_slice(&v) - t.transpose() * DVector::from_column_slice(&offset) * gamma;
            let lu = sys.lu().solve(&rhs).unwrap();
            let out = prox_quadratic_dense(&v, gamma, &t, &offset).unwrap();
            for i in 0..n {
                assert!((out[i] - lu[i]).abs() <= 1e-10 * lu.norm());
            }
        }
    }
}
