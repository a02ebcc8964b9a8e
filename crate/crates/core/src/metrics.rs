//! Reconstruction quality: SDR, its improvement, and the distance from the
//! consistency set.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::prox::{consistency_distance_sq, ConsistencySpec};

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// `10·log10(‖y‖² / ‖y − x̂‖²)`, or `+∞` when the estimate is exact.
pub fn sdr(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    check_len(reference.len(), estimate.len())?;
    let signal: f64 = reference.iter().map(|v| v * v).sum();
    if signal == 0.0 {
        return Err(Error::ZeroReference);
    }
    let error: f64 = reference.iter().zip(estimate).map(|(y, x)| (y - x) * (y - x)).sum();
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * libm::log10(signal / error))
}

/// SDR restricted to the samples in `indices`.
pub fn sdr_on(reference: &[f64], estimate: &[f64], indices: &[usize]) -> Result<f64> {
    check_len(reference.len(), estimate.len())?;
    let mut r = Vec::with_capacity(indices.len());
    let mut e = Vec::with_capacity(indices.len());
    for &i in indices {
        if i >= reference.len() {
            return Err(Error::IndexOutOfRange { index: i, len: reference.len() });
        }
        r.push(reference[i]);
        e.push(estimate[i]);
    }
    sdr(&r, &e)
}

/// `sdr(y, x̂) − sdr(y, degraded)`. Two exact signals give 0, not NaN.
pub fn delta_sdr(reference: &[f64], degraded: &[f64], estimate: &[f64]) -> Result<f64> {
    let out = sdr(reference, estimate)?;
    let input = sdr(reference, degraded)?;
    Ok(difference_db(out, input))
}

/// Difference of two SDR values honouring the `+∞` sentinel.
pub fn difference_db(out: f64, input: f64) -> f64 {
    if out == input { 0.0 } else { out - input }
}

/// `½‖x̂ − proj_Γ(x̂)‖²`.
pub fn consistency_distance(estimate: &[f64], spec: &ConsistencySpec) -> Result<f64> {
    check_len(spec.len(), estimate.len())?;
    Ok(consistency_distance_sq(estimate, spec))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameReport {
    pub sdr_db: f64,
    pub delta_sdr_db: f64,
    pub consistency_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub sdr_db: f64,
    pub delta_sdr_db: f64,
    /// Summed over frames (or channels).
    pub consistency_sq: f64,
    pub per_frame: Vec<FrameReport>,
    pub wall_seconds: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn sdr_examples() {
        let y = [0.5, -1.0, 0.25];
        assert_eq!(sdr(&y, &y).unwrap(), f64::INFINITY);
        assert_eq!(sdr(&y, &[0.0; 3]).unwrap(), 0.0);
        let x: Vec<f64> = y.iter().map(|v| 0.9 * v).collect();
        assert!((sdr(&y, &x).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(sdr(&[0.0; 3], &y), Err(Error::ZeroReference));
        assert!(sdr(&y, &[0.0]).is_err());
    }

    #[test]
    fn sdr_is_scale_invariant() {
        let y = [0.3, -0.7, 0.1, 0.9];
        let x = [0.2, -0.5, 0.0, 1.0];
        let base = sdr(&y, &x).unwrap();
        for alpha in [-3.0, 0.01, 250.0] {
            let ys: Vec<f64> = y.iter().map(|v| alpha * v).collect();
            let xs: Vec<f64> = x.iter().map(|v| alpha * v).collect();
            assert!((sdr(&ys, &xs).unwrap() - base).abs() < 1e-10);
        }
    }

    #[test]
    fn delta_examples() {
        let y = [1.0, 2.0];
        let d = [0.9, 1.8];
        assert_eq!(delta_sdr(&y, &d, &d).unwrap(), 0.0);
        assert_eq!(delta_sdr(&y, &d, &y).unwrap(), f64::INFINITY);
        assert_eq!(delta_sdr(&y, &y, &y).unwrap(), 0.0);
        assert_eq!(difference_db(20.0, 10.0), 10.0);
        let sub = sdr_on(&[1.0, 5.0], &[0.9, 0.0], &[0]).unwrap();
        assert!((sub - 20.0).abs() < 1e-12);
    }

    #[test]
    fn consistency_examples() {
        let spec = ConsistencySpec::dequant(vec![0.0], 2.0).unwrap();
        assert_eq!(consistency_distance(&[2.0], &spec).unwrap(), 0.5);
        assert_eq!(consistency_distance(&[0.3], &spec).unwrap(), 0.0);
    }
}
