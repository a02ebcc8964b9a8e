//! Iterative radix-2 FFT for power-of-two lengths.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    /// `exp(-2πik/len)` for `k < len/2`.
    twiddles: Vec<Complex64>,
    bit_reverse: Vec<usize>,
}

impl Fft {
    /// Panics unless `len` is a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length {len} is not a power of two");
        let twiddles = (0..len / 2)
            .map(|k| {
                let phase = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(phase), libm::sin(phase))
            })
            .collect();
        let bits = len.trailing_zeros();
        let bit_reverse = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Self { len, twiddles, bit_reverse }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, false);
    }

    /// Inverse transform including the `1/len` normalization.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, true);
        let scale = 1.0 / self.len as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        assert_eq!(buf.len(), self.len);
        for i in 0..self.len {
            let j = self.bit_reverse[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.len {
            let stride = self.len / (2 * half);
            for start in (0..self.len).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let u = buf[start + k];
                    let v = buf[start + k + half] * w;
                    buf[start + k] = u + v;
                    buf[start + k + half] = u - v;
                }
            }
            half *= 2;
        }
    }
}
