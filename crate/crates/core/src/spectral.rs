//! Multidimensional DFT over a lattice, built from 1D transforms per axis.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::lattice::Lattice;

/// In-place DFT of row-major data. The inverse includes the `1/V` factor.
pub fn fft_nd(lat: &Lattice, data: &mut [Complex64], direction: FftDirection) {
    assert_eq!(data.len(), lat.volume());
    let mut planner = FftPlanner::<f64>::new();
    let dims = lat.dims();
    for mu in 0..dims.len() {
        let n = dims[mu];
        let stride: usize = dims[mu + 1..].iter().product();
        let fft = planner.plan_fft(n, direction);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let outer = lat.volume() / (n * stride);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * n * stride + i;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, value) in line.iter().enumerate() {
                    data[base + k * stride] = *value;
                }
            }
        }
    }
    if direction == FftDirection::Inverse {
        let scale = 1.0 / lat.volume() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }
}

pub fn forward_real(lat: &Lattice, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(lat, &mut data, FftDirection::Forward);
    data
}

/// Inverse transform, keeping the real part.
pub fn inverse_real(lat: &Lattice, mut spectrum: Vec<Complex64>) -> Vec<f64> {
    fft_nd(lat, &mut spectrum, FftDirection::Inverse);
    spectrum.into_iter().map(|c| c.re).collect()
}

/// Periodic convolution `(a * b)(x) = sum_z a(x - z) b(z)`.
pub fn convolve(lat: &Lattice, a: &[f64], b: &[f64]) -> Vec<f64> {
    let fa = forward_real(lat, a);
    let fb = forward_real(lat, b);
    inverse_real(lat, fa.into_iter().zip(fb).map(|(x, y)| x * y).collect())
}
