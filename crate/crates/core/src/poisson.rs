//! Periodic Poisson problems for the stencil Laplacian `div_fwd(grad_bwd(.))`.
//!
//! On the torus the Laplacian annihilates constants, so a source is solvable
//! only if it has zero mean, and the solution is fixed by requiring zero mean.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::lattice::Lattice;
use crate::spectral;

/// Largest volume accepted by [`solve_poisson_dense`].
pub const DENSE_VOLUME_CAP: usize = 1024;

fn check_neutral(src: &ScalarField) -> Result<()> {
    let tolerance = 1e-12 * src.max_abs().max(1.0);
    let mean = src.mean();
    if mean.abs() > tolerance {
        return Err(Error::NonNeutralSource { mean, tolerance });
    }
    Ok(())
}

fn remove_mean(field: &mut ScalarField) {
    let mean = field.mean();
    field.values_mut().iter_mut().for_each(|v| *v -= mean);
}

/// Zero-mean solution of `laplacian(G) = src` by diagonalising the stencil in Fourier space.
pub fn solve_poisson(src: &ScalarField) -> Result<ScalarField> {
    check_neutral(src)?;
    let lat = *src.lattice();
    let mut spectrum = spectral::forward_real(&lat, src.values());
    spectrum[0] = Complex64::new(0.0, 0.0);
    for (k, c) in spectrum.iter_mut().enumerate().skip(1) {
        *c /= lat.laplacian_eigenvalue(k);
    }
    let mut g = ScalarField::from_vec(lat, spectral::inverse_real(&lat, spectrum))?;
    remove_mean(&mut g);
    Ok(g)
}

/// Dense reference solve of the same problem, for small lattices.
///
/// Solves `(L + J/V) G = src` with `J` the all-ones matrix. The rank-one term
/// lifts the constant null vector; for a neutral source the solution has zero
/// mean and satisfies `L G = src`.
pub fn solve_poisson_dense(src: &ScalarField) -> Result<ScalarField> {
    check_neutral(src)?;
    let lat = *src.lattice();
    let n = lat.volume();
    if n > DENSE_VOLUME_CAP {
        return Err(Error::Capacity {
            volume: n,
            cap: DENSE_VOLUME_CAP,
        });
    }
    let mut m = vec![1.0 / n as f64; n * n];
    for z in 0..n {
        for mu in 0..lat.ndim() {
            m[z * n + lat.forward(z, mu)] += 1.0;
            m[z * n + lat.backward(z, mu)] += 1.0;
            m[z * n + z] -= 2.0;
        }
    }
    let x = gaussian_solve(n, &mut m, src.values().to_vec());
    let mut g = ScalarField::from_vec(lat, x)?;
    remove_mean(&mut g);
    Ok(g)
}

/// Gaussian elimination with partial pivoting on a row-major `n x n` system.
fn gaussian_solve(n: usize, m: &mut [f64], mut rhs: Vec<f64>) -> Vec<f64> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))
            .expect("nonempty range");
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            rhs.swap(col, pivot);
        }
        let p = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / p;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[row * n + j] -= factor * m[col * n + j];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|j| m[row * n + j] * x[j]).sum();
        x[row] = (rhs[row] - tail) / m[row * n + row];
    }
    x
}

/// Source of a unit point charge at the origin with its neutralising background.
pub fn neutralized_delta(lat: Lattice) -> ScalarField {
    let background = 1.0 / lat.volume() as f64;
    ScalarField::from_fn(lat, |z| if z == 0 { 1.0 - background } else { -background })
}

/// Lattice Green's function: `laplacian(G) = [z = 0] - 1/V`, zero mean.
pub fn green_function(lat: Lattice) -> ScalarField {
    solve_poisson(&neutralized_delta(lat)).expect("neutralized delta is neutral")
}
