//! Seeded, reproducible random fields.
//!
//! Each site draws from its own position of a ChaCha8 keystream, so the
//! fill order does not matter and chunks can be generated in parallel.
//! Directions of a vector field use distinct stream ids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::field::{ScalarField, VectorField};
use crate::lattice::Lattice;
use crate::spectral;

const WORDS_PER_SITE: u128 = 4;
const CHUNK: usize = 4096;

fn white_noise(lat: Lattice, seed: u64, stream: u64) -> Vec<f64> {
    let mut out = vec![0.0; lat.volume()];
    out.par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(chunk, values)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            rng.set_word_pos((chunk * CHUNK) as u128 * WORDS_PER_SITE);
            for v in values.iter_mut() {
                // Box-Muller on two uniforms; consumes exactly WORDS_PER_SITE words.
                let u1: f64 = 1.0 - rng.gen::<f64>();
                let u2: f64 = rng.gen::<f64>();
                *v = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            }
        });
    out
}

fn smoothed(lat: Lattice, seed: u64, stream: u64, smoothness: f64) -> ScalarField {
    let mut values = white_noise(lat, seed, stream);
    if smoothness > 0.0 {
        let mut spectrum = spectral::forward_real(&lat, &values);
        for (k, c) in spectrum.iter_mut().enumerate() {
            *c *= (smoothness * lat.laplacian_eigenvalue(k)).exp();
        }
        values = spectral::inverse_real(&lat, spectrum);
    }
    let mut field = ScalarField::from_vec(lat, values).expect("finite noise");
    let mean = field.mean();
    field.values_mut().iter_mut().for_each(|v| *v -= mean);
    field
}

/// Gaussian white noise, low-passed with weight `exp(-smoothness * sum 4 sin^2(pi k / N))`,
/// then made mean-free.
pub fn random_scalar(lat: Lattice, seed: u64, smoothness: f64) -> ScalarField {
    smoothed(lat, seed, 0, smoothness.max(0.0))
}

/// Componentwise [`random_scalar`] with an independent stream per direction.
pub fn random_vector(lat: Lattice, seed: u64, smoothness: f64) -> VectorField {
    let comps = (0..lat.ndim())
        .map(|mu| smoothed(lat, seed, 1 + mu as u64, smoothness.max(0.0)))
        .collect();
    VectorField::from_components(comps).expect("consistent components")
}
