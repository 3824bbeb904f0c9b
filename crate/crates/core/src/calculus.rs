//! Finite differences on the torus.
//!
//! Stencil pairing used throughout the crate:
//! gauge gradients use forward differences, kernel divergences use the
//! forward divergence, and the Laplacian is `div_fwd(grad_bwd(.))`, the
//! symmetric `2D+1`-point stencil. Forward gradient and backward divergence
//! are negative adjoints of each other, which [`sum_by_parts_residual`]
//! measures.

use rayon::prelude::*;

use crate::error::Result;
use crate::field::{ensure_same, ScalarField, VectorField};
use crate::lattice::Lattice;
use crate::sum::NeumaierSum;

const PAR_THRESHOLD: usize = 1 << 14;

fn fill(lat: Lattice, f: impl Fn(usize) -> f64 + Sync) -> ScalarField {
    let mut out = ScalarField::zeros(lat);
    let values = out.values_mut();
    if values.len() >= PAR_THRESHOLD {
        values
            .par_iter_mut()
            .enumerate()
            .for_each(|(z, v)| *v = f(z));
    } else {
        values.iter_mut().enumerate().for_each(|(z, v)| *v = f(z));
    }
    out
}

/// `s(z + mu) - s(z)`.
pub fn forward_diff(s: &ScalarField, mu: usize) -> Result<ScalarField> {
    let lat = *s.lattice();
    lat.check_direction(mu)?;
    let v = s.values();
    Ok(fill(lat, |z| v[lat.forward(z, mu)] - v[z]))
}

/// `s(z) - s(z - mu)`.
pub fn backward_diff(s: &ScalarField, mu: usize) -> Result<ScalarField> {
    let lat = *s.lattice();
    lat.check_direction(mu)?;
    let v = s.values();
    Ok(fill(lat, |z| v[z] - v[lat.backward(z, mu)]))
}

pub fn grad_fwd(s: &ScalarField) -> VectorField {
    let lat = *s.lattice();
    let comps = (0..lat.ndim())
        .map(|mu| forward_diff(s, mu).expect("direction in range"))
        .collect();
    VectorField::from_components(comps).expect("consistent components")
}

pub fn grad_bwd(s: &ScalarField) -> VectorField {
    let lat = *s.lattice();
    let comps = (0..lat.ndim())
        .map(|mu| backward_diff(s, mu).expect("direction in range"))
        .collect();
    VectorField::from_components(comps).expect("consistent components")
}

/// `sum_mu v_mu(z + mu) - v_mu(z)`.
pub fn divergence_fwd(v: &VectorField) -> ScalarField {
    let lat = *v.lattice();
    fill(lat, |z| {
        (0..lat.ndim())
            .map(|mu| {
                let c = v.component(mu);
                c[lat.forward(z, mu)] - c[z]
            })
            .sum()
    })
}

/// `sum_mu v_mu(z) - v_mu(z - mu)`.
pub fn divergence_bwd(v: &VectorField) -> ScalarField {
    let lat = *v.lattice();
    fill(lat, |z| {
        (0..lat.ndim())
            .map(|mu| {
                let c = v.component(mu);
                c[z] - c[lat.backward(z, mu)]
            })
            .sum()
    })
}

/// The symmetric stencil `sum_mu s(z+mu) + s(z-mu) - 2 s(z)`.
pub fn laplacian(s: &ScalarField) -> ScalarField {
    divergence_fwd(&grad_bwd(s))
}

/// `|sum v . grad_fwd(s) + sum div_bwd(v) s|`, both sums compensated.
pub fn sum_by_parts_residual(v: &VectorField, s: &ScalarField) -> Result<f64> {
    ensure_same(v.lattice(), s.lattice())?;
    let grad = grad_fwd(s);
    let div = divergence_bwd(v);
    let mut lhs = NeumaierSum::new();
    lhs.extend(v.values().iter().zip(grad.values()).map(|(a, b)| a * b));
    let mut rhs = NeumaierSum::new();
    rhs.extend(div.values().iter().zip(s.values()).map(|(a, b)| a * b));
    Ok((lhs.value() + rhs.value()).abs())
}
