//! Real-valued site data on a [`Lattice`].
//!
//! Storage is flat and row-major. Vector fields keep their components
//! contiguous (`mu * V + site`) so each component is itself a scalar slab.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::sum::compensated_sum;

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(i) => Err(Error::NonFinite(format!("{what} value {i} is {}", values[i]))),
    }
}

pub(crate) fn ensure_same(a: &Lattice, b: &Lattice) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LatticeMismatch(format!("{a} vs {b}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    lattice: Lattice,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(lattice: Lattice) -> Self {
        Self::constant(lattice, 0.0)
    }

    pub fn constant(lattice: Lattice, value: f64) -> Self {
        Self {
            lattice,
            data: vec![value; lattice.volume()],
        }
    }

    pub fn from_vec(lattice: Lattice, data: Vec<f64>) -> Result<Self> {
        if data.len() != lattice.volume() {
            return Err(Error::LatticeMismatch(format!(
                "expected {} values for {lattice}, got {}",
                lattice.volume(),
                data.len()
            )));
        }
        check_finite(&data, "scalar field")?;
        Ok(Self { lattice, data })
    }

    pub fn from_fn(lattice: Lattice, f: impl Fn(usize) -> f64) -> Self {
        Self {
            lattice,
            data: (0..lattice.volume()).map(f).collect(),
        }
    }

    /// Kronecker delta at `site`.
    pub fn delta(lattice: Lattice, site: usize) -> Self {
        let mut s = Self::zeros(lattice);
        s.data[site] = 1.0;
        s
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, site: usize) -> f64 {
        self.data[site]
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.data.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        compensated_sum(self.data.iter().map(|v| v * v)).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            lattice: self.lattice,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same(&self.lattice, &other.lattice)?;
        Ok(Self {
            lattice: self.lattice,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest per-site absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.zip_with(other, |a, b| a - b)?.max_abs())
    }

    /// `out(z) = self(z + offset)`.
    pub fn shifted(&self, offset: usize) -> Self {
        let lat = self.lattice;
        Self::from_fn(lat, |z| self.data[lat.add(z, offset)])
    }
}

/// `D` real components per site.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    lattice: Lattice,
    data: Vec<f64>,
}

impl VectorField {
    pub fn zeros(lattice: Lattice) -> Self {
        Self {
            lattice,
            data: vec![0.0; lattice.ndim() * lattice.volume()],
        }
    }

    /// Same constant vector at every site.
    pub fn constant(lattice: Lattice, value: &[f64]) -> Result<Self> {
        if value.len() != lattice.ndim() {
            return Err(Error::Dimension(format!(
                "expected {} components, got {}",
                lattice.ndim(),
                value.len()
            )));
        }
        let comps = value
            .iter()
            .map(|&v| ScalarField::constant(lattice, v))
            .collect::<Vec<_>>();
        Self::from_components(comps)
    }

    pub fn from_components(components: Vec<ScalarField>) -> Result<Self> {
        let lattice = match components.first() {
            Some(c) => *c.lattice(),
            None => return Err(Error::Dimension("no components".into())),
        };
        if components.len() != lattice.ndim() {
            return Err(Error::Dimension(format!(
                "expected {} components, got {}",
                lattice.ndim(),
                components.len()
            )));
        }
        let mut data = Vec::with_capacity(lattice.ndim() * lattice.volume());
        for c in &components {
            ensure_same(&lattice, c.lattice())?;
            data.extend_from_slice(c.values());
        }
        Ok(Self { lattice, data })
    }

    /// Builds from component-major flat data.
    pub fn from_vec(lattice: Lattice, data: Vec<f64>) -> Result<Self> {
        if data.len() != lattice.ndim() * lattice.volume() {
            return Err(Error::LatticeMismatch(format!(
                "expected {} values for a vector field on {lattice}, got {}",
                lattice.ndim() * lattice.volume(),
                data.len()
            )));
        }
        check_finite(&data, "vector field")?;
        Ok(Self { lattice, data })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn component(&self, mu: usize) -> &[f64] {
        let v = self.lattice.volume();
        &self.data[mu * v..(mu + 1) * v]
    }

    pub fn component_mut(&mut self, mu: usize) -> &mut [f64] {
        let v = self.lattice.volume();
        &mut self.data[mu * v..(mu + 1) * v]
    }

    pub fn component_field(&self, mu: usize) -> ScalarField {
        ScalarField {
            lattice: self.lattice,
            data: self.component(mu).to_vec(),
        }
    }

    pub fn get(&self, mu: usize, site: usize) -> f64 {
        self.data[mu * self.lattice.volume() + site]
    }

    pub fn set(&mut self, mu: usize, site: usize, value: f64) {
        let v = self.lattice.volume();
        self.data[mu * v + site] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        compensated_sum(self.data.iter().map(|v| v * v)).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            lattice: self.lattice,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same(&self.lattice, &other.lattice)?;
        Ok(Self {
            lattice: self.lattice,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}

/// Rank-2 tensor per site, `D x D` components (`(mu * D + nu) * V + site`).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    lattice: Lattice,
    data: Vec<f64>,
}

impl TensorField {
    pub(crate) fn zeros(lattice: Lattice) -> Self {
        let d = lattice.ndim();
        Self {
            lattice,
            data: vec![0.0; d * d * lattice.volume()],
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn component(&self, mu: usize, nu: usize) -> &[f64] {
        let v = self.lattice.volume();
        let k = mu * self.lattice.ndim() + nu;
        &self.data[k * v..(k + 1) * v]
    }

    pub(crate) fn component_mut(&mut self, mu: usize, nu: usize) -> &mut [f64] {
        let v = self.lattice.volume();
        let k = mu * self.lattice.ndim() + nu;
        &mut self.data[k * v..(k + 1) * v]
    }

    pub fn get(&self, mu: usize, nu: usize, site: usize) -> f64 {
        self.component(mu, nu)[site]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        ensure_same(&self.lattice, &other.lattice)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length_and_nan() {
        let lat = Lattice::new(&[4]).unwrap();
        assert!(ScalarField::from_vec(lat, vec![0.0; 3]).is_err());
        assert!(matches!(
            ScalarField::from_vec(lat, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(VectorField::from_vec(lat, vec![0.0; 8]).is_err());
    }

    #[test]
    fn mismatched_lattices() {
        let a = ScalarField::zeros(Lattice::new(&[4]).unwrap());
        let b = ScalarField::zeros(Lattice::new(&[2, 2]).unwrap());
        assert!(matches!(a.max_abs_diff(&b), Err(Error::LatticeMismatch(_))));
    }

    #[test]
    fn shift_moves_values() {
        let lat = Lattice::new(&[4]).unwrap();
        let s = ScalarField::from_vec(lat, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.shifted(1).values(), &[1.0, 2.0, 3.0, 0.0]);
    }
}
