//! Periodic hypercubic lattice geometry.
//!
//! Sites are numbered in row-major order: the last direction varies fastest.
//! All displacement arithmetic wraps around the torus.

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;

/// Default cap on the number of sites.
pub const DEFAULT_VOLUME_CAP: usize = 1 << 24;

/// A periodic lattice with unit spacing and between one and four directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    ndim: usize,
    dims: [usize; MAX_DIM],
    strides: [usize; MAX_DIM],
    volume: usize,
}

impl Lattice {
    /// Builds a lattice with the default volume cap.
    pub fn new(dims: &[usize]) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_VOLUME_CAP)
    }

    pub fn with_cap(dims: &[usize], cap: usize) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_DIM {
            return Err(Error::Dimension(format!(
                "lattice dimension must be between 1 and {MAX_DIM}, got {}",
                dims.len()
            )));
        }
        if let Some(&bad) = dims.iter().find(|&&n| n < 2) {
            return Err(Error::Dimension(format!(
                "every extent must be at least 2, got {bad} in {dims:?}"
            )));
        }
        let volume = dims
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .unwrap_or(usize::MAX);
        if volume > cap {
            return Err(Error::Capacity { volume, cap });
        }
        let mut d = [1usize; MAX_DIM];
        d[..dims.len()].copy_from_slice(dims);
        let mut strides = [0usize; MAX_DIM];
        let mut stride = 1;
        for mu in (0..dims.len()).rev() {
            strides[mu] = stride;
            stride *= dims[mu];
        }
        Ok(Self {
            ndim: dims.len(),
            dims: d,
            strides,
            volume,
        })
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims[..self.ndim]
    }

    pub fn extent(&self, mu: usize) -> usize {
        self.dims[mu]
    }

    pub fn volume(&self) -> usize {
        self.volume
    }

    pub fn check_direction(&self, mu: usize) -> Result<()> {
        if mu < self.ndim {
            Ok(())
        } else {
            Err(Error::Direction {
                mu,
                ndim: self.ndim,
            })
        }
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < self.volume {
            Ok(())
        } else {
            Err(Error::Site {
                site,
                volume: self.volume,
            })
        }
    }

    /// Row-major index of a coordinate tuple. Coordinates are taken modulo the extents.
    pub fn index(&self, coords: &[i64]) -> usize {
        debug_assert_eq!(coords.len(), self.ndim);
        coords
            .iter()
            .enumerate()
            .map(|(mu, &c)| (c.rem_euclid(self.dims[mu] as i64) as usize) * self.strides[mu])
            .sum()
    }

    pub fn coords(&self, site: usize) -> Vec<usize> {
        (0..self.ndim)
            .map(|mu| (site / self.strides[mu]) % self.dims[mu])
            .collect()
    }

    #[inline]
    fn coord(&self, site: usize, mu: usize) -> usize {
        (site / self.strides[mu]) % self.dims[mu]
    }

    /// The site one step forward along `mu`.
    #[inline]
    pub fn forward(&self, site: usize, mu: usize) -> usize {
        let c = self.coord(site, mu);
        if c + 1 == self.dims[mu] {
            site - c * self.strides[mu]
        } else {
            site + self.strides[mu]
        }
    }

    /// The site one step backward along `mu`.
    #[inline]
    pub fn backward(&self, site: usize, mu: usize) -> usize {
        let c = self.coord(site, mu);
        if c == 0 {
            site + (self.dims[mu] - 1) * self.strides[mu]
        } else {
            site - self.strides[mu]
        }
    }

    /// Site of `a + b` on the torus.
    pub fn add(&self, a: usize, b: usize) -> usize {
        (0..self.ndim)
            .map(|mu| ((self.coord(a, mu) + self.coord(b, mu)) % self.dims[mu]) * self.strides[mu])
            .sum()
    }

    /// Site of `a - b` on the torus.
    pub fn sub(&self, a: usize, b: usize) -> usize {
        (0..self.ndim)
            .map(|mu| {
                let n = self.dims[mu];
                ((self.coord(a, mu) + n - self.coord(b, mu)) % n) * self.strides[mu]
            })
            .sum()
    }

    /// Site of `-a` on the torus.
    pub fn negate(&self, a: usize) -> usize {
        self.sub(0, a)
    }

    /// Minimal-image displacement of `site` from the origin, per direction.
    pub fn minimal_image(&self, site: usize) -> Vec<i64> {
        (0..self.ndim)
            .map(|mu| {
                let n = self.dims[mu] as i64;
                let c = self.coord(site, mu) as i64;
                if 2 * c > n {
                    c - n
                } else {
                    c
                }
            })
            .collect()
    }

    /// Euclidean minimal-image distance between two sites.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let d = self.sub(a, b);
        self.minimal_image(d)
            .iter()
            .map(|&c| (c * c) as f64)
            .sum::<f64>()
            .sqrt()
    }

    /// Eigenvalue of the symmetric stencil Laplacian for the Fourier mode `k`
    /// (flat row-major index over wavenumbers): `-sum_mu 4 sin^2(pi k_mu / N_mu)`.
    pub fn laplacian_eigenvalue(&self, k: usize) -> f64 {
        -(0..self.ndim)
            .map(|mu| {
                let s = (std::f64::consts::PI * self.coord(k, mu) as f64 / self.dims[mu] as f64)
                    .sin();
                4.0 * s * s
            })
            .sum::<f64>()
    }
}

impl std::fmt::Display for Lattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims().iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes() {
        assert_eq!(Lattice::new(&[4]).unwrap().volume(), 4);
        assert_eq!(Lattice::new(&[8, 8, 8]).unwrap().volume(), 512);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(Lattice::new(&[1, 4]), Err(Error::Dimension(_))));
        assert!(matches!(Lattice::new(&[]), Err(Error::Dimension(_))));
        assert!(matches!(
            Lattice::new(&[2, 2, 2, 2, 2]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Lattice::with_cap(&[8, 8], 63),
            Err(Error::Capacity { volume: 64, cap: 63 })
        ));
    }

    #[test]
    fn row_major_bijection() {
        let lat = Lattice::new(&[3, 4, 2]).unwrap();
        for site in 0..lat.volume() {
            let c: Vec<i64> = lat.coords(site).iter().map(|&x| x as i64).collect();
            assert_eq!(lat.index(&c), site);
        }
        assert_eq!(lat.index(&[0, 0, 1]), 1);
        assert_eq!(lat.index(&[1, 0, 0]), 8);
        assert_eq!(lat.index(&[-1, 0, 0]), 16);
    }

    #[test]
    fn neighbours_wrap() {
        let lat = Lattice::new(&[3, 4]).unwrap();
        for site in 0..lat.volume() {
            for mu in 0..2 {
                assert_eq!(lat.backward(lat.forward(site, mu), mu), site);
                let mut c: Vec<i64> = lat.coords(site).iter().map(|&x| x as i64).collect();
                c[mu] += 1;
                assert_eq!(lat.forward(site, mu), lat.index(&c));
            }
        }
    }

    #[test]
    fn torus_arithmetic() {
        let lat = Lattice::new(&[5, 6]).unwrap();
        for a in 0..lat.volume() {
            assert_eq!(lat.add(lat.sub(a, 7), 7), a);
            assert_eq!(lat.add(a, lat.negate(a)), 0);
        }
        assert_eq!(lat.minimal_image(lat.index(&[-1, 3])), vec![-1, 3]);
        assert!((lat.distance(lat.index(&[4, 0]), 0) - 1.0).abs() < 1e-15);
    }
}
