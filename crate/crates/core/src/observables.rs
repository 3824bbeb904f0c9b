//! Electric field of a dressed charge, Gauss-law residuals and radial profiles.
//!
//! With `E_mu(z) = -e f_mu(x - z)` the reflection `r = x - z` turns the
//! kernel's forward divergence into a backward divergence in `z`:
//! `div_bwd(E)(z) = e div_fwd(f)(x - z)`. A Coulomb kernel therefore gives
//! `div_bwd(E) = e ([z = x] - 1/V)` exactly.

use std::io::Write;

use crate::calculus::divergence_bwd;
use crate::dressing::DressingKernel;
use crate::error::{Error, Result};
use crate::field::VectorField;

/// Static field sourced by the dressing of a charge `e` at `x`.
pub fn electric_field(k: &DressingKernel, x: usize, e: f64) -> Result<VectorField> {
    let lat = *k.lattice();
    lat.check_site(x)?;
    let mut out = VectorField::zeros(lat);
    for mu in 0..lat.ndim() {
        let f = k.field().component(mu);
        out.component_mut(mu)
            .iter_mut()
            .enumerate()
            .for_each(|(z, v)| *v = -e * f[lat.sub(x, z)]);
    }
    Ok(out)
}

/// `max_z |div_bwd(E)(z) - e ([z = x] - background)|`.
pub fn gauss_residual(field: &VectorField, x: usize, e: f64, background: f64) -> Result<f64> {
    field.lattice().check_site(x)?;
    let div = divergence_bwd(field);
    Ok(div
        .values()
        .iter()
        .enumerate()
        .map(|(z, d)| {
            let source = if z == x { 1.0 - background } else { -background };
            (d - e * source).abs()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shell {
    /// Nominal shell radius; the shell holds sites with `|r - radius| < 1/2`.
    pub radius: f64,
    pub mean_field: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub ndim: usize,
    pub shells: Vec<Shell>,
}

/// Magnitude of `E` at a site, each component averaged over the two links
/// meeting there.
pub fn site_magnitude(field: &VectorField, z: usize) -> f64 {
    let lat = field.lattice();
    (0..lat.ndim())
        .map(|mu| {
            let c = 0.5 * (field.get(mu, z) + field.get(mu, lat.backward(z, mu)));
            c * c
        })
        .sum::<f64>()
        .sqrt()
}

/// Shell averages of `|E|` around `x`, shells of unit width centred on
/// `0, 1, ..., bins - 1`, minimal-image distances. Empty shells are dropped.
pub fn radial_profile(field: &VectorField, x: usize, bins: usize) -> Result<RadialProfile> {
    if bins < 2 {
        return Err(Error::Bin(bins));
    }
    let lat = *field.lattice();
    lat.check_site(x)?;
    let mut sums = vec![0.0; bins];
    let mut counts = vec![0usize; bins];
    for z in 0..lat.volume() {
        let shell = lat.distance(z, x).round() as usize;
        if shell < bins {
            sums[shell] += site_magnitude(field, z);
            counts[shell] += 1;
        }
    }
    let shells = (0..bins)
        .filter(|&b| counts[b] > 0)
        .map(|b| Shell {
            radius: b as f64,
            mean_field: sums[b] / counts[b] as f64,
            count: counts[b],
        })
        .collect();
    Ok(RadialProfile {
        ndim: lat.ndim(),
        shells,
    })
}

/// Field of a point charge in infinite space, `e / (4 pi r^2)`.
pub fn continuum_field(e: f64, r: f64) -> f64 {
    e / (4.0 * std::f64::consts::PI * r * r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombDeviation {
    pub radius: f64,
    pub mean_field: f64,
    pub count: usize,
    pub continuum: f64,
    pub relative_deviation: f64,
}

/// Relative deviation `(mean - continuum) / continuum` per shell, `r > 0` only.
pub fn coulomb_compare(p: &RadialProfile, e: f64) -> Result<Vec<CoulombDeviation>> {
    if p.ndim != 3 {
        return Err(Error::Dimension(format!(
            "Coulomb comparison needs a 3D lattice, profile is {}D",
            p.ndim
        )));
    }
    Ok(p.shells
        .iter()
        .filter(|s| s.radius > 0.0)
        .map(|s| {
            let continuum = continuum_field(e, s.radius);
            CoulombDeviation {
                radius: s.radius,
                mean_field: s.mean_field,
                count: s.count,
                continuum,
                relative_deviation: (s.mean_field - continuum) / continuum,
            }
        })
        .collect())
}

/// CSV with header `r,mean_E,count,continuum_E,rel_dev`; 17 significant digits.
pub fn write_profile_csv<W: Write>(w: &mut W, rows: &[CoulombDeviation]) -> Result<()> {
    writeln!(w, "r,mean_E,count,continuum_E,rel_dev")?;
    for row in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{},{:.16e},{:.16e}",
            row.radius, row.mean_field, row.count, row.continuum, row.relative_deviation
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dressing::{coulomb_kernel, parse_path, path_kernel};
    use crate::lattice::Lattice;

    #[test]
    fn two_site_field() {
        let lat = Lattice::new(&[2]).unwrap();
        let k = coulomb_kernel(lat);
        let e = electric_field(&k, 0, 1.0).unwrap();
        // E(z) = -f(-z): f = [-1/4, 1/4]
        assert!((e.get(0, 0) - 0.25).abs() < 1e-15);
        assert!((e.get(0, 1) + 0.25).abs() < 1e-15);
        assert!(gauss_residual(&e, 0, 1.0, 0.5).unwrap() < 1e-15);
    }

    #[test]
    fn loop_field_is_sourceless() {
        let lat = Lattice::new(&[5, 5]).unwrap();
        let k = path_kernel(lat, &parse_path("+x,+y,-x,-y").unwrap()).unwrap();
        let e = electric_field(&k, 7, 1.0).unwrap();
        assert_eq!(divergence_bwd(&e).max_abs(), 0.0);
    }

    #[test]
    fn zero_field_residual() {
        let lat = Lattice::new(&[4, 4]).unwrap();
        let r = gauss_residual(&VectorField::zeros(lat), 3, 1.0, 1.0 / 16.0).unwrap();
        assert!((r - 15.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn points_away_from_charge() {
        let lat = Lattice::new(&[8, 8, 8]).unwrap();
        let k = coulomb_kernel(lat);
        let x = lat.index(&[3, 4, 2]);
        let e = electric_field(&k, x, 1.0).unwrap();
        for mu in 0..3 {
            // Outgoing link from x and the link one further out are positive,
            // the link arriving from the other side is negative.
            let ahead = lat.forward(x, mu);
            let behind = lat.backward(x, mu);
            assert!(e.get(mu, x) > 0.0);
            assert!(e.get(mu, ahead) > 0.0);
            assert!(e.get(mu, behind) < 0.0);
        }
    }

    #[test]
    fn linear_in_charge() {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let k = coulomb_kernel(lat);
        let one = electric_field(&k, 5, 1.0).unwrap();
        let two = electric_field(&k, 5, 2.0).unwrap();
        assert_eq!(one.scaled(2.0), two);
    }

    #[test]
    fn profile_errors_and_zero_field() {
        let lat = Lattice::new(&[6, 6, 6]).unwrap();
        let zero = VectorField::zeros(lat);
        assert_eq!(radial_profile(&zero, 0, 1).unwrap_err(), Error::Bin(1));
        let p = radial_profile(&zero, 0, 4).unwrap();
        assert!(p.shells.iter().all(|s| s.mean_field == 0.0 && s.count > 0));
        assert!(p.shells.windows(2).all(|w| w[0].radius < w[1].radius));
        let flat = RadialProfile {
            ndim: 2,
            shells: vec![],
        };
        assert!(matches!(coulomb_compare(&flat, 1.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn exact_continuum_input() {
        let shells = (1..5)
            .map(|r| Shell {
                radius: r as f64,
                mean_field: continuum_field(1.5, r as f64),
                count: 1,
            })
            .collect();
        let rows = coulomb_compare(&RadialProfile { ndim: 3, shells }, 1.5).unwrap();
        assert!(rows.iter().all(|r| r.relative_deviation == 0.0));
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,mean_E,count,continuum_E,rel_dev\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
