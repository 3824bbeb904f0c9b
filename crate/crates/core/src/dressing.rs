//! Dressing kernels and the dressing phase of a charge.
//!
//! A kernel `f_mu(r)` lives on relative coordinates `r = x - z`. Anchored at
//! a site `x` it contributes the phase `exp(-i Phi)` with
//! `Phi = e sum_z sum_mu f_mu(x - z) A_mu(z)`.
//!
//! Writing `rho = div_fwd(f)`, summation by parts turns the change of `Phi`
//! under `A -> A - (1/e) d+ alpha` into
//! `Phi' - Phi = -sum_z rho(x - z) alpha(z)`. The matter phase
//! `exp(-i alpha(x))` is cancelled exactly when `rho` is the Kronecker delta,
//! up to whatever else `rho` contains:
//!
//! * Coulomb kernels: `rho = [r = 0] - 1/V`, leaving the global phase
//!   `exp(-i mean(alpha))`.
//! * Path kernels: `rho = [r = 0] - [r = sink]`, leaving `exp(-i alpha(x - sink))`,
//!   the phase of the compensating charge at the far end of the string.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{divergence_fwd, grad_bwd};
use crate::error::{Error, Result};
use crate::field::{ensure_same, ScalarField, VectorField};
use crate::gauge::{apply_gauge_transform, GaugeTransform};
use crate::lattice::Lattice;
use crate::poisson::green_function;
use crate::spectral;
use crate::sum::NeumaierSum;

/// Constraint tolerance for Coulomb and custom kernels.
pub const COULOMB_TOLERANCE: f64 = 1e-10;
/// Constraint tolerance for path kernels, whose divergence is integer valued.
pub const PATH_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Coulomb,
    Path,
    Custom,
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelKind::Coulomb => "coulomb",
            KernelKind::Path => "path",
            KernelKind::Custom => "custom",
        })
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coulomb" => Ok(KernelKind::Coulomb),
            "path" => Ok(KernelKind::Path),
            "custom" => Ok(KernelKind::Custom),
            other => Err(Error::Format(format!("unknown kernel kind {other:?}"))),
        }
    }
}

/// One signed unit step of a path in physical space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub direction: usize,
    pub forward: bool,
}

impl Step {
    pub fn plus(direction: usize) -> Self {
        Self {
            direction,
            forward: true,
        }
    }

    pub fn minus(direction: usize) -> Self {
        Self {
            direction,
            forward: false,
        }
    }

    pub fn reversed(self) -> Self {
        Self {
            forward: !self.forward,
            ..self
        }
    }
}

impl std::str::FromStr for Step {
    type Err = Error;

    /// `+x`, `-y`, `+z`, `-t`, or with a numeric direction: `+0`, `-3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::PathStep(s.to_string());
        let s = s.trim();
        let (forward, rest) = match s.chars().next() {
            Some('+') => (true, &s[1..]),
            Some('-') => (false, &s[1..]),
            _ => return Err(bad()),
        };
        let direction = match rest {
            "x" => 0,
            "y" => 1,
            "z" => 2,
            "t" => 3,
            digits => digits.parse::<usize>().map_err(|_| bad())?,
        };
        Ok(Self { direction, forward })
    }
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = if self.forward { '+' } else { '-' };
        match self.direction {
            0 => write!(f, "{sign}x"),
            1 => write!(f, "{sign}y"),
            2 => write!(f, "{sign}z"),
            3 => write!(f, "{sign}t"),
            d => write!(f, "{sign}{d}"),
        }
    }
}

/// Parses a comma-separated step list such as `+x,+x,-y`.
pub fn parse_path(text: &str) -> Result<Vec<Step>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Exact reverse of a path: negated steps in reverse order.
pub fn reverse_path(steps: &[Step]) -> Vec<Step> {
    steps.iter().rev().map(|s| s.reversed()).collect()
}

/// Signed link field of a physical path starting at relative site `origin`.
///
/// A physical step `+mu` moves the relative coordinate `r = x - z` by `-mu`.
/// Every step from `r` to `r'` adds `[r] - [r']` to the forward divergence,
/// so the total is `[origin] - [end]`. Returns the field and the relative end
/// displacement.
pub fn path_links(lat: Lattice, origin: &[i64], steps: &[Step]) -> Result<(VectorField, Vec<i64>)> {
    if origin.len() != lat.ndim() {
        return Err(Error::Dimension(format!(
            "origin has {} coordinates, lattice has {}",
            origin.len(),
            lat.ndim()
        )));
    }
    let mut f = VectorField::zeros(lat);
    let mut r = origin.to_vec();
    for step in steps {
        let mu = step.direction;
        lat.check_direction(mu)?;
        if step.forward {
            // r -> r - mu: the link value sits at r.
            let site = lat.index(&r);
            f.set(mu, site, f.get(mu, site) - 1.0);
            r[mu] -= 1;
        } else {
            // r -> r + mu: the link value sits at r + mu.
            r[mu] += 1;
            let site = lat.index(&r);
            f.set(mu, site, f.get(mu, site) + 1.0);
        }
    }
    Ok((f, r))
}

/// A dressing kernel together with its verified divergence law.
#[derive(Debug, Clone, PartialEq)]
pub struct DressingKernel {
    field: VectorField,
    kind: KernelKind,
    divergence_residual: f64,
    background_charge_density: f64,
    sink_offset: Option<Vec<i64>>,
}

impl DressingKernel {
    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn lattice(&self) -> &Lattice {
        self.field.lattice()
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn divergence_residual(&self) -> f64 {
        self.divergence_residual
    }

    /// `1/V` for Coulomb and custom kernels, 0 for path kernels.
    pub fn background_charge_density(&self) -> f64 {
        self.background_charge_density
    }

    /// Relative displacement of the compensating sink (path kernels only).
    pub fn sink_offset(&self) -> Option<&[i64]> {
        self.sink_offset.as_deref()
    }

    pub fn sink_site(&self) -> Option<usize> {
        self.sink_offset.as_ref().map(|o| self.lattice().index(o))
    }

    /// The divergence `div_fwd(f)` this kernel is required to have.
    pub fn target_divergence(&self) -> ScalarField {
        target_divergence(*self.lattice(), self.kind, self.sink_site())
    }

    /// Zero kernel, for a charge whose compensating string is carried by a partner.
    pub fn undressed(lat: Lattice) -> Self {
        Self {
            field: VectorField::zeros(lat),
            kind: KernelKind::Path,
            divergence_residual: 0.0,
            background_charge_density: 0.0,
            sink_offset: Some(vec![0; lat.ndim()]),
        }
    }

    /// Serializable summary written next to the kernel field.
    pub fn sidecar(&self) -> KernelSidecar {
        KernelSidecar {
            kind: self.kind,
            divergence_residual: self.divergence_residual,
            sink_offset: self.sink_offset.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSidecar {
    pub kind: KernelKind,
    pub divergence_residual: f64,
    pub sink_offset: Option<Vec<i64>>,
}

fn target_divergence(lat: Lattice, kind: KernelKind, sink: Option<usize>) -> ScalarField {
    match kind {
        KernelKind::Coulomb | KernelKind::Custom => {
            let bg = 1.0 / lat.volume() as f64;
            ScalarField::from_fn(lat, |r| if r == 0 { 1.0 - bg } else { -bg })
        }
        KernelKind::Path => {
            let mut rho = ScalarField::delta(lat, 0);
            let sink = sink.unwrap_or(0);
            rho.values_mut()[sink] -= 1.0;
            rho
        }
    }
}

/// Coulomb kernel `f_mu = d-_mu G` with `G` the lattice Green's function.
pub fn coulomb_kernel(lat: Lattice) -> DressingKernel {
    let field = grad_bwd(&green_function(lat));
    let residual = divergence_fwd(&field)
        .max_abs_diff(&target_divergence(lat, KernelKind::Coulomb, None))
        .expect("same lattice");
    DressingKernel {
        field,
        kind: KernelKind::Coulomb,
        divergence_residual: residual,
        background_charge_density: 1.0 / lat.volume() as f64,
        sink_offset: None,
    }
}

/// String kernel along a physical path leaving the charge.
pub fn path_kernel(lat: Lattice, steps: &[Step]) -> Result<DressingKernel> {
    if steps.is_empty() {
        return Err(Error::EmptyPath);
    }
    let (field, end) = path_links(lat, &vec![0; lat.ndim()], steps)?;
    let sink = lat.index(&end);
    let residual = divergence_fwd(&field)
        .max_abs_diff(&target_divergence(lat, KernelKind::Path, Some(sink)))?;
    Ok(DressingKernel {
        field,
        kind: KernelKind::Path,
        divergence_residual: residual,
        background_charge_density: 0.0,
        sink_offset: Some(end),
    })
}

/// Validates externally supplied kernel data against the law for `kind`.
///
/// For path kernels the sink is read off the divergence: the site where it
/// is `-1`, or the origin for closed loops.
pub fn load_kernel(data: VectorField, kind: KernelKind) -> Result<DressingKernel> {
    let lat = *data.lattice();
    let div = divergence_fwd(&data);
    let (sink_offset, tolerance) = match kind {
        KernelKind::Coulomb | KernelKind::Custom => (None, COULOMB_TOLERANCE),
        KernelKind::Path => {
            let (argmin, min) = div
                .values()
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |best, (r, &v)| if v < best.1 { (r, v) } else { best });
            let sink = if min < -0.5 { argmin } else { 0 };
            (Some(lat.minimal_image(sink)), PATH_TOLERANCE)
        }
    };
    let sink = sink_offset.as_ref().map(|o| lat.index(o));
    let residual = div.max_abs_diff(&target_divergence(lat, kind, sink))?;
    if residual > tolerance {
        return Err(Error::ConstraintViolation {
            residual,
            tolerance,
        });
    }
    let background = match kind {
        KernelKind::Path => 0.0,
        _ => 1.0 / lat.volume() as f64,
    };
    Ok(DressingKernel {
        field: data,
        kind,
        divergence_residual: residual,
        background_charge_density: background,
        sink_offset,
    })
}

/// Unit-modulus dressing factor `exp(-i Phi)`, with the unwrapped exponent kept alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressingPhase {
    exponent: f64,
    value: Complex64,
}

impl DressingPhase {
    pub fn from_exponent(exponent: f64) -> Self {
        Self {
            exponent,
            value: Complex64::from_polar(1.0, -exponent),
        }
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    /// `Phi`, with `value = exp(-i Phi)`.
    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

/// `Phi(x) = e sum_z sum_mu f_mu(x - z) A_mu(z)` by direct compensated summation.
pub fn dressing_exponent(k: &DressingKernel, a: &VectorField, x: usize, e: f64) -> Result<f64> {
    let lat = *k.lattice();
    ensure_same(&lat, a.lattice())?;
    lat.check_site(x)?;
    let mut acc = NeumaierSum::new();
    for z in 0..lat.volume() {
        let r = lat.sub(x, z);
        for mu in 0..lat.ndim() {
            acc.add(k.field.get(mu, r) * a.get(mu, z));
        }
    }
    Ok(e * acc.value())
}

pub fn dressing_phase(k: &DressingKernel, a: &VectorField, x: usize, e: f64) -> Result<DressingPhase> {
    Ok(DressingPhase::from_exponent(dressing_exponent(k, a, x, e)?))
}

/// Direct-sum exponents for several anchors, evaluated in parallel.
pub fn dressing_exponents(
    k: &DressingKernel,
    a: &VectorField,
    anchors: &[usize],
    e: f64,
) -> Result<Vec<f64>> {
    anchors
        .par_iter()
        .map(|&x| dressing_exponent(k, a, x, e))
        .collect()
}

/// Exponents at every anchor at once through FFT convolution.
pub fn dressing_exponents_spectral(k: &DressingKernel, a: &VectorField, e: f64) -> Result<Vec<f64>> {
    let lat = *k.lattice();
    ensure_same(&lat, a.lattice())?;
    let mut total = vec![0.0; lat.volume()];
    for mu in 0..lat.ndim() {
        let conv = spectral::convolve(&lat, k.field.component(mu), a.component(mu));
        total.iter_mut().zip(conv).for_each(|(t, c)| *t += c);
    }
    total.iter_mut().for_each(|t| *t *= e);
    Ok(total)
}

/// Change of the dressing phase angle at `x` when `A` is gauge transformed by `g`.
///
/// Returns `-(Phi(A') - Phi(A))`, the amount by which the argument of
/// `exp(-i Phi)` advances; both exponents are direct sums so no unwrapping is
/// needed. The coupling is taken from `g`.
pub fn phase_shift_under_gauge(
    k: &DressingKernel,
    a: &VectorField,
    g: &GaugeTransform,
    x: usize,
) -> Result<f64> {
    let e = g.coupling();
    let transformed = apply_gauge_transform(a, g)?;
    let before = dressing_exponent(k, a, x, e)?;
    let after = dressing_exponent(k, &transformed, x, e)?;
    Ok(before - after)
}

/// Closed-form counterpart of [`phase_shift_under_gauge`]: `sum_z rho(x - z) alpha(z)`
/// with `rho = div_fwd(f)` measured from the kernel itself.
pub fn predicted_phase_shift(k: &DressingKernel, alpha: &ScalarField, x: usize) -> Result<f64> {
    let lat = *k.lattice();
    ensure_same(&lat, alpha.lattice())?;
    lat.check_site(x)?;
    let rho = divergence_fwd(&k.field);
    let mut acc = NeumaierSum::new();
    for z in 0..lat.volume() {
        acc.add(rho.get(lat.sub(x, z)) * alpha.get(z));
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::GaugeSpec;
    use crate::random::random_vector;

    #[test]
    fn two_site_coulomb_kernel() {
        let lat = Lattice::new(&[2]).unwrap();
        let k = coulomb_kernel(lat);
        assert!((k.field().get(0, 0) + 0.25).abs() < 1e-15);
        assert!((k.field().get(0, 1) - 0.25).abs() < 1e-15);
        let div = divergence_fwd(k.field());
        assert!((div.get(0) - 0.5).abs() < 1e-15 && (div.get(1) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn coulomb_components_sum_to_zero() {
        let lat = Lattice::new(&[6, 4, 5]).unwrap();
        let k = coulomb_kernel(lat);
        for mu in 0..3 {
            assert!(k.field().component_field(mu).sum().abs() < 1e-14);
        }
        assert!(k.divergence_residual() <= COULOMB_TOLERANCE);
    }

    #[test]
    fn single_step_path() {
        let lat = Lattice::new(&[5, 4]).unwrap();
        let k = path_kernel(lat, &[Step::plus(0)]).unwrap();
        assert_eq!(k.sink_offset(), Some(&[-1, 0][..]));
        // Only link value: direction 0 at r = 0 (the link between r = -x and r = 0).
        for mu in 0..2 {
            for r in 0..lat.volume() {
                let expected = if mu == 0 && r == 0 { -1.0 } else { 0.0 };
                assert_eq!(k.field().get(mu, r), expected);
            }
        }
        let div = divergence_fwd(k.field());
        let sink = lat.index(&[-1, 0]);
        for r in 0..lat.volume() {
            let expected = if r == 0 { 1.0 } else if r == sink { -1.0 } else { 0.0 };
            assert_eq!(div.get(r), expected);
        }
    }

    #[test]
    fn path_and_reverse_cancel() {
        let lat = Lattice::new(&[6, 6]).unwrap();
        let steps = parse_path("+x,+x,-y,+x").unwrap();
        let (f, end) = path_links(lat, &[0, 0], &steps).unwrap();
        let (g, back) = path_links(lat, &end, &reverse_path(&steps)).unwrap();
        assert_eq!(back, vec![0, 0]);
        assert_eq!(f.add(&g).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn closed_loop_is_divergence_free() {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let k = path_kernel(lat, &parse_path("+x,+y,-x,-y,+z,-z").unwrap()).unwrap();
        assert_eq!(divergence_fwd(k.field()).max_abs(), 0.0);
        assert_eq!(k.sink_site(), Some(0));
    }

    #[test]
    fn path_errors() {
        let lat = Lattice::new(&[4, 4]).unwrap();
        assert_eq!(path_kernel(lat, &[]).unwrap_err(), Error::EmptyPath);
        assert!(matches!(
            path_kernel(lat, &[Step::plus(2)]),
            Err(Error::Direction { .. })
        ));
        assert!(matches!(parse_path("+x,*y"), Err(Error::PathStep(_))));
        assert_eq!(
            parse_path("+x, -y,+3").unwrap(),
            vec![Step::plus(0), Step::minus(1), Step::plus(3)]
        );
    }

    #[test]
    fn load_round_trip_and_rejections() {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let k = coulomb_kernel(lat);
        let loaded = load_kernel(k.field().clone(), KernelKind::Coulomb).unwrap();
        assert_eq!(loaded.kind(), KernelKind::Coulomb);

        match load_kernel(VectorField::zeros(lat), KernelKind::Coulomb) {
            Err(Error::ConstraintViolation { residual, .. }) => {
                assert!((residual - (1.0 - 1.0 / 64.0)).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }

        let mut perturbed = k.field().clone();
        perturbed.set(1, 5, perturbed.get(1, 5) + 1e-6);
        match load_kernel(perturbed, KernelKind::Coulomb) {
            Err(Error::ConstraintViolation { residual, .. }) => assert!(residual >= 1e-6 * 0.999),
            other => panic!("unexpected {other:?}"),
        }

        let p = path_kernel(lat, &parse_path("+x,+y").unwrap()).unwrap();
        let reloaded = load_kernel(p.field().clone(), KernelKind::Path).unwrap();
        assert_eq!(reloaded.sink_site(), p.sink_site());
    }

    #[test]
    fn phase_trivial_cases() {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let k = coulomb_kernel(lat);
        let p = dressing_phase(&k, &VectorField::zeros(lat), 3, 1.0).unwrap();
        assert_eq!(p.value(), Complex64::new(1.0, 0.0));
        let a = VectorField::constant(lat, &[0.3, -1.2, 2.0]).unwrap();
        let p = dressing_phase(&k, &a, 17, 1.0).unwrap();
        assert!(p.exponent().abs() < 1e-14);
        assert!((p.value().norm() - 1.0).abs() < 1e-12);
        assert!(matches!(
            dressing_phase(&k, &a, 64, 1.0),
            Err(Error::Site { .. })
        ));
    }

    #[test]
    fn direct_and_spectral_agree() {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        let k = coulomb_kernel(lat);
        let a = random_vector(lat, 21, 0.0);
        let spectral = dressing_exponents_spectral(&k, &a, 1.3).unwrap();
        let anchors: Vec<usize> = (0..lat.volume()).collect();
        let direct = dressing_exponents(&k, &a, &anchors, 1.3).unwrap();
        for (d, s) in direct.iter().zip(&spectral) {
            assert!((d - s).abs() <= 1e-10);
        }
    }

    #[test]
    fn coulomb_shift_is_alpha_minus_mean() {
        let lat = Lattice::new(&[6, 6, 6]).unwrap();
        let k = coulomb_kernel(lat);
        let a = random_vector(lat, 2, 0.0);
        let constant = GaugeTransform::new(ScalarField::constant(lat, 0.9), 1.0).unwrap();
        assert!(phase_shift_under_gauge(&k, &a, &constant, 0).unwrap().abs() <= 1e-12);
        let g = GaugeSpec::new(8).build(lat).unwrap();
        for x in [0, 7, 100, 215] {
            let shift = phase_shift_under_gauge(&k, &a, &g, x).unwrap();
            assert!((shift - g.alpha().get(x)).abs() <= 1e-10);
        }
    }

    #[test]
    fn loop_kernel_decouples() {
        let lat = Lattice::new(&[6, 6, 6]).unwrap();
        let k = path_kernel(lat, &parse_path("+x,+y,+y,-x,-y,-y").unwrap()).unwrap();
        let a = random_vector(lat, 3, 0.0);
        let g = GaugeSpec {
            constant_offset: 0.4,
            ..GaugeSpec::new(5)
        }
        .build(lat)
        .unwrap();
        for x in [0, 50, 199] {
            assert!(phase_shift_under_gauge(&k, &a, &g, x).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn step_display_round_trip() {
        for s in ["+x", "-y", "+z", "-t"] {
            assert_eq!(s.parse::<Step>().unwrap().to_string(), s);
        }
    }
}
