//! U(1) gauge transformations of classical background potentials.
//!
//! A gauge function `alpha` acts as `A_mu -> A_mu - (1/e) d+_mu alpha` and
//! `sigma -> sigma - alpha/e`.
//!
//! The gauge-invariant potential built from `Omega = exp(i e sigma)` is
//! `(i/2e) [Omega^dag (D_mu Omega) - (D_mu Omega)^dag Omega]` with
//! `D_mu = d_mu - i e A_mu`. For a U(1) phase this collapses:
//! `Omega^dag D_mu Omega = i e (d_mu sigma - A_mu)` and its conjugate is the
//! negative, so the bracket is `2 i e (d_mu sigma - A_mu)` and the result is
//! `A_mu - d_mu sigma`. [`invariant_potential`] evaluates that form directly
//! with the forward difference; `Omega` is never materialised.

use serde::{Deserialize, Serialize};

use crate::calculus::{forward_diff, grad_fwd};
use crate::error::{Error, Result};
use crate::field::{ensure_same, ScalarField, TensorField, VectorField};
use crate::lattice::Lattice;
use crate::random::random_scalar;

pub const DEFAULT_COUPLING: f64 = 1.0;

fn check_coupling(e: f64) -> Result<()> {
    if e.is_finite() && e != 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidCoupling(e))
    }
}

/// Gauge function `alpha(x)` (radians) together with the coupling `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransform {
    alpha: ScalarField,
    coupling: f64,
}

impl GaugeTransform {
    pub fn new(alpha: ScalarField, coupling: f64) -> Result<Self> {
        check_coupling(coupling)?;
        Ok(Self { alpha, coupling })
    }

    pub fn identity(lat: Lattice, coupling: f64) -> Result<Self> {
        Self::new(ScalarField::zeros(lat), coupling)
    }

    pub fn alpha(&self) -> &ScalarField {
        &self.alpha
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn lattice(&self) -> &Lattice {
        self.alpha.lattice()
    }

    /// The transform with `alpha -> -alpha`.
    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.alpha.scaled(-1.0),
            coupling: self.coupling,
        }
    }

    /// Composition: gauge functions add.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.coupling != other.coupling {
            return Err(Error::CouplingMismatch {
                left: self.coupling,
                right: other.coupling,
            });
        }
        Ok(Self {
            alpha: self.alpha.zip_with(&other.alpha, |a, b| a + b)?,
            coupling: self.coupling,
        })
    }
}

/// Loadable description of a seeded random gauge transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeSpec {
    pub seed: u64,
    #[serde(default)]
    pub smoothness: f64,
    /// Added to the mean-free random field; this is the only source of a nonzero mean.
    #[serde(default)]
    pub constant_offset: f64,
    #[serde(default = "default_coupling")]
    pub coupling: f64,
}

fn default_coupling() -> f64 {
    DEFAULT_COUPLING
}

impl GaugeSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            smoothness: 0.0,
            constant_offset: 0.0,
            coupling: DEFAULT_COUPLING,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self, lat: Lattice) -> Result<GaugeTransform> {
        let offset = self.constant_offset;
        if !offset.is_finite() {
            return Err(Error::NonFinite(format!("constant_offset {offset}")));
        }
        let alpha = random_scalar(lat, self.seed, self.smoothness).map(|v| v + offset);
        GaugeTransform::new(alpha, self.coupling)
    }
}

/// The auxiliary field `sigma` with `Omega = exp(i e sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StueckelbergField {
    sigma: ScalarField,
    coupling: f64,
}

impl StueckelbergField {
    pub fn new(sigma: ScalarField, coupling: f64) -> Result<Self> {
        check_coupling(coupling)?;
        Ok(Self { sigma, coupling })
    }

    pub fn sigma(&self) -> &ScalarField {
        &self.sigma
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }
}

/// `A'_mu = A_mu - (1/e) d+_mu alpha`.
pub fn apply_gauge_transform(a: &VectorField, g: &GaugeTransform) -> Result<VectorField> {
    ensure_same(a.lattice(), g.lattice())?;
    let inv_e = 1.0 / g.coupling;
    a.zip_with(&grad_fwd(&g.alpha), |a, d| a - inv_e * d)
}

/// `sigma' = sigma - alpha/e`.
pub fn transform_sigma(sf: &StueckelbergField, g: &GaugeTransform) -> Result<StueckelbergField> {
    ensure_same(sf.sigma.lattice(), g.lattice())?;
    if sf.coupling != g.coupling {
        return Err(Error::CouplingMismatch {
            left: sf.coupling,
            right: g.coupling,
        });
    }
    let inv_e = 1.0 / g.coupling;
    Ok(StueckelbergField {
        sigma: sf.sigma.zip_with(&g.alpha, |s, a| s - a * inv_e)?,
        coupling: sf.coupling,
    })
}

/// `F_mu_nu = d+_mu A_nu - d+_nu A_mu`; the lower triangle is the negated upper one.
pub fn field_strength(a: &VectorField) -> Result<TensorField> {
    let lat = *a.lattice();
    let d = lat.ndim();
    if d < 2 {
        return Err(Error::Dimension(format!(
            "field strength needs at least 2 directions, lattice has {d}"
        )));
    }
    let comps: Vec<ScalarField> = (0..d).map(|mu| a.component_field(mu)).collect();
    let mut f = TensorField::zeros(lat);
    for mu in 0..d {
        for nu in mu + 1..d {
            let upper = forward_diff(&comps[nu], mu)?
                .zip_with(&forward_diff(&comps[mu], nu)?, |x, y| x - y)?;
            f.component_mut(mu, nu).copy_from_slice(upper.values());
            f.component_mut(nu, mu)
                .iter_mut()
                .zip(upper.values())
                .for_each(|(lo, up)| *lo = -up);
        }
    }
    Ok(f)
}

/// Gauge-invariant potential `A - d+ sigma`.
pub fn invariant_potential(a: &VectorField, sf: &StueckelbergField) -> Result<VectorField> {
    ensure_same(a.lattice(), sf.sigma.lattice())?;
    a.sub(&grad_fwd(&sf.sigma))
}
