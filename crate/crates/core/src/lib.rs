//! Gauge-invariant dressed qubit states on periodic U(1) lattice backgrounds.
//!
//! A charge at site `x` is dressed with the phase `exp(-i e sum f(x-z).A(z))`
//! whose kernel `f` has forward divergence equal to the point source. The
//! crate builds such kernels (Coulomb kernels from the lattice Green's
//! function, string kernels along lattice paths, or user data), checks their
//! divergence law, and verifies that dressed states only pick up a global
//! phase under local gauge transformations.
//!
//! Conventions: unit spacing; `d+` / `d-` are forward / backward
//! differences; the Laplacian is `div_fwd(grad_bwd(.))`; the point source on
//! the torus carries a uniform `-1/V` background.

pub mod calculus;
pub mod dressing;
pub mod error;
pub mod field;
pub mod gauge;
pub mod io;
pub mod lattice;
pub mod observables;
pub mod poisson;
pub mod qstates;
pub mod random;
pub mod spectral;
pub mod sum;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use field::{ScalarField, TensorField, VectorField};
pub use lattice::Lattice;
