//! Invariance checks composed from library operations. `report --all` runs
//! every group here; `gauge-test`, `overlap` and `entangle-demo` reuse parts.

use std::sync::Arc;

use serde::Serialize;

use dressage::calculus::{divergence_fwd, laplacian, sum_by_parts_residual};
use dressage::dressing::{
    coulomb_kernel, load_kernel, path_kernel, DressingKernel, KernelKind, Step,
};
use dressage::gauge::{
    apply_gauge_transform, field_strength, invariant_potential, transform_sigma, GaugeSpec,
    StueckelbergField,
};
use dressage::observables::{coulomb_compare, electric_field, gauss_residual, radial_profile};
use dressage::poisson::{neutralized_delta, solve_poisson, solve_poisson_dense};
use dressage::qstates::{
    entangle, entanglement_entropy, make_qftbit, overlap_phase, ChargeSign, MultiQubitState,
};
use dressage::random::{random_scalar, random_vector};
use dressage::{Complex64, Lattice, Result, VectorField};

use crate::report::{Check, Report};

pub const CONSTRAINT_TOL: f64 = 1e-10;
pub const INVARIANCE_TOL: f64 = 1e-10;
pub const BARE_SPREAD_MIN: f64 = 0.1;
pub const SBP_TOL: f64 = 1e-12;
pub const POISSON_TOL: f64 = 1e-10;
pub const GAUSS_TOL: f64 = 1e-10;
/// Measured lattice artifact on 32^3 for 3 <= r <= 8 is 0.069.
pub const PROFILE_TOL: f64 = 0.075;
pub const COVARIANCE_TOL: f64 = 1e-12;
pub const ENTROPY_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Shared knobs for the randomized checks.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub coupling: f64,
    pub smoothness: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            coupling: 1.0,
            smoothness: 0.5,
        }
    }
}

impl SuiteConfig {
    fn gauge(&self, index: u64, offset: f64) -> GaugeSpec {
        GaugeSpec {
            seed: self.seed.wrapping_mul(1_000_003).wrapping_add(1 + index),
            smoothness: self.smoothness,
            constant_offset: offset,
            coupling: self.coupling,
        }
    }

    fn background(&self, lat: Lattice) -> VectorField {
        random_vector(lat, self.seed ^ 0xA5A5_5A5A, self.smoothness)
    }
}

/// Worst-case statistics of the gauge action on a state over many transforms.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ContrastStats {
    pub transforms: usize,
    pub max_dressed_deviation: f64,
    pub min_bare_spread: f64,
    pub max_global_law_error: f64,
}

/// Predicted global phase: each charge dressed with a neutralising background
/// contributes `exp(-i q mean(alpha))`; string-dressed charges contribute none.
fn predicted_phase(state_charges: &[(i32, KernelKind)], mean_alpha: f64) -> Complex64 {
    let q: i32 = state_charges
        .iter()
        .filter(|(_, kind)| *kind != KernelKind::Path)
        .map(|(q, _)| q)
        .sum();
    Complex64::from_polar(1.0, -(q as f64) * mean_alpha)
}

pub fn gauge_contrast(
    state: &MultiQubitState,
    charges: &[(i32, KernelKind)],
    cfg: &SuiteConfig,
    transforms: usize,
    offset: f64,
    translations: &[usize],
) -> Result<ContrastStats> {
    let lat = *state.lattice();
    let a = cfg.background(lat);
    let mut stats = ContrastStats {
        transforms,
        min_bare_spread: f64::INFINITY,
        ..Default::default()
    };
    for i in 0..transforms {
        let g = cfg.gauge(i as u64, offset).build(lat)?;
        let r = state.gauge_action(&a, &g, translations)?;
        let law = (r.global_phase - predicted_phase(charges, g.alpha().mean())).norm();
        stats.max_dressed_deviation = stats.max_dressed_deviation.max(r.max_local_deviation);
        stats.min_bare_spread = stats.min_bare_spread.min(r.bare_phase_spread);
        stats.max_global_law_error = stats.max_global_law_error.max(law);
    }
    Ok(stats)
}

pub fn single_charge(
    kernel: Arc<DressingKernel>,
    charge: ChargeSign,
    site: usize,
) -> Result<MultiQubitState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let q = make_qftbit(site, c(h), c(h), charge, kernel)?;
    Ok(MultiQubitState::from_qftbit(&q))
}

/// Two like charges with Coulomb dressings in a Bell superposition.
pub fn coulomb_pair(lat: Lattice, kernel: Arc<DressingKernel>, charge: ChargeSign) -> Result<MultiQubitState> {
    let y = lat.index(&vec![1; lat.ndim()]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let q1 = make_qftbit(0, c(1.0), c(0.0), charge, kernel.clone())?;
    let q2 = make_qftbit(y, c(1.0), c(0.0), charge, kernel)?;
    entangle(&q1, &q2, [[c(h), c(0.0)], [c(0.0), c(h)]])
}

/// `+1` charge at the origin carrying a string to its `-1` partner at the path end.
pub fn neutral_pair(lat: Lattice, steps: &[Step]) -> Result<MultiQubitState> {
    neutral_pair_with(Arc::new(path_kernel(lat, steps)?))
}

/// As [`neutral_pair`], for an existing path kernel.
pub fn neutral_pair_with(string: Arc<DressingKernel>) -> Result<MultiQubitState> {
    let lat = *string.lattice();
    if string.kind() != KernelKind::Path {
        return Err(dressage::Error::Format(format!(
            "a neutral pair needs a path kernel, got {}",
            string.kind()
        )));
    }
    let sink = string.sink_site().expect("path kernel has a sink");
    let partner_site = lat.negate(sink);
    let partner = Arc::new(DressingKernel::undressed(lat));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let q1 = make_qftbit(0, c(1.0), c(0.0), ChargeSign::Positive, string)?;
    let q2 = make_qftbit(partner_site, c(1.0), c(0.0), ChargeSign::Negative, partner)?;
    entangle(&q1, &q2, [[c(h), c(0.0)], [c(0.0), c(h)]])
}

fn constraint_checks(report: &mut Report) -> Result<()> {
    let shapes: [&[usize]; 7] = [&[2], &[4], &[8], &[8, 8], &[8, 8, 8], &[16, 16, 16], &[32, 32, 32]];
    let mut worst = 0.0f64;
    for dims in shapes {
        let lat = Lattice::new(dims)?;
        let k = coulomb_kernel(lat);
        let measured = divergence_fwd(k.field())
            .max_abs_diff(&neutralized_delta(lat))?;
        worst = worst.max(measured);
        report.value(&format!("constraint_residual_{lat}"), measured);
    }
    report.check(Check::at_most("constraint.coulomb_divergence", worst, CONSTRAINT_TOL));
    let two = coulomb_kernel(Lattice::new(&[2])?);
    let hand = (two.field().get(0, 0) + 0.25)
        .abs()
        .max((two.field().get(0, 1) - 0.25).abs());
    report.check(Check::at_most("constraint.two_site_hand_value", hand, 1e-15));
    Ok(())
}

fn invariance_checks(report: &mut Report, cfg: &SuiteConfig) -> Result<()> {
    let lat = Lattice::new(&[8, 8, 8])?;
    let kernel = Arc::new(coulomb_kernel(lat));
    let state = single_charge(kernel, ChargeSign::Positive, 0)?;
    let translations: Vec<usize> = (0..lat.volume()).collect();
    let stats = gauge_contrast(
        &state,
        &[(1, KernelKind::Coulomb)],
        cfg,
        100,
        0.0,
        &translations,
    )?;
    report.check(Check::at_most(
        "invariance.dressed_local_deviation",
        stats.max_dressed_deviation,
        INVARIANCE_TOL,
    ));
    report.check(Check::at_least(
        "invariance.bare_phase_spread",
        stats.min_bare_spread,
        BARE_SPREAD_MIN,
    ));
    report.check(Check::at_most(
        "invariance.zero_mean_global_phase",
        stats.max_global_law_error,
        INVARIANCE_TOL,
    ));
    report.value("invariance_stats", stats);
    Ok(())
}

fn global_phase_checks(report: &mut Report, cfg: &SuiteConfig) -> Result<()> {
    let lat = Lattice::new(&[8, 8, 8])?;
    let kernel = Arc::new(coulomb_kernel(lat));
    let translations: Vec<usize> = (0..lat.volume()).step_by(7).collect();
    let cases = [
        ("plus_one", single_charge(kernel.clone(), ChargeSign::Positive, 0)?, 1),
        ("minus_one", single_charge(kernel.clone(), ChargeSign::Negative, 0)?, -1),
        ("plus_two_pair", coulomb_pair(lat, kernel.clone(), ChargeSign::Positive)?, 2),
    ];
    for (name, state, q) in cases {
        let q: i32 = q;
        let charges = vec![(q.signum(), KernelKind::Coulomb); q.unsigned_abs() as usize];
        let mut worst = 0.0f64;
        for seed in 0..20u64 {
            let offset = 0.3 + 0.17 * seed as f64;
            let sub = SuiteConfig {
                seed: cfg.seed.wrapping_add(seed),
                ..*cfg
            };
            let s = gauge_contrast(&state, &charges, &sub, 1, offset, &translations)?;
            worst = worst.max(s.max_global_law_error).max(s.max_dressed_deviation);
        }
        report.check(Check::at_most(
            format!("global_phase.{name}"),
            worst,
            INVARIANCE_TOL,
        ));
    }
    let pair = neutral_pair(lat, &[Step::plus(0), Step::plus(0), Step::plus(1)])?;
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let sub = SuiteConfig {
            seed: cfg.seed.wrapping_add(seed),
            ..*cfg
        };
        let s = gauge_contrast(
            &pair,
            &[(1, KernelKind::Path), (-1, KernelKind::Path)],
            &sub,
            1,
            0.3 + 0.17 * seed as f64,
            &translations,
        )?;
        worst = worst.max(s.max_global_law_error).max(s.max_dressed_deviation);
    }
    report.check(Check::at_most("global_phase.neutral_pair", worst, INVARIANCE_TOL));
    Ok(())
}

fn sbp_checks(report: &mut Report, cfg: &SuiteConfig) -> Result<()> {
    let lat = Lattice::new(&[8, 8, 8])?;
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let seed = cfg.seed.wrapping_mul(7919).wrapping_add(i);
        let v = random_vector(lat, seed, 0.0);
        let s = random_scalar(lat, seed.wrapping_add(1 << 32), 0.0);
        let r = sum_by_parts_residual(&v, &s)? / (v.norm() * s.norm());
        worst = worst.max(r);
    }
    report.check(Check::at_most("summation_by_parts.relative_residual", worst, SBP_TOL));
    Ok(())
}

/// Every lattice shape with `D <= 4`, extents `>= 2` and volume `<= max_volume`.
pub fn small_lattices(max_volume: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, volume: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == 4 {
            return;
        }
        let mut n = 2;
        while volume * n <= max {
            prefix.push(n);
            extend(prefix, volume * n, max, out);
            prefix.pop();
            n += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, max_volume, &mut out);
    out
}

fn poisson_checks(report: &mut Report, cfg: &SuiteConfig) -> Result<()> {
    let mut worst = 0.0f64;
    let shapes = small_lattices(64);
    for (i, dims) in shapes.iter().enumerate() {
        let lat = Lattice::new(dims)?;
        for src in [
            neutralized_delta(lat),
            random_scalar(lat, cfg.seed.wrapping_add(i as u64), 0.0),
        ] {
            let spectral = solve_poisson(&src)?;
            let dense = solve_poisson_dense(&src)?;
            worst = worst.max(spectral.max_abs_diff(&dense)?);
        }
    }
    report.value("poisson_lattices", shapes.len());
    report.check(Check::at_most("poisson.spectral_vs_dense", worst, POISSON_TOL));
    let lat = Lattice::new(&[8, 8, 8])?;
    let src = neutralized_delta(lat);
    let round = laplacian(&solve_poisson(&src)?).max_abs_diff(&src)?;
    report.check(Check::at_most("poisson.round_trip_8cubed", round, POISSON_TOL));
    Ok(())
}

fn gauss_checks(report: &mut Report, cfg: &SuiteConfig) -> Result<()> {
    let lat = Lattice::new(&[16, 16, 16])?;
    let k = coulomb_kernel(lat);
    let x = lat.index(&[5, 9, 13]);
    let e = electric_field(&k, x, cfg.coupling)?;
    let r = gauss_residual(&e, x, cfg.coupling, 1.0 / lat.volume() as f64)?;
    report.check(Check::at_most("gauss.coulomb_16cubed", r, GAUSS_TOL));
    Ok(())
}

/// Worst relative deviation, inner-shell monotonicity and `(r, deviation)` rows.
pub type ProfileSummary = (f64, bool, Vec<(f64, f64)>);

/// Shell deviations on 32^3 for `3 <= r <= 8`; also returns whether the
/// profile decreases monotonically over `1 <= r <= 8`.
pub fn coulomb_profile(cfg: &SuiteConfig) -> Result<ProfileSummary> {
    let lat = Lattice::new(&[32, 32, 32])?;
    let k = coulomb_kernel(lat);
    let e = electric_field(&k, 0, cfg.coupling)?;
    let profile = radial_profile(&e, 0, 17)?;
    let rows = coulomb_compare(&profile, cfg.coupling)?;
    let worst = rows
        .iter()
        .filter(|r| (3.0..=8.0).contains(&r.radius))
        .map(|r| r.relative_deviation.abs())
        .fold(0.0, f64::max);
    let inner: Vec<f64> = rows
        .iter()
        .filter(|r| (1.0..=8.0).contains(&r.radius))
        .map(|r| r.mean_field)
        .collect();
    let monotone = inner.windows(2).all(|w| w[1] < w[0]);
    let table = rows
        .iter()
        .map(|r| (r.radius, r.relative_deviation))
        .collect();
    Ok((worst, monotone, table))
}

fn profile_checks(report: &mut Report, cfg: &SuiteConfig) -> Result<()> {
    let (worst, monotone, table) = coulomb_profile(cfg)?;
    report.check(Check::at_most("coulomb_profile.relative_deviation", worst, PROFILE_TOL));
    report.check(Check::at_least(
        "coulomb_profile.monotone_inner_shells",
        if monotone { 1.0 } else { 0.0 },
        1.0,
    ));
    report.value("coulomb_profile", table);
    Ok(())
}

fn covariance_checks(report: &mut Report, cfg: &SuiteConfig) -> Result<()> {
    let lat = Lattice::new(&[8, 8, 8])?;
    let mut worst_potential = 0.0f64;
    let mut worst_strength = 0.0f64;
    for i in 0..50u64 {
        let seed = cfg.seed.wrapping_mul(104_729).wrapping_add(i);
        let a = random_vector(lat, seed, cfg.smoothness);
        let sf = StueckelbergField::new(random_scalar(lat, seed ^ 0xFF, 0.0), cfg.coupling)?;
        let g = cfg.gauge(1000 + i, 0.0).build(lat)?;
        let a2 = apply_gauge_transform(&a, &g)?;
        let sf2 = transform_sigma(&sf, &g)?;
        worst_potential = worst_potential
            .max(invariant_potential(&a, &sf)?.max_abs_diff(&invariant_potential(&a2, &sf2)?)?);
        worst_strength =
            worst_strength.max(field_strength(&a)?.max_abs_diff(&field_strength(&a2)?)?);
    }
    report.check(Check::at_most(
        "covariance.invariant_potential",
        worst_potential,
        COVARIANCE_TOL,
    ));
    report.check(Check::at_most(
        "covariance.field_strength",
        worst_strength,
        COVARIANCE_TOL,
    ));
    Ok(())
}

/// Bell, product and `(sqrt(1/4), 0, 0, sqrt(3/4))` entropies against closed forms.
pub fn entropy_checks(report: &mut Report) -> Result<()> {
    let lat = Lattice::new(&[4, 4, 4])?;
    let k = Arc::new(coulomb_kernel(lat));
    let q1 = make_qftbit(0, c(1.0), c(0.0), ChargeSign::Positive, k.clone())?;
    let q2 = make_qftbit(21, c(1.0), c(0.0), ChargeSign::Positive, k)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = c(0.0);
    let bell = entangle(&q1, &q2, [[c(h), zero], [zero, c(h)]])?;
    let product = entangle(&q1, &q2, [[c(1.0), zero], [zero, zero]])?;
    let skew = entangle(&q1, &q2, [[c(0.5), zero], [zero, c(0.75f64.sqrt())]])?;
    let bell_s = entanglement_entropy(&bell, 0)?;
    report.value("entropy_bell", bell_s);
    report.check(Check::at_most(
        "entanglement.bell",
        (bell_s - 2f64.ln()).abs(),
        ENTROPY_TOL,
    ));
    report.check(Check::at_most(
        "entanglement.product",
        entanglement_entropy(&product, 0)?,
        ENTROPY_TOL,
    ));
    let expected = -0.25 * 0.25f64.ln() - 0.75 * 0.75f64.ln();
    let skew_err = (entanglement_entropy(&skew, 0)? - expected)
        .abs()
        .max((entanglement_entropy(&skew, 1)? - expected).abs());
    report.check(Check::at_most("entanglement.asymmetric", skew_err, ENTROPY_TOL));
    Ok(())
}

/// Overlap between a Coulomb dressing and the Coulomb dressing plus a closed loop,
/// tracked across `transforms` gauge transforms. Returns the reference phase and
/// the largest change.
pub fn overlap_stability(
    lat: Lattice,
    loop_steps: &[Step],
    cfg: &SuiteConfig,
    transforms: usize,
    x: usize,
) -> Result<(Complex64, f64)> {
    let coulomb = coulomb_kernel(lat);
    let ring = path_kernel(lat, loop_steps)?;
    let combined = load_kernel(coulomb.field().add(ring.field())?, KernelKind::Custom)?;
    let a = cfg.background(lat);
    let reference = overlap_phase(&coulomb, &combined, &a, x, cfg.coupling)?;
    let mut worst = 0.0f64;
    for i in 0..transforms {
        let g = cfg.gauge(i as u64, 0.0).build(lat)?;
        let a2 = apply_gauge_transform(&a, &g)?;
        let p = overlap_phase(&coulomb, &combined, &a2, x, cfg.coupling)?;
        worst = worst.max((p - reference).norm());
    }
    Ok((reference, worst))
}

fn overlap_checks(report: &mut Report, cfg: &SuiteConfig) -> Result<()> {
    let lat = Lattice::new(&[8, 8, 8])?;
    let steps = [Step::plus(0), Step::plus(1), Step::minus(0), Step::minus(1)];
    let (_, worst) = overlap_stability(lat, &steps, cfg, 20, 0)?;
    report.check(Check::at_most("overlap.gauge_stability", worst, INVARIANCE_TOL));
    Ok(())
}

/// Runs every check group and returns the combined report.
pub fn run_all(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new(
        "report",
        serde_json::to_value(cfg).expect("config serializes"),
    );
    constraint_checks(&mut report)?;
    invariance_checks(&mut report, cfg)?;
    global_phase_checks(&mut report, cfg)?;
    sbp_checks(&mut report, cfg)?;
    poisson_checks(&mut report, cfg)?;
    gauss_checks(&mut report, cfg)?;
    profile_checks(&mut report, cfg)?;
    covariance_checks(&mut report, cfg)?;
    entropy_checks(&mut report)?;
    overlap_checks(&mut report, cfg)?;
    Ok(report)
}
