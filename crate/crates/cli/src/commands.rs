//! Subcommand implementations. Each returns a [`Report`]; `main` decides the exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::json;

use dressage::dressing::{coulomb_kernel, load_kernel, path_kernel, DressingKernel, KernelKind};
use dressage::io::{read_field, read_sidecar, save_sidecar, save_vector, sidecar_path};
use dressage::observables::{
    coulomb_compare, electric_field, gauss_residual, radial_profile, write_profile_csv,
};
use dressage::qstates::{entangle, entanglement_entropy, make_qftbit, ChargeSign};
use dressage::{Complex64, Lattice};

use crate::config::{default_anchors, AnchorSpec, ConfigError, KernelChoice, RunConfig};
use crate::report::{Check, Report};
use crate::suite::{self, SuiteConfig};

fn module<T>(r: dressage::Result<T>) -> Result<T, ConfigError> {
    r.map_err(ConfigError::Module)
}

pub fn build_kernel(lat: Lattice, choice: &KernelChoice) -> Result<DressingKernel, ConfigError> {
    match choice.kind {
        KernelKind::Coulomb => Ok(coulomb_kernel(lat)),
        KernelKind::Path => module(path_kernel(lat, &choice.steps()?)),
        KernelKind::Custom => Err(ConfigError::Invalid(
            "custom kernels are loaded from a file".into(),
        )),
    }
}

/// Reads a kernel field and validates it. The kind comes from the sidecar
/// when one exists, else from `kind`, else defaults to custom.
pub fn read_kernel(path: &Path, kind: Option<KernelKind>) -> Result<DressingKernel, ConfigError> {
    let data = module(read_field(path).and_then(|d| d.into_vector()))?;
    let side = sidecar_path(path);
    let declared = if side.exists() {
        Some(module(read_sidecar(&side))?.kind)
    } else {
        None
    };
    let kind = match (kind, declared) {
        (Some(k), Some(d)) if k != d => {
            return Err(ConfigError::Invalid(format!(
                "--kind {k} contradicts sidecar kind {d}"
            )))
        }
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => KernelKind::Custom,
    };
    module(load_kernel(data, kind))
}

pub struct MakeKernel {
    pub config: RunConfig,
    pub out: PathBuf,
}

pub fn make_kernel(cmd: &MakeKernel) -> Result<Report, ConfigError> {
    let lat = cmd.config.validate()?;
    let choice = cmd
        .config
        .kernel
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("--kind is required".into()))?;
    let kernel = build_kernel(lat, choice)?;
    module(save_vector(&cmd.out, kernel.field()))?;
    module(save_sidecar(&sidecar_path(&cmd.out), &kernel.sidecar()))?;
    let mut report = Report::new("make-kernel", serde_json::to_value(&cmd.config).unwrap());
    let tol = match kernel.kind() {
        KernelKind::Path => dressage::dressing::PATH_TOLERANCE,
        _ => dressage::dressing::COULOMB_TOLERANCE,
    };
    report.check(Check::at_most(
        "kernel.divergence_residual",
        kernel.divergence_residual(),
        cmd.config.tolerance.unwrap_or(tol),
    ));
    report.value("kind", kernel.kind());
    report.value("sink_offset", kernel.sink_offset());
    report.value("field_path", cmd.out.display().to_string());
    Ok(report)
}

pub fn check_kernel(path: &Path, kind: Option<KernelKind>) -> Result<Report, ConfigError> {
    let mut report = Report::new("check-kernel", json!({ "kernel": path.display().to_string() }));
    let kernel = read_kernel(path, kind)?;
    report.check(Check::at_most(
        "kernel.divergence_residual",
        kernel.divergence_residual(),
        match kernel.kind() {
            KernelKind::Path => dressage::dressing::PATH_TOLERANCE,
            _ => dressage::dressing::COULOMB_TOLERANCE,
        },
    ));
    report.value("kind", kernel.kind());
    report.value("lattice", kernel.lattice().dims());
    report.value("sink_offset", kernel.sink_offset());
    Ok(report)
}

pub struct GaugeTest {
    pub config: RunConfig,
    pub kernel_file: Option<PathBuf>,
    pub transforms: usize,
    pub charge: i32,
    pub offset: f64,
    pub neutral_pair: bool,
}

pub fn gauge_test(cmd: &GaugeTest) -> Result<Report, ConfigError> {
    if cmd.transforms == 0 {
        return Err(ConfigError::Invalid(
            "at least one gauge transform is required".into(),
        ));
    }
    let kernel = match &cmd.kernel_file {
        Some(path) => read_kernel(path, None)?,
        None => {
            let lat = cmd.config.validate()?;
            let choice = cmd.config.kernel.clone().unwrap_or(KernelChoice {
                kind: KernelKind::Coulomb,
                path: None,
            });
            build_kernel(lat, &choice)?
        }
    };
    let lat = *kernel.lattice();
    let mut config = cmd.config.clone();
    config.dims = lat.dims().to_vec();
    config.validate()?;
    let kernel = Arc::new(kernel);
    let kind = kernel.kind();
    let (state, charges) = if cmd.neutral_pair {
        (
            module(suite::neutral_pair_with(kernel))?,
            vec![(1, KernelKind::Path), (-1, KernelKind::Path)],
        )
    } else {
        let charge = module(ChargeSign::try_from(cmd.charge))?;
        (
            module(suite::single_charge(kernel, charge, 0))?,
            vec![(cmd.charge, kind)],
        )
    };
    let anchors_spec = config.anchors.clone().unwrap_or_else(|| default_anchors(&lat));
    let translations = anchors_spec.resolve(&lat)?;
    let cfg = SuiteConfig {
        seed: config.seed,
        coupling: config.coupling,
        smoothness: config.smoothness,
    };
    let stats = module(suite::gauge_contrast(
        &state,
        &charges,
        &cfg,
        cmd.transforms,
        cmd.offset,
        &translations,
    ))?;
    let tol = config.tolerance.unwrap_or(suite::INVARIANCE_TOL);
    let mut report = Report::new(
        "gauge-test",
        json!({
            "run": config,
            "transforms": cmd.transforms,
            "charge": cmd.charge,
            "constant_offset": cmd.offset,
            "neutral_pair": cmd.neutral_pair,
            "kernel_kind": kind,
            "anchors": anchors_spec,
        }),
    );
    report.check(Check::at_most(
        "dressed.max_local_deviation",
        stats.max_dressed_deviation,
        tol,
    ));
    // explicit anchor lists: spread reported only
    if matches!(anchors_spec, AnchorSpec::Sites(_)) {
        report.value("bare_min_phase_spread", stats.min_bare_spread);
    } else {
        report.check(Check::at_least(
            "bare.min_phase_spread",
            stats.min_bare_spread,
            suite::BARE_SPREAD_MIN,
        ));
    }
    report.check(Check::at_most(
        "global_phase.law_error",
        stats.max_global_law_error,
        tol,
    ));
    report.value("anchor_count", translations.len());
    report.value("stats", stats);
    Ok(report)
}

pub struct EField {
    pub config: RunConfig,
    pub kernel_file: Option<PathBuf>,
    pub anchor: Vec<i64>,
    pub bins: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn efield(cmd: &EField) -> Result<Report, ConfigError> {
    let kernel = match &cmd.kernel_file {
        Some(path) => read_kernel(path, None)?,
        None => {
            let lat = cmd.config.validate()?;
            let choice = cmd.config.kernel.clone().unwrap_or(KernelChoice {
                kind: KernelKind::Coulomb,
                path: None,
            });
            build_kernel(lat, &choice)?
        }
    };
    let lat = *kernel.lattice();
    let anchor = if cmd.anchor.is_empty() {
        vec![0; lat.ndim()]
    } else {
        cmd.anchor.clone()
    };
    if anchor.len() != lat.ndim() {
        return Err(ConfigError::Invalid(format!(
            "--anchor needs {} coordinates",
            lat.ndim()
        )));
    }
    let x = lat.index(&anchor);
    let e = cmd.config.coupling;
    let field = module(electric_field(&kernel, x, e))?;
    let residual = module(gauss_residual(
        &field,
        x,
        e,
        kernel.background_charge_density(),
    ))?;
    let bins = cmd
        .bins
        .unwrap_or_else(|| lat.dims().iter().min().copied().unwrap_or(2) / 2 + 1);
    let profile = module(radial_profile(&field, x, bins))?;
    let mut report = Report::new(
        "efield",
        json!({ "run": cmd.config, "anchor": anchor, "bins": bins, "kernel_kind": kernel.kind() }),
    );
    let gauss_tol = match kernel.kind() {
        KernelKind::Path => 1e-12,
        _ => suite::GAUSS_TOL,
    };
    report.check(Check::at_most(
        "gauss.residual",
        residual,
        cmd.config.tolerance.unwrap_or(gauss_tol),
    ));
    if lat.ndim() == 3 {
        let rows = module(coulomb_compare(&profile, e))?;
        if let Some(out) = &cmd.out {
            let mut buf = Vec::new();
            module(write_profile_csv(&mut buf, &rows))?;
            fs::write(out, buf).map_err(|err| ConfigError::Module(err.into()))?;
            report.value("csv", out.display().to_string());
        }
        report.value("shells", rows.len());
    } else if cmd.out.is_some() {
        return Err(ConfigError::Module(dressage::Error::Dimension(format!(
            "profile CSV compares against the 3D Coulomb field; lattice is {}D",
            lat.ndim()
        ))));
    }
    Ok(report)
}

pub struct Overlap {
    pub config: RunConfig,
    pub loop_path: String,
    pub transforms: usize,
}

pub fn overlap(cmd: &Overlap) -> Result<Report, ConfigError> {
    if cmd.transforms == 0 {
        return Err(ConfigError::Invalid(
            "at least one gauge transform is required".into(),
        ));
    }
    let lat = cmd.config.validate()?;
    let steps = module(dressage::dressing::parse_path(&cmd.loop_path))?;
    let cfg = SuiteConfig {
        seed: cmd.config.seed,
        coupling: cmd.config.coupling,
        smoothness: cmd.config.smoothness,
    };
    let (phase, worst) = module(suite::overlap_stability(lat, &steps, &cfg, cmd.transforms, 0))?;
    let mut report = Report::new(
        "overlap",
        json!({ "run": cmd.config, "loop": cmd.loop_path, "transforms": cmd.transforms }),
    );
    report.check(Check::at_most(
        "overlap.gauge_stability",
        worst,
        cmd.config.tolerance.unwrap_or(suite::INVARIANCE_TOL),
    ));
    report.value("phase_re", phase.re);
    report.value("phase_im", phase.im);
    Ok(report)
}

pub struct EntangleDemo {
    pub config: RunConfig,
    /// Real amplitudes `a00, a01, a10, a11`.
    pub amplitudes: [f64; 4],
    pub transforms: usize,
    pub offset: f64,
}

pub fn entangle_demo(cmd: &EntangleDemo) -> Result<Report, ConfigError> {
    let lat = cmd.config.validate()?;
    let kernel = Arc::new(coulomb_kernel(lat));
    let a = cmd.amplitudes.map(|v| Complex64::new(v, 0.0));
    let y = lat.index(&vec![1; lat.ndim()]);
    let q1 = module(make_qftbit(
        0,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        ChargeSign::Positive,
        kernel.clone(),
    ))?;
    let q2 = module(make_qftbit(
        y,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        ChargeSign::Positive,
        kernel,
    ))?;
    let state = module(entangle(&q1, &q2, [[a[0], a[1]], [a[2], a[3]]]))?;
    let s0 = module(entanglement_entropy(&state, 0))?;
    let s1 = module(entanglement_entropy(&state, 1))?;
    let mut report = Report::new(
        "entangle-demo",
        json!({ "run": cmd.config, "amplitudes": cmd.amplitudes, "transforms": cmd.transforms, "constant_offset": cmd.offset }),
    );
    report.value("entropy", s0);
    report.value("entropy_ln2_gap", (s0 - 2f64.ln()).abs());
    report.check(Check::at_most(
        "entropy.cut_symmetry",
        (s0 - s1).abs(),
        suite::ENTROPY_TOL,
    ));
    if cmd.transforms > 0 {
        let cfg = SuiteConfig {
            seed: cmd.config.seed,
            coupling: cmd.config.coupling,
            smoothness: cmd.config.smoothness,
        };
        let translations = AnchorSpec::Sample(64).resolve(&lat)?;
        let stats = module(suite::gauge_contrast(
            &state,
            &[(1, KernelKind::Coulomb), (1, KernelKind::Coulomb)],
            &cfg,
            cmd.transforms,
            cmd.offset,
            &translations,
        ))?;
        let tol = cmd.config.tolerance.unwrap_or(suite::INVARIANCE_TOL);
        report.check(Check::at_most(
            "pair.max_local_deviation",
            stats.max_dressed_deviation,
            tol,
        ));
        report.check(Check::at_most(
            "pair.charge_two_global_phase",
            stats.max_global_law_error,
            tol,
        ));
    }
    Ok(report)
}

pub fn full_report(cfg: &SuiteConfig) -> Result<Report, ConfigError> {
    module(suite::run_all(cfg))
}
