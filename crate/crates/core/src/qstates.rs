//! Dressed two-level states ("QFTbits") on a classical background.
//!
//! A state is a set of computational-basis amplitudes multiplied by the
//! dressing phase functional of each charge. Under a gauge transform the
//! matter part of a charge `q` at `x` picks up `exp(-i q alpha(x))` and its
//! dressing picks up `exp(-i q (Phi'(x) - Phi(x)))`; the product is the
//! multiplier `lambda(x)`. The multiplier is the same for both basis labels,
//! so gauge action only ever rephases the whole state.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::divergence_fwd;
use crate::dressing::{dressing_exponent, dressing_exponents, DressingKernel, COULOMB_TOLERANCE};
use crate::error::{Error, Result};
use crate::field::{ensure_same, ScalarField, VectorField};
use crate::gauge::{apply_gauge_transform, GaugeTransform};
use crate::lattice::Lattice;

pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

fn check_norm(amplitudes: &[Complex64]) -> Result<()> {
    let excess = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>() - 1.0;
    if excess.abs() > NORMALIZATION_TOLERANCE {
        Err(Error::Normalization { excess })
    } else {
        Ok(())
    }
}

/// Sign of a charge in units of `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChargeSign {
    Positive,
    Negative,
}

impl ChargeSign {
    pub fn value(self) -> i32 {
        match self {
            ChargeSign::Positive => 1,
            ChargeSign::Negative => -1,
        }
    }
}

impl TryFrom<i32> for ChargeSign {
    type Error = Error;

    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(ChargeSign::Positive),
            -1 => Ok(ChargeSign::Negative),
            other => Err(Error::Charge(other)),
        }
    }
}

/// `a |0_f(x)> + b |1_f(x)>`.
#[derive(Debug, Clone)]
pub struct QftBit {
    site: usize,
    a: Complex64,
    b: Complex64,
    charge: ChargeSign,
    kernel: Arc<DressingKernel>,
}

pub fn make_qftbit(
    site: usize,
    a: Complex64,
    b: Complex64,
    charge: ChargeSign,
    kernel: Arc<DressingKernel>,
) -> Result<QftBit> {
    kernel.lattice().check_site(site)?;
    check_norm(&[a, b])?;
    Ok(QftBit {
        site,
        a,
        b,
        charge,
        kernel,
    })
}

impl QftBit {
    pub fn site(&self) -> usize {
        self.site
    }

    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (self.a, self.b)
    }

    pub fn charge(&self) -> ChargeSign {
        self.charge
    }

    pub fn kernel(&self) -> &Arc<DressingKernel> {
        &self.kernel
    }

    fn slot(&self) -> Slot {
        Slot {
            site: self.site,
            charge: self.charge,
            kernel: Arc::clone(&self.kernel),
        }
    }
}

/// Outcome of applying a gauge transform to a dressed state at several anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeActionReport {
    /// Anchor sites (single qubit) or translations (multi-qubit) that were sampled.
    pub anchors: Vec<usize>,
    /// Total multiplier `lambda` at each anchor.
    pub multipliers: Vec<Complex64>,
    /// `lambda` at the first anchor.
    pub global_phase: Complex64,
    /// `max |lambda(x) - global_phase|`.
    pub max_local_deviation: f64,
    /// Largest wrapped angle between undressed matter multipliers across anchors.
    pub bare_phase_spread: f64,
}

/// Angle wrapped into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let w = theta.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

#[derive(Debug, Clone)]
struct Slot {
    site: usize,
    charge: ChargeSign,
    kernel: Arc<DressingKernel>,
}

/// Total angle `theta` with `lambda = exp(-i theta)` for each anchor, plus the bare angle.
fn slot_angles(
    slot: &Slot,
    a: &VectorField,
    transformed: &VectorField,
    g: &GaugeTransform,
    anchors: &[usize],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let e = g.coupling();
    let q = slot.charge.value() as f64;
    let before = dressing_exponents(&slot.kernel, a, anchors, e)?;
    let after = dressing_exponents(&slot.kernel, transformed, anchors, e)?;
    let bare: Vec<f64> = anchors.iter().map(|&x| q * g.alpha().get(x)).collect();
    let total = bare
        .iter()
        .zip(before.iter().zip(&after))
        .map(|(m, (b, a))| m + q * (a - b))
        .collect();
    Ok((total, bare))
}

fn summarize(anchors: Vec<usize>, total: &[f64], bare: &[f64]) -> GaugeActionReport {
    let multipliers: Vec<Complex64> = total
        .iter()
        .map(|&t| Complex64::from_polar(1.0, -t))
        .collect();
    let global_phase = multipliers[0];
    let max_local_deviation = multipliers
        .iter()
        .map(|m| (m - global_phase).norm())
        .fold(0.0, f64::max);
    let bare_phase_spread = bare
        .iter()
        .map(|b| wrap_angle(b - bare[0]).abs())
        .fold(0.0, f64::max);
    GaugeActionReport {
        anchors,
        multipliers,
        global_phase,
        max_local_deviation,
        bare_phase_spread,
    }
}

/// Gauge action on a single dressed charge placed at each of `anchors`
/// (the qubit's own site when `anchors` is empty).
pub fn gauge_action(
    q: &QftBit,
    a: &VectorField,
    g: &GaugeTransform,
    anchors: &[usize],
) -> Result<GaugeActionReport> {
    let lat = *q.kernel.lattice();
    ensure_same(&lat, a.lattice())?;
    ensure_same(&lat, g.lattice())?;
    let anchors = if anchors.is_empty() {
        vec![q.site]
    } else {
        anchors.to_vec()
    };
    for &x in &anchors {
        lat.check_site(x)?;
    }
    let transformed = apply_gauge_transform(a, g)?;
    let (total, bare) = slot_angles(&q.slot(), a, &transformed, g, &anchors)?;
    Ok(summarize(anchors, &total, &bare))
}

/// Expected global phase `exp(-i q mean(alpha))` of a total charge `q`
/// dressed with neutralising-background kernels.
pub fn predicted_global_phase(total_charge: i32, alpha: &ScalarField) -> Complex64 {
    Complex64::from_polar(1.0, -(total_charge as f64) * alpha.mean())
}

/// Relative phase `exp(i (Phi_1 - Phi_2))` between two dressings of the same charge.
pub fn overlap_phase(
    k1: &DressingKernel,
    k2: &DressingKernel,
    a: &VectorField,
    x: usize,
    e: f64,
) -> Result<Complex64> {
    ensure_same(k1.lattice(), k2.lattice())?;
    let max_diff = divergence_fwd(k1.field()).max_abs_diff(&divergence_fwd(k2.field()))?;
    if max_diff > COULOMB_TOLERANCE {
        return Err(Error::DivergenceMismatch { max_diff });
    }
    let phi1 = dressing_exponent(k1, a, x, e)?;
    let phi2 = dressing_exponent(k2, a, x, e)?;
    Ok(Complex64::from_polar(1.0, phi1 - phi2))
}

/// Dressed multi-qubit state; basis index bit `n - 1 - i` is qubit `i`.
#[derive(Debug, Clone)]
pub struct MultiQubitState {
    slots: Vec<Slot>,
    amplitudes: Vec<Complex64>,
}

/// Two dressed charges with a joint amplitude tensor `amplitudes[i][j]` for `|i j>`.
pub fn entangle(q1: &QftBit, q2: &QftBit, amplitudes: [[Complex64; 2]; 2]) -> Result<MultiQubitState> {
    ensure_same(q1.kernel.lattice(), q2.kernel.lattice())?;
    if q1.site == q2.site {
        return Err(Error::SiteCollision(q1.site));
    }
    let flat: Vec<Complex64> = amplitudes.iter().flatten().copied().collect();
    check_norm(&flat)?;
    Ok(MultiQubitState {
        slots: vec![q1.slot(), q2.slot()],
        amplitudes: flat,
    })
}

impl MultiQubitState {
    pub fn from_qftbit(q: &QftBit) -> Self {
        Self {
            slots: vec![q.slot()],
            amplitudes: vec![q.a, q.b],
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn sites(&self) -> Vec<usize> {
        self.slots.iter().map(|s| s.site).collect()
    }

    pub fn total_charge(&self) -> i32 {
        self.slots.iter().map(|s| s.charge.value()).sum()
    }

    pub fn lattice(&self) -> &Lattice {
        self.slots[0].kernel.lattice()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Amplitudes after the state is rephased by `multiplier`.
    pub fn rephased(&self, multiplier: Complex64) -> Self {
        Self {
            slots: self.slots.clone(),
            amplitudes: self.amplitudes.iter().map(|c| c * multiplier).collect(),
        }
    }

    /// Gauge action on the whole state, with every site translated by each of
    /// `translations` (just the state as placed when empty). The multiplier is
    /// the product of the constituents' multipliers.
    pub fn gauge_action(
        &self,
        a: &VectorField,
        g: &GaugeTransform,
        translations: &[usize],
    ) -> Result<GaugeActionReport> {
        let lat = *self.lattice();
        ensure_same(&lat, a.lattice())?;
        ensure_same(&lat, g.lattice())?;
        let translations = if translations.is_empty() {
            vec![0]
        } else {
            translations.to_vec()
        };
        for &t in &translations {
            lat.check_site(t)?;
        }
        let transformed = apply_gauge_transform(a, g)?;
        let mut total = vec![0.0; translations.len()];
        let mut bare = vec![0.0; translations.len()];
        for slot in &self.slots {
            let anchors: Vec<usize> = translations.iter().map(|&t| lat.add(slot.site, t)).collect();
            let (t, b) = slot_angles(slot, a, &transformed, g, &anchors)?;
            total.iter_mut().zip(t).for_each(|(acc, v)| *acc += v);
            bare.iter_mut().zip(b).for_each(|(acc, v)| *acc += v);
        }
        Ok(summarize(translations, &total, &bare))
    }

    /// Serializable form; `kernel_ids` names each qubit's kernel.
    pub fn to_record(&self, kernel_ids: &[String]) -> Result<StateRecord> {
        if kernel_ids.len() != self.slots.len() {
            return Err(Error::Arity {
                expected: self.slots.len(),
                got: kernel_ids.len(),
            });
        }
        let lat = self.lattice();
        Ok(StateRecord {
            sites: self.slots.iter().map(|s| lat.coords(s.site)).collect(),
            charges: self.slots.iter().map(|s| s.charge.value()).collect(),
            kernel_ids: kernel_ids.to_vec(),
            amplitudes_re: self.amplitudes.iter().map(|c| c.re).collect(),
            amplitudes_im: self.amplitudes.iter().map(|c| c.im).collect(),
        })
    }

    pub fn from_record(
        record: &StateRecord,
        mut kernel_for: impl FnMut(&str) -> Option<Arc<DressingKernel>>,
    ) -> Result<Self> {
        let n = record.sites.len();
        if n == 0 || record.charges.len() != n || record.kernel_ids.len() != n {
            return Err(Error::Format(
                "sites, charges and kernel_ids must be nonempty and of equal length".into(),
            ));
        }
        let dim = 1usize << n;
        if record.amplitudes_re.len() != dim || record.amplitudes_im.len() != dim {
            return Err(Error::Format(format!("expected {dim} amplitudes")));
        }
        let mut slots = Vec::with_capacity(n);
        for i in 0..n {
            let id = &record.kernel_ids[i];
            let kernel =
                kernel_for(id).ok_or_else(|| Error::Format(format!("unknown kernel id {id:?}")))?;
            let lat = *kernel.lattice();
            if record.sites[i].len() != lat.ndim() {
                return Err(Error::Dimension(format!("site {:?}", record.sites[i])));
            }
            let coords: Vec<i64> = record.sites[i].iter().map(|&c| c as i64).collect();
            if record.sites[i].iter().zip(lat.dims()).any(|(c, n)| c >= n) {
                return Err(Error::Format(format!("site {:?} outside {lat}", record.sites[i])));
            }
            slots.push(Slot {
                site: lat.index(&coords),
                charge: ChargeSign::try_from(record.charges[i])?,
                kernel,
            });
        }
        for i in 1..n {
            ensure_same(slots[0].kernel.lattice(), slots[i].kernel.lattice())?;
            if slots[..i].iter().any(|s| s.site == slots[i].site) {
                return Err(Error::SiteCollision(slots[i].site));
            }
        }
        let amplitudes: Vec<Complex64> = record
            .amplitudes_re
            .iter()
            .zip(&record.amplitudes_im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        check_norm(&amplitudes)?;
        Ok(Self { slots, amplitudes })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub sites: Vec<Vec<usize>>,
    pub charges: Vec<i32>,
    pub kernel_ids: Vec<String>,
    pub amplitudes_re: Vec<f64>,
    pub amplitudes_im: Vec<f64>,
}

/// Eigenvalues of the Hermitian matrix `[[p, c], [conj(c), s]]`.
fn hermitian_eigenvalues(p: f64, s: f64, c: Complex64) -> [f64; 2] {
    let mean = 0.5 * (p + s);
    let half_gap = (0.25 * (p - s) * (p - s) + c.norm_sqr()).sqrt();
    [mean + half_gap, mean - half_gap]
}

/// Von Neumann entropy (natural log) of the qubit `cut` in a pure two-qubit state.
pub fn entanglement_entropy(state: &MultiQubitState, cut: usize) -> Result<f64> {
    if state.len() != 2 {
        return Err(Error::Arity {
            expected: 2,
            got: state.len(),
        });
    }
    if cut > 1 {
        return Err(Error::Cut(cut));
    }
    let m = |i: usize, j: usize| state.amplitudes[2 * i + j];
    // Reduced density matrix of the kept qubit.
    let entry = |k: usize, l: usize| -> Complex64 {
        (0..2)
            .map(|o| {
                if cut == 0 {
                    m(k, o) * m(l, o).conj()
                } else {
                    m(o, k) * m(o, l).conj()
                }
            })
            .sum()
    };
    let eig = hermitian_eigenvalues(entry(0, 0).re, entry(1, 1).re, entry(0, 1));
    Ok(eig
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum::<f64>()
        .max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dressing::{coulomb_kernel, path_kernel, Step};
    use crate::gauge::GaugeSpec;
    use crate::random::random_vector;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn small() -> (Lattice, Arc<DressingKernel>) {
        let lat = Lattice::new(&[4, 4, 4]).unwrap();
        (lat, Arc::new(coulomb_kernel(lat)))
    }

    #[test]
    fn construction() {
        let (_, k) = small();
        let q = make_qftbit(3, c(1.0), c(0.0), ChargeSign::Positive, k.clone()).unwrap();
        assert_eq!(q.amplitudes(), (c(1.0), c(0.0)));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(make_qftbit(3, c(h), c(h), ChargeSign::Positive, k.clone()).is_ok());
        match make_qftbit(3, c(0.8), c(0.7), ChargeSign::Positive, k.clone()) {
            Err(Error::Normalization { excess }) => assert!((excess - 0.13).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(make_qftbit(64, c(1.0), c(0.0), ChargeSign::Positive, k).is_err());
        assert_eq!(ChargeSign::try_from(2).unwrap_err(), Error::Charge(2));
    }

    #[test]
    fn identity_transform_gives_unit_multiplier() {
        let (lat, k) = small();
        let q = make_qftbit(0, c(1.0), c(0.0), ChargeSign::Positive, k).unwrap();
        let a = random_vector(lat, 1, 0.0);
        let g = GaugeTransform::identity(lat, 1.0).unwrap();
        let anchors: Vec<usize> = (0..lat.volume()).collect();
        let r = gauge_action(&q, &a, &g, &anchors).unwrap();
        assert!(r.multipliers.iter().all(|m| (m - c(1.0)).norm() < 1e-14));
        assert_eq!(r.bare_phase_spread, 0.0);
    }

    #[test]
    fn wrap() {
        use std::f64::consts::PI;
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(-0.1) + 0.1).abs() < 1e-15);
        assert_eq!(wrap_angle(PI), PI);
    }

    #[test]
    fn entangle_errors() {
        let (_, k) = small();
        let q = make_qftbit(1, c(1.0), c(0.0), ChargeSign::Positive, k.clone()).unwrap();
        let zero = c(0.0);
        assert_eq!(
            entangle(&q, &q, [[c(1.0), zero], [zero, zero]]).unwrap_err(),
            Error::SiteCollision(1)
        );
        let q2 = make_qftbit(2, c(1.0), c(0.0), ChargeSign::Positive, k).unwrap();
        assert!(matches!(
            entangle(&q, &q2, [[c(1.0), c(1.0)], [zero, zero]]),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn entropy_cases() {
        let (_, k) = small();
        let q1 = make_qftbit(1, c(1.0), c(0.0), ChargeSign::Positive, k.clone()).unwrap();
        let q2 = make_qftbit(2, c(1.0), c(0.0), ChargeSign::Positive, k).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero = c(0.0);
        let bell = entangle(&q1, &q2, [[c(h), zero], [zero, c(h)]]).unwrap();
        for cut in 0..2 {
            assert!((entanglement_entropy(&bell, cut).unwrap() - 2f64.ln()).abs() < 1e-10);
        }
        let product = entangle(&q1, &q2, [[c(1.0), zero], [zero, zero]]).unwrap();
        assert!(entanglement_entropy(&product, 0).unwrap() <= 1e-10);
        assert_eq!(entanglement_entropy(&bell, 2).unwrap_err(), Error::Cut(2));
        let single = MultiQubitState::from_qftbit(&q1);
        assert_eq!(
            entanglement_entropy(&single, 0).unwrap_err(),
            Error::Arity {
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn record_round_trip() {
        let (lat, k) = small();
        let p = Arc::new(path_kernel(lat, &[Step::plus(0)]).unwrap());
        let q1 = make_qftbit(5, c(1.0), c(0.0), ChargeSign::Positive, k.clone()).unwrap();
        let q2 = make_qftbit(9, c(0.0), Complex64::new(0.0, 1.0), ChargeSign::Negative, p.clone())
            .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = entangle(&q1, &q2, [[c(h), c(0.0)], [c(0.0), Complex64::new(0.0, -h)]]).unwrap();
        let ids = vec!["coulomb".to_string(), "string".to_string()];
        let record = s.to_record(&ids).unwrap();
        let text = serde_json::to_string(&record).unwrap();
        assert!(text.contains("\"amplitudes_im\""));
        let parsed: StateRecord = serde_json::from_str(&text).unwrap();
        let back = MultiQubitState::from_record(&parsed, |id| match id {
            "coulomb" => Some(k.clone()),
            "string" => Some(p.clone()),
            _ => None,
        })
        .unwrap();
        assert_eq!(back.sites(), s.sites());
        assert_eq!(back.amplitudes(), s.amplitudes());
        assert_eq!(back.total_charge(), 0);
        assert!(MultiQubitState::from_record(&parsed, |_| None).is_err());
    }

    #[test]
    fn rephasing_preserves_norm() {
        let (lat, k) = small();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let q = make_qftbit(0, c(h), Complex64::new(0.0, h), ChargeSign::Negative, k).unwrap();
        let s = MultiQubitState::from_qftbit(&q);
        let a = random_vector(lat, 2, 0.0);
        let g = GaugeSpec::new(3).build(lat).unwrap();
        let r = s.gauge_action(&a, &g, &[]).unwrap();
        let after = s.rephased(r.global_phase);
        assert!((after.norm_sqr() - 1.0).abs() < 1e-14);
    }
}
