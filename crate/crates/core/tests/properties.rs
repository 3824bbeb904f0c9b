use dressage::calculus::{divergence_bwd, divergence_fwd, grad_fwd, laplacian, sum_by_parts_residual};
use dressage::dressing::{
    coulomb_kernel, dressing_exponents, dressing_exponents_spectral, path_kernel, phase_shift_under_gauge,
    predicted_phase_shift, Step,
};
use dressage::gauge::{apply_gauge_transform, field_strength, invariant_potential, transform_sigma, GaugeSpec, StueckelbergField};
use dressage::observables::electric_field;
use dressage::poisson::solve_poisson;
use dressage::random::{random_scalar, random_vector};
use dressage::{Lattice, ScalarField};
use proptest::prelude::*;

fn lattice() -> impl Strategy<Value = Lattice> {
    prop::collection::vec(2usize..=6, 1..=3).prop_map(|dims| Lattice::new(&dims).unwrap())
}

fn planar() -> impl Strategy<Value = Lattice> {
    prop::collection::vec(2usize..=5, 2..=4).prop_map(|dims| Lattice::new(&dims).unwrap())
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn forward_gradient_is_minus_adjoint_of_backward_divergence(lat in lattice(), seed in any::<u64>()) {
        let v = random_vector(lat, seed, 0.0);
        let s = random_scalar(lat, seed ^ 1, 0.0);
        let lhs = inner(v.values(), grad_fwd(&s).values());
        let rhs = inner(divergence_bwd(&v).values(), s.values());
        prop_assert!((lhs + rhs).abs() <= 1e-12 * (1.0 + v.norm() * s.norm()));
        prop_assert!(sum_by_parts_residual(&v, &s).unwrap() <= 1e-12 * (1.0 + v.norm() * s.norm()));
    }

    #[test]
    fn poisson_inverts_laplacian_on_mean_free_sources(lat in lattice(), seed in any::<u64>()) {
        let src = random_scalar(lat, seed, 0.0);
        let phi = solve_poisson(&src).unwrap();
        prop_assert!(phi.mean().abs() <= 1e-12);
        prop_assert!(laplacian(&phi).max_abs_diff(&src).unwrap() <= 1e-10);
    }

    #[test]
    fn coulomb_divergence_is_neutralized_delta(lat in lattice()) {
        let k = coulomb_kernel(lat);
        let v = lat.volume() as f64;
        let div = divergence_fwd(k.field());
        let worst = div
            .values()
            .iter()
            .enumerate()
            .map(|(z, d)| (d - (f64::from(u8::from(z == 0)) - 1.0 / v)).abs())
            .fold(0.0, f64::max);
        prop_assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn coulomb_kernel_parity(lat in lattice()) {
        // f_mu(-r) = -f_mu(r + mu)
        let k = coulomb_kernel(lat);
        for mu in 0..lat.ndim() {
            let f = k.field().component(mu);
            for r in 0..lat.volume() {
                let lhs = f[lat.negate(r)];
                let rhs = -f[lat.forward(r, mu)];
                prop_assert!((lhs - rhs).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn gauge_shift_law(lat in lattice(), seed in any::<u64>(), offset in -3.0f64..3.0, e in 0.25f64..3.0) {
        let a = random_vector(lat, seed, 0.3);
        let g = GaugeSpec { seed: seed.wrapping_add(7), smoothness: 0.3, constant_offset: offset, coupling: e }
            .build(lat)
            .unwrap();
        let k = coulomb_kernel(lat);
        let alpha_mean = g.alpha().mean();
        for x in [0, lat.volume() / 2, lat.volume() - 1] {
            let measured = phase_shift_under_gauge(&k, &a, &g, x).unwrap();
            let expected = g.alpha().get(x) - alpha_mean;
            prop_assert!((measured - expected).abs() <= 1e-10, "{measured} vs {expected}");
            let predicted = predicted_phase_shift(&k, g.alpha(), x).unwrap();
            prop_assert!((predicted - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn path_kernel_shift_is_endpoint_difference(seed in any::<u64>(), steps in prop::collection::vec((0usize..3, any::<bool>()), 1..8)) {
        let lat = Lattice::new(&[5, 4, 6]).unwrap();
        let steps: Vec<Step> = steps
            .into_iter()
            .map(|(mu, up)| if up { Step::plus(mu) } else { Step::minus(mu) })
            .collect();
        let k = path_kernel(lat, &steps).unwrap();
        let a = random_vector(lat, seed, 0.2);
        let g = GaugeSpec::new(seed ^ 3).build(lat).unwrap();
        let x = 17;
        let sink = lat.sub(x, k.sink_site().unwrap());
        let measured = phase_shift_under_gauge(&k, &a, &g, x).unwrap();
        let expected = g.alpha().get(x) - g.alpha().get(sink);
        prop_assert!((measured - expected).abs() <= 1e-10);
    }

    #[test]
    fn covariant_combinations_are_gauge_invariant(lat in planar(), seed in any::<u64>()) {
        let a = random_vector(lat, seed, 0.0);
        let sf = StueckelbergField::new(random_scalar(lat, seed ^ 5, 0.0), 1.3).unwrap();
        let g = GaugeSpec { seed: seed ^ 9, smoothness: 0.0, constant_offset: 0.7, coupling: 1.3 }
            .build(lat)
            .unwrap();
        let a2 = apply_gauge_transform(&a, &g).unwrap();
        let sf2 = transform_sigma(&sf, &g).unwrap();
        let b = invariant_potential(&a, &sf).unwrap();
        let b2 = invariant_potential(&a2, &sf2).unwrap();
        prop_assert!(b.max_abs_diff(&b2).unwrap() <= 1e-12);
        let f = field_strength(&a).unwrap();
        let f2 = field_strength(&a2).unwrap();
        prop_assert!(f.max_abs_diff(&f2).unwrap() <= 1e-12);
    }

    #[test]
    fn electric_field_translates_with_the_charge(lat in lattice(), x in any::<prop::sample::Index>(), t in any::<prop::sample::Index>()) {
        let k = coulomb_kernel(lat);
        let x = x.index(lat.volume());
        let t = t.index(lat.volume());
        let e1 = electric_field(&k, x, 1.0).unwrap();
        let e2 = electric_field(&k, lat.add(x, t), 1.0).unwrap();
        for mu in 0..lat.ndim() {
            let moved = e1.component_field(mu).shifted(lat.negate(t));
            prop_assert_eq!(moved, e2.component_field(mu));
        }
    }
}

#[test]
fn direct_and_spectral_exponents_agree() {
    let lat = Lattice::new(&[6, 5, 4]).unwrap();
    let k = coulomb_kernel(lat);
    let a = random_vector(lat, 11, 0.4);
    let anchors: Vec<usize> = (0..lat.volume()).collect();
    let direct = dressing_exponents(&k, &a, &anchors, 0.8).unwrap();
    let spectral = dressing_exponents_spectral(&k, &a, 0.8).unwrap();
    for (d, s) in direct.iter().zip(&spectral) {
        approx::assert_abs_diff_eq!(*d, *s, epsilon = 1e-12);
    }
}

#[test]
fn constant_gauge_function_leaves_potential_alone() {
    let lat = Lattice::new(&[4, 4]).unwrap();
    let a = random_vector(lat, 2, 0.0);
    let g = dressage::gauge::GaugeTransform::new(ScalarField::constant(lat, 1.7), 1.0).unwrap();
    assert_eq!(apply_gauge_transform(&a, &g).unwrap(), a);
}
