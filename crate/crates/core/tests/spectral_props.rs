use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use ultraspec::complexes::{hodge_operator, triangulated_plane_cover};
use ultraspec::spectral_ops::{
    decompose, decompose_with_threshold, default_kernel_threshold, gamma_trace, projector, random_psd,
    resolvent_projector_norm, spectral_density, spectral_density_from, torus_laplacian, ultra_norm, OperatorInstance,
};
use ultraspec::Error;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_round_trips(dim in 2usize..=64, frac in 0.1f64..1.0, seed in any::<u64>()) {
        let rank = ((dim as f64 * frac) as usize).max(1);
        let m = random_psd(dim, rank, seed);
        let a = OperatorInstance::new(m.clone(), false, 1).unwrap();
        let d = decompose(&a).unwrap();
        let v = d.eigenvectors();
        let back = v * DMatrix::from_diagonal(&DVector::from_row_slice(d.eigenvalues())) * v.transpose();
        prop_assert!((back - &m).amax() <= 1e-9 * m.amax().max(1.0));
        prop_assert_eq!(d.kernel_dim(), dim - rank.min(dim));
        let top = projector(&d, d.lambda_max());
        prop_assert!((&top * &top - &top).amax() <= 1e-9);
    }

    #[test]
    fn pointwise_bound_by_g(seed in any::<u64>(), x in prop::collection::vec(-1.0f64..1.0, 24)) {
        // |f(x)|² ≤ G(λ_max)·E(f) for f off the kernel
        let a = OperatorInstance::new(random_psd(24, 16, seed), false, 1).unwrap();
        let d = decompose(&a).unwrap();
        let f = ultraspec::spectral_ops::project_off_kernel(&d, &DVector::from_vec(x)).unwrap();
        let e = ultraspec::spectral_ops::energy(&a, &f).unwrap();
        let g = spectral_density_from(&a, &d).unwrap().g_transform().eval(d.lambda_max());
        prop_assert!(f.amax().powi(2) <= g * e * (1.0 + 1e-9) + 1e-15);
    }
}

#[test]
fn fiber_instances_sandwich_ultra_norm() {
    let a = hodge_operator(&triangulated_plane_cover(3, 2).unwrap(), 1).unwrap();
    let d = decompose(&a).unwrap();
    let n = a.fiber() as f64;
    assert!(a.fiber() > 1);
    for (lambda, _) in d.clusters() {
        let p = projector(&d, lambda);
        let (u, t) = (ultra_norm(&p), gamma_trace(&p, a.group_size()));
        assert!(u <= t * (1.0 + 1e-9) && t <= n * u * (1.0 + 1e-9), "λ={lambda}: {u} {t}");
    }
}

#[test]
fn kernel_threshold_is_insensitive_to_tenfold_change() {
    let a = OperatorInstance::new(random_psd(40, 30, 9), false, 1).unwrap();
    let base = default_kernel_threshold(&a);
    let f1 = spectral_density_from(&a, &decompose_with_threshold(&a, base).unwrap()).unwrap();
    let f2 = spectral_density_from(&a, &decompose_with_threshold(&a, 10.0 * base).unwrap()).unwrap();
    assert_eq!(f1.locations(), f2.locations());
    assert_eq!(f1.weights(), f2.weights());
}

#[test]
fn torus_mass_is_rank_over_group() {
    let f = spectral_density(&OperatorInstance::new(torus_laplacian(2, 8), true, 1).unwrap()).unwrap();
    assert!((f.total_mass() - 63.0 / 64.0).abs() < 1e-12);
}

#[test]
fn resolvent_is_monotone_in_lambda() {
    let a = OperatorInstance::new(random_psd(32, 20, 3), false, 1).unwrap();
    let d = decompose(&a).unwrap();
    let mut last = 0.0;
    for (lambda, _) in d.clusters() {
        let r = resolvent_projector_norm(&d, lambda);
        assert!(r >= last);
        last = r;
    }
}

#[test]
fn invalid_operators_are_rejected() {
    let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    assert!(matches!(OperatorInstance::new(asym, false, 1), Err(Error::NotSymmetric { .. })));
    let neg = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
    let a = OperatorInstance::new(neg, false, 1).unwrap();
    assert!(matches!(decompose(&a), Err(Error::NotPositive { .. })));
    let rect = DMatrix::<f64>::zeros(2, 3);
    assert!(OperatorInstance::new(rect, false, 1).is_err());
}
