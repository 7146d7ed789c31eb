use nalgebra::DVector;
use ultraspec::certify::{
    check_faber_krahn, check_nash, check_uncertainty, run_suite, uncertainty_constant, CertInstance, SuiteOptions,
    TestState,
};
use ultraspec::report::Status;
use ultraspec::spectral_ops::{cycle_laplacian, decompose, random_psd, torus_laplacian, OperatorInstance};

fn instance(name: &str, m: nalgebra::DMatrix<f64>, invariant: bool) -> CertInstance {
    CertInstance::new(name, OperatorInstance::new(m, invariant, 1).unwrap()).unwrap()
}

#[test]
fn state_checks_are_scale_invariant() {
    let opts = SuiteOptions::new(20, 99);
    let ratios = |c: f64| -> Vec<(String, f64)> {
        let insts =
            [instance("cycle", cycle_laplacian(32) * c, true), instance("psd", random_psd(30, 20, 4) * c, false)];
        run_suite(&insts, &opts)
            .unwrap()
            .records
            .into_iter()
            .filter(|r| r.state != "-" && r.status != Status::Vacuous)
            .map(|r| (format!("{}/{}/{}", r.instance, r.state, r.check), r.lhs.to_f64() / r.rhs.to_f64()))
            .collect()
    };
    let base = ratios(1.0);
    assert!(!base.is_empty());
    for c in [1e-3, 1e3] {
        let scaled = ratios(c);
        assert_eq!(base.len(), scaled.len());
        for ((k1, r1), (k2, r2)) in base.iter().zip(&scaled) {
            assert_eq!(k1, k2);
            assert!((r1 - r2).abs() <= 1e-8 * r1.abs().max(1.0), "{k1} at c={c}: {r1} vs {r2}");
        }
    }
}

#[test]
fn nash_lhs_decreases_when_density_is_inflated() {
    let op = OperatorInstance::new(torus_laplacian(2, 6), true, 1).unwrap();
    let d = decompose(&op).unwrap();
    let base = CertInstance::from_parts("base", op.clone(), d.clone()).unwrap();
    let inflated =
        CertInstance::with_density("inflated", op.clone(), d.clone(), base.density().scaled(3.0).unwrap()).unwrap();
    for seed in 0..20u64 {
        let f = DVector::from_fn(36, |i, _| ((i as u64 * 7919 + seed * 104_729) % 97) as f64 - 48.0);
        let s = TestState::new("s", &op, &d, &f).unwrap();
        let [a0, _] = check_nash(&s, base.density(), &base.minorant).unwrap();
        let [a1, _] = check_nash(&s, inflated.density(), &inflated.minorant).unwrap();
        assert!(a1.lhs.to_f64() <= a0.lhs.to_f64() * (1.0 + 1e-12));
        assert!(a0.passed() && a1.passed());
    }
}

/// Two opposite-sign Dirichlet ground states on 3×3 boxes of the 16×16 torus.
fn dipole_box() -> DVector<f64> {
    let n = 16;
    let mut f = DVector::zeros(n * n);
    for (corner, sign) in [((2, 2), 1.0), ((10, 10), -1.0)] {
        for i in 1..=3 {
            for j in 1..=3 {
                let v = (std::f64::consts::PI * i as f64 / 4.0).sin() * (std::f64::consts::PI * j as f64 / 4.0).sin();
                let (x, y) = (corner.0 + i - 1, corner.1 + j - 1);
                f[x + n * y] = sign * v;
            }
        }
    }
    f
}

#[test]
fn localized_state_on_torus() {
    let inst = instance("torus", torus_laplacian(2, 16), true);
    let s = TestState::new("dipole", &inst.op, &inst.decomposition, &dipole_box()).unwrap();
    assert_eq!(s.support().len(), 18);
    assert_eq!(s.domain().len(), 42);
    let fk = check_faber_krahn(&s, &inst.minorant);
    assert_eq!(fk.status, Status::Pass, "{fk:?}");
    let c = uncertainty_constant(inst.density(), &inst.minorant).unwrap();
    let u = check_uncertainty(&s, inst.density(), c);
    assert_eq!(u.status, Status::Pass, "{u:?}");
    // Rayleigh quotient of the Dirichlet box ground state: 2·2(1 − cos(π/4))
    let want = 4.0 * (1.0 - std::f64::consts::FRAC_1_SQRT_2);
    assert!((s.rayleigh() - want).abs() < 1e-12);
}

#[test]
fn suite_is_deterministic_across_thread_counts() {
    let insts = [instance("cycle", cycle_laplacian(24), true), instance("psd", random_psd(20, 12, 8), false)];
    let opts = SuiteOptions::new(30, 5);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_suite(&insts, &opts).unwrap().to_csv())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_ne!(one, run_suite(&insts, &SuiteOptions::new(30, 6)).unwrap().to_csv());
}

#[test]
fn zero_states_yield_empty_report() {
    let report = run_suite(&[instance("c4", cycle_laplacian(4), true)], &SuiteOptions::new(0, 1)).unwrap();
    assert!(report.records.is_empty());
    assert!(!report.failed());
    assert_eq!(report.to_csv().lines().count(), 1);
}
