use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use qnd_core::grid_wavefunction::{
    build_gaussian, density, l2_distance, overlap, photon_number_consistent, photon_number_paper,
    GaussianSpec, Grid, GridPolicy, WaveFunction,
};
use qnd_core::measurement_chain::{conditional_output, homodyne_distribution};

fn grid() -> Grid {
    Grid::centered(0.0, 8.0, 512).unwrap()
}

fn phased_gaussian(mean: f64, var: f64, k: f64) -> WaveFunction {
    let spec = GaussianSpec::new(mean, var).unwrap();
    WaveFunction::from_fn(grid(), |x| Complex64::from_polar(spec.amplitude(x), k * x)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn construction_normalizes(mean in -1.0f64..1.0, var in 0.05f64..0.5, k in -3.0f64..3.0) {
        let psi = phased_gaussian(mean, var, k);
        prop_assert!((psi.norm_squared() - 1.0).abs() < 1e-12);
        prop_assert!((density(&psi).mass() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn overlap_is_conjugate_symmetric(
        m1 in -1.0f64..1.0, v1 in 0.05f64..0.5, k1 in -3.0f64..3.0,
        m2 in -1.0f64..1.0, v2 in 0.05f64..0.5, k2 in -3.0f64..3.0,
    ) {
        let a = phased_gaussian(m1, v1, k1);
        let b = phased_gaussian(m2, v2, k2);
        let ab = overlap(&a, &b).unwrap();
        let ba = overlap(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-14);
        prop_assert!(ab.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn photon_number_is_symmetric_under_inversion(s in 1e-3f64..1e3) {
        let a = photon_number_paper(s).unwrap();
        let b = photon_number_paper(1.0 / s).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        // the vacuum sits at 1/4, so the mirror image is 1/(16 s)
        let c = photon_number_consistent(s).unwrap();
        let d = photon_number_consistent(1.0 / (16.0 * s)).unwrap();
        prop_assert!((c - d).abs() <= 1e-12 * c.max(1.0));
        prop_assert!(a >= 0.0 && c >= 0.0);
    }

    #[test]
    fn doubling_the_lattice_leaves_overlaps_unchanged(
        m1 in -0.5f64..0.5, v1 in 1e-3f64..1.0, m2 in -0.5f64..0.5, v2 in 1e-3f64..1.0,
    ) {
        let half = 0.5 + 10.0 * v1.max(v2).sqrt();
        let at = |n: usize| {
            let g = Grid::centered(0.0, half, n).unwrap();
            let a = build_gaussian(GaussianSpec::new(m1, v1).unwrap(), g).unwrap();
            let b = build_gaussian(GaussianSpec::new(m2, v2).unwrap(), g).unwrap();
            overlap(&a, &b).unwrap()
        };
        prop_assert!((at(1024) - at(2048)).norm() < 1e-6);
    }

    #[test]
    fn conditional_output_ignores_global_phase(
        theta in 0.0f64..6.0, phi in 0.2f64..1.3, x0 in -0.4f64..0.4, pv in 0.05f64..1.0,
    ) {
        let policy = GridPolicy::new(512, 10.0).unwrap();
        let signal = policy.gaussian(GaussianSpec::vacuum()).unwrap();
        let rotated = signal.scaled_by(Complex64::from_polar(1.0, theta)).unwrap();
        let probe = policy.gaussian(GaussianSpec::new(0.0, pv).unwrap()).unwrap();
        let a = density(&conditional_output(&signal, &probe, phi, x0).unwrap());
        let b = density(&conditional_output(&rotated, &probe, phi, x0).unwrap());
        prop_assert!(a.l1_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn homodyne_density_is_translation_covariant(
        shift in -1.0f64..1.0, phi in 0.3f64..1.2, pv in 0.05f64..1.0,
    ) {
        let policy = GridPolicy::new(1024, 10.0).unwrap();
        let probe = policy.gaussian(GaussianSpec::new(0.0, pv).unwrap()).unwrap();
        let s0 = policy.gaussian(GaussianSpec::vacuum()).unwrap();
        let s1 = policy.gaussian(GaussianSpec::new(shift, 0.25).unwrap()).unwrap();
        let p0 = homodyne_distribution(&s0, &probe, phi).unwrap();
        let p1 = homodyne_distribution(&s1, &probe, phi).unwrap();
        prop_assert!((p1.mean() - p0.mean() - shift).abs() < 1e-8);
        prop_assert!((p1.variance() - p0.variance()).abs() < 1e-8);
        for x in [-0.5, 0.0, 0.7] {
            prop_assert!((p1.value_at(x + shift) - p0.value_at(x)).abs() < 1e-6);
        }
    }
}

#[test]
fn refinement_converges() {
    // coarse lattices converge onto the finest one
    let spec = GaussianSpec::new(0.3, 0.2).unwrap();
    let fine = build_gaussian(spec, Grid::centered(0.0, 6.0, 4096).unwrap()).unwrap();
    let mut last = f64::INFINITY;
    for n in [128, 256, 512] {
        let coarse = build_gaussian(spec, Grid::centered(0.0, 6.0, n).unwrap()).unwrap();
        let err = l2_distance(&coarse.resample(fine.grid()).unwrap(), &fine).unwrap();
        assert!(err < last);
        last = err;
    }
    assert!(last < 1e-6);
    assert_abs_diff_eq!(density(&fine).variance(), 0.2, epsilon = 1e-10);
}
