use mukai_lab::t4_nahm::{
    dirac_kernel, green_cross_check, nahm_checks, quantize_flux, transformed_curvature, FluxData, NahmConfig,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn small(n: usize, m: usize) -> NahmConfig {
    NahmConfig { n, m, ..NahmConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn kernel_dimension_is_the_index(k in 1i64..=2, xi in prop::array::uniform4(0.0..1.0f64)) {
        let flux = FluxData::separable(k, -k);
        let cfg = small(8 * k as usize, 2);
        let kernel = dirac_kernel(&flux, xi, &cfg).unwrap();
        prop_assert_eq!(kernel.dim() as i64, flux.index_expected());
        prop_assert_eq!(flux.index_expected(), k * k);
        prop_assert!(kernel.dirac_residual <= cfg.eig_tol.sqrt());
        prop_assert!(kernel.lowest_plus >= 2.0 * PI * k as f64 - 1e-8);
        prop_assert!(kernel.plus_curvature <= 1e-12);
    }
}

#[test]
fn orientation_of_flux_decides_admissibility() {
    let cfg = small(8, 2);
    assert!(dirac_kernel(&FluxData::separable(1, 1), [0.0; 4], &cfg).is_err());
    assert!(dirac_kernel(&FluxData::separable(0, 0), [0.0; 4], &cfg).is_err());
    assert!(dirac_kernel(&FluxData::separable(2, -1), [0.0; 4], &cfg).is_err());
}

#[test]
fn transformed_curvature_is_pointwise_asd_and_integral() {
    let flux = FluxData::separable(1, -1);
    let cfg = small(8, 2);
    let s = transformed_curvature(&flux, [0.3, 0.7, 0.1, 0.45], &cfg).unwrap();
    assert_eq!(s.kernel_dim, 1);
    assert!(s.self_dual_sq <= 1e-20 * s.total_sq.max(1.0));
    // F̂₁₂ = 2πi·(−1) and F̂₃₄ = 2πi·(+1) for a unit transformed flux
    let f01 = s.entry(0, 1, 0, 0);
    let f23 = s.entry(2, 3, 0, 0);
    assert!((f01.im / (2.0 * PI) + 1.0).abs() < 1e-8, "{f01}");
    assert!((f23.im / (2.0 * PI) - 1.0).abs() < 1e-8, "{f23}");
    assert!(f01.re.abs() < 1e-8 && f23.re.abs() < 1e-8);
}

#[test]
fn sweep_recovers_dual_flux() {
    let flux = FluxData::separable(1, -1);
    let rep = nahm_checks(&flux, &small(8, 2), 1).unwrap();
    assert!(rep.identity_checks.all_passed(), "{:?}", rep.identity_checks.first_failure());
    let (a, b) = (rep.transformed_flux[0][1], rep.transformed_flux[2][3]);
    assert!((a.re + 1.0).abs() < 1e-8 && (b.re - 1.0).abs() < 1e-8);
    assert!(quantize_flux(&rep.transformed_flux, 1e-6).is_ok());
}

#[test]
fn green_operator_routes_agree() {
    let err = green_cross_check(&FluxData::separable(1, -1), 8, &small(8, 2)).unwrap();
    assert!(err < 1e-8, "{err}");
}
