use bicoef_core::{Complex64, PhiProfile};
use proptest::prelude::*;

fn built_in() -> Vec<PhiProfile> {
    vec![
        PhiProfile::janowski(1.0, -1.0).unwrap(),
        PhiProfile::janowski(0.5, -0.5).unwrap(),
        PhiProfile::janowski(0.8, 0.2).unwrap(),
        PhiProfile::power(0.3).unwrap(),
        PhiProfile::power(1.0).unwrap(),
        PhiProfile::order_beta(0.0).unwrap(),
        PhiProfile::order_beta(0.7).unwrap(),
        PhiProfile::sqrt_lemniscate(),
    ]
}

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0..0.99f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r.sqrt(), t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn image_of_disk_lies_in_region(z in disk_point()) {
        for phi in built_in() {
            let w = phi.evaluate(z).unwrap();
            prop_assert!(phi.region_contains(w).unwrap(), "{phi}: phi({z}) = {w}");
        }
    }

    #[test]
    fn image_is_symmetric_about_real_axis(z in disk_point()) {
        for phi in built_in() {
            let w = phi.evaluate(z).unwrap();
            let wc = phi.evaluate(z.conj()).unwrap();
            prop_assert!((w.conj() - wc).norm() <= 1e-12);
        }
    }
}

#[test]
fn finite_differences_recover_b1_b2() {
    let h = 1e-5;
    let hz = Complex64::new(h, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    for phi in built_in() {
        let (fp, f0, fm) = (
            phi.evaluate(hz).unwrap(),
            phi.evaluate(zero).unwrap(),
            phi.evaluate(-hz).unwrap(),
        );
        assert!((f0 - 1.0).norm() < 1e-15, "{phi}: phi(0) = {f0}");
        let first = (fp - fm) / (2.0 * h);
        assert!((first.re - phi.b1()).abs() < 1e-6, "{phi}: {first} vs {}", phi.b1());
        // the second difference estimates phi''(0) = 2 B2; a wider step keeps
        // rounding below the tolerance
        let h2 = 1e-3;
        let (gp, gm) = (
            phi.evaluate(Complex64::new(h2, 0.0)).unwrap(),
            phi.evaluate(Complex64::new(-h2, 0.0)).unwrap(),
        );
        let second = (gp - 2.0 * f0 + gm) / (h2 * h2);
        assert!(
            (second.re / 2.0 - phi.b2()).abs() < 1e-5,
            "{phi}: {} vs {}",
            second.re / 2.0,
            phi.b2()
        );
    }
}

#[test]
fn region_is_open() {
    // boundary images: phi on |z| = 1 (away from poles) is outside
    for phi in built_in() {
        for k in 1..16 {
            let z = Complex64::from_polar(1.0, 0.3 + k as f64 * 0.37);
            if let Ok(w) = phi.evaluate(z) {
                if w.is_finite() {
                    assert!(phi.region_margin(w).unwrap() <= 1e-9, "{phi} at {z}");
                }
            }
        }
    }
}
