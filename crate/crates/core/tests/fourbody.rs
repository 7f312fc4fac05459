use contact_core::fourbody::{c0_form, c1_form, c2_form, estimate_form, FormEstimate, FormKind, Polynomial, TestFunction4};

/// Reference run: alpha = beta = 1, gamma = 0.3, constant prefactor,
/// 4e7 samples, seed 20240601, stream 99.
const GOLDEN: [(f64, f64); 3] = [
    (79.31510308732939, 0.003742228035973298),
    (-15.210842795571272, 0.0015300385907865515),
    (24.683622097342013, 0.0028318430831397253),
];

fn reference() -> TestFunction4 {
    TestFunction4::new("ref", 1.0, 0.3, Polynomial::One)
}

#[test]
fn golden_values_are_seed_stable() {
    let phi = reference();
    for (kind, (value, err)) in FormKind::ALL.into_iter().zip(GOLDEN) {
        for seed in 0..10 {
            let e = estimate_form(&phi, kind, 100_000, seed, 0).unwrap();
            let sigma = (e.std_error.powi(2) + err * err).sqrt();
            assert!((e.value - value).abs() < 3.0 * sigma, "{kind:?} seed {seed}: {e:?}");
        }
    }
}

#[test]
fn standard_error_scales_as_inverse_root() {
    let phi = TestFunction4::new("aniso", 0.8, -0.5, Polynomial::AxialSumSquared);
    for kind in FormKind::ALL {
        let ns: Vec<f64> = (0..6).map(|k| 5000.0 * 2f64.powi(k)).collect();
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| estimate_form(&phi, kind, n as u64, 3, 1).unwrap().std_error)
            .collect();
        let slope = contact_core::approx::loglog_slope(&ns, &errs).unwrap();
        assert!((slope + 0.5).abs() < 0.1, "{kind:?}: slope {slope}");
    }
}

fn ratio(a: &FormEstimate, b: &FormEstimate) -> (f64, f64) {
    let r = a.value / b.value;
    let rel = ((a.std_error / a.value).powi(2) + (b.std_error / b.value).powi(2)).sqrt();
    (r, r.abs() * rel)
}

#[test]
fn ratios_are_dilation_invariant() {
    for phi in [reference(), TestFunction4::new("kz", 1.3, 0.4, Polynomial::AxialProduct)] {
        let n = 200_000;
        let base = [c0_form(&phi, n, 1).unwrap(), c1_form(&phi, n, 1).unwrap(), c2_form(&phi, n, 1).unwrap()];
        for lambda in [0.5, 3.0] {
            let s = phi.rescaled(lambda);
            let sc = [c0_form(&s, n, 2).unwrap(), c1_form(&s, n, 2).unwrap(), c2_form(&s, n, 2).unwrap()];
            for j in 1..3 {
                let (r0, e0) = ratio(&base[j], &base[0]);
                let (r1, e1) = ratio(&sc[j], &sc[0]);
                assert!((r0 - r1).abs() < 3.0 * (e0 * e0 + e1 * e1).sqrt(), "{} C{j}/C0 at {lambda}", phi.name);
            }
            // common power: every form picks up lambda^-7
            let scaled = sc[0].value * lambda.powi(7);
            let sigma = (sc[0].std_error * lambda.powi(7)).hypot(base[0].std_error);
            assert!((scaled - base[0].value).abs() < 3.0 * sigma);
        }
    }
}

#[test]
fn pair_term_vanishes_on_every_antisymmetric_prefactor() {
    for poly in [Polynomial::AxialDifference, Polynomial::NormDifference, Polynomial::AxialSquareDifference] {
        for gamma in [0.0, 0.6, -0.9] {
            let phi = TestFunction4::new("anti", 1.0, gamma, poly);
            let e = c1_form(&phi, 100_000, 17).unwrap();
            assert!(e.value.abs() < 3.0 * e.std_error, "{poly:?} {gamma}: {e:?}");
        }
    }
}
