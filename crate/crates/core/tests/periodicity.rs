use boltzmann_core::periodicity::{period3_scale, period_from_alpha};
use boltzmann_core::*;
use num_rational::Ratio;

const E_REF: f64 = -5.0 / 24.0;

fn polynomial_exact(d: Ratio<i64>, e: Ratio<i64>) -> Ratio<i64> {
    let c = |v: i64| Ratio::from(v);
    c(4) * (d * d - c(4)) * e * e + c(4) * d * (d * d - c(3)) * e + d * d * d * d
        - c(2) * d * d
        - c(3)
}

#[test]
fn polynomial_matches_exact_oracle() {
    let q = Ratio::new;
    assert_eq!(polynomial_exact(q(7, 4), q(-5, 24)), q(0, 1));
    for (dn, dd, en, ed) in [(1, 2, 1, 3), (-3, 1, 2, 5), (5, 2, -1, 10), (2, 1, 3, 10)] {
        let want = polynomial_exact(q(dn, dd), q(en, ed));
        let got = period3_residual(dn as f64 / dd as f64, en as f64 / ed as f64);
        let want = *want.numer() as f64 / *want.denom() as f64;
        assert!(
            (got - want).abs() < 1e-13 * (1.0 + want.abs()),
            "{got} vs {want}"
        );
    }
}

#[test]
fn grid_prediction_agrees_with_direct_detection() {
    let mut valid = 0;
    for i in 0..20 {
        for j in 0..20 {
            let d = -5.0 + 10.0 * (i as f64 + 0.5) / 20.0;
            let e = -1.0 + 3.0 * (j as f64 + 0.5) / 20.0;
            let p = derive_params(d, e);
            if p.regime().is_err() {
                continue;
            }
            valid += 1;
            let predicted = predict_period(&p, 60, 1e-8).unwrap();
            let c = sample_level_set(&p, 1, (i * 20 + j) as u64).unwrap()[0];
            let detected = detect_period_direct(c, &p, 60, 1e-8).unwrap();
            assert_eq!(predicted, detected, "({d}, {e})");
        }
    }
    assert!(valid > 150, "{valid}");
}

#[test]
fn periodic_parameters_on_many_loci_agree() {
    let mut checked = 0;
    for e in [-0.3, -0.1, 0.2] {
        for period in 3..=7 {
            for d in find_periodic_locus(e, period, (-4.0, 4.0), 1e-13) {
                let p = derive_params(d, e);
                let rep = poncelet_check(&p, 12, 60, 1e-7, 3).unwrap();
                assert!(rep.method_agreement, "({d}, {e}) p={period} {rep:?}");
                let got = rep.detected.unwrap();
                // the smallest period divides the one solved for
                assert_eq!(period % got, 0, "({d}, {e}) p={period} got {got}");
                checked += 1;
            }
        }
    }
    assert!(checked > 5, "{checked}");
}

#[test]
fn period_three_is_unanimous_over_many_starts() {
    let p = derive_params(1.75, E_REF);
    let rep = poncelet_check(&p, 150, 60, 1e-8, 99).unwrap();
    assert_eq!(rep.per_sample.len(), 150);
    assert!(rep.per_sample.iter().all(|&s| s == Some(3)));
    assert_eq!((rep.predicted, rep.detected), (Some(3), Some(3)));
    assert!(rep.residual < 1e-8);
}

#[test]
fn generic_parameters_are_unanimously_aperiodic() {
    for (d, e) in [(1.5, -0.2), (2.5, -0.1), (-2.5, 1.5)] {
        let rep = poncelet_check(&derive_params(d, e), 100, 60, 1e-8, 4).unwrap();
        assert!(rep.per_sample.iter().all(Option::is_none), "({d}, {e})");
        assert!(rep.method_agreement && rep.predicted.is_none());
    }
}

#[test]
fn start_on_fixed_locus_of_i_has_same_period() {
    let p = derive_params(1.75, E_REF);
    let a2 = -p.d / 2.0;
    let a1 = (p.r2 - (a2 - 2.0 * p.e).powi(2)).sqrt();
    for a1 in [a1, -a1] {
        let x = -a1 * (a2 + p.d) / (1.0 - a1 * a1);
        let c = ConfigPoint::new(x, a1, a2);
        assert!(c.max_residual(&p) < 1e-12, "{:e} {c:?}", c.max_residual(&p));
        let (ci, tag) = involution_i(c, &p).unwrap();
        assert_eq!(tag, RootExchange::DoubleRoot);
        assert!(ci.distance(&c) < 1e-12);
        assert_eq!(detect_period_direct(c, &p, 60, 1e-8).unwrap(), Some(3));
    }
}

#[test]
fn locus_roots_cross_validate_with_polynomial() {
    for e in [E_REF, -0.1, 0.2, -0.4] {
        let roots = find_periodic_locus(e, 3, (0.0, 2.0), 1e-13);
        for &d in &roots {
            let rel = period3_residual(d, e).abs() / period3_scale(d, e);
            assert!(rel < 1e-6, "E={e} D={d} rel={rel:e}");
        }
    }
    let roots = find_periodic_locus(E_REF, 3, (0.0, 2.0), 1e-13);
    assert!(roots.iter().any(|d| (d - 1.75).abs() < 1e-8), "{roots:?}");
}

#[test]
fn flip_parity_and_p_max() {
    assert_eq!(period_from_alpha(0.5, false, 60, 1e-9), Some(2));
    assert_eq!(period_from_alpha(0.5, true, 60, 1e-9), Some(2));
    assert_eq!(period_from_alpha(0.2, true, 60, 1e-9), Some(10));
    assert_eq!(period_from_alpha(1.0 / 61.0, false, 60, 1e-9), None);
    assert_eq!(period_from_alpha(0.0, false, 60, 1e-9), Some(1));
}

#[test]
fn bipartite_plus_periods_are_even() {
    let e = -0.1;
    let mut found = 0;
    for period in [4, 6, 8] {
        for d in find_periodic_locus(e, period, (2.01, 6.0), 1e-13) {
            let p = derive_params(d, e);
            assert_eq!(p.class, RealLocusClass::IIplus);
            let got = predict_period(&p, 60, 1e-8).unwrap().unwrap();
            assert_eq!(got % 2, 0);
            let c = sample_level_set(&p, 1, 1).unwrap()[0];
            assert_eq!(detect_period_direct(c, &p, 60, 1e-7).unwrap(), Some(got));
            found += 1;
        }
    }
    assert!(found > 0);
    assert!(find_periodic_locus(e, 3, (2.01, 6.0), 1e-12).is_empty());
}
