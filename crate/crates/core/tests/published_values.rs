//! Small-n values quoted to four decimals, and the closed-form laws of the
//! Laguerre-Wishart ensembles.

use rmt_gaps::{build, EnsembleSpec, FastPath, Family, GapQuery, Model};

const INF: f64 = f64::INFINITY;

fn m(spec: EnsembleSpec) -> Model {
    build(&spec).unwrap()
}

fn corr(family: Family, sigma: &[f64]) -> EnsembleSpec {
    EnsembleSpec::correlated(family, sigma.to_vec())
}

/// (model, r, s, E, Ẽ) with published four-decimal values; `None` where only
/// one of the two is quoted.
fn cases() -> Vec<(&'static str, EnsembleSpec, f64, f64, Option<f64>, Option<f64>)> {
    use Family::*;
    vec![
        ("gw uncorr n=2", EnsembleSpec::uncorrelated(GaussWigner, 2), -2.0, -0.2, Some(0.1814), None),
        ("gw uncorr n=3", EnsembleSpec::uncorrelated(GaussWigner, 3), -INF, 0.0, Some(0.0056), Some(0.0056)),
        ("gw corr n=2", corr(GaussWigner, &[3.0 / 4.0, 4.0 / 9.0]), -0.5, 0.6, Some(0.0808), Some(0.3286)),
        ("gw corr n=4", corr(GaussWigner, &[3.0 / 4.0, 4.0 / 9.0, 1.0 / 4.0, 2.0 / 7.0]), -0.38, 0.38, Some(0.0034), None),
        ("lw corr n=3", corr(LaguerreWishart, &[2.0, 3.0 / 5.0, 7.0 / 3.0]).with_alpha(2.0), 0.0, 5.0, Some(0.0013), None),
        ("lw uncorr n=6", EnsembleSpec::uncorrelated(LaguerreWishart, 6).with_alpha(3.0), 18.0, INF, Some(0.1643), None),
        ("lw uncorr n=2", EnsembleSpec::uncorrelated(LaguerreWishart, 2).with_alpha(2.0), 1.0, 5.0, Some(0.1221), None),
        ("cl1 uncorr n=2", EnsembleSpec::uncorrelated(CauchyLorentzI, 2).with_kappa(3.0), -5.0, -0.3, Some(0.2907), None),
        ("cl1 corr n=2", corr(CauchyLorentzI, &[5.0 / 6.0, 7.0 / 8.0]).with_kappa(3.0), -3.0, 0.0, Some(0.1251), None),
        ("cl2 corr n=2", corr(CauchyLorentzII, &[1.0 / 2.0, 2.0 / 3.0]).with_alpha(1.0).with_kappa(5.0), 0.4, 6.0, Some(0.2505), None),
        ("cl2 uncorr n=2", EnsembleSpec::uncorrelated(CauchyLorentzII, 2).with_kappa(5.0), 0.9, 5.6, Some(0.3169), None),
        (
            "jacobi corr n=2",
            corr(JacobiManova, &[3.0 / 2.0, 5.0 / 6.0]).with_alpha(1.0).with_beta(2.0).with_kappa(7.0),
            0.2,
            0.6,
            Some(0.3128),
            None,
        ),
        ("jacobi uncorr n=2", EnsembleSpec::uncorrelated(JacobiManova, 2).with_alpha(3.0).with_beta(1.0), 0.3, 0.7, Some(0.1977), Some(0.0850)),
        ("bures corr n=2", corr(BuresHall, &[3.0 / 7.0, 8.0 / 9.0]).with_alpha(-0.5), 0.5, 5.0, Some(0.2263), None),
        ("bures uncorr n=2", EnsembleSpec::uncorrelated(BuresHall, 2).with_alpha(-0.5), 0.3, 4.0, Some(0.0925), None),
    ]
}

#[test]
fn four_decimal_values() {
    for (name, spec, r, s, e, et) in cases() {
        let model = m(spec);
        let q = GapQuery::new(r, s);
        if let Some(want) = e {
            let got = model.gap_probability(q).unwrap();
            assert!((got - want).abs() <= 5e-5, "{name}: E = {got}, published {want}");
        }
        if let Some(want) = et {
            let got = model.double_gap_probability(q).unwrap();
            assert!((got - want).abs() <= 5e-5, "{name}: Ẽ = {got}, published {want}");
        }
    }
}

fn grid50(a: f64, b: f64) -> impl Iterator<Item = f64> {
    (0..50).map(move |i| a + (b - a) * (i as f64 + 0.5) / 50.0)
}

#[test]
fn correlated_square_wishart_survival_is_exponential() {
    for sigma in [vec![2.0, 3.0 / 5.0, 7.0 / 3.0], vec![0.4, 1.1], vec![0.3, 0.9, 1.7, 2.6, 4.0]] {
        let model = m(corr(Family::LaguerreWishart, &sigma));
        let rate: f64 = sigma.iter().map(|s| 1.0 / s).sum();
        assert_eq!(model.fast_path(), FastPath::ExponentialSf { rate });
        for x in grid50(0.0, 3.0 / rate) {
            let closed = (-x * rate).exp();
            let generic = model.gap_probability(GapQuery::new(0.0, x)).unwrap();
            assert!((generic - closed).abs() <= 1e-9 * closed, "σ = {sigma:?}, x = {x}: {generic} vs {closed}");
            assert!((model.sf_min(x).unwrap() - closed).abs() <= 1e-15);
        }
    }
}

#[test]
fn square_wishart_survival_is_exponential() {
    for n in 1..=6 {
        let model = m(EnsembleSpec::uncorrelated(Family::LaguerreWishart, n));
        let nf = n as f64;
        for x in grid50(0.0, 3.0 / nf) {
            let closed = (-nf * x).exp();
            let generic = model.gap_probability(GapQuery::new(0.0, x)).unwrap();
            assert!((generic - closed).abs() <= 1e-9 * closed, "n = {n}, x = {x}: {generic} vs {closed}");
            // Ẽ(x, ∞) equals E(0, x) here.
            let tilde = model.double_gap_probability(GapQuery::new(x, INF)).unwrap();
            assert!((tilde - closed).abs() <= 1e-9 * closed);
        }
    }
    let lue3 = m(EnsembleSpec::uncorrelated(Family::LaguerreWishart, 3));
    assert!((lue3.sf_min(0.5).unwrap() - 0.2231302).abs() < 1e-7);
}

#[test]
fn gue_extremes_mirror() {
    let gue = m(EnsembleSpec::uncorrelated(Family::GaussWigner, 4));
    for x in grid50(-2.0, 2.0) {
        assert!((gue.cdf_max(x).unwrap() - gue.sf_min(-x).unwrap()).abs() <= 1e-12);
        assert!((gue.pdf_max(x).unwrap().value - gue.pdf_min(-x).unwrap().value).abs() <= 1e-12);
    }
}

#[test]
fn invalid_specs_are_rejected_with_the_inequality() {
    use rmt_gaps::SpecError;
    let err = build(&EnsembleSpec::uncorrelated(Family::CauchyLorentzII, 3).with_alpha(1.0).with_kappa(6.0)).unwrap_err();
    assert!(err.to_string().contains("κ > 2n + α − 1"), "{err}");
    let err = build(&EnsembleSpec::uncorrelated(Family::CauchyLorentzI, 3).with_kappa(2.4)).unwrap_err();
    assert!(err.to_string().contains("κ > n − 1/2"), "{err}");
    let err = build(&corr(Family::LaguerreWishart, &[0.5, 0.5])).unwrap_err();
    assert!(matches!(err, rmt_gaps::EngineError::Spec(SpecError::DegenerateSigma { .. })), "{err}");
    let mut bad = corr(Family::GaussWigner, &[0.75, 4.0 / 9.0]);
    bad.n = 3;
    assert!(matches!(build(&bad).unwrap_err(), rmt_gaps::EngineError::Spec(SpecError::SigmaLength { expected: 3, got: 2 })));
    // κ − n + 1 ∈ {0, −1}: the determinant form needs a limiting procedure.
    for kappa in [2.0, 1.0] {
        let spec = corr(Family::JacobiManova, &[0.5, 1.5, 2.5]).with_alpha(1.0).with_beta(1.0).with_kappa(kappa);
        assert!(matches!(build(&spec).unwrap_err(), rmt_gaps::EngineError::Spec(SpecError::LimitCase(_))));
    }
}
