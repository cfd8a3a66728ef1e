//! Oscillators, ladders, positivity and the regularity pipeline.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twc::oscillators::{
    apply_h_bar_sigma_coeff, apply_h_bar_sigma_grid, apply_h_sigma_coeff, apply_h_sigma_grid, apply_ladder,
    apply_t_sigma_coeff, h_bar_sigma_from_ladders, h_sigma_from_ladders, intertwine_check, t_sigma_log_magnitudes,
};
use twc::positivity::{gram, WitnessKind};
use twc::regularity::{
    check_regularity, classify_decay, fit_growth, growth_sequence, t_sigma_origin, trace_identity_check,
    verify_regularity_theorem, verify_weyl_positive,
};
use twc::twisted::{synthesize, twisted_convolution_coeff, weyl_quantize, weyl_symbol};
use twc::{
    is_positive_twisted, random_positive_element, Flavor, GridOptions, GridSpec, GrowthMode, HermiteCoeffVector,
    LadderFamily, LadderKind, PairIndex, PlantedSpec, TheoremConfig, TwcError, WongCoeffMatrix,
};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix(seed: u64, d: usize, n_max: usize) -> WongCoeffMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = WongCoeffMatrix::zeros(d, n_max).unwrap();
    c.matrix_mut()
        .iter_mut()
        .for_each(|v| *v = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    c
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize, n_max: usize) -> HermiteCoeffVector {
    let mut v = HermiteCoeffVector::zeros(d, n_max).unwrap();
    v.coeffs_mut()
        .iter_mut()
        .for_each(|c| *c = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    v
}

#[test]
fn oscillator_eigenvalues_on_units() {
    for (a1, a2) in [(0, 0), (3, 1), (2, 6)] {
        let u = WongCoeffMatrix::unit(1, 8, &PairIndex::scalar(a1, a2)).unwrap();
        let h = apply_h_sigma_coeff(&u);
        let hb = apply_h_bar_sigma_coeff(&u);
        assert_eq!(
            h.get(&PairIndex::scalar(a1, a2)).unwrap(),
            c64((2 * a1 + 1) as f64, 0.0)
        );
        assert_eq!(
            hb.get(&PairIndex::scalar(a1, a2)).unwrap(),
            c64((2 * a2 + 1) as f64, 0.0)
        );
        let t = apply_t_sigma_coeff(&u, 1).unwrap();
        assert_eq!(
            t.get(&PairIndex::scalar(a1, a2)).unwrap().re,
            ((2 * a1 + 1) * (2 * a2 + 1)) as f64
        );
    }
}

#[test]
fn finite_difference_oscillators_match_coefficients() {
    let spec = GridSpec::new(2, 8.0, 192).unwrap();
    let opts = GridOptions::default();
    for (a1, a2) in [(0, 0), (2, 1), (1, 4)] {
        let u = WongCoeffMatrix::unit(1, 6, &PairIndex::scalar(a1, a2)).unwrap();
        let a = synthesize(&u, &spec).unwrap();
        for (grid, coeff) in [
            (apply_h_sigma_grid(&a, &opts).unwrap(), apply_h_sigma_coeff(&u)),
            (apply_h_bar_sigma_grid(&a, &opts).unwrap(), apply_h_bar_sigma_coeff(&u)),
        ] {
            let want = synthesize(&coeff, &spec).unwrap();
            let rel = grid.distance_l2(&want).unwrap() / want.norm_l2();
            assert!(rel < 1e-3, "({a1},{a2}): {rel}");
        }
    }
}

#[test]
fn ladders_reproduce_oscillators_in_two_dimensions() {
    let c = random_matrix(5, 2, 4);
    let h = h_sigma_from_ladders(&c).unwrap();
    let hb = h_bar_sigma_from_ladders(&c).unwrap();
    assert!((h.matrix() - apply_h_sigma_coeff(&c).matrix()).norm() < 1e-12);
    assert!((hb.matrix() - apply_h_bar_sigma_coeff(&c).matrix()).norm() < 1e-12);
}

#[test]
fn ladder_truncation_flag() {
    let top = WongCoeffMatrix::unit(1, 3, &PairIndex::scalar(3, 0)).unwrap();
    assert!(
        apply_ladder(&top, LadderKind::new(LadderFamily::Z2Tilde, 0))
            .unwrap()
            .truncated
    );
    assert!(
        !apply_ladder(&top, LadderKind::new(LadderFamily::Z2, 0))
            .unwrap()
            .truncated
    );
    // lowering the ground state gives zero without truncation
    let ground = WongCoeffMatrix::unit(1, 3, &PairIndex::scalar(0, 0)).unwrap();
    let r = apply_ladder(&ground, LadderKind::new(LadderFamily::Z1, 0)).unwrap();
    assert!(!r.truncated && r.value.count_nonzero() == 0);
    assert!(matches!(
        apply_ladder(&ground, LadderKind::new(LadderFamily::Z1, 1)),
        Err(TwcError::InvalidArgument(_))
    ));
}

#[test]
fn intertwining_with_tensor_oscillators() {
    let c = random_matrix(9, 1, 10);
    for (n1, n2) in [(0, 0), (1, 0), (0, 2), (3, 2)] {
        assert!(intertwine_check(&c, n1, n2).unwrap() < 1e-14);
    }
}

#[test]
fn t_sigma_overflow_and_log_magnitudes() {
    let u = WongCoeffMatrix::unit(1, 40, &PairIndex::scalar(40, 40)).unwrap();
    assert!(matches!(apply_t_sigma_coeff(&u, 200), Err(TwcError::Range(_))));
    let logs = t_sigma_log_magnitudes(&u, 200);
    let k = PairIndex::scalar(40, 40);
    let flat = u.space().flat(&k.first).unwrap() * u.space().len() + u.space().flat(&k.second).unwrap();
    assert!((logs[flat] - 400.0 * 81f64.ln()).abs() < 1e-9);
}

#[test]
fn origin_value_against_pointwise_synthesis() {
    let c = random_matrix(13, 1, 6);
    for n in 0..4 {
        let t = apply_t_sigma_coeff(&c, n).unwrap();
        let direct = t.evaluate(&[0.0, 0.0]).unwrap();
        let logged = t_sigma_origin(&c, n).to_complex();
        assert!((direct - logged).norm() <= 1e-12 * direct.norm().max(1.0), "N={n}");
        // and on an odd grid, where (0,0) is a sample
        let g = synthesize(&t, &GridSpec::new(2, 6.0, 33).unwrap()).unwrap();
        let (v, dist) = g.value_near_origin();
        assert_eq!(dist, 0.0);
        assert!((v - logged).norm() <= 1e-10 * logged.norm().max(1.0));
    }
}

#[test]
fn trace_identity_reaches_large_powers() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let fs: Vec<_> = (0..3).map(|_| random_vector(&mut rng, 1, 20)).collect();
    for n in [0, 1, 5, 40, 200] {
        let t = trace_identity_check(&fs, n).unwrap();
        assert!(t.relative_gap < 1e-12, "N={n}: {t:?}");
        assert!(t.lhs_ln.is_finite());
    }
}

#[test]
fn gram_matrices_are_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let fs: Vec<_> = (0..2).map(|_| random_vector(&mut rng, 2, 3)).collect();
    let g = gram(&fs).unwrap();
    let p = is_positive_twisted(&g, 1e-10).unwrap();
    assert!(p.is_positive());
    // rank 2 in a 16-dimensional space: the smallest eigenvalue is zero
    assert!(p.min_eigenvalue().abs() < 1e-12);
}

#[test]
fn witnesses_pair_negatively_or_non_real() {
    // −ϱ_{1,1}: the probe ψ = ϱ_{1,0} gives (a *_σ ψ, ψ) = −1
    let neg = WongCoeffMatrix::unit(1, 4, &PairIndex::scalar(1, 1))
        .unwrap()
        .scaled(c64(-1.0, 0.0));
    let p = is_positive_twisted(&neg, 1e-10).unwrap();
    let w = p.witness().unwrap();
    assert_eq!(w.kind, WitnessKind::NegativeEigenvalue);
    assert!((w.pairing - c64(-1.0, 0.0)).norm() < 1e-12);
    let psi = &w.probe;
    let pairing = twisted_convolution_coeff(&neg, psi).unwrap().inner(psi).unwrap();
    assert!((pairing - w.pairing).norm() < 1e-12);

    let skew = WongCoeffMatrix::unit(1, 4, &PairIndex::scalar(0, 2)).unwrap();
    let w = is_positive_twisted(&skew, 1e-10).unwrap().witness().unwrap().clone();
    assert_eq!(w.kind, WitnessKind::NotHermitian);
    assert!(w.pairing.im.abs() > 0.1);
}

#[test]
fn growth_fit_recovers_exact_model() {
    let (c0, ln_h, s) = (0.3, 0.7, 0.45);
    let values: Vec<f64> = (0..=30)
        .map(|n| c0 + 2.0 * n as f64 * ln_h + 4.0 * s * twc::logdomain::ln_factorial(n))
        .collect();
    let fit = fit_growth(&values).unwrap();
    assert!((fit.s - s).abs() < 1e-10 && (fit.ln_h - ln_h).abs() < 1e-9);
    assert!(fit_growth(&values[..4]).is_none());
}

#[test]
fn planted_elements_recover_their_order() {
    for (s, seed) in [(0.3, 1), (0.5, 2), (1.0, 3)] {
        let report = verify_regularity_theorem(&TheoremConfig {
            planted_s: s,
            seed,
            ..Default::default()
        })
        .unwrap();
        assert!(report.pass, "s={s}: {report:?}");
        assert!(report.positive && report.refused.is_none());
        assert_eq!(report.flavor, Flavor::Roumieu);
        assert_eq!(report.growth_values_log.len(), 41);
    }
}

#[test]
fn finite_expansions_are_degenerate() {
    let g = gram(&[HermiteCoeffVector::unit(1, 20, &twc::MultiIndex::scalar(2)).unwrap()]).unwrap();
    let r = check_regularity(&g, 20, None, 0.15).unwrap();
    assert!(r.pass && r.degenerate);
    assert_eq!(r.flavor, Flavor::Indeterminate);
    assert!(classify_decay(&g).s_hat.is_none());
}

#[test]
fn non_positive_input_is_refused_with_witness() {
    let c = random_matrix(23, 1, 10);
    let r = check_regularity(&c, 20, Some(0.5), 0.15).unwrap();
    assert!(!r.pass && !r.positive);
    assert!(r.refused.is_some() && r.witness.is_some());
    assert!(r.fitted_s_growth.is_none());
}

#[test]
fn weyl_quantization_round_trip_and_positivity() {
    let c = random_matrix(29, 1, 6);
    let op = weyl_quantize(&c);
    let back = weyl_symbol(1, 6, &op).unwrap();
    assert!((back.matrix() - c.matrix()).norm() < 1e-12);

    // symbol of a positive operator
    let pos = random_positive_element(&PlantedSpec {
        d: 1,
        n_max: 48,
        rank: 3,
        planted_s: 0.5,
        planted_r: twc::positivity::default_planted_rate(0.5, 48, 40),
        flavor: Flavor::Roumieu,
        seed: 4,
    })
    .unwrap();
    let symbol = weyl_symbol(1, 48, pos.matrix.matrix()).unwrap();
    let r = verify_weyl_positive(&symbol, 40, Some(0.5), 0.15).unwrap();
    // the operator is (2π)^{−1/2} times the twisted element, which only shifts ln h
    assert!(r.positive && r.pass, "{r:?}");
}

#[test]
fn sup_mode_growth_limits() {
    let g = gram(&[HermiteCoeffVector::unit(1, 6, &twc::MultiIndex::scalar(1)).unwrap()]).unwrap();
    let spec = GridSpec::new(2, 8.0, 96).unwrap();
    let seq = growth_sequence(&g, 6, GrowthMode::Sup, Some(&spec)).unwrap();
    // |T^N ϱ_{1,1}| peaks at 9^N times max |ϱ_{1,1}|
    for (n, v) in seq.values_log.iter().enumerate() {
        assert!((v - seq.values_log[0] - n as f64 * 9f64.ln()).abs() < 1e-9);
    }
    assert!(matches!(
        growth_sequence(&g, 13, GrowthMode::Sup, Some(&spec)),
        Err(TwcError::UnsupportedRange(_))
    ));
    assert!(growth_sequence(&g, 3, GrowthMode::Origin, None).is_err());
}
