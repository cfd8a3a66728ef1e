//! Acceptance suite: one PASS/FAIL line per criterion, with its time budget.
//!
//! Run with `cargo test -p twc-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twc::expansion::HermiteCoeffVector;
use twc::grid::{GridFunction, GridOptions, GridSpec};
use twc::hermite::hermite_all;
use twc::oscillators::{
    apply_h_bar_sigma_coeff, apply_h_bar_sigma_grid, apply_h_sigma_coeff, apply_h_sigma_grid, h_bar_sigma_from_ladders,
    h_sigma_from_ladders, intertwine_check,
};
use twc::phase_space::{hermite_wong_eval, symplectic_fourier, wigner};
use twc::positivity::{is_positive_twisted, random_positive_element, PlantedSpec, DEFAULT_PSD_TOL};
use twc::quadrature::gauss_hermite_rule;
use twc::regularity::{trace_identity_check, verify_regularity_theorem, verify_weyl_positive, TheoremConfig};
use twc::twisted::{
    symplectic_fourier_coeff, synthesize, twisted_convolution_coeff, twisted_convolution_grid, twisted_pairing_grid,
    weyl_product, weyl_quantize,
};
use twc::{Flavor, PairIndex, WongCoeffMatrix};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, n_max: usize) -> WongCoeffMatrix {
    let mut c = WongCoeffMatrix::zeros(d, n_max).unwrap();
    c.matrix_mut().iter_mut().for_each(|v| *v = random_complex(rng));
    c
}

fn unit(a1: usize, a2: usize, n_max: usize) -> WongCoeffMatrix {
    WongCoeffMatrix::unit(1, n_max, &PairIndex::scalar(a1, a2)).unwrap()
}

fn hermite_samples(spec: GridSpec, k: usize) -> GridFunction {
    GridFunction::from_fn(spec, |x| Complex64::new(hermite_all(k, x[0])[k], 0.0))
}

fn criterion_1() -> Outcome {
    let n = 32;
    let rule = gauss_hermite_rule(4 * (n + 1)).unwrap();
    let tables: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| hermite_all(n, x)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let ip: f64 = tables
                .iter()
                .zip(&rule.scaled_weights)
                .map(|(t, w)| w * t[i] * t[j])
                .sum();
            worst = worst.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |<h_i,h_j> - delta_ij| = {worst:.2e} (i,j <= 32)"),
    )
}

fn criterion_2() -> Outcome {
    let spec = GridSpec::new(1, 8.0, 256).unwrap();
    let opts = GridOptions::default();
    let hs: Vec<GridFunction> = (0..=4).map(|k| hermite_samples(spec, k)).collect();
    let mut basis = Vec::new();
    let mut closed_form_gap: f64 = 0.0;
    for a1 in 0..=4 {
        for a2 in 0..=4 {
            let mut w = wigner(&hs[a1], &hs[a2], &opts).unwrap();
            if a1 % 2 == 1 {
                w.scale(Complex64::new(-1.0, 0.0));
            }
            let exact = hermite_wong_eval(&PairIndex::scalar(a1, a2), w.spec()).unwrap();
            closed_form_gap = closed_form_gap.max(w.max_abs_diff(&exact).unwrap());
            basis.push(w);
        }
    }
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let ip = a.inner(b).unwrap();
            worst = worst.max((ip - Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).norm());
        }
    }
    outcome(
        worst <= 1e-6 && closed_form_gap <= 1e-6,
        format!("max |<rho_a,rho_b> - delta| = {worst:.2e}; Wigner vs closed form {closed_form_gap:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let spec = GridSpec::phase_space_default();
    let opts = GridOptions::default();
    let mut eigen_worst: f64 = 0.0;
    let mut involution_worst: f64 = 0.0;
    for a1 in 0..=6 {
        for a2 in 0..=6 {
            let rho = hermite_wong_eval(&PairIndex::scalar(a1, a2), &spec).unwrap();
            let f = symplectic_fourier(&rho, &opts).unwrap();
            let mut expected = rho.clone();
            if a1 % 2 == 1 {
                expected.scale(Complex64::new(-1.0, 0.0));
            }
            eigen_worst = eigen_worst.max(f.distance_l2(&expected).unwrap() / rho.norm_l2());
            let ff = symplectic_fourier(&f, &opts).unwrap();
            involution_worst = involution_worst.max(ff.distance_l2(&rho).unwrap() / rho.norm_l2());
        }
    }
    outcome(
        eigen_worst <= 1e-6 && involution_worst <= 1e-8,
        format!("eigen rel err {eigen_worst:.2e} (alpha <= 6); involution {involution_worst:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let n = 4;
    let spec = GridSpec::new(2, 6.0, 49).unwrap();
    let opts = GridOptions::default();
    let grids: Vec<GridFunction> = (0..(n + 1) * (n + 1))
        .map(|k| synthesize(&unit(k / (n + 1), k % (n + 1), n), &spec).unwrap())
        .collect();
    let mut worst: f64 = 0.0;
    let mut annihilations = 0;
    for (ia, ga) in grids.iter().enumerate() {
        for (ib, gb) in grids.iter().enumerate() {
            let (a, b) = (unit(ia / (n + 1), ia % (n + 1), n), unit(ib / (n + 1), ib % (n + 1), n));
            let coeff = twisted_convolution_coeff(&a, &b).unwrap();
            if coeff.count_nonzero() == 0 {
                annihilations += 1;
            }
            let expected = synthesize(&coeff, &spec).unwrap();
            let grid = twisted_convolution_grid(ga, gb, &opts).unwrap();
            let gap = grid.distance_l2(&expected).unwrap() / (ga.norm_l2() * gb.norm_l2());
            worst = worst.max(gap);
        }
    }
    outcome(
        worst <= 1e-5,
        format!("max relative L2 gap {worst:.2e} over 625 unit pairs ({annihilations} annihilations), 49^2 grid"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // coefficient space
    let mut coeff_worst: f64 = 0.0;
    for a1 in 0..=6 {
        for a2 in 0..=6 {
            let c = unit(a1, a2, 6);
            let h = apply_h_sigma_coeff(&c).get(&PairIndex::scalar(a1, a2)).unwrap().re;
            let hb = apply_h_bar_sigma_coeff(&c).get(&PairIndex::scalar(a1, a2)).unwrap().re;
            coeff_worst = coeff_worst
                .max((h - (2 * a1 + 1) as f64).abs())
                .max((hb - (2 * a2 + 1) as f64).abs());
        }
    }
    let mut ladder_worst: f64 = 0.0;
    for _ in 0..20 {
        let c = random_matrix(&mut rng, 1, 8);
        let l = (h_sigma_from_ladders(&c).unwrap().matrix() - apply_h_sigma_coeff(&c).matrix()).norm();
        let lb = (h_bar_sigma_from_ladders(&c).unwrap().matrix() - apply_h_bar_sigma_coeff(&c).matrix()).norm();
        ladder_worst = ladder_worst.max(l.max(lb) / c.frobenius_norm());
    }
    // grid oracle
    let spec = GridSpec::phase_space_default();
    let opts = GridOptions::default();
    let mut grid_worst: f64 = 0.0;
    for a1 in 0..=6 {
        for a2 in 0..=6 {
            let rho = hermite_wong_eval(&PairIndex::scalar(a1, a2), &spec).unwrap();
            for (op, lambda) in [
                (apply_h_sigma_grid(&rho, &opts).unwrap(), (2 * a1 + 1) as f64),
                (apply_h_bar_sigma_grid(&rho, &opts).unwrap(), (2 * a2 + 1) as f64),
            ] {
                let mut expected = rho.clone();
                expected.scale(Complex64::new(lambda, 0.0));
                grid_worst = grid_worst.max(op.distance_l2(&expected).unwrap() / expected.norm_l2());
            }
        }
    }
    outcome(
        coeff_worst <= 1e-12 && ladder_worst <= 1e-12 && grid_worst <= 1e-3,
        format!("coefficient {coeff_worst:.1e}; ladders {ladder_worst:.1e}; grid rel err {grid_worst:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let c = random_matrix(&mut rng, if i % 5 == 4 { 2 } else { 1 }, 6);
        for n1 in 0..=4 {
            for n2 in 0..=4 {
                worst = worst.max(intertwine_check(&c, n1, n2).unwrap());
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max residual {worst:.1e} over 50 matrices, N1,N2 <= 4"),
    )
}

fn criterion_7() -> Outcome {
    // anchor: rho_{a,b}(0,0) = sqrt(2/pi) delta_ab by grid Wigner quadrature
    let spec = GridSpec::new(1, 8.0, 257).unwrap();
    let opts = GridOptions::default();
    let hs: Vec<GridFunction> = (0..=4).map(|k| hermite_samples(spec, k)).collect();
    let mut anchor_worst: f64 = 0.0;
    for a in 0..=4 {
        for b in 0..=4 {
            let (v, dist) = wigner(&hs[a], &hs[b], &opts).unwrap().value_near_origin();
            assert_eq!(dist, 0.0);
            let sign = if a % 2 == 1 { -1.0 } else { 1.0 };
            let want = if a == b {
                (2.0 / std::f64::consts::PI).sqrt()
            } else {
                0.0
            };
            anchor_worst = anchor_worst.max((v * sign - Complex64::new(want, 0.0)).norm());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut gap_worst: f64 = 0.0;
    for rank in 1..=5 {
        for trial in 0..4 {
            let d = if trial == 3 { 2 } else { 1 };
            let n_max = if d == 1 { 32 } else { 6 };
            let vectors: Vec<HermiteCoeffVector> = (0..rank)
                .map(|_| {
                    let mut v = HermiteCoeffVector::zeros(d, n_max).unwrap();
                    v.coeffs_mut().iter_mut().for_each(|c| *c = random_complex(&mut rng));
                    v
                })
                .collect();
            for n in 0..=6 {
                gap_worst = gap_worst.max(trace_identity_check(&vectors, n).unwrap().relative_gap);
            }
        }
    }
    outcome(
        anchor_worst <= 1e-6 && gap_worst <= 1e-12,
        format!("origin anchor err {anchor_worst:.1e}; trace identity gap {gap_worst:.1e} (rank <= 5, N <= 6)"),
    )
}

fn criterion_8() -> Outcome {
    let mut lines = Vec::new();
    let mut all = true;
    for s in [0.3, 0.5, 1.0] {
        let mut passes = 0;
        let (mut g_lo, mut g_hi, mut d_lo, mut d_hi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for seed in 0..10 {
            let cfg = TheoremConfig {
                planted_s: s,
                seed,
                ..TheoremConfig::default()
            };
            let r = verify_regularity_theorem(&cfg).unwrap();
            let g = r.fitted_s_growth.unwrap_or(f64::NAN);
            let d = r.fitted_s_decay.unwrap_or(f64::NAN);
            g_lo = g_lo.min(g);
            g_hi = g_hi.max(g);
            d_lo = d_lo.min(d);
            d_hi = d_hi.max(d);
            if r.pass && (g - s).abs() <= 0.15 && (d - s).abs() <= 0.15 {
                passes += 1;
            }
        }
        all &= passes >= 9;
        lines.push(format!(
            "s={s}: {passes}/10, growth [{g_lo:.3},{g_hi:.3}], decay [{d_lo:.3},{d_hi:.3}]"
        ));
    }
    outcome(all, lines.join("; "))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let (d, n) = if i % 4 == 3 { (2, 4) } else { (1, 10) };
        let a = random_matrix(&mut rng, d, n);
        let b = random_matrix(&mut rng, d, n);
        let lhs = weyl_quantize(&weyl_product(&a, &b).unwrap());
        let rhs: DMatrix<Complex64> = weyl_quantize(&a) * weyl_quantize(&b);
        worst = worst.max((&lhs - &rhs).norm() / rhs.norm());
    }
    let mut pipeline = Vec::new();
    let mut all = true;
    for s in [0.3, 0.5, 1.0] {
        let cfg = TheoremConfig {
            planted_s: s,
            seed: 100,
            ..TheoremConfig::default()
        };
        let element = random_positive_element(&cfg.planted_spec()).unwrap();
        let symbol = symplectic_fourier_coeff(&element.matrix);
        let r = verify_weyl_positive(&symbol, cfg.big_n_max, Some(s), cfg.tolerance).unwrap();
        all &= r.pass;
        pipeline.push(format!(
            "s={s}: {} ({:.3}/{:.3})",
            if r.pass { "ok" } else { "fail" },
            r.fitted_s_growth.unwrap_or(f64::NAN),
            r.fitted_s_decay.unwrap_or(f64::NAN)
        ));
    }
    let neg = verify_weyl_positive(&unit(1, 1, 6), 10, None, 0.15).unwrap();
    all &= !neg.pass && neg.witness.is_some();
    outcome(
        worst <= 1e-10 && all,
        format!(
            "homomorphism rel err {worst:.1e}; planted symbols {}; non-PSD symbol refused",
            pipeline.join(", ")
        ),
    )
}

fn criterion_10() -> Outcome {
    let n = 4;
    let spec = GridSpec::new(2, 6.0, 49).unwrap();
    let opts = GridOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut min_pairing = f64::INFINITY;
    let mut max_imag: f64 = 0.0;
    for e in 0..20 {
        let element = random_positive_element(&PlantedSpec {
            d: 1,
            n_max: n,
            rank: 1 + e % 4,
            planted_s: 0.5,
            planted_r: 0.3,
            flavor: Flavor::Roumieu,
            seed: 1000 + e as u64,
        })
        .unwrap();
        let c = element
            .matrix
            .scaled(Complex64::new(1.0 / element.matrix.frobenius_norm(), 0.0));
        let a = synthesize(&c, &spec).unwrap();
        for _ in 0..20 {
            let psi_c = random_matrix(&mut rng, 1, n);
            let psi_c = psi_c.scaled(Complex64::new(1.0 / psi_c.frobenius_norm(), 0.0));
            let psi = synthesize(&psi_c, &spec).unwrap();
            let p = twisted_pairing_grid(&a, &psi, &opts).unwrap();
            min_pairing = min_pairing.min(p.re);
            max_imag = max_imag.max(p.im.abs());
        }
    }
    let mut rejected = 0;
    let mut worst_witness = f64::NEG_INFINITY;
    for k in 0..5 {
        let h = random_matrix(&mut rng, 1, n);
        let herm = (h.matrix() + h.matrix().adjoint()) * Complex64::new(0.5, 0.0);
        let c = WongCoeffMatrix::from_matrix(1, n, herm).unwrap();
        let c = c.scaled(Complex64::new(1.0 / c.frobenius_norm(), 0.0));
        let shift = if k == 0 { 0.0 } else { 0.05 * k as f64 };
        let mut c = c;
        for i in 0..=n {
            c.matrix_mut()[(i, i)] += Complex64::new(shift, 0.0);
        }
        let verdict = is_positive_twisted(&c, DEFAULT_PSD_TOL).unwrap();
        if let Some(w) = verdict.witness() {
            let a = synthesize(&c, &spec).unwrap();
            let psi = synthesize(&w.probe, &spec).unwrap();
            let p = twisted_pairing_grid(&a, &psi, &opts).unwrap();
            let agrees = (p - w.pairing).norm() <= 1e-6;
            if p.re < 0.0 && agrees {
                rejected += 1;
            }
            worst_witness = worst_witness.max(p.re);
        }
    }
    outcome(
        min_pairing >= -1e-6 && rejected == 5,
        format!(
            "min Re pairing {min_pairing:.2e} (max |Im| {max_imag:.1e}) over 400; {rejected}/5 rejected, max witness pairing {worst_witness:.3e}"
        ),
    )
}

type Criterion = (u32, &'static str, f64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "Hermite orthonormality", 5.0, criterion_1),
        (2, "rho-basis orthonormality on grid", 30.0, criterion_2),
        (3, "F_sigma eigen-property and involution", 30.0, criterion_3),
        (4, "composition identity vs quadrature", 60.0, criterion_4),
        (5, "eigen relations and ladders", 30.0, criterion_5),
        (6, "intertwining", 5.0, criterion_6),
        (7, "trace identity and origin anchor", 10.0, criterion_7),
        (8, "planted-order regularity recovery", 120.0, criterion_8),
        (9, "Weyl layer", 10.0, criterion_9),
        (10, "positivity equivalence", 60.0, criterion_10),
    ];
    let only: Option<u32> = std::env::var("TWC_CRITERION").ok().and_then(|v| v.parse().ok());
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = result.pass && secs < limit;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {id:>2} [{}] {name}: {} ({secs:.2}s / {limit:.0}s)",
            if pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}
