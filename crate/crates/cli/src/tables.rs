//! CSV tables behind the acceptance runs. Grid tables are `d = 1`; the
//! growth-fit table uses `--d`.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twc::hermite::hermite_eval;
use twc::oscillators::{apply_h_bar_sigma_coeff, apply_h_bar_sigma_grid, apply_h_sigma_coeff, apply_h_sigma_grid};
use twc::phase_space::{hermite_wong_eval, kernel_map_a_grid, symplectic_fourier, wigner};
use twc::regularity::{trace_identity_check, verify_regularity_theorem};
use twc::twisted::{
    kernel_map_a_coeff, synthesize, twisted_convolution_coeff, twisted_convolution_grid, weyl_product, weyl_quantize,
};
use twc::{gauss_hermite_rule, hermite_all, GridFunction, GridSpec, HermiteCoeffVector, PairIndex, WongCoeffMatrix};

use crate::commands::theorem_config;
use crate::config::RunConfig;
use crate::output::{fmt_f64, fmt_opt, write_csv};

const HERMITE_ORDER: usize = 32;
const WONG_ORDER: usize = 4;
const EIGEN_ORDER: usize = 6;
const GROWTH_ORDERS: [f64; 3] = [0.3, 0.5, 1.0];
const SEEDS_PER_ORDER: u64 = 3;

fn sample_coeffs(seed: u64, n_max: usize) -> WongCoeffMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = WongCoeffMatrix::zeros(1, n_max).expect("valid shape");
    c.matrix_mut()
        .iter_mut()
        .for_each(|v| *v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    c
}

fn hermite_orthonormality() -> anyhow::Result<Vec<Vec<String>>> {
    let rule = gauss_hermite_rule(HERMITE_ORDER + 1)?;
    let tables: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| hermite_all(HERMITE_ORDER, x)).collect();
    let mut rows = Vec::new();
    for i in 0..=HERMITE_ORDER {
        for j in i..=HERMITE_ORDER {
            let ip: f64 = tables
                .iter()
                .zip(&rule.scaled_weights)
                .map(|(t, w)| w * t[i] * t[j])
                .sum();
            let residual = (ip - if i == j { 1.0 } else { 0.0 }).abs();
            rows.push(vec![i.to_string(), j.to_string(), fmt_f64(ip), fmt_f64(residual)]);
        }
    }
    Ok(rows)
}

fn wong_orthonormality(spec: GridSpec) -> anyhow::Result<Vec<Vec<String>>> {
    let labels: Vec<(usize, usize)> = (0..=WONG_ORDER)
        .flat_map(|a| (0..=WONG_ORDER).map(move |b| (a, b)))
        .collect();
    let basis: Vec<GridFunction> = labels
        .iter()
        .map(|&(a, b)| hermite_wong_eval(&PairIndex::scalar(a, b), &spec))
        .collect::<twc::Result<_>>()?;
    let mut rows = Vec::new();
    for (i, (a, fa)) in labels.iter().zip(&basis).enumerate() {
        for (j, (b, fb)) in labels.iter().zip(&basis).enumerate().skip(i) {
            let ip = fa.inner(fb)?;
            let residual = (ip - Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).norm();
            rows.push(vec![
                a.0.to_string(),
                a.1.to_string(),
                b.0.to_string(),
                b.1.to_string(),
                fmt_f64(residual),
            ]);
        }
    }
    Ok(rows)
}

fn eigen_residuals(cfg: &RunConfig, spec: GridSpec) -> anyhow::Result<Vec<Vec<String>>> {
    let opts = cfg.grid_options();
    let mut rows = Vec::new();
    for a1 in 0..=EIGEN_ORDER {
        for a2 in 0..=EIGEN_ORDER {
            let unit = WongCoeffMatrix::unit(1, EIGEN_ORDER, &PairIndex::scalar(a1, a2))?;
            let rho = synthesize(&unit, &spec)?;
            let norm = rho.norm_l2();
            let mut expected = rho.clone();
            if a1 % 2 == 1 {
                expected.scale(Complex64::new(-1.0, 0.0));
            }
            let f_err = symplectic_fourier(&rho, &opts)?.distance_l2(&expected)? / norm;
            let h = synthesize(&apply_h_sigma_coeff(&unit), &spec)?;
            let h_err = apply_h_sigma_grid(&rho, &opts)?.distance_l2(&h)? / h.norm_l2();
            let hb = synthesize(&apply_h_bar_sigma_coeff(&unit), &spec)?;
            let hb_err = apply_h_bar_sigma_grid(&rho, &opts)?.distance_l2(&hb)? / hb.norm_l2();
            rows.push(vec![
                a1.to_string(),
                a2.to_string(),
                fmt_f64(f_err),
                fmt_f64(h_err),
                fmt_f64(hb_err),
            ]);
        }
    }
    Ok(rows)
}

fn oracle_gaps(cfg: &RunConfig, spec: GridSpec) -> anyhow::Result<Vec<Vec<String>>> {
    let opts = cfg.grid_options();
    let line = spec.with_dims(1);
    let mut rows = Vec::new();
    let mut push = |name: &str, gap: f64, tol: f64| {
        rows.push(vec![name.to_string(), fmt_f64(gap), fmt_f64(tol)]);
    };

    // Wigner of sampled Hermite functions against the closed form
    let hs: Vec<GridFunction> = (0..=WONG_ORDER)
        .map(|k| {
            GridFunction::from_fn(line, |x| {
                Complex64::new(hermite_eval(k as i64, x[0]).unwrap_or(0.0), 0.0)
            })
        })
        .collect();
    let mut gap: f64 = 0.0;
    for a1 in 0..=WONG_ORDER {
        for a2 in 0..=WONG_ORDER {
            let mut w = wigner(&hs[a1], &hs[a2], &opts)?;
            if a1 % 2 == 1 {
                w.scale(Complex64::new(-1.0, 0.0));
            }
            gap = gap.max(w.max_abs_diff(&hermite_wong_eval(&PairIndex::scalar(a1, a2), &spec)?)?);
        }
    }
    push("wigner_vs_closed_form", gap, 1e-6);

    let c = sample_coeffs(cfg.seed, EIGEN_ORDER);
    let a = synthesize(&c, &spec)?;
    let ff = symplectic_fourier(&symplectic_fourier(&a, &opts)?, &opts)?;
    push("fsigma_involution", ff.distance_l2(&a)? / a.norm_l2(), 1e-8);

    let from_grid = kernel_map_a_grid(&a, &opts)?;
    let from_coeff = kernel_map_a_coeff(&c).synthesize_kernel(&spec)?;
    push("kernel_grid_vs_coeff", from_grid.max_abs_diff(&from_coeff)?, 1e-6);
    push(
        "kernel_unitarity",
        (from_grid.norm_l2() / a.norm_l2() - 1.0).abs(),
        1e-6,
    );

    // direct quadrature of the twisted product on a small odd grid
    let small = GridSpec::new(2, 6.0, 49)?;
    let mut gap: f64 = 0.0;
    for (x, y) in [((0, 1), (1, 2)), ((2, 0), (0, 2)), ((1, 1), (2, 0))] {
        let ua = WongCoeffMatrix::unit(1, 3, &PairIndex::scalar(x.0, x.1))?;
        let ub = WongCoeffMatrix::unit(1, 3, &PairIndex::scalar(y.0, y.1))?;
        let grid = twisted_convolution_grid(&synthesize(&ua, &small)?, &synthesize(&ub, &small)?, &opts)?;
        let coeff = synthesize(&twisted_convolution_coeff(&ua, &ub)?, &small)?;
        gap = gap.max(grid.max_abs_diff(&coeff)?);
    }
    push("twisted_grid_vs_coeff", gap, 1e-8);

    let b = sample_coeffs(cfg.seed.wrapping_add(1), EIGEN_ORDER);
    let lhs = weyl_quantize(&weyl_product(&c, &b)?);
    let rhs = weyl_quantize(&c) * weyl_quantize(&b);
    push("weyl_homomorphism", (&lhs - &rhs).norm() / rhs.norm(), 1e-12);

    let fs: Vec<HermiteCoeffVector> = (0..3u64)
        .map(|k| {
            let col = sample_coeffs(cfg.seed.wrapping_add(10 + k), 12);
            HermiteCoeffVector::from_coeffs(1, 12, col.matrix().column(0).iter().copied().collect())
        })
        .collect::<twc::Result<_>>()?;
    let t = trace_identity_check(&fs, cfg.big_n_max)?;
    push("trace_identity", t.relative_gap, 1e-10);
    Ok(rows)
}

fn growth_fits(cfg: &RunConfig) -> anyhow::Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    for s in GROWTH_ORDERS {
        for k in 0..SEEDS_PER_ORDER {
            let mut theorem = theorem_config(cfg);
            theorem.planted_s = s;
            theorem.seed = cfg.seed.wrapping_add(k);
            let r = verify_regularity_theorem(&theorem)?;
            rows.push(vec![
                fmt_f64(s),
                theorem.seed.to_string(),
                fmt_opt(r.planted_r),
                fmt_opt(r.fitted_s_growth),
                fmt_opt(r.fitted_s_decay),
                fmt_opt(r.fitted_ln_h),
                fmt_opt(r.residuals.growth_rms),
                fmt_opt(r.residuals.decay_rms),
                r.pass.to_string(),
            ]);
        }
    }
    Ok(rows)
}

pub const FILES: [&str; 5] = [
    "hermite_orthonormality.csv",
    "wong_orthonormality.csv",
    "eigen_residuals.csv",
    "oracle_gaps.csv",
    "growth_fits.csv",
];

pub fn tables(cfg: &RunConfig, dir: &Path) -> anyhow::Result<bool> {
    std::fs::create_dir_all(dir)?;
    let spec = cfg.grid(2)?;
    write_csv(
        &dir.join(FILES[0]),
        &["i", "j", "inner", "residual"],
        &hermite_orthonormality()?,
        cfg,
    )?;
    write_csv(
        &dir.join(FILES[1]),
        &["a1", "a2", "b1", "b2", "residual"],
        &wong_orthonormality(spec)?,
        cfg,
    )?;
    write_csv(
        &dir.join(FILES[2]),
        &["a1", "a2", "fsigma_rel_err", "h_sigma_rel_err", "h_bar_sigma_rel_err"],
        &eigen_residuals(cfg, spec)?,
        cfg,
    )?;
    write_csv(
        &dir.join(FILES[3]),
        &["check", "gap", "tolerance"],
        &oracle_gaps(cfg, spec)?,
        cfg,
    )?;
    write_csv(
        &dir.join(FILES[4]),
        &[
            "planted_s",
            "seed",
            "planted_r",
            "fitted_s_growth",
            "fitted_s_decay",
            "fitted_ln_h",
            "growth_rms",
            "decay_rms",
            "pass",
        ],
        &growth_fits(cfg)?,
        cfg,
    )?;
    Ok(true)
}
