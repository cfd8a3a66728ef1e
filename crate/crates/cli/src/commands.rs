use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde_json::{json, Value};

use twc::oscillators::{apply_h_bar_sigma_coeff, apply_h_bar_sigma_grid, apply_h_sigma_coeff, apply_h_sigma_grid};
use twc::phase_space::{kernel_map_a_grid, symplectic_fourier};
use twc::positivity::DEFAULT_PSD_TOL;
use twc::regularity::{check_regularity_with, classify_decay, verify_weyl_positive, RegularityReport};
use twc::twisted::{
    expand, kernel_map_a_coeff, symplectic_fourier_coeff, synthesize, twisted_convolution_coeff, DEFAULT_TAIL_TOL,
};
use twc::{is_positive_twisted, random_positive_element, GridFunction, Positivity, TheoremConfig, WongCoeffMatrix};

use crate::config::{ModeArg, RunConfig, TransformOp};
use crate::output::{fmt_f64, is_json, read_grid, read_matrix, write_csv, write_grid, write_json};

/// Planted element parameters from the run flags.
pub fn theorem_config(cfg: &RunConfig) -> TheoremConfig {
    TheoremConfig {
        d: cfg.d,
        n_max: cfg.n_max,
        big_n_max: cfg.big_n_max,
        rank: cfg.rank,
        planted_s: cfg.planted_s.unwrap_or(0.5),
        planted_r: cfg.planted_r,
        seed: cfg.seed,
        tolerance: cfg.tol,
    }
}

pub fn gen(cfg: &RunConfig) -> anyhow::Result<bool> {
    let spec = theorem_config(cfg).planted_spec();
    let element = random_positive_element(&spec)?;
    let mut doc = element.matrix.to_json();
    doc["generators"] = Value::Array(element.generators.iter().map(|g| g.to_json()).collect());
    doc["planted"] = serde_json::to_value(spec)?;
    write_json(cfg.output.as_deref(), doc, cfg)?;
    Ok(true)
}

pub fn compose(cfg: &RunConfig) -> anyhow::Result<bool> {
    let a = read_matrix(&cfg.inputs[0])?;
    let b = read_matrix(&cfg.inputs[1])?;
    let c = twisted_convolution_coeff(&a, &b)?;
    write_json(cfg.output.as_deref(), c.to_json(), cfg)?;
    Ok(true)
}

/// `report.json` → `report.growth.csv`, next to the report.
fn growth_csv_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.growth.csv"))
}

pub fn verify(cfg: &RunConfig, weyl: bool) -> anyhow::Result<bool> {
    let grid = cfg.grid(2 * cfg.d)?;
    let report: RegularityReport = if weyl {
        if cfg.mode == ModeArg::Sup {
            bail!("--mode sup is not available for Weyl symbols");
        }
        let symbol = read_matrix(&cfg.inputs[0])?;
        verify_weyl_positive(&symbol, cfg.big_n_max, cfg.planted_s, cfg.tol)?
    } else if let Some(path) = cfg.inputs.first() {
        let c = read_matrix(path)?;
        check_regularity_with(
            &c,
            cfg.big_n_max,
            cfg.planted_s,
            cfg.tol,
            cfg.growth_mode(),
            Some(&grid),
        )?
    } else {
        let theorem = theorem_config(cfg);
        let spec = theorem.planted_spec();
        let element = random_positive_element(&spec)?;
        let mut r = check_regularity_with(
            &element.matrix,
            cfg.big_n_max,
            Some(theorem.planted_s),
            cfg.tol,
            cfg.growth_mode(),
            Some(&grid),
        )?;
        r.seed = Some(cfg.seed);
        r.rank = Some(cfg.rank);
        r.planted_r = Some(spec.planted_r);
        r
    };
    if let Some(out) = &cfg.output {
        let rows: Vec<Vec<String>> = report
            .growth_values_log
            .iter()
            .enumerate()
            .map(|(n, v)| vec![n.to_string(), fmt_f64(*v)])
            .collect();
        write_csv(&growth_csv_path(out), &["N", "log_g_N"], &rows, cfg)?;
    }
    write_json(cfg.output.as_deref(), serde_json::to_value(&report)?, cfg)?;
    Ok(report.pass)
}

fn positivity_json(p: &Positivity) -> Value {
    let witness = p.witness().map(|w| {
        json!({
            "kind": w.kind,
            "pairing_re": w.pairing.re,
            "pairing_im": w.pairing.im,
            "vector": w.vector.to_json(),
        })
    });
    json!({
        "positive": p.is_positive(),
        "min_eigenvalue": p.min_eigenvalue(),
        "witness": witness,
    })
}

pub fn classify(cfg: &RunConfig) -> anyhow::Result<bool> {
    let c = read_matrix(&cfg.inputs[0])?;
    let positivity = is_positive_twisted(&c, DEFAULT_PSD_TOL)?;
    let doc = json!({
        "d": c.d(),
        "n_max": c.n_max(),
        "positivity": positivity_json(&positivity),
        "decay": classify_decay(&c),
    });
    write_json(cfg.output.as_deref(), doc, cfg)?;
    Ok(true)
}

enum Field {
    Coeff(WongCoeffMatrix),
    Grid(GridFunction),
}

pub fn transform(cfg: &RunConfig, op: TransformOp) -> anyhow::Result<bool> {
    let input = &cfg.inputs[0];
    let field = if is_json(input) {
        Field::Coeff(read_matrix(input)?)
    } else {
        Field::Grid(read_grid(input)?)
    };
    let opts = cfg.grid_options();
    let result = match (op, field) {
        (TransformOp::Synthesize, Field::Coeff(c)) => Field::Grid(synthesize(&c, &cfg.grid(2 * c.d())?)?),
        (TransformOp::Expand, Field::Grid(g)) => Field::Coeff(expand(&g, cfg.n_max, DEFAULT_TAIL_TOL)?),
        (TransformOp::Fsigma, Field::Coeff(c)) => Field::Coeff(symplectic_fourier_coeff(&c)),
        (TransformOp::Fsigma, Field::Grid(g)) => Field::Grid(symplectic_fourier(&g, &opts)?),
        (TransformOp::Kernel, Field::Coeff(c)) => {
            Field::Grid(kernel_map_a_coeff(&c).synthesize_kernel(&cfg.grid(2 * c.d())?)?)
        }
        (TransformOp::Kernel, Field::Grid(g)) => Field::Grid(kernel_map_a_grid(&g, &opts)?),
        (TransformOp::HSigma, Field::Coeff(c)) => Field::Coeff(apply_h_sigma_coeff(&c)),
        (TransformOp::HSigma, Field::Grid(g)) => Field::Grid(apply_h_sigma_grid(&g, &opts)?),
        (TransformOp::HBarSigma, Field::Coeff(c)) => Field::Coeff(apply_h_bar_sigma_coeff(&c)),
        (TransformOp::HBarSigma, Field::Grid(g)) => Field::Grid(apply_h_bar_sigma_grid(&g, &opts)?),
        (TransformOp::Synthesize, Field::Grid(_)) => bail!("synthesize takes a coefficient (.json) file"),
        (TransformOp::Expand, Field::Coeff(_)) => bail!("expand takes a grid file"),
    };
    let out = cfg.output.as_deref().context("transform needs --out")?;
    match result {
        Field::Coeff(c) => write_json(Some(out), c.to_json(), cfg)?,
        Field::Grid(g) => write_grid(out, &g, cfg)?,
    }
    Ok(true)
}
