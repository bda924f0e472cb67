//! Experiment sweeps, their statistics tables and figure data series.
//!
//! Five sweeps mirror the reference experiments:
//!
//! 1. the hyperbolic family `A = S(t)^T S(t)`,
//! 2. its inverse family,
//! 3. a random symplectic matrix plus a growing Hilbert perturbation,
//! 4. the deterministic beta/Hilbert construction,
//! 5. a size sweep of random-spectrum symplectic matrices.
//!
//! Every row reports the same thirteen statistics. Rows are independent:
//! a factorization failure marks its row failed and the sweep continues.
//! Random rows derive their stream from (master seed, row index), so rows
//! may be computed in parallel without changing any value and re-running a
//! sweep with equal configuration reproduces output files byte for byte.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{factor_w1, factor_w2};
use crate::generators::{
    beta_matrix, gener_symp2, hilbert, lemma4_construct, random_spectrum_symplectic, s_of_t,
    RngStream,
};
use crate::matrix::Matrix;
use crate::symplectic::{symplecticity_defect, BlockView};

/// One row of a statistics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentStats {
    pub label: String,
    pub kappa_a: f64,
    pub kappa_a11: f64,
    pub dec_w1: f64,
    pub dec_w2: f64,
    pub symp_a: f64,
    pub symp_l_w1: f64,
    pub symp_l_w2: f64,
    pub delta_a: f64,
    pub delta_l_w1: f64,
    pub delta_l_w2: f64,
    pub f11_norm: f64,
    pub f12_w1: f64,
    pub f12_w2: f64,
}

/// Row outcome: statistics, or a recorded failure that left the sweep
/// running.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentRow {
    Stats(ExperimentStats),
    Failed { label: String, reason: String },
}

impl ExperimentRow {
    pub fn label(&self) -> &str {
        match self {
            ExperimentRow::Stats(s) => &s.label,
            ExperimentRow::Failed { label, .. } => label,
        }
    }

    pub fn stats(&self) -> Option<&ExperimentStats> {
        match self {
            ExperimentRow::Stats(s) => Some(s),
            ExperimentRow::Failed { .. } => None,
        }
    }
}

/// Output format of `emit_table`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::ParamOutOfRange(format!(
                "unknown format {other:?}, expected markdown, csv or json"
            ))),
        }
    }
}

/// All thirteen statistics for one input matrix.
///
/// Both algorithms run on the same input; their shared block `F11` is
/// computed once per algorithm and is bit-identical between the two, so a
/// single field carries it.
pub fn compute_stats(label: &str, a: &Matrix) -> Result<ExperimentStats> {
    let kappa_a = a.condition_number()?;
    let view = BlockView::split(a)?;
    let kappa_a11 = view.a11.condition_number()?;
    let defect_a = symplecticity_defect(a)?;

    let w1 = factor_w1(a)?;
    let w2 = factor_w2(a)?;
    debug_assert_eq!(
        w1.residual.f11_norm.to_bits(),
        w2.residual.f11_norm.to_bits()
    );

    let norm_l_w1 = w1.factor.assemble().two_norm().value;
    let norm_l_w2 = w2.factor.assemble().two_norm().value;

    Ok(ExperimentStats {
        label: label.to_string(),
        kappa_a,
        kappa_a11,
        dec_w1: w1.dec,
        dec_w2: w2.dec,
        symp_a: defect_a.symp_rel,
        symp_l_w1: w1.residual.delta_l / (norm_l_w1 * norm_l_w1),
        symp_l_w2: w2.residual.delta_l / (norm_l_w2 * norm_l_w2),
        delta_a: defect_a.delta,
        delta_l_w1: w1.residual.delta_l,
        delta_l_w2: w2.residual.delta_l,
        f11_norm: w1.residual.f11_norm,
        f12_w1: w1.residual.f12_norm,
        f12_w2: w2.residual.f12_norm,
    })
}

fn row_for(label: &str, a: &Matrix) -> ExperimentRow {
    match compute_stats(label, a) {
        Ok(stats) => ExperimentRow::Stats(stats),
        Err(e) => ExperimentRow::Failed {
            label: label.to_string(),
            reason: e.to_string(),
        },
    }
}

/// Default `t` grid for the hyperbolic sweeps: pi, 3pi/2, 2pi, 5pi/2.
pub fn default_t_grid() -> Vec<f64> {
    let pi = std::f64::consts::PI;
    vec![pi, 1.5 * pi, 2.0 * pi, 2.5 * pi]
}

/// Human label for a grid point; multiples of pi/2 print symbolically.
pub fn t_label(t: f64) -> String {
    if t == 0.0 {
        return "t=0".into();
    }
    let halves = t / std::f64::consts::FRAC_PI_2;
    let k = halves.round();
    if k != 0.0 && (halves - k).abs() <= 1e-9 {
        let k = k as i64;
        return match k {
            2 => "t=pi".into(),
            -2 => "t=-pi".into(),
            _ if k % 2 == 0 => format!("t={}pi", k / 2),
            _ => format!("t={k}pi/2"),
        };
    }
    format!("t={t}")
}

/// Hyperbolic family `A = S(t)^T S(t)` over the given grid.
pub fn run_example1(t_values: &[f64]) -> Vec<ExperimentRow> {
    t_values
        .iter()
        .map(|&t| {
            let label = t_label(t);
            match s_of_t(t) {
                Ok(s) => {
                    let a = s.transpose().matmul(&s).expect("conformal");
                    row_for(&label, &a)
                }
                Err(e) => ExperimentRow::Failed {
                    label,
                    reason: e.to_string(),
                },
            }
        })
        .collect()
}

/// How the inverse family is inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseRoute {
    /// LU solve against the identity, then symmetrize. The default.
    LuSolve,
    /// The exact symplectic-inverse formula `J^T A^T J`, then symmetrize.
    SymplecticTranspose,
}

/// Inverse family `A = (S(t)^T S(t))^{-1}` via the chosen route.
pub fn run_example2_via(t_values: &[f64], route: InverseRoute) -> Vec<ExperimentRow> {
    t_values
        .iter()
        .map(|&t| {
            let label = t_label(t);
            let inverted = s_of_t(t).and_then(|s| {
                let a = s.transpose().matmul(&s)?;
                let inv = match route {
                    InverseRoute::LuSolve => a.lu_solve(&Matrix::identity(a.rows()))?,
                    InverseRoute::SymplecticTranspose => crate::symplectic::symplectic_inverse(&a)?,
                };
                Ok(inv.symmetrize())
            });
            match inverted {
                Ok(a) => row_for(&label, &a),
                Err(e) => ExperimentRow::Failed {
                    label,
                    reason: e.to_string(),
                },
            }
        })
        .collect()
}

/// Inverse family via the default LU route.
pub fn run_example2(t_values: &[f64]) -> Vec<ExperimentRow> {
    run_example2_via(t_values, InverseRoute::LuSolve)
}

/// Perturbation sweep: one random base matrix `gener_symp2(n, s)` shared by
/// every row (matching a generator state reset before each use), plus
/// `t * hilbert(2n)` per row.
pub fn run_example3(n: usize, s: f64, t_values: &[f64], seed: u64) -> Vec<ExperimentRow> {
    let mut rng = RngStream::new(seed);
    let base = gener_symp2(n, s, &mut rng);
    let h = hilbert(2 * n);
    t_values
        .iter()
        .map(|&t| {
            let label = t_label(t);
            let a = if t == 0.0 {
                base.clone()
            } else {
                base.add(&h.scale(t))
            };
            row_for(&label, &a)
        })
        .collect()
}

/// Deterministic beta/Hilbert construction. `dims` are full matrix
/// dimensions; each row builds its blocks at size `dim / 2`.
pub fn run_example4(dims: &[usize]) -> Vec<ExperimentRow> {
    dims.iter()
        .map(|&dim| {
            let label = format!("n={dim}");
            if dim < 2 || dim % 2 != 0 {
                return ExperimentRow::Failed {
                    label,
                    reason: format!("dimension {dim} is not an even size >= 2"),
                };
            }
            let m = dim / 2;
            match beta_matrix(m).and_then(|b| lemma4_construct(&b, &hilbert(m))) {
                Ok(a) => row_for(&label, &a),
                Err(e) => ExperimentRow::Failed {
                    label,
                    reason: e.to_string(),
                },
            }
        })
        .collect()
}

/// Size sweep of random-spectrum symplectic matrices, block sizes
/// `n = 2, 4, ..., n_max`. Each row owns a stream derived from
/// (seed, row index).
pub fn run_example5(n_max: usize, seed: u64) -> Vec<ExperimentRow> {
    assert!(n_max >= 2 && n_max % 2 == 0, "n_max must be even and >= 2");
    (0..)
        .map(|row| (row, 2 * (row + 1)))
        .take_while(|&(_, n)| n <= n_max)
        .map(|(row, n)| {
            let mut rng = RngStream::derived(seed, row as u64);
            let a = random_spectrum_symplectic(n, &mut rng);
            row_for(&format!("n={n}"), &a)
        })
        .collect()
}

/// Names and accessors for the thirteen statistics, in table order.
const STATISTICS: [(&str, fn(&ExperimentStats) -> f64); 13] = [
    ("kappa_a", |s| s.kappa_a),
    ("kappa_a11", |s| s.kappa_a11),
    ("dec_w1", |s| s.dec_w1),
    ("dec_w2", |s| s.dec_w2),
    ("symp_a", |s| s.symp_a),
    ("symp_l_w1", |s| s.symp_l_w1),
    ("symp_l_w2", |s| s.symp_l_w2),
    ("delta_a", |s| s.delta_a),
    ("delta_l_w1", |s| s.delta_l_w1),
    ("delta_l_w2", |s| s.delta_l_w2),
    ("f11_norm", |s| s.f11_norm),
    ("f12_w1", |s| s.f12_w1),
    ("f12_w2", |s| s.f12_w2),
];

/// Display labels used for the markdown rendering, mirroring the reference
/// table row names.
const MARKDOWN_LABELS: [&str; 13] = [
    "κ₂(A)",
    "κ₂(A₁₁)",
    "dec_W1",
    "dec_W2",
    "sympA",
    "sympL_W1",
    "sympL_W2",
    "Δ(A)",
    "ΔL_W1",
    "ΔL_W2",
    "‖F₁₁‖",
    "‖F₁₂‖ from W1",
    "‖F₁₂‖ from W2",
];

/// Scientific notation with five significant digits and a signed
/// two-digit exponent: `4.4738e+05`, `1.2107e-11`, `0.0000e+00`.
pub fn sci5(x: f64) -> String {
    if x == 0.0 {
        return "0.0000e+00".into();
    }
    let s = format!("{x:.4e}");
    match s.split_once('e') {
        Some((mant, exp)) => {
            let e: i32 = exp.parse().unwrap_or(0);
            let sign = if e < 0 { '-' } else { '+' };
            format!("{mant}e{sign}{:02}", e.abs())
        }
        None => s,
    }
}

/// Renders rows in the chosen format.
///
/// Markdown mirrors the reference layout: statistics as rows, experiment
/// labels as columns, five significant digits. CSV keeps one statistic per
/// column at full precision (17 significant digits, exact round trip);
/// failed rows become `#`-comment lines. JSON is an array of row objects.
pub fn emit_table(rows: &[ExperimentRow], format: TableFormat) -> String {
    assert!(!rows.is_empty(), "cannot render an empty table");
    match format {
        TableFormat::Markdown => {
            let mut out = String::from("| statistic |");
            for row in rows {
                out.push_str(&format!(" {} |", row.label()));
            }
            out.push('\n');
            out.push_str("|---|");
            for _ in rows {
                out.push_str("---|");
            }
            out.push('\n');
            for (idx, (_, get)) in STATISTICS.iter().enumerate() {
                out.push_str(&format!("| {} |", MARKDOWN_LABELS[idx]));
                for row in rows {
                    match row.stats() {
                        Some(s) => out.push_str(&format!(" {} |", sci5(get(s)))),
                        None => out.push_str(" failed |"),
                    }
                }
                out.push('\n');
            }
            for row in rows {
                if let ExperimentRow::Failed { label, reason } = row {
                    out.push_str(&format!("\n`{label}` failed: {reason}\n"));
                }
            }
            out
        }
        TableFormat::Csv => {
            let mut out = String::from("label");
            for (name, _) in STATISTICS.iter() {
                out.push(',');
                out.push_str(name);
            }
            out.push('\n');
            for row in rows {
                match row {
                    ExperimentRow::Stats(s) => {
                        out.push_str(&s.label);
                        for (_, get) in STATISTICS.iter() {
                            out.push_str(&format!(",{:.16e}", get(s)));
                        }
                        out.push('\n');
                    }
                    ExperimentRow::Failed { label, reason } => {
                        out.push_str(&format!("# failed {label}: {reason}\n"));
                    }
                }
            }
            out
        }
        TableFormat::Json => {
            let values: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| match row {
                    ExperimentRow::Stats(s) => serde_json::to_value(s).expect("serializable"),
                    ExperimentRow::Failed { label, reason } => serde_json::json!({
                        "label": label,
                        "failed": reason,
                    }),
                })
                .collect();
            let mut text =
                serde_json::to_string_pretty(&values).expect("serializable");
            text.push('\n');
            text
        }
    }
}

/// Parses the CSV produced by `emit_table`, skipping comment lines.
pub fn parse_table_csv(text: &str) -> Result<Vec<ExperimentStats>> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 0,
            msg: "empty table".into(),
        })?
        .1;
    let expected_fields = STATISTICS.len() + 1;
    if header.split(',').count() != expected_fields {
        return Err(Error::Parse {
            line: 1,
            msg: "unexpected header".into(),
        });
    }
    let mut out = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_fields {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected {expected_fields} fields, found {}", fields.len()),
            });
        }
        let mut values = [0.0; 13];
        for (slot, field) in values.iter_mut().zip(&fields[1..]) {
            *slot = field.parse().map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: format!("bad float {field:?}: {e}"),
            })?;
        }
        out.push(ExperimentStats {
            label: fields[0].to_string(),
            kappa_a: values[0],
            kappa_a11: values[1],
            dec_w1: values[2],
            dec_w2: values[3],
            symp_a: values[4],
            symp_l_w1: values[5],
            symp_l_w2: values[6],
            delta_a: values[7],
            delta_l_w1: values[8],
            delta_l_w2: values[9],
            f11_norm: values[10],
            f12_w1: values[11],
            f12_w2: values[12],
        });
    }
    Ok(out)
}

/// Figure data series for the size sweep: per panel, one CSV with the row
/// size as x and the plotted statistics as columns. Failed rows are
/// omitted.
pub fn figure_series(rows: &[ExperimentRow]) -> Vec<(String, String)> {
    let panels: [(&str, &[&str]); 6] = [
        ("fig1a", &["kappa_a"]),
        ("fig1b", &["dec_w1", "dec_w2"]),
        ("fig2a", &["symp_a"]),
        ("fig2b", &["symp_l_w1", "symp_l_w2"]),
        ("fig3a", &["delta_a"]),
        ("fig3b", &["delta_l_w1", "delta_l_w2"]),
    ];
    panels
        .iter()
        .map(|(panel, stats)| {
            let mut text = String::from("n");
            for name in *stats {
                text.push(',');
                text.push_str(name);
            }
            text.push('\n');
            for row in rows {
                let Some(s) = row.stats() else { continue };
                let Some(n) = s.label.strip_prefix("n=") else {
                    continue;
                };
                text.push_str(n);
                for name in *stats {
                    let (_, get) = STATISTICS
                        .iter()
                        .find(|(sname, _)| sname == name)
                        .expect("statistic name");
                    text.push_str(&format!(",{:.16e}", get(s)));
                }
                text.push('\n');
            }
            (panel.to_string(), text)
        })
        .collect()
}

/// One experiment invocation: which sweep, its seed and size cap, and
/// where and how to write the table.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub id: u8,
    pub seed: u64,
    pub n_max: usize,
    pub format: TableFormat,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.id) {
            return Err(Error::ParamOutOfRange(format!(
                "experiment id {} outside 1..=5",
                self.id
            )));
        }
        if self.id == 5 && (self.n_max < 2 || self.n_max % 2 != 0) {
            return Err(Error::ParamOutOfRange(format!(
                "n_max {} must be even and >= 2",
                self.n_max
            )));
        }
        Ok(())
    }
}

/// Runs the configured sweep and returns its rows.
pub fn run_config_rows(cfg: &RunConfig) -> Result<Vec<ExperimentRow>> {
    cfg.validate()?;
    Ok(match cfg.id {
        1 => run_example1(&default_t_grid()),
        2 => run_example2(&default_t_grid()),
        3 => run_example3(5, 3.0, &[0.0, 1e-6, 0.5, 1.0], cfg.seed),
        4 => run_example4(&[10, 16, 20, 24]),
        5 => run_example5(cfg.n_max, cfg.seed),
        _ => unreachable!(),
    })
}

/// Writes the table (and, for the size sweep, one CSV per figure panel
/// next to the table path: `<stem>.fig1a.csv` and so on).
pub fn write_outputs(cfg: &RunConfig, rows: &[ExperimentRow]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    std::fs::write(&cfg.out, emit_table(rows, cfg.format))?;
    written.push(cfg.out.clone());
    if cfg.id == 5 {
        for (panel, text) in figure_series(rows) {
            let path = sibling_with_suffix(&cfg.out, &panel);
            std::fs::write(&path, text)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// `dir/stem.<suffix>.csv` next to `path`.
fn sibling_with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let name = format!("{stem}.{suffix}.csv");
    path.with_file_name(name)
}
