use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use symplt::error::Error;
use symplt::experiments::{run_config_rows, write_outputs, RunConfig, TableFormat};
use symplt::factor::{factor_w1, factor_w2, Algorithm};
use symplt::generators::{generate, Family, GeneratorDescriptor};
use symplt::matrix::Matrix;
use symplt::symplectic::{symplecticity_defect, BlockView, DEFAULT_TOL};

#[derive(Parser)]
#[command(
    name = "symplt",
    version,
    about = "Symplectic LL^T factorization toolkit: factor, check, generate, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a matrix read from CSV; writes the three factor blocks as
    /// CSV files next to the input and optionally a JSON report.
    Factor {
        /// Input matrix (CSV, one row per line, no header)
        #[arg(long)]
        input: PathBuf,
        /// Algorithm: w1 (inverse of the Cholesky factor) or w2
        /// (Reverse Cholesky of the Schur complement)
        #[arg(long)]
        algorithm: Algorithm,
        /// Write a JSON report {dec, delta_l, symp_l, f11_norm, f12_norm,
        /// kappa_a, kappa_a11} to this path
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the symplecticity diagnostics of a matrix. Exit code 0 iff
    /// the matrix is symplectic at tolerance 1e-10.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a test matrix and write it as CSV.
    Gen {
        /// Family: s_of_t | gener_symp2 | lemma4 | spectrum | perturbed
        #[arg(long)]
        family: String,
        /// JSON parameters, e.g. '{"n":5,"s":3.0,"seed":0}'. `lemma4`
        /// takes the block size n and builds a 2n x 2n matrix; pass
        /// "swap_roles":true to exchange the two deterministic blocks.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one of the five experiment sweeps and write its table.
    Experiment {
        /// Experiment id 1..=5
        #[arg(long)]
        id: u8,
        /// Master seed for the random families (experiments 3 and 5)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest block size of the size sweep (experiment 5); even
        #[arg(long = "n-max", default_value_t = 250)]
        n_max: usize,
        /// Output format: markdown | csv | json
        #[arg(long, default_value = "markdown")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// JSON report of one factorization, stable field names.
#[derive(Serialize)]
struct FactorReport {
    dec: f64,
    delta_l: f64,
    symp_l: f64,
    f11_norm: f64,
    f12_norm: f64,
    kappa_a: f64,
    kappa_a11: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GenParams {
    family: Option<Family>,
    n: Option<usize>,
    s: Option<f64>,
    t: Option<f64>,
    seed: Option<u64>,
    swap_roles: Option<bool>,
}

fn block_path(input: &Path, block: &str) -> PathBuf {
    input.with_extension(format!("{block}.csv"))
}

fn cmd_factor(
    input: &Path,
    algorithm: Algorithm,
    report: Option<&Path>,
) -> Result<(), Error> {
    let a = Matrix::read_csv(input)?;
    let out = match algorithm {
        Algorithm::W1 => factor_w1(&a)?,
        Algorithm::W2 => factor_w2(&a)?,
    };

    let paths = [
        (block_path(input, "l11"), out.factor.l11().matrix().clone()),
        (block_path(input, "l21"), out.factor.l21().clone()),
        (block_path(input, "l22"), out.factor.l22().matrix().clone()),
    ];
    for (path, m) in &paths {
        m.write_csv(path)?;
    }

    let norm_l = out.factor.assemble().two_norm().value;
    let view = BlockView::split(&a)?;
    let report_data = FactorReport {
        dec: out.dec,
        delta_l: out.residual.delta_l,
        symp_l: out.residual.delta_l / (norm_l * norm_l),
        f11_norm: out.residual.f11_norm,
        f12_norm: out.residual.f12_norm,
        kappa_a: a.condition_number()?,
        kappa_a11: view.a11.condition_number()?,
    };
    if let Some(path) = report {
        let mut text = serde_json::to_string_pretty(&report_data).expect("serializable");
        text.push('\n');
        std::fs::write(path, text)?;
    }

    println!(
        "factored {} ({}x{}) with {algorithm}: dec = {:.4e}, delta_l = {:.4e}",
        input.display(),
        a.rows(),
        a.cols(),
        out.dec,
        out.residual.delta_l
    );
    for (path, _) in &paths {
        println!("wrote {}", path.display());
    }
    if let Some(path) = report {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_check(input: &Path) -> Result<bool, Error> {
    let a = Matrix::read_csv(input)?;
    let defect = symplecticity_defect(&a)?;
    let symplectic = defect.delta <= DEFAULT_TOL;
    println!("Delta(A)  = {:.16e}", defect.delta);
    println!("sympA     = {:.16e}", defect.symp_rel);
    println!("||A||_2   = {:.16e}", defect.norm_x);
    match a.condition_number() {
        Ok(kappa) => println!("kappa_2(A) = {kappa:.16e}"),
        Err(Error::Singular { .. }) => println!("kappa_2(A) = n/a (singular)"),
        Err(e) => return Err(e),
    }
    println!(
        "symplectic at tol {DEFAULT_TOL:e}: {}",
        if symplectic { "yes" } else { "no" }
    );
    Ok(symplectic)
}

fn cmd_gen(family: &str, params: Option<&str>, out: &Path) -> Result<(), Error> {
    let family: Family = family.parse()?;
    let params: GenParams = match params {
        Some(text) => serde_json::from_str(text)
            .map_err(|e| Error::Descriptor(format!("bad --params JSON: {e}")))?,
        None => GenParams::default(),
    };
    if let Some(inner) = params.family {
        if inner != family {
            return Err(Error::Descriptor(
                "--params names a different family than --family".into(),
            ));
        }
    }
    let desc = GeneratorDescriptor {
        family,
        n: params.n,
        s: params.s,
        t: params.t,
        seed: params.seed,
        swap_roles: params.swap_roles,
    };
    let m = generate(&desc)?;
    m.write_csv(out)?;
    println!(
        "wrote {} ({}x{}) from descriptor {}",
        out.display(),
        m.rows(),
        m.cols(),
        serde_json::to_string(&desc).expect("serializable")
    );
    Ok(())
}

fn cmd_experiment(
    id: u8,
    seed: u64,
    n_max: usize,
    format: &str,
    out: &Path,
) -> Result<(), Error> {
    let cfg = RunConfig {
        id,
        seed,
        n_max,
        format: format.parse::<TableFormat>()?,
        out: out.to_path_buf(),
    };
    let start = Instant::now();
    let rows = run_config_rows(&cfg)?;
    let written = write_outputs(&cfg, &rows)?;
    let failed = rows.iter().filter(|r| r.stats().is_none()).count();
    eprintln!(
        "experiment {id}: {} rows ({failed} failed) in {:.2} s",
        rows.len(),
        start.elapsed().as_secs_f64()
    );
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Factor {
            input,
            algorithm,
            report,
        } => cmd_factor(input, *algorithm, report.as_deref()).map(|()| true),
        Command::Check { input } => cmd_check(input),
        Command::Gen {
            family,
            params,
            out,
        } => cmd_gen(family, params.as_deref(), out).map(|()| true),
        Command::Experiment {
            id,
            seed,
            n_max,
            format,
            out,
        } => cmd_experiment(*id, *seed, *n_max, format, out).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
