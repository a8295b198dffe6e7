//! The `tnl` command line.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails, 1 on any
//! error (including usage errors).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

use super::{run, write_atomic, ExperimentConfig, Scenario};
use crate::ideal::{gamma2_star_with, gamma2_with, pi2_with, IdealOptions};
use crate::limits::{regularization_report_with, LimitOptions, Pair};
use crate::projective::projective_norm;
use crate::random::mc_eps_growth;
use crate::spaces::{operator_norm_with, OperatorMap, Space, SpaceDescriptor};
use crate::tensor::{hilbert_norm, injective_norm, DenseTensor};

#[derive(Parser, Debug)]
#[command(name = "tnl", version, about = "Tensor norms, operator ideal norms and tensor-power regularization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Injective, projective and (euclidean factors) Hilbertian norms of a tensor.
    Norms(NormsArgs),
    /// 2-summing norm of an operator.
    Pi2(OperatorArgs),
    /// Factorization norm through Hilbert space.
    Gamma2(OperatorArgs),
    /// 2-dominated norm (trace dual of γ₂).
    Gamma2star(OperatorArgs),
    /// Per-k bounds on ‖φ^⊗k‖^{1/k} against the single-letter target.
    Regularize(RegularizeArgs),
    /// Growth of injective norms of Gaussian tensors.
    Random(RandomArgs),
    /// Run a scripted study.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct OperatorArgs {
    /// Domain space, e.g. `linf:2`, `euclidean:3:complex` or a JSON descriptor.
    #[arg(long)]
    domain: String,
    /// Codomain space; defaults to the domain.
    #[arg(long)]
    codomain: Option<String>,
    /// `identity`, or rows separated by `;` with entries separated by `,`.
    #[arg(long, default_value = "identity")]
    op: String,
    /// Net resolution for curved balls.
    #[arg(long)]
    net_delta: Option<f64>,
}

#[derive(Args, Debug)]
struct NormsArgs {
    /// Factor space, repeated `order` times.
    #[arg(long)]
    space: String,
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Row-major coefficients separated by `,`; omit for a Gaussian tensor.
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct RegularizeArgs {
    #[arg(long, default_value = "epi")]
    pair: Pair,
    #[arg(long)]
    space: String,
    #[arg(long)]
    codomain: Option<String>,
    #[arg(long, default_value = "identity")]
    op: String,
    #[arg(long, default_value_t = 3)]
    kmax: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RandomArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    kmax: usize,
    #[arg(long, default_value_t = 8)]
    trials: usize,
    /// Defaults to `TNL_SEED`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// JSON config; the subcommand may be omitted when given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the record here (atomically).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    which: Option<ExperimentKind>,
}

#[derive(Subcommand, Debug)]
enum ExperimentKind {
    Identity {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
    },
    Radius {
        #[arg(long, default_value_t = 5)]
        m: usize,
    },
    HfpComplex {
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    HfpNonstrict,
    Ellipse {
        /// Vertices of K as `x,y;x,y;...`.
        #[arg(long)]
        k: String,
        /// Facet functionals of L as `a,b;a,b;...`.
        #[arg(long)]
        l: String,
        #[arg(long, default_value = "1,0;0,1")]
        t: String,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Norms(a) => norms(a),
        Command::Pi2(a) => ideal(a, "pi2"),
        Command::Gamma2(a) => ideal(a, "gamma2"),
        Command::Gamma2star(a) => ideal(a, "gamma2star"),
        Command::Regularize(a) => regularize(a),
        Command::Random(a) => random(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn env_seed(explicit: Option<u64>) -> anyhow::Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var("TNL_SEED") {
        Ok(v) => v.trim().parse().with_context(|| format!("TNL_SEED={v:?} is not an integer")),
        Err(_) => Ok(super::DEFAULT_SEED),
    }
}

fn space(text: &str) -> anyhow::Result<Space> {
    let desc: SpaceDescriptor = if Path::new(text).extension().is_some_and(|e| e == "json") {
        let raw = std::fs::read_to_string(text).with_context(|| format!("reading {text}"))?;
        serde_json::from_str(&raw).with_context(|| format!("parsing {text}"))?
    } else {
        text.parse()?
    };
    Ok(Space::new(desc)?)
}

fn parse_rows(text: &str) -> anyhow::Result<Vec<Vec<f64>>> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad number {x:?}")))
                .collect()
        })
        .collect()
}

fn operator(domain: &str, codomain: Option<&str>, op: &str) -> anyhow::Result<OperatorMap> {
    let x = space(domain)?;
    let y = match codomain {
        Some(c) => space(c)?,
        None => x.clone(),
    };
    if op == "identity" {
        if x.descriptor() != y.descriptor() {
            bail!("identity needs equal domain and codomain");
        }
        return Ok(OperatorMap::identity(x));
    }
    let rows = parse_rows(op)?;
    if x.is_complex() {
        let (m, n) = (rows.len(), rows.first().map_or(0, Vec::len));
        if rows.iter().any(|r| r.len() != n) {
            bail!("ragged matrix");
        }
        let c = DMatrix::from_fn(m, n, |i, j| Complex64::new(rows[i][j], 0.0));
        return Ok(OperatorMap::new_complex(x, y, c)?);
    }
    Ok(OperatorMap::from_rows(x, y, &rows)?)
}

fn print_json(v: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn norms(a: NormsArgs) -> anyhow::Result<bool> {
    let s = space(&a.space)?;
    let factors = vec![s.clone(); a.order];
    let z = match &a.data {
        Some(d) => {
            let data = parse_rows(d)?.concat();
            DenseTensor::new(factors, data)?
        }
        None => crate::random::gaussian_in(&s, a.order, env_seed(a.seed)?, 0)?.tensor,
    };
    let eps = injective_norm(&z)?;
    let pi = projective_norm(&z)?;
    let h = if s.is_euclidean() { Some(hilbert_norm(&z)?) } else { None };
    print_json(&json!({
        "injective": { "lower": eps.lower, "upper": eps.upper, "method": eps.method },
        "projective": { "lower": pi.lower, "upper": pi.upper, "method": pi.method },
        "hilbert": h,
    }))?;
    Ok(true)
}

fn ideal(a: OperatorArgs, which: &str) -> anyhow::Result<bool> {
    let phi = operator(&a.domain, a.codomain.as_deref(), &a.op)?;
    let opts = IdealOptions { net_delta: a.net_delta, ..IdealOptions::default() };
    let est = match which {
        "pi2" => pi2_with(&phi, &opts)?,
        "gamma2" => gamma2_with(&phi, &opts)?,
        _ => gamma2_star_with(&phi, &opts)?.estimate,
    };
    let norm = operator_norm_with(&phi, a.net_delta)?;
    print_json(&json!({
        "norm": which,
        "lower": est.lower,
        "upper": est.upper,
        "certificate": est.certificate,
        "method": est.method,
        "operator_norm": { "lower": norm.lower, "upper": norm.upper },
    }))?;
    Ok(true)
}

fn regularize(a: RegularizeArgs) -> anyhow::Result<bool> {
    let phi = operator(&a.space, a.codomain.as_deref(), &a.op)?;
    let opts = LimitOptions { seed: env_seed(a.seed)?, ..LimitOptions::default() };
    let report = regularization_report_with(&phi, a.kmax, a.pair, &opts)?;
    let csv = report.to_csv();
    match &a.out {
        Some(p) => write_atomic(p, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    let ok = report.rows.iter().all(|r| r.lower <= r.upper * (1.0 + 1e-9) + 1e-9)
        && report.rows.iter().all(|r| r.root_lower <= report.target + 1e-5);
    Ok(ok)
}

fn random(a: RandomArgs) -> anyhow::Result<bool> {
    let rows = mc_eps_growth(a.n, a.kmax, a.trials, env_seed(a.seed)?)?;
    let mut csv = String::from("k,mean_eps_upper,se,ratio\n");
    for r in &rows {
        csv.push_str(&format!("{},{:.9e},{:.9e},{:.9e}\n", r.k, r.mean_eps_upper, r.se, r.ratio));
    }
    match &a.out {
        Some(p) => write_atomic(p, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    Ok(true)
}

fn experiment(a: ExperimentArgs) -> anyhow::Result<bool> {
    let mut config = match (&a.config, a.which) {
        (Some(path), None) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        (None, Some(kind)) => ExperimentConfig::new(scenario(kind)?),
        (Some(_), Some(_)) => bail!("give either --config or a scenario, not both"),
        (None, None) => bail!("missing scenario (identity, radius, hfp-complex, hfp-nonstrict, ellipse) or --config"),
    };
    // A config file keeps its own seed unless one is passed explicitly.
    if a.seed.is_some() || a.config.is_none() {
        config.seed = env_seed(a.seed)?;
    }
    if a.tolerance.is_some() {
        config.tolerance = a.tolerance;
    }
    if a.out.is_some() {
        config.output = a.out;
    }
    let record = run(&config)?;
    println!("{}", record.to_json()?);
    if !record.passed {
        eprintln!("failed checks: {}", record.failures().join(", "));
    }
    Ok(record.passed)
}

fn scenario(kind: ExperimentKind) -> anyhow::Result<Scenario> {
    Ok(match kind {
        ExperimentKind::Identity { n, kmax } => Scenario::Identity { n, kmax },
        ExperimentKind::Radius { m } => Scenario::Radius { m },
        ExperimentKind::HfpComplex { trials } => Scenario::HfpComplex { trials },
        ExperimentKind::HfpNonstrict => Scenario::HfpNonstrict,
        ExperimentKind::Ellipse { k, l, t } => Scenario::Ellipse {
            k_vertices: parse_rows(&k)?,
            l_facets: parse_rows(&l)?,
            t: parse_rows(&t).map_err(|e| anyhow!("T: {e}"))?,
        },
    })
}
