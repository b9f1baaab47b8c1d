use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rootfock_core::clifford::{build_clifford, verify_clifford_relations, Representation};
use rootfock_core::decomp::{decompose_sl, verify_decomposition};
use rootfock_core::export::{export, import, to_json, ExpectedParams};
use rootfock_core::slmn::{build_cartan_weyl, build_closed_form};
use rootfock_core::{Backend, BasisKind, CliffordBundle, ComplexField, CyclotomicField, FockModule, Parity, DEFAULT_TOLERANCE};
use rootfock_cli::config::{parse_basis, parse_points, parse_suites, usage, ConfigFile};
use rootfock_cli::sweep::{format_timings, resolve_workers};
use rootfock_cli::{run_point, sweep, BackendChoice, Format, Params, RunConfig, UsageError, WORKERS_ENV};
use serde::Serialize;

/// Builds root-of-unity Fock representations and checks their relations.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 for
/// usage or parameter errors, 3 for other runtime errors.
#[derive(Parser)]
#[command(name = "rootfock", version)]
struct Cli {
    /// `key = value` configuration file; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct PointArgs {
    /// Number of bosonic modes.
    #[arg(long)]
    m: Option<usize>,
    /// Number of fermionic modes.
    #[arg(long)]
    n: Option<usize>,
    /// Root-of-unity order: q = e^(iπl/k).
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
}

#[derive(Args, Clone, Default)]
struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// json (default) or csv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build generator matrices and print their shapes.
    Build {
        #[command(flatten)]
        point: PointArgs,
        /// exact or float.
        #[arg(long)]
        backend: Option<String>,
        /// raw or orthonormal.
        #[arg(long)]
        basis: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run verification suites at one parameter point.
    Verify {
        #[command(flatten)]
        point: PointArgs,
        /// exact, float or both.
        #[arg(long)]
        backend: Option<String>,
        /// Comma-separated subset of clifford, gram, osp, sl, decomp, or all.
        #[arg(long)]
        suites: Option<String>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Split the module into grade subspaces and test each for irreducibility.
    Decompose {
        #[command(flatten)]
        point: PointArgs,
        /// exact or float.
        #[arg(long)]
        backend: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Verify a grid of points in parallel.
    Sweep {
        /// Points as `m,n,k,l;m,n,k,l;...`.
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        suites: Option<String>,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Worker threads; also read from the environment.
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        /// File for per-point wall times; standard error when absent.
        #[arg(long, value_name = "PATH")]
        timings: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write generator matrices to a JSON file.
    Export {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        basis: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Read an exported file back and re-verify the Clifford relations.
    Import {
        path: PathBuf,
        /// Reject files not built for `m,n,k,l`.
        #[arg(long)]
        expect: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn params(point: &PointArgs, file: &ConfigFile) -> Result<Params> {
    let need = |v: Option<u64>, key: &str| v.ok_or_else(|| usage(format!("missing --{key} (flag or config key)")));
    let p = Params {
        m: need(file.layer(point.m.map(|x| x as u64), "m")?, "m")? as usize,
        n: need(file.layer(point.n.map(|x| x as u64), "n")?, "n")? as usize,
        k: need(file.layer(point.k.map(u64::from), "k")?, "k")? as u32,
        l: need(file.layer(point.l.map(u64::from), "l")?, "l")? as u32,
    };
    p.validate()?;
    Ok(p)
}

fn single_backend(flag: Option<String>, file: &ConfigFile) -> Result<Backend> {
    match file.layer::<BackendChoice>(flag.map(|s| s.parse()).transpose()?, "backend")? {
        None | Some(BackendChoice::Exact) => Ok(Backend::Exact),
        Some(BackendChoice::Float) => Ok(Backend::Float),
        Some(BackendChoice::Both) => bail!(usage("this command takes a single backend: exact or float")),
    }
}

fn basis(flag: Option<String>, file: &ConfigFile) -> Result<BasisKind> {
    match flag.as_deref().or(file.raw("basis")) {
        None => Ok(BasisKind::Raw),
        Some(s) => parse_basis(s),
    }
}

fn output(out: &OutputArgs, file: &ConfigFile) -> Result<(Option<PathBuf>, Format)> {
    let path = out.output.clone().or_else(|| file.raw("output").map(PathBuf::from));
    let format = file.layer::<Format>(out.format.as_deref().map(str::parse).transpose()?, "format")?;
    Ok((path, format.unwrap_or(Format::Json)))
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn common_run_config(
    backend: Option<String>,
    suites: Option<String>,
    tolerance: Option<f64>,
    file: &ConfigFile,
    p: Params,
) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(p);
    if let Some(b) = file.layer::<BackendChoice>(backend.map(|s| s.parse()).transpose()?, "backend")? {
        cfg.backend = b;
    }
    if let Some(s) = suites.as_deref().or(file.raw("suites")) {
        cfg.suites = parse_suites(s)?;
    }
    cfg.tolerance = file.layer(tolerance, "tolerance")?.unwrap_or(DEFAULT_TOLERANCE);
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct GeneratorShape {
    name: String,
    parity: Option<Parity>,
    nonzeros: usize,
}

#[derive(Serialize)]
struct BuildSummary {
    m: usize,
    n: usize,
    k: u32,
    l: u32,
    backend: Backend,
    basis: BasisKind,
    dim: usize,
    generators: Vec<GeneratorShape>,
}

fn shapes(rep: &Representation) -> Vec<GeneratorShape> {
    fn of<F: rootfock_core::ScalarField>(b: &CliffordBundle<F>) -> Vec<GeneratorShape> {
        b.generators()
            .into_iter()
            .map(|(name, m)| GeneratorShape {
                name,
                parity: m.parity(),
                nonzeros: m.nnz(),
            })
            .collect()
    }
    match rep {
        Representation::Exact(b) => of(b),
        Representation::Float(b) => of(b),
    }
}

fn build_summary(rep: &Representation) -> BuildSummary {
    let module = rep.module();
    BuildSummary {
        m: module.m(),
        n: module.n(),
        k: module.k(),
        l: module.l(),
        backend: rep.backend(),
        basis: rep.basis(),
        dim: module.dim(),
        generators: shapes(rep),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output types always serialize")
}

fn run(cli: Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Build { point, backend, basis: b, out } => {
            let p = params(&point, &file)?;
            let rep = build_clifford(FockModule::new(p.m, p.n, p.k, p.l)?, single_backend(backend, &file)?, basis(b, &file)?)?;
            let (path, _) = output(&out, &file)?;
            emit(&json(&build_summary(&rep)), path.as_deref())?;
            Ok(true)
        }
        Command::Verify {
            point,
            backend,
            suites,
            tolerance,
            out,
        } => {
            let cfg = common_run_config(backend, suites, tolerance, &file, params(&point, &file)?)?;
            let (path, format) = output(&out, &file)?;
            let report = run_point(&cfg)?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.report.to_csv(),
            };
            emit(&text, path.as_deref())?;
            Ok(report.all_passed())
        }
        Command::Decompose { point, backend, out } => {
            let p = params(&point, &file)?;
            let module = FockModule::new(p.m, p.n, p.k, p.l)?;
            let record = match single_backend(backend, &file)? {
                Backend::Exact => {
                    let b = CliffordBundle::raw(CyclotomicField::new(p.k, p.l)?, module.clone())?;
                    decompose_sl(&build_cartan_weyl(&b), &module)?
                }
                Backend::Float if p.l == 1 => decompose_sl(&build_closed_form(&module)?, &module)?,
                Backend::Float => {
                    let b = CliffordBundle::raw(ComplexField::new(p.k, p.l)?, module.clone())?;
                    decompose_sl(&build_cartan_weyl(&b), &module)?
                }
            };
            let (path, _) = output(&out, &file)?;
            emit(&json(&record), path.as_deref())?;
            Ok(verify_decomposition(&record).all_passed())
        }
        Command::Sweep {
            points,
            backend,
            suites,
            tolerance,
            workers,
            timings,
            out,
        } => {
            let grid = parse_points(points.as_deref().or(file.raw("points")).unwrap_or(""))?;
            // the template's own parameters are never run; each grid point replaces them
            let cfg = common_run_config(backend, suites, tolerance, &file, Params { m: 1, n: 0, k: 2, l: 1 })?;
            let workers = resolve_workers(file.layer(workers, "workers")?)?;
            let (report, times) = sweep(&cfg, &grid, workers)?;
            let (path, format) = output(&out, &file)?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(&text, path.as_deref())?;
            let t = format_timings(&grid, &times);
            match timings.or_else(|| file.raw("timings").map(PathBuf::from)) {
                Some(p) => std::fs::write(&p, t).with_context(|| format!("writing {}", p.display()))?,
                None => eprint!("{t}"),
            }
            Ok(report.all_passed())
        }
        Command::Export {
            point,
            backend,
            basis: b,
            out,
        } => {
            let p = params(&point, &file)?;
            let rep = build_clifford(FockModule::new(p.m, p.n, p.k, p.l)?, single_backend(backend, &file)?, basis(b, &file)?)?;
            let (path, _) = output(&out, &file)?;
            emit(&to_json(&export(&rep)), path.as_deref())?;
            Ok(true)
        }
        Command::Import { path, expect, out } => {
            let expected = expect
                .as_deref()
                .map(|s| s.parse::<Params>())
                .transpose()?
                .map(|p| ExpectedParams { m: p.m, n: p.n, k: p.k, l: p.l });
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let rep = import(&text, expected).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let report = match &rep {
                Representation::Exact(b) => verify_clifford_relations(b, DEFAULT_TOLERANCE),
                Representation::Float(b) => verify_clifford_relations(b, DEFAULT_TOLERANCE),
            };
            #[derive(Serialize)]
            struct Imported {
                #[serde(flatten)]
                shape: BuildSummary,
                clifford: rootfock_core::report::Summary,
            }
            let (out_path, _) = output(&out, &file)?;
            emit(
                &json(&Imported {
                    shape: build_summary(&rep),
                    clifford: report.summary,
                }),
                out_path.as_deref(),
            )?;
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let is_usage = e.downcast_ref::<UsageError>().is_some()
                || matches!(
                    e.downcast_ref::<rootfock_core::Error>(),
                    Some(rootfock_core::Error::Inadmissible { .. } | rootfock_core::Error::EmptyModule { .. })
                );
            ExitCode::from(if is_usage { 2 } else { 3 })
        }
    }
}

