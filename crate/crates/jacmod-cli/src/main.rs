//! `jacmod`: weighted moduli of smoothness, K-/Realization functionals,
//! best weighted polynomial approximation, and the verification suites.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use jacmod_cli::catalog::{self, CatalogContext};
use jacmod_cli::config::SuiteConfig;
use jacmod_cli::report::{p_str, print_predicates, Report};
use jacmod_cli::{parse_p, parse_t_grid, suites};
use jacmod_core::approx::{best_approx, SolveOptions};
use jacmod_core::functionals::{degree_for_t, CandidateSet, FunctionalOptions};
use jacmod_core::moduli::{averaged_modulus, modulus, ModulusRequest};
use jacmod_core::weights::{Interval, WeightParams};
use jacmod_core::Function;

const EXIT_PREDICATE_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "jacmod", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CellArgs {
    /// `catalog:NAME` or a FunctionSpec JSON path.
    #[arg(long)]
    func: String,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    r: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    /// Integrability index: a number or "inf".
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
}

impl CellArgs {
    fn p_value(&self) -> Result<f64> {
        parse_p(&self.p).map_err(|e| anyhow::anyhow!(e))
    }

    fn compile(&self, eps: Option<f64>) -> Result<(Function, f64)> {
        let p = self.p_value()?;
        let ctx = CatalogContext {
            k: self.k,
            r: self.r,
            alpha: self.alpha,
            beta: self.beta,
            p,
            eps,
        };
        let spec = catalog::resolve(&self.func, &ctx)?;
        let f = spec
            .compile()
            .map_err(|e| anyhow::anyhow!("compiling function spec: {e}"))?;
        Ok((f, p))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Weighted moduli of smoothness ω and ω* on a t-grid (CSV rows).
    Modulus {
        #[command(flatten)]
        cell: CellArgs,
        /// t values: number, comma list, or `lo:hi:logN`.
        #[arg(long)]
        t: String,
        /// Report divergent moduli instead of failing with exit code 3.
        #[arg(long)]
        allow_divergent: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// K-functional, realization functional and E_n per grid point.
    Functionals {
        #[command(flatten)]
        cell: CellArgs,
        /// t grid (degrees derived as n = ceil(max(8, 1/t))).
        #[arg(long, conflicts_with = "n")]
        t: Option<String>,
        /// Comma list of degrees n.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best weighted polynomial approximation E_n(f)_{w,p}.
    Bestapprox {
        #[command(flatten)]
        cell: CellArgs,
        #[arg(long, default_value_t = 8)]
        n: u32,
        /// Subinterval `lo,hi` (default [-1,1]).
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        /// Output format for the minimizer.
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suites and write a report.
    Verify {
        /// Suites to run (comma list); default: all.
        #[arg(long)]
        suite: Option<String>,
        /// JSON config path; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Restrict the p grid (comma list of numbers or "inf").
        #[arg(long)]
        p: Option<String>,
        /// Restrict the k grid.
        #[arg(long)]
        k: Option<String>,
        /// Restrict the r grid.
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        /// Full (α, β) grid for the heavyweight predicates.
        #[arg(long)]
        dense: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a JSON report into CSV tables and plot-ready series.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long, default_value = "report_out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Modulus {
            cell,
            t,
            allow_divergent,
            out,
        } => cmd_modulus(cell, &t, allow_divergent, out),
        Command::Functionals { cell, t, n, out } => cmd_functionals(cell, t, n, out),
        Command::Bestapprox {
            cell,
            n,
            interval,
            format,
            out,
        } => cmd_bestapprox(cell, n, interval, &format, out),
        Command::Verify {
            suite,
            config,
            p,
            k,
            r,
            seed,
            tol,
            dense,
            out,
        } => cmd_verify(suite, config, p, k, r, seed, tol, dense, out),
        Command::Report {
            report,
            format,
            out,
        } => cmd_report(&report, &format, &out),
    }
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    })
}

fn cmd_modulus(
    cell: CellArgs,
    t_spec: &str,
    allow_divergent: bool,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let ts = parse_t_grid(t_spec).map_err(|e| anyhow::anyhow!(e))?;
    let (f, p) = cell.compile(None)?;
    let mut w = csv::Writer::from_writer(open_out(&out)?);
    w.write_record(["t", "omega", "omega_star", "err", "diverged"])?;
    let mut diverged_any = false;
    let mut trace = None;
    for &t in &ts {
        let mut req = ModulusRequest::new(&f, cell.k, cell.r, cell.alpha, cell.beta, p, t);
        req.tol = cell.tol;
        let m = modulus(&req);
        let a = averaged_modulus(&req);
        diverged_any |= m.diverged || a.diverged;
        if trace.is_none() {
            trace = m.trace.clone().or_else(|| a.trace.clone());
        }
        w.write_record([
            format!("{t}"),
            format!("{}", m.value),
            format!("{}", a.value),
            format!("{}", m.err_est.max(a.err_est)),
            format!("{}", m.diverged || a.diverged),
        ])?;
    }
    w.flush()?;
    drop(w);
    if diverged_any {
        if !allow_divergent {
            eprintln!("divergent modulus detected; rerun with --allow-divergent");
            return Ok(ExitCode::from(EXIT_DIVERGENCE));
        }
        // Growth trace goes next to the output (or ./modulus_trace.csv).
        let trace_path = match &out {
            Some(path) => {
                let mut p = path.clone();
                p.set_extension("trace.csv");
                p
            }
            None => PathBuf::from("modulus_trace.csv"),
        };
        if let Some(tr) = trace {
            let mut tw = csv::Writer::from_path(&trace_path)?;
            tw.write_record(["level", "increment", "cumulative"])?;
            let cum = tr.cumulative();
            for (i, (inc, c)) in tr.increments.iter().zip(&cum).enumerate() {
                tw.write_record([format!("{i}"), format!("{inc}"), format!("{c}")])?;
            }
            tw.flush()?;
            eprintln!("growth trace written to {}", trace_path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_n_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<u32>()
                .with_context(|| format!("invalid n {v:?}"))
        })
        .collect()
}

fn cmd_functionals(
    cell: CellArgs,
    t: Option<String>,
    n: Option<String>,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let (f, p) = cell.compile(None)?;
    let points: Vec<(u32, f64)> = match (&t, &n) {
        (Some(ts), None) => parse_t_grid(ts)
            .map_err(|e| anyhow::anyhow!(e))?
            .into_iter()
            .map(|t| (degree_for_t(t, 8), t))
            .collect(),
        (None, Some(ns)) => parse_n_list(ns)?
            .into_iter()
            .map(|n| (n, 1.0 / n as f64))
            .collect(),
        _ => bail!("exactly one of --t and --n is required"),
    };
    let opts = FunctionalOptions {
        norm_tol: cell.tol,
        polish_budget: 0,
        ..FunctionalOptions::default()
    };
    let cs = CandidateSet::build(&f, cell.k, cell.r, cell.alpha, cell.beta, p, &opts)
        .map_err(|e| anyhow::anyhow!("building candidates: {e}"))?;
    let w = WeightParams::new(cell.alpha, cell.beta, p);
    let mut wtr = csv::Writer::from_writer(open_out(&out)?);
    wtr.write_record(["n", "t", "kfunctional", "realization", "e_n"])?;
    for (n, t) in points {
        let kv = cs.kfunctional(t).value;
        let rv = cs
            .realization(n)
            .map(|v| v.value)
            .unwrap_or(f64::NAN);
        let en = best_approx(&f, n, Interval::FULL, &w, &opts.solve)
            .map(|r| r.error)
            .unwrap_or(f64::NAN);
        wtr.write_record([
            format!("{n}"),
            format!("{t}"),
            format!("{kv}"),
            format!("{rv}"),
            format!("{en}"),
        ])?;
    }
    wtr.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bestapprox(
    cell: CellArgs,
    n: u32,
    interval: Option<String>,
    format: &str,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let (f, p) = cell.compile(None)?;
    let iv = match interval {
        Some(s) => {
            let parts: Vec<f64> = s
                .split(',')
                .map(|v| v.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .with_context(|| format!("invalid interval {s:?}"))?;
            if parts.len() != 2 || parts[0] >= parts[1] {
                bail!("interval must be lo,hi with lo < hi");
            }
            Interval::new(parts[0].max(-1.0), parts[1].min(1.0))
        }
        None => Interval::FULL,
    };
    let w = WeightParams::new(cell.alpha, cell.beta, p);
    let res = best_approx(&f, n, iv, &w, &SolveOptions::default())
        .map_err(|e| anyhow::anyhow!("solver: {e}"))?;
    let mut sink = open_out(&out)?;
    match format {
        "json" => {
            let payload = serde_json::json!({
                "error": res.error,
                "status": format!("{:?}", res.status).to_lowercase(),
                "n": n,
                "p": p_str(p),
                "minimizer": res.minimizer,
            });
            writeln!(sink, "{}", serde_json::to_string_pretty(&payload)?)?;
        }
        "csv" => {
            let mut wtr = csv::Writer::from_writer(sink);
            wtr.write_record(["index", "coefficient"])?;
            for (i, c) in res.minimizer.coefficients.iter().enumerate() {
                wtr.write_record([format!("{i}"), format!("{c}")])?;
            }
            wtr.flush()?;
            eprintln!("error = {}", res.error);
        }
        other => bail!("unknown format {other:?} (json or csv)"),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: Option<String>,
    config_path: Option<PathBuf>,
    p: Option<String>,
    k: Option<String>,
    r: Option<String>,
    seed: Option<u64>,
    tol: Option<f64>,
    dense: bool,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let mut cfg = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading config {path:?}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {path:?}"))?
        }
        None => SuiteConfig::default(),
    };
    if let Some(s) = suite {
        cfg.suites = s.split(',').map(|x| x.trim().to_string()).collect();
    }
    if let Some(ps) = p {
        cfg.ps = ps
            .split(',')
            .map(|x| parse_p(x.trim()).map_err(|e| anyhow::anyhow!(e)))
            .collect::<Result<_>>()?;
    }
    if let Some(ks) = k {
        cfg.ks = ks
            .split(',')
            .map(|x| x.trim().parse().context("bad k"))
            .collect::<Result<_>>()?;
    }
    if let Some(rs) = r {
        cfg.rs = rs
            .split(',')
            .map(|x| x.trim().parse().context("bad r"))
            .collect::<Result<_>>()?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = tol {
        cfg.tol = t;
    }
    if dense {
        cfg.dense = true;
    }
    let report = suites::run(&cfg)?;
    print_predicates(&report, std::io::stdout())?;
    if let Some(path) = out {
        report.save_json(&path)?;
        eprintln!("report written to {}", path.display());
    }
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        let failing: Vec<&str> = report.failing().iter().map(|p| p.id.as_str()).collect();
        eprintln!("failing predicates: {}", failing.join(", "));
        Ok(ExitCode::from(EXIT_PREDICATE_FAILURE))
    }
}

fn cmd_report(report_path: &PathBuf, format: &str, out: &PathBuf) -> Result<ExitCode> {
    if !report_path.exists() {
        eprintln!("report {report_path:?} does not exist");
        return Ok(ExitCode::from(EXIT_USAGE));
    }
    let report = Report::load_json(report_path)?;
    match format {
        "csv" => {
            report.export_csv(out)?;
            eprintln!("CSV tables written to {}", out.display());
        }
        "json" => {
            std::fs::create_dir_all(out)?;
            report.save_json(&out.join("report.json"))?;
        }
        other => bail!("unknown format {other:?} (json or csv)"),
    }
    Ok(ExitCode::SUCCESS)
}
