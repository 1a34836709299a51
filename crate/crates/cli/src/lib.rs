//! The `rectlab` command line: argument parsing, input loading and report
//! formatting around `rectlab-core`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rectlab_core::direct_sum::{default_fooling_set, ExploreRow};
use rectlab_core::fooling::search_fooling_capped;
use rectlab_core::fortify::FortificationResult;
use rectlab_core::measure::DistributionJson;
use rectlab_core::problem::ProblemJson;
use rectlab_core::protocol::ProtocolSolver;
use rectlab_core::rects::enumerate_maximal_capped;
use rectlab_core::*;
use serde::Serialize;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rectlab", version, about = "Rectangle covers, protocols and direct-sum checks for two-party problems")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit line-oriented JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Size cap for protocol, fooling and fortification searches.
    #[arg(long, global = true, default_value_t = 16)]
    pub cap: usize,
    /// Seed for sampled measure checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimensions, totality, Cov, L, C and the maximal rectangle count.
    Analyze { problem: String },
    /// Minimum monochromatic cover of the domain or of a cell set.
    Cover {
        problem: String,
        #[arg(long)]
        cells: Option<PathBuf>,
    },
    /// Minimum protocol size with an optimal tree.
    Size { problem: String },
    /// Communication complexity with an optimal tree.
    Depth { problem: String },
    /// Fooling certificate: evaluate a given set or search for a good one.
    Fool {
        problem: String,
        #[arg(long)]
        cells: Option<PathBuf>,
        #[arg(long, default_value = "exhaustive")]
        strategy: fooling::Strategy,
        /// Restrict the exhaustive search to sets of this size.
        #[arg(long)]
        size: Option<usize>,
    },
    /// Fortify the cover measure of a problem.
    Fortify { problem: String },
    /// Fortify the entropy measure of a distribution file.
    FortifyMeasure { distribution: PathBuf },
    /// The product problem as JSON.
    Product {
        s: String,
        t: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct-sum bounds for `S×T` and a fooling set of `T`.
    Directsum {
        s: String,
        t: String,
        #[arg(long)]
        fooling: Option<PathBuf>,
    },
    /// Check a protocol tree file against a problem.
    VerifyProtocol { problem: String, tree: PathBuf },
    /// Tabulate L and C of F and F×F over small Boolean functions.
    Explore {
        #[arg(long, default_value_t = 2)]
        max_side: usize,
    },
    /// Print or write the bundled problems.
    Corpus {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::SizeCap { .. }) => EXIT_CAP,
            _ => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs the command line `args` (program name first), writing reports to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let mut report = Vec::new();
    let result = match cli.global.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut report)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} workers: {e}"))),
        },
        None => dispatch(&cli, &mut report),
    };
    if let Err(e) = out.write_all(&report).and_then(|_| out.flush()) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A problem file, or a bundled name when no such file exists.
pub fn load_problem(arg: &str) -> CliResult<Problem> {
    let path = Path::new(arg);
    if path.exists() {
        let pj: ProblemJson = parse(path)?;
        return Ok(pj.into_problem()?);
    }
    corpus::named(arg).ok_or_else(|| CliError::Usage(format!("{arg}: no such file or bundled problem")))
}

/// A cell set file: either `{"cells": ...}` or a fooling certificate.
fn load_cells(p: &Problem, path: &Path) -> CliResult<CellSet> {
    let v: serde_json::Value = parse(path)?;
    let bad = |e: serde_json::Error| CliError::Io(format!("{}: {e}", path.display()));
    let cells = if v.get("lambda").is_some() {
        serde_json::from_value::<CertificateJson>(v).map_err(bad)?.cells()
    } else {
        serde_json::from_value::<CellSetJson>(v).map_err(bad)?
    };
    Ok(cells.resolve(p)?)
}

fn line<T: Serialize>(out: &mut dyn Write, v: &T) -> CliResult<()> {
    let text = serde_json::to_string(v).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn cells_text(cells: &[[usize; 2]]) -> String {
    let parts: Vec<String> = cells.iter().map(|c| format!("({},{})", c[0], c[1])).collect();
    format!("{{{}}}", parts.join(","))
}

fn dispatch(cli: &Cli, out: &mut Vec<u8>) -> CliResult<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze { problem } => analyze(g, &load_problem(problem)?, out),
        Command::Cover { problem, cells } => {
            let p = load_problem(problem)?;
            let set = match cells {
                Some(path) => load_cells(&p, path)?,
                None => {
                    p.require_total()?;
                    p.full_cells()
                }
            };
            let res = cover_number(&p, &set)?;
            if g.json {
                line(out, &json!({"problem": p.name(), "value": res.value, "witness": res.witness}))?;
            } else {
                writeln!(out, "problem {}", p.name())?;
                writeln!(out, "Cov={}", res.value)?;
                for r in res.witness.iter() {
                    writeln!(out, "rect color={} {}", r.color, r.rect)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Size { problem } | Command::Depth { problem } => {
            let p = load_problem(problem)?;
            p.require_total()?;
            let mut solver = ProtocolSolver::with_cap(&p, g.cap);
            let (key, tree) = if matches!(cli.command, Command::Size { .. }) {
                ("size", solver.size_tree(&p.full_rect())?)
            } else {
                ("depth", solver.depth_tree(&p.full_rect())?)
            };
            let value = if key == "size" { tree.leaves() } else { tree.depth() };
            if g.json {
                line(out, &json!({"problem": p.name(), key: value, "witness": tree}))?;
            } else {
                writeln!(out, "problem {}", p.name())?;
                writeln!(out, "{}={value}", if key == "size" { "L" } else { "C" })?;
                writeln!(out, "leaves={} depth={}", tree.leaves(), tree.depth())?;
            }
            Ok(EXIT_OK)
        }
        Command::Fool { problem, cells, strategy, size } => {
            let p = load_problem(problem)?;
            let cert = match cells {
                Some(path) => min_fooling_delta(&p, &load_cells(&p, path)?)?,
                None => search_fooling_capped(&p, *strategy, *size, g.cap)?,
            };
            let cj = cert.to_json(&p);
            if g.json {
                line(out, &cj)?;
            } else {
                writeln!(out, "problem {}", p.name())?;
                writeln!(out, "lambda={}", cells_text(&cj.lambda))?;
                writeln!(out, "delta={}/{} (={})", cj.delta.num, cj.delta.den, cert.delta())?;
                writeln!(out, "witness color={} {}", cert.witness.color, cert.witness.rect)?;
                writeln!(out, "cov_lb={}", cj.cov_lb)?;
            }
            Ok(EXIT_OK)
        }
        Command::Fortify { problem } => {
            let p = load_problem(problem)?;
            let f = fortify_cover(&p, g.cap)?;
            let cj = f.fooling.to_json(&p);
            if g.json {
                line(
                    out,
                    &json!({
                        "problem": p.name(),
                        "fortification": f.result,
                        "lambda_cells": cj.lambda,
                        "delta": cj.delta,
                        "cov": f.cov,
                        "delta_nominal": f.delta_nominal,
                        "nominal_holds": f.nominal_holds,
                        "density_bound_holds": f.density_bound_holds,
                    }),
                )?;
            } else {
                writeln!(out, "problem {}", p.name())?;
                fortification_text(out, &f.result)?;
                writeln!(out, "lambda_cells={}", cells_text(&cj.lambda))?;
                writeln!(out, "delta={}/{} cov_lb={}", cj.delta.num, cj.delta.den, cj.cov_lb)?;
                writeln!(out, "Cov={} delta_nominal={:.6}", f.cov, f.delta_nominal)?;
                writeln!(out, "nominal_holds={} density_bound_holds={}", f.nominal_holds, f.density_bound_holds)?;
            }
            let ok = f.result.certified && f.nominal_holds && f.density_bound_holds;
            Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::FortifyMeasure { distribution } => {
            let d: DistributionJson = parse(distribution)?;
            let m = d.into_measure()?;
            let report = check_measure(&m, g.seed);
            let r = fortify(&m, m.ground(), g.cap)?;
            if g.json {
                line(out, &json!({"measure": report, "fortification": r}))?;
            } else {
                writeln!(out, "measure {} variables={}", m.name(), d.variables)?;
                writeln!(
                    out,
                    "valid={} exhaustive={} subsets_checked={} pairs_checked={}",
                    report.valid(),
                    report.exhaustive,
                    report.subsets_checked,
                    report.pairs_checked
                )?;
                fortification_text(out, &r)?;
            }
            Ok(if r.certified { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Product { s, t, out: path } => {
            let (s, t) = (load_problem(s)?, load_problem(t)?);
            let pr = Problem::product(&s, &t)?;
            let text = serde_json::to_string(&pr).map_err(|e| CliError::Io(e.to_string()))?;
            match path {
                Some(path) => {
                    std::fs::write(path, format!("{text}\n"))?;
                    if g.json {
                        line(out, &json!({"product": pr.name(), "path": path}))?;
                    } else {
                        writeln!(out, "wrote {} ({}x{}, {} colors)", path.display(), pr.nx(), pr.ny(), pr.nz())?;
                    }
                }
                None => writeln!(out, "{text}")?,
            }
            Ok(EXIT_OK)
        }
        Command::Directsum { s, t, fooling } => {
            let (s, t) = (load_problem(s)?, load_problem(t)?);
            let lambda = match fooling {
                Some(path) => load_cells(&t, path)?,
                None => default_fooling_set(&t)?.lambda,
            };
            let rep = direct_sum_report(&s, &t, &lambda, g.cap)?;
            if g.json {
                line(out, &rep)?;
            } else {
                directsum_text(out, &rep)?;
            }
            let broken = rep.bounds.iter().any(|b| !b.holds && !b.vacuous);
            Ok(if broken { EXIT_VIOLATION } else { EXIT_OK })
        }
        Command::VerifyProtocol { problem, tree } => {
            let p = load_problem(problem)?;
            let tree: ProtocolTree = parse(tree)?;
            let verdict = verify_protocol(&p, &tree);
            if g.json {
                let violation = verdict.as_ref().err().map(|v| v.to_string());
                line(
                    out,
                    &json!({"problem": p.name(), "valid": verdict.is_ok(), "leaves": tree.leaves(), "depth": tree.depth(), "violation": violation}),
                )?;
            } else {
                match &verdict {
                    Ok(()) => writeln!(out, "valid leaves={} depth={}", tree.leaves(), tree.depth())?,
                    Err(v) => writeln!(out, "invalid: {v}")?,
                }
            }
            Ok(if verdict.is_ok() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Explore { max_side } => {
            let rows = explore_conjectures(*max_side)?;
            if g.json {
                for r in &rows {
                    line(out, r)?;
                }
            } else {
                writeln!(out, "rows cols table L(F) L(FxF) C(F) C(FxF) log_gap c_gap")?;
                for r in &rows {
                    explore_text(out, r)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Corpus { name, out: dir } => {
            let problems = match name {
                Some(n) => vec![corpus::named(n).ok_or_else(|| CliError::Usage(format!("{n}: no bundled problem")))?],
                None => corpus::all(),
            };
            for p in &problems {
                let text = serde_json::to_string(p).map_err(|e| CliError::Io(e.to_string()))?;
                match dir {
                    Some(dir) => {
                        std::fs::create_dir_all(dir)?;
                        let path = dir.join(format!("{}.json", p.name()));
                        std::fs::write(&path, format!("{text}\n"))?;
                        if g.json {
                            line(out, &json!({"problem": p.name(), "path": path}))?;
                        } else {
                            writeln!(out, "wrote {}", path.display())?;
                        }
                    }
                    None => writeln!(out, "{text}")?,
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn analyze(g: &Global, p: &Problem, out: &mut dyn Write) -> CliResult<i32> {
    let total = p.is_total();
    let rects = enumerate_maximal_capped(p, g.cap)?.len();
    let (cov, l, c) = if total {
        let r = solve_protocol(p, g.cap)?;
        (Some(cover_number(p, &p.full_cells())?.value), Some(r.size), Some(r.depth))
    } else {
        (None, None, None)
    };
    if g.json {
        line(
            out,
            &json!({
                "problem": p.name(), "nx": p.nx(), "ny": p.ny(), "nz": p.nz(), "total": total,
                "function": p.is_function(), "cov": cov, "l": l, "c": c, "maximal_rects": rects,
            }),
        )?;
    } else {
        let show = |v: Option<usize>| v.map_or("n/a".to_string(), |v| v.to_string());
        writeln!(out, "problem {}", p.name())?;
        writeln!(out, "nx={} ny={} nz={}", p.nx(), p.ny(), p.nz())?;
        writeln!(out, "total={} function={}", total, p.is_function())?;
        writeln!(out, "Cov={} L={} C={}", show(cov), show(l), show(c))?;
        writeln!(out, "maximal_rects={rects}")?;
    }
    Ok(EXIT_OK)
}

fn fortification_text(out: &mut dyn Write, r: &FortificationResult) -> CliResult<()> {
    let list = |m: u64| fortify::to_list(m).iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    writeln!(out, "sigma={{{}}} lambda0={{{}}} lambda={{{}}}", list(r.sigma), list(r.lambda0), list(r.lambda))?;
    writeln!(out, "c={:.6} weak_rho={:.6} rho={:.6}", r.c, r.weak_rho, r.rho)?;
    writeln!(out, "mu(sigma)={:.6} mu(lambda)={:.6}", r.measure_sigma, r.measure_lambda)?;
    writeln!(out, "inverse_steps={} weak_merges={}", r.inverse_steps, r.weak_merges)?;
    writeln!(out, "certified={}", r.certified)?;
    Ok(())
}

fn directsum_text(out: &mut dyn Write, rep: &DirectSumReport) -> CliResult<()> {
    writeln!(out, "S={} T={}", rep.s, rep.t)?;
    writeln!(out, "lambda={} delta={}/{}", cells_text(&rep.lambda), rep.delta.num, rep.delta.den)?;
    writeln!(out, "Cov(S)={} Cov(T)={} Cov(SxT)={} Cov(hardcore)={}", rep.cov_s, rep.cov_t, rep.cov_product, rep.cov_hardcore)?;
    writeln!(out, "L(S)={} L(SxT)={} C(S)={} C(SxT)={}", rep.l_s, rep.l_product, rep.c_s, rep.c_product)?;
    for b in &rep.bounds {
        let rhs = b.rhs.as_frac();
        writeln!(
            out,
            "bound {} holds={} vacuous={} lhs={} rhs={}/{}",
            b.bound, b.holds, b.vacuous, b.lhs, rhs.num, rhs.den
        )?;
    }
    Ok(())
}

fn explore_text(out: &mut dyn Write, r: &ExploreRow) -> CliResult<()> {
    let table: Vec<String> = r.table.iter().map(|row| row.iter().map(|v| v.to_string()).collect()).collect();
    writeln!(
        out,
        "{} {} {} {} {} {} {} {:.6} {}",
        r.rows,
        r.cols,
        table.join("/"),
        r.l_f,
        r.l_ff,
        r.c_f,
        r.c_ff,
        r.log_gap,
        r.c_gap
    )?;
    Ok(())
}
