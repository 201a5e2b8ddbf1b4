//! `lslab`: exact Jacobi-Stirling numbers, tables, certificates and
//! verification reports.

mod cache;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lslab_core::clt::{self, ScaledRow};
use lslab_core::edgeworth::{self, EdgeworthConfig};
use lslab_core::export::{write_table, TableFormat};
use lslab_core::formulas;
use lslab_core::hp::fmt_float;
use lslab_core::laplace;
use lslab_core::poly::IntegerPolynomial;
use lslab_core::sturm;
use lslab_core::triangle::{js_recurrence, modified_row, StirlingTriangle};
use lslab_core::verify::{self, Suite, VerifyConfig};
use lslab_core::{GammaParam, LabError};
use rug::{Float, Integer};

const EXIT_INVARIANT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_CACHE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "lslab", version, about = "Jacobi-Stirling numbers: exact values, tables and checks")]
struct Cli {
    /// Worker threads for parallel loops.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    /// Working precision for floating-point results.
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u32).range(64..))]
    precision_bits: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print one exact entry.
    Compute {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        j: usize,
    },
    /// Emit a triangle as CSV or JSON lines, through the cache.
    Table {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value = "csv")]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, env = "LSLAB_CACHE_DIR", default_value = ".lslab-cache")]
        cache_dir: PathBuf,
        /// Skip reading and writing the cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Run an invariant suite; exit 0 iff every check passes.
    Verify {
        suite: SuiteArg,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
    },
    /// Certify and refine the zeros of M_n.
    Roots {
        #[arg(long)]
        n: usize,
        /// Significant digits printed for each refined zero.
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
    /// Normal-approximation reports for the modified Legendre-Stirling numbers.
    Clt {
        #[arg(value_enum)]
        report: CltReport,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 930)]
        j: usize,
        /// Ascending list for the mean/variance residual report.
        #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
        n_list: Vec<usize>,
    },
    /// Compare k = 2 and k = 3 expansions with the exact row distribution.
    Edgeworth {
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Lower bound on sigma^2/n.
        #[arg(long, default_value_t = 0.01)]
        variance_floor: f64,
    },
    /// Asymptotic checks: saddle expansion, fixed-j ratios, lattice sums.
    Asymptotics {
        #[command(subcommand)]
        kind: Asymptotics,
    },
}

#[derive(Subcommand, Debug)]
enum Asymptotics {
    /// `Q(n)` against `b + b_nu/n` as CSV.
    Saddle {
        #[arg(long, default_value_t = 0)]
        nu: usize,
        /// Positive real, or `omega`.
        #[arg(long, default_value = "omega")]
        z: String,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        n_list: Vec<usize>,
    },
    /// Exact ratios `{n, j} / (C_j (j(j+2gamma-1))^n)` as CSV.
    FixedJ {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        j: usize,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        n_list: Vec<usize>,
    },
    /// Truncated lattice sum for `M_n(g(w))` against the polynomial value.
    Eisenstein {
        #[arg(long)]
        n: usize,
        /// Positive real, or `omega`.
        #[arg(long, default_value = "omega")]
        w: String,
        #[arg(long, default_value_t = laplace::DEFAULT_M_MAX)]
        m_max: u32,
    },
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Rational parameter `p/q`, required for the jacobi family.
    #[arg(long)]
    gamma: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Jacobi,
    Legendre,
    Chebyshev,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Jacobi => "jacobi",
            Family::Legendre => "legendre",
            Family::Chebyshev => "chebyshev",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Identities,
    Roots,
    Eisenstein,
    Clt,
    Edgeworth,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CltReport {
    /// `{n, j}_1 / A(n, j)` as JSON.
    Ratio,
    /// Local approximation table as CSV.
    Residual,
    /// Distribution function on the y-grid as CSV.
    Cdf,
    /// Mean and variance residuals as CSV.
    Moments,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        let code = match e {
            LabError::ResourceLimit { .. } | LabError::PrecisionInsufficient { .. } => EXIT_RESOURCE,
            LabError::Domain(_) | LabError::Parse(_) => EXIT_USAGE,
            _ => EXIT_INVARIANT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure { code: EXIT_INVARIANT, message: format!("{e:#}") }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_INVARIANT, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type Outcome = std::result::Result<u8, Failure>;

fn resolve_gamma(args: &FamilyArgs) -> std::result::Result<GammaParam, Failure> {
    match (args.family, &args.gamma) {
        (Family::Jacobi, Some(g)) => Ok(GammaParam::from_str(g)?),
        (Family::Jacobi, None) => Err(usage("--gamma is required for the jacobi family")),
        (_, Some(_)) => Err(usage("--gamma is only accepted with --family jacobi")),
        (Family::Legendre, None) => Ok(GammaParam::legendre()),
        (Family::Chebyshev, None) => Ok(GammaParam::chebyshev()),
    }
}

fn parse_real(s: &str, prec: u32) -> std::result::Result<Float, Failure> {
    if s == "omega" {
        return Ok(clt::omega(prec));
    }
    let parsed = Float::parse(s).map_err(|e| usage(format!("bad real {s:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let prec = cli.precision_bits;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Compute { family, n, j } => {
            let gamma = resolve_gamma(&family)?;
            let v = js_recurrence(n, j, &gamma)?;
            writeln!(out, "{v}")?;
            Ok(0)
        }
        Command::Table { family, n_max, format, output, cache_dir, no_cache } => {
            let gamma = resolve_gamma(&family)?;
            let name = family.family.name();
            let mut code = 0;
            let tri = if no_cache {
                StirlingTriangle::build(gamma, n_max)?
            } else {
                match cache::load(&cache_dir, name, &gamma, n_max) {
                    cache::Lookup::Hit(t) => t,
                    lookup => {
                        if let cache::Lookup::Corrupt(why) = &lookup {
                            eprintln!("cache corrupt, recomputing: {why}");
                            code = EXIT_CACHE;
                        }
                        let t = StirlingTriangle::build(gamma, n_max)?;
                        cache::store(&cache_dir, name, &t)
                            .with_context(|| format!("writing cache in {}", cache_dir.display()))?;
                        t
                    }
                }
            };
            let fmt = match format {
                Format::Csv => TableFormat::Csv,
                Format::Json => TableFormat::Json,
            };
            match output {
                Some(path) => {
                    let f = std::fs::File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    let mut w = io::BufWriter::new(f);
                    write_table(&tri, fmt, &mut w)?;
                    w.flush()?;
                }
                None => write_table(&tri, fmt, &mut out)?,
            }
            Ok(code)
        }
        Command::Verify { suite, n_max, n, j } => {
            let suite = match suite {
                SuiteArg::Identities => Suite::Identities,
                SuiteArg::Roots => Suite::Roots,
                SuiteArg::Eisenstein => Suite::Eisenstein,
                SuiteArg::Clt => Suite::Clt,
                SuiteArg::Edgeworth => Suite::Edgeworth,
                SuiteArg::All => Suite::All,
            };
            let cfg = VerifyConfig { n_max, n, j, precision_bits: prec };
            let mut all = true;
            for c in verify::run_suite(suite, &cfg) {
                writeln!(out, "{c}")?;
                all &= c.passed;
            }
            Ok(if all { 0 } else { EXIT_INVARIANT })
        }
        Command::Roots { n, digits } => {
            let cert = sturm::certify_roots(n)?;
            let roots = sturm::refine_roots(&cert, prec)?;
            let json = serde_json::json!({
                "certificate": cert.to_json(),
                "roots": roots.iter().map(|r| fmt_float(r, digits)).collect::<Vec<_>>(),
                "precision_bits": prec,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&json).map_err(anyhow::Error::from)?)?;
            Ok(0)
        }
        Command::Clt { report, n, j, n_list } => {
            match report {
                CltReport::Ratio => {
                    let r = clt::ratio_report(n, j, prec)?;
                    writeln!(out, "{}", serde_json::to_string(&r.to_json()).map_err(anyhow::Error::from)?)?;
                }
                CltReport::Residual => write!(out, "{}", clt::residual_csv(&ScaledRow::new(n, prec)?))?,
                CltReport::Cdf => write!(out, "{}", clt::cdf_csv(&ScaledRow::new(n, prec)?))?,
                CltReport::Moments => {
                    writeln!(out, "n,mean_residual,variance_residual,mean_doubling_ratio")?;
                    for r in clt::lemma41_residuals(&n_list, prec)? {
                        let ratio = r.mean_doubling_ratio.map(|d| fmt_float(&d, 16)).unwrap_or_default();
                        writeln!(
                            out,
                            "{},{},{},{}",
                            r.n,
                            fmt_float(&r.mean_residual, 16),
                            fmt_float(&r.variance_residual, 16),
                            ratio
                        )?;
                    }
                }
            }
            Ok(0)
        }
        Command::Edgeworth { n, variance_floor } => {
            let row = modified_row(n)?;
            let poly = IntegerPolynomial::new(row.clone());
            let profile = edgeworth::cumulants_from_factorial_moments(&poly, 3, prec)?;
            let total: Integer = row.iter().sum();
            let total = Float::with_val(prec, &total);
            let probs: Vec<Float> = row.iter().map(|v| Float::with_val(prec, v) / &total).collect();
            let cfg = EdgeworthConfig { variance_floor };
            let rows = edgeworth::expansion_table(&profile, &probs, &cfg)?;
            write!(out, "{}", edgeworth::expansion_csv(&rows))?;
            Ok(0)
        }
        Command::Asymptotics { kind } => asymptotics(kind, prec, &mut out),
    }
}

fn asymptotics(kind: Asymptotics, prec: u32, out: &mut impl Write) -> Outcome {
    match kind {
        Asymptotics::Saddle { nu, z, n_list } => {
            let z = parse_real(&z, prec)?;
            let report = laplace::saddle_convergence_check(nu, &z, &n_list)?;
            write!(out, "{}", report.to_csv())?;
        }
        Asymptotics::FixedJ { family, j, n_list } => {
            let gamma = resolve_gamma(&family)?;
            writeln!(out, "n,ratio")?;
            for n in n_list {
                let r = formulas::fixed_j_ratio(n, j, &gamma)?;
                writeln!(out, "{n},{}", fmt_float(&Float::with_val(prec, &r), 20))?;
            }
        }
        Asymptotics::Eisenstein { n, w, m_max } => {
            let w = parse_real(&w, prec)?;
            let sum = laplace::eisenstein_m(n, &w, m_max)?;
            let exact = IntegerPolynomial::new(modified_row(n)?).eval_float(&laplace::g_of(&w));
            let rel = Float::with_val(prec, &sum.value - &exact).abs() / &exact;
            let json = serde_json::json!({
                "n": n,
                "w": fmt_float(&w, 20),
                "m_max": m_max,
                "lattice_sum": fmt_float(&sum.value, 30),
                "polynomial": fmt_float(&exact, 30),
                "relative_residual": fmt_float(&rel, 6),
                "tail_bound": sum.tail_bound.as_ref().map(|b| fmt_float(b, 6)),
                "precision_bits": prec,
            });
            writeln!(out, "{json}")?;
        }
    }
    Ok(0)
}
