//! `tateshift`: Gross-Hopkins shifts, spectral sequence charts and the
//! verification suites behind them.
//!
//! Exit status is 0 when everything checked out, 1 when a mathematical
//! verification failed, and 2 for bad input or any other error.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tateshift_core::chart::{self, ChartSpec, Format, Overlay, Window};
use tateshift_core::cp_rep::{self, CpModule, DEFAULT_MAX_DIM};
use tateshift_core::duality_shifts::{self, Route};
use tateshift_core::mod_arith::{self, HeightParams};
use tateshift_core::tate_engine::{self, Family, Group};
use tateshift_core::Error;

/// `println!` that tolerates a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {
        emit(&format!("{}\n", format_args!($($arg)*)))?
    };
}

/// Environment variable overriding the largest module dimension built.
const MAX_DIM_VAR: &str = "TATESHIFT_MAX_DIM";

#[derive(Parser, Debug)]
#[command(name = "tateshift", version, about = "Gross-Hopkins duality shifts at height p-1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print k_I for C_p, F and G.
    Shifts {
        #[arg(long, default_value_t = 3)]
        prime: u64,
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        route: RouteArg,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Draw a page of a Tate spectral sequence.
    Chart(ChartArgs),
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        max_degree: Option<usize>,
        /// Largest prime for the congruence suite.
        #[arg(long, default_value_t = 101)]
        max_prime: u64,
    },
    /// Jordan profile and Tate cohomology of S_m(U_k), as JSON.
    Sympow {
        #[arg(long, default_value_t = 3)]
        prime: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        degree: usize,
    },
}

#[derive(Args, Debug)]
struct ChartArgs {
    #[arg(long, default_value = "Cp")]
    group: String,
    #[arg(long, default_value_t = 3)]
    prime: u64,
    #[arg(long, default_value_t = 2)]
    page: u32,
    /// STEM_MIN:STEM_MAX,S_MIN:S_MAX; defaults to two periods each way.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, default_value = "ascii")]
    format: String,
    /// Chart the Pontryagin-dual sequence.
    #[arg(long)]
    dual: bool,
    #[arg(long, value_enum, default_value_t = OverlayArg::None)]
    overlay: OverlayArg,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RouteArg {
    Dual,
    Det,
    Both,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Dual => Route::Dual,
            RouteArg::Det => Route::Det,
            RouteArg::Both => Route::Both,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OverlayArg {
    None,
    /// Mark classes by whether they reach E-infinity.
    Fates,
    /// Survival in the s >= 0 truncation.
    Hfpss,
    /// Survival in the s <= -1 truncation.
    Hoss,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Suite {
    /// E-infinity of the Tate sequence is empty.
    Cancellation,
    /// z_k^(k+1) kills the Tate cohomology of S_*(U_k), and S_(pt+r)(U_k) is free for k < r < p.
    Lemma32,
    /// (n/2)(n-2)p + (p^n-1)/n = 0 mod n^2 for all odd primes up to --max-prime.
    Congruence,
    /// Free symmetric powers are exactly those with vanishing Tate cohomology.
    Freeness,
}

/// Whether the checks that ran all passed.
enum Outcome {
    Verified,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Verified) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let verification = e
                .downcast_ref::<Error>()
                .is_some_and(Error::is_verification_failure);
            ExitCode::from(if verification { 1 } else { 2 })
        }
    }
}

fn params(p: u64) -> Result<HeightParams> {
    Ok(HeightParams::new(p)?)
}

fn max_dim() -> Result<usize> {
    match std::env::var(MAX_DIM_VAR) {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{MAX_DIM_VAR}={v} is not a dimension")).into()),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Shifts { prime, route, json } => {
            let table = duality_shifts::shifts_table_for(&params(prime)?, route.into())?;
            if json {
                out!("{}", serde_json::to_string_pretty(&table)?);
            } else {
                emit(&table.to_text())?;
            }
            Ok(Outcome::Verified)
        }
        Command::Chart(args) => chart_command(args),
        Command::Verify {
            suite,
            prime,
            max_degree,
            max_prime,
        } => match suite {
            Suite::Cancellation => verify_cancellation(prime),
            Suite::Lemma32 => verify_lemma32(prime, max_degree),
            Suite::Congruence => verify_congruence(prime, max_prime),
            Suite::Freeness => verify_freeness(prime, max_degree),
        },
        Command::Sympow { prime, k, degree } => sympow(prime, k, degree),
    }
}

fn chart_command(args: ChartArgs) -> Result<Outcome> {
    let group: Group = args.group.parse()?;
    let params = params(args.prime)?;
    let format: Format = args.format.parse()?;
    let window = match &args.window {
        Some(w) => w.parse()?,
        None => Window::default_for(Family::new(group, &params)),
    };
    let mut spec = ChartSpec::new(group, &params, args.page, window, format);
    spec.dual = args.dual;
    let text = match args.overlay {
        OverlayArg::None => chart::render(&spec)?,
        overlay => {
            let ss = tate_engine::run_to_einfty(group, &params)?;
            let ss = if args.dual { tate_engine::dualize(&ss)? } else { ss };
            match overlay {
                OverlayArg::Fates => chart::diff_overlay(&spec, &Overlay::Fates(&ss))?,
                OverlayArg::Hfpss => {
                    let view = tate_engine::hfpss_view(&ss);
                    chart::diff_overlay(&spec, &Overlay::Truncated(&view))?
                }
                OverlayArg::Hoss => {
                    let view = tate_engine::hoss_view(&ss);
                    chart::diff_overlay(&spec, &Overlay::Truncated(&view))?
                }
                OverlayArg::None => unreachable!(),
            }
        }
    };
    match args.out {
        Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => emit(&text)?,
    }
    Ok(Outcome::Verified)
}

/// Writes to standard output; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn primes_or_default(prime: Option<u64>, default: &[u64]) -> Result<Vec<HeightParams>> {
    match prime {
        Some(p) => Ok(vec![params(p)?]),
        None => default.iter().map(|&p| params(p)).collect(),
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn verify_cancellation(prime: Option<u64>) -> Result<Outcome> {
    let mut all = true;
    for params in primes_or_default(prime, &[3, 5, 7])? {
        for group in Group::ALL {
            let ss = tate_engine::run_to_einfty(group, &params)?;
            let empty = ss.einfty().is_empty();
            all &= empty;
            out!(
                "cancellation {group} p={}: E_{} has {} classes per period ... {}",
                params.p(),
                ss.einfty().r(),
                ss.einfty().len(),
                mark(empty)
            );
        }
    }
    Ok(if all { Outcome::Verified } else { Outcome::Failed })
}

fn verify_lemma32(prime: Option<u64>, max_degree: Option<usize>) -> Result<Outcome> {
    let cap = max_dim()?;
    let mut all = true;
    for params in primes_or_default(prime, &[3, 5])? {
        let p = params.p();
        for k in 1..params.n() {
            let d = max_degree.unwrap_or_else(|| cp_rep::default_max_degree(p, k));
            let report = cp_rep::vk_nilpotence_check(&params, k, d, cap)?;
            let freeness = cp_rep::freeness_pattern_failures(&report);
            let ok = report.holds() && freeness.is_empty();
            all &= ok;
            let nonzero: Vec<String> = report
                .degrees
                .iter()
                .filter(|s| s.tate_even + s.tate_odd > 0)
                .map(|s| s.degree.to_string())
                .collect();
            out!(
                "lemma32 p={p} k={k} degrees<={d}: z_k^{} kills Tate cohomology ... {}; free in degrees r={}..{} mod p ... {}",
                k + 1,
                mark(report.holds()),
                k + 1,
                p - 1,
                mark(freeness.is_empty())
            );
            out!("  nonzero Tate cohomology in degrees {}", nonzero.join(" "));
            if !report.failures.is_empty() {
                out!("  nilpotence fails from degrees {:?}", report.failures);
            }
            if !freeness.is_empty() {
                out!("  not free in degrees {freeness:?}");
            }
        }
    }
    Ok(if all { Outcome::Verified } else { Outcome::Failed })
}

fn verify_congruence(prime: Option<u64>, max_prime: u64) -> Result<Outcome> {
    let list: Vec<HeightParams> = match prime {
        Some(p) => vec![params(p)?],
        None => {
            if max_prime > mod_arith::MAX_PRIME {
                return Err(Error::PrimeOutOfRange {
                    p: max_prime,
                    max: mod_arith::MAX_PRIME,
                }
                .into());
            }
            mod_arith::odd_primes_up_to(max_prime)
                .map(HeightParams::new)
                .collect::<std::result::Result<_, _>>()?
        }
    };
    let failures: Vec<u64> = list
        .iter()
        .filter(|p| !mod_arith::congruence_check(p))
        .map(HeightParams::p)
        .collect();
    let first = list.first().map_or(0, HeightParams::p);
    let last = list.last().map_or(0, HeightParams::p);
    out!(
        "congruence (n/2)(n-2)p + (p^n-1)/n = 0 mod n^2 for {} odd primes {first}..={last} ... {}",
        list.len(),
        mark(failures.is_empty())
    );
    if !failures.is_empty() {
        out!("  fails at p = {failures:?}");
        return Ok(Outcome::Failed);
    }
    Ok(Outcome::Verified)
}

fn verify_freeness(prime: Option<u64>, max_degree: Option<usize>) -> Result<Outcome> {
    let cap = max_dim()?;
    let mut all = true;
    for params in primes_or_default(prime, &[3, 5])? {
        let p = params.p();
        let d = max_degree.unwrap_or(2 * p as usize);
        for k in 0..=params.n() {
            let u = cp_rep::u_k_module(&params, k)?;
            let algebra = cp_rep::SymmetricAlgebra::new(u, d, cap)?;
            let mut free_degrees = Vec::new();
            let mut mismatches = Vec::new();
            for (m, module) in algebra.modules().iter().enumerate() {
                let free = cp_rep::jordan_decompose(module)?.is_free(p as u32);
                let tate = cp_rep::tate_cohomology(module)?;
                let vanishes = tate.even_dim == 0 && tate.odd_dim == 0;
                if free != vanishes {
                    mismatches.push(m);
                }
                if free {
                    free_degrees.push(m.to_string());
                }
            }
            all &= mismatches.is_empty();
            out!(
                "freeness p={p} k={k} degrees<={d}: free in {} ... free <=> Tate vanishing {}",
                if free_degrees.is_empty() { "none".to_string() } else { free_degrees.join(" ") },
                mark(mismatches.is_empty())
            );
            if !mismatches.is_empty() {
                out!("  disagreement in degrees {mismatches:?}");
            }
        }
    }
    Ok(if all { Outcome::Verified } else { Outcome::Failed })
}

#[derive(Serialize)]
struct SympowReport {
    p: u64,
    k: u64,
    degree: usize,
    dim: usize,
    jordan: Vec<usize>,
    free: bool,
    tate_even_dim: usize,
    tate_odd_dim: usize,
    /// Representatives of Tate cohomology as polynomials in the z_i.
    tate_even_basis: Vec<String>,
    tate_odd_basis: Vec<String>,
}

fn polynomial(module: &CpModule, v: &[u32]) -> String {
    let labels = module.labels().unwrap_or_default();
    let terms: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(c, _)| **c != 0)
        .map(|(c, l)| if *c == 1 { l.clone() } else { format!("{c} {l}") })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn sympow(prime: u64, k: u64, degree: usize) -> Result<Outcome> {
    let params = params(prime)?;
    let u = cp_rep::u_k_module(&params, k)?;
    let module = cp_rep::symmetric_power(&u, degree, max_dim()?)?;
    let jordan = cp_rep::jordan_decompose(&module)?;
    let tate = cp_rep::tate_cohomology(&module)?;
    let report = SympowReport {
        p: prime,
        k,
        degree,
        dim: module.dim(),
        free: jordan.is_free(prime as u32),
        jordan: jordan.blocks,
        tate_even_dim: tate.even_dim,
        tate_odd_dim: tate.odd_dim,
        tate_even_basis: tate.even_basis.iter().map(|v| polynomial(&module, v)).collect(),
        tate_odd_basis: tate.odd_basis.iter().map(|v| polynomial(&module, v)).collect(),
    };
    out!("{}", serde_json::to_string_pretty(&report)?);
    Ok(Outcome::Verified)
}
