use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use etaforge::campaign::{self, CampaignConfig, Suite, VerificationReport, REPORT_SCHEMA};
use etaforge::eval::{self, DEFAULT_TOL};
use etaforge::modgroup::{decompose, evaluate_word};
use etaforge::par::Execution;
use etaforge::{dedekind_sum_fast, dedekind_sum_naive, BigInt, ModularMatrix, UpperHalfPoint};
use serde::Serialize;
use serde_json::json;

mod complex;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "etaforge", version, about = "Dedekind eta function, Dedekind sums and the modular group")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,

    /// Write the report to FILE instead of stdout.
    #[arg(long, value_name = "FILE", global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate η(τ).
    Eval {
        /// Point in the upper half-plane, written RE+IMi.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_tau)]
        tau: UpperHalfPoint,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Relative truncation tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_positive_f64)]
        tol: f64,
    },
    /// Compute the Dedekind sum s(h, k).
    Dedekind {
        #[arg(allow_negative_numbers = true)]
        h: BigInt,
        #[arg(allow_negative_numbers = true)]
        k: BigInt,
        #[arg(long, value_enum, default_value_t = Mode::Fast)]
        mode: Mode,
    },
    /// Run a verification campaign.
    Verify {
        /// One of jtp, pentagonal, reciprocity, functional-eq, theta, poisson, omega, all.
        suite: SuiteArg,
        /// Pass threshold for the numeric suites (defaults: functional-eq 1e-10, theta and poisson 1e-12).
        #[arg(long, value_parser = parse_positive_f64)]
        tol: Option<f64>,
        /// Series order (jtp, pentagonal) or bound on h, k (reciprocity).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        order: Option<u64>,
        /// Number of random trials (functional-eq, theta, poisson, omega).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
        #[arg(long, env = "ETAFORGE_SEED", default_value_t = 0)]
        seed: u64,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Write a unimodular matrix as a word in S and T.
    Decompose {
        #[arg(allow_negative_numbers = true)]
        a: BigInt,
        #[arg(allow_negative_numbers = true)]
        b: BigInt,
        #[arg(allow_negative_numbers = true)]
        c: BigInt,
        #[arg(allow_negative_numbers = true)]
        d: BigInt,
        /// Multiply the word back out and compare.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Product,
    Pentagonal,
    Character,
    Transformed,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Naive,
    Fast,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SuiteArg {
    One(Suite),
    All,
}

impl FromStr for SuiteArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            Ok(SuiteArg::All)
        } else {
            s.parse().map(SuiteArg::One)
        }
    }
}

fn parse_tau(s: &str) -> Result<UpperHalfPoint, String> {
    let z = complex::parse_complex(s)?;
    UpperHalfPoint::from_complex(z).map_err(|e| e.to_string())
}

fn parse_positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

/// Rendered output plus exit status.
struct Outcome {
    text: String,
    code: u8,
}

/// Shortest round-trip form, switching to scientific notation outside
/// `[1e-4, 1e16)`.
fn fmt_real(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_complex(re: f64, im: f64) -> String {
    let im_s = fmt_real(im);
    if im_s.starts_with('-') {
        format!("{}{im_s}i", fmt_real(re))
    } else {
        format!("{}+{im_s}i", fmt_real(re))
    }
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn cmd_eval(tau: UpperHalfPoint, method: Method, tol: f64, format: Format) -> Result<Outcome, String> {
    let chosen = match method {
        Method::Auto if tau.im() < eval::TRANSFORM_THRESHOLD => Method::Transformed,
        Method::Auto => Method::Pentagonal,
        m => m,
    };
    let r = match chosen {
        Method::Product => eval::eta_product_eval(tau, tol),
        Method::Pentagonal => eval::eta_pentagonal_eval(tau, tol),
        Method::Character => eval::eta_char_eval(tau, tol),
        Method::Transformed | Method::Auto => eval::eta_transformed_eval(tau, tol),
    }
    .map_err(|e| e.to_string())?;
    let text = match format {
        Format::Human => format!(
            "eta({}) = {}\nmethod: {}\ntail_bound: {:e}\nterms_used: {}\n",
            fmt_complex(tau.re(), tau.im()),
            fmt_complex(r.value.re, r.value.im),
            chosen.to_possible_value().unwrap().get_name(),
            r.tail_bound,
            r.terms_used
        ),
        Format::Json => to_json(&json!({
            "schema": REPORT_SCHEMA,
            "tau": { "re": tau.re(), "im": tau.im() },
            "method": chosen,
            "value": { "re": r.value.re, "im": r.value.im },
            "tail_bound": r.tail_bound,
            "terms_used": r.terms_used,
        })),
    };
    Ok(Outcome { text, code: 0 })
}

fn cmd_dedekind(h: &BigInt, k: &BigInt, mode: Mode, format: Format) -> Result<Outcome, String> {
    let naive = matches!(mode, Mode::Naive | Mode::Both)
        .then(|| dedekind_sum_naive(h, k))
        .transpose()
        .map_err(|e| e.to_string())?;
    let fast = matches!(mode, Mode::Fast | Mode::Both)
        .then(|| dedekind_sum_fast(h, k))
        .transpose()
        .map_err(|e| e.to_string())?;
    let equal = match (&naive, &fast) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    let text = match format {
        Format::Human => {
            let mut s = String::new();
            match (&naive, &fast) {
                (Some(a), Some(b)) => {
                    writeln!(s, "naive: {a}").unwrap();
                    writeln!(s, "fast: {b}").unwrap();
                    writeln!(s, "{}", if a == b { "equal" } else { "MISMATCH" }).unwrap();
                }
                (Some(v), None) | (None, Some(v)) => writeln!(s, "{v}").unwrap(),
                (None, None) => unreachable!(),
            }
            s
        }
        Format::Json => to_json(&json!({
            "schema": REPORT_SCHEMA,
            "h": h.to_string(),
            "k": k.to_string(),
            "naive": naive.as_ref().map(|v| v.to_string()),
            "fast": fast.as_ref().map(|v| v.to_string()),
            "equal": equal,
        })),
    };
    let code = if equal == Some(false) { EXIT_FAIL } else { 0 };
    Ok(Outcome { text, code })
}

fn human_report(r: &VerificationReport, s: &mut String) {
    writeln!(
        s,
        "{} {}: trials={} max_residual={:e} tolerance={:e} seed={} wall_time={:.3?}",
        if r.passed() { "PASS" } else { "FAIL" },
        r.campaign,
        r.trials,
        r.max_residual,
        r.tolerance,
        r.seed,
        r.wall_time
    )
    .unwrap();
    for f in &r.failures {
        match (&f.residual, &f.error) {
            (_, Some(e)) => writeln!(s, "  failed: {} (error: {e})", f.input),
            (Some(res), None) => writeln!(s, "  failed: {} (residual {res:e})", f.input),
            (None, None) => writeln!(s, "  failed: {} (residual not finite)", f.input),
        }
        .unwrap();
    }
}

fn cmd_verify(suite: SuiteArg, cfg: &CampaignConfig, format: Format) -> Outcome {
    let reports = match suite {
        SuiteArg::One(s) => vec![campaign::run_suite(s, cfg)],
        SuiteArg::All => campaign::run_all(cfg),
    };
    let passed = reports.iter().all(VerificationReport::passed);
    let text = match (format, suite) {
        (Format::Human, _) => {
            let mut s = String::new();
            for r in &reports {
                human_report(r, &mut s);
            }
            s
        }
        (Format::Json, SuiteArg::One(_)) => to_json(&reports[0]),
        (Format::Json, SuiteArg::All) => to_json(&json!({
            "schema": REPORT_SCHEMA,
            "passed": passed,
            "reports": reports,
        })),
    };
    Outcome {
        text,
        code: if passed { 0 } else { EXIT_FAIL },
    }
}

fn cmd_decompose(entries: [BigInt; 4], check: bool, format: Format) -> Result<Outcome, String> {
    let [a, b, c, d] = entries;
    let m = ModularMatrix::new(a, b, c, d).map_err(|e| e.to_string())?;
    let word = decompose(&m);
    let ok = check.then(|| evaluate_word(&word) == m);
    let text = match format {
        Format::Human => {
            let mut s = format!("{word}\n");
            if let Some(ok) = ok {
                writeln!(s, "check {}", if ok { "OK" } else { "FAILED" }).unwrap();
            }
            s
        }
        Format::Json => to_json(&json!({
            "schema": REPORT_SCHEMA,
            "matrix": [m.a().to_string(), m.b().to_string(), m.c().to_string(), m.d().to_string()],
            "word": word.to_string(),
            "check": ok,
        })),
    };
    let code = if ok == Some(false) { EXIT_FAIL } else { 0 };
    Ok(Outcome { text, code })
}

fn run(cli: Cli) -> Result<Outcome, String> {
    let format = cli.format;
    match cli.command {
        Command::Eval { tau, method, tol } => cmd_eval(tau, method, tol, format),
        Command::Dedekind { h, k, mode } => cmd_dedekind(&h, &k, mode, format),
        Command::Verify {
            suite,
            tol,
            order,
            trials,
            seed,
            sequential,
        } => {
            let cfg = CampaignConfig {
                tolerance: tol,
                order: order.map(|n| n as usize),
                trials: trials.map(|n| n as usize),
                seed,
                execution: if sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
            };
            Ok(cmd_verify(suite, &cfg, format))
        }
        Command::Decompose { a, b, c, d, check } => cmd_decompose([a, b, c, d], check, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(outcome) => {
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, &outcome.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            } else {
                print!("{}", outcome.text);
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
