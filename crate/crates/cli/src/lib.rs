//! Command-line front end for `primelab`.
//!
//! Every subcommand renders either a bare scalar (stdout only) or a table
//! preceded by `#` comment lines that echo the version and the parsed
//! configuration. The echo leaves out `--out`, `--workers` and
//! `--timestamp`, so equal computations give byte-identical artifacts.

pub mod args;
pub mod run;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde_json::json;

use crate::args::{Cli, Format};
use crate::run::{Failure, Outcome};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

/// Library operation → (subcommand, example arguments). Each operation is
/// reachable from exactly one subcommand.
pub const DISPATCH: &[(&str, &str, &[&str])] = &[
    ("primes_in", "pi", &["pi", "--primes", "11", "31"]),
    ("is_prime", "pi", &["pi", "--is-prime", "561"]),
    ("pi", "pi", &["pi", "--x", "100"]),
    ("pi_legendre", "pi", &["pi", "--x", "30", "--method", "legendre"]),
    ("pi_interval", "pi", &["pi", "--x", "10", "--interval", "20"]),
    ("pi_ap", "pi", &["pi", "--x", "20", "--q", "4", "--a", "3"]),
    ("brun_titchmarsh_ratio", "pi", &["pi", "--x", "1e6", "--bt", "1000"]),
    ("theta", "theta", &["theta", "--x", "10"]),
    ("theta_ap", "theta", &["theta", "--x", "10", "--q", "4", "--a", "1"]),
    ("psi", "psi", &["psi", "--x", "10"]),
    ("psi_minus_theta", "psi", &["psi", "--x", "100", "--minus-theta"]),
    ("sign_change_scan", "psi", &["psi", "--sign-changes", "2", "1000", "1"]),
    ("mangoldt_range", "psi", &["psi", "--lambda", "1", "20"]),
    ("mertens", "mertens", &["mertens", "--x", "10"]),
    ("squarefree_count", "mertens", &["mertens", "--x", "100", "--squarefree"]),
    ("mertens_envelope", "mertens", &["mertens", "--envelope", "2", "1e5", "40"]),
    ("mobius_range", "mertens", &["mertens", "--mu", "1", "31"]),
    ("li", "li", &["li", "--x", "100"]),
    ("ei", "li", &["li", "--ei", "-3", "2"]),
    ("integral_envelope_check", "li", &["li", "--envelope", "0.5", "1", "1e6"]),
    ("pi_from_theta", "convert", &["convert", "--check", "primes", "--x", "1000"]),
    ("theta_from_pi", "convert", &["convert", "--check", "primes", "--x", "1000"]),
    ("mangoldt_log_sum", "convert", &["convert", "--check", "primes", "--x", "1000"]),
    ("reciprocal_prime_sum", "convert", &["convert", "--check", "primes", "--x", "1000"]),
    ("ap_conversions", "convert", &["convert", "--check", "progression", "--x", "1000", "--q", "4", "--a", "3"]),
    ("psi_landau", "explicit", &["explicit", "--x", "100.5", "--k", "100"]),
    ("pi_riemann", "explicit", &["explicit", "--x", "1000", "--pi"]),
    ("load_zeros", "zeros", &["zeros"]),
    ("zero_count_check", "zeros", &["zeros", "--check", "--T", "25.02"]),
    ("density_scan", "scan-density", &["scan-density", "--lo", "1e6", "--hi", "1e7", "--samples", "12"]),
    (
        "maier_ratio_stats",
        "scan-density",
        &["scan-density", "--lo", "1e4", "--hi", "1e6", "--samples", "40", "--maier", "2"],
    ),
    ("bhp_gap_check", "scan-gap", &["scan-gap", "--lo", "1000", "--hi", "1e6", "--samples", "200"]),
    ("interval_variance", "scan-variance", &["scan-variance", "--n", "1e5", "--y", "100"]),
    ("increment_deviation", "scan-variance", &["scan-variance", "--increments", "1e6", "--count", "8"]),
    ("build_profile", "profile-error", &["profile-error", "--lo", "10", "--hi", "1e6", "--samples", "30"]),
    (
        "envelope_report",
        "profile-error",
        &["profile-error", "--lo", "1e4", "--hi", "1e6", "--samples", "30", "--envelope"],
    ),
    ("epsilon_fit", "fit-epsilon", &["fit-epsilon", "--lo", "1e3", "--hi", "1e6", "--samples", "30"]),
];

/// Bytes for stdout (or the `--out` file), a diagnostic for stderr and the
/// exit code.
pub struct Rendered {
    pub artifact: Option<Vec<u8>>,
    pub diagnostic: Option<String>,
    pub code: i32,
}

fn config_echo(cli: &Cli) -> serde_json::Value {
    serde_json::to_value(cli).expect("config serializes")
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn render(cli: &Cli, out: &Outcome) -> Vec<u8> {
    let stamp = cli.timestamp.then(timestamp);
    match cli.format {
        Format::Csv => {
            if let (Some(s), None) = (&out.scalar, &cli.out) {
                return format!("{s}\n").into_bytes();
            }
            let mut text = format!("# primelab {VERSION}\n# operation: {}\n", out.operation);
            text.push_str(&format!("# config: {}\n", config_echo(cli)));
            if let Some(ts) = stamp {
                text.push_str(&format!("# generated: {ts}\n"));
            }
            text.push_str(&out.table.to_csv());
            text.into_bytes()
        }
        Format::Json => {
            let mut doc = json!({
                "primelab": VERSION,
                "operation": out.operation,
                "config": config_echo(cli),
                "result": out.result,
            });
            if let Some(ts) = stamp {
                doc["generated"] = json!(ts);
            }
            let mut s = serde_json::to_string_pretty(&doc).expect("json renders");
            s.push('\n');
            s.into_bytes()
        }
    }
}

/// Parse `argv` (program name first), run, and render. Nothing is written;
/// the only file access is reading a zero table.
pub fn execute<I, T>(argv: I) -> Rendered
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Rendered { artifact: Some(text.into_bytes()), diagnostic: None, code }
            } else {
                Rendered { artifact: None, diagnostic: Some(text.trim_end().to_string()), code }
            };
        }
    };
    let outcome = match cli.workers {
        Some(n) => primelab::par::with_workers(n as usize, || run::dispatch(&cli)),
        None => run::dispatch(&cli),
    };
    match outcome {
        Ok(o) => {
            let bytes = render(&cli, &o);
            match &o.violation {
                Some(v) => Rendered {
                    artifact: Some(bytes),
                    diagnostic: Some(format!("assertion failed: {v}")),
                    code: EXIT_ASSERTION,
                },
                None => Rendered { artifact: Some(bytes), diagnostic: None, code: EXIT_OK },
            }
        }
        Err(Failure::Usage(m)) => {
            Rendered { artifact: None, diagnostic: Some(format!("usage error: {m}")), code: EXIT_USAGE }
        }
        Err(Failure::Data(e)) => Rendered { artifact: None, diagnostic: Some(format!("error: {e}")), code: EXIT_DATA },
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let out_path = Cli::try_parse_from(&argv).ok().and_then(|c| c.out);
    let r = execute(&argv);
    if let Some(bytes) = &r.artifact {
        let written = match &out_path {
            Some(p) => std::fs::write(p, bytes),
            None => std::io::stdout().write_all(bytes),
        };
        if let Err(e) = written {
            eprintln!("error: cannot write output: {e}");
            return EXIT_DATA;
        }
    }
    if let Some(d) = &r.diagnostic {
        eprintln!("{d}");
    }
    r.code
}
