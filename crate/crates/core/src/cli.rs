//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jreduce::fricke_certificate;
use crate::kronecker::{
    hecke_certificate, kronecker_classical_check, modular_polynomial, verify_congruence, Mode,
    VerifyOptions, AUTO_SAMPLE, DEFAULT_TARGET,
};
use crate::modforms::FunctionSpec;
use crate::qseries::QSeries;
use crate::transform::subject_level;
use crate::valuation::{primes_above, wP_series};

/// Exit status for a completed run whose verdict is negative.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for refused or failed runs.
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "modkron",
    version,
    about = "Exact q-expansions and Kronecker-type congruence checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Structured,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    CuspInfinity,
    AllCosets,
    Sampled,
    Auto,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a q-expansion with `prec` coefficients from `min(lead, 0)` on.
    Expand {
        #[arg(value_name = "F", required_unless_present = "f")]
        subject: Option<String>,
        #[arg(long = "f", conflicts_with = "subject")]
        f: Option<String>,
        #[arg(long, default_value_t = 10)]
        prec: usize,
    },
    /// Check the congruence at the cusps selected by `--mode`.
    Verify {
        #[arg(long = "f")]
        f: String,
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Cusps drawn in sampled mode, in addition to the identity.
        #[arg(long, default_value_t = AUTO_SAMPLE)]
        samples: usize,
        /// Certified coefficients per cusp.
        #[arg(long, default_value_t = DEFAULT_TARGET)]
        prec: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allow p outside +-1 mod N and only report what is observed.
        #[arg(long)]
        negative_control: bool,
    },
    /// Classical modular polynomial and the check against (x^p - y)(x - y^p).
    Modpoly {
        #[arg(long)]
        p: u64,
        /// Window of the conjugate expansions.
        #[arg(long, default_value_t = 60)]
        prec: usize,
    },
    /// Series valuation at each prime above p.
    Valuation {
        #[arg(long = "f")]
        f: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 20)]
        prec: usize,
    },
    /// Characteristic polynomial of an orbit over Z[j]: a Fricke function's
    /// orbit, or that of j(p tau) when the subject is j.
    Integrality {
        #[arg(long = "f")]
        f: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 60)]
        prec: usize,
    },
}

/// Everything a run was asked to do, echoed in structured output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub function: Option<String>,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub p: Option<u64>,
    pub precision: usize,
    pub mode: Option<ModeArg>,
    pub seed: Option<u64>,
    pub negative_control: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// What a command produced: text, its structured form, and the exit status.
pub struct Outcome {
    pub text: String,
    pub result: Value,
    pub status: i32,
}

impl Outcome {
    fn ok(text: String, result: Value) -> Self {
        Self {
            text,
            result,
            status: 0,
        }
    }
}

fn parse_subject(s: &str) -> Result<FunctionSpec> {
    s.parse()
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

impl Command {
    pub fn config(&self, output: &OutputArgs) -> RunConfig {
        let mut c = RunConfig {
            command: String::new(),
            function: None,
            n: None,
            p: None,
            precision: 0,
            mode: None,
            seed: None,
            negative_control: false,
            format: output.format,
            out: output.out.clone(),
        };
        match self {
            Self::Expand { subject, f, prec } => {
                c.command = "expand".into();
                c.function = subject.clone().or_else(|| f.clone());
                c.precision = *prec;
            }
            Self::Verify {
                f,
                n,
                p,
                mode,
                prec,
                seed,
                negative_control,
                ..
            } => {
                c.command = "verify".into();
                c.function = Some(f.clone());
                c.n = *n;
                c.p = Some(*p);
                c.precision = *prec;
                c.mode = Some(*mode);
                c.seed = Some(*seed);
                c.negative_control = *negative_control;
            }
            Self::Modpoly { p, prec } => {
                c.command = "modpoly".into();
                c.p = Some(*p);
                c.precision = *prec;
            }
            Self::Valuation { f, p, prec } => {
                c.command = "valuation".into();
                c.function = Some(f.clone());
                c.p = Some(*p);
                c.precision = *prec;
            }
            Self::Integrality { f, p, prec } => {
                c.command = "integrality".into();
                c.function = Some(f.clone());
                c.p = *p;
                c.precision = *prec;
            }
        }
        c
    }

    pub fn execute(&self) -> Result<Outcome> {
        match self {
            Self::Expand { subject, f, prec } => {
                let spec = parse_subject(subject.as_deref().or(f.as_deref()).unwrap_or_default())?;
                let s = expand_window(&spec, *prec)?;
                let result = json!({
                    "series": s.to_string(),
                    "leading_exponent": s.leading_exponent().map(|e| e.to_string()),
                    "precision": s.precision().map(|e| e.to_string()),
                    "level": s.level(),
                });
                Ok(Outcome::ok(s.to_string(), result))
            }
            Self::Verify {
                f,
                n,
                p,
                mode,
                samples,
                prec,
                seed,
                negative_control,
            } => {
                if *prec < 1 {
                    return Err(Error::InsufficientPrecision(
                        "precision must be at least 1".into(),
                    ));
                }
                let spec = parse_subject(f)?;
                let level = subject_level(&spec)?;
                if let Some(n) = n {
                    if *n != level {
                        return Err(Error::Parse(format!(
                            "{spec} has level {level}, not N = {n}"
                        )));
                    }
                }
                let mode = match mode {
                    ModeArg::CuspInfinity => Mode::CuspInfinity,
                    ModeArg::AllCosets => Mode::AllCosets,
                    ModeArg::Sampled => Mode::Sampled {
                        count: *samples,
                        seed: *seed,
                    },
                    ModeArg::Auto => Mode::Auto { seed: *seed },
                };
                let opts = VerifyOptions {
                    target: *prec,
                    negative_control: *negative_control,
                };
                let report = verify_congruence(&spec, *p, mode, opts)?;
                let status = if report.passed() { 0 } else { EXIT_FAIL };
                Ok(Outcome {
                    text: report.to_string(),
                    result: to_value(&report),
                    status,
                })
            }
            Self::Modpoly { p, prec } => {
                let phi = modular_polynomial(*p, *prec as i64)?;
                let check = kronecker_classical_check(&phi);
                let distinct = phi.coeffs().keys().filter(|(i, k)| i >= k).count();
                let text = format!(
                    "Phi_{p}(x, y) = {phi}\nnonzero coefficients: {} ({distinct} up to symmetry)\nsymmetric: {}\nmonic in x of degree {}: {}\nKronecker check: {check}",
                    phi.coeffs().len(),
                    phi.is_symmetric(),
                    p + 1,
                    phi.is_monic_in_x()
                );
                let triples: Vec<Value> = phi
                    .triples()
                    .into_iter()
                    .map(|(i, k, c)| json!([i, k, c.to_string()]))
                    .collect();
                let result = json!({
                    "p": p,
                    "coefficients": triples,
                    "symmetric": phi.is_symmetric(),
                    "monic": phi.is_monic_in_x(),
                    "kronecker_check": check,
                });
                Ok(Outcome::ok(text, result))
            }
            Self::Valuation { f, p, prec } => {
                let spec = parse_subject(f)?;
                let s = spec.expand((*prec as i64).max(1))?;
                let mut lines = vec![format!("{spec} below q^{prec}")];
                let mut entries = Vec::new();
                for prime in primes_above(*p, s.level(), 8)? {
                    let w = wP_series(&s, &prime)?;
                    lines.push(format!("  w_P at P = {prime}: {w}"));
                    entries.push(json!({ "prime": prime.to_string(), "valuation": w.to_string() }));
                }
                Ok(Outcome::ok(
                    lines.join("\n"),
                    json!({ "subject": spec.to_string(), "valuations": entries }),
                ))
            }
            Self::Integrality { f, p, prec } => {
                let cert = match (parse_subject(f)?, p) {
                    (FunctionSpec::Fricke(v), _) => fricke_certificate(v)?,
                    (FunctionSpec::J, Some(p)) => hecke_certificate(*p, *prec as i64)?,
                    (FunctionSpec::J, None) => {
                        return Err(Error::Parse("the orbit of j(p tau) needs --p".into()));
                    }
                    (other, _) => {
                        return Err(Error::Unsupported(format!(
                            "integrality certificate for {other}"
                        )))
                    }
                };
                let status = if cert.monic && cert.all_integral {
                    0
                } else {
                    EXIT_FAIL
                };
                Ok(Outcome {
                    text: cert.to_string(),
                    result: to_value(&cert),
                    status,
                })
            }
        }
    }
}

/// `prec` coefficients on the series' exponent lattice `(1/M) Z` starting at
/// `min(leading exponent, 0)`.
pub fn expand_window(spec: &FunctionSpec, prec: usize) -> Result<QSeries> {
    if prec < 1 {
        return Err(Error::InsufficientPrecision(
            "precision must be at least 1".into(),
        ));
    }
    let mut input = prec as i64 + 1;
    loop {
        let s = spec.expand(input)?;
        let n = s.exp_denom() as i64;
        let lead = s
            .leading_exponent()
            .unwrap_or_else(|| s.precision().unwrap_or_default());
        let bound = lead.min(Rational64::from_integer(0)) + Rational64::new(prec as i64, n);
        if s.precision().is_some_and(|p| p >= bound) {
            return Ok(s.truncate(bound));
        }
        input += Integer::div_ceil(&(prec as i64), &n) + 1;
    }
}

/// Run a parsed command line; returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let config = cli.command.config(&cli.output);
    let start = Instant::now();
    let outcome = cli.command.execute();
    let timing_ms = start.elapsed().as_millis() as u64;
    let (rendered, status) = match (&outcome, cli.output.format) {
        (Ok(o), Format::Text) => (o.text.clone(), o.status),
        (Ok(o), Format::Structured) => (structured(&config, o.result.clone(), timing_ms), o.status),
        (Err(e), Format::Text) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
        (Err(e), Format::Structured) => (
            structured(&config, json!({ "error": e.to_string() }), timing_ms),
            EXIT_ERROR,
        ),
    };
    match &cli.output.out {
        Some(path) => {
            if let Err(e) = fs::write(path, rendered + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_ERROR;
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{rendered}");
        }
    }
    status
}

fn structured(config: &RunConfig, result: Value, timing_ms: u64) -> String {
    let doc = json!({
        "command": config.command,
        "config": config,
        "result": result,
        "timing_ms": timing_ms,
    });
    serde_json::to_string_pretty(&doc).expect("json values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> Result<Outcome> {
        let cli =
            Cli::try_parse_from(std::iter::once("modkron").chain(args.iter().copied())).unwrap();
        cli.command.execute()
    }

    #[test]
    fn expand_examples() {
        assert_eq!(
            exec(&["expand", "j", "--prec", "4"]).unwrap().text,
            "q^-1 + 744 + 196884*q + 21493760*q^2 + O(q^3)"
        );
        assert_eq!(
            exec(&["expand", "eta(2^24 * 1^-24)", "--prec", "3"])
                .unwrap()
                .text,
            "q + 24*q^2 + O(q^3)"
        );
        let f = exec(&["expand", "--f", "fricke(2,0,1)", "--prec", "3"]).unwrap();
        assert_eq!(f.result["leading_exponent"], "-1");
        assert!(exec(&["expand", "jay"]).is_err());
    }

    #[test]
    fn verify_statuses() {
        let ok = exec(&[
            "verify",
            "--f",
            "j",
            "--N",
            "1",
            "--p",
            "2",
            "--mode",
            "all-cosets",
            "--prec",
            "10",
        ])
        .unwrap();
        assert_eq!(ok.status, 0);
        assert_eq!(ok.result["verdict"], "pass");
        assert!(matches!(
            exec(&["verify", "--f", "fricke(5,0,1)", "--N", "5", "--p", "3"]),
            Err(Error::Hypothesis(_))
        ));
        assert!(exec(&["verify", "--f", "fricke(5,0,1)", "--N", "4", "--p", "11"]).is_err());
        let control = exec(&[
            "verify",
            "--f",
            "fricke(5,1,0)",
            "--p",
            "7",
            "--mode",
            "sampled",
            "--samples",
            "40",
            "--seed",
            "3",
            "--prec",
            "20",
            "--negative-control",
        ])
        .unwrap();
        assert_eq!(control.status, EXIT_FAIL);
    }

    #[test]
    fn modpoly_and_certificates() {
        let two = exec(&["modpoly", "--p", "2"]).unwrap();
        assert!(two.text.ends_with("Kronecker check: true"));
        assert_eq!(two.result["coefficients"].as_array().unwrap().len(), 11);
        assert!(exec(&["modpoly", "--p", "7"]).is_err());
        let cert = exec(&["integrality", "--f", "fricke(2,0,1)"]).unwrap();
        assert_eq!(cert.status, 0);
        assert_eq!(
            exec(&["integrality", "--f", "fricke(5,0,1)"])
                .unwrap()
                .status,
            EXIT_FAIL
        );
        let v = exec(&["valuation", "--f", "j", "--p", "2", "--prec", "5"]).unwrap();
        assert_eq!(v.result["valuations"][0]["valuation"], "0");
    }

    #[test]
    fn structured_document_shape() {
        let cli = Cli::try_parse_from([
            "modkron",
            "expand",
            "j",
            "--prec",
            "2",
            "--format",
            "structured",
        ])
        .unwrap();
        let config = cli.command.config(&cli.output);
        let o = cli.command.execute().unwrap();
        let doc: Value = serde_json::from_str(&structured(&config, o.result, 1)).unwrap();
        for key in ["command", "config", "result", "timing_ms"] {
            assert!(doc.get(key).is_some(), "{key}");
        }
        assert_eq!(doc["config"]["function"], "j");
    }
}
