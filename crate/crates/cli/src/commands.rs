//! Argument grammar and the verb implementations.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num::{Signed, Zero};
use serde::Serialize;

use crate::config::{RunConfig, SuiteName};
use crate::report::{fmt_f64, write_reports, SuiteReport};
use crate::suites::{run_suite, run_suites};
use crate::{EXIT_CERT_FAIL, EXIT_PASS, EXIT_USAGE};

use suq2_core::dirac::{multiplicity_table, DiracSpec};
use suq2_core::fredholm::{
    canonical_pairing, multiplicity_pairing, sign_pairing, FredholmError, IndexCertificate,
};
use suq2_core::podles::{sphere_index_pairing, SphereProjection};
use suq2_core::scalar::{parse_rat, rat_int, Scalar};
use suq2_core::Rat;

#[derive(Parser)]
#[command(
    name = "suq2",
    version,
    about = "Exact certificates for quantum SU(2) and Podles sphere spectral triples",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run the configured certificate suites and write one report each.
    Verify(VerifyArgs),
    /// Compute one index pairing as a two-window certificate.
    Index(IndexArgs),
    /// Tabulate eigenvalue multiplicities and trace partial sums as CSV.
    Spectrum(SpectrumArgs),
    /// Run only the differential-calculus suite.
    Calculus(SuiteArgs),
    /// Run only the square-integrable-forms suite.
    L2(SuiteArgs),
    /// Run only the sphere suite.
    Sphere(SuiteArgs),
    /// Run only the algebra suite.
    Algebra(SuiteArgs),
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Path to a flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory the JSON reports are written under.
    #[arg(long, default_value = "reports")]
    pub out: PathBuf,
    /// Print the machine-readable summary instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct SuiteArgs {
    /// Path to a flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Deformation parameter as an exact rational, like 1/2.
    #[arg(long)]
    pub q: Option<String>,
    /// Sphere parameter as an exact rational, like 2 or 1/10.
    #[arg(long)]
    pub c: Option<String>,
    /// Also write the JSON report under this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct IndexArgs {
    /// Which pairing: `u`, `canonical`, `sphere`, or `multiplicity:<count>`.
    #[arg(long)]
    pub which: String,
    /// First window size; the certificate reruns at twice this.
    #[arg(long, default_value_t = 12)]
    pub window: u32,
    /// Deformation parameter for the pairings that depend on it.
    #[arg(long)]
    pub q: Option<String>,
    /// Sphere parameter, accepted for symmetry; the sphere pairing is
    /// parameter-free once the class is fixed.
    #[arg(long)]
    pub c: Option<String>,
    /// Print the certificate as JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Eigenvalue family: `generic` or `csv:<path>`.
    #[arg(long, default_value = "generic")]
    pub dirac: String,
    /// Summability exponents, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3])]
    pub p: Vec<u32>,
    /// Eigenvalue cutoffs, comma separated; at least one is required.
    #[arg(long, value_delimiter = ',', default_value = "")]
    pub lambda: Vec<String>,
    /// Scan radius for enumerating eigenvalues.
    #[arg(long, default_value_t = 66)]
    pub search: u32,
}

/// Parses and runs, translating every outcome into the exit-code contract.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::error::ErrorKind;
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            EXIT_PASS
        }
        Err(e) => {
            eprint!("{e}");
            EXIT_USAGE
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Index(args) => cmd_index(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Calculus(args) => cmd_single_suite(SuiteName::Calculus, args),
        Command::L2(args) => cmd_single_suite(SuiteName::L2, args),
        Command::Sphere(args) => cmd_single_suite(SuiteName::Sphere, args),
        Command::Algebra(args) => cmd_single_suite(SuiteName::Algebra, args),
    }
}

fn load_config(
    path: &Option<PathBuf>,
    q: &Option<String>,
    c: &Option<String>,
) -> Result<RunConfig, String> {
    let mut cfg = match path {
        Some(p) => RunConfig::from_file(p).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    if let Some(qs) = q {
        cfg.q = parse_rat(qs).map_err(|e| format!("--q: {e}"))?;
    }
    if let Some(cs) = c {
        cfg.c = parse_rat(cs).map_err(|e| format!("--c: {e}"))?;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    q: String,
    c: String,
    windows: &'a [u32],
    passed: bool,
    failed_checks: Vec<String>,
    reports: &'a [SuiteReport],
    written: Vec<String>,
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let cfg = match load_config(&args.config, &None, &None) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_USAGE;
        }
    };
    let reports = run_suites(&cfg);
    let paths = match write_reports(&args.out, &reports) {
        Ok(paths) => paths,
        Err(e) => {
            eprintln!("cannot write reports under {}: {e}", args.out.display());
            return EXIT_USAGE;
        }
    };
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.failed_names()
                .into_iter()
                .map(|n| format!("{}: {n}", r.suite))
                .collect::<Vec<_>>()
        })
        .collect();
    let passed = failed.is_empty();

    if args.json {
        let summary = VerifySummary {
            q: suq2_core::scalar::format_rat(&cfg.q),
            c: suq2_core::scalar::format_rat(&cfg.c),
            windows: &cfg.windows,
            passed,
            failed_checks: failed.clone(),
            reports: &reports,
            written: paths.iter().map(|p| p.display().to_string()).collect(),
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("summary serializes")
        );
    } else {
        for r in &reports {
            print!("{}", r.render_text());
        }
        println!(
            "verify: {} suites, {} reports under {}",
            reports.len(),
            paths.len(),
            args.out.display()
        );
        if !passed {
            println!("failing identities:");
            for name in &failed {
                println!("  {name}");
            }
        }
    }
    if passed {
        EXIT_PASS
    } else {
        EXIT_CERT_FAIL
    }
}

fn cmd_single_suite(name: SuiteName, args: SuiteArgs) -> i32 {
    let cfg = match load_config(&args.config, &args.q, &args.c) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_USAGE;
        }
    };
    let report = run_suite(name, &cfg);
    if let Some(dir) = &args.out {
        if let Err(e) = write_reports(dir, std::slice::from_ref(&report)) {
            eprintln!("cannot write reports under {}: {e}", dir.display());
            return EXIT_USAGE;
        }
    }
    if args.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
    if report.passed {
        EXIT_PASS
    } else {
        for name in report.failed_names() {
            eprintln!("certificate failed: {}: {name}", report.suite);
        }
        EXIT_CERT_FAIL
    }
}

enum WhichIndex {
    U,
    Canonical,
    Sphere,
    Multiplicity(i64),
}

fn parse_which(s: &str) -> Result<WhichIndex, String> {
    match s {
        "u" => Ok(WhichIndex::U),
        "canonical" => Ok(WhichIndex::Canonical),
        "sphere" => Ok(WhichIndex::Sphere),
        other => match other.strip_prefix("multiplicity:") {
            Some(count) => {
                let count: i64 = count
                    .parse()
                    .map_err(|_| format!("multiplicity needs an integer count, got `{count}`"))?;
                if count == 0 {
                    return Err("multiplicity count must be nonzero".to_string());
                }
                Ok(WhichIndex::Multiplicity(count))
            }
            None => Err(format!(
                "unknown pairing `{other}`; expected u, canonical, sphere, or multiplicity:<count>"
            )),
        },
    }
}

#[derive(Serialize)]
struct IndexJson {
    label: String,
    windows: [u32; 2],
    kernels: [usize; 2],
    cokernels: [usize; 2],
    index: i64,
}

fn print_index_cert(cert: &IndexCertificate, json: bool) {
    if json {
        let doc = IndexJson {
            label: cert.label.clone(),
            windows: [cert.windows.0, cert.windows.1],
            kernels: [cert.counts.0.kernel, cert.counts.1.kernel],
            cokernels: [cert.counts.0.cokernel, cert.counts.1.cokernel],
            index: cert.index,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("certificate serializes")
        );
    } else {
        println!("pairing: {}", cert.label);
        for (w, count) in [
            (cert.windows.0, &cert.counts.0),
            (cert.windows.1, &cert.counts.1),
        ] {
            println!(
                "window {w}: kernel {}, cokernel {}, index {}",
                count.kernel,
                count.cokernel,
                count.index()
            );
        }
        println!("index: {}", cert.index);
    }
}

fn cmd_index(args: IndexArgs) -> i32 {
    let which = match parse_which(&args.which) {
        Ok(which) => which,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_USAGE;
        }
    };
    if args.window < 8 {
        eprintln!("--window must be at least 8");
        return EXIT_USAGE;
    }
    let q = match args.q.as_deref().map(parse_rat).transpose() {
        Ok(q) => q.unwrap_or_else(|| suq2_core::scalar::rat(1, 2)),
        Err(e) => {
            eprintln!("--q: {e}");
            return EXIT_USAGE;
        }
    };
    let m = args.window;
    let outcome = match which {
        WhichIndex::U => sign_pairing(&DiracSpec::generic(), m),
        WhichIndex::Canonical => canonical_pairing(&q, &DiracSpec::generic(), m),
        WhichIndex::Sphere => sphere_index_pairing(m.max(12), SphereProjection::VacuumMinus, false),
        WhichIndex::Multiplicity(count) => multiplicity_pairing(count, m),
    };
    match outcome {
        Ok(cert) => {
            print_index_cert(&cert, args.json);
            EXIT_PASS
        }
        Err(e @ FredholmError::Unstable { .. }) => {
            eprintln!("certificate failed: {e}");
            EXIT_CERT_FAIL
        }
        Err(FredholmError::ZeroMultiplicity) => {
            eprintln!("multiplicity count must be nonzero");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("pairing failed: {e}");
            EXIT_CERT_FAIL
        }
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> i32 {
    let lambdas: Vec<&str> = args
        .lambda
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect();
    if lambdas.is_empty() {
        eprintln!("spectrum needs at least one --lambda cutoff");
        return EXIT_USAGE;
    }
    let mut cutoffs: Vec<Rat> = Vec::new();
    for s in lambdas {
        match parse_rat(s) {
            Ok(lam) if lam > rat_int(0) => cutoffs.push(lam),
            Ok(_) => {
                eprintln!("--lambda cutoffs must be positive, got `{s}`");
                return EXIT_USAGE;
            }
            Err(e) => {
                eprintln!("--lambda: {e}");
                return EXIT_USAGE;
            }
        }
    }
    if args.p.is_empty() || args.p.contains(&0) {
        eprintln!("--p exponents must be positive integers");
        return EXIT_USAGE;
    }
    let spec = match args.dirac.as_str() {
        "generic" => DiracSpec::generic(),
        other => match other.strip_prefix("csv:") {
            Some(path) => {
                let text = match std::fs::read_to_string(path) {
                    Ok(text) => text,
                    Err(e) => {
                        eprintln!("cannot read {path}: {e}");
                        return EXIT_USAGE;
                    }
                };
                match DiracSpec::from_csv(format!("csv:{path}"), &text, &DiracSpec::generic()) {
                    Ok(spec) => spec,
                    Err(e) => {
                        eprintln!("{path}: {e}");
                        return EXIT_USAGE;
                    }
                }
            }
            None => {
                eprintln!("unknown --dirac `{other}`; expected generic or csv:<path>");
                return EXIT_USAGE;
            }
        },
    };

    // One scan pays for every cutoff and exponent.
    let mut spectrum: Vec<Rat> = Vec::new();
    for i in 0..=args.search as i64 {
        for j in -(args.search as i64)..=args.search as i64 {
            let d = spec.eigenvalue(i, j).abs();
            if !d.is_zero() {
                spectrum.push(d);
            }
        }
    }

    let mut header = String::from("lambda,levels,count");
    for p in &args.p {
        header.push_str(&format!(",sum_p{p}"));
    }
    println!("{header}");
    for lam in &cutoffs {
        let table = multiplicity_table(&spec, lam, args.search);
        let levels = table.iter().filter(|(v, _)| !v.is_zero()).count();
        let count: u64 = table
            .iter()
            .filter(|(v, _)| !v.is_zero())
            .map(|(_, c)| *c)
            .sum();
        let mut row = format!("{},{levels},{count}", suq2_core::scalar::format_rat(lam));
        for p in &args.p {
            let sum: f64 = spectrum
                .iter()
                .filter(|d| *d <= lam)
                .map(|d| Scalar::to_f64(d).powi(-(*p as i32)))
                .sum();
            row.push_str(&format!(",{}", fmt_f64(sum)));
        }
        println!("{row}");
    }
    EXIT_PASS
}
