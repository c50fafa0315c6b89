//! `regpoly`: verify string C-group presentations, sweep parameter ranges,
//! reproduce the small-case tables and export certificates, atlases and
//! Hasse diagrams.
//!
//! Exit codes: 0 everything passed, 2 invalid parameters or usage,
//! 3 an enumeration limit was exceeded, 4 a check failed, 1 I/O failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regpoly::atlas::{
    hasse, paper_tables, sweep, verify, Atlas, AtlasRow, CertificateRecord, Family, Instance, RowStatus,
    SweepSpec, VerifyOptions, ATLAS_HEADER,
};
use regpoly::coset::{EnumerationLimits, EnumerationOptions, Strategy};
use regpoly::polytope::GraphFormat;
use regpoly::sggi::IntersectionMode;

const EXIT_IO: u8 = 1;
const EXIT_PARAM: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "regpoly", version, about = "Regular polytopes of 2-power order")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify one instance and print its certificate.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Build the face lattice and record the f-vector.
        #[arg(long)]
        polytope: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify every tuple in a parameter range and write an atlas.
    Sweep {
        #[arg(long, env = "REGPOLY_FAMILY", default_value = "G")]
        family: String,
        /// Rank range, `3..5` or `4`.
        #[arg(long, default_value = "3..4")]
        d: String,
        /// Exponent range.
        #[arg(long, default_value = "10")]
        n: String,
        /// Range for every entry of k.
        #[arg(long, default_value = "2..3")]
        k: String,
        #[arg(long, env = "REGPOLY_UNSAFE_PARAMS")]
        unsafe_params: bool,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, env = "REGPOLY_JOBS", default_value_t = 0)]
        jobs: usize,
        /// Write `-` in the timing column.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the reduced group A for every small-case tuple.
    PaperTables {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, env = "REGPOLY_JOBS", default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-emit a certificate or atlas: json, tsv, or (certificates) dot/tgf.
    Export {
        input: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Hasse diagram of a certified instance.
    Hasse {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, default_value = "dot")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, env = "REGPOLY_FAMILY", default_value = "G")]
    family: String,
    /// Rank; defaults to one more than the length of k.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<u32>,
    /// First exponent of family H.
    #[arg(long)]
    s: Option<u32>,
    /// Second exponent of family H.
    #[arg(long)]
    t: Option<u32>,
    /// Allow parameters outside the theorem's hypotheses.
    #[arg(long, env = "REGPOLY_UNSAFE_PARAMS")]
    unsafe_params: bool,
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, env = "REGPOLY_MAX_COSETS", default_value_t = EnumerationLimits::default().max_cosets)]
    max_cosets: usize,
    #[arg(long, env = "REGPOLY_MAX_DEDUCTIONS", default_value_t = EnumerationLimits::default().max_deductions)]
    max_deductions: usize,
    /// hlt or felsch.
    #[arg(long, env = "REGPOLY_STRATEGY", default_value = "hlt")]
    strategy: Strategy,
    /// full, pruned or recursive.
    #[arg(long, env = "REGPOLY_IP_MODE", default_value = "full")]
    ip_mode: IntersectionMode,
    /// Shorthand for `--ip-mode recursive`.
    #[arg(long, conflicts_with = "full_ip")]
    recursive_ip: bool,
    /// Shorthand for `--ip-mode full`.
    #[arg(long)]
    full_ip: bool,
    /// Run both the full and the recursive intersection checks.
    #[arg(long, env = "REGPOLY_CROSS_CHECK")]
    cross_check: bool,
}

impl EngineArgs {
    fn options(&self, polytope: bool) -> VerifyOptions {
        let mode = if self.recursive_ip {
            IntersectionMode::Recursive
        } else if self.full_ip {
            IntersectionMode::Full
        } else {
            self.ip_mode
        };
        VerifyOptions {
            enumeration: EnumerationOptions::new(
                EnumerationLimits {
                    max_cosets: self.max_cosets.max(1),
                    max_deductions: self.max_deductions.max(1),
                },
                self.strategy,
            ),
            mode,
            cross_check: self.cross_check,
            polytope,
        }
    }
}

/// A failure that maps to an exit code and a machine-readable status.
struct Failure {
    code: u8,
    status: &'static str,
    detail: String,
}

impl Failure {
    fn param(detail: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARAM,
            status: "param-invalid",
            detail: detail.into(),
        }
    }

    fn io(detail: impl Into<String>) -> Self {
        Failure {
            code: EXIT_IO,
            status: "io-error",
            detail: detail.into(),
        }
    }
}

impl From<regpoly::VerifyError> for Failure {
    fn from(e: regpoly::VerifyError) -> Self {
        let (code, status) = match e.reason() {
            "param-invalid" => (EXIT_PARAM, "param-invalid"),
            "limit-exceeded" => (EXIT_LIMIT, "limit-exceeded"),
            _ => (EXIT_FAILED, "check-failed"),
        };
        Failure {
            code,
            status,
            detail: e.to_string(),
        }
    }
}

fn parse_range<T: std::str::FromStr + Copy>(s: &str) -> Result<(T, T), Failure> {
    let bad = || Failure::param(format!("bad range {s:?}; expected `a..b` or `a`"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        }
        None => {
            let x = s.trim().parse().map_err(|_| bad())?;
            Ok((x, x))
        }
    }
}

fn instance(args: &InstanceArgs) -> Result<Instance, Failure> {
    let family: Family = args.family.parse().map_err(|e: regpoly::ParamError| Failure::param(e.to_string()))?;
    let k = match (family, args.s, args.t) {
        (Family::H, Some(s), Some(t)) => vec![s, t],
        (Family::H, None, None) if args.k.len() == 2 => args.k.clone(),
        (Family::H, _, _) => return Err(Failure::param("family H needs --s and --t")),
        _ => args.k.clone(),
    };
    if k.is_empty() {
        return Err(Failure::param("--k is required"));
    }
    let d = args.d.unwrap_or(k.len() + 1);
    if family.uses_n() && args.n.is_none() {
        return Err(Failure::param(format!("family {family} needs --n")));
    }
    Ok(Instance::new(family, d, args.n, k).with_unsafe(args.unsafe_params))
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn atlas_exit(atlas: &Atlas) -> u8 {
    if atlas.rows.iter().any(|r| matches!(r.status, RowStatus::Fail | RowStatus::Error)) {
        EXIT_FAILED
    } else if atlas.rows.iter().any(|r| r.status == RowStatus::LimitExceeded) {
        EXIT_LIMIT
    } else if atlas.rows.iter().any(|r| r.status == RowStatus::ParamInvalid) {
        EXIT_PARAM
    } else {
        0
    }
}

fn summary(r: &CertificateRecord) -> String {
    let order = match r.order_log2 {
        Some(e) => format!("2^{e}"),
        None => r.group_order.to_string(),
    };
    let ty: Vec<String> = r.schlafli_type.iter().map(u64::to_string).collect();
    format!(
        "{}: {} order {order} type {{{}}}",
        if r.passed { "pass" } else { "FAIL" },
        r.instance(),
        ty.join(",")
    )
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Verify {
            instance: args,
            engine,
            polytope,
            out,
        } => {
            let i = instance(&args)?;
            let v = verify(&i, &engine.options(polytope))?;
            eprintln!("{}", summary(&v.record));
            write_output(&out, &(v.record.to_json() + "\n"))?;
            Ok(if v.record.passed { 0 } else { EXIT_FAILED })
        }
        Command::Sweep {
            family,
            d,
            n,
            k,
            unsafe_params,
            engine,
            jobs,
            no_timing,
            out,
        } => {
            let spec = SweepSpec {
                family: family.parse().map_err(|e: regpoly::ParamError| Failure::param(e.to_string()))?,
                d: parse_range(&d)?,
                n: parse_range(&n)?,
                k: parse_range(&k)?,
                unsafe_params,
            };
            let atlas = sweep(&spec, &engine.options(false), jobs);
            let passed = atlas.rows.iter().filter(|r| r.status == RowStatus::Pass).count();
            eprintln!(
                "{} rows, {passed} passed, {} skipped",
                atlas.rows.len(),
                atlas.skipped.len()
            );
            write_output(&out, &atlas.to_tsv(!no_timing))?;
            Ok(atlas_exit(&atlas))
        }
        Command::PaperTables {
            engine,
            jobs,
            no_timing,
            out,
        } => {
            let atlas = paper_tables(&engine.options(false), jobs);
            for r in &atlas.rows {
                let expected = r.instance.n.map(|n| 1u64 << n);
                let mut tuple = vec![r.instance.l().unwrap_or(0)];
                tuple.extend(&r.instance.k);
                let tuple: Vec<String> = tuple.iter().map(u32::to_string).collect();
                eprintln!(
                    "{} rank {} ({}) |A| = {} expected {}",
                    r.status.id(),
                    r.instance.d,
                    tuple.join(","),
                    r.order.map_or("-".into(), |o| o.to_string()),
                    expected.map_or("-".into(), |o| o.to_string()),
                );
            }
            write_output(&out, &atlas.to_tsv(!no_timing))?;
            Ok(atlas_exit(&atlas))
        }
        Command::Export {
            input,
            format,
            engine,
            out,
        } => {
            let text = fs::read_to_string(&input).map_err(|e| Failure::io(format!("{}: {e}", input.display())))?;
            let format = format.to_ascii_lowercase();
            if text.trim_start().starts_with('{') {
                let record = CertificateRecord::from_json(&text)
                    .map_err(|e| Failure::param(format!("not a certificate record: {e}")))?;
                let doc = match format.as_str() {
                    "json" => record.to_json() + "\n",
                    "tsv" => Atlas {
                        rows: vec![AtlasRow::from_record(&record, None)],
                        skipped: Vec::new(),
                    }
                    .to_tsv(false),
                    "dot" | "tgf" => {
                        let f: GraphFormat = format.parse().map_err(|e: regpoly::PolytopeError| Failure::param(e.to_string()))?;
                        hasse(&record.instance(), &engine.options(false), f)?
                    }
                    other => return Err(Failure::param(format!("unknown format {other:?}"))),
                };
                write_output(&out, &doc)?;
            } else if text.starts_with(ATLAS_HEADER) {
                let atlas = Atlas::parse_tsv(&text).map_err(Failure::param)?;
                let doc = match format.as_str() {
                    "tsv" => atlas.to_tsv(true),
                    "json" => serde_json::to_string_pretty(&atlas).expect("atlas serializes") + "\n",
                    other => return Err(Failure::param(format!("unknown format {other:?} for an atlas"))),
                };
                write_output(&out, &doc)?;
            } else {
                return Err(Failure::param("input is neither a certificate nor an atlas"));
            }
            Ok(0)
        }
        Command::Hasse {
            instance: args,
            engine,
            format,
            out,
        } => {
            let f: GraphFormat = format.parse().map_err(|e: regpoly::PolytopeError| Failure::param(e.to_string()))?;
            let doc = hasse(&instance(&args)?, &engine.options(false), f)?;
            write_output(&out, &doc)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("REGPOLY_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let reason = serde_json::json!({ "status": f.status, "detail": f.detail });
            println!("{reason}");
            log::error!("{}", f.detail);
            ExitCode::from(f.code)
        }
    }
}
