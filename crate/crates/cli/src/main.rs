use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use borel_schur::combinatorics::LatticePoint;
use borel_schur::field::{Field, PrimeField, Rationals};
use borel_schur::kostant::{CacheFile, Kostant, CACHE_SCHEMA_VERSION};
use borel_schur::linalg::Pivoting;
use borel_schur::resolution::minimal_resolution;
use borel_schur::schur_oracle::verify_isomorphism;
use borel_schur::skew_category::{check_strong_idempotent_chain, t_completion, TruncatedAlgebra};
use borel_schur::transport::{max_height_above, transport_resolution, verify_complex};
use borel_schur::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact computations with Borel Schur algebras and their Koszul-type resolutions.
#[derive(Parser)]
#[command(name = "borel-schur", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Rank of the group.
    #[arg(long)]
    n: usize,
    /// Characteristic of the ground field (0 or a prime).
    #[arg(long = "char", default_value_t = 0)]
    characteristic: u64,
    /// Directory holding structure-constant caches.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Write the data here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for shuffled pivoting; first-nonzero pivoting if absent.
    #[arg(long)]
    pivot_seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Basis and structure constants of the composition algebra.
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: u64,
    },
    /// Compare the truncated construction with the tensor-space construction.
    VerifyIso {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: u64,
    },
    /// Minimal graded resolution of the trivial Kostant module.
    Resolve {
        #[command(flatten)]
        common: Common,
        /// Homological cutoff.
        #[arg(long)]
        length: usize,
        /// Height cutoff.
        #[arg(long)]
        height: u64,
    },
    /// Projective resolution of a simple module via transport.
    Transport {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: u64,
        /// Weight of the simple, e.g. 1,0,1.
        #[arg(long)]
        lambda: String,
        /// Homological cutoff; one more than the height cutoff by default.
        #[arg(long)]
        length: Option<usize>,
        /// Height cutoff; large enough for a complete resolution by default.
        #[arg(long)]
        height: Option<u64>,
    },
    /// Walk the idempotent chain from the dominance interval to the weights.
    CheckIdeals {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: u64,
    },
    /// Fill and save the structure-constant cache.
    BuildCache {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        height: u64,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Basis { common, .. }
            | Command::VerifyIso { common, .. }
            | Command::Resolve { common, .. }
            | Command::Transport { common, .. }
            | Command::CheckIdeals { common, .. }
            | Command::BuildCache { common, .. } => common,
        }
    }
}

/// Result of a subcommand: whether its checks passed, a one-line summary, and
/// the data payload.
struct Outcome {
    passed: bool,
    summary: String,
    data: Payload,
}

enum Payload {
    Json(serde_json::Value),
    Csv(Vec<Vec<String>>),
    None,
}

fn cache_path(dir: &Path, n: usize, height: u64) -> PathBuf {
    dir.join(format!("kostant-n{n}-h{height}-v{CACHE_SCHEMA_VERSION}.json"))
}

fn kostant_with_cache(common: &Common, height: u64) -> anyhow::Result<Kostant> {
    let k = Kostant::new(common.n);
    let Some(dir) = &common.cache else { return Ok(k) };
    let path = cache_path(dir, common.n, height);
    if path.exists() {
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let file: CacheFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let loaded = k.import_cache(&file)?;
        eprintln!("loaded {loaded} products from {}", path.display());
    } else {
        let file = k.export_cache(height)?;
        fs::create_dir_all(dir)?;
        fs::write(&path, serde_json::to_string(&file)?)?;
        eprintln!("wrote {} products to {}", file.constants.len(), path.display());
    }
    Ok(k)
}

fn pivoting(common: &Common) -> Pivoting {
    common.pivot_seed.map_or(Pivoting::FirstNonzero, Pivoting::Shuffled)
}

fn json<T: serde::Serialize>(common: &Common, value: &T) -> anyhow::Result<Payload> {
    if common.format == Format::Csv {
        bail!(Error::InvalidParameter("csv output is only available for basis and transport".into()));
    }
    Ok(Payload::Json(serde_json::to_value(value)?))
}

fn run<F: Field>(command: &Command, field: F) -> anyhow::Result<Outcome> {
    let common = command.common();
    let n = common.n;
    match command {
        Command::Basis { r, .. } => {
            let k = kostant_with_cache(common, *r * (n as u64).saturating_sub(1))?;
            let alg = TruncatedAlgebra::composition_algebra(&k, *r, field)?;
            let data = match common.format {
                Format::Json => Payload::Json(serde_json::to_value(alg.to_json())?),
                Format::Csv => {
                    let mut rows = vec![vec!["index".into(), "source".into(), "target".into(), "matrix".into()]];
                    for (i, a) in alg.basis().iter().enumerate() {
                        let t = t_completion(&a.monomial, &a.base).context("basis arrow without completion")?;
                        rows.push(vec![
                            i.to_string(),
                            a.source().to_string(),
                            a.target().to_string(),
                            serde_json::to_string(&t)?,
                        ]);
                    }
                    Payload::Csv(rows)
                }
            };
            Ok(Outcome { passed: true, summary: format!("dim = {}", alg.dim()), data })
        }
        Command::VerifyIso { r, .. } => {
            let k = kostant_with_cache(common, *r * (n as u64).saturating_sub(1))?;
            let report = verify_isomorphism(&k, *r as usize, field)?;
            Ok(Outcome {
                passed: report.passed(),
                summary: format!(
                    "dim = {} (expected {}), image rank {}, {} structure mismatches",
                    report.basis_size, report.expected_dim, report.image_rank, report.structure_mismatches
                ),
                data: json(common, &report)?,
            })
        }
        Command::Resolve { length, height, .. } => {
            let k = kostant_with_cache(common, *height)?;
            let c = minimal_resolution(&k, field, *length, *height, pivoting(common))?;
            let exact = c.verify_exactness(&k)?;
            let minimal = c.verify_minimality();
            let squares = c.verify_d_squared(&k)?;
            let betti: Vec<String> = c.betti_data().iter().map(|(i, d)| format!("P_{i}: {}", d.len())).collect();
            Ok(Outcome {
                passed: exact && minimal && squares,
                summary: format!("{}; exact {exact}, minimal {minimal}, d² = 0 {squares}", betti.join(", ")),
                data: json(common, &c.to_json())?,
            })
        }
        Command::Transport { r, lambda, length, height, .. } => {
            let lambda: LatticePoint = lambda.parse()?;
            if lambda.n() != n {
                bail!(Error::LengthMismatch(lambda.n(), n));
            }
            let k = Kostant::new(n);
            let alg = TruncatedAlgebra::composition_algebra(&k, *r, field.clone())?;
            if alg.point_index(&lambda).is_none() {
                bail!(Error::InvalidParameter(format!("{lambda} is not a composition of {r}")));
            }
            let h = height.unwrap_or_else(|| max_height_above(&alg, &lambda));
            let l = length.unwrap_or(h as usize + 1);
            let k = match &common.cache {
                Some(_) => kostant_with_cache(common, h)?,
                None => k,
            };
            let c = minimal_resolution(&k, field, l, h, pivoting(common))?;
            let b = transport_resolution(&c, &lambda, &alg)?;
            let report = verify_complex(&b, &alg);
            if !b.complete {
                eprintln!("resolution is truncated; checked {} points at interior spots", report.covered_points);
            }
            let shape: Vec<String> = b.complex.modules.iter().map(|m| m.len().to_string()).collect();
            let data = match common.format {
                Format::Json => Payload::Json(serde_json::to_value(b.to_json(&alg))?),
                Format::Csv => {
                    let mut rows = vec![vec!["i".into(), "mu".into(), "dim_ext".into()]];
                    rows.extend(b.ext_rows().into_iter().map(|(i, mu, d)| vec![i.to_string(), mu.to_string(), d.to_string()]));
                    Payload::Csv(rows)
                }
            };
            Ok(Outcome {
                passed: report.passed(),
                summary: format!(
                    "ranks [{}], complete {}, d² = 0 {}, exact {}, H_0 simple {}, minimal {}",
                    shape.join(", "),
                    b.complete,
                    report.complex.d_squared_zero,
                    report.complex.exact,
                    report.complex.h0_is_simple,
                    report.complex.minimal
                ),
                data,
            })
        }
        Command::CheckIdeals { r, .. } => {
            let k = kostant_with_cache(common, *r * (n as u64).saturating_sub(1))?;
            let report = check_strong_idempotent_chain(&k, *r, field)?;
            for s in report.steps.iter().filter(|s| !s.holds) {
                eprintln!("{}: dim AeA {} vs tensor {}", s.label, s.dim_aea, s.dim_tensor);
            }
            for h in report.hypotheses.iter().filter(|h| !h.holds) {
                eprintln!("hypothesis fails: {}", h.description);
            }
            Ok(Outcome {
                passed: report.passed(),
                summary: format!(
                    "{} steps, dim {} -> {} (expected {})",
                    report.steps.len(),
                    report.start_dim,
                    report.final_dim,
                    report.expected_dim
                ),
                data: json(common, &report)?,
            })
        }
        Command::BuildCache { height, .. } => {
            let Some(dir) = &common.cache else {
                bail!(Error::InvalidParameter("build-cache needs --cache".into()));
            };
            let k = Kostant::new(n);
            let report = k.fill_up_to_height(*height);
            let passed = report.integrality_failures == 0;
            if passed {
                let file = k.export_cache(*height)?;
                fs::create_dir_all(dir)?;
                fs::write(cache_path(dir, n, *height), serde_json::to_string(&file)?)?;
            }
            Ok(Outcome {
                passed,
                summary: format!(
                    "{} monomials, {} products, {} integrality failures",
                    report.monomials, report.pairs, report.integrality_failures
                ),
                data: Payload::None,
            })
        }
    }
}

fn write_payload(data: &Payload, out: &mut dyn Write) -> anyhow::Result<()> {
    match data {
        Payload::Json(v) => {
            serde_json::to_writer_pretty(&mut *out, v)?;
            writeln!(out)?;
        }
        Payload::Csv(rows) => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Payload::None => {}
    }
    Ok(())
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let common = cli.command.common();
    let outcome = match common.characteristic {
        0 => run(&cli.command, Rationals)?,
        p => run(&cli.command, PrimeField::new(p)?)?,
    };
    let verdict = if outcome.passed { "PASS" } else { "FAIL" };
    match &common.out {
        Some(path) => {
            let mut file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_payload(&outcome.data, &mut file)?;
            println!("{verdict}: {}", outcome.summary);
        }
        None => {
            write_payload(&outcome.data, &mut std::io::stdout().lock())?;
            eprintln!("{verdict}: {}", outcome.summary);
        }
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(
                e.downcast_ref::<Error>(),
                Some(
                    Error::InvalidCharacteristic(_)
                        | Error::InvalidParameter(_)
                        | Error::LengthMismatch(..)
                        | Error::Parse(_)
                        | Error::TensorSpaceTooLarge(..)
                )
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
