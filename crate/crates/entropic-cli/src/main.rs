//! `entropic`: sample Dirichlet-Ferguson and entropic measures, conjugate
//! measures, solve semi-discrete transport, and run the validation battery.
//!
//! Exit codes: 0 success, 1 validation failure, 2 solver failure, 64 usage.

use clap::{Args, Parser, Subcommand};
use entropic::dirichlet::{sample_dirichlet_ferguson, Truncation};
use entropic::domain::{Domain, DomainKind, Grid};
use entropic::entropic::{sample_entropic, Holes};
use entropic::harness::{reports_to_json, reports_to_junit};
use entropic::measure::Measure;
use entropic::metrics::wasserstein_1d;
use entropic::semidiscrete::semidiscrete_weights;
use entropic::suite::{run_suite, SuiteOptions, DEFAULT_SEED};
use entropic::transport::conjugate_measure_1d;
use entropic::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_VALIDATION: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "entropic", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DomainArgs {
    /// Domain: "interval", "circle", "square", or a path to a domain JSON
    /// file.
    #[arg(long, default_value = "interval")]
    domain: String,
    /// Grid resolution (nodes in 1D, cells per axis in 2D).
    #[arg(long, default_value_t = 256)]
    grid_n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Sample Dirichlet-Ferguson draws and write one CSV per draw.
    SampleDirichlet {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        beta: f64,
        /// RNG seed (mandatory: runs must be reproducible).
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1e-10)]
        truncation_remainder: f64,
        /// Output formats, comma separated: csv, json.
        #[arg(long, default_value = "csv")]
        emit: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sample entropic-measure draws (conjugated Dirichlet draws) with
    /// per-sample artifact directories.
    SampleEntropic {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1e-10)]
        truncation_remainder: f64,
        /// 2D conjugate cloud size.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Conjugate a measure read from JSON.
    Conjugate {
        #[command(flatten)]
        domain: DomainArgs,
        /// Path to the measure JSON.
        measure: PathBuf,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify double conjugation and report the d_W gap.
        #[arg(long)]
        verify_involution: bool,
        /// Seed for the 2D empirical cloud.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Solve semi-discrete weights for sites + masses JSON and write the
    /// tessellation.
    Tessellate {
        #[command(flatten)]
        domain: DomainArgs,
        /// JSON file: `{"sites": [[x,y],...], "masses": [...]}`.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Run the seeded validation battery and write reports.
    Validate {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run only criteria whose name contains this substring.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Corrupted-build canary (flips a sign; the battery must fail).
        #[arg(long, hide = true)]
        canary: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return if matches!(
                kind,
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_USAGE)
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SolverDiverged { .. } => ExitCode::from(EXIT_SOLVER),
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
    }
}

/// The output directory can be overridden by `ENTROPIC_OUT` (directory
/// outputs only; all numerics come from flags).
fn out_dir(flag: PathBuf) -> PathBuf {
    match std::env::var_os("ENTROPIC_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => flag,
    }
}

fn load_domain(args: &DomainArgs) -> entropic::Result<Arc<Domain>> {
    let dom = match args.domain.as_str() {
        "interval" => Domain::interval(),
        "circle" => Domain::circle(),
        "square" => Domain::unit_square(),
        path => {
            let text = std::fs::read_to_string(path)?;
            let d: Domain = serde_json::from_str(&text)?;
            d.validate()?;
            d
        }
    };
    Ok(Arc::new(dom))
}

fn build_grid(args: &DomainArgs) -> entropic::Result<Grid> {
    load_domain(args)?.build_grid(args.grid_n)
}

fn require_beta(beta: f64) -> entropic::Result<()> {
    if !(beta > 0.0) {
        return Err(Error::Config(format!("--beta must be positive, got {beta}")));
    }
    Ok(())
}

/// FNV-1a hash of the canonical domain JSON, for manifests.
fn domain_hash(domain: &Domain) -> String {
    let text = serde_json::to_string(domain).unwrap_or_default();
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn measure_csv(m: &Measure) -> String {
    let mut out = String::from("weight,x,y\n");
    match m {
        Measure::Discrete { atoms } => {
            for (p, w) in atoms {
                let c = p.coords();
                out.push_str(&format!("{w},{},{}\n", c[0], c[1]));
            }
        }
        Measure::Empirical { points } => {
            let w = 1.0 / points.len() as f64;
            for p in points {
                let c = p.coords();
                out.push_str(&format!("{w},{},{}\n", c[0], c[1]));
            }
        }
        Measure::GridDensity { values } => {
            out = String::from("index,density\n");
            for (i, v) in values.iter().enumerate() {
                out.push_str(&format!("{i},{v}\n"));
            }
        }
        Measure::Piecewise { atoms, slabs } => {
            out = String::from("kind,a,b,mass\n");
            for (x, w) in atoms {
                out.push_str(&format!("atom,{x},{x},{w}\n"));
            }
            for (a, b, m) in slabs {
                out.push_str(&format!("slab,{a},{b},{m}\n"));
            }
        }
    }
    out
}

fn write(path: &Path, contents: &str) -> entropic::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn manifest(
    command: &str,
    domain: &Domain,
    beta: f64,
    seed: u64,
    count: usize,
    truncation: f64,
) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "domain_hash": domain_hash(domain),
        "beta": beta,
        "seed": seed,
        "count": count,
        "truncation_remainder": truncation,
    })
}

fn run(cli: Cli) -> entropic::Result<ExitCode> {
    match cli.command {
        Command::SampleDirichlet {
            domain,
            beta,
            seed,
            count,
            truncation_remainder,
            emit,
            out,
        } => {
            require_beta(beta)?;
            let out = out_dir(out);
            let formats: Vec<&str> = emit.split(',').map(str::trim).collect();
            if formats.iter().any(|f| !matches!(*f, "csv" | "json")) {
                return Err(Error::Config(format!("--emit must be csv/json, got {emit}")));
            }
            let grid = build_grid(&domain)?;
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            for i in 0..count {
                let nu = sample_dirichlet_ferguson(
                    beta,
                    &grid,
                    &mut rng,
                    Truncation::RemainderBelow(truncation_remainder),
                )?;
                if formats.contains(&"csv") {
                    write(&out.join(format!("nu_{i:05}.csv")), &measure_csv(&nu))?;
                }
                if formats.contains(&"json") {
                    write(
                        &out.join(format!("nu_{i:05}.json")),
                        &serde_json::to_string(&nu)?,
                    )?;
                }
            }
            let m = manifest(
                "sample-dirichlet",
                &grid.domain,
                beta,
                seed,
                count,
                truncation_remainder,
            );
            write(&out.join("manifest.json"), &serde_json::to_string_pretty(&m)?)?;
            println!("wrote {count} samples to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::SampleEntropic {
            domain,
            beta,
            seed,
            count,
            truncation_remainder,
            samples,
            out,
        } => {
            require_beta(beta)?;
            let out = out_dir(out);
            let grid = build_grid(&domain)?;
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut failures: Vec<String> = Vec::new();
            for i in 0..count {
                let dir = out.join(format!("sample_{i:05}"));
                match sample_entropic(
                    beta,
                    &grid,
                    &mut rng,
                    Truncation::RemainderBelow(truncation_remainder),
                    samples,
                    1e-7,
                ) {
                    Ok(s) => {
                        write(&dir.join("nu.json"), &serde_json::to_string(&s.nu)?)?;
                        match &s.mu {
                            Measure::Empirical { .. } => {
                                write(&dir.join("mu.csv"), &measure_csv(&s.mu))?
                            }
                            _ => write(&dir.join("mu.json"), &serde_json::to_string(&s.mu)?)?,
                        }
                        if let Some(t) = &s.tessellation {
                            write(&dir.join("tessellation.json"), &serde_json::to_string(t)?)?;
                        }
                        let holes = match &s.holes {
                            Holes::Gaps(g) => serde_json::json!({ "gaps": g }),
                            Holes::Cells(c) => serde_json::json!({ "cells": c }),
                        };
                        write(&dir.join("holes.json"), &serde_json::to_string(&holes)?)?;
                    }
                    Err(e) => failures.push(format!("sample {i}: {e}")),
                }
            }
            let mut m = manifest(
                "sample-entropic",
                &grid.domain,
                beta,
                seed,
                count,
                truncation_remainder,
            );
            m["failures"] = serde_json::json!(failures);
            write(&out.join("manifest.json"), &serde_json::to_string_pretty(&m)?)?;
            if failures.is_empty() {
                println!("wrote {count} samples to {}", out.display());
                Ok(ExitCode::SUCCESS)
            } else {
                for f in &failures {
                    eprintln!("failed: {f}");
                }
                Ok(ExitCode::from(EXIT_SOLVER))
            }
        }
        Command::Conjugate {
            domain,
            measure,
            out,
            verify_involution,
            seed,
            samples,
        } => {
            let grid = build_grid(&domain)?;
            let text = std::fs::read_to_string(&measure)?;
            let mu: Measure = serde_json::from_str(&text)?;
            if grid.domain.kind == DomainKind::Polygon {
                let seed = seed.ok_or_else(|| {
                    Error::Config("--seed is required for 2D conjugation".into())
                })?;
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let (sites, lambda) = match &mu {
                    Measure::Discrete { atoms } => (
                        atoms.iter().map(|(p, _)| p.coords()).collect::<Vec<_>>(),
                        atoms.iter().map(|(_, w)| *w).collect::<Vec<_>>(),
                    ),
                    _ => {
                        return Err(Error::UnsupportedDomain(
                            "2D conjugation needs a discrete measure".into(),
                        ))
                    }
                };
                let tess =
                    semidiscrete_weights(&grid.domain, Some(&grid), &sites, &lambda, 1e-7, 100)?;
                let cloud = entropic::semidiscrete::conjugate_measure_2d(
                    &tess,
                    Some(&grid),
                    samples,
                    &mut rng,
                )?;
                let base = out.unwrap_or_else(|| PathBuf::from("conjugate"));
                write(&base.with_extension("csv"), &measure_csv(&cloud))?;
                write(
                    &base.with_extension("tessellation.json"),
                    &serde_json::to_string(&tess)?,
                )?;
                println!("wrote {}.csv", base.display());
                return Ok(ExitCode::SUCCESS);
            }
            let conj = conjugate_measure_1d(&grid, &mu)?;
            if verify_involution {
                let back = conjugate_measure_1d(&grid, &conj)?;
                let gap = wasserstein_1d(&grid, &back, &mu)?;
                println!("involution d_W gap: {gap:e}");
            }
            let json = serde_json::to_string(&conj)?;
            match out {
                Some(p) => {
                    write(&p, &json)?;
                    println!("wrote {}", p.display());
                }
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Tessellate {
            domain,
            input,
            out,
            tol,
        } => {
            let grid = build_grid(&domain)?;
            let text = std::fs::read_to_string(&input)?;
            let parsed: serde_json::Value = serde_json::from_str(&text)?;
            let sites: Vec<[f64; 2]> = serde_json::from_value(
                parsed
                    .get("sites")
                    .cloned()
                    .ok_or_else(|| Error::Config("input needs a 'sites' array".into()))?,
            )?;
            let masses: Vec<f64> = serde_json::from_value(
                parsed
                    .get("masses")
                    .cloned()
                    .ok_or_else(|| Error::Config("input needs a 'masses' array".into()))?,
            )?;
            let tess =
                semidiscrete_weights(&grid.domain, Some(&grid), &sites, &masses, tol, 100)?;
            let residual = tess
                .masses
                .iter()
                .zip(&masses)
                .map(|(m, l)| (m - l).abs())
                .fold(0.0, f64::max);
            let path = out.unwrap_or_else(|| PathBuf::from("tessellation.json"));
            write(&path, &serde_json::to_string(&tess)?)?;
            println!("residual: {residual:e}");
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            seed,
            only,
            out,
            canary,
        } => {
            let out = out_dir(out);
            let opts = SuiteOptions { seed, only, canary };
            let reports = run_suite(&opts)?;
            for r in &reports {
                println!("{}", r.line());
            }
            write(&out.join("reports.json"), &reports_to_json(&reports)?)?;
            write(&out.join("reports.xml"), &reports_to_junit(&reports))?;
            let failed = reports.iter().filter(|r| !r.pass).count();
            if failed == 0 {
                println!("all {} checks passed", reports.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!(
                    "{failed} of {} checks failed; replay: entropic validate --seed {seed}{}",
                    reports.len(),
                    match &opts.only {
                        Some(o) => format!(" --only {o}"),
                        None => String::new(),
                    }
                );
                Ok(ExitCode::from(EXIT_VALIDATION))
            }
        }
    }
}
