//! `tbp`: command-line front end for the verifier.
//!
//! Exit codes: 0 on full success, 1 when a run finishes without a
//! certificate (float mode, failed certificate or audit), 2 on flag errors,
//! 3 when a guard fault poisons the run.

mod inspect;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use tbp_core::eliminators::Eps;
use tbp_core::geometry::Exponent;
use tbp_core::search::audit::{audit, AuditError};
use tbp_core::search::checkpoint::{run_checkpointed, CheckpointError, Progress};
use tbp_core::search::{run, Mode, SearchConfig, SearchReport};
use tbp_core::hexfloat;
use tbp_hessian::certify_local_minimum;

const EXIT_UNCERTIFIED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_FAULT: u8 = 3;

#[derive(Parser)]
#[command(name = "tbp", version, about = "Rigorous verifier for five-point energy minimizers on the sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the box search and write its log and report.
    Verify {
        #[arg(long, value_parser = parse_exponent)]
        e: Exponent,
        /// Confinement side, `2^-k` or a power of two such as `0.0625`.
        #[arg(long, value_parser = parse_eps, default_value = "2^-4")]
        eps: Eps,
        #[arg(long, value_parser = parse_mode, default_value = "interval")]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Directory for the log and report.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Resumable single-worker run saving its state here.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        checkpoint_every: u64,
    },
    /// Certify that the bi-pyramid is a strict local minimum.
    HessianCert {
        #[arg(long, value_parser = parse_exponent)]
        e: Exponent,
        /// Write the JSON certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the energy thresholds and the estimator coefficients.
    Constants {
        #[arg(long, value_parser = parse_exponent)]
        e: Exponent,
    },
    /// Print every test's certified quantities for one box.
    InspectBox {
        /// Box key, e.g. `0:67108864|0:0,0|0:0,0|0:0,0`.
        key: String,
        #[arg(long, value_parser = parse_exponent)]
        e: Exponent,
        #[arg(long, value_parser = parse_eps, default_value = "2^-4")]
        eps: Eps,
    },
    /// Replay and re-verify a search log.
    AuditLog { path: PathBuf },
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse::<i64>()
        .ok()
        .and_then(Exponent::from_int)
        .ok_or_else(|| format!("exponent must be 1 or 2, got `{s}`"))
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| format!("mode must be float, interval or hybrid, got `{s}`"))
}

/// `2^-k`, `1/2^k`, `1/n` or a decimal power of two, with `2 <= k <= 24`.
fn parse_eps(s: &str) -> Result<Eps, String> {
    let bad = || format!("eps must be a power of two in [2^-24, 2^-2], got `{s}`");
    let t = s.trim();
    let k = if let Some(k) = t.strip_prefix("2^-") {
        k.parse::<u32>().map_err(|_| bad())?
    } else if let Some(k) = t.strip_prefix("1/2^") {
        k.parse::<u32>().map_err(|_| bad())?
    } else if let Some(n) = t.strip_prefix("1/") {
        let n = n.parse::<u64>().map_err(|_| bad())?;
        if !n.is_power_of_two() {
            return Err(bad());
        }
        n.trailing_zeros()
    } else {
        let v = t.parse::<f64>().map_err(|_| bad())?;
        if v.is_nan() || v <= 0.0 {
            return Err(bad());
        }
        let k = -v.log2();
        if k.fract() != 0.0 {
            return Err(bad());
        }
        k as u32
    };
    if !(2..=24).contains(&k) {
        return Err(bad());
    }
    Eps::new(k).ok_or_else(bad)
}

fn poisoned(what: &str, fault: impl std::fmt::Display) -> ExitCode {
    eprintln!("guard fault during {what}: {fault}");
    eprintln!("poisoned report: this run carries no certificate");
    ExitCode::from(EXIT_FAULT)
}

fn verify(
    cfg: SearchConfig,
    out: &Path,
    checkpoint: Option<&Path>,
    every: u64,
) -> anyhow::Result<ExitCode> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stem = format!("tbp-e{}-eps{}-{}", cfg.e.value(), cfg.eps.log2_inv, cfg.mode.name());
    let log_path = out.join(format!("{stem}.log"));
    let report_path = out.join(format!("{stem}.report"));

    let report: SearchReport = match checkpoint {
        Some(ck) => {
            if cfg.workers > 1 {
                eprintln!("error: --checkpoint runs with a single worker");
                return Ok(ExitCode::from(EXIT_USAGE));
            }
            match run_checkpointed(&cfg, &log_path, ck, every, None) {
                Ok(Progress::Finished(r)) => r,
                Ok(Progress::Stopped(_)) => unreachable!("no budget was given"),
                Err(CheckpointError::Io(e)) => return Err(e).context("checkpointed run"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(EXIT_UNCERTIFIED));
                }
            }
        }
        None => {
            let file = File::create(&log_path).with_context(|| format!("creating {}", log_path.display()))?;
            let mut w = BufWriter::new(file);
            let r = run(&cfg, &mut w).context("writing the log")?;
            w.flush()?;
            r
        }
    };

    let text = report.render();
    std::fs::write(&report_path, &text).with_context(|| format!("writing {}", report_path.display()))?;
    print!("{text}");
    println!("log={}", log_path.display());
    println!("report={}", report_path.display());

    if let Some(f) = report.fault {
        return Ok(poisoned("the search", f));
    }
    if !report.certified() {
        eprintln!("{} mode screens boxes but certifies nothing", cfg.mode.name());
        return Ok(ExitCode::from(EXIT_UNCERTIFIED));
    }
    Ok(ExitCode::SUCCESS)
}

fn hessian_cert(e: Exponent, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let cert = match certify_local_minimum(e) {
        Ok(c) => c,
        Err(err) => return Ok(poisoned("the Hessian evaluation", err)),
    };
    if let Some(path) = out {
        std::fs::write(path, cert.to_json()).with_context(|| format!("writing {}", path.display()))?;
        println!("certificate={}", path.display());
    }
    println!("e={} shift={}", cert.exponent, cert.shift);
    println!("gradient_vanishes={}", cert.gradient_vanishes);
    for (k, [lo, hi]) in cert.pivots.iter().enumerate() {
        println!("pivot{k}=[{lo}, {hi}]");
    }
    println!("pivots_positive={}", cert.pivots_positive);
    println!(
        "phi6_bound={} (|P|<={}, degree {}, q^{})",
        hexfloat::format(cert.sixth_partials.phi6_bound),
        cert.sixth_partials.max_coefficient_sum,
        cert.sixth_partials.max_degree,
        cert.sixth_partials.denominator_power
    );
    println!("bootstrap_holds={}", cert.bootstrap_holds);
    println!("ranges_hold={}", cert.ranges_hold);
    println!("upsilon_coefficients={}", cert.upsilon_coefficients.join(","));
    println!(
        "upsilon^2={} upsilon in [{}, {}] threshold={}",
        cert.upsilon.squared,
        cert.upsilon.lo,
        cert.upsilon.hi,
        cert.upsilon.threshold
    );
    println!("drift_ok={}", cert.upsilon.drift_ok);
    println!("valid={}", cert.valid);
    Ok(if cert.valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_UNCERTIFIED)
    })
}

fn audit_log(path: &Path) -> anyhow::Result<ExitCode> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    match audit(BufReader::new(file)) {
        Ok((cfg, r)) => {
            println!("e={} eps=2^-{} mode={}", cfg.e.value(), cfg.eps.log2_inv, cfg.mode.name());
            println!("records={}", r.records);
            println!("confined={}", r.confined);
            println!("tetra={}", r.tetra);
            println!("redundant={},{},{}", r.redundant[0], r.redundant[1], r.redundant[2]);
            println!("energy={}", r.energy);
            println!("near_target={}", r.near_target);
            println!("audit=passed");
            Ok(ExitCode::SUCCESS)
        }
        Err(AuditError::Fault { line, fault }) => Ok(poisoned(&format!("the audit at line {line}"), fault)),
        Err(e) => {
            println!("audit=failed");
            eprintln!("{e}");
            Ok(ExitCode::from(EXIT_UNCERTIFIED))
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Verify {
            e,
            eps,
            mode,
            workers,
            out,
            checkpoint,
            checkpoint_every,
        } => {
            let mut cfg = SearchConfig::new(e, eps, mode);
            cfg.workers = workers.max(1);
            verify(cfg, &out, checkpoint.as_deref(), checkpoint_every)
        }
        Command::HessianCert { e, out } => hessian_cert(e, out.as_deref()),
        Command::Constants { e } => {
            print!("{}", inspect::constants(e));
            Ok(ExitCode::SUCCESS)
        }
        Command::InspectBox { key, e, eps } => {
            let b = match key.parse() {
                Ok(b) => b,
                Err(err) => {
                    eprintln!("error: bad box key `{key}`: {err}");
                    return Ok(ExitCode::from(EXIT_USAGE));
                }
            };
            match inspect::inspect_box(&b, e, eps) {
                Ok(text) => {
                    print!("{text}");
                    Ok(ExitCode::SUCCESS)
                }
                Err(f) => Ok(poisoned("box inspection", f)),
            }
        }
        Command::AuditLog { path } => audit_log(&path),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_UNCERTIFIED)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_forms() {
        for s in ["2^-4", "1/2^4", "1/16", "0.0625"] {
            assert_eq!(parse_eps(s).unwrap().log2_inv, 4, "{s}");
        }
        assert_eq!(parse_eps("2^-24").unwrap().log2_inv, 24);
        for s in ["2^-1", "2^-25", "0.1", "1/12", "-0.25", "x"] {
            assert!(parse_eps(s).is_err(), "{s}");
        }
    }

    #[test]
    fn exponents() {
        assert_eq!(parse_exponent("1").unwrap(), Exponent::One);
        assert!(parse_exponent("3").is_err());
    }
}
