//! Checkpoint files.
//!
//! A checkpoint is a text file taken between two box examinations:
//!
//! ```text
//! tbp-checkpoint v1
//! config e=2 eps=2^-4 mode=interval
//! counters processed=.. confined=.. tetra=.. redundant=a,b,c energy=.. subdivided=.. mismatches=.. max_depth=..
//! log bytes=<n> sha256=<hex of the first n log bytes>
//! stack <count>
//! <box key, bottom of the stack first>
//! ...
//! END
//! ```
//!
//! Only the sequential driver is checkpointed.

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::time::Instant;

use super::log::{digest, LogWriter};
use super::{Counters, Mode, Search, SearchConfig, SearchReport, Thresholds};
use crate::eliminators::Eps;
use crate::geometry::Exponent;

pub const CHECKPOINT_MAGIC: &str = "tbp-checkpoint v1";

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported checkpoint version: {0:?}")]
    Version(String),
    #[error("truncated checkpoint")]
    Truncated,
    #[error("malformed checkpoint line {0}")]
    Malformed(usize),
    #[error("checkpoint was written for a different configuration")]
    ConfigMismatch,
    #[error("log file does not match the checkpoint")]
    LogMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub search: Search,
    pub log_bytes: u64,
    pub log_sha256: String,
}

fn counters_line(c: &Counters) -> String {
    format!(
        "counters processed={} confined={} tetra={} redundant={},{},{} energy={} subdivided={} mismatches={} max_depth={}",
        c.processed,
        c.confined,
        c.tetra,
        c.redundant[0],
        c.redundant[1],
        c.redundant[2],
        c.energy,
        c.subdivided,
        c.mismatches,
        c.max_depth
    )
}

fn fields(line: &str, prefix: &str) -> Option<Vec<(String, String)>> {
    let rest = line.strip_prefix(prefix)?;
    rest.split_whitespace()
        .map(|t| t.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

fn field<'a>(fs: &'a [(String, String)], key: &str) -> Option<&'a str> {
    fs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn parse_counters(line: &str) -> Option<Counters> {
    let fs = fields(line, "counters ")?;
    let n = |k: &str| field(&fs, k)?.parse::<u64>().ok();
    let red: Vec<u64> = field(&fs, "redundant")?
        .split(',')
        .map(|v| v.parse().ok())
        .collect::<Option<_>>()?;
    Some(Counters {
        processed: n("processed")?,
        confined: n("confined")?,
        tetra: n("tetra")?,
        redundant: red.try_into().ok()?,
        energy: n("energy")?,
        subdivided: n("subdivided")?,
        mismatches: n("mismatches")?,
        max_depth: field(&fs, "max_depth")?.parse().ok()?,
    })
}

fn parse_config(line: &str) -> Option<SearchConfig> {
    let fs = fields(line, "config ")?;
    let e = Exponent::from_int(field(&fs, "e")?.parse().ok()?)?;
    let eps = Eps::new(field(&fs, "eps")?.strip_prefix("2^-")?.parse().ok()?)?;
    let mode = Mode::parse(field(&fs, "mode")?)?;
    Some(SearchConfig::new(e, eps, mode))
}

impl Checkpoint {
    pub fn render(&self) -> String {
        let cfg = &self.search.config;
        let mut s = format!("{CHECKPOINT_MAGIC}\n");
        s.push_str(&format!(
            "config e={} eps=2^-{} mode={}\n",
            cfg.e.value(),
            cfg.eps.log2_inv,
            cfg.mode.name()
        ));
        s.push_str(&counters_line(&self.search.counters));
        s.push('\n');
        s.push_str(&format!("log bytes={} sha256={}\n", self.log_bytes, self.log_sha256));
        s.push_str(&format!("stack {}\n", self.search.stack.len()));
        for b in &self.search.stack {
            s.push_str(&b.key());
            s.push('\n');
        }
        s.push_str("END\n");
        s
    }

    pub fn parse(text: &str) -> Result<Checkpoint, CheckpointError> {
        let mut lines = text.lines().enumerate();
        let mut next = || lines.next().ok_or(CheckpointError::Truncated);
        let (_, magic) = next()?;
        if magic != CHECKPOINT_MAGIC {
            return Err(CheckpointError::Version(magic.to_string()));
        }
        let (n, l) = next()?;
        let config = parse_config(l).ok_or(CheckpointError::Malformed(n + 1))?;
        let (n, l) = next()?;
        let counters = parse_counters(l).ok_or(CheckpointError::Malformed(n + 1))?;
        let (n, l) = next()?;
        let fs = fields(l, "log ").ok_or(CheckpointError::Malformed(n + 1))?;
        let log_bytes = field(&fs, "bytes")
            .and_then(|v| v.parse().ok())
            .ok_or(CheckpointError::Malformed(n + 1))?;
        let log_sha256 = field(&fs, "sha256")
            .filter(|v| v.len() == 64 && hex::decode(v).is_ok())
            .ok_or(CheckpointError::Malformed(n + 1))?
            .to_string();
        let (n, l) = next()?;
        let count: usize = l
            .strip_prefix("stack ")
            .and_then(|v| v.parse().ok())
            .ok_or(CheckpointError::Malformed(n + 1))?;
        let mut stack = Vec::with_capacity(count.min(1 << 16));
        for _ in 0..count {
            let (n, l) = next()?;
            stack.push(l.parse().map_err(|_| CheckpointError::Malformed(n + 1))?);
        }
        let (n, l) = next()?;
        if l != "END" {
            return Err(CheckpointError::Malformed(n + 1));
        }
        Ok(Checkpoint {
            search: Search {
                config,
                stack,
                counters,
            },
            log_bytes,
            log_sha256,
        })
    }

    /// Writes through a temporary file so a crash never leaves a partial checkpoint.
    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = File::create(&tmp)?;
            f.write_all(self.render().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
        Checkpoint::parse(&fs::read_to_string(path)?)
    }
}

/// Where a checkpointed run stopped.
#[derive(Debug)]
pub enum Progress {
    Finished(SearchReport),
    /// The box budget ran out; the checkpoint on disk resumes the run.
    Stopped(Checkpoint),
}

/// Runs a single-worker search writing `log_path`, saving a checkpoint to
/// `ckpt_path` every `every` boxes. If `ckpt_path` exists the run resumes
/// from it. With `budget` the run stops after that many boxes in this call.
///
/// The log of a resumed run is byte-identical to an uninterrupted one; the
/// checkpoint is removed once the search halts.
pub fn run_checkpointed(
    cfg: &SearchConfig,
    log_path: &Path,
    ckpt_path: &Path,
    every: u64,
    budget: Option<u64>,
) -> Result<Progress, CheckpointError> {
    let start = Instant::now();
    let th = Thresholds::new(cfg.e);
    let every = every.max(1);

    let (mut search, prefix, file) = if ckpt_path.exists() {
        let ck = Checkpoint::load(ckpt_path)?;
        if ck.search.config != SearchConfig::new(cfg.e, cfg.eps, cfg.mode) {
            return Err(CheckpointError::ConfigMismatch);
        }
        let mut prefix = Vec::new();
        File::open(log_path)?.take(ck.log_bytes).read_to_end(&mut prefix)?;
        if prefix.len() as u64 != ck.log_bytes || digest(&prefix) != ck.log_sha256 {
            return Err(CheckpointError::LogMismatch);
        }
        let mut file = OpenOptions::new().write(true).open(log_path)?;
        file.set_len(ck.log_bytes)?;
        file.seek(SeekFrom::End(0))?;
        (ck.search, prefix, file)
    } else {
        (Search::new(SearchConfig::new(cfg.e, cfg.eps, cfg.mode)), Vec::new(), File::create(log_path)?)
    };

    let fresh = prefix.is_empty();
    let mut out = std::io::BufWriter::new(file);
    let mut writer = if fresh {
        LogWriter::new(&mut out, &search.config)?
    } else {
        LogWriter::resume(&mut out, &prefix)
    };

    let mut done = 0u64;
    let mut fault = None;
    while !search.is_empty() {
        let chunk = match budget {
            Some(b) if done >= b => break,
            Some(b) => every.min(b - done),
            None => every,
        };
        let before = search.counters.processed;
        let mut io_err = None;
        let res = search.run_for(&th, Some(chunk), &mut |r| {
            if io_err.is_none() {
                io_err = writer.write(r).err();
            }
        });
        if let Some(e) = io_err {
            return Err(e.into());
        }
        done += search.counters.processed - before;
        if let Err(f) = res {
            fault = Some(f);
            break;
        }
        if !search.is_empty() {
            let (bytes, sha) = writer.snapshot()?;
            Checkpoint {
                search: search.clone(),
                log_bytes: bytes,
                log_sha256: sha,
            }
            .save(ckpt_path)?;
        }
    }

    if fault.is_none() && !search.is_empty() {
        writer.flush()?;
        return Ok(Progress::Stopped(Checkpoint::load(ckpt_path)?));
    }
    let digest = writer.finish()?;
    if fault.is_none() && ckpt_path.exists() {
        fs::remove_file(ckpt_path)?;
    }
    Ok(Progress::Finished(SearchReport {
        config: search.config,
        halted: fault.is_none(),
        counters: search.counters,
        fault,
        wall_seconds: start.elapsed().as_secs_f64(),
        log_digest: digest,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicBox;

    fn cfg() -> SearchConfig {
        SearchConfig::new(Exponent::Two, Eps::new(4).unwrap(), Mode::Interval)
    }

    fn fresh() -> Checkpoint {
        Checkpoint {
            search: Search::new(cfg()),
            log_bytes: 0,
            log_sha256: digest(b""),
        }
    }

    #[test]
    fn initial_checkpoint_holds_the_root() {
        let ck = Checkpoint::parse(&fresh().render()).unwrap();
        assert_eq!(ck.search.stack, vec![DyadicBox::root()]);
        assert_eq!(ck, fresh());
    }

    #[test]
    fn round_trip_after_some_steps() {
        let mut s = Search::new(cfg());
        s.run_for(&Thresholds::new(Exponent::Two), Some(500), &mut |_| {}).unwrap();
        let ck = Checkpoint {
            search: s,
            log_bytes: 1234,
            log_sha256: digest(b"x"),
        };
        let text = ck.render();
        assert_eq!(Checkpoint::parse(&text).unwrap(), ck);
        assert_eq!(Checkpoint::parse(&text).unwrap().render(), text);
    }

    #[test]
    fn rejects_bad_files() {
        let text = fresh().render();
        assert!(matches!(
            Checkpoint::parse(&text.replace("v1", "v2")),
            Err(CheckpointError::Version(_))
        ));
        let cut = &text[..text.len() - 3];
        assert!(matches!(Checkpoint::parse(cut), Err(CheckpointError::Malformed(_))));
        let cut = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(matches!(Checkpoint::parse(&cut), Err(CheckpointError::Truncated)));
        assert!(matches!(
            Checkpoint::parse(&text.replace("mode=interval", "mode=slow")),
            Err(CheckpointError::Malformed(2))
        ));
    }
}
