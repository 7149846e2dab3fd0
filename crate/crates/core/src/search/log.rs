//! Elimination log: a header line followed by one line per terminal box,
//! `<box key> <verdict> [name=value ...]`, values in hexadecimal floats.

use std::io::Write;

use sha2::{Digest, Sha256};

use super::{Mode, SearchConfig};
use crate::dyadic::DyadicBox;
use crate::eliminators::{Eps, Verdict};
use crate::geometry::Exponent;

pub const LOG_MAGIC: &str = "# tbp-log v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub key: DyadicBox,
    pub verdict: Verdict,
    pub evidence: Vec<(String, String)>,
}

impl Record {
    pub fn line(&self) -> String {
        let mut s = format!("{} {}", self.key, self.verdict.tag());
        for (k, v) in &self.evidence {
            s.push(' ');
            s.push_str(k);
            s.push('=');
            s.push_str(v);
        }
        s
    }

    pub fn parse(line: &str) -> Option<Record> {
        let mut parts = line.split_whitespace();
        let key = parts.next()?.parse().ok()?;
        let verdict = Verdict::from_tag(parts.next()?)?;
        let evidence = parts
            .map(|p| p.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
            .collect::<Option<Vec<_>>>()?;
        Some(Record { key, verdict, evidence })
    }
}

pub fn header(cfg: &SearchConfig) -> String {
    format!(
        "{LOG_MAGIC} e={} eps=2^-{} mode={}",
        cfg.e.value(),
        cfg.eps.log2_inv,
        cfg.mode.name()
    )
}

/// Parses a header line into a config (with one worker).
pub fn parse_header(line: &str) -> Option<SearchConfig> {
    let rest = line.strip_prefix(LOG_MAGIC)?;
    let mut e = None;
    let mut eps = None;
    let mut mode = None;
    for tok in rest.split_whitespace() {
        let (k, v) = tok.split_once('=')?;
        match k {
            "e" => e = Exponent::from_int(v.parse().ok()?),
            "eps" => eps = Eps::new(v.strip_prefix("2^-")?.parse().ok()?),
            "mode" => mode = Mode::parse(v),
            _ => return None,
        }
    }
    Some(SearchConfig::new(e?, eps?, mode?))
}

/// Writes log lines and hashes everything written.
pub struct LogWriter<'a> {
    out: &'a mut dyn Write,
    hasher: Sha256,
    bytes: u64,
}

impl<'a> LogWriter<'a> {
    pub fn new(out: &'a mut dyn Write, cfg: &SearchConfig) -> std::io::Result<Self> {
        let mut w = LogWriter {
            out,
            hasher: Sha256::new(),
            bytes: 0,
        };
        w.line(&header(cfg))?;
        Ok(w)
    }

    /// Continues an existing log whose bytes so far are `prefix`.
    pub fn resume(out: &'a mut dyn Write, prefix: &[u8]) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(prefix);
        LogWriter {
            out,
            hasher,
            bytes: prefix.len() as u64,
        }
    }

    fn line(&mut self, s: &str) -> std::io::Result<()> {
        let bytes = format!("{s}\n");
        self.hasher.update(bytes.as_bytes());
        self.bytes += bytes.len() as u64;
        self.out.write_all(bytes.as_bytes())
    }

    pub fn write(&mut self, r: &Record) -> std::io::Result<()> {
        self.line(&r.line())
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }

    /// Flushes; returns the byte count and hex SHA-256 of everything so far.
    pub fn snapshot(&mut self) -> std::io::Result<(u64, String)> {
        self.out.flush()?;
        Ok((self.bytes, hex::encode(self.hasher.clone().finalize())))
    }

    /// Flushes and returns the hex SHA-256 of the whole log.
    pub fn finish(self) -> std::io::Result<String> {
        self.out.flush()?;
        Ok(hex::encode(self.hasher.finalize()))
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogError {
    #[error("missing or malformed log header")]
    Header,
    #[error("malformed record on line {0}")]
    Record(usize),
}

/// Parses a whole log.
pub fn parse_log(text: &str) -> Result<(SearchConfig, Vec<Record>), LogError> {
    let mut lines = text.lines();
    let cfg = lines.next().and_then(parse_header).ok_or(LogError::Header)?;
    let mut records = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        records.push(Record::parse(line).ok_or(LogError::Record(n + 2))?);
    }
    Ok((cfg, records))
}
