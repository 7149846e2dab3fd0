//! Log replay.
//!
//! Every record is re-verified in interval arithmetic, whatever mode wrote
//! the log. Coverage is checked by rebuilding the search tree from the root
//! with the same subdivision rule: each popped box must either be the next
//! record or contain it, so the records tile the root box with no gaps and
//! no overlaps. Records near the bi-pyramid must be confined.

use std::io::BufRead;

use super::log::{parse_header, LogError, Record};
use super::{SearchConfig, Thresholds};
use crate::dyadic::{unscale, DyadicBox};
use crate::eliminators::{is_confined, redundancy_eliminate, tetra_eliminate, Verdict};
use crate::error::Fault;
use crate::estimator::{subdivision_index, BoxAnalysis, LowerBound};
use crate::geometry::{half_sqrt3, Exponent};
use crate::interval::Interval;
use crate::Real;

/// Side of the closed square neighborhood of the bi-pyramid that only
/// confinement may remove.
pub const TARGET_SIDE_LOG2: u32 = 13;

#[derive(Debug, thiserror::Error)]
pub enum AuditError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("line {line}: `{verdict}` does not re-verify for box {key}")]
    Unverified { line: usize, key: String, verdict: String },
    #[error("line {line}: box {key} is not where the search tree puts the next leaf")]
    Coverage { line: usize, key: String },
    #[error("log ends with {0} uncovered boxes")]
    Incomplete(usize),
    #[error("line {line}: box {key} near the bi-pyramid exits as `{verdict}`")]
    NearTarget { line: usize, key: String, verdict: String },
    #[error("line {line}: fault while replaying: {fault}")]
    Fault { line: usize, fault: Fault },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub records: u64,
    pub confined: u64,
    pub tetra: u64,
    pub redundant: [u64; 3],
    pub energy: u64,
    /// Records whose box meets the neighborhood of the bi-pyramid.
    pub near_target: u64,
}

/// Whether the box might meet the closed square neighborhood of side `2^-p`
/// of the polar bi-pyramid, restricted to `y2 >= 0`.
///
/// Boxes are read quarter-open: `Q1` lacks its bottom edge and `Q2`, `Q3`
/// lack their top edges, so a box with `ȳ2 = 0` misses the region.
/// Irrational centers are widened to their enclosures.
pub fn near_target(b: &DyadicBox, p: u32) -> bool {
    let h = 1.0 / (1u64 << (p + 1)) as f64;
    let s: Interval = half_sqrt3();
    let half = Interval::from_ratio(1, 2);
    let centers = [Interval::one(), -half, -s, Interval::zero(), Interval::zero(), -half, s];
    centers.iter().enumerate().all(|(k, c)| {
        let (lo, hi) = b.coord_bounds(k);
        let (lo, hi) = (unscale(lo), unscale(hi));
        let a = if k == 4 { (c.lo() - h).max(0.0) } else { c.lo() - h };
        let t = c.hi() + h;
        match k {
            2 => lo < t && hi >= a,
            4 | 6 => lo <= t && hi > a,
            _ => lo <= t && hi >= a,
        }
    })
}

/// Re-runs the test named by `r` in interval arithmetic.
pub fn reverify(r: &Record, cfg: &SearchConfig, th: &Thresholds) -> Result<bool, Fault> {
    let b = &r.key;
    Ok(match r.verdict {
        Verdict::Confined => is_confined::<Interval>(b, cfg.eps, 0.0),
        Verdict::Tetra => tetra_eliminate(&BoxAnalysis::<Interval>::new(b)?, cfg.e),
        Verdict::Redundant(p) => redundancy_eliminate(b, &BoxAnalysis::<Interval>::new(b)?, 0.0) == Some(p),
        Verdict::Energy => matches!(
            BoxAnalysis::<Interval>::new(b)?.energy_lower_bound(cfg.e)?,
            LowerBound::Finite(v) if v > th.energy.hi()
        ),
        Verdict::Subdivide(_) => false,
    })
}

fn split_index(b: &DyadicBox, e: Exponent) -> Result<usize, Fault> {
    let a = BoxAnalysis::<f64>::new(b)?;
    Ok(subdivision_index(&a.error_budget(e)?))
}

/// Replays a log read line by line.
pub fn audit<R: BufRead>(input: R) -> Result<(SearchConfig, AuditReport), AuditError> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.ok_or(LogError::Header)?;
    let cfg = parse_header(&header).ok_or(LogError::Header)?;
    let th = Thresholds::new(cfg.e);
    let mut report = AuditReport::default();
    let mut stack = vec![DyadicBox::root()];

    for (n, line) in lines.enumerate() {
        let line_no = n + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = Record::parse(&line).ok_or(LogError::Record(line_no))?;
        let key = r.key.key();
        let fault = |fault| AuditError::Fault { line: line_no, fault };

        loop {
            let Some(b) = stack.pop() else {
                return Err(AuditError::Coverage { line: line_no, key });
            };
            if b == r.key {
                break;
            }
            if !b.contains(&r.key) {
                return Err(AuditError::Coverage { line: line_no, key });
            }
            let k = split_index(&b, cfg.e).map_err(fault)?;
            let kids = b.subdivide(k).map_err(fault)?;
            stack.extend(kids.into_iter().rev());
        }

        if !reverify(&r, &cfg, &th).map_err(fault)? {
            return Err(AuditError::Unverified {
                line: line_no,
                key,
                verdict: r.verdict.tag(),
            });
        }
        if near_target(&r.key, TARGET_SIDE_LOG2) {
            report.near_target += 1;
            if r.verdict != Verdict::Confined {
                return Err(AuditError::NearTarget {
                    line: line_no,
                    key,
                    verdict: r.verdict.tag(),
                });
            }
        }
        report.records += 1;
        match r.verdict {
            Verdict::Confined => report.confined += 1,
            Verdict::Tetra => report.tetra += 1,
            Verdict::Redundant(p) => report.redundant[p as usize - 1] += 1,
            Verdict::Energy => report.energy += 1,
            Verdict::Subdivide(_) => unreachable!("split records never re-verify"),
        }
    }
    if !stack.is_empty() {
        return Err(AuditError::Incomplete(stack.len()));
    }
    Ok((cfg, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicBox;

    #[test]
    fn neighborhood_test() {
        let s = 0.8660254037844386;
        let tbp = [1.0, -0.5, -s, 0.0, 0.0, -0.5, s];
        assert!(near_target(&DyadicBox::containing(tbp, 20), 13));
        assert!(near_target(&DyadicBox::root(), 13));
        let mut off = tbp;
        off[3] = 0.01;
        assert!(!near_target(&DyadicBox::containing(off, 20), 13));
        let mut below = tbp;
        below[4] = -1e-7;
        assert!(!near_target(&DyadicBox::containing(below, 10), 13));
        assert!(near_target(&DyadicBox::containing(tbp, 10), 13));
    }

    #[test]
    fn rejects_a_log_with_only_a_header() {
        let text = "# tbp-log v1 e=2 eps=2^-4 mode=interval\n";
        assert!(matches!(audit(text.as_bytes()), Err(AuditError::Incomplete(1))));
    }

    #[test]
    fn rejects_a_false_claim() {
        let text = format!("# tbp-log v1 e=2 eps=2^-4 mode=interval\n{} energy\n", DyadicBox::root());
        assert!(matches!(audit(text.as_bytes()), Err(AuditError::Unverified { line: 2, .. })));
    }
}
