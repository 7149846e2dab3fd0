//! Depth-first divide and conquer over dyadic boxes.
//!
//! The driver keeps an explicit stack seeded with the root box. Each popped
//! box goes through confinement, the tetrahedral eliminator, the redundancy
//! eliminator and the energy test, in that order; a box surviving all four
//! is split along the factor with the largest error term and its children
//! are pushed so that the first child is examined next. Terminal boxes are
//! written to the log in pre-order, which is the order a recursive search
//! would visit them, so logs do not depend on the worker count.

pub mod audit;
pub mod checkpoint;
pub mod log;

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::dyadic::DyadicBox;
use crate::eliminators::{is_confined, redundancy_eliminate, tetra_eliminate, tetra_threshold, Eps, Verdict};
use crate::error::Fault;
use crate::estimator::{subdivision_index, BoxAnalysis, LowerBound};
use crate::geometry::{tbp_energy, Exponent};
use crate::interval::Interval;

pub use self::log::Record;

/// Added to the energy threshold in the float screening test.
pub const FUDGE: f64 = 1.0 / (1u64 << 40) as f64;
/// Absolute margin required by float confinement and redundancy tests.
pub const SLACK: f64 = 1.0 / (1u64 << 30) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Float,
    Interval,
    Hybrid,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Interval => "interval",
            Mode::Hybrid => "hybrid",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "float" => Some(Mode::Float),
            "interval" => Some(Mode::Interval),
            "hybrid" => Some(Mode::Hybrid),
            _ => None,
        }
    }

    /// Whether a halted run in this mode proves anything.
    pub fn certifies(&self) -> bool {
        !matches!(self, Mode::Float)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub e: Exponent,
    pub eps: Eps,
    pub mode: Mode,
    pub workers: usize,
}

impl SearchConfig {
    pub fn new(e: Exponent, eps: Eps, mode: Mode) -> Self {
        SearchConfig {
            e,
            eps,
            mode,
            workers: 1,
        }
    }
}

/// Shared constants: `M_E` and `M_E - T_E`, both modes.
#[derive(Debug, Clone, Copy)]
pub struct Thresholds {
    pub energy: Interval,
    pub energy_float: f64,
    pub tetra: Interval,
}

impl Thresholds {
    pub fn new(e: Exponent) -> Self {
        Thresholds {
            energy: tbp_energy(e),
            energy_float: tbp_energy::<f64>(e),
            tetra: tetra_threshold(e),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub processed: u64,
    pub confined: u64,
    pub tetra: u64,
    pub redundant: [u64; 3],
    pub energy: u64,
    pub subdivided: u64,
    pub mismatches: u64,
    pub max_depth: u8,
}

impl Counters {
    pub fn eliminated(&self) -> u64 {
        self.tetra + self.redundant.iter().sum::<u64>() + self.energy
    }

    fn count(&mut self, b: &DyadicBox, v: Verdict, mismatches: u64) {
        self.processed += 1;
        self.mismatches += mismatches;
        self.max_depth = self.max_depth.max(*b.depths().iter().max().unwrap());
        match v {
            Verdict::Confined => self.confined += 1,
            Verdict::Tetra => self.tetra += 1,
            Verdict::Redundant(p) => self.redundant[p as usize - 1] += 1,
            Verdict::Energy => self.energy += 1,
            Verdict::Subdivide(_) => self.subdivided += 1,
        }
    }

    fn merge(&mut self, o: &Counters) {
        self.processed += o.processed;
        self.confined += o.confined;
        self.tetra += o.tetra;
        for p in 0..3 {
            self.redundant[p] += o.redundant[p];
        }
        self.energy += o.energy;
        self.subdivided += o.subdivided;
        self.mismatches += o.mismatches;
        self.max_depth = self.max_depth.max(o.max_depth);
    }
}

/// Result of examining one box.
#[derive(Debug, Clone)]
pub struct Examination {
    pub verdict: Verdict,
    /// `key=value` evidence for terminal verdicts.
    pub evidence: Vec<(String, String)>,
    pub mismatches: u64,
}

fn hex(x: f64) -> String {
    crate::hexfloat::format(x)
}

fn interval_confined(b: &DyadicBox, cfg: &SearchConfig) -> bool {
    is_confined::<Interval>(b, cfg.eps, 0.0)
}

fn tetra_evidence(a: &BoxAnalysis<Interval>, e: Exponent, th: &Thresholds) -> Vec<(String, String)> {
    vec![
        ("thr".into(), hex(th.tetra.hi())),
        ("min_sep".into(), hex(min_psi_max(a))),
        ("e".into(), e.value().to_string()),
    ]
}

fn min_psi_max<T: crate::Real>(a: &BoxAnalysis<T>) -> f64 {
    let mut m = 2.0f64;
    for i in 0..5 {
        for j in (i + 1)..5 {
            m = m.min(a.pairs.get(i, j).psi_max);
        }
    }
    m
}

fn energy_evidence(lb: f64, th: f64) -> Vec<(String, String)> {
    vec![("lb".into(), hex(lb)), ("thr".into(), hex(th))]
}

/// Runs the four tests on one box.
pub fn examine(b: &DyadicBox, cfg: &SearchConfig, th: &Thresholds) -> Result<Examination, Fault> {
    let float = BoxAnalysis::<f64>::new(b)?;
    let float_budget = float.error_budget(cfg.e)?;
    let split = Verdict::Subdivide(subdivision_index(&float_budget));
    let done = |verdict, evidence, mismatches| {
        Ok(Examination {
            verdict,
            evidence,
            mismatches,
        })
    };

    match cfg.mode {
        Mode::Float => {
            if is_confined::<f64>(b, cfg.eps, SLACK) {
                return done(Verdict::Confined, vec![], 0);
            }
            if tetra_eliminate(&float, cfg.e) {
                return done(Verdict::Tetra, vec![("thr".into(), hex(th.tetra.hi()))], 0);
            }
            if let Some(p) = redundancy_eliminate(b, &float, SLACK) {
                return done(Verdict::Redundant(p), vec![], 0);
            }
            let lb = float.lower_bound_with(&float_budget, cfg.e)?;
            let thr = th.energy_float + FUDGE;
            if let LowerBound::Finite(v) = lb {
                if v > thr {
                    return done(Verdict::Energy, energy_evidence(v, thr), 0);
                }
            }
            done(split, vec![], 0)
        }
        Mode::Interval => {
            if interval_confined(b, cfg) {
                return done(Verdict::Confined, vec![], 0);
            }
            let a = BoxAnalysis::<Interval>::new(b)?;
            if tetra_eliminate(&a, cfg.e) {
                return done(Verdict::Tetra, tetra_evidence(&a, cfg.e, th), 0);
            }
            if let Some(p) = redundancy_eliminate(b, &a, 0.0) {
                return done(Verdict::Redundant(p), vec![], 0);
            }
            if let LowerBound::Finite(v) = a.energy_lower_bound(cfg.e)? {
                if v > th.energy.hi() {
                    return done(Verdict::Energy, energy_evidence(v, th.energy.hi()), 0);
                }
            }
            done(split, vec![], 0)
        }
        Mode::Hybrid => {
            let mut mismatches = 0;
            let mut interval: Option<BoxAnalysis<Interval>> = None;
            let mut certified = |b: &DyadicBox| -> Result<BoxAnalysis<Interval>, Fault> {
                if interval.is_none() {
                    interval = Some(BoxAnalysis::<Interval>::new(b)?);
                }
                Ok(interval.clone().unwrap())
            };
            if is_confined::<f64>(b, cfg.eps, SLACK) {
                if interval_confined(b, cfg) {
                    return done(Verdict::Confined, vec![], mismatches);
                }
                mismatches += 1;
            }
            if tetra_eliminate(&float, cfg.e) {
                let a = certified(b)?;
                if tetra_eliminate(&a, cfg.e) {
                    return done(Verdict::Tetra, tetra_evidence(&a, cfg.e, th), mismatches);
                }
                mismatches += 1;
            }
            if redundancy_eliminate(b, &float, SLACK).is_some() {
                let a = certified(b)?;
                if let Some(p) = redundancy_eliminate(b, &a, 0.0) {
                    return done(Verdict::Redundant(p), vec![], mismatches);
                }
                mismatches += 1;
            }
            if float.lower_bound_with(&float_budget, cfg.e)?.exceeds(th.energy_float + FUDGE) {
                let a = certified(b)?;
                if let LowerBound::Finite(v) = a.energy_lower_bound(cfg.e)? {
                    if v > th.energy.hi() {
                        return done(Verdict::Energy, energy_evidence(v, th.energy.hi()), mismatches);
                    }
                }
                mismatches += 1;
            }
            done(split, vec![], mismatches)
        }
    }
}

/// Outcome of a run.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub config: SearchConfig,
    pub halted: bool,
    pub counters: Counters,
    pub fault: Option<Fault>,
    pub wall_seconds: f64,
    pub log_digest: String,
}

impl SearchReport {
    /// Halted, no fault, and run in a certifying mode.
    pub fn certified(&self) -> bool {
        self.halted && self.fault.is_none() && self.config.mode.certifies()
    }

    pub fn render(&self) -> String {
        let c = &self.counters;
        let mut s = String::new();
        s.push_str(&format!(
            "e={} eps=2^-{} mode={} workers={}\n",
            self.config.e.value(),
            self.config.eps.log2_inv,
            self.config.mode.name(),
            self.config.workers
        ));
        s.push_str(&format!("halted={}\n", self.halted));
        s.push_str(&format!("processed={}\n", c.processed));
        s.push_str(&format!("confined={}\n", c.confined));
        s.push_str(&format!("tetra={}\n", c.tetra));
        s.push_str(&format!(
            "redundant={},{},{}\n",
            c.redundant[0], c.redundant[1], c.redundant[2]
        ));
        s.push_str(&format!("energy={}\n", c.energy));
        s.push_str(&format!("subdivided={}\n", c.subdivided));
        s.push_str(&format!("max_depth={}\n", c.max_depth));
        s.push_str(&format!("mismatches={}\n", c.mismatches));
        s.push_str(&format!("wall_seconds={:.3}\n", self.wall_seconds));
        s.push_str(&format!("log_sha256={}\n", self.log_digest));
        match &self.fault {
            Some(f) => s.push_str(&format!("fault={f}\ncertificate=none (poisoned)\n")),
            None if self.certified() => s.push_str("certificate=valid\n"),
            None => s.push_str("certificate=none\n"),
        }
        s
    }
}

/// Sequential search state; checkpointable between boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct Search {
    pub config: SearchConfig,
    pub stack: Vec<DyadicBox>,
    pub counters: Counters,
}

impl Search {
    pub fn new(config: SearchConfig) -> Self {
        Search {
            config,
            stack: vec![DyadicBox::root()],
            counters: Counters::default(),
        }
    }

    pub fn from_stack(config: SearchConfig, stack: Vec<DyadicBox>) -> Self {
        Search {
            config,
            stack,
            counters: Counters::default(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    /// Examines the top box; returns its record if it was terminal.
    pub fn step(&mut self, th: &Thresholds) -> Result<Option<Record>, Fault> {
        let Some(b) = self.stack.pop() else {
            return Ok(None);
        };
        let ex = examine(&b, &self.config, th)?;
        self.counters.count(&b, ex.verdict, ex.mismatches);
        match ex.verdict {
            Verdict::Subdivide(k) => {
                let kids = b.subdivide(k)?;
                self.stack.extend(kids.into_iter().rev());
                Ok(None)
            }
            v => Ok(Some(Record {
                key: b,
                verdict: v,
                evidence: ex.evidence,
            })),
        }
    }

    /// Runs until the stack empties, `limit` boxes were examined, or a fault.
    pub fn run_for(&mut self, th: &Thresholds, limit: Option<u64>, sink: &mut dyn FnMut(&Record)) -> Result<(), Fault> {
        let mut n = 0u64;
        while !self.stack.is_empty() {
            if limit.is_some_and(|l| n >= l) {
                break;
            }
            if let Some(r) = self.step(th)? {
                sink(&r);
            }
            n += 1;
        }
        Ok(())
    }
}

/// Splits the top of the tree until `target` independent subtrees exist.
///
/// Returns the pre-order sequence of items: terminal records met on the way
/// and pending subtree roots, each in the position a sequential run visits it.
fn frontier(
    cfg: &SearchConfig,
    th: &Thresholds,
    target: usize,
    counters: &mut Counters,
) -> Result<Vec<FrontierItem>, Fault> {
    let mut items = vec![FrontierItem::Pending(DyadicBox::root())];
    loop {
        let pending = items.iter().filter(|i| matches!(i, FrontierItem::Pending(_))).count();
        if pending == 0 || pending >= target {
            return Ok(items);
        }
        let pos = items
            .iter()
            .position(|i| matches!(i, FrontierItem::Pending(_)))
            .unwrap();
        // expand the shallowest pending box to keep subtrees balanced
        let pos = items
            .iter()
            .enumerate()
            .filter_map(|(k, i)| match i {
                FrontierItem::Pending(b) => Some((b.depths().iter().map(|&d| d as u32).sum::<u32>(), k)),
                _ => None,
            })
            .min()
            .map(|(_, k)| k)
            .unwrap_or(pos);
        let FrontierItem::Pending(b) = items[pos] else { unreachable!() };
        let ex = examine(&b, cfg, th)?;
        counters.count(&b, ex.verdict, ex.mismatches);
        let replacement: Vec<FrontierItem> = match ex.verdict {
            Verdict::Subdivide(k) => b.subdivide(k)?.into_iter().map(FrontierItem::Pending).collect(),
            v => vec![FrontierItem::Done(Record {
                key: b,
                verdict: v,
                evidence: ex.evidence,
            })],
        };
        items.splice(pos..pos + 1, replacement);
    }
}

enum FrontierItem {
    Done(Record),
    Pending(DyadicBox),
}

/// Runs a full search, writing the log to `out`.
///
/// With more than one worker the top of the tree is split into independent
/// subtrees that are searched concurrently; their records are written back
/// in sequential pre-order.
pub fn run(cfg: &SearchConfig, out: &mut dyn Write) -> std::io::Result<SearchReport> {
    let start = Instant::now();
    let th = Thresholds::new(cfg.e);
    let mut writer = log::LogWriter::new(out, cfg)?;
    let mut counters = Counters::default();
    let mut fault = None;

    if cfg.workers <= 1 {
        let mut search = Search::new(*cfg);
        let mut io_err = None;
        let res = search.run_for(&th, None, &mut |r| {
            if io_err.is_none() {
                if let Err(e) = writer.write(r) {
                    io_err = Some(e);
                }
            }
        });
        if let Some(e) = io_err {
            return Err(e);
        }
        fault = res.err();
        counters = search.counters;
    } else {
        match frontier(cfg, &th, 8 * cfg.workers, &mut counters) {
            Err(f) => fault = Some(f),
            Ok(items) => {
                let roots: Vec<DyadicBox> = items
                    .iter()
                    .filter_map(|i| match i {
                        FrontierItem::Pending(b) => Some(*b),
                        _ => None,
                    })
                    .collect();
                let results = parallel_subtrees(cfg, &th, &roots);
                // emit in pre-order, interleaving frontier records
                let mut next_root = 0;
                for item in items {
                    match item {
                        FrontierItem::Done(r) => writer.write(&r)?,
                        FrontierItem::Pending(_) => {
                            let (recs, c, f) = &results[next_root];
                            for r in recs {
                                writer.write(r)?;
                            }
                            counters.merge(c);
                            if fault.is_none() {
                                fault = *f;
                            }
                            next_root += 1;
                        }
                    }
                }
            }
        }
    }

    let digest = writer.finish()?;
    Ok(SearchReport {
        config: *cfg,
        halted: fault.is_none(),
        counters,
        fault,
        wall_seconds: start.elapsed().as_secs_f64(),
        log_digest: digest,
    })
}

type SubtreeResult = (Vec<Record>, Counters, Option<Fault>);

fn parallel_subtrees(
    cfg: &SearchConfig,
    th: &Thresholds,
    roots: &[DyadicBox],
) -> Vec<SubtreeResult> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<SubtreeResult>>> = Mutex::new(vec![None; roots.len()]);
    std::thread::scope(|s| {
        for _ in 0..cfg.workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= roots.len() {
                    break;
                }
                let mut search = Search::from_stack(*cfg, vec![roots[k]]);
                let mut recs = Vec::new();
                let res = search.run_for(th, None, &mut |r| recs.push(r.clone()));
                slots.lock().unwrap()[k] = Some((recs, search.counters, res.err()));
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.unwrap()).collect()
}
