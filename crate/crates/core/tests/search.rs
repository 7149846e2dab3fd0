use std::fs::File;
use std::io::BufReader;

use tbp_core::eliminators::Eps;
use tbp_core::geometry::Exponent;
use tbp_core::search::audit::audit;
use tbp_core::search::checkpoint::{run_checkpointed, Checkpoint, Progress};
use tbp_core::search::log::digest;
use tbp_core::search::{run, Mode, SearchConfig};

/// One interrupted-and-resumed run and one parallel run must write the same
/// log as each other, and that log must pass the audit.
#[test]
fn resumed_and_parallel_runs_agree_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("run.log");
    let ck = dir.path().join("run.ckpt");
    let cfg = SearchConfig::new(Exponent::One, Eps::new(4).unwrap(), Mode::Interval);

    let mut stops = 0;
    let report = loop {
        match run_checkpointed(&cfg, &log, &ck, 250_000, Some(1_500_000)).unwrap() {
            Progress::Stopped(c) => {
                assert_eq!(Checkpoint::load(&ck).unwrap(), c);
                stops += 1;
            }
            Progress::Finished(r) => break r,
        }
    };
    assert!(stops >= 2);
    assert!(report.certified());
    assert!(!ck.exists());
    let bytes = std::fs::read(&log).unwrap();
    assert_eq!(digest(&bytes), report.log_digest);

    let mut par_cfg = cfg;
    par_cfg.workers = 3;
    let mut out = Vec::new();
    let par = run(&par_cfg, &mut out).unwrap();
    assert_eq!(par.log_digest, report.log_digest);
    assert_eq!(par.counters, report.counters);
    assert!(out == bytes);
    drop(out);

    let (_, a) = audit(BufReader::new(File::open(&log).unwrap())).unwrap();
    assert_eq!(a.confined, report.counters.confined);
    assert_eq!(a.energy, report.counters.energy);
    assert!(a.near_target > 0);
}

#[test]
fn resume_refuses_a_different_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("run.log");
    let ck = dir.path().join("run.ckpt");
    let cfg = SearchConfig::new(Exponent::Two, Eps::new(4).unwrap(), Mode::Interval);
    assert!(matches!(
        run_checkpointed(&cfg, &log, &ck, 1000, Some(2000)).unwrap(),
        Progress::Stopped(_)
    ));
    let other = SearchConfig::new(Exponent::One, Eps::new(4).unwrap(), Mode::Interval);
    assert!(run_checkpointed(&other, &log, &ck, 1000, Some(2000)).is_err());
    std::fs::write(&log, b"tampered").unwrap();
    assert!(run_checkpointed(&cfg, &log, &ck, 1000, Some(2000)).is_err());
}
