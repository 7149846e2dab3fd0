use std::process::{Command, Output};

use tbp_core::hexfloat;

fn tbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tbp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn interval_field(text: &str, name: &str) -> (f64, f64) {
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{name}=")))
        .unwrap_or_else(|| panic!("no {name} in\n{text}"));
    let (lo, hi) = line.trim_start_matches('[').trim_end_matches(']').split_once(", ").unwrap();
    (hexfloat::parse(lo).unwrap(), hexfloat::parse(hi).unwrap())
}

#[test]
fn constants_enclose_the_exact_energies() {
    let o = tbp(&["constants", "--e", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let (lo, hi) = interval_field(&text, "M_e");
    assert!(lo < 4.25 && 4.25 < hi);
    let (lo, hi) = interval_field(&text, "T_e");
    assert!(lo < 2.25 && 2.25 < hi);
    let (lo, hi) = interval_field(&text, "M_e-T_e");
    assert!(lo < 2.0 && 2.0 < hi);
}

#[test]
fn root_box_is_subdivided() {
    let o = tbp(&["inspect-box", "0:67108864|0:0,0|0:0,0|0:0,0", "--e", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("confined=false"));
    assert!(text.contains("tetra=false"));
    assert!(text.contains("redundant=none"));
    assert!(text.contains("energy_lower_bound=-inf"));
    assert!(text.trim_end().lines().last().unwrap().starts_with("verdict=split"));
}

#[test]
fn flag_errors_exit_with_two() {
    for args in [
        vec!["verify", "--e", "3"],
        vec!["verify", "--e", "2", "--eps", "0.1"],
        vec!["verify", "--e", "2", "--eps", "2^-30"],
        vec!["verify", "--e", "2", "--mode", "exact"],
        vec!["constants"],
        vec!["inspect-box", "not-a-key", "--e", "2"],
        vec!["frobnicate"],
    ] {
        assert_eq!(tbp(&args).status.code(), Some(2), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck");
    let out = dir.path().to_str().unwrap();
    let o = tbp(&["verify", "--e", "2", "--workers", "2", "--checkpoint", ck.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hessian_certificate_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let o = tbp(&["hessian-cert", "--e", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("valid=true"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["valid"], true);
    assert_eq!(json["exponent"], 2);
    assert_eq!(json["pivots"].as_array().unwrap().len(), 7);
}

#[test]
fn bad_logs_fail_the_audit() {
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.log");
    std::fs::write(&short, "# tbp-log v1 e=2 eps=2^-4 mode=interval\n").unwrap();
    assert_eq!(tbp(&["audit-log", short.to_str().unwrap()]).status.code(), Some(1));

    let lying = dir.path().join("lying.log");
    std::fs::write(
        &lying,
        "# tbp-log v1 e=2 eps=2^-4 mode=interval\n0:67108864|0:0,0|0:0,0|0:0,0 energy\n",
    )
    .unwrap();
    let o = tbp(&["audit-log", lying.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("audit=failed"));

    let missing = dir.path().join("missing.log");
    assert_eq!(tbp(&["audit-log", missing.to_str().unwrap()]).status.code(), Some(1));
}

/// A float-mode run completes but certifies nothing.
#[test]
fn float_mode_is_not_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tbp(&["verify", "--e", "2", "--eps", "2^-2", "--mode", "float", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("halted=true"));
    assert!(text.contains("certificate=none"));
    let report = std::fs::read_to_string(dir.path().join("tbp-e2-eps2-float.report")).unwrap();
    assert!(text.starts_with(&report));
}
