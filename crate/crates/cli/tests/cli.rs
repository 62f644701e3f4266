use std::path::Path;
use std::process::{Command, Output};

fn ladder(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ladder"))
        .args(args)
        .env("LADDER_CACHE_DIR", cache)
        .output()
        .expect("spawn ladder")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn zeros_near_first() {
    let dir = tempfile::tempdir().unwrap();
    let o = ladder(&["zeros", "--near", "14", "--count", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].contains("14.13472514"), "{text}");
    assert!(rows[1].contains("21.0220396"), "{text}");
}

#[test]
fn zeros_count_zero_prints_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = ladder(&["zeros", "--near", "100", "--count", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn unknown_suite_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ladder(&["verify", "--suite", "bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inverted_range_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ladder(&["build-ladder", "--t-min", "500", "--t-max", "400"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn rebuild_hits_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["build-ladder", "--t-min", "100", "--t-max", "1500"];
    let first = ladder(&args, dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stderr(&first).contains("cache miss"));
    let second = ladder(&args, dir.path());
    assert!(stderr(&second).contains("cache hit"));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn identity_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("identity.csv");
    let o = ladder(
        &["verify", "--suite", "identity", "--T", "3000", "--n", "2", "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("label,T,U,l,n,lhs,rhs,ratio,est_error"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# small identity run\nsuite = identity\nT = 2000\nn = 1\nl = 1\nformat = json\n",
    )
    .unwrap();
    let o = ladder(
        &["verify", "--config", cfg.to_str().unwrap(), "--format", "csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("label,T,U"), "{text}");
    assert!(text.contains("identity,2.0000000000000000e3"), "{text}");
}

#[test]
fn unknown_config_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "suite = identity\nspeed = 11\n").unwrap();
    let o = ladder(&["verify", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
