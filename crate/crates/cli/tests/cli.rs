use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ks_cli::{compare_suite, parse_config, SuiteError, Summary};

fn ks1d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ks1d")).args(args).output().unwrap()
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn summary(dir: &Path) -> Summary {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

const SMALL: &str = r#"
t_end = 0.05
[diffusion]
kind = "inverse_one_plus_u"
[initial_condition]
kind = "cosine_bump"
mass = 2.0
amplitude = 0.5
frequency = 1.0
[grid]
n_cells = 32
"#;

// A wall bump with mass 4 sharpens, so its peak passes 6.5 quickly.
const AGGREGATING: &str = r#"
t_end = 1.0
[diffusion]
kind = "inverse_u"
[initial_condition]
kind = "cosine_bump"
mass = 4.0
amplitude = 0.5
frequency = 1.0
[grid]
n_cells = 32
[solver]
blowup_threshold = 6.5
"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn constant_scenario_writes_every_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = ks1d(&[
        "simulate",
        scenario("constant.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let ts = std::fs::read_to_string(out.join("timeseries.csv")).unwrap();
    let mut lines = ts.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    assert!(!ts.contains('\r'));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), header.len());
        for name in ["energy_residual", "D", "source"] {
            let x: f64 = fields[col(name)].parse().unwrap();
            let expected = if name == "energy_residual" { 0.0 } else { 1.0 };
            assert!((x - expected).abs() <= 1e-12, "{name} = {x}");
        }
    }

    for t in ["0", "1"] {
        let profile = std::fs::read_to_string(out.join(format!("profile_t{t}.csv"))).unwrap();
        assert!(profile.starts_with("x,u,v\n"));
        assert_eq!(profile.lines().count(), 129);
    }
    let s = summary(&out);
    assert_eq!(s.status, "finished");
    assert_eq!(s.exit_code, 0);
    assert_eq!(s.t_final, 1.0);
    assert!(s.max_abs_energy_residual <= 1e-12);
}

#[test]
fn identical_manifests_give_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let read = |dir: &Path, f: &str| std::fs::read(dir.join(f)).unwrap();
    let mut outs = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("run{k}"));
        let o = ks1d(&[
            "simulate",
            scenario("critical_energy.toml").to_str().unwrap(),
            "--t-end",
            "0.5",
            "--n-cells",
            "64",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(out);
    }
    for f in ["timeseries.csv", "profile_t0.csv", "profile_t0.5.csv"] {
        assert_eq!(read(&outs[0], f), read(&outs[1], f), "{f} differs");
    }
    let s = summary(&outs[0]);
    assert_eq!(s.n_cells, 64);
    assert_eq!(s.t_final, 0.5);
}

#[test]
fn exit_codes_follow_the_final_status() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("finished", SMALL.to_string(), 0),
        ("blowup", AGGREGATING.to_string(), 3),
        ("collapse", format!("{SMALL}[solver]\ndt_min = 0.01\n"), 4),
    ];
    for (name, text, code) in cases {
        let cfg = write(tmp.path(), &format!("{name}.toml"), &text);
        let out = tmp.path().join(name);
        let o = ks1d(&["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(
            o.status.code(),
            Some(code),
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(summary(&out).exit_code, code);
    }
}

#[test]
fn invalid_configs_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.toml", &format!("{SMALL}unknown_key = 1\n"));
    let o = ks1d(&["simulate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown_key"));

    let o = ks1d(&["simulate", tmp.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.toml"));

    let good = write(tmp.path(), "good.toml", SMALL);
    let o = ks1d(&["simulate", good.to_str().unwrap(), "--n-cells", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn suite_writes_a_comparison_table() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("configs");
    std::fs::create_dir(&dir).unwrap();
    write(&dir, "a.toml", SMALL);
    write(
        &dir,
        "b.toml",
        &SMALL.replace("kind = \"inverse_one_plus_u\"", "kind = \"power_one_plus_u\"\np = -2.0"),
    );
    write(&dir, "notes.txt", "ignored");
    let out = tmp.path().join("out");
    let o = ks1d(&["suite", dir.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.join("comparison.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "scenario,p,M,variant,status,max_u_linf,t_final");
    assert!(lines[1].starts_with("a,-1,2,standard,finished,"), "{}", lines[1]);
    assert!(lines[2].starts_with("b,-2,2,standard,finished,"), "{}", lines[2]);
    assert!(out.join("a/timeseries.csv").exists() && out.join("b/summary.json").exists());
}

#[test]
fn suite_rejects_single_and_duplicate_manifests() {
    let one = parse_config(SMALL).unwrap();
    assert!(matches!(
        compare_suite(std::slice::from_ref(&one)),
        Err(SuiteError::TooFew(1))
    ));
    let err = compare_suite(&[one.clone(), one]).unwrap_err();
    assert!(err.to_string().contains("`scenario`"), "{err}");

    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "only.toml", SMALL);
    let o = ks1d(&[
        "suite",
        tmp.path().to_str().unwrap(),
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 2"));
}

#[test]
fn verify_passes() {
    let o = ks1d(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.contains("checks passed"));
}
