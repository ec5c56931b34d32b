use std::path::Path;
use std::process::{Command, Output};

fn imo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imo"))
        .args(args)
        .env_remove("IMO_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn solve_bk1_prints_table_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = imo(&[
        "solve",
        "--problem",
        "I-BK1",
        "--x0",
        "9.9862,-7.4332",
        "--out-dir",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("status: Critical"));
    let rows = text
        .lines()
        .filter(|l| {
            l.trim_start()
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_digit())
        })
        .count();
    // k = 0 plus one row per accepted step
    assert!((10..=16).contains(&rows), "{rows} rows");

    let csv = std::fs::read_to_string(dir.path().join("solve-I-BK1.csv")).unwrap();
    assert!(csv.starts_with("k,x1,x2,G1_lo,G1_hi,G2_lo,G2_hi,xi,t"));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("solve-I-BK1.json")).unwrap())
            .unwrap();
    let xi = json["iterates"].as_array().unwrap().last().unwrap()["xi"]
        .as_f64()
        .unwrap();
    assert!(xi > -1e-6 && xi <= 0.0);
    let svg = std::fs::read_to_string(dir.path().join("solve-I-BK1.svg")).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
}

#[test]
fn solve_portfolio_midpoint() {
    let dir = tempfile::tempdir().unwrap();
    let o = imo(&[
        "solve",
        "--problem",
        "portfolio",
        "--x0",
        "0.5",
        "--format",
        "json",
        "--out-dir",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("final x: (0.500000, 0.500000)"));
    assert!(!dir.path().join("solve-portfolio.csv").exists());
}

#[test]
fn unknown_problem_and_bad_flags_exit_one() {
    assert_eq!(imo(&["solve", "--problem", "nope"]).status.code(), Some(1));
    assert_eq!(imo(&["solve", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(imo(&["bench", "--eta", "1.5"]).status.code(), Some(1));
}

#[test]
fn max_iterations_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = imo(&[
        "solve",
        "--problem",
        "I-BK1",
        "--x0",
        "9.9862,-7.4332",
        "--max-iters",
        "2",
        "--out-dir",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_is_deterministic_with_stats_schema() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = imo(&[
            "bench",
            "--problems",
            "I-BK1,I-VU2,I-Viennet",
            "--runs",
            "5",
            "--seed",
            "7",
            "--out-dir",
            &out_arg(d.path()),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let stats = |d: &Path| {
        let mut r = csv::Reader::from_path(d.join("stats.csv")).unwrap();
        let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
        let rows: Vec<Vec<String>> = r
            .records()
            .map(|x| {
                let x = x.unwrap();
                header
                    .iter()
                    .zip(x.iter())
                    .filter(|(h, _)| !h.starts_with("cpu_time"))
                    .map(|(_, v)| v.to_string())
                    .collect()
            })
            .collect();
        (header, rows)
    };
    let (ha, ra) = stats(a.path());
    let (_, rb) = stats(b.path());
    assert_eq!(ra, rb);
    assert_eq!(ra.len(), 3);
    for s in ["min", "max", "mean", "median", "mode", "std_dev"] {
        assert!(ha.contains(&format!("iterations_{s}")), "{s}");
        assert!(ha.contains(&format!("cpu_time_{s}")), "{s}");
    }
    assert!(a.path().join("records.csv").exists());
    assert!(a.path().join("campaign.json").exists());
}

#[test]
fn env_seed_is_used_when_no_flag() {
    let run = |seed: Option<&str>, flag: Option<&str>| {
        let d = tempfile::tempdir().unwrap();
        let out = out_arg(d.path());
        let mut args = vec![
            "bench",
            "--problems",
            "I-BK1",
            "--runs",
            "2",
            "--format",
            "csv",
        ];
        args.extend(["--out-dir", &out]);
        if let Some(f) = flag {
            args.extend(["--seed", f]);
        }
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_imo"));
        cmd.args(&args).env_remove("IMO_SEED");
        if let Some(s) = seed {
            cmd.env("IMO_SEED", s);
        }
        assert!(cmd.output().unwrap().status.success());
        let text = std::fs::read_to_string(d.path().join("records.csv")).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let idx = r.headers().unwrap().iter().position(|h| h == "x0").unwrap();
        r.records()
            .map(|x| x.unwrap()[idx].to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(run(Some("9"), None), run(None, Some("9")));
    assert_ne!(run(Some("9"), None), run(None, None));
    assert_eq!(run(Some("9"), Some("42")), run(None, None));
}

#[test]
fn profile_writes_svg_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = imo(&[
        "profile",
        "--problems",
        "I-BK1,I-VU2,I-CH,I-SD",
        "--runs",
        "3",
        "--out-dir",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for metric in ["iterations", "cpu_time"] {
        let svg =
            std::fs::read_to_string(dir.path().join(format!("profile-{metric}.svg"))).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let curves = doc
            .descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .count();
        assert_eq!(curves, 2);
    }
    let mut r = csv::Reader::from_path(dir.path().join("profiles.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|x| x == name).unwrap();
    let (m, s, rho) = (col("metric"), col("solver"), col("rho"));
    let mut last: std::collections::BTreeMap<(String, String), f64> = Default::default();
    for rec in r.records() {
        let rec = rec.unwrap();
        let key = (rec[m].to_string(), rec[s].to_string());
        let v: f64 = rec[rho].parse().unwrap();
        if let Some(prev) = last.get(&key) {
            assert!(v >= *prev);
        }
        last.insert(key, v);
    }
    assert_eq!(last.len(), 4);
    assert!(last.values().all(|v| *v == 1.0));
}

#[test]
fn verify_reports_table_and_fails_on_tiny_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = imo(&["verify", "--out-dir", &out]);
    let text = stdout(&o);
    let table_rows = text
        .lines()
        .filter(|l| l.contains("PASS") || l.contains("FAIL"))
        .filter(|l| !l.starts_with("x*") && !l.starts_with("verify"))
        .collect::<Vec<_>>();
    assert_eq!(table_rows.len(), 11);
    assert!(table_rows
        .iter()
        .all(|l| l.ends_with("PASS") || l.contains("PASS  (")));
    assert!(text.contains("x* vs alpha = 0.7: Incomparable  PASS"));
    // The tabulated alpha = 0.4 point dominates x*; see the discrepancies chapter.
    assert!(text.contains("x* vs alpha = 0.4: StrictlyDominatedBy  FAIL"));
    assert_eq!(o.status.code(), Some(4));

    let o = imo(&["verify", "--tolerance", "1e-12", "--out-dir", &out]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("verify: FAIL"));
}

#[test]
fn portfolio_matches_printed_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = imo(&["portfolio", "--out-dir", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 5);
}

#[test]
fn list_prints_catalogue() {
    let o = imo(&["list"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(names.len(), 21);
    assert_eq!(names[0], "I-BK1");
    assert!(names.contains(&"portfolio"));
}

#[test]
fn help_for_every_command() {
    for cmd in ["solve", "bench", "profile", "verify", "portfolio", "list"] {
        let o = imo(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        assert!(stdout(&o).contains("Usage"));
    }
    assert_eq!(imo(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"problem": "portfolio", "x0": [0.0], "format": "json"}"#,
    )
    .unwrap();
    let out = out_arg(dir.path());
    let o = imo(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        &out,
    ]);
    assert!(stdout(&o).contains("final x: (0.000000, 1.000000)"));
    let o = imo(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--x0",
        "0.25",
        "--out-dir",
        &out,
    ]);
    assert!(stdout(&o).contains("final x: (0.250000, 0.750000)"));
    std::fs::write(&cfg, r#"{"problme": "portfolio"}"#).unwrap();
    let o = imo(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
