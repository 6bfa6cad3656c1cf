use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lacuna(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lacuna"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// All files of `dir` by name, with contents.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn cf_of_seven_thirds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cf");
    let o = lacuna(&["cf", "--x", "7/3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(read(&out, "summary.txt").contains("expansion: [2; 3]\n"));
    assert_eq!(
        read(&out, "convergents.csv"),
        "k,a_k,p_k,q_k\n0,2,2,1\n1,3,7,3\n"
    );
    let manifest: serde_json::Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["log_base"], "natural");
    assert_eq!(manifest["config"]["x"], "7/3");
    assert!(manifest["config"].get("out").is_none());
}

#[test]
fn shiftseq_first_term_and_manifest_rerun() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let args = [
        "shiftseq",
        "--alpha",
        "(1+1*sqrt(5))/2",
        "--gamma",
        "0/1",
        "--T",
        "5",
    ];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", a.to_str().unwrap()]);
    assert!(lacuna(&with_out).status.success());
    let csv = read(&a, "sequence.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("t,n_t,b_t,q6t,distance_decimal,checks_passed")
    );
    assert!(lines.next().unwrap().starts_with("1,21,8,13,"));

    let b = tmp.path().join("b");
    let m = a.join("manifest.json");
    let o = lacuna(&[
        "run",
        "--config",
        m.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(snapshot(&a), snapshot(&b));
}

#[test]
fn bare_config_file_uses_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"command": "badness", "beta": "sqrt(2)", "delta": "0", "N": 2000, "checkpoints": [10, 2000]}"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    let o = lacuna(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&out, "badness.csv");
    assert_eq!(csv.lines().count(), 3);
    let manifest: serde_json::Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["config"]["precision"], 200);
    assert_eq!(
        manifest["config"]["checkpoints"],
        serde_json::json!([10, 2000])
    );
}

#[test]
fn exit_codes_and_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = lacuna(&["cf", "--x", "not-a-number", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let d: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(d["exit_code"], 2);

    let o = lacuna(&[
        "threegap", "--alpha", "sqrt(2)", "--m", "20", "--max-m", "10", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(3));
    let d: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(d["error"], "ResourceCap");

    let o = lacuna(&[
        "count", "--alpha", "sqrt(2)", "--gamma", "0", "--beta", "sqrt(3)", "--delta", "0", "--N",
        "500", "--max-n", "100", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(3));

    // mixed fields inside one pair
    let o = lacuna(&[
        "ostrowski",
        "--alpha",
        "sqrt(2)",
        "--gamma",
        "sqrt(3)",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(2));
    let d: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(d["error"], "IncompatibleFields");

    let o = lacuna(&["kconst", "--x", "5/7", "--out", out]);
    assert_eq!(o.status.code(), Some(2));

    let o = lacuna(&[
        "uniform", "--alpha", "sqrt(2)", "--gamma", "0", "--beta", "sqrt(2)", "--delta", "0",
        "--T", "3", "--eps", "-1", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_command_runs_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["kconst", "--x", "sqrt(2)", "--depth", "30"],
        vec!["threegap", "--alpha", "(1+sqrt(5))/2", "--m", "100"],
        vec![
            "ostrowski",
            "--alpha",
            "sqrt(2)",
            "--gamma",
            "1/3",
            "--depth",
            "12",
            "--k",
            "4",
        ],
        vec![
            "count",
            "--alpha",
            "sqrt(2)",
            "--gamma",
            "1/4",
            "--beta",
            "sqrt(3)",
            "--delta",
            "1/3",
            "--N",
            "3000",
            "--checkpoints",
            "100,1000,3000",
        ],
        vec![
            "shifthits",
            "--alpha",
            "sqrt(2)",
            "--gamma",
            "1/3",
            "--beta",
            "sqrt(2)",
            "--delta",
            "1/2",
            "--T",
            "6",
        ],
        vec![
            "uniform", "--alpha", "sqrt(2)", "--gamma", "1/3", "--beta", "sqrt(2)", "--delta",
            "1/2", "--T", "6", "--eps", "1/3",
        ],
        vec![
            "sample",
            "--M",
            "3",
            "--block-len",
            "5",
            "--count",
            "4",
            "--seed",
            "99",
        ],
        vec![
            "badness", "--beta", "sqrt(7)", "--delta", "1/5", "--N", "5000",
        ],
        vec![
            "fourier",
            "--M",
            "3",
            "--samples",
            "3000",
            "--freqs",
            "-3..4,100",
            "--seed",
            "5",
        ],
        vec!["--format", "json", "sample", "--M", "2", "--count", "2"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let a = tmp.path().join(format!("{i}a"));
        let b = tmp.path().join(format!("{i}b"));
        for dir in [&a, &b] {
            let mut args = case.clone();
            args.extend(["--out", dir.to_str().unwrap()]);
            let o = lacuna(&args);
            assert!(
                o.status.success(),
                "{case:?}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
        assert_eq!(snapshot(&a), snapshot(&b), "{case:?}");
        let c = tmp.path().join(format!("{i}c"));
        let m = a.join("manifest.json");
        let o = lacuna(&[
            "run",
            "--config",
            m.to_str().unwrap(),
            "--out",
            c.to_str().unwrap(),
        ]);
        assert!(
            o.status.success(),
            "{case:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(snapshot(&a), snapshot(&c), "{case:?} from manifest");
    }
}

#[test]
fn fourier_zero_frequency_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("f");
    let o = lacuna(&[
        "fourier",
        "--M",
        "2",
        "--samples",
        "1000",
        "--freqs",
        "0,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = read(&out, "fourier.csv");
    assert_eq!(csv.lines().nth(1).unwrap(), "0,1,0,0.03162277660168379");
}

#[test]
fn library_entry_point_matches_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("lib");
    let code = lacuna_cli::main_with_args([
        "lacuna",
        "cf",
        "--x",
        "sqrt(7)",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(read(&a, "summary.txt").contains("[2; 1, 1, 1, 4] (period=4)"));
}
