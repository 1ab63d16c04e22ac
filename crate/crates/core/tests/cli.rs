use std::process::Command;

fn toruslab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_toruslab")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn count_lists_twenty_vectors() {
    let (code, out, _) = toruslab(&["count", "--n", "2", "--lambda", "5", "--eps", "0.1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "20");
    let mut vecs: Vec<(i64, i64)> = lines[2..]
        .iter()
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse::<i64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    vecs.sort();
    vecs.dedup();
    assert_eq!(vecs.len(), 20);
    assert!(vecs.iter().all(|(a, b)| a * a + b * b == 25 || a * a + b * b == 26));
}

#[test]
fn sweep_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.csv");
    let (code, _, err) = toruslab(&[
        "sweep", "--mode", "counts", "--n", "2", "--lambda-min", "10", "--lambda-max", "5000", "--eps", "shrink",
        "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,epsilon,n_dim,count,bound,ratio,wall_ms"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 21);
    let fit = text.lines().find(|l| l.starts_with("# fit:")).unwrap();
    assert!(fit.contains("slope=") && fit.contains("C="));
    assert!(text.contains("config_hash="));
}

#[test]
fn sweep_is_reproducible_and_json_is_complete() {
    let args = [
        "sweep", "--mode", "schatten", "--n", "2", "--lambda-min", "5", "--lambda-max", "20", "--points", "4",
        "--eps", "0.5", "--trials", "2", "--seed", "9", "--format", "json",
    ];
    let (c1, a, _) = toruslab(&args);
    let (c2, b, _) = toruslab(&args);
    assert_eq!((c1, c2), (0, 0));
    let strip = |s: &str| {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        for r in v["rows"].as_array_mut().unwrap() {
            r["wall_ms"] = 0.into();
        }
        v
    };
    let (va, vb) = (strip(&a), strip(&b));
    assert_eq!(va, vb);
    assert_eq!(va["meta"]["seed"], 9);
    assert!(va["fit"].get("C").is_some() && va["fit"].get("slope").is_some());
    assert_eq!(va["rows"].as_array().unwrap().len(), 8);
}

#[test]
fn svg_output_is_static() {
    let (code, out, _) = toruslab(&[
        "sweep", "--lambda-min", "10", "--lambda-max", "500", "--points", "8", "--format", "svg",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("<svg") && out.contains("<circle") && out.contains("<line"));
    assert!(!out.contains("<script"));
}

#[test]
fn exit_codes_follow_error_class() {
    assert_eq!(toruslab(&["count", "--nope"]).0, 1);
    assert!(toruslab(&["count", "--nope"]).2.contains("Usage"));
    assert_eq!(toruslab(&["sweep", "--mode", "bogus"]).0, 1);
    assert_eq!(toruslab(&["schatten", "--n", "3", "--lambda", "40", "--eps", "1"]).0, 3);
    assert_eq!(toruslab(&["exponents", "--help"]).0, 0);
    let (_, help, _) = toruslab(&["sweep", "--help"]);
    for flag in ["--lambda-min", "--lambda-max", "--points", "--eps", "--seed", "--jobs", "--config", "--format"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn jobs_flag_does_not_change_results() {
    let run = |jobs: &str| {
        let (code, out, _) = toruslab(&[
            "sweep", "--lambda-min", "10", "--lambda-max", "2000", "--points", "10", "--jobs", jobs,
        ]);
        assert_eq!(code, 0);
        out.lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_owned())
            .collect::<Vec<_>>()
    };
    assert_eq!(run("1"), run("3"));
}
