use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vislat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vislat"))
        .args(args)
        .env_remove("VISLAT_THREADS")
        .output()
        .expect("binary runs")
}

fn summary(args: &[&str]) -> Value {
    let out = vislat(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1, "summary is one line");
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn density_example() {
    let v = summary(&[
        "density",
        "--set",
        "visible",
        "--lattice",
        "I2",
        "--radius",
        "1000",
    ]);
    assert_eq!(v["command"], "density");
    let est = v["result"]["estimate"].as_f64().unwrap();
    let theory = v["result"]["theory"].as_f64().unwrap();
    assert!((theory - 6.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
    assert!((est - 0.6079).abs() < 1e-3, "estimate {est}");
}

#[test]
fn series_example() {
    let v = summary(&[
        "series",
        "--kind",
        "xi",
        "--s",
        "2",
        "--prime-bound",
        "1000000",
    ]);
    let value = v["result"]["value"].as_f64().unwrap();
    let tail = v["result"]["tail_bound"].as_f64().unwrap();
    assert!((value - 0.32263).abs() < 1e-5, "value {value}");
    assert!(tail > 0.0 && tail < 1e-4);
    assert_eq!(v["parameters"]["prime_bound"], 1_000_000);
}

#[test]
fn peaks_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("peaks.csv");
    let v = summary(&[
        "peaks",
        "--lattice",
        "I2",
        "--qmax",
        "2",
        "--window",
        "0,0,1,1",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(v["result"]["count"], 4);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("num_1,num_2,q,intensity,amplitude"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: &[&[&str]] = &[
        &[
            "points",
            "--lattice",
            "1,0;0.5,0.8660254",
            "--radius",
            "30",
            "--filter",
            "visible",
        ],
        &["density", "--radius", "50,100,200", "--threads", "1"],
        &[
            "autocorr",
            "--shift",
            "3,4",
            "--radius",
            "100,300",
            "--threads",
            "1",
        ],
        &["peaks", "--qmax", "12", "--format", "json"],
        &["map", "--qmax", "8", "--resolution", "40"],
        &["kfree", "--k", "3", "--lo", "-500", "--hi", "500"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{i}-{run}"));
            let mut full = args.to_vec();
            full.extend(["--out", path_str(&path)]);
            let out = vislat(&full);
            assert!(out.status.success(), "{full:?}");
            outputs.push((out.stdout, std::fs::read(&path).unwrap()));
        }
        assert_eq!(outputs[0], outputs[1], "{args:?} differs between runs");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let a = summary(&["density", "--radius", "300", "--threads", "1"]);
    let b = summary(&["density", "--radius", "300", "--threads", "3"]);
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn filtering_points_by_content_matches_visible_filter() {
    let dir = tempfile::tempdir().unwrap();
    let all = dir.path().join("all.csv");
    let vis = dir.path().join("vis.csv");
    for (filter, path) in [("all", &all), ("visible", &vis)] {
        summary(&[
            "points",
            "--lattice",
            "I3",
            "--radius",
            "12",
            "--center",
            "0.5,-1,2",
            "--filter",
            filter,
            "--out",
            path_str(path),
        ]);
    }
    let all = std::fs::read_to_string(all).unwrap();
    let mut lines = all.lines();
    let header = lines.next().unwrap();
    let mut filtered = vec![header];
    filtered.extend(lines.filter(|l| l.rsplit(',').next() == Some("1")));
    let expected = std::fs::read_to_string(vis).unwrap();
    assert_eq!(filtered.join("\n") + "\n", expected);
    assert!(filtered.len() > 1000);
}

#[test]
fn argument_errors_exit_two() {
    for args in [
        &["series", "--kind", "xi", "--s", "1"][..],
        &["series", "--kind", "eta", "--s", "2"],
        &["peaks", "--qmax", "2", "--window", "0,0,1"],
        &["density", "--lattice", "1,2;2,4", "--radius", "10"],
        &["density", "--radius", "10", "--format", "pgm"],
        &["points", "--radius", "5", "--filter", "content=0"],
        &["nonsense"],
    ] {
        let out = vislat(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("Usage"), "{args:?}: {err}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn ceiling_errors_exit_one() {
    let out = vislat(&["points", "--radius", "1e6"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ceiling is 4294967296"), "{err}");

    let out = vislat(&["gaps", "--len", "40"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pgm_map_has_header_and_pixels() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.pgm");
    let v = summary(&[
        "map",
        "--qmax",
        "6",
        "--resolution",
        "64",
        "--out",
        path_str(&path),
    ]);
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P5\n# "));
    let body_start = bytes.len() - 64 * 64;
    assert!(bytes[..body_start].ends_with(b"\n64 64\n255\n"));
    let lit = bytes[body_start..].iter().filter(|&&b| b > 0).count();
    assert_eq!(v["result"]["lit_pixels"], lit);
    // the origin peak is the brightest and sits in the bottom-left corner
    assert_eq!(bytes[body_start + 63 * 64], 255);
}

#[test]
fn constructions_are_reported_exactly() {
    let v = summary(&["holes", "--lattice", "I2", "--block", "3"]);
    let t: Vec<i128> = v["result"]["translation"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().parse().unwrap())
        .collect();
    let gcd = |mut a: i128, mut b: i128| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    };
    for i in 0..3 {
        for j in 0..3 {
            assert!(gcd(t[0] + i, t[1] + j) > 1);
        }
    }
    let v = summary(&["gaps", "--k", "2", "--len", "4"]);
    assert_eq!(v["result"]["verified"], true);
}

#[test]
fn kfree_side_of_each_command() {
    let v = summary(&[
        "density", "--set", "kfree", "--k", "3", "--radius", "1000000",
    ]);
    assert!(v["result"]["abs_error"].as_f64().unwrap() < 2e-3);
    let v = summary(&[
        "autocorr", "--set", "kfree", "--shift", "4", "--radius", "100000",
    ]);
    assert!(v["result"]["abs_error"].as_f64().unwrap() < 1e-2);
    let v = summary(&[
        "fourier", "--set", "kfree", "--x", "0.5", "--radius", "100000",
    ]);
    let i = v["result"]["intensity"].as_f64().unwrap();
    assert!((i - 0.041064).abs() < 0.01, "{i}");
    let v = summary(&["peaks", "--set", "kfree", "--qmax", "8", "--window", "0,1"]);
    assert!(v["result"]["count"].as_u64().unwrap() > 0);
}
