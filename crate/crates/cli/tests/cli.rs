use std::collections::HashSet;
use std::path::Path;
use std::process::{Command, Output};

use hslcluster::{load_image, save_image, Image};

fn hslreduce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hslreduce"))
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn scene() -> Image {
    let mut px = Vec::new();
    for y in 0..32u32 {
        for x in 0..32u32 {
            px.push(if y < 20 {
                if x < 16 {
                    [255, 0, 0]
                } else {
                    [0, 255, 0]
                }
            } else {
                let a = (x * 4) as u8;
                [a, a / 6, a / 6]
            });
        }
    }
    Image::new(32, 32, px).unwrap()
}

#[test]
fn inspect_prints_nine_decimals() {
    let out = hslreduce(&["inspect", "--rgb", "255,0,0"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "H=0.000000000, S=1.000000000, L=0.500000000"
    );

    let out = hslreduce(&["inspect", "--rgb", "128,128,128"]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "H=0.000000000, S=0.000000000, L=0.501960784"
    );

    let out = hslreduce(&["inspect", "--rgb", "0,0,255"]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "H=2.094395102, S=1.000000000, L=0.500000000"
    );
}

#[test]
fn inspect_rejects_bad_triples() {
    for bad in ["300,0,0", "1,2", "a,b,c", "1,2,3,4"] {
        let out = hslreduce(&["inspect", "--rgb", bad]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
}

#[test]
fn reduce_writes_bounded_palette_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    save_image(&scene(), &input).unwrap();
    let output = dir.path().join("out.png");
    let report = dir.path().join("out.json");
    let out = hslreduce(&[
        "reduce",
        p(&input),
        "-k",
        "3",
        "-o",
        p(&output),
        "--report",
        p(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let img = load_image(&output).unwrap();
    assert_eq!((img.width(), img.height()), (32, 32));
    assert!(img.pixels().iter().collect::<HashSet<_>>().len() <= 3);

    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["k"], 3);
    assert_eq!(v["config"]["distance"], "hslp");
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["config"]["omega"], 1.3);
    let shares: f64 = v["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["share"].as_f64().unwrap())
        .sum();
    assert!((shares - 1.0).abs() < 1e-9);
}

#[test]
fn reduce_ppm_with_euclid() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ppm");
    save_image(&scene(), &input).unwrap();
    let output = dir.path().join("out.ppm");
    let out = hslreduce(&[
        "reduce",
        p(&input),
        "-k",
        "2",
        "--distance",
        "hsleuclid",
        "--omega",
        "1.2",
        "--tol",
        "1e-6",
        "--max-iters",
        "50",
        "--seed",
        "7",
        "-o",
        p(&output),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        load_image(&output)
            .unwrap()
            .pixels()
            .iter()
            .collect::<HashSet<_>>()
            .len()
            <= 2
    );
}

#[test]
fn invalid_flags_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ppm");
    save_image(&scene(), &input).unwrap();
    let output = dir.path().join("out.png");
    let report = dir.path().join("out.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["-k", "0"],
        vec!["-k", "3", "--omega", "1.5"],
        vec!["-k", "3", "--omega", "1.0"],
        vec!["-k", "3", "--tol", "0"],
        vec!["-k", "3", "--distance", "lab"],
        vec!["-k", "-1"],
    ];
    for flags in cases {
        let mut args = vec!["reduce", p(&input)];
        args.extend(&flags);
        args.extend(["-o", p(&output), "--report", p(&report)]);
        let out = hslreduce(&args);
        assert_eq!(out.status.code(), Some(2), "{flags:?}");
        assert!(
            !output.exists() && !report.exists(),
            "{flags:?} left files behind"
        );
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(!stderr.trim().is_empty());
    }

    let bad_ext = dir.path().join("out.jpg");
    let out = hslreduce(&["reduce", p(&input), "-k", "2", "-o", p(&bad_ext)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!bad_ext.exists());

    let out = hslreduce(&["reduce", p(&input), "-o", p(&output)]);
    assert_eq!(out.status.code(), Some(2), "k is required");
}

#[test]
fn io_and_processing_errors() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("out.png");

    let missing = dir.path().join("nope.png");
    let out = hslreduce(&["reduce", p(&missing), "-k", "2", "-o", p(&output)]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);

    let garbage = dir.path().join("garbage.png");
    std::fs::write(&garbage, b"not an image").unwrap();
    let out = hslreduce(&["reduce", p(&garbage), "-k", "2", "-o", p(&output)]);
    assert_eq!(out.status.code(), Some(3));

    let flat = dir.path().join("flat.png");
    save_image(&Image::filled(4, 4, [9, 9, 9]).unwrap(), &flat).unwrap();
    let out = hslreduce(&["reduce", p(&flat), "-k", "2", "-o", p(&output)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!output.exists());
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    save_image(&scene(), &input).unwrap();
    let mut outputs = Vec::new();
    for tag in ["a", "b"] {
        let img = dir.path().join(format!("{tag}.png"));
        let rep = dir.path().join(format!("{tag}.json"));
        let out = hslreduce(&[
            "reduce",
            p(&input),
            "-k",
            "3",
            "--seed",
            "42",
            "-o",
            p(&img),
            "--report",
            p(&rep),
        ]);
        assert!(out.status.success());
        outputs.push((std::fs::read(img).unwrap(), std::fs::read(rep).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn compare_writes_both_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    save_image(&scene(), &input).unwrap();
    let out_dir = dir.path().join("cmp");
    let out = hslreduce(&["compare", p(&input), "-k", "3", "--out-dir", p(&out_dir)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["hslp.png", "hsleuclid.png"] {
        let img = load_image(out_dir.join(name)).unwrap();
        assert!(img.pixels().iter().collect::<HashSet<_>>().len() <= 3);
    }
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("compare.json")).unwrap())
            .unwrap();
    let agreement = v["agreement"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&agreement));
    assert_eq!(v["runs"]["hslp"]["config"]["distance"], "hslp");
    assert_eq!(v["runs"]["hsleuclid"]["config"]["distance"], "hsleuclid");
    assert_eq!(v["runs"]["hslp"]["clusters"].as_array().unwrap().len(), 3);
}

#[test]
fn compare_uniform_input_agrees_fully() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.ppm");
    save_image(&Image::filled(8, 8, [40, 90, 200]).unwrap(), &input).unwrap();
    let out_dir = dir.path().join("cmp");
    let out = hslreduce(&["compare", p(&input), "-k", "1", "--out-dir", p(&out_dir)]);
    assert!(out.status.success());
    assert!(out_dir.join("hslp.ppm").exists() && out_dir.join("hsleuclid.ppm").exists());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("compare.json")).unwrap())
            .unwrap();
    assert_eq!(v["agreement"], 1.0);
}

#[test]
fn compare_missing_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("cmp");
    let out = hslreduce(&[
        "compare",
        p(&dir.path().join("missing.png")),
        "-k",
        "2",
        "--out-dir",
        p(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out_dir.exists());
}
