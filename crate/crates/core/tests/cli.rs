mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bgl::graph::check_consistency;
use bgl::io::{read_graph, read_matrix_csv, write_covariance, write_graph, write_matrix_csv, GraphFile};
use bgl::learn::SampleCovariance;
use bgl::spectral::spectral_decompose;
use bgl::synth::{gen_pd_balanced_er_graph, SynthSpec};
use common::frustrated_covariance;
use nalgebra::DMatrix;
use serde_json::Value;

fn bgl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgl"))
        .args(args)
        .env("BGL_LOG", "error")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) {
    let out = bgl(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap()
}

#[test]
fn gen_writes_three_files_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&["gen", "--n", "12", "--p", "0.3", "--k", "60", "--seed", "7", "--out", p(out)]);
    }
    for f in ["graph.json", "data.csv", "manifest.json"] {
        assert!(a.join(f).exists(), "{f}");
    }
    assert_eq!(read(&a.join("data.csv")), read(&b.join("data.csv")));
    assert_eq!(read(&a.join("graph.json")), read(&b.join("graph.json")));
    let data = read_matrix_csv(&a.join("data.csv")).unwrap();
    assert_eq!(data.shape(), (12, 60));
    let header = fs::read_to_string(a.join("data.csv")).unwrap();
    assert!(header.starts_with("node,k_0,k_1,"));
    let g = read_graph(&a.join("graph.json")).unwrap().balanced().unwrap();
    assert!(check_consistency(g.laplacian(), g.polarity()).unwrap());
}

#[test]
fn invalid_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bgl(&["gen", "--p", "1.5", "--out", p(dir.path())]).status.code(), Some(2));
    assert_eq!(bgl(&["gen", "--bogus"]).status.code(), Some(2));
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        bgl(&["learn", "--input", p(&missing), "--out", p(dir.path())]).status.code(),
        Some(2)
    );
}

#[test]
fn learn_on_generated_data() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    ok(&["gen", "--n", "15", "--p", "0.3", "--k", "300", "--seed", "3", "--out", p(&gen)]);
    let data = gen.join("data.csv");
    let (a, b, greed) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("g"));
    ok(&["learn", "--input", p(&data), "--out", p(&a)]);
    ok(&["learn", "--input", p(&data), "--out", p(&b)]);
    assert_eq!(read(&a.join("graph.json")), read(&b.join("graph.json")));
    let learned = read_graph(&a.join("graph.json")).unwrap();
    assert_eq!(learned.rhos.as_ref().unwrap().len(), 15);
    assert!(learned.sweeps.unwrap() >= 1);
    let g = learned.balanced().unwrap();
    assert!(check_consistency(g.laplacian(), g.polarity()).unwrap());

    ok(&["learn", "--input", p(&data), "--baseline", "clime-greed", "--out", p(&greed)]);
    let baseline = read_graph(&greed.join("graph.json")).unwrap();
    assert!(baseline.rhos.is_none());
    baseline.balanced().unwrap();
    let manifest: Value = serde_json::from_slice(&read(&greed.join("manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "learn");
    assert!(manifest["config"]["resolved"]["baseline_rho"].as_f64().unwrap() > 0.0);

    // smoothing and normalization of the same data also learn a balanced graph
    let smooth = dir.path().join("s");
    ok(&["learn", "--input", p(&data), "--moving-average", "2", "--normalize", "--out", p(&smooth)]);
    read_graph(&smooth.join("graph.json")).unwrap().balanced().unwrap();
}

#[test]
fn algorithmic_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cov = dir.path().join("cov.json");
    write_covariance(&cov, &SampleCovariance::new(frustrated_covariance()).unwrap()).unwrap();
    let out = bgl(&[
        "learn", "--covariance", p(&cov), "--init-mode", "all-ones", "--rho-init", "0.01",
        "--rho-max", "0.05", "--out", p(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("node 0"));
}

#[test]
fn bench_single_trial_and_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let base = ["bench", "--n", "10", "--p", "0.4", "--k", "100", "--seed", "5"];
    ok(&[&base[..], &["--trials", "1", "--out", p(&a)]].concat());
    let lines: Vec<Value> = fs::read_to_string(a.join("trials.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    let summary: Value = serde_json::from_slice(&read(&a.join("summary.json"))).unwrap();
    for (rec, s) in lines.iter().zip(summary.as_array().unwrap()) {
        assert_eq!(rec["method"], s["method"]);
        assert_eq!(rec["fm"], s["fm_mean"]);
        assert_eq!(rec["re"], s["re_mean"]);
        assert!(rec["runtime_ms"].is_null());
    }

    ok(&[&base[..], &["--trials", "3", "--jobs", "1", "--out", p(&b)]].concat());
    ok(&[&base[..], &["--trials", "3", "--jobs", "2", "--out", p(&c)]].concat());
    for f in ["trials.jsonl", "summary.csv", "summary.json"] {
        assert_eq!(read(&b.join(f)), read(&c.join(f)), "{f}");
    }
}

fn write_graph_and_signals(dir: &Path) -> (DMatrix<f64>, std::path::PathBuf) {
    let (g, _) = gen_pd_balanced_er_graph(&SynthSpec { n: 20, p: 0.3, seed: 8, ..Default::default() }, 100).unwrap();
    let graph = dir.join("graph.json");
    write_graph(&graph, &GraphFile::from_balanced(&g)).unwrap();
    // in-band signals of the file's own Laplacian: the lowest eigenvectors
    let l = read_graph(&graph).unwrap().laplacian().unwrap();
    let basis = spectral_decompose(&l);
    let y = basis.eigenvectors().columns(0, 2).into_owned();
    (y, graph)
}

#[test]
fn denoise_contracts() {
    let dir = tempfile::tempdir().unwrap();
    let (y, graph) = write_graph_and_signals(dir.path());
    let signals = dir.path().join("y.csv");
    write_matrix_csv(&signals, &y, "s").unwrap();

    let out = dir.path().join("o");
    ok(&["denoise", "--graph", p(&graph), "--signals", p(&signals), "--clean", p(&signals), "--out", p(&out)]);
    let den = read_matrix_csv(&out.join("denoised.csv")).unwrap();
    assert!((&den - &y).amax() < 1e-8);
    let mse = fs::read_to_string(out.join("mse.csv")).unwrap();
    assert!(mse.starts_with("signal,input_mse,output_mse\n"));

    let noisy = DMatrix::from_fn(20, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
    write_matrix_csv(&signals, &noisy, "s").unwrap();
    let all_pass = dir.path().join("all");
    ok(&["denoise", "--graph", p(&graph), "--signals", p(&signals), "--cutoff", "1.0", "--out", p(&all_pass)]);
    let den = read_matrix_csv(&all_pass.join("denoised.csv")).unwrap();
    assert!((&den - &noisy).amax() < 1e-8);

    let short = DMatrix::from_element(19, 1, 1.0);
    write_matrix_csv(&signals, &short, "s").unwrap();
    let code = bgl(&["denoise", "--graph", p(&graph), "--signals", p(&signals), "--out", p(&out)]).status.code();
    assert_eq!(code, Some(2));
}
