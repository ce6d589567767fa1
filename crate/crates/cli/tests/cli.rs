use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cfqc_core::circuit::{paired_benchmark, parse_circuit, serialize_circuit, verify_equivalent};
use cfqc_core::gate_model::{finite_map, AtomPhotonInput, CfGateParams, NoiseParams};
use cfqc_core::protocols::build_communication_circuit;

fn cfqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfqc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn column(csv: &str, idx: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn sweep_single_point_matches_library() {
    let o = cfqc(&["sweep", "--m", "10", "--ratios", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,n,gamma,eta,efficiency,fidelity"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..2], ["10", "200"]);
    let lib = finite_map(
        &AtomPhotonInput::equal_superposition(),
        &CfGateParams::new(10, 200).unwrap(),
        &NoiseParams::IDEAL,
    )
    .unwrap();
    assert_eq!(row[4].parse::<f64>().unwrap(), lib.efficiency);
    assert_eq!(row[5].parse::<f64>().unwrap(), lib.fidelity);
    assert!(lib.efficiency < 0.9);
}

#[test]
fn sweep_gamma_grid_lowers_fidelity() {
    let o = cfqc(&["sweep", "--m", "10", "--n", "200", "--gamma", "0:0.1:0.02"]);
    assert_eq!(o.status.code(), Some(0));
    let f = column(&stdout(&o), 5);
    assert_eq!(f.len(), 6);
    assert!(f.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn sweep_ideal_limit() {
    let o = cfqc(&["sweep", "--m", "1000", "--ratios", "100"]);
    assert!(column(&stdout(&o), 5)[0] > 0.999);
}

#[test]
fn sweep_is_byte_stable_and_respects_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(
        &cfg,
        "# grid\nm = 10:30:10\nratios = 2, 5\neta = 0:0.1:0.05\njobs = 4\n",
    )
    .unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, jobs) in [(&a, "1"), (&b, "3")] {
        let o = cfqc(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
            "--jobs",
            jobs,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let (a, b) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 3 * 2 * 3);

    let o = cfqc(&["sweep", "--config", cfg.to_str().unwrap(), "--ratios", "7", "--m", "4"]);
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 1 + 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("4,28,"));
}

#[test]
fn sweep_errors() {
    assert_eq!(
        cfqc(&["sweep", "--m", "10", "--ratios", "5", "--gamma", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cfqc(&["sweep", "--ratios", "5"]).status.code(), Some(2));
    assert_eq!(
        cfqc(&["sweep", "--m", "10", "--n", "5", "--atom-g", "1", "--atom-e", "1"])
            .status
            .code(),
        Some(2)
    );
    let o = cfqc(&["sweep", "--m", "10", "--n", "5", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn compile_already_special() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "comm.qc",
        &serialize_circuit(&build_communication_circuit()),
    );
    let out = dir.path().join("out.qc");
    let o = cfqc(&["compile", &input, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("already special"));
    assert_eq!(
        parse_circuit(&fs::read_to_string(out).unwrap()).unwrap(),
        build_communication_circuit()
    );
}

#[test]
fn compile_photon_photon_cnot() {
    let dir = tempfile::tempdir().unwrap();
    let text = "qubit a atom e\nqubit p photon H\nqubit q photon V\ncnot p q\n";
    let input = write(dir.path(), "pp.qc", text);
    let o = cfqc(&["compile", &input]);
    assert_eq!(o.status.code(), Some(0));
    let report = stderr(&o);
    assert!(
        report.contains("CNOTs: 1 before (1 photon-controlled), 3 after"),
        "{report}"
    );
    assert!(report.contains("verification: verified"));
    let compiled = parse_circuit(&stdout(&o)).unwrap();
    assert!(compiled.is_special_form());
    assert!(
        verify_equivalent(&parse_circuit(text).unwrap(), &compiled, true)
            .unwrap()
            .equivalent
    );
}

#[test]
fn compile_benchmark_with_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "bench.qc",
        &serialize_circuit(&paired_benchmark(8).unwrap()),
    );
    let o = cfqc(&[
        "compile",
        &input,
        "--atoms",
        "4",
        "--output",
        dir.path().join("o.qc").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("schedule depth with 4 atom(s): 3 CNOT layers"));
}

#[test]
fn compile_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.qc", "qubit a atom e\nfoo a\n");
    let o = cfqc(&["compile", &input]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn certify_exit_codes() {
    let ok = cfqc(&["certify", "-M", "3", "-N", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).trim_end().ends_with("CERTIFIED"));

    let bad = cfqc(&["certify", "-M", "3", "-N", "4", "--sabotage", "no-double-mirror"]);
    assert_eq!(bad.status.code(), Some(3));
    let text = stdout(&bad);
    assert!(text.contains("NOT CERTIFIED"));
    assert!(text.contains("pass branch: channel presence PRESENT"));

    assert_eq!(cfqc(&["certify", "-M", "1", "-N", "4"]).status.code(), Some(2));
    assert_eq!(cfqc(&["certify", "-M", "1000", "-N", "1000"]).status.code(), Some(4));
}

#[test]
fn examples_pass() {
    for (name, cases) in [("communicate", 2), ("swap", 4), ("erasure", 4)] {
        let o = cfqc(&["example", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let text = stdout(&o);
        assert!(!text.contains("FAIL"));
        assert!(
            text.lines()
                .filter(|l| l.contains("->") || l.contains("encodes"))
                .count()
                >= cases,
            "{text}"
        );
    }
    assert_eq!(cfqc(&["example", "teleport"]).status.code(), Some(2));
}

#[test]
fn example_on_device_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("checks.csv");
    let o = cfqc(&[
        "example",
        "swap",
        "--device",
        "M=10,N=200",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("input |")).count(), 4);
    let csv = fs::read_to_string(csv).unwrap();
    assert!(csv.starts_with("check,result,max_deviation\n"));
    assert_eq!(csv.lines().count(), 7);
    assert_eq!(cfqc(&["example", "swap", "--device", "M=10"]).status.code(), Some(2));
}
