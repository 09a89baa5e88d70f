use std::path::PathBuf;
use std::process::{Command, Output};

use lm05_cli::analysis::hierarchy_violation;
use lm05_cli::commands::{cmd_collective, cmd_compare, cmd_individual, p_grid};
use lm05_core::channels::{CorrelationMode, NoiseKind};
use lm05_core::qudit::QuditDim;

fn lm05(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lm05"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(path).expect("golden file present")
}

#[test]
fn exit_codes() {
    assert_eq!(lm05(&["--help"]).status.code(), Some(0));
    assert_eq!(lm05(&["--version"]).status.code(), Some(0));
    assert_eq!(lm05(&[]).status.code(), Some(1));
    assert_eq!(lm05(&["bogus"]).status.code(), Some(1));
    assert_eq!(lm05(&["individual", "--points", "1"]).status.code(), Some(1));
    assert_eq!(lm05(&["individual", "--dims", "1,2"]).status.code(), Some(1));
    assert_eq!(lm05(&["collective", "--kind", "adc", "--mode", "cor"]).status.code(), Some(1));
    assert_eq!(lm05(&["collective", "--kind", "dep", "--p-max", "1.5"]).status.code(), Some(1));
    assert_eq!(lm05(&["compare", "--kind", "dep", "--d", "7"]).status.code(), Some(1));
    assert_eq!(lm05(&["montecarlo", "--d", "3"]).status.code(), Some(1));
    assert_eq!(
        lm05(&["montecarlo", "--d", "3", "--noise", "dep:ind:0.1", "--cloning", "0.5"]).status.code(),
        Some(1)
    );
    assert_eq!(lm05(&["montecarlo", "--d", "3", "--noise", "dep:xx:0.1"]).status.code(), Some(1));
    assert_eq!(lm05(&["montecarlo", "--d", "3", "--cloning", "2"]).status.code(), Some(1));

    let unsupported = lm05(&["compare", "--kind", "adc", "--mode", "cor", "--d", "2"]);
    assert_eq!(unsupported.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unsupported.stderr).contains("correlated"));
}

#[test]
fn validate_passes() {
    let out = lm05(&["validate"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"));
    assert_eq!(text.lines().filter(|l| l.contains("gamma overlap")).count(), 10);
    assert_eq!(text.lines().filter(|l| l.starts_with("INFO  ADC")).count(), 6);
}

#[test]
fn montecarlo_output_is_byte_deterministic() {
    let args = ["montecarlo", "--d", "3", "--rounds", "20000", "--seed", "7", "--noise", "adc:ind:0.4"];
    let a = lm05(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_lm05"))
        .args(args)
        .env("RAYON_NUM_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(lm05(&["montecarlo", "--d", "3", "--rounds", "20000", "--seed", "8", "--noise", "adc:ind:0.4"]).stdout, a.stdout);
}

#[test]
fn montecarlo_noiseless_has_no_errors() {
    let out = lm05(&["montecarlo", "--d", "2", "--rounds", "10000", "--seed", "7", "--noise", "dep:ind:0.0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let per_basis: Vec<&str> = text.split("\n\n").nth(1).unwrap().lines().skip(1).collect();
    assert_eq!(per_basis.len(), 2);
    for row in per_basis {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[3], "0", "Qk_hat in {row}");
        assert_eq!(cols[7], "0", "Qt_hat in {row}");
    }
}

#[test]
fn writes_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let rates = dir.path().join("rates.csv");
    let thr = dir.path().join("thr.csv");
    let out = lm05(&[
        "individual",
        "--dims",
        "3,2",
        "--points",
        "11",
        "--out",
        rates.to_str().unwrap(),
        "--threshold-out",
        thr.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&rates).unwrap(), golden("individual.csv"));
    assert_eq!(std::fs::read_to_string(&thr).unwrap(), golden("threshold.csv"));

    let missing = dir.path().join("no/such/dir.csv");
    let out = lm05(&["collective", "--kind", "dep", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn golden_tables() {
    let grid = p_grid(0.0, 1.0, 101).unwrap();
    for (kind, label) in [(NoiseKind::Depolarizing, "dep"), (NoiseKind::DitPhaseFlip, "dpf")] {
        for d in [2, 3] {
            let t = cmd_compare(kind, CorrelationMode::Correlated, d, &grid).unwrap();
            assert_eq!(t.to_csv(), golden(&format!("compare_{label}_cor_d{d}.csv")), "{label} d={d}");
        }
    }
    let t = cmd_collective(
        NoiseKind::AmplitudeDamping,
        CorrelationMode::Independent,
        &[3, 5],
        &p_grid(0.0, 1.0, 11).unwrap(),
    )
    .unwrap();
    assert_eq!(t.to_csv(), golden("collective_adc_ind.csv"));
    let (rates, thr) = cmd_individual(&[2, 3], 11, &(2..=10).collect::<Vec<_>>()).unwrap();
    assert_eq!(rates.to_csv(), golden("individual.csv"));
    assert_eq!(thr.to_csv(), golden("threshold.csv"));
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().to_string()).collect()
}

#[test]
fn collective_rows() {
    let out = lm05(&["collective", "--kind", "dep", "--dims", "3,5,8,10", "--points", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 4 * 5);
    assert_eq!(lines[1], "dep,ind,3,0,0,0,0,0,0,1.58496250072,1");
    assert!(lines[6].starts_with("dep,ind,5,0,"));

    let out = lm05(&["collective", "--kind", "dep", "--mode", "cor", "--dims", "2", "--points", "21"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for col in ["Qk_theta0", "Qk_theta1", "qder_abscissa"] {
        assert!(column(&text, col).iter().all(|v| v == "0"), "{col}");
    }
}

#[test]
fn squared_protocol_dominates_for_independent_dit_phase_flip() {
    let grid = p_grid(0.0, 1.0, 201).unwrap();
    let v = hierarchy_violation(NoiseKind::DitPhaseFlip, CorrelationMode::Independent, QuditDim::new(3).unwrap(), &grid)
        .unwrap();
    assert_eq!(v, 0.0);
}
