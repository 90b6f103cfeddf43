//! End-to-end runs of the `photonic-engine` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photonic-engine"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).expect("column present");
    lines.map(|l| l.split(',').nth(idx).unwrap().to_owned()).collect()
}

#[test]
fn presets_list_names_every_preset() {
    let dir = tempdir().unwrap();
    let out = run(&["presets", "list"], dir.path());
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2", "fig3", "fig4", "fig5", "fig7a", "fig7b", "fig9", "converge"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from\n{text}");
    }
}

#[test]
fn preset_show_round_trips_through_config_file() {
    let dir = tempdir().unwrap();
    let shown = run(&["presets", "show", "fig5"], dir.path());
    assert_eq!(code(&shown), 0);
    fs::write(dir.path().join("fig5.toml"), &shown.stdout).unwrap();
    let a = run(&["sweep", "--config", "fig5.toml", "--out", "a.csv"], dir.path());
    let b = run(&["sweep", "--preset", "fig5", "--out", "b.csv"], dir.path());
    assert_eq!((code(&a), code(&b)), (0, 0));
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn sweep_output_is_identical_across_thread_counts() {
    let dir = tempdir().unwrap();
    for (threads, file) in [("1", "one.csv"), ("4", "four.csv")] {
        let out = run(&["sweep", "--preset", "fig4", "--threads", threads, "--out", file], dir.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let one = fs::read(dir.path().join("one.csv")).unwrap();
    assert_eq!(one, fs::read(dir.path().join("four.csv")).unwrap());
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("a,b,c,phi,g_tau,n_pair,delta_hz,kappa_hz,flag,"));
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn sweep_writes_to_stdout_without_a_destination() {
    let dir = tempdir().unwrap();
    let cfg = "physics.g_tau = 0.03\nstate.a = 1\nstate.b = [0.5, 1.0]\nstate.c = 1\n";
    fs::write(dir.path().join("s.toml"), cfg).unwrap();
    let out = run(&["sweep", "--config", "s.toml"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(String::from_utf8(out.stderr).unwrap().contains("rows: 2"));
}

#[test]
fn above_threshold_rows_are_flagged_with_partial_exit() {
    let dir = tempdir().unwrap();
    let out = run(
        &[
            "sweep", "--preset", "fig7a", "--out", "t.csv",
            "--set", "physics.n_pair=[1, 40]", "--set", "state.a=3",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let flags = column(&csv, "flag");
    let eta = column(&csv, "eta");
    assert_eq!(flags, ["ok", "above_threshold"]);
    assert_ne!(eta[0], "NaN");
    assert_eq!(eta[1], "NaN");
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["sweep", "--preset", "no_such_preset"],
        &["sweep", "--config", "missing.toml"],
        &["sweep", "--preset", "fig5", "--set", "physics.bogus=1"],
        &["sweep", "--preset", "fig3", "--set", "state.c={ min = 0, max = 1, count = 3 }"],
        &["sweep", "--preset", "fig5", "--out", "no/such/dir/out.csv"],
    ];
    for args in cases {
        let out = run(args, dir.path());
        assert_eq!(code(&out), 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
    }
    // Malformed invocations are rejected by the argument parser.
    assert_ne!(code(&run(&["sweep"], dir.path())), 0);
}

#[test]
fn cycle_preset_writes_loops_and_svg() {
    let dir = tempdir().unwrap();
    let out = run(&["cycle", "--preset", "fig2", "--steps", "40", "--out", "c.csv", "--svg"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(csv.starts_with("n_pair,stage,delta,omega_c_offset,n_ss,n_th,q_cum,w_cum\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * (2 * 40 + 2));
    assert!(!csv.contains("-0.00000000000e0"));
    let svg = fs::read_to_string(dir.path().join("c.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    // Summary: the N_pair = 2 loop does more work.
    let summary = String::from_utf8(out.stdout).unwrap();
    let w = column(&summary, "w_net");
    let w: Vec<f64> = w.iter().map(|x| x.parse().unwrap()).collect();
    assert!(w[1] > w[0] && w[0] > 0.0, "{summary}");
}

#[test]
fn bell_fuel_cycle_encloses_no_area() {
    let dir = tempdir().unwrap();
    let out = run(&["cycle", "--preset", "fig2", "--out", "bell.csv", "--set", "state.b=0"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stdout).unwrap();
    for w in column(&summary, "w_net") {
        assert_eq!(w.parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn cycle_quadrature_converges_with_steps() {
    let dir = tempdir().unwrap();
    let q23 = |steps: &str| -> f64 {
        let file = format!("q{steps}.csv");
        let out = run(
            &["cycle", "--preset", "fig2", "--steps", steps, "--out", &file, "--set", "physics.n_pair=1"],
            dir.path(),
        );
        assert_eq!(code(&out), 0);
        column(&String::from_utf8(out.stdout).unwrap(), "q23")[0].parse().unwrap()
    };
    let (coarse, fine, finest) = (q23("4"), q23("400"), q23("4000"));
    assert!((fine - finest).abs() < (coarse - finest).abs());
    assert!((fine - finest).abs() <= 1e-4 * finest);
}

#[test]
fn convergence_study_reports_third_order_slope() {
    let dir = tempdir().unwrap();
    let out = run(&["converge", "--preset", "converge", "--out", "cv.csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("cv.csv")).unwrap();
    let slope: f64 = csv.lines().find(|l| l.starts_with("order,")).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((2.7..=3.3).contains(&slope), "slope {slope}");

    let over = run(&["converge", "--preset", "converge", "--set", "converge.fock_dims=[8, 400]"], dir.path());
    assert_eq!(code(&over), 1);
}
