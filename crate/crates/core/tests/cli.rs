use std::path::Path;
use std::process::{Command, Output};

use lambda_engine::sweep::{csv_header, preset, PRESETS};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambda-engine"))
        .args(args)
        .env_remove("LAMBDA_ENGINE_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const GOLDEN_HEADER: &str = "curve,x,solver,l_max,tol,gamma_eg,gamma_egp,omega_rabi,omega_m,eta,kappa,g_pr,n_h,n_c,\
omega_eg,omega_egp,probe_re,probe_im,modulation,status,G_plus_re,G_plus_im,G_minus_re,G_minus_im,rho_gg,rho_gpgp,\
rho_ee,P_c,Qdot_c,Qdot_out,Qdot_h,Edot,efficiency,hb_residual,periods,last_delta,error";

#[test]
fn every_preset_has_the_golden_schema() {
    assert_eq!(csv_header().join(","), GOLDEN_HEADER);
    let dir = tempfile::tempdir().unwrap();
    let expected_rows = [
        ("figure2a", 99),
        ("figure2b", 99),
        ("figure3a", 153),
        ("figure3b", 153),
        ("figure4", 99),
    ];
    assert_eq!(PRESETS.len(), expected_rows.len());
    for (name, rows) in expected_rows {
        let o = cli(&[
            "figure",
            name,
            "--out",
            dir.path().to_str().unwrap(),
            "--workers",
            "4",
        ]);
        assert!(
            o.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let text = std::fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(GOLDEN_HEADER), "{name}");
        assert_eq!(lines.clone().count(), rows, "{name}");
        assert!(lines.all(|l| l.contains(",ok,")), "{name}");
        let svg = std::fs::read_to_string(dir.path().join(format!("{name}.svg"))).unwrap();
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
        let spec = preset(name).unwrap();
        for curve in spec.effective_curves() {
            assert!(
                svg.contains(&curve.label),
                "{name}: legend lacks {}",
                curve.label
            );
        }
    }
}

#[test]
fn efficiency_figure_labels_three_couplings() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        cli(&["figure", "figure4", "--out", dir.path().to_str().unwrap()])
            .status
            .success()
    );
    let svg = std::fs::read_to_string(dir.path().join("figure4.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
    for eta in ["η = 0.01", "η = 0.1", "η = 0.5"] {
        assert!(svg.contains(eta));
    }
    assert!(svg.contains("efficiency"));
}

#[test]
fn worker_count_from_environment() {
    let run = |workers: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_lambda-engine"))
            .args(["figure", "figure3b", "--out", dir.path().to_str().unwrap()])
            .env("LAMBDA_ENGINE_WORKERS", workers)
            .output()
            .unwrap();
        assert!(o.status.success());
        std::fs::read(dir.path().join("figure3b.csv")).unwrap()
    };
    assert_eq!(run("1"), run("6"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn config_driven_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "run.toml",
        "# κ family\n[sweep]\nname = kappa-scan\nparameter = kappa\ngrid = 0, 1, 2\nsolver = hb\n\
         [params]\nn_h = 0.1\n[curve]\nlabel = weak\neta = 0.01\n[curve]\nlabel = strong\neta = 0.5\n",
    );
    let out = dir.path().join("out");
    let o = cli(&["sweep", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("kappa-scan: 6 points (0 failed)"));
    let text = std::fs::read_to_string(out.join("kappa-scan.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("weak,0,hb,3,"));
    assert!(rows[5].starts_with("strong,2,hb,3,"));
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["steady"]).status.code(), Some(0));
    assert_eq!(cli(&["steady", "--set", "eta=-1"]).status.code(), Some(3));
    assert_eq!(cli(&["steady", "--set", "bogus=1"]).status.code(), Some(3));
    assert_eq!(cli(&["steady", "--solver", "magic"]).status.code(), Some(2));
    assert_eq!(cli(&["figure", "figure9"]).status.code(), Some(3));
    assert_eq!(cli(&["sweep"]).status.code(), Some(3));
    assert_eq!(
        cli(&["steady", "--config", "/nonexistent/run.toml"])
            .status
            .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[params]\neta = -1\n");
    let o = cli(&["sweep", "--config", &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    // Exact modulation has no harmonic-balance formulation.
    let exact = write(
        dir.path(),
        "exact.toml",
        "[sweep]\nsolver = hb\n[params]\nmodulation = exact\n",
    );
    assert_eq!(cli(&["steady", "--config", &exact]).status.code(), Some(4));
}

#[test]
fn oracle_check_reports_and_fails_on_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "oracle-check",
        "--solver",
        "hb",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));

    // Third-order truncation is not enough at η = 0.5.
    let o = cli(&["oracle-check", "--preset", "figure4"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("FAIL"));
    let o = cli(&["oracle-check", "--preset", "figure4", "--lmax", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn thermo_reports_one_csv_row() {
    let o = cli(&["thermo", "--solver", "hb"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n_h,n_c,eta,omega_rabi,omega_m,kappa,P_c,Qdot_c,Qdot_out,Qdot_h,residual,efficiency"
    );
    assert_eq!(lines[1].split(',').count(), 12);

    let si = stdout(&cli(&["thermo", "--solver", "hb", "--si"]));
    let p_c = |t: &str| {
        t.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(6)
            .unwrap()
            .parse::<f64>()
            .unwrap()
    };
    let ratio = p_c(&si) / p_c(&text);
    assert!((ratio / 1.054_571_817e-22 - 1.0).abs() < 1e-12);
}

#[test]
fn steady_writes_orbit_for_time_domain_solver() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "steady",
        "--solver",
        "ode",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("steady_orbit.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("t,rho_g_g_re,rho_g_g_im,"));
    assert_eq!(lines.count(), 129);
}
