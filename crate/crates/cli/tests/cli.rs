use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wgnoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgnoise")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("scan.toml");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
temperatures = [5.0, 300.0]
taus = [1.0, 10.0]
[[geometry]]
shape = "sphere"
radius = 1e-4
"#;

#[test]
fn mode_prints_table_parameters() {
    let o = wgnoise(&["mode", "--radius", "1e-3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("azimuthal_index = 5706"), "{s}");
    assert!(s.contains("w_z_m = 1.35000e-5"), "{s}");
    assert!(s.contains("source = Supplied"), "{s}");
}

#[test]
fn estimated_mode_for_unlisted_radius() {
    let o = wgnoise(&["mode", "--radius", "2e-3", "--source", "estimate"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("source = Estimated"));
}

#[test]
fn strain_reports_energy_and_force() {
    let dir = tempfile::tempdir().unwrap();
    let nodal = dir.path().join("field.txt");
    let o = wgnoise(&["strain", "--radius", "1e-4", "--load", "pressure", "--nodal", nodal.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    // P dV / 2 at 0.1 mm, 1 MPa, kappa 90 GPa
    assert!(s.contains("energy_J = 2.327"), "{s}");
    // 4 pi R^2 P
    assert!(s.contains("force_N = 1.2566"), "{s}");
    let text = fs::read_to_string(nodal).unwrap();
    assert!(text.starts_with("# wgnoise nodal field v1"));
}

#[test]
fn budget_prints_all_terms() {
    let o = wgnoise(&["budget", "--radius", "1e-4", "--temperature", "300", "--eo-mode", "quadrature"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    for key in ["sigma_TR", "sigma_BB", "sigma_dr_r", "sigma_EO", "U_bb_J", "F_eo_N"] {
        assert!(s.contains(&format!("{key} = ")), "{key} missing in {s}");
    }
    assert!(s.contains("eo_mode = quadrature"));
}

#[test]
fn scan_writes_csv_identically_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = wgnoise(&["scan", "--config", &cfg, "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read(out.join("scan.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "id,shape,R_m,S_m,T_K,tau_s,sigma_TR,sigma_BB,sigma_dr_r,sigma_EO,U_bb_J,F_bb_N,U_eo_J,F_eo_N,eo_mode,gamma,status"
    );
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[1].starts_with("sphere-R0.1mm,sphere,1.00000e-4,,5.00000e0,1.00000e0,"));
    assert!(lines[1].ends_with(",neglect_dR,8.47000e-1,ok"), "{}", lines[1]);
    // sigma_BB does not depend on tau
    let col = |l: &str, i: usize| l.split(',').nth(i).unwrap().to_string();
    assert_eq!(col(lines[3], 7), col(lines[4], 7));
    assert_ne!(col(lines[3], 6), col(lines[4], 6));
}

#[test]
fn empty_temperature_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("[5.0, 300.0]", "[]"));
    let o = wgnoise(&["scan", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("temperature list is empty"));
}

#[test]
fn usage_errors_exit_with_config_code() {
    assert_eq!(wgnoise(&["budget", "--radius", "1e-3", "--eo-mode", "sideways"]).status.code(), Some(1));
    assert_eq!(wgnoise(&["mode", "--material", "/nonexistent.toml", "--radius", "1e-3"]).status.code(), Some(1));
}

#[test]
fn failed_rows_are_isolated_with_exit_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("extrapolation = \"error\"\n{}", SMALL.replace("[5.0, 300.0]", "[5.5, 400.0]"));
    let cfg = write_config(dir.path(), &body);
    let out = dir.path().join("o");
    let o = wgnoise(&["scan", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let text = fs::read_to_string(out.join("scan.csv")).unwrap();
    let statuses: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(statuses, ["ok", "ok", "material_failed", "material_failed"]);
}

#[test]
fn fit_recovers_tau_exponent_of_thermorefractive_noise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("[1.0, 10.0]", "[1.0, 10.0, 100.0]").replace("[5.0, 300.0]", "[300.0]"));
    let out = dir.path().join("o");
    assert!(wgnoise(&["scan", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let csv = out.join("scan.csv");
    let o = wgnoise(&["fit", csv.to_str().unwrap(), "--x", "tau_s", "--y", "sigma_TR"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("exponent = -0.500000"), "{}", stdout(&o));
}

#[test]
fn figdata_writes_both_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = wgnoise(&["figdata", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fig2 = fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert!(fig2.starts_with("T_K,sigma_TR,sigma_BB,sigma_EO,status"));
    assert!(fig2.lines().any(|l| l.starts_with("3.30000e1,0.00000e0,")), "zero-crossing row missing");
    let fig3 = fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
    assert_eq!(fig3.lines().filter(|l| l.starts_with("vs-S,")).count(), 6);
    assert_eq!(fig3.lines().filter(|l| l.starts_with("vs-R,")).count(), 6);
}
