use std::path::PathBuf;

use rydberg_nhqc::experiments::*;

fn run(id: &str, set: &[(&str, &[f64])]) -> ExperimentResult {
    let mut s = scenario(id).unwrap();
    for (k, v) in set {
        s.set(k, v.to_vec()).unwrap();
    }
    run_scenario(&s).unwrap()
}

#[test]
fn control_gates_degrade_with_decay() {
    let r = run("fig3a", &[]);
    let gates = r.values("gate");
    let f = r.values("fidelity");
    for g in [0.0, 1.0, 2.0] {
        let curve: Vec<f64> = f.iter().zip(&gates).filter(|(_, &x)| x == g).map(|(y, _)| *y).collect();
        assert_eq!(curve.len(), 6);
        assert!(curve.windows(2).all(|w| w[1] <= w[0] + 1e-12), "gate {g}: {curve:?}");
    }
}

#[test]
fn ensemble_size_barely_matters() {
    let r = run("fig3d", &[("N", &[2.0, 10.0])]);
    let f = r.values("fidelity");
    assert!(f[0] - f[1] < 0.005, "{f:?}");
}

#[test]
fn table1_duration_grows_with_n() {
    let ns = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
    let t: Vec<f64> = ns.iter().map(|&n| ZssCnot::rubidium(n, 0.1).schedule().unwrap().0.duration()).collect();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn toffoli_and_role_exchange_hold_up() {
    for (id, key) in [("fig9a", "gamma_p_mhz"), ("fig11a", "gamma_p_mhz")] {
        let r = run(id, &[(key, &[0.0, 1.0, 5.0])]);
        let f = r.values("fidelity");
        assert!(f[1] >= 0.98, "{id}: {f:?}");
        assert!(f[0] >= f[1] && f[1] >= f[2], "{id}: {f:?}");
    }
}

#[test]
fn csv_is_byte_identical_on_rerun() {
    let mut s = scenario("fig3a").unwrap();
    s.set("gate", vec![0.0]).unwrap();
    s.set("gamma_r_mhz", vec![0.0, 0.05]).unwrap();
    let base = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("rerun");
    let mut files = vec![];
    for k in 0..2 {
        let dir = base.join(k.to_string());
        std::fs::create_dir_all(&dir).unwrap();
        let r = run_scenario(&s).unwrap();
        let (csv, _) = r.write(&dir, &s, "h").unwrap();
        files.push(std::fs::read(csv).unwrap());
    }
    assert_eq!(files[0], files[1]);
}
