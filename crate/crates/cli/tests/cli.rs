use std::process::{Command, Output};

fn gpotts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpotts")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn critical_second_order() {
    let o = gpotts(&["critical", "--q", "2", "--z", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["beta_one"], 2.0);
    assert_eq!(v["beta_c"], 2.0);
    assert_eq!(v["order"], "second");
    assert!(v.get("beta_zero").is_none());
}

#[test]
fn critical_three_colors() {
    let v = json(&gpotts(&["critical", "--q", "3", "--z", "2"]));
    assert!((v["beta_c"].as_f64().unwrap() - 2.772589).abs() < 1e-6);
    assert_eq!(v["order"], "first");
}

#[test]
fn invalid_parameters_exit_two() {
    let o = gpotts(&["critical", "--q", "1.5", "--z", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(gpotts(&["critical", "--q", "3", "--z", "2", "--bogus", "1"]).status.code(), Some(2));
}

#[test]
fn phase_diagram_rows_in_order() {
    let o = gpotts(&["phase-diagram", "--q-grid", "2,3", "--z-grid", "2:4:0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,z,beta_zero,beta_one,beta_c,order"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 10);
    for r in &rows[..5] {
        assert_eq!(r[2], "");
        assert_eq!(r[3], r[4]);
        assert_eq!(r[5], "second");
    }
    let zs: Vec<f64> = rows[5..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(zs, vec![2.0, 2.5, 3.0, 3.5, 4.0]);
    for r in &rows[5..] {
        let (b0, b1, bc): (f64, f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!(b0 < bc && bc < b1);
    }
    // The alias gives the same bytes.
    let alias = gpotts(&["bifurcation", "--q-grid", "2,3", "--z-grid", "2:4:0.5"]);
    assert_eq!(alias.stdout, o.stdout);
}

#[test]
fn malformed_grid_exit_two() {
    assert_eq!(gpotts(&["phase-diagram", "--q-grid", "2:x:1", "--z-grid", "2"]).status.code(), Some(2));
    assert_eq!(gpotts(&["phase-diagram", "--q-grid", "1", "--z-grid", "2"]).status.code(), Some(2));
}

#[test]
fn landscape_constant_at_zero() {
    let o = gpotts(&["landscape", "--q", "3", "--z", "4", "--beta", "5", "--u-grid", "0:1:0.5"]);
    let text = stdout(&o);
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let k0: f64 = first[1].parse().unwrap();
    assert!((k0 + 5.0 / 4.0 * 3f64.powi(-3)).abs() < 1e-15);
    let last: Vec<&str> = text.lines().nth(3).unwrap().split(',').collect();
    assert_eq!(last[0].parse::<f64>().unwrap(), 1.0 - 1e-9);
    assert!(text.contains("stationary_u,k,kind,global_min"));
}

#[test]
fn fuzzy_verdicts() {
    let v = json(&gpotts(&["fuzzy", "--q", "5", "--z", "3", "--beta", "1", "--partition", "2,3"]));
    let bc = json(&gpotts(&["critical", "--q", "3", "--z", "3"]))["beta_c"].as_f64().unwrap();
    assert_eq!(v["threshold_beta"].as_f64().unwrap(), bc);
    assert_eq!(v["governing_class"], 3);
    let v = json(&gpotts(&["fuzzy", "--q", "5", "--z", "3", "--beta", "1", "--partition", "2,2,1"]));
    assert_eq!(v["gibbs_for_all_beta"], true);
    assert_eq!(gpotts(&["fuzzy", "--q", "5", "--z", "3", "--beta", "1", "--partition", "2,2"]).status.code(), Some(2));
}

#[test]
fn kernel_at_discontinuity_exit_three() {
    let v = json(&gpotts(&["fuzzy", "--q", "5", "--z", "3", "--beta", "10", "--partition", "2,3"]));
    let d = &v["discontinuities"][0];
    assert_eq!(d["class"], 1);
    let nu = d["nu"].as_f64().unwrap();
    let arg = format!("{},{}", 1.0 - nu, nu);
    let o = gpotts(&["kernel", "--q", "5", "--z", "3", "--beta", "10", "--partition", "2,3", "--nu", &arg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("class 1"));
    let o = gpotts(&["kernel", "--q", "5", "--z", "3", "--beta", "10", "--partition", "2,3", "--nu", "0.5,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let row: Vec<f64> = json(&o)["probabilities"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn scheme_file_and_binary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("five.json");
    std::fs::write(&path, r#"{"q":5,"z":5,"partitions":[[[1],[2],[3],[4],[5]],[[1,2],[3],[4],[5]],[[1,2,3],[4],[5]],[[1,2,3],[4,5]],[[1,2,3,4,5]]]}"#).unwrap();
    let b2 = json(&gpotts(&["critical", "--q", "2", "--z", "5"]))["beta_c"].as_f64().unwrap();
    let b3 = json(&gpotts(&["critical", "--q", "3", "--z", "5"]))["beta_c"].as_f64().unwrap();
    let beta = format!("{}", 0.5 * (b2 + b3));
    let o = gpotts(&["scheme", "--scheme", path.to_str().unwrap(), "--beta", &beta]);
    assert_eq!(o.status.code(), Some(0));
    let statuses: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.rsplit(',').next().unwrap().to_string()).collect();
    assert_eq!(statuses, ["trivial", "non-gibbs", "gibbs", "non-gibbs", "trivial"]);

    let o = gpotts(&["scheme", "--binary", "3", "--z", "5", "--beta", "0.5"]);
    let statuses: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.rsplit(',').next().unwrap().to_string()).collect();
    assert_eq!(statuses, ["trivial", "gibbs", "gibbs", "trivial"]);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"q":3,"z":5,"partitions":[[[1],[2],[3]],[[1],[2],[3]],[[1,2,3]]]}"#).unwrap();
    let o = gpotts(&["scheme", "--scheme", bad.to_str().unwrap(), "--beta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("t = 1"));
}

#[test]
fn sample_is_deterministic() {
    let args = ["sample", "--n", "3000", "--q", "3", "--z", "2", "--beta", "3.5", "--sweeps", "3", "--seed", "7"];
    let a = gpotts(&args);
    let b = gpotts(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next(), Some("sweep_index,n_1,n_2,n_3"));
    assert_eq!(text.lines().count(), 4);
    let c = gpotts(&["sample", "--n", "3000", "--q", "3", "--z", "2", "--beta", "3.5", "--sweeps", "3", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn rcm_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rcm.csv");
    let o = gpotts(&["rcm", "--n", "60", "--z", "2", "--lambda-grid", "0:2:0.5", "--samples", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(text.lines().next(), Some("lambda,mean_max_fraction,stderr"));
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][1], 1.0 / 60.0);
    let o = gpotts(&["rcm", "--n", "20", "--z", "3", "--q", "2", "--lambda-grid", "1", "--samples", "5", "--trace"]);
    assert_eq!(stdout(&o).lines().count(), 6);
    assert_eq!(gpotts(&["rcm", "--n", "20", "--z", "2", "--lambda-grid", "1,2", "--trace"]).status.code(), Some(2));
}

#[test]
fn verify_gradient_suite() {
    let o = gpotts(&["verify", "--suite", "gradient", "--suite", "marginal"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() == 44);
    assert!(text.contains("all checks passed"));
    assert_eq!(gpotts(&["verify", "--suite", "nope"]).status.code(), Some(2));
}
