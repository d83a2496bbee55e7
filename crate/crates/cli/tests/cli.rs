use std::path::Path;
use std::process::{Command, Output};

fn patchy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_patchy")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn csv_table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn rates_defaults_succeed() {
    let o = patchy(&["rates"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_table(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    let k_smol: f64 = rows[0][header.iter().position(|h| h == "k_smol").unwrap()].parse().unwrap();
    assert!((k_smol - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn bad_flags_exit_two() {
    for args in [
        vec!["rates", "--eps", "2"],
        vec!["rates", "--eps", "-0.1"],
        vec!["rates", "--na", "0"],
        vec!["rates", "--bogus"],
        vec!["chi", "--da", "-1", "--trials", "10"],
        vec!["chi", "--xi", "2", "--trials", "10"],
        vec!["chi", "--trials", "0"],
        vec!["lens", "--grid-n", "1"],
        vec!["bdsim", "--r0", "0.9", "--chi", "0.2"],
        vec!["bdsim", "--dt-small", "1", "--dt-big", "0.1", "--chi", "0.2"],
        vec!["--format", "xml", "rates"],
    ] {
        let o = patchy(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn budget_exhaustion_is_a_labelled_row_and_exit_three() {
    let o = patchy(&["bdsim", "--trials", "5", "--max-steps", "10", "--chi", "0.3", "--na", "1,2"]);
    assert_eq!(code(&o), 3);
    let (header, rows) = csv_table(&String::from_utf8(o.stdout).unwrap());
    let status = header.iter().position(|h| h == "status").unwrap();
    let k0 = header.iter().position(|h| h == "k0").unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(r[status].starts_with("budget_exceeded"), "{r:?}");
        assert!(r[k0].is_empty());
    }
}

#[test]
fn json_and_csv_carry_identical_values() {
    let args = ["rates", "--na", "1,10", "--nb", "3", "--drot-a", "0.2"];
    let csv = patchy(&[&["--format", "csv"][..], &args].concat());
    let json = patchy(&[&["--format", "json"][..], &args].concat());
    let (header, rows) = csv_table(&String::from_utf8(csv.stdout).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let objs = v.as_array().unwrap();
    assert_eq!(objs.len(), rows.len());
    for (row, obj) in rows.iter().zip(objs) {
        assert_eq!(obj.as_object().unwrap().len(), header.len());
        for (name, cell) in header.iter().zip(row) {
            let a: f64 = cell.parse().unwrap();
            let b = obj[name.as_str()].as_f64().unwrap();
            assert_eq!(a, b, "{name}");
        }
    }
}

fn chi_run(dir: &Path, name: &str, threads: &str) -> (String, String) {
    let out = dir.join(name);
    let o = patchy(&[
        "--threads", threads, "--out", out.to_str().unwrap(), "chi", "--trials", "3000", "--da", "0.1,10", "--db",
        "1", "--seed", "9",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let manifest = std::fs::read_to_string(dir.join(format!("{name}.manifest.json"))).unwrap();
    (std::fs::read_to_string(out).unwrap(), manifest)
}

#[test]
fn same_seed_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = chi_run(dir.path(), "a.csv", "1");
    let (b, _) = chi_run(dir.path(), "b.csv", "1");
    let (c, _) = chi_run(dir.path(), "c.csv", "8");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let (header, rows) = csv_table(&a);
    assert_eq!(rows.len(), 2);
    let chi = header.iter().position(|h| h == "chi").unwrap();
    for r in rows {
        let v: f64 = r[chi].parse().unwrap();
        assert!(v > 0.1 && v < 0.7);
    }
}

#[test]
fn manifest_records_run_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let (_, manifest) = chi_run(dir.path(), "run.csv", "2");
    let m: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(m["command"], "chi");
    assert_eq!(m["seed"], 9);
    assert_eq!(m["trials"], 3000);
    assert_eq!(m["complete"], true);
    assert_eq!(m["params"]["rho_inf"], 1e5);
    assert_eq!(m["sha256"].as_str().unwrap().len(), 64);

    let mpath = dir.path().join("run.csv.manifest.json");
    let copy = dir.path().join("again.csv");
    let o = patchy(&["--out", copy.to_str().unwrap(), "replay", mpath.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&copy).unwrap(), std::fs::read(dir.path().join("run.csv")).unwrap());

    // A tampered output is detected.
    let tampered = manifest.replace(m["sha256"].as_str().unwrap(), &"0".repeat(64));
    std::fs::write(&mpath, tampered).unwrap();
    let o = patchy(&["replay", mpath.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn lens_emits_points_and_integral_row() {
    let o = patchy(&["lens", "--grid-n", "8", "--trials", "4000", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_table(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 9);
    let col = |n: &str| header.iter().position(|h| h == n).unwrap();
    let c0: f64 = rows[0][col("c")].parse().unwrap();
    assert!((c0 - 2.0 / std::f64::consts::PI).abs() < 0.05);
    let last = &rows[8];
    assert_eq!(last[col("kind")], "integral");
    let integral: f64 = last[col("c")].parse().unwrap();
    let ratio: f64 = last[col("ratio")].parse().unwrap();
    assert!((ratio - integral / 4.0 / 0.1459).abs() < 1e-12);
}

#[test]
fn bdsim_rows_carry_predictions() {
    let o = patchy(&["bdsim", "--trials", "3", "--eps", "0.3", "--na", "2,4", "--nb", "2", "--chi", "0.25"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_table(&String::from_utf8(o.stdout).unwrap());
    let col = |n: &str| header.iter().position(|h| h == n).unwrap();
    assert_eq!(rows.len(), 2);
    let asym: Vec<f64> = rows.iter().map(|r| r[col("k0_asymptotic")].parse().unwrap()).collect();
    assert!((asym[1] / asym[0] - 2.0).abs() < 1e-12);
    for r in &rows {
        assert_eq!(r[col("status")], "ok");
        let k0: f64 = r[col("k0")].parse().unwrap();
        assert!((0.0..=1.0).contains(&k0));
    }
}

#[test]
fn zero_rotation_flag_routes_to_validation() {
    let args = ["--trials", "20000", "--r-inf", "3", "--integral", "0.5806", "--seed", "2"];
    let routed = patchy(&[&["bdsim", "--zero-rotation"][..], &args].concat());
    let direct = patchy(&[&["validate-zero-rotation"][..], &args].concat());
    assert_eq!(code(&routed), 0, "{}", String::from_utf8_lossy(&routed.stderr));
    assert_eq!(routed.stdout, direct.stdout);
    let (header, _) = csv_table(&String::from_utf8(direct.stdout).unwrap());
    assert!(header.contains(&"predicted".to_string()));
}
