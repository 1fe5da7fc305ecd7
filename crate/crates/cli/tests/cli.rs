use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kleinx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleinx"))
        .current_dir(dir)
        .env_remove("KLEINX_CONFIG")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn solve_rejects_parameter_outside_unit_interval() {
    let dir = tempfile::tempdir().unwrap();
    for p in ["1.5", "0", "-0.2"] {
        let out = kleinx(dir.path(), &["solve", "--p", p]);
        assert_eq!(code(&out), 2, "p = {p}");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&kleinx(dir.path(), &["sweep", "--bogus"])), 2);
    assert_eq!(code(&kleinx(dir.path(), &["geometry"])), 2);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["--config", "nope.cfg", "specfun-selftest"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("blocker"), "").unwrap();
    let out = kleinx(dir.path(), &["embed", "--nx", "4", "--ny", "4", "--out", "blocker/e.csv"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn bad_config_value_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "rel_tol = -1\n").unwrap();
    let out = kleinx(dir.path(), &["--config", "bad.cfg", "specfun-selftest"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["specfun-selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn solve_extremal_parameter_conserves_integrals() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["solve", "--p", "0.6123724356957945", "--out", "t.json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert!(v["drift"]["max_integral_drift"].as_f64().unwrap() < 1e-9);
    let ys = v["trajectory"]["y"].as_array().unwrap();
    assert_eq!(ys[0].as_f64().unwrap(), 0.0);
    assert!(v["trajectory"]["rel_tol"].as_f64().unwrap() > 0.0);
}

#[test]
fn solve_near_one_has_positive_e1() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["solve", "--p", "0.999", "--out", "t.json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert!(v["drift"]["initial_integrals"][1].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# small grid\ngeometry_grid = 5\noutput_dir = from_file\n",
    )
    .unwrap();
    let out = kleinx(dir.path(), &["--config", "run.cfg", "embed"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("from_file/embedding.csv")).unwrap();
    assert_eq!(text.lines().count(), 26);

    let out = kleinx(dir.path(), &["--config", "run.cfg", "--output-dir", "from_flag", "embed", "--nx", "3"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("from_flag/embedding.csv")).unwrap();
    assert_eq!(text.lines().count(), 16);
}

#[test]
fn environment_variable_supplies_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("env.cfg"), "geometry_grid = 4\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kleinx"))
        .current_dir(dir.path())
        .env("KLEINX_CONFIG", dir.path().join("env.cfg"))
        .args(["embed", "--out", "e.csv"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(dir.path().join("e.csv")).unwrap().lines().count(), 17);
}

#[test]
fn default_sweep_has_one_sign_change() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["sweep", "--steps", "999", "--out", "s.csv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,y_half,cot_alpha,E0,E1,E2,rotation_ok"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 999);
    let ps: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(ps.windows(2).all(|w| w[0] < w[1]));
    let cots: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    let changes = cots.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
    assert_eq!(changes, 1);
    // 17 significant digits: one leading digit and sixteen after the point
    let mantissa = rows[0][1].split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').len(), 18);
}

#[test]
fn sweep_output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (workers, name) in [("1", "a.csv"), ("3", "b.csv"), ("8", "c.csv")] {
        let out = kleinx(dir.path(), &["--workers", workers, "sweep", "--steps", "40", "--out", name]);
        assert_eq!(code(&out), 0);
        outputs.push(fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn sweep_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["--output-format", "json", "sweep", "--steps", "10", "--out", "s.json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 10);
}

#[test]
fn sweep_grid_outside_domain_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["sweep", "--p-min", "0.5", "--p-max", "0.9"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sturm_channel_one_contains_eigenvalue_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["sturm", "--k", "1", "--out", "st.json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("st.json")).unwrap()).unwrap();
    let channels = v["channels"].as_array().unwrap();
    assert_eq!(channels.len(), 1);
    assert_eq!(channels[0]["k"], 1);
    let hit = channels[0]["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .any(|e| (e["eigenvalue"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(hit);
    assert_eq!(v["multiplicity"]["multiplicity_at_one"], 5);
}

#[test]
fn sturm_rejects_bad_channel() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&kleinx(dir.path(), &["sturm", "--k", "3"])), 2);
    assert_eq!(code(&kleinx(dir.path(), &["sturm", "--n", "10"])), 2);
}

#[test]
fn embedding_obj_has_one_vertex_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["embed", "--nx", "64", "--ny", "64", "--format", "obj", "--out", "e.obj"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("e.obj")).unwrap();
    let verts: Vec<[f64; 3]> = text
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let c: Vec<f64> = l.split(' ').map(|t| t.parse().unwrap()).collect();
            [c[0], c[1], c[2]]
        })
        .collect();
    assert_eq!(verts.len(), 4096);
    // projections of unit vectors stay in the unit ball
    assert!(verts.iter().all(|v| v.iter().map(|c| c * c).sum::<f64>() <= 1.0 + 1e-12));
}

#[test]
fn embedding_csv_rows_are_unit_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["embed", "--nx", "8", "--ny", "6", "--out", "e.csv"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("e.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,c1,c2,c3,c4,c5"));
    let mut count = 0;
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
        assert!((0.0..std::f64::consts::PI).contains(&v[0]));
        let n: f64 = v[2..].iter().map(|c| c * c).sum();
        assert!((n - 1.0).abs() < 1e-12);
        count += 1;
    }
    assert_eq!(count, 48);
}

#[test]
fn embedding_projection_flag() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["embed", "--nx", "4", "--ny", "4", "--format", "obj", "--projection", "2,3,5", "--out", "e.obj"];
    assert_eq!(code(&kleinx(dir.path(), &args)), 0);
    assert_eq!(code(&kleinx(dir.path(), &["embed", "--projection", "1,2,7"])), 2);
}

#[test]
fn geometry_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&kleinx(dir.path(), &["geometry", "--check-identity", "--out", "g.json"])), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);

    assert_eq!(code(&kleinx(dir.path(), &["geometry", "--lawson", "3", "1", "--out", "l.obj"])), 0);
    let obj = fs::read_to_string(dir.path().join("l.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 64 * 64);

    assert_eq!(code(&kleinx(dir.path(), &["geometry", "--bipolar", "2", "1", "--out", "b.csv"])), 0);
    let csv = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("u,v,E_coef,G_coef"));

    assert_eq!(code(&kleinx(dir.path(), &["geometry", "--lawson", "1", "2"])), 2);
}

#[test]
fn evidence_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&kleinx(dir.path(), &["rule-out", "--p", "0.95"])), 0);
    assert_eq!(code(&kleinx(dir.path(), &["interval-check", "--p", "0.4"])), 0);
    assert!(dir.path().join("rule_out.json").exists());
    assert!(dir.path().join("interval_check.json").exists());
}

#[test]
fn verify_json_has_one_entry_per_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinx(dir.path(), &["verify", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 12);
    let all_pass = entries.iter().all(|e| e["passed"] == true);
    assert_eq!(code(&out) == 0, all_pass);
    if !all_pass {
        assert_eq!(code(&out), 1);
        assert!(String::from_utf8_lossy(&out.stderr).contains("failed first at"));
    }
}
