use std::process::{Command, Output};

use serde_json::Value;

fn tiltlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiltlab"))
        .args(args)
        .env_remove("TILTLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn fano_preset_json() {
    let v = json_of(&tiltlab(&["fano", "--index", "2", "--degree", "5"]));
    assert_eq!(v["h_top"], "5/1");
    assert_eq!(v["k_coeff"], "-2/1");
    assert_eq!(v["td2_dot_h"], "8/3");
    assert_eq!(v["chi_o"], "1/1");
}

#[test]
fn geometry_round_trip_is_byte_identical() {
    let first = tiltlab(&["fano", "--index", "1", "--degree", "22"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, &first.stdout).unwrap();
    let second = tiltlab(&["geometry", "validate", path.to_str().unwrap()]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn malformed_rational_names_field() {
    let first = stdout(&tiltlab(&["fano", "--index", "4", "--degree", "1"]));
    let broken = first.replace("\"11/6\"", "\"11/x\"");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, broken).unwrap();
    let o = tiltlab(&["geometry", "validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("td2_dot_h"), "{}", stderr(&o));

    let o = tiltlab(&["range", "--b", "1/0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`b`"));
}

#[test]
fn unknown_geometry_key_is_rejected() {
    let first = stdout(&tiltlab(&["fano", "--index", "4", "--degree", "1"]));
    let extra = first.replacen('{', "{\n  \"colour\": \"blue\",", 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, extra).unwrap();
    let o = tiltlab(&["geometry", "validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tiltlab(&["bogus"]).status.code(), Some(1));
    let o = tiltlab(&["walls", "--geom", "fano:4:1", "--class", "1,0,-2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = tiltlab(&["walls", "--geom", "fano:4:1", "--class", "1,0,-2", "--at", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(tiltlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_two() {
    let o = tiltlab(&["fano", "--index", "5", "--degree", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tiltlab(&["walls", "--geom", "fano:4:1", "--class", "1,0,-2", "--at", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tiltlab(&["bmt", "--geom", "fano:4:1", "--class", "1,0,-2", "--point", "0,1"]);
    assert_eq!(o.status.code(), Some(2), "missing v3");
    let o = tiltlab(&["stab-check", "--a", "0", "--alpha", "1", "--beta", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn walls_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("walls.csv");
    let v = json_of(&tiltlab(&[
        "walls", "--geom", "fano:4:1", "--class", "1,0,-2", "--at", "-3/2,7/4", "--oracle",
        "--csv", csv.to_str().unwrap(),
    ]));
    assert_eq!(v["oracle_agrees"], true);
    let walls = v["walls"].as_array().unwrap();
    assert_eq!(walls.len(), 1);
    assert_eq!(walls[0]["line"], serde_json::json!(["4/1", "5/1", "2/1"]));
    assert_eq!(walls[0]["slope"], "-5/2");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text,
        "line_a,line_b,line_c,slope,slope_decimal,witness_count\n4,5,2,-5/2,-2.500000000000,2\n"
    );
}

#[test]
fn structure_sheaf_has_no_walls() {
    let v = json_of(&tiltlab(&[
        "walls", "--geom", "fano:4:1", "--class", "[\"1/1\",\"0/1\",\"0/1\"]", "--at", "1/2,1", "--oracle",
    ]));
    // zero discriminant: no sub-class and quotient can both satisfy BG
    assert_eq!(v["oracle_agrees"], true);
    assert_eq!(v["walls"], serde_json::json!([]));
    assert_eq!(v["point"], serde_json::json!({"b": "1/2", "w": "1/1"}));
}

#[test]
fn walls_in_band_with_oracle() {
    let v = json_of(&tiltlab(&[
        "walls", "--geom", "fano:4:1", "--class", "1,0,-2", "--band", "-3/2,3/2,2", "--oracle",
    ]));
    assert_eq!(v["oracle_agrees"], true);
    assert!(!v["walls"].as_array().unwrap().is_empty());
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["walls", "--geom", "fano:4:1", "--class", "2,0,-3", "--at", "0,1"];
    let run = |n: &str| {
        Command::new(env!("CARGO_BIN_EXE_tiltlab"))
            .args(args)
            .env("TILTLAB_THREADS", n)
            .output()
            .unwrap()
    };
    let one = run("1");
    let three = run("3");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn bmt_point() {
    let v = json_of(&tiltlab(&["bmt", "--geom", "fano:4:1", "--class", "0,0,0,1", "--point", "0,1"]));
    assert_eq!(v["cubic_margin"], "-1/1");
    assert_eq!(v["cubic_holds"], false);
    assert_eq!(v["q"], "0/1");
}

#[test]
fn bmt_grid_csv() {
    let o = tiltlab(&[
        "bmt-grid", "--geom", "fano:4:1", "--class", "0,0,1,7", "--rect", "-1,1,1,2", "--step", "1/2,1/2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("b,w,sign,q_num,q_den"));
    assert_eq!(lines.count(), 15);
    let o = tiltlab(&[
        "bmt-grid", "--geom", "fano:4:1", "--class", "0,0,1,7", "--rect", "-2,2,1,2", "--step", "1,1",
    ]);
    assert_eq!(o.status.code(), Some(2), "grid leaves the region");
}

#[test]
fn conj3_exact_margin() {
    let v = json_of(&tiltlab(&["conj3", "--geom", "fano:4:1", "--class", "1,0,-1,0"]));
    assert_eq!(v["margin"], serde_json::json!({"p": "0/1", "q": "2/3", "rad": "2/1"}));
    assert_eq!(v["sign"], 1);
    let v = json_of(&tiltlab(&["conj3", "--geom", "fano:4:1", "--class", "1,2,2,4/3"]));
    assert_eq!(v["sign"], 0);
}

#[test]
fn stab_check_output() {
    let v = json_of(&tiltlab(&["stab-check", "--a", "2", "--alpha", "3", "--beta", "0"]));
    assert_eq!(v["interval"], serde_json::json!(["4/1", "18/1"]));
    assert_eq!(v["nonempty_criterion"], true);
    let v = json_of(&tiltlab(&["stab-check", "--a", "1", "--alpha", "1/6", "--beta", "0"]));
    assert_eq!(v["interval"], "empty");
    assert_eq!(v["nonempty_criterion"], false);
}

#[test]
fn hilb_twist_on_quintic() {
    // chi(O(m)) on a quintic threefold and chi(O(m + 1))
    let base = "0,25/6,0,5/6";
    let twisted = "5,20/3,5/2,5/6";
    let v = json_of(&tiltlab(&["hilb", "--base", base, "--class", twisted, "--s", "1", "--t", "2"]));
    assert_eq!(v["rk"], "1/1");
    assert_eq!(v["deg"], "5/1");
    assert_eq!(v["c2"], "5/2");
    assert_eq!(v["tau"], serde_json::json!({"re": "-1/2", "im": "4/1"}));
}

#[test]
fn range_edge() {
    let v = json_of(&tiltlab(&["range", "--b", "1/2"]));
    assert_eq!(v["min_w"], "1/4");
    let v = json_of(&tiltlab(&["range", "--b", "-3"]));
    assert_eq!(v["min_w"], "9/2");
}

#[test]
fn chi_of_inline_object_class() {
    let v = json_of(&tiltlab(&[
        "chi", "--geom", "fano:2:5", "--class", "{\"v\": [\"5/1\",\"-5/1\",\"5/2\",\"-5/6\"]}",
    ]));
    assert_eq!(v["chi"], "0/1");
}
