use std::process::{Command, Output};

fn arnold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arnold")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn triangle_jsonl() {
    let o = arnold(&["triangle", "--kind", "arnold", "--n", "3", "--format", "jsonl"]);
    assert!(o.status.success());
    let rows = json_lines(&o);
    assert_eq!(rows.len(), 2 + 4 + 6);
    assert!(rows.contains(&serde_json::json!({"n": 3, "k": -2, "value": 2})));

    let o = arnold(&["triangle", "--kind", "poly", "--n", "3", "--format", "jsonl"]);
    let rows = json_lines(&o);
    assert!(rows.contains(&serde_json::json!({"n": 3, "k": -2, "poly": {"0": 1, "2": 1}})));
}

#[test]
fn triangle_table_and_overflow() {
    let o = arnold(&["triangle", "--kind", "entringer", "--n", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(" 4 | 0 1 2 2"));
    let o = arnold(&["triangle", "--kind", "arnold", "--n", "200"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("overflow"));
}

#[test]
fn enumerate_families() {
    let o = arnold(&["enumerate", "--family", "cud-b", "--n", "3", "--with-stats"]);
    assert!(o.status.success());
    let rows = json_lines(&o);
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r["cycles"].is_array() && r["stats"]["npk"].is_u64()));

    let o = arnold(&["enumerate", "--family", "vs-b", "--n", "4", "--index", "2"]);
    assert_eq!(json_lines(&o).len(), 16);

    let o = arnold(&["enumerate", "--family", "fl-d", "--n", "3", "--format", "csv", "--with-stats"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("window,cycles,index,members,neg,npk,spk,smax"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn enumerate_trees() {
    let o = arnold(&["enumerate", "--family", "trees-o", "--n", "3", "--index", "3"]);
    let rows = json_lines(&o);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["index"] == 3));
    let o = arnold(&["enumerate", "--family", "trees-s", "--n", "4"]);
    assert_eq!(json_lines(&o).len(), 23);
}

#[test]
fn enumerate_errors() {
    assert_eq!(arnold(&["enumerate", "--family", "nope", "--n", "3"]).status.code(), Some(2));
    assert_eq!(arnold(&["enumerate", "--family", "vs-b", "--n", "3", "--index", "4"]).status.code(), Some(2));
    assert_eq!(arnold(&["enumerate", "--family", "vs-b", "--n", "40"]).status.code(), Some(2));
}

#[test]
fn map_pairs() {
    let o = arnold(&["map", "--bijection", "vs-d", "--n", "3"]);
    assert!(o.status.success());
    let rows = json_lines(&o);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert!(r["source"].is_array());
        assert!(r["target"]["label"] == 1);
        assert!(r["index"].is_u64());
    }
    let o = arnold(&["map", "--bijection", "flip", "--n", "2"]);
    assert_eq!(json_lines(&o).len(), 4);
}

#[test]
fn verify_exit_codes() {
    let o = arnold(&["verify", "--check", "table-arnold", "--max-n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("table-arnold"));

    let o = arnold(&["verify", "--check", "recstep-vs", "--max-n", "4", "--format", "jsonl"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_lines(&o)[0]["status"], "fail");

    assert_eq!(arnold(&["verify", "--check", "bogus"]).status.code(), Some(2));
    assert_eq!(arnold(&["verify", "--all", "--max-n", "0"]).status.code(), Some(2));

    let o = arnold(&["verify", "--all", "--max-n", "2", "--format", "jsonl"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o).len(), 27);
}

#[test]
fn verify_with_golden_dir() {
    let src = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/golden");
    let dir = tempfile::tempdir().unwrap();
    for name in ["arnold_numbers.txt", "arnold_polys.txt", "small_families.txt"] {
        std::fs::copy(src.join(name), dir.path().join(name)).unwrap();
    }
    let gd = dir.path().to_str().unwrap();
    let o = arnold(&["verify", "--check", "table-polys", "--golden-dir", gd]);
    assert_eq!(o.status.code(), Some(0));

    let polys = dir.path().join("arnold_polys.txt");
    let text = std::fs::read_to_string(&polys).unwrap().replace("5+23t^2+18t^4", "5+23t^2+19t^4");
    std::fs::write(&polys, text).unwrap();
    let o = arnold(&["verify", "--check", "table-polys", "--golden-dir", gd]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("k=-2"));

    std::fs::remove_file(&polys).unwrap();
    assert_eq!(arnold(&["verify", "--check", "table-polys", "--golden-dir", gd]).status.code(), Some(2));
}

#[test]
fn stats_of_one_perm() {
    let o = arnold(&["stats", "(1,-3,-2)(4)(5,-6)(7,9,-8)"]);
    assert!(o.status.success());
    let v = &json_lines(&o)[0];
    assert_eq!(v["npk"], 2);
    assert!(v["families"].as_array().unwrap().iter().any(|f| f == "cud-b"));
    let o = arnold(&["stats", "2 -4 3 1"]);
    assert_eq!(json_lines(&o)[0]["neg"], 1);
}
