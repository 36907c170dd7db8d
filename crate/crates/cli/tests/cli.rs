use std::process::{Command, Output};

use serde_json::Value;

fn kappa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kappa")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = kappa(&[args, &["--format", "json"]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn dims_table_row() {
    let rows = json(&["dims", "--n-max", "6"]);
    let row = rows.as_array().unwrap().iter().find(|r| r["n"] == 6 && r["d"] == 1).unwrap();
    assert_eq!(row["dim"], 16);
    assert_eq!(row["kappa_index_size"], 16);
    assert_eq!(row["num_partitions"], 65);
    assert_eq!(row["rank_relations"], 49);
    let table = stdout(&kappa(&["dims", "--n-max", "6"]));
    assert!(table.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["6", "1", "16", "16", "65", "49"]));
}

#[test]
fn character_of_a_transposition() {
    let o = kappa(&["character", "--n", "4", "--d", "1", "--perm", "2,1,3,4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");
    let v = json(&["character", "--n", "6", "--d", "1", "--perm", "2,3,1,4,5,6"]);
    assert_eq!(v["value"], v["trace"].as_str().unwrap().parse::<i64>().unwrap());
}

#[test]
fn verify_small_suite_passes() {
    let o = kappa(&["verify", "--n-max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all checks passed"));
}

#[test]
fn verify_json_lines() {
    let o = kappa(&["verify", "--n-max", "5", "--only", "dimension_formula", "--only", "base_cases", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let reports: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 3 + 1);
    assert!(reports.iter().all(|r| r["status"] == "pass"));
    assert_eq!(reports[0]["check"], "dimension_formula");
    assert_eq!(reports[0]["params"]["n"], 4);
    assert_eq!(reports[3]["check"], "base_cases");
}

#[test]
fn injected_faults_fail_with_witness() {
    for fault in ["relation-sign:5:1:2:1", "pairing:1,2|3|4|5:1,3,4,5", "pairing:1|2|3|4|5:1,2,3,4,5"] {
        let o = kappa(&["verify", "--n-max", "5", "--fault", fault, "--format", "json"]);
        assert_eq!(o.status.code(), Some(1), "{fault}");
        let failing: Vec<Value> = stdout(&o)
            .lines()
            .map(|l| serde_json::from_str::<Value>(l).unwrap())
            .filter(|r| r["status"] == "fail")
            .collect();
        assert!(!failing.is_empty());
        assert!(failing.iter().all(|r| !r["witness"].as_object().unwrap().is_empty()));
    }
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["phi-matrix", "--n", "4", "--d", "2"][..],
        &["verify", "--n-max", "9"],
        &["verify", "--only", "nope"],
        &["verify", "--fault", "pairing:1,2|3|4|5:1,3,4"],
        &["verify", "--fault", "garbage"],
        &["character", "--n", "4", "--d", "1", "--perm", "2,1,3"],
        &["strata", "--n", "12", "--d", "1"],
        &["dims"],
    ] {
        assert_eq!(kappa(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(kappa(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_is_stable_across_runs_and_thread_counts() {
    let a = kappa(&["verify", "--n-max", "6", "--format", "json", "--threads", "1"]);
    let b = kappa(&["verify", "--n-max", "6", "--format", "json", "--threads", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let m1 = kappa(&["pairing-matrix", "--n", "6", "--d", "2", "--format", "json"]);
    let m2 = kappa(&["pairing-matrix", "--n", "6", "--d", "2", "--format", "json"]);
    assert_eq!(m1.stdout, m2.stdout);
}

#[test]
fn matrix_export() {
    let v = json(&["pairing-matrix", "--n", "5", "--d", "1"]);
    assert_eq!(v["universe"].as_array().unwrap().len(), 5);
    assert_eq!(v["row_labels"].as_array().unwrap().len(), 5);
    assert_eq!(v["rank"], 5);
    assert_eq!(v["universe"][0], "1,2,3,4");
    let entry = &v["rows"][0][0];
    assert!(entry["label"].is_string() && entry["num"] == 1 && entry["den"] == 1);

    let via_flag = json(&["matrix", "--matrix", "phi", "--n", "5", "--d", "1"]);
    assert_eq!(via_flag, json(&["phi-matrix", "--n", "5", "--d", "1"]));

    let csv = stdout(&kappa(&["pairing-matrix", "--n", "5", "--d", "1", "--format", "csv"]));
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[1], "1,2,3,4");
    let first = reader.records().next().unwrap().unwrap();
    assert!(first[0].contains('|'));
}

#[test]
fn relations_export() {
    let v = json(&["relations", "--n", "5", "--d", "1"]);
    assert_eq!(v["rank_relations"], 5);
    assert_eq!(v["dim"], 5);
    let gens = v["generators"].as_array().unwrap();
    assert!(!gens.is_empty());
    assert!(gens.iter().all(|g| g.as_array().unwrap().len() <= 4));
    let top = json(&["relations", "--n", "5", "--d", "2"]);
    assert_eq!(top["generators"].as_array().unwrap().len(), 0);
    assert_eq!(top["dim"], 1);
}

#[test]
fn strata_counts() {
    let v = json(&["strata", "--n", "6", "--d", "1"]);
    assert_eq!(v["trees"], 105);
    assert_eq!(v["type_i"], 105);
    let v = json(&["strata", "--n", "7", "--d", "2", "--trees"]);
    assert_eq!(v["type_i"].as_u64().unwrap() + v["type_ii"].as_u64().unwrap(), v["trees"].as_u64().unwrap());
    assert!(v["type_ii"].as_u64().unwrap() > 0);
    let first = &v["tree_list"][0];
    assert_eq!(first["legs"].as_object().unwrap().len(), 7);
}

#[test]
fn out_flag_and_thread_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dims.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_kappa"))
        .args(["dims", "--n-max", "5", "--format", "csv", "--out", path.to_str().unwrap()])
        .env("KAPPA_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("n,d,dim,kappa_index_size,num_partitions,rank_relations\n"));
    assert!(written.contains("5,1,5,5,10,5\n"));
}
