use std::process::{Command, Output};

fn nof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nof-lab"))
        .args(args)
        .env_remove("NOF_LAB_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn seeded_simulation_is_byte_identical() {
    let args = ["simulate", "--n", "4", "--function", "random", "--trials", "6", "--seed", "9"];
    let a = nof(&args);
    let b = nof(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("nof-lab/1"));
    assert!(lines.next().unwrap().starts_with("trial,protocol,d,k,n,"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn exit_codes() {
    let ambiguous = nof(&["simulate", "--n", "4", "--k", "2", "--mode", "reduced", "--trials", "5"]);
    assert_eq!(ambiguous.status.code(), Some(1));
    assert!(stdout(&ambiguous).contains(",ambiguous,"));

    let violated = nof(&["simulate", "--n", "4", "--k", "2"]);
    assert_eq!(violated.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&violated.stderr).contains("hypothesis"));

    let unknown = nof(&["simulate", "--function", "XOR-XOR"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn json_output_and_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let desc = dir.path().join("desc.json");
    std::fs::write(
        &desc,
        r#"{"protocol":"full","d":2,"n":2,"k":16,"function":"DISJ","seed":3,"trials":2}"#,
    )
    .unwrap();
    let out = dir.path().join("out.json");
    let o = nof(&[
        "simulate",
        "--descriptor",
        desc.to_str().unwrap(),
        "--format",
        "json",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["schema"], "nof-lab/1");
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    for r in results {
        assert_eq!(r["protocol"], "full");
        assert_eq!(r["l"], 16);
        assert_eq!(r["match"], true);
        assert_eq!(r["measured_bits"], r["analytic_bits"]);
    }
}

#[test]
fn matrix_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "4 2 2\n1 1\n1 0\n1 1\n1 0\n").unwrap();
    let o = nof(&["simulate", "--matrix", path.to_str().unwrap(), "--function", "DISJ"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let row = text.lines().nth(2).unwrap();
    // column 1 is all ones, so DISJ = 0
    assert!(row.starts_with("0,eqsolve,2,4,2,,DISJ,strict,"), "{row}");
    assert!(row.contains(",ok,0,0,true,true,"), "{row}");
}

#[test]
fn uniqueness_table() {
    let o = nof(&["uniqueness", "--D", "1", "--n", "4", "--k-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows[0], "1,1,8,ambiguous-witness,2,2,");
    assert_eq!(rows[2], "3,1,8,ambiguous-witness,8,8,");
    assert!(rows[3].starts_with("4,1,8,unique,,16,"));
    assert_eq!(rows[4], "# monotone=true");
}

#[test]
fn cost_table_rows() {
    let o = nof(&["cost-table", "--n", "2,4,8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0], "eqsolve,2,4,2,,40,40,20,true,,,");
    assert!(rows.iter().all(|r| r.split(',').nth(8) == Some("true")));

    let full = nof(&["cost-table", "--protocol", "full", "--n", "2"]);
    let text = stdout(&full);
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(&row[..11], &["full", "2", "16", "2", "16", "13872", "13872", "13872", "true", "13872", "true"]);

    let empty = nof(&["cost-table", "--n", ""]);
    assert_ne!(empty.status.code(), Some(0));
}

#[test]
fn basis_dump() {
    let o = nof(&["basis", "--d", "4", "--k", "2", "--function", "random", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# p=3"));
    // |Sor(2,2)| = C(5,3)
    let entries: Vec<&str> = lines.collect();
    assert_eq!(entries.len(), 10);
    assert!(entries[0].starts_with("00.00 "));
    assert!(entries.iter().all(|l| {
        let c: u64 = l.split(' ').nth(1).unwrap().parse().unwrap();
        c < 3
    }));
}
