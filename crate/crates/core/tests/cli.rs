use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsleroid")).args(args).output().unwrap()
}

fn parse_row(record: &csv::StringRecord) -> Vec<f64> {
    record.iter().map(|x| x.parse().unwrap()).collect()
}

#[test]
fn csv_rows_follow_the_radial_law() {
    let out = run(&["geodesic", "--g", "0.9", "--t1", "1.2,-0.4,0.5", "--t2", "-0.3,0.8,1.1", "--samples", "25", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["s", "t1", "t2", "t3", "a", "b", "delta_s", "alpha"]);
    let rows: Vec<Vec<f64>> = reader.records().map(|r| parse_row(&r.unwrap())).collect();
    assert_eq!(rows.len(), 26);
    for row in &rows {
        let (s, t) = (row[0], &row[1..4]);
        let (a, b) = (row[4], row[5]);
        let tt: f64 = t.iter().map(|x| x * x).sum();
        assert!((tt - (a * a + 2.0 * b * s + s * s)).abs() < 1e-12 * tt.max(1.0), "row {row:?}");
    }
    assert_eq!(&rows[0][1..4], &[1.2, -0.4, 0.5]);
    assert_eq!(&rows[25][1..4], &[-0.3, 0.8, 1.1]);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let base = ["geodesic", "--g", "-1.2", "--t1", "0.4,1.0,-0.2", "--t2", "1.0,0.1,0.6", "--samples", "7", "--pullback"];
    let json = run(&[&base[..], &["--format", "json"]].concat());
    let csv_out = run(&[&base[..], &["--format", "csv"]].concat());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(csv_out.stdout.as_slice());
    for (pt, rec) in v["points"].as_array().unwrap().iter().zip(reader.records()) {
        let row = parse_row(&rec.unwrap());
        let mut expected = vec![pt["s"].as_f64().unwrap()];
        for key in ["t", "r"] {
            expected.extend(pt[key].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()));
        }
        assert_eq!(&row[..7], &expected[..]);
    }
}

#[test]
fn eval_reads_metric_files() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "2\n1.5 0.2\n0.2 0.9").unwrap();
    let metric = format!("file:{}", file.path().display());
    let out = run(&["eval", "--g", "0.4", "--metric", &metric, "--vector", "0.5,-0.3,1.0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let (d, c) = (v["det"].as_f64().unwrap(), v["det_closed_form"].as_f64().unwrap());
    assert!((d - c).abs() < 1e-12 * c);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["eval", "--g", "0.5", "--vector", "1,2,3"]).status.code(), Some(0));
    assert_eq!(run(&["eval", "--g", "2.0", "--vector", "1,2,3"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--g", "0.5", "--vector", "0,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--g", "0.5", "--metric", "file:/nonexistent", "--vector", "1,2,3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["geodesic", "--g", "0.5", "--t1", "1,1,1", "--t2", "1,1,1"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--g", "0", "--trials", "20"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--g", "0.5", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_reports_failures_by_id() {
    let out = run(&["verify", "--g", "1.0", "--seed", "42", "--trials", "30", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&str> = v["failed"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(out.status.code(), Some(if failed.is_empty() { 0 } else { 1 }));
    let stderr = String::from_utf8(out.stderr).unwrap();
    for id in &failed {
        assert!(stderr.contains(id));
    }
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn near_limit_parameter_warns_without_crashing() {
    let out = run(&["verify", "--g", "1.999", "--trials", "5"]);
    assert!(matches!(out.status.code(), Some(0 | 1)));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!v["warnings"].as_array().unwrap().is_empty());
}
