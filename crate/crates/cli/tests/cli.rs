use std::process::Command;

fn simplexity(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_simplexity")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn build_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c4.json");
    let report = dir.path().join("report.json");
    let (code, stdout, _) = simplexity(&[
        "build", "cube", "--dim", "4", "--m", "2", "--seed", "i3d1", "--coloring", "balanced",
        "--out", out.to_str().unwrap(), "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("d=4 size=16"), "{stdout}");
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["steps"][0]["size"], 16);
    let (code, stdout, _) = simplexity(&["verify", out.to_str().unwrap(), "--face-to-face"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("face_to_face=true"), "{stdout}");
}

#[test]
fn verify_rejects_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"dim":2,"label":"cube(2)","points":[[0,0],[1,0],[0,1],[1,1]],"simplices":[[0,1,3],[0,1,2]]}"#,
    )
    .unwrap();
    let (code, stdout, _) = simplexity(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 1, "{stdout}");
    assert!(stdout.contains("dissection=false"));
}

#[test]
fn report_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let (code, _, _) = simplexity(&["report", "table", "--max-dim", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("d,size,efficiency,bound,hadamard,smith,phi_known,rho_known"));
    let row7 = lines.nth(6).unwrap();
    assert!(row7.starts_with("7,"));
    assert!(row7.contains(",0.840,"));
    assert!(row7.ends_with("0.8159"));
}

#[test]
fn expect_rows() {
    let (code, stdout, _) = simplexity(&["expect", "--q-dim", "3", "--m", "2", "--samples", "4", "--rng-seed", "1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "d,m,strategy,seed,size,bound,expected_exact_or_blank");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("6,2,balanced,,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",8750/3,410")));
}

#[test]
fn seeds_and_oracle() {
    let (code, stdout, _) = simplexity(&["seeds", "show", "i3d1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["simplices"], 16);
    assert_eq!(v["weighted_size"], "14/3");
    let (code, stdout, _) = simplexity(&["oracle", "min-weighted", "--config", "product(cube(1),simplex(2))"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("minimum 3\n"));
    let (code, _, stderr) = simplexity(&["seeds", "show", "nope"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown seed"));
}
