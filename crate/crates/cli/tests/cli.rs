use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn selfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfsim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn spec_path(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "specs", &format!("{name}.json")].iter().collect();
    p.to_str().unwrap().to_string()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn bundled_spec_files_validate() {
    for name in ["line2", "sierpinski", "vicsek"] {
        let o = selfsim(&["validate", &spec_path(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
}

#[test]
fn adjacent_boundary_is_rejected_with_its_axiom() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("adjacent.json");
    fs::write(
        &path,
        r#"{"name":"adjacent","theta":2,"vertices":["a","m","b"],"boundary":["a","b"],
            "cliques":[["a","m"],["m","b"],["a","b"]],"origin_clique":0,
            "substitution_maps":[["a","m"],["m","b"],["a","b"]]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = selfsim(&["validate", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  (F1)"), "{}", stdout(&o));
    let o = selfsim(&["functions", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(F1)"));
}

#[test]
fn exit_codes() {
    // usage errors
    assert_eq!(selfsim(&["green", "line2"]).status.code(), Some(1));
    assert_eq!(selfsim(&["validate", "no-such-spec"]).status.code(), Some(1));
    assert_eq!(selfsim(&["green", "line2", "--z", "zero"]).status.code(), Some(1));
    // numeric failure: z is a pole of f
    assert_eq!(selfsim(&["green", "line2", "--z", "1.4142135623730951"]).status.code(), Some(2));
    // caps
    assert_eq!(selfsim(&["oracle", "line2", "--level", "9"]).status.code(), Some(3));
    assert_eq!(selfsim(&["dynamics", "line2", "--depth", "99"]).status.code(), Some(3));
    assert_eq!(selfsim(&["--help"]).status.code(), Some(0));
}

#[test]
fn green_value_at_three_fifths() {
    // G(o,o|z) = 1/sqrt(1 − z²) on the line, 1.25 at z = 0.6
    let o = selfsim(&["green", "line2", "--x", "0:ε:o", "--y", "0:ε:o", "--z", "0.6"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("G(")).unwrap();
    let v: f64 = line.rsplit("= ").next().unwrap().trim().parse().unwrap();
    assert!((v - 1.25).abs() < 1e-9, "{line}");
    assert!(out.contains("error bound"));
}

#[test]
fn oracle_passes_on_sierpinski() {
    let o = selfsim(&["oracle", "sierpinski", "--level", "3", "--samples", "2", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn line_spectrum_report() {
    let o = selfsim(&["spectrum", "line2", "--depth", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("minus (-1, 1)"), "{out}");
    assert!(out.contains("inner [0, 2], outer [0, 2]"), "{out}");
    assert!(out.contains("interval-like"), "{out}");
}

#[test]
fn outputs_carry_provenance_and_are_reproducible() {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let out = dir.path().to_str().unwrap().to_string();
            for args in [
                vec!["dynamics", "sierpinski", "--depth", "8"],
                vec!["spectrum", "vicsek", "--depth", "6"],
                vec!["functions", "vicsek"],
                vec!["probe", "line2", "--k", "10", "--shells", "4"],
            ] {
                let mut a: Vec<&str> = vec!["--out", &out, "--seed", "3"];
                a.extend(args);
                assert_eq!(selfsim(&a).status.code(), Some(0), "{a:?}");
            }
            let o = selfsim(&["--out", &out, "--json", "oracle", "line2", "--level", "2", "--samples", "3", "--seed", "9"]);
            assert_eq!(o.status.code(), Some(0));
            (read_dir_sorted(dir.path()), dir)
        })
        .collect();
    let (a, b) = (&runs[0].0, &runs[1].0);
    assert_eq!(a, b);
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.contains(&"dynamics-sierpinski.csv") && names.contains(&"oracle-line2.json"), "{names:?}");
    for (name, bytes) in a {
        let text = String::from_utf8(bytes.clone()).unwrap();
        if name.ends_with(".json") {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["provenance"]["seed"], 9);
            assert_eq!(v["provenance"]["spec_sha256"].as_str().unwrap().len(), 64);
        } else {
            let head: Vec<&str> = text.lines().take(4).collect();
            assert!(head[0].starts_with("# selfsim "), "{name}");
            assert!(head[1].contains("sha256 "), "{name}");
            assert!(head[2].contains("seed 3"), "{name}");
            assert!(head[3].starts_with("# parameters {"), "{name}");
        }
    }
}

#[test]
fn dynamics_csv_rows_are_real_points() {
    let o = selfsim(&["dynamics", "vicsek", "--depth", "5", "--mode", "julia"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "re,im,depth,kind");
    assert!(rows.len() > 10);
    for r in &rows[1..] {
        let cols: Vec<&str> = r.split(',').collect();
        assert_eq!(cols.len(), 4, "{r}");
        assert_eq!(cols[1], "0", "{r}");
        assert!(cols[0] == "inf" || cols[0].parse::<f64>().unwrap().abs() >= 1.0 - 1e-9, "{r}");
    }
}
