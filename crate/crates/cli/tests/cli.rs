use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ritzcert::linalg::format_matrix;
use ritzcert::random::{matrix_with_spectrum, random_gaussian, random_spectrum, rng_from_seed};
use serde_json::Value;

fn ritzcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ritzcert"))
        .args(args)
        .env_remove("RITZ_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("valid JSON on stdout")
}

fn section<'a>(doc: &'a Value, id: &str) -> &'a Value {
    doc["sections"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["id"] == id)
        .unwrap()
}

fn lookup(doc: &Value, id: &str, key: &str) -> Value {
    let s = section(doc, id);
    s["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r[0] == key)
        .unwrap()[1]
        .clone()
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report-v1.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(doc: &Value) {
    let v = schema();
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{e} at {}", e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn degenerate_all_ones_example_exits_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "2 2\n1 1\n1 1\n");
    let x = write(dir.path(), "x.txt", "2 1\n1\n0\n");
    let o = ritzcert(&["bounds", "--matrix", &h, "--basis", &x, "--format", "json"]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let doc = json(&o);
    assert_valid(&doc);
    assert_eq!(doc["status"], "not_applicable");
    let s = lookup(&doc, "angles", "sin_theta_p").as_f64().unwrap();
    assert!((s - 1.0).abs() < 1e-12);
    assert!(lookup(&doc, "angles", "eta_theta_p").is_null());
}

#[test]
fn diagonal_operator_has_exact_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "3 3\n1 0 0\n0 2 0\n0 0 5\n");
    let x = write(dir.path(), "x.txt", "3 2\n1 0\n0 1\n0 0\n");
    let o = ritzcert(&["bounds", "--matrix", &h, "--basis", &x, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_valid(&doc);
    for row in section(&doc, "ritz")["rows"].as_array().unwrap() {
        assert_eq!(row[1], row[2]);
        assert_eq!(row[1], row[3]);
        assert_eq!(row[1], row[5]);
    }
}

#[test]
fn factor_input_matches_explicit_input() {
    let dir = tempfile::tempdir().unwrap();
    let r = write(dir.path(), "r.txt", "# factor\n2 2\n0.1 -0.1\n0 2\n");
    let h = write(dir.path(), "h.txt", "2 2\n0.01 -0.01\n-0.01 4.01\n");
    let x = write(dir.path(), "x.txt", "2 1\n1\n0\n");
    let a = json(&ritzcert(&[
        "bounds", "--matrix", &r, "--basis", &x, "--format", "json",
    ]));
    let b = json(&ritzcert(&[
        "bounds", "--matrix", &h, "--basis", &x, "--format", "json",
    ]));
    let sa = lookup(&a, "angles", "sin_theta_p").as_f64().unwrap();
    let sb = lookup(&b, "angles", "sin_theta_p").as_f64().unwrap();
    assert!((sa - sb).abs() < 1e-12);
    assert!((sa - 1.0 / 401f64.sqrt()).abs() < 1e-12);
}

/// A seeded random instance, regenerated to confirm the committed fixture.
fn random_fixture() -> (String, String) {
    let mut rng = rng_from_seed(42);
    let spectrum: Vec<f64> = random_spectrum(&mut rng, 6, 0.1, 10.0);
    let (h, q) = matrix_with_spectrum(&mut rng, &spectrum);
    let x = &q.select_columns(&[0, 1]) + &random_gaussian::<f64, _>(&mut rng, 6, 2).scale(1e-2);
    (format_matrix(&h, false), format_matrix(&x, false))
}

#[test]
fn random_fixture_report_is_stable() {
    let dir = fixture_dir();
    let (h_text, x_text) = random_fixture();
    let golden_path = dir.join("random_bounds.json");
    if std::env::var_os("RITZCERT_BLESS").is_some() {
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("random_h.txt"), &h_text).unwrap();
        std::fs::write(dir.join("random_x.txt"), &x_text).unwrap();
    }
    assert_eq!(
        std::fs::read_to_string(dir.join("random_h.txt")).unwrap(),
        h_text
    );
    assert_eq!(
        std::fs::read_to_string(dir.join("random_x.txt")).unwrap(),
        x_text
    );

    let h = dir.join("random_h.txt").display().to_string();
    let x = dir.join("random_x.txt").display().to_string();
    let args = [
        "bounds",
        "--matrix",
        h.as_str(),
        "--basis",
        x.as_str(),
        "--format",
        "json",
    ];
    let first = ritzcert(&args);
    let second = ritzcert(&args);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(first.stdout, second.stdout);
    if std::env::var_os("RITZCERT_BLESS").is_some() {
        std::fs::write(&golden_path, &first.stdout).unwrap();
    }
    let golden = std::fs::read_to_string(&golden_path).expect("golden report present");
    assert_eq!(stdout(&first), golden);
    assert_valid(&json(&first));
}

#[test]
fn table1_formats_and_flags() {
    let o = ritzcert(&["table1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_valid(&doc);
    let table = section(&doc, "lower_estimates");
    let cols: Vec<&str> = table["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    let col = |name: &str| cols.iter().position(|c| *c == name).unwrap();
    let rows = table["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let eta1 = &rows[0];
    assert_eq!(eta1[col("sin_theta_flag")], "match");
    assert!((eta1[col("sin_theta_bound")].as_f64().unwrap() - 0.009004962810).abs() < 1e-11);
    let eta2 = &rows[1];
    assert_eq!(eta2[col("temple_kato_flag")], "mismatch");
    assert!((eta2[col("temple_kato")].as_f64().unwrap() - 0.009975).abs() < 1e-6);
    assert!(doc["notes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n["id"] == "temple-kato-column"));

    let csv = stdout(&ritzcert(&[
        "table1",
        "--eta-list",
        "1,5",
        "--format",
        "csv",
    ]));
    let mut lines = csv.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("section,eta,mu_e,sin_theta,"));
    let first = lines.next().unwrap();
    assert!(
        first.starts_with("lower_estimates,1.00000000000,0.0100000000000,"),
        "{first}"
    );
    assert!(first.contains(",0.00900496281000,match,"));

    let text = stdout(&ritzcert(&["table1", "--eta-list", "5"]));
    assert!(text.contains("0.00980003998800"));
}

#[test]
fn string_command() {
    let o = ritzcert(&[
        "string", "--eta", "1000", "--modes", "1", "--mesh", "1000", "--format", "json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let doc = json(&o);
    assert_valid(&doc);
    let l1 = section(&doc, "eigenvalues")["rows"][0][1].as_f64().unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((l1 - pi2).abs() / pi2 < 1e-4);

    let doc = json(&ritzcert(&[
        "string", "--eta", "10", "--mesh", "1000", "--format", "json",
    ]));
    assert_eq!(
        lookup(&doc, "eigenvector", "within_bound"),
        Value::Bool(true)
    );

    let bad = ritzcert(&["string", "--eta", "2", "--mesh", "10"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("mesh"));
}

#[test]
fn selfcheck_is_deterministic_and_honours_seed_env() {
    let a = ritzcert(&["selfcheck", "--count", "4"]);
    let b = ritzcert(&["selfcheck", "--count", "4"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("selfcheck seed 42 instances 4"));
    let c = Command::new(env!("CARGO_BIN_EXE_ritzcert"))
        .args(["selfcheck", "--count", "1"])
        .env("RITZ_SEED", "9")
        .output()
        .unwrap();
    assert!(stdout(&c).starts_with("selfcheck seed 9 instances 1"));
    assert_eq!(
        ritzcert(&["selfcheck", "--count", "0"]).status.code(),
        Some(1)
    );
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(ritzcert(&["nonsense"]).status.code(), Some(1));
    assert_eq!(
        ritzcert(&["table1", "--eta-list", "1,x"]).status.code(),
        Some(1)
    );
    assert_eq!(
        ritzcert(&["table1", "--sym-tol", "-1"]).status.code(),
        Some(1)
    );
    assert_eq!(ritzcert(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "2 2\n1 0\n0 x\n");
    let x = write(dir.path(), "x.txt", "2 1\n1\n0\n");
    let o = ritzcert(&["bounds", "--matrix", &h, "--basis", &x]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("h.txt:3"), "{err}");

    let h = write(dir.path(), "h2.txt", "2 2\n1 0\n0 1\n");
    let x = write(dir.path(), "x3.txt", "3 1\n1\n0\n0\n");
    let o = ritzcert(&["bounds", "--matrix", &h, "--basis", &x]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("x3.txt"));

    let missing = ritzcert(&["bounds", "--matrix", "/nonexistent/h.txt", "--basis", &x]);
    assert_eq!(missing.status.code(), Some(1));
}
