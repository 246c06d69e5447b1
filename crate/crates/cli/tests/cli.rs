//! End-to-end runs of the `nerf` binary.

use std::path::Path;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use nerf_core::erasure::frame_from_gaussian;
use nerf_core::random::{extremal_singular_values, RngStream};
use nerf_core::Field;
use serde_json::Value;

fn nerf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nerf"))
        .args(args)
        .env_remove("NERF_ENUM_CAP")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn assert_schema(file: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors
            .map(|e| format!("{e} at {}", e.instance_path))
            .collect(),
    };
    panic!("{file}: {msgs:#?}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn bounds_worked_example() {
    let o = nerf(&[
        "bounds", "--n", "10", "--N", "40", "--K", "20", "--tau0", "0.25", "--field", "real",
    ]);
    let doc = stdout_json(&o);
    assert_schema("certificate.schema.json", &doc);
    let (alpha, beta) = (
        doc["alpha"].as_f64().unwrap(),
        doc["beta"].as_f64().unwrap(),
    );
    assert!((beta - 4.872908).abs() < 5e-7, "{beta}");
    assert!((alpha - 4.593e-4).abs() < 5e-8, "{alpha}");
    // 50-digit evaluations of the same pipeline
    assert!(rel(beta, 4.8729078183715025) < 1e-14);
    assert!(rel(alpha, 4.5931778877227696e-4) < 1e-9);
    assert!(rel(doc["L"].as_f64().unwrap(), 7.4729838297288896) < 1e-13);
    assert!(rel(doc["mu"].as_f64().unwrap(), 3.0225887222397812) < 1e-14);
    assert!((doc["log_failure_prob"].as_f64().unwrap() - (3f64.ln() - 2.5)).abs() < 1e-14);
    assert!(!o.stderr.is_empty(), "summary line on stderr");
}

#[test]
fn bounds_theorem_convention() {
    let o = nerf(&[
        "bounds",
        "--n",
        "10",
        "--N",
        "40",
        "--K",
        "20",
        "--tau0",
        "0.25",
        "--convention",
        "theorem",
    ]);
    let doc = stdout_json(&o);
    assert_schema("certificate.schema.json", &doc);
    let expected = 1.0 + 2f64.sqrt() + 3.0225887222397812f64.sqrt();
    assert!(rel(doc["beta"].as_f64().unwrap(), expected) < 1e-14);
    assert_eq!(doc["constant_convention"], "theorem");
}

#[test]
fn bounds_complex_field() {
    let doc = stdout_json(&nerf(&[
        "bounds", "--n", "10", "--N", "40", "--K", "20", "--field", "complex",
    ]));
    assert_schema("certificate.schema.json", &doc);
    let expected = 2f64.sqrt() + 2.0 * 2f64.sqrt() + 2.0 * 3.0225887222397812f64.sqrt();
    assert!(rel(doc["beta"].as_f64().unwrap(), expected) < 1e-14);
    assert_eq!(doc["field"], "complex");
}

#[test]
fn bounds_prints_seventeen_digits() {
    let o = nerf(&["bounds", "--n", "10", "--N", "40", "--K", "20"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let beta_line = text.lines().find(|l| l.contains("\"beta\"")).unwrap();
    let mantissa = beta_line
        .split(':')
        .nth(1)
        .unwrap()
        .trim()
        .split('e')
        .next()
        .unwrap();
    assert_eq!(
        mantissa.chars().filter(char::is_ascii_digit).count(),
        17,
        "{beta_line}"
    );
}

#[test]
fn bounds_domain_and_usage_errors() {
    let o = nerf(&["bounds", "--n", "10", "--N", "40", "--K", "10"]);
    assert_eq!(code(&o), 65);
    assert!(String::from_utf8_lossy(&o.stderr).contains("K > n"));
    assert!(o.stdout.is_empty());

    assert_eq!(
        code(&nerf(&["bounds", "--n", "10", "--N", "40", "--K", "50"])),
        65
    );
    assert_eq!(
        code(&nerf(&[
            "bounds", "--n", "10", "--N", "40", "--K", "20", "--tau0", "0"
        ])),
        65
    );
    assert_eq!(code(&nerf(&["bounds", "--n", "10", "--N", "40"])), 64);
    assert_eq!(
        code(&nerf(&["bounds", "--n", "x", "--N", "40", "--K", "20"])),
        64
    );
    assert_eq!(
        code(&nerf(&[
            "bounds",
            "--n",
            "10",
            "--N",
            "40",
            "--K",
            "20",
            "--field",
            "quaternion"
        ])),
        64
    );
    assert_eq!(code(&nerf(&["frobnicate"])), 64);
    assert_eq!(code(&nerf(&["--help"])), 0);
}

#[test]
fn bounds_vacuous_certificate() {
    // λ' = 1.001: sup φ underflows to zero
    let o = nerf(&["bounds", "--n", "1000", "--N", "1001", "--K", "1001"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("vacuous"));
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("s,alpha,beta,log2_ratio,neg_log2_alpha,status")
    );
    lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn curve_fixed_k_shapes() {
    let two = csv_rows(&nerf(&[
        "curve", "--mode", "fixed-k", "--ratio", "2", "--tau0", "0.25",
    ]));
    let five = csv_rows(&nerf(&[
        "curve", "--mode", "fixed-k", "--ratio", "5", "--tau0", "0.25",
    ]));
    assert_eq!(two.len(), 200);
    assert!(two
        .iter()
        .chain(&five)
        .all(|r| r.len() == 6 && r[5] == "ok"));
    let s = column(&two, 0);
    assert!(s.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(s, column(&five, 0));
    for rows in [&two, &five] {
        for col in [3, 4] {
            assert!(column(rows, col).windows(2).all(|w| w[0] <= w[1]));
        }
    }
    let (a, b) = (column(&two, 3), column(&five, 3));
    assert!(a.iter().zip(&b).all(|(x, y)| y < x));
    // log2(β/α) is the logarithm of the printed ratio
    for r in &two {
        let (alpha, beta, l2): (f64, f64, f64) = (
            r[1].parse().unwrap(),
            r[2].parse().unwrap(),
            r[3].parse().unwrap(),
        );
        assert!((l2 - (beta / alpha).log2()).abs() < 1e-12 * l2.abs().max(1.0));
        assert!(l2 >= 0.0);
    }
}

#[test]
fn curve_fixed_n_flags_invalid_points() {
    let rows = csv_rows(&nerf(&[
        "curve", "--mode", "fixed-n", "--ratio", "50", "--points", "100",
    ]));
    assert_eq!(rows.len(), 100);
    for r in &rows {
        let s: f64 = r[0].parse().unwrap();
        if (1.0 - s) * 50.0 > 1.0 {
            // λ' just above one can leave sup φ ≤ 0
            assert!(r[5] == "ok" || r[1..].join(",") == ",,,,vacuous", "{r:?}");
        } else {
            assert_eq!(r[1..].join(","), ",,,,invalid");
        }
    }
    assert_eq!(rows.last().unwrap()[5], "invalid");
}

#[test]
fn curve_rejects_bad_sweeps() {
    assert_eq!(
        code(&nerf(&["curve", "--mode", "fixed-k", "--ratio", "1"])),
        65
    );
    assert_eq!(
        code(&nerf(&[
            "curve", "--mode", "fixed-k", "--ratio", "2", "--s-max", "1"
        ])),
        65
    );
    assert_eq!(
        code(&nerf(&["curve", "--mode", "sideways", "--ratio", "2"])),
        64
    );
}

#[test]
fn simulate_exhaustive_example() {
    let o = nerf(&[
        "simulate",
        "--n",
        "4",
        "--N",
        "12",
        "--K",
        "6",
        "--frames",
        "200",
        "--tau0",
        "2",
        "--mode",
        "exhaustive",
        "--seed",
        "7",
    ]);
    let doc = stdout_json(&o);
    assert_schema("simulate.schema.json", &doc);
    assert_schema("certificate.schema.json", &doc["certificate"]);
    assert_eq!(doc["aggregate"]["violating_frames"], 0);
    assert_eq!(doc["aggregate"]["subsets_per_frame"], 924);
    let frames = doc["per_frame"].as_array().unwrap();
    assert_eq!(frames.len(), 200);
    assert!(frames
        .iter()
        .all(|f| f["report"]["violations"] == 0 && f["report"]["total"] == 924));
}

#[test]
fn simulate_whole_frame_when_nothing_is_erased() {
    let doc = stdout_json(&nerf(&[
        "simulate", "--n", "50", "--N", "200", "--K", "200", "--trials", "1", "--seed", "5",
    ]));
    assert_schema("simulate.schema.json", &doc);
    let report = &doc["per_frame"][0]["report"];
    assert_eq!(report["total"], 1);
    assert_eq!(report["worst_pattern"].as_array().unwrap().len(), 200);
    let frame = frame_from_gaussian(&RngStream::new(5, 0), 50, 200, Field::Real).unwrap();
    let sv = extremal_singular_values(frame.matrix()).unwrap();
    assert!(
        rel(
            report["worst_condition"].as_f64().unwrap(),
            sv.sigma_max / sv.sigma_min
        ) < 1e-14
    );
}

#[test]
fn simulate_sampled_example() {
    let o = nerf(&[
        "simulate", "--n", "10", "--N", "60", "--K", "30", "--mode", "sampled", "--trials",
        "100000", "--frames", "50", "--seed", "3",
    ]);
    let doc = stdout_json(&o);
    assert_schema("simulate.schema.json", &doc);
    let bound = doc["condition_bound"].as_f64().unwrap();
    let frames = doc["per_frame"].as_array().unwrap();
    assert_eq!(frames.len(), 50);
    let within = frames
        .iter()
        .filter(|f| f["report"]["worst_condition"].as_f64().unwrap() <= bound)
        .count();
    assert!(within as f64 >= 0.99 * 50.0, "{within} of 50");
    assert!(frames.iter().all(|f| f["report"]["total"] == 100000));
}

#[test]
fn simulate_user_window() {
    let doc = stdout_json(&nerf(&[
        "simulate", "--n", "3", "--N", "7", "--K", "4", "--alpha", "1e-6", "--beta", "1e6",
        "--frames", "3",
    ]));
    assert_schema("simulate.schema.json", &doc);
    assert_eq!(doc["window_source"], "user");
    assert!(doc["certificate"].is_null());
    assert_eq!(doc["aggregate"]["violating_frames"], 0);
    assert_eq!(
        code(&nerf(&[
            "simulate", "--n", "3", "--N", "7", "--K", "4", "--alpha", "1"
        ])),
        64
    );
}

#[test]
fn simulate_cap_refusal() {
    let o = Command::new(env!("CARGO_BIN_EXE_nerf"))
        .args(["simulate", "--n", "4", "--N", "12", "--K", "6"])
        .env("NERF_ENUM_CAP", "923")
        .output()
        .unwrap();
    assert_eq!(code(&o), 66);
    assert!(String::from_utf8_lossy(&o.stderr).contains("= 924 subsets"));
    let o = Command::new(env!("CARGO_BIN_EXE_nerf"))
        .args(["simulate", "--n", "4", "--N", "12", "--K", "6"])
        .env("NERF_ENUM_CAP", "924")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn verify_selected_checks() {
    let o = nerf(&["verify", "--check", "binomial", "--max-n", "30"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS binomial/dominance"));

    let o = nerf(&[
        "verify", "--check", "extremes", "--n", "50", "--N", "200", "--trials", "1000",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text
        .lines()
        .find(|l| l.contains("sigma_max_mean_rel_err"))
        .unwrap();
    assert!(line.starts_with("PASS") && line.contains("observed=") && line.contains("margin="));
}

#[test]
fn verify_default_run_passes() {
    let o = nerf(&["verify"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{text}");
    assert!(!text.contains("FAIL"));
    assert!(text.lines().count() > 30);
}

#[test]
fn verify_reports_failure() {
    // the asymptotic means are far off for a 2 × 3 matrix
    let o = nerf(&[
        "verify", "--check", "extremes", "--n", "2", "--N", "3", "--trials", "50",
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}
