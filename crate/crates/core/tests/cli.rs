use std::path::{Path, PathBuf};

use serde_json::Value;
use unitarize::cli::run_with;
use unitarize::io::parse_dataset;

fn datasets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../datasets")
}

fn ds(name: &str) -> String {
    datasets().join(format!("{name}.json")).display().to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("unitarize").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn report(args: &[&str]) -> (i32, Value, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.display().to_string();
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--report", &p]);
    let r = run(&full);
    let text = std::fs::read_to_string(&path).unwrap();
    (r.code, serde_json::from_str(&text).unwrap(), text)
}

#[test]
fn verify_shipped_dataset_passes() {
    let r = run(&["verify", &ds("fibonacci")]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("pentagon"));
    assert!(r.stdout.trim_end().ends_with("PASS"));
}

#[test]
fn yang_lee_unitarity_fails_with_code_one() {
    let r = run(&["verify", &ds("yang-lee")]);
    assert_eq!(r.code, 0);
    let r = run(&["verify", &ds("yang-lee"), "--check", "unitary"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("FAIL"));
}

#[test]
fn reports_carry_per_check_fields() {
    let (code, rep, _) = report(&["verify", &ds("fib-braided")]);
    assert_eq!(code, 0);
    let checks = rep["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    for c in checks {
        for key in ["name", "residual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
    }
    assert_eq!(rep["pass"], Value::Bool(true));
    assert!(rep.get("elapsed_seconds").is_none());
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["unitarize".to_string(), ds("fib-equivalence")],
        vec!["gauge-search".to_string(), ds("fib-gauge"), "--seed".into(), "4".into(), "--max-iters".into(), "50".into()],
        vec!["cocycle".to_string(), "unitarize".into(), ds("z3")],
        vec!["module".to_string(), "unitarize".into(), ds("fib-module-equivalence")],
    ] {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let (_, _, first) = report(&a);
        let (_, _, second) = report(&a);
        assert_eq!(first, second, "{args:?}");
    }
}

#[test]
fn timings_are_opt_in() {
    let (_, rep, _) = report(&["verify", &ds("ising"), "--timings"]);
    assert!(rep["elapsed_seconds"].as_f64().is_some());
}

#[test]
fn syntax_errors_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"format_version\": \"1\",\n  \"fusion_ring\": [\n").unwrap();
    let r = run(&["verify", &path.display().to_string()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 4"), "{}", r.stderr);
}

#[test]
fn semantic_errors_name_the_section() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(ds("fibonacci")).unwrap().replace("\"tau\",\n      \"b\"", "\"rho\",\n      \"b\"");
    std::fs::write(&path, text).unwrap();
    let r = run(&["verify", &path.display().to_string()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("f_symbols"), "{}", r.stderr);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["verify"]).code, 2);
    assert_eq!(run(&["verify", "/nonexistent/file.json"]).code, 2);
    assert_eq!(run(&["verify", &ds("ising"), "--check", "no-such-check"]).code, 2);
    assert_eq!(run(&["examples", "emit", "no-such-example"]).code, 2);
    assert_eq!(run(&["verify", &ds("ising"), "--tol", "-1"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn cocycle_trivialize_emits_eta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eta.json");
    let r = run(&["cocycle", "trivialize", &ds("z2"), "--degree", "2", "--out", &out.display().to_string()]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("eta"));
    let eta = parse_dataset(&std::fs::read_to_string(&out).unwrap()).unwrap().cochain.unwrap();
    assert_eq!(eta.degree(), 1);
    // The shipped cochain is the coboundary of (1, 7).
    assert!((eta.values()[1].re - 7.0).abs() < 1e-12);
}

#[test]
fn cocycle_degree_mismatch_is_usage_error() {
    assert_eq!(run(&["cocycle", "trivialize", &ds("z2"), "--degree", "3"]).code, 2);
}

#[test]
fn unitarize_output_is_unitary_and_coherent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.json");
    let o = out.display().to_string();
    assert_eq!(run(&["unitarize", &ds("fib-equivalence"), "--out", &o]).code, 0);
    let u = parse_dataset(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let e = u.equivalence.unwrap().equivalence;
    assert!(e.tensorator.unitarity_residual() < 1e-12);
    let r = run(&["verify", &o, "--check", "equivalence"]);
    assert_eq!(r.code, 0);
}

#[test]
fn factorize_and_polar_write_datasets() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, name) in [("factorize", "ising-braided-equivalence"), ("polar", "fib-gauge")] {
        let out = dir.path().join(format!("{cmd}.json"));
        let r = run(&[cmd, &ds(name), "--out", &out.display().to_string()]);
        assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
        let back = parse_dataset(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(back.positive_gauge.is_some());
    }
}

#[test]
fn gauge_search_recovers_unitary_fibonacci() {
    let dir = tempfile::tempdir().unwrap();
    let gauged = dir.path().join("gauged.json");
    // Gauge the unitary Fibonacci data by the positive gauge of fib-gauge via polar.
    let polar = dir.path().join("polar.json");
    assert_eq!(run(&["polar", &ds("fib-gauge"), "--out", &polar.display().to_string()]).code, 0);
    let mut d = parse_dataset(&std::fs::read_to_string(&polar).unwrap()).unwrap();
    let p = d.positive_gauge.take().unwrap();
    d.f = Some(unitarize::fusion::apply_gauge(d.f.as_ref().unwrap(), &p).unwrap());
    d.gauge = None;
    d.checks = vec!["pentagon".into()];
    std::fs::write(&gauged, unitarize::io::emit_dataset(&d).unwrap()).unwrap();
    assert_eq!(run(&["verify", &gauged.display().to_string(), "--check", "unitary"]).code, 1);
    let r = run(&["gauge-search", &gauged.display().to_string(), "--seed", "1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
}

#[test]
fn yang_lee_gauge_search_fails() {
    let r = run(&["gauge-search", &ds("yang-lee"), "--max-iters", "100"]);
    assert_eq!(r.code, 1);
}

#[test]
fn build_vecg_from_cocycle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vec.json");
    let o = out.display().to_string();
    assert_eq!(run(&["cocycle", "build-vecg", &ds("z3"), "--out", &o]).code, 0);
    assert_eq!(run(&["verify", &o]).code, 0);
    assert_eq!(run(&["cocycle", "build-vecg", &ds("z2")]).code, 2);
}

#[test]
fn module_commands() {
    assert_eq!(run(&["module", "verify", &ds("vec-z2-rank1-module")]).code, 0);
    assert_eq!(run(&["module", "unitarize", &ds("fib-module-equivalence")]).code, 0);
    assert_eq!(run(&["module", "unitarize", &ds("vec-z2-regular-module")]).code, 2);
}

#[test]
fn nat_iso_unitarization() {
    let r = run(&["unitarize", &ds("semion-nat-iso")]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("nat-iso-certificate"));
}

#[test]
fn tolerance_precedence() {
    let (_, rep, _) = report(&["verify", &ds("ising"), "--tol", "1e-6"]);
    assert_eq!(rep["tolerance"].as_f64(), Some(1e-6));
    let (_, rep, _) = report(&["verify", &ds("ising")]);
    assert_eq!(rep["tolerance"].as_f64(), Some(1e-9));
}

#[test]
fn examples_list_and_emit() {
    let r = run(&["examples", "list"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.lines().count(), unitarize::library::NAMES.len());
    let r = run(&["examples", "emit", "fibonacci"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, std::fs::read_to_string(ds("fibonacci")).unwrap());
}
