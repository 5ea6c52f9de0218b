use std::path::Path;

use serde_json::Value;
use unitarize::checks::run_check;
use unitarize::io::{emit_dataset, parse_dataset, parse_dataset_with, LoadOptions, Validation};
use unitarize::library;
use unitarize::Error;

fn dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../datasets")
}

/// Structural equality with numbers compared to a relative 1e-13, so that
/// last-digit differences in transcendental functions across platforms do
/// not break the golden files.
fn close(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            (x - y).abs() <= 1e-13 * x.abs().max(y.abs()).max(1.0)
        }
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| close(p, q)),
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| close(v, w)))
        }
        _ => a == b,
    }
}

#[test]
fn golden_files_match_builtins() {
    for ds in library::all() {
        let name = ds.name.clone().unwrap();
        let path = dir().join(format!("{name}.json"));
        let file = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let emitted = emit_dataset(&ds).unwrap();
        let a: Value = serde_json::from_str(&file).unwrap();
        let b: Value = serde_json::from_str(&emitted).unwrap();
        assert!(close(&a, &b), "{name} differs from its builtin");
    }
    let shipped = std::fs::read_dir(dir()).unwrap().count();
    assert_eq!(shipped, library::NAMES.len());
}

#[test]
fn shipped_datasets_pass_their_declared_checks() {
    for name in library::NAMES {
        let text = std::fs::read_to_string(dir().join(format!("{name}.json"))).unwrap();
        let ds = parse_dataset(&text).unwrap();
        assert!(!ds.checks.is_empty(), "{name} declares no checks");
        for check in &ds.checks {
            let r = run_check(&ds, check).unwrap();
            assert!(r.residual.pass, "{name}: {check} fails with {:e}", r.residual.residual);
        }
    }
}

#[test]
fn emission_is_a_fixed_point() {
    for name in library::NAMES {
        let text = std::fs::read_to_string(dir().join(format!("{name}.json"))).unwrap();
        let once = emit_dataset(&parse_dataset(&text).unwrap()).unwrap();
        let twice = emit_dataset(&parse_dataset(&once).unwrap()).unwrap();
        assert_eq!(once, twice, "{name}");
    }
}

#[test]
fn labels_and_indices_are_interchangeable() {
    let by_name = std::fs::read_to_string(dir().join("fibonacci.json")).unwrap();
    let by_index = by_name.replace("\"tau\"", "1").replace("\"labels\": [\n      \"1\",\n      1\n    ]", "\"labels\": [\"1\", \"tau\"]");
    let a = parse_dataset(&by_name).unwrap();
    let b = parse_dataset(&by_index).unwrap();
    assert_eq!(a.f.unwrap().distance(&b.f.unwrap()), 0.0);
}

const NON_ASSOCIATIVE: &str = r#"{
  "format_version": "1",
  "fusion_ring": {
    "labels": ["1", "sigma", "psi"],
    "dual": ["1", "sigma", "psi"],
    "fusion": [
      {"a": "1", "b": "1", "c": "1", "n": 1},
      {"a": "1", "b": "sigma", "c": "sigma", "n": 1},
      {"a": "sigma", "b": "1", "c": "sigma", "n": 1},
      {"a": "1", "b": "psi", "c": "psi", "n": 1},
      {"a": "psi", "b": "1", "c": "psi", "n": 1},
      {"a": "sigma", "b": "sigma", "c": "1", "n": 1},
      {"a": "sigma", "b": "sigma", "c": "psi", "n": 1},
      {"a": "sigma", "b": "psi", "c": "sigma", "n": 1},
      {"a": "psi", "b": "sigma", "c": "sigma", "n": 1},
      {"a": "psi", "b": "psi", "c": "1", "n": 1},
      {"a": "psi", "b": "psi", "c": "psi", "n": 1}
    ]
  }
}"#;

#[test]
fn ring_axioms_are_enforced_on_load_unless_warn_only() {
    match parse_dataset(NON_ASSOCIATIVE).unwrap_err() {
        Error::Semantic { section, message } => {
            assert_eq!(section, "fusion_ring");
            assert!(message.contains("associativity"), "{message}");
        }
        e => panic!("{e:?}"),
    }
    let opts = LoadOptions {
        validation: Validation::WarnOnly,
        ..LoadOptions::default()
    };
    let ds = parse_dataset_with(NON_ASSOCIATIVE, &opts).unwrap();
    assert_eq!(ds.warnings.len(), 1);
    assert!(!run_check(&ds, "ring").unwrap().residual.pass);
}

#[test]
fn non_square_block_is_rejected() {
    let text = std::fs::read_to_string(dir().join("fibonacci.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let block = v["f_symbols"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|b| b["matrix"].as_array().unwrap().len() == 2)
        .unwrap();
    block["matrix"].as_array_mut().unwrap().pop();
    let err = parse_dataset(&v.to_string()).unwrap_err();
    assert!(matches!(err, Error::Semantic { ref section, .. } if section == "f_symbols"), "{err:?}");
}

#[test]
fn unsupported_version_is_rejected() {
    let err = parse_dataset(r#"{"format_version": "2"}"#).unwrap_err();
    assert!(matches!(err, Error::Semantic { ref section, .. } if section == "format_version"));
}

#[test]
fn non_finite_values_cannot_be_emitted() {
    let mut ds = library::example("z2").unwrap();
    ds.tolerance = Some(f64::NAN);
    assert!(emit_dataset(&ds).is_err());
    let c = ds.cochain.as_ref().unwrap();
    let mut vals = c.values().to_vec();
    vals[3] = num_complex::Complex64::new(f64::INFINITY, 0.0);
    assert!(unitarize::cohomology::Cochain::new(c.group().clone(), c.degree(), vals).is_err());
}
