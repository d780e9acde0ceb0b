//! Pins the JSON report layout. Set `UPDATE_GOLDEN=1` to rewrite the files.

use std::path::PathBuf;

use serde_json::Value;
use stabiliq::cli::{self, Check, Fixture, Selector, SimulateOptions, VerifyOptions};
use stabiliq::report::Report;
use stabiliq::specs::StutterPolicy;

fn mask(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for (k, x) in m.iter_mut() {
                if k == "elapsed_ms" {
                    *x = Value::from(0);
                } else {
                    mask(x);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(mask),
        _ => {}
    }
}

fn check(name: &str, report: &Report) {
    let mut actual: Value = serde_json::from_str(&report.to_json()).unwrap();
    mask(&mut actual);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&actual).unwrap() + "\n").unwrap();
        return;
    }
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(actual, expected, "{name} differs from {}", path.display());
}

fn builtin(protocol: &str, n: Option<usize>, ids: Option<Vec<i64>>) -> cli::Loaded {
    cli::load(&Selector {
        protocol: Some(protocol.into()),
        n,
        ids,
        source: None,
    })
    .unwrap()
}

#[test]
fn verify_cm_ideal() {
    let loaded = builtin("cm", None, Some(vec![2, 1, 3, 4]));
    let opts = VerifyOptions {
        checks: vec![Check::Ideal],
        stutter_policy: Some(StutterPolicy::DivergenceAllowed),
        ..VerifyOptions::default()
    };
    check("verify_cm_ideal", &cli::verify(&loaded, &opts).unwrap());
}

#[test]
fn verify_pif_coverage() {
    let loaded = builtin("pif", Some(4), None);
    let opts = VerifyOptions {
        checks: vec![Check::PifCoverage, Check::Closed],
        predicate: Some("rq-or-rp".into()),
        ..VerifyOptions::default()
    };
    check("verify_pif_coverage", &cli::verify(&loaded, &opts).unwrap());
}

#[test]
fn simulate_abp() {
    let loaded = builtin("abp", None, None);
    let opts = SimulateOptions {
        from: "ns=0 nr=0 chpq=empty chqp=empty".into(),
        steps: 8,
        ..SimulateOptions::default()
    };
    check("simulate_abp", &cli::simulate(&loaded, &opts).unwrap());
}

#[test]
fn impossibility_le() {
    let loaded = builtin("le", Some(4), None);
    check(
        "impossibility_le",
        &cli::impossibility(&Fixture::Loaded(&loaded), None).unwrap(),
    );
}
