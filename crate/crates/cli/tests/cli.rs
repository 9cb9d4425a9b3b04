use num_bigint::BigInt;
use num_integer::Integer;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn example(name: &str) -> String {
    examples().join(name).to_string_lossy().into_owned()
}

fn lacuna(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lacuna"))
        .args(args)
        .env_remove("LACUNA_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = lacuna(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn error_of(out: &Output) -> Value {
    serde_json::from_slice::<Value>(&out.stderr).expect("json error")["error"].clone()
}

/// Largest-first tiling with backtracking over integer multiples of a unit.
fn tile_oracle(t: i64, mut gens: Vec<i64>) -> Option<Vec<i64>> {
    gens.sort_unstable_by(|a, b| b.cmp(a));
    fn go(rest: i64, gens: &[i64], acc: &mut Vec<i64>) -> bool {
        if rest == 0 {
            return !acc.is_empty();
        }
        for &g in gens {
            if g <= rest {
                acc.push(g);
                if go(rest - g, gens, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::new();
    go(t, &gens, &mut acc).then_some(acc)
}

#[test]
fn tile_four_by_one_and_three_halves() {
    let r = report(&["tile", "--t", "4", "--set", &example("one-threehalves.json")]);
    let got: Vec<&str> = r["result"]["tiling"]["increments"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    // in halves: t = 8, S = {2, 3}
    let expect: Vec<String> = tile_oracle(8, vec![2, 3])
        .unwrap()
        .into_iter()
        .map(|h| if h % 2 == 0 { format!("{}/1", h / 2) } else { format!("{h}/2") })
        .collect();
    assert_eq!(got, expect);
    assert_eq!(got, ["3/2", "3/2", "1/1"]);
}

#[test]
fn harmonic_classification_matches_rational_gcds() {
    let r = report(&["classify", "--set", &example("harmonic.json"), "--probe-bound", "10"]);
    let c = &r["result"]["classification"];
    assert_eq!(c["class"], "dense_locally_lattice");
    let table = c["table"].as_array().unwrap();
    assert_eq!(table.len(), 10);
    // gcd of the partial sums <= n: gcd of numerators over lcm of denominators
    let mut sums: Vec<(BigInt, BigInt)> = Vec::new();
    let (mut p, mut q) = (BigInt::from(0), BigInt::from(1));
    for k in 1..200 {
        p = p * k + &q;
        q *= k;
        let g = p.gcd(&q);
        p /= &g;
        q /= &g;
        sums.push((p.clone(), q.clone()));
    }
    for entry in &table[..4] {
        let n = entry["n"].as_i64().unwrap();
        let below: Vec<&(BigInt, BigInt)> = sums.iter().filter(|(p, q)| p <= &(q * n)).collect();
        let num = below.iter().fold(BigInt::from(0), |g, (p, _)| g.gcd(p));
        let den = below.iter().fold(BigInt::from(1), |l, (_, q)| l.lcm(q));
        let g = num.gcd(&den);
        assert_eq!(entry["lambda"], format!("{}/{}", num / &g, den / &g), "n = {n}");
    }
    assert_eq!(table[1]["lambda"], "1/6");
}

#[test]
fn verify_suite_passes_with_counts() {
    let r = report(&["verify", "--suite", "all", "--seed", "7"]);
    assert_eq!(r["config"]["seed"], 7);
    assert_eq!(r["result"]["failed"], 0);
    let inv = r["result"]["invariants"].as_array().unwrap();
    assert!(inv.len() >= 9);
    assert!(inv.iter().all(|i| i["passed"] == i["cases"] && i["cases"].as_u64().unwrap() > 0));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["verify", "--seed", "11", "--cases", "6"],
        vec!["regularize", "--windows", "WINDOWS", "--set", "SET"],
        vec!["an", "--spec", "AN", "--paths"],
    ] {
        let (w, s, a) = (example("sparse-windows.json"), example("one-sqrt2.json"), example("an.json"));
        let args: Vec<&str> = args
            .iter()
            .map(|x| match *x {
                "WINDOWS" => w.as_str(),
                "SET" => s.as_str(),
                "AN" => a.as_str(),
                other => other,
            })
            .collect();
        let mut bytes = Vec::new();
        for i in 0..2 {
            let out = dir.path().join(format!("{}-{i}.json", args[0]));
            let mut full = args.clone();
            let o = out.to_string_lossy().into_owned();
            full.extend(["--out", &o]);
            assert!(lacuna(&full).status.success(), "{full:?}");
            bytes.push(std::fs::read(&out).unwrap());
        }
        assert_eq!(bytes[0], bytes[1], "{args:?}");
    }
}

#[test]
fn exit_codes_follow_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = lacuna(&["classify", "--set", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "Json");

    let out = lacuna(&["classify", "--set", r#"{"kind": "finite", "elements": ["1", "pi"]}"#]);
    assert_eq!(out.status.code(), Some(2));

    let out = lacuna(&["tile", "--t", "1/2", "--set", &example("one-threehalves.json")]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!((error_of(&out)["module"].clone(), error_of(&out)["kind"].clone()), ("semigroup".into(), "NotInSemigroup".into()));

    let out = lacuna(&["threshold", "--set", "3/2,3", "--epsilon", "1/4"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_of(&out)["kind"], "NotDense");

    let out = lacuna(&["classify", "--set", r#"{"kind": "harmonic_partial_sums", "max_index": 100}"#, "--probe-bound", "10"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_of(&out)["kind"], "CutoffExceeded");

    let out = lacuna(&["dyadic", "--gamma", "sqrt2", "--m0", "300", "--bits", "64"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_of(&out)["kind"], "PrecisionExhausted");
}

#[test]
fn regularize_writes_trace_and_regular_output() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let r = report(&[
        "regularize",
        "--windows",
        &example("sparse-windows.json"),
        "--set",
        &example("one-sqrt2.json"),
        "--trace-out",
        trace.to_str().unwrap(),
    ]);
    for w in r["result"]["windows"].as_array().unwrap() {
        assert_eq!(w["invariants"]["violations"].as_array().unwrap().len(), 0);
        assert!(w["stages"].as_u64().unwrap() <= 8);
    }
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    let stages = t["traces"][0]["trace"]["stages"].as_array().unwrap();
    assert!(!stages.is_empty());
    assert!(stages[0]["eps"].is_string());
}

#[test]
fn precision_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_lacuna"))
        .args(["tile", "--t", "4", "--set", "1,3/2"])
        .env("LACUNA_PRECISION_BITS", "512")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["config"]["precision_bits"], 512);
    let r = report(&["tile", "--t", "4", "--set", "1,3/2", "--precision-bits", "128"]);
    assert_eq!(r["config"]["precision_bits"], 128);
}

#[test]
fn every_subcommand_runs_on_the_shipped_examples() {
    let cases: Vec<Vec<String>> = vec![
        vec!["an".into(), "--spec".into(), example("an.json")],
        vec!["tame-constant".into(), "--spec".into(), example("tame-constant.json"), "--verify-extra".into(), "1".into()],
        vec!["blocks".into(), "--set".into(), example("family.json"), "--rank-max".into(), "0".into()],
        vec!["drive".into(), "--windows".into(), example("lattice-flow.json"), "--set".into(), example("one-threehalves.json")],
        vec!["drive".into(), "--windows".into(), example("harmonic-flow.json"), "--set".into(), example("harmonic.json"), "--probe-bound".into(), "4".into()],
        vec!["circle".into(), "--length".into(), "7/2".into(), "--lambda".into(), "1/2".into(), "--set".into(), example("one-threehalves.json")],
        vec!["dyadic".into(), "--gamma".into(), "golden".into(), "--m0".into(), "50".into()],
        vec!["obstruction".into(), "--set".into(), example("harmonic.json"), "--alpha".into(), "sqrt2".into(), "--n-max".into(), "3".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = report(&args);
        assert_eq!(r["operation"], args[0]);
        assert!(r["tag"].as_str().unwrap().contains('.'));
        assert!(r["version"].is_string());
    }
    let r = report(&["an", "--spec", &example("an.json")]);
    let totals: Vec<&str> = r["result"]["totals"].as_array().unwrap().iter().map(|t| t["total"].as_str().unwrap()).collect();
    // steps 7/4, 2, 9/4 three times then 3, 13/4, all partial deviations below 1/2
    let mut expect = std::collections::BTreeSet::new();
    for a in [7, 8, 9] {
        for b in [7, 8, 9] {
            for c in [7, 8, 9] {
                for d in [12, 13] {
                    let devs = [a - 8, a + b - 16, a + b + c - 24, a + b + c + d - 36];
                    if devs.iter().all(|x: &i32| x.abs() < 2) {
                        expect.insert(a + b + c + d);
                    }
                }
            }
        }
    }
    let expect: Vec<String> = expect
        .into_iter()
        .map(|q| {
            let g = q.gcd(&4);
            format!("{}/{}", q / g, 4 / g)
        })
        .collect();
    assert_eq!(totals, expect);
    let r = report(&["circle", "--length", "7/2", "--lambda", "1/2"]);
    assert_eq!(r["result"]["lambda_section"], true);
}
