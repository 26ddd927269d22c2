use std::process::{Command, Output};

use serde_json::Value;

fn agnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agnorm"))
        .args(args)
        .env_remove("AGNORM_CAP_N")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn norm_of_two_point_set_in_cyclic_four() {
    let out = agnorm(&["norm", "--group", "cyclic:4", "--function", r#"{"subset":[0,1]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    // DFT oracle: |1 + e^{-iπk/2}|/4 summed over k.
    let oracle: f64 = (0..4)
        .map(|k| {
            let t = -std::f64::consts::FRAC_PI_2 * k as f64;
            ((1.0 + t.cos()).powi(2) + t.sin().powi(2)).sqrt() / 4.0
        })
        .sum();
    assert!((v["a_norm"].as_f64().unwrap() - oracle).abs() < 1e-12);
    assert!((v["a_norm"].as_f64().unwrap() - 1.2071067).abs() < 1e-7);
}

#[test]
fn decompose_alternating_subgroup() {
    let out = agnorm(&["decompose", "--group", "symmetric:3", "--function", r#"{"subset":[0,1,2]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["z"], 1);
    assert_eq!(terms[0]["subgroup"], serde_json::json!([0, 1, 2]));
    assert!(v["norms"].as_array().unwrap().len() >= 2);
}

#[test]
fn decompose_terms_input_roundtrip() {
    let f = r#"{"terms":[{"z":2,"subgroup":[0,4],"rep":1},{"z":-1,"subgroup":[0,1,2,3,4,5,6,7]}]}"#;
    let out = agnorm(&["decompose", "--group", "dihedral:16", "--function", f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let mut sum = vec![0i64; 16];
    for t in v["terms"].as_array().unwrap() {
        let z = t["z"].as_i64().unwrap();
        let rep = t["rep"].as_u64().unwrap() as usize;
        let h: Vec<usize> = t["subgroup"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect();
        // Left coset rep·H in dihedral:16, where index k + 8j is r^k s^j.
        let mul = |a: usize, b: usize| {
            let (ka, ja, kb, jb) = (a % 8, a / 8, b % 8, b / 8);
            let k = if ja == 0 { (ka + kb) % 8 } else { (ka + 8 - kb) % 8 };
            k + 8 * ((ja + jb) % 2)
        };
        for x in h {
            sum[mul(rep, x)] += z;
        }
    }
    let mut expect = vec![-1i64; 8];
    expect.extend([0; 8]);
    expect[1] += 2;
    expect[5] += 2;
    assert_eq!(sum, expect);
}

#[test]
fn verify_decompmass_passes() {
    let out = agnorm(&["verify", "--suite", "decompmass", "--group", "dihedral:8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(agnorm(&["verify", "--suite", "nope", "--group", "cyclic:4"]).status.code(), Some(2));
    assert_eq!(agnorm(&["norm", "--group", "cyclic:4"]).status.code(), Some(2));
    assert_eq!(agnorm(&["norm", "--group", "bogus", "--function", "[1]"]).status.code(), Some(2));
    assert_eq!(agnorm(&["norm", "--group", "cyclic:4", "--function", "{"]).status.code(), Some(2));
    let out = agnorm(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("decompose"));
}

#[test]
fn audit_failure_exits_one() {
    // Non-symmetric input to the weak stage is a usage error; a set whose
    // energy is too low for the Fournier audit fails a check instead.
    let out = agnorm(&["freiman", "--group", "cyclic:7", "--set", "0,1,3", "--stage", "fournier"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(json(&out)["error"].as_str().unwrap().contains("audit"));
}

#[test]
fn order_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_agnorm"))
        .args(["group", "--group", "cyclic:64"])
        .env("AGNORM_CAP_N", "32")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit"));
    assert_eq!(agnorm(&["group", "--group", "cyclic:64"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic_and_file_target_works() {
    let args = ["freiman", "--group", "cyclic:64", "--set", "0,1,2,3,61,62,63", "--stage", "correlation", "--seed", "5"];
    let a = agnorm(&args);
    let b = agnorm(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let dir = std::env::temp_dir().join(format!("agnorm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let mut with_file: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    with_file.extend(["--json", &p]);
    let c = agnorm(&with_file);
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn other_subcommands() {
    let g = json(&agnorm(&["group", "--group", "symmetric:3", "--table"]));
    assert_eq!(g["order"], 6);
    assert_eq!(g["subgroups"], 6);
    assert_eq!(g["table"][0], serde_json::json!([0, 1, 2, 3, 4, 5]));

    let s = json(&agnorm(&["spectrum", "--group", "quaternion:8", "--function", r#"{"subset":[0,1]}"#, "--delta", "0.1"]));
    assert_eq!(s["basis"].as_array().unwrap().len(), 8);
    assert!(s["spectrum_dim"].as_u64().unwrap() >= 1);

    let y = json(&agnorm(&["symset", "--group", "cyclic:8", "--set", "[0,2,4,6]", "--eta", "0.5"]));
    assert_eq!(y["sym"], serde_json::json!([0, 2, 4, 6]));

    let p = agnorm(&["pair", "--group", "cyclic:32", "--set", "0,1,31", "--r", "1", "--eps", "0.5"]);
    assert_eq!(p.status.code(), Some(0));
    assert_eq!(json(&p)["report"]["valid"], true);
    let explicit = agnorm(&["pair", "--group", "cyclic:8", "--pair", r#"{"ground":[0,2,4,6],"perturb":[0,4]}"#]);
    assert_eq!(json(&explicit)["report"]["valid"], true);

    let sys = agnorm(&["freiman", "--group", "cyclic:128", "--set", "0,1,2,3,4,5,6,7,8,9,10,118,119,120,121,122,123,124,125,126,127", "--stage", "system"]);
    assert_eq!(sys.status.code(), Some(0), "{}", String::from_utf8_lossy(&sys.stdout));
}
