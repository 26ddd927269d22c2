use agnorm_web::{decompose, norm, symset};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn norm_export_matches_closed_form() {
    let v = parse(&norm("cyclic:4", r#"{"subset":[0,1]}"#));
    assert!((v["a_norm"].as_f64().unwrap() - (1.0 + 2f64.sqrt()) / 2.0).abs() < 1e-12);
    assert_eq!(v["singular_values"].as_array().unwrap().len(), 4);
}

#[test]
fn symset_export_on_subgroup() {
    let v = parse(&symset("dihedral:8", "0,1,2,3", 0.9));
    assert_eq!(v["sym"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(v["is_subgroup"], true);
    assert_eq!(v["labels"].as_array().unwrap().len(), 4);
}

#[test]
fn decompose_export() {
    let v = parse(&decompose("symmetric:3", r#"{"subset":[0,1,2]}"#));
    assert_eq!(v["complete"], true);
    assert_eq!(v["terms"].as_array().unwrap().len(), 1);
}

#[test]
fn errors_are_json() {
    assert!(parse(&norm("cyclic:4", "{")).get("error").is_some());
    assert!(parse(&norm("cyclic:1024", "[1]"))["error"].as_str().unwrap().contains("limit"));
    assert!(parse(&symset("cyclic:4", "0", 1.5)).get("error").is_some());
    assert!(parse(&decompose("cyclic:4", "[0.5,0,0,0]")).get("error").is_some());
}
