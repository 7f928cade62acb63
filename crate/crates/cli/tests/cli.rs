use std::process::{Command, Output};

fn superstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superstar")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_twistor_space() {
    let o = superstar(&["verify", "P3|4"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().any(|l| l == "comm z1 z2 = 2*hbar*l1*l2 : pass"), "{text}");
    assert!(text.lines().any(|l| l == "anti xi1 xi1 = hbar*l1^2 + hbar*l2^2 : pass"), "{text}");
}

#[test]
fn verify_from_file_matches_builtin() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../models/wp_1_3.model");
    let a = superstar(&["verify", path, "--sequential"]);
    let b = superstar(&["verify", "WP[1,3]"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn weighted_cy() {
    let o = superstar(&["cy", "--weighted", "1", "1", "1", "1", "--", "2", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "index 0\nCalabi-Yau: yes\n");
    let o = superstar(&["cy", "--ambitwistor", "2"]);
    assert_eq!(stdout(&o), "index (1, 1)\nCalabi-Yau: no\n");
}

#[test]
fn ambitwistor_y_commute() {
    let o = superstar(&["comm", "L5|6", "--a", "Y1", "--b", "Y2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
    let o = superstar(&["comm", "L5|6", "--a", "X1", "--b", "Y1"]);
    assert_eq!(stdout(&o), "hbar*l2*m2\n");
}

#[test]
fn star_prints_the_product() {
    let o = superstar(&["star", "P3|4", "--lhs", "xi1", "--rhs", "xi1"]);
    assert_eq!(stdout(&o), "1/2*hbar*l1^2 + 1/2*hbar*l2^2\n");
}

#[test]
fn associativity_failure_exits_one() {
    let o = superstar(&["verify", "T1-cotangent", "--quiet"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.contains(": fail") || l.starts_with("T1-cotangent:")), "{text}");
    assert!(text.contains("contract associativity : fail"), "{text}");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec!["verify", "nope"],
        vec!["star", "P3|4", "--lhs", "z1 z2", "--rhs", "1"],
        vec!["comm", "P3|4", "--a", "1/z1", "--b", "1"],
        vec!["cy", "--projective", "3"],
    ] {
        let o = superstar(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn bad_model_file_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.model");
    std::fs::write(&path, "[model]\nname = bad\n[variables]\nx even\n[bivector]\nx y := 1\n").unwrap();
    let o = superstar(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.model:6:3: unknown variable `y`"), "{err}");
}

#[test]
fn json_and_text_agree() {
    let text = superstar(&["verify", "WP[4,0]"]);
    let json = superstar(&["verify", "WP[4,0]", "--json"]);
    assert_eq!(text.status.code(), json.status.code());
    let human: Vec<String> = stdout(&text).lines().map(str::to_string).collect();
    let records: Vec<serde_json::Value> = stdout(&json).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(human.len(), records.len() + 1);
    for (line, rec) in human.iter().zip(&records) {
        let id = rec["check_id"].as_str().unwrap();
        let status = rec["status"].as_str().unwrap();
        assert!(line.starts_with(id), "{line} vs {id}");
        assert!(line.contains(&format!(": {status}")), "{line} vs {status}");
    }
}

#[test]
fn output_is_deterministic() {
    let a = superstar(&["verify", "L5|6"]);
    let b = superstar(&["verify", "L5|6", "--sequential"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn list_builtins() {
    let o = superstar(&["list-builtins"]);
    let names: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(names, superstar::models::builtin_names().iter().map(|s| s.to_string()).collect::<Vec<_>>());
}
