use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semistab"))
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn replay_ok(doc: &Path) -> serde_json::Value {
    let out = run(&["--replay", doc.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["ok"], true);
    v
}

#[test]
fn destabilized_pair_is_success_with_certificate() {
    let v = json(&run(&["pair-check", &fixture("pair_square_quartic.json")]));
    assert_eq!(v["verdict"]["status"], "DESTABILIZED");
    assert_eq!(v["verdict"]["certificate"]["u"]["u"], serde_json::json!([1, -1]));
    assert_eq!(v["verdict"]["certificate"]["margin"], "2");
    assert_eq!(v["seed"], 1729);
}

#[test]
fn collinear_hull_has_two_vertices() {
    let v = json(&run(&["hull", &fixture("hull_collinear.json")]));
    assert_eq!(v["polytope"]["vertices"].as_array().unwrap().len(), 2);
}

#[test]
fn inline_json_input() {
    let v = json(&run(&["hull", r#"{"points": [["0"], ["3"], ["1"]]}"#]));
    assert_eq!(v["polytope"]["vertices"], serde_json::json!([["0"], ["3"]]));
}

#[test]
fn small_enumeration_has_no_mismatch() {
    let v = json(&run(&["binary", "--enumerate", "e=2", "d=4"]));
    assert_eq!(v["mismatches"], 0);
    assert_eq!(v["instances"], 21 * 126);
}

#[test]
fn every_document_replays() {
    let cases: Vec<(&str, Vec<String>)> = vec![
        ("pair.json", vec!["pair-check".into(), fixture("pair_square_quartic.json")]),
        (
            "pair_frames.json",
            vec!["pair-check".into(), fixture("pair_equal.json"), "--frames".into(), fixture("frames_shear.json")],
        ),
        ("hm.json", vec!["hm-check".into(), fixture("hm_x3y.json")]),
        ("hm_factored.json", vec!["hm-check".into(), "--factored".into(), "[0:1]^3 * [1:0]".into()]),
        ("hull.json", vec!["hull".into(), fixture("hull_containment.json")]),
        ("slope.json", vec!["slope".into(), fixture("slope_square_quartic.json")]),
        ("binary.json", vec!["binary".into(), "--f".into(), "[1:1]".into(), "--g".into(), "[1:1]^3".into()]),
        ("enum.json", vec!["binary".into(), "--enumerate".into(), "e=1".into(), "d=2".into()]),
        ("conic.json", vec!["curve".into(), fixture("curve_fermat_conic.json")]),
    ];
    for (name, args) in cases {
        let path = scratch(name);
        let out = bin().args(&args).args(["-o", path.to_str().unwrap()]).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        replay_ok(&path);
    }
}

#[test]
fn tampered_certificate_fails_replay() {
    let path = scratch("tampered.json");
    let out = run(&["pair-check", &fixture("pair_square_quartic.json")]);
    let mut v = json(&out);
    v["verdict"]["certificate"]["margin"] = "3".into();
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(run(&["--replay", path.to_str().unwrap()]).status.code(), Some(3));

    v["verdict"]["certificate"]["margin"] = "2".into();
    v["w"]["terms"][0]["exps"] = serde_json::json!([3, 1]);
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(run(&["--replay", path.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["pair-check", &fixture("malformed.json")]).status.code(), Some(2));
    assert_eq!(run(&["pair-check", &fixture("does_not_exist.json")]).status.code(), Some(2));
    assert_eq!(run(&["binary", "--f", "[0:1", "--g", "[1:1]"]).status.code(), Some(2));
    let cusp = run(&["curve", &fixture("curve_cusp.json")]);
    assert_eq!(cusp.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&cusp.stderr).contains("smooth"));
    // pair of forms in different numbers of variables
    let mixed = r#"{"v": {"vars": 2, "variance": "co", "terms": [{"exps": [1, 0], "re": "1"}]},
                    "w": {"vars": 3, "variance": "co", "terms": [{"exps": [1, 0, 0], "re": "1"}]}}"#;
    assert_eq!(run(&["pair-check", mixed]).status.code(), Some(3));
}

#[test]
fn energy_reports() {
    let v = json(&run(&["energy", &fixture("energy_sample.json")]));
    assert!(v["distance_residual"].as_f64().unwrap() < 1e-9);
    let scan = json(&run(&["energy", &fixture("energy_sample.json"), "--scan", "--samples", "4", "--seed", "3"]));
    assert_eq!(scan["report"]["config"]["seed"], 3);
    assert_eq!(scan["report"]["rows"].as_array().unwrap().len(), 4);
}
