use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilesemi")).args(args).env_remove("TILESEMI_DIGITS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../tilesemi/golden").join(format!("{name}.json"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../tilesemi/systems").join(format!("{name}.json"))
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["validate", "fibonacci"])), 0);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["validate", "no-such-system"])), 3);
    assert_eq!(code(&run(&["act", "fibonacci", "[a,P_zz,b]", "(b,d)"])), 4);
    assert_eq!(code(&run(&["alpha", "fibonacci", "(a,b)(a,c)"])), 4);
    assert_eq!(code(&run(&["rules", "fibonacci", "--compare", "/nonexistent/golden.json"])), 4);
    assert_eq!(code(&run(&["graph", "fibonacci", "--out", "/nonexistent/dir/graph.json"])), 9);
    let help = String::from_utf8(run(&["--help"]).stdout).unwrap();
    assert!(help.contains("Exit codes:"));
}

#[test]
fn json_output_is_byte_stable() {
    for args in [
        &["graph", "fibonacci", "--json"][..],
        &["nucleus", "fibonacci"],
        &["ap-map", "halfhex"],
        &["rules", "halfhex"],
        &["beta", "fibonacci", "...[(d,b)(b,d)]", "(d,b)(b,d)"],
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(code(&a), 0, "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(a.stdout.ends_with(b"}\n"));
    }
}

#[test]
fn config_files_and_builtins_agree() {
    let by_name = run(&["graph", "fibonacci", "--json"]);
    let by_path = run(&["graph", config("fibonacci").to_str().unwrap(), "--json"]);
    assert_eq!(json(&by_name)["edges"], json(&by_path)["edges"]);
    assert_eq!(json(&by_name)["edges"].as_array().unwrap().len(), 7);
}

#[test]
fn manifest_records_the_input_hash() {
    let dir = tempfile::tempdir().unwrap();
    let (out, manifest) = (dir.path().join("graph.dot"), dir.path().join("run.json"));
    let path = config("fibonacci");
    let o = run(&["graph", path.to_str().unwrap(), "--dot", "--out", out.to_str().unwrap(), "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let hex: String = {
        use sha2::Digest;
        sha2::Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    };
    assert_eq!(m["input"]["sha256"], Value::String(hex));
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["outputs"][0], Value::String(out.display().to_string()));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("digraph"));
}

#[test]
fn act_reports_the_worked_example() {
    let o = run(&["act", "fibonacci", "[a,P_ba,b]", "(b,d)(d,b)(b,d)(d,a)(a,b)"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["emitted"], "(a,c)(c,a)(a,b)(b,d)(d,b)");
    assert_eq!(j["residual"], "[b,P_b,b]");
}

#[test]
fn rules_compare_and_regenerate() {
    assert_eq!(code(&run(&["rules", "fibonacci", "--compare", golden("fibonacci").to_str().unwrap()])), 0);
    let dir = tempfile::tempdir().unwrap();
    let fresh = dir.path().join("fib.json");
    assert_eq!(code(&run(&["rules", "fibonacci", "--regenerate", fresh.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["rules", "fibonacci", "--compare", fresh.to_str().unwrap()])), 0);

    let mut g: Value = serde_json::from_str(&std::fs::read_to_string(golden("fibonacci")).unwrap()).unwrap();
    g["rules"][0]["emitted"] = Value::String("(a,c)".into());
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, serde_json::to_string(&g).unwrap()).unwrap();
    let o = run(&["rules", "fibonacci", "--compare", broken.to_str().unwrap()]);
    assert_eq!(code(&o), 6);
    let diff = &json(&o)["diff"];
    assert_eq!(diff["missing"].as_array().unwrap().len(), 1);
}

#[test]
fn broken_config_fails_validation() {
    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(config("fibonacci")).unwrap()).unwrap();
    cfg["rules"][0]["children"][1]["offset"] = serde_json::json!(["1"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 5);
    assert_eq!(json(&o)["stone_inflation"], false);
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(&run(&["validate", path.to_str().unwrap()])), 3);
}

#[test]
fn nucleus_contraction_and_complex() {
    let j = json(&run(&["nucleus", "fibonacci"]));
    assert_eq!((j["size"].as_u64(), j["closed"].as_bool()), (Some(24), Some(true)));
    assert_eq!(code(&run(&["contraction", "fibonacci", "[b,P_adb,a]"])), 0);
    let o = run(&["ap-complex", "fibonacci", "--dot"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().matches("--").count(), 4);
    let a = run(&["aeq", "fibonacci", "...[(c,a)(a,c)]", "...[(d,b)(b,d)]"]);
    assert_eq!(json(&a)["equivalent"], true);
    let a = json(&run(&["alpha", "fibonacci", "...[(d,b)(b,d)]"]));
    assert_eq!(a["address"]["tile"], "d");
    assert_eq!(a["exact"], true);
}

#[test]
fn render_svg() {
    let o = run(&["render", "fibonacci", "--what", "supertile", "--level", "3", "--digits", "6"]);
    assert_eq!(code(&o), 0);
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    // Level-3 supertiles of a, b, c and d hold 5 + 5 + 5 + 3 tiles.
    assert_eq!(svg.matches("class=\"tile\"").count(), 18);
    let o = run(&["render", "halfhex", "--what", "ap"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("<svg"));
    let o = run(&["render", "fibonacci", "--what", "patch", "--word", "(a,b)(b,d)(d,c)"]);
    assert_eq!(code(&o), 0);
    let narrow = Command::new(env!("CARGO_BIN_EXE_tilesemi")).args(["render", "fibonacci", "--level", "1"]).env("TILESEMI_DIGITS", "3").output().unwrap();
    assert!(String::from_utf8(narrow.stdout).unwrap().contains("1.618,"));
}
