use serde_json::Value;
use tilesemi_web::{act_json, ap_complex_json, list_systems, supertile_svg};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn lists_every_builtin() {
    let v = parse(&list_systems());
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"fibonacci") && names.contains(&"penrose"));
    let fib = v.as_array().unwrap().iter().find(|s| s["name"] == "fibonacci").unwrap();
    assert_eq!(fib["prototiles"], serde_json::json!(["a", "b", "c", "d"]));
}

#[test]
fn draws_supertiles() {
    let svg = supertile_svg("halfhex", "p0", 2).unwrap();
    assert_eq!(svg.matches("class=\"tile\"").count(), 16);
    assert_eq!(svg.matches("class=\"outline\"").count(), 1);
    // Levels are capped to keep the page responsive.
    assert_eq!(supertile_svg("fibonacci", "a", 50).unwrap(), supertile_svg("fibonacci", "a", 6).unwrap());
    assert!(supertile_svg("fibonacci", "z", 1).is_err());
    assert!(supertile_svg("nope", "a", 1).is_err());
}

#[test]
fn runs_the_action() {
    let v = parse(&act_json("fibonacci", "[a,P_ba,b]", "(b,d)(d,b)(b,d)(d,a)(a,b)").unwrap());
    assert_eq!(v["outcome"], "evaluated");
    assert_eq!(v["output"], "(a,c)(c,a)(a,b)(b,d)(d,b)");
    let v = parse(&act_json("fibonacci", "[a,P_ba,b]", "(b,d)(d,b)(b,d)(d,b)(b,d)").unwrap());
    assert_eq!(v["outcome"], "need more input");
    assert_eq!(v["pending"], "(b,d)");
    assert!(act_json("fibonacci", "[a,P_ba,b]", "(b,d)(a,c)").is_err());
}

#[test]
fn builds_the_complex() {
    let v = parse(&ap_complex_json("fibonacci").unwrap());
    assert_eq!(v["cells"], serde_json::json!([3, 4]));
    assert_eq!(v["euler"], -1);
    assert_eq!(v["well_defined"], true);
    assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
}
