use std::io::Write;
use std::process::{Command, Output};

use arc_contact::symcore::parse_rational;
use serde_json::{json, Value};

fn scenario_path(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arc-contact"))
        .args(args)
        .env_remove("ARC_CONTACT_PREC")
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    (v, out.status.code().unwrap())
}

fn temp_scenario(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".scn").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn no_floats(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_i64() || n.is_u64(),
        Value::Array(a) => a.iter().all(no_floats),
        Value::Object(m) => m.values().all(no_floats),
        _ => true,
    }
}

#[test]
fn contact_json_record() {
    let (v, code) = run_json(&["contact", &scenario_path("ex_xy_z5.scn"), "--arc", "phi"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "contact");
    assert_eq!(v["errors"], json!([]));
    assert_eq!(
        v["results"][0],
        json!({"ord": "1", "r": "2", "r_bar": "2", "rho": 2, "rho_bar": "2"})
    );
}

#[test]
fn nash_table() {
    let out = run(&["nash", &scenario_path("ex_xy_z5.scn"), "--arc", "phi"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let ms: Vec<&str> = text
        .lines()
        .skip(1)
        .take_while(|l| !l.starts_with("rho"))
        .map(|l| l.split_whitespace().last().unwrap())
        .collect();
    assert_eq!(ms, ["2", "2", "1"]);
    assert!(text.contains("rho = 2"));
}

#[test]
fn isolated_verdicts() {
    let (v, code) = run_json(&["isolated", &scenario_path("ex1.scn")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"][0]["verdict"], "ISOLATED");
    assert_eq!(v["results"][0]["q"], 3);
    let (v, code) = run_json(&["isolated", &scenario_path("ex2.scn")]);
    assert_eq!(code, 0);
    let r = &v["results"][0];
    assert_eq!(r["verdict"], "NOT_ISOLATED");
    assert_eq!(r["axis"], "z");
    assert_eq!(r["witness"]["family"], "phiN");
    assert_eq!(r["witness"]["rows"][9]["r_bar"], "22");
}

#[test]
fn family_with_pin() {
    let (v, code) = run_json(&[
        "family",
        &scenario_path("ex2.scn"),
        "--auto-axis",
        "z",
        "--pin",
        "s=2*N+3",
    ]);
    assert_eq!(code, 0);
    let r = &v["results"][0];
    assert_eq!(r["images"]["x"], "t^(2*N+2)");
    assert_eq!(r["images"]["y"], "t^(2*N+5)");
    assert_eq!(r["r_bar_increasing"], true);
}

#[test]
fn closure_and_sample() {
    let (v, code) = run_json(&["closure", &scenario_path("ex_xy_z5.scn")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"][0]["ord"], "1");
    assert_eq!(v["results"][0]["sharp_bound"]["bound"], "5/2");
    let (v, code) = run_json(&["sample", &scenario_path("ex_xy_z5.scn"), "--cap", "12"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"][0]["max"], "5/2");
    assert_eq!(v["results"][0]["min"], "1");
}

#[test]
fn verify_passes_on_examples() {
    for name in ["ex_xy_z5.scn", "ex1.scn", "ex2.scn"] {
        let (v, code) = run_json(&["verify", &scenario_path(name)]);
        assert_eq!(code, 0, "{name}: {v}");
        for rec in v["results"].as_array().unwrap() {
            assert_eq!(rec["passed"], true, "{name}: {rec}");
        }
    }
}

#[test]
fn reports_are_exact_and_round_trip() {
    for args in [
        vec!["sample", "ex_xy_z5.scn"],
        vec!["family", "ex2.scn", "--family", "phiN"],
        vec!["verify", "ex1.scn"],
    ] {
        let path = scenario_path(args[1]);
        let mut full = args.clone();
        full[1] = &path;
        let (v, _) = run_json(&full);
        assert!(no_floats(&v), "{v}");
        let text = serde_json::to_string(&v).unwrap();
        let again: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(again, v);
    }
    let (v, _) = run_json(&["family", &scenario_path("ex2.scn"), "--family", "phiN"]);
    for row in v["results"][0]["rows"].as_array().unwrap() {
        let r = parse_rational(row["r_bar"].as_str().unwrap()).unwrap();
        let n = row["n"].as_i64().unwrap();
        assert_eq!(r, arc_contact::symcore::rat(2 * n + 2, 1));
    }
}

#[test]
fn json_is_byte_identical_across_runs_and_seeds() {
    let path = scenario_path("ex1.scn");
    let a = run(&["sample", &path, "--json"]).stdout;
    let b = run(&["sample", &path, "--json"]).stdout;
    let c = run(&["sample", &path, "--json", "--seed", "17"]).stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn parse_errors_exit_one() {
    let f = temp_scenario("vars x y\npoly f = x*y +\n");
    let (v, code) = run_json(&["closure", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["errors"][0]["name"], "ParseError");
    assert!(v["errors"][0]["message"].as_str().unwrap().starts_with("line 2, column"));
    let out = run(&["contact"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["family", &scenario_path("ex2.scn")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn domain_errors_exit_two() {
    let f = temp_scenario(
        "vars x y z\npoly f = y^2 - z^3\narc off : x -> t, y -> t^2, z -> t\narc axis : x -> t\n",
    );
    let p = f.path().to_str().unwrap();
    let (v, code) = run_json(&["contact", p, "--arc", "off"]);
    assert_eq!(code, 2);
    assert_eq!(v["errors"][0]["name"], "ArcNotOnVariety");
    let (v, code) = run_json(&["contact", p, "--arc", "axis"]);
    assert_eq!(code, 2);
    assert_eq!(v["errors"][0]["name"], "ArcInMaxMult");
    let out = run(&["contact", p, "--arc", "axis"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("ArcInMaxMult"));
}

#[test]
fn precision_sources_in_priority_order() {
    // the first chart divides by t + t^2, so the lifted images are truncated
    let text = "vars x y z\npoly f = x*y - z^5\n\
                arc a : x -> t^3, y -> t^2 + 5*t^3 + 10*t^4 + 10*t^5 + 5*t^6 + t^7, z -> t + t^2\n";
    let f = temp_scenario(text);
    let p = f.path().to_str().unwrap();
    let base = run(&["nash", p, "--arc", "a", "--json"]);
    assert_eq!(base.status.code(), Some(0));
    let env_low = Command::new(env!("CARGO_BIN_EXE_arc-contact"))
        .args(["nash", p, "--arc", "a", "--json"])
        .env("ARC_CONTACT_PREC", "1")
        .output()
        .unwrap();
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_arc-contact"))
        .args(["nash", p, "--arc", "a", "--json", "--prec", "64"])
        .env("ARC_CONTACT_PREC", "1")
        .output()
        .unwrap();
    assert_eq!(env_low.status.code(), Some(2));
    let low: Value = serde_json::from_slice(&env_low.stdout).unwrap();
    assert_eq!(low["errors"][0]["name"], "PrecisionExhausted");
    assert_eq!(flag_wins.stdout, base.stdout);
    let g = temp_scenario(&format!("{text}set prec 64\n"));
    let set_wins = Command::new(env!("CARGO_BIN_EXE_arc-contact"))
        .args(["nash", g.path().to_str().unwrap(), "--arc", "a", "--json"])
        .env("ARC_CONTACT_PREC", "1")
        .output()
        .unwrap();
    let base_json: Value = serde_json::from_slice(&base.stdout).unwrap();
    let set_json: Value = serde_json::from_slice(&set_wins.stdout).unwrap();
    assert_eq!(set_json["results"], base_json["results"]);
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("isolated"));
}
