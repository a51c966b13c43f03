use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tq")).args(args).env_remove("TQ_PRECISION").output().expect("tq runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn catalog_show_cw2_has_nine_terms() {
    let out = tq(&["catalog", "show", "CW2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["kind"], "tensor");
    assert_eq!(v["terms"].as_array().unwrap().len(), 9);
    assert_eq!(v["config"]["command"], "catalog show");
    assert_eq!(v["config"]["args"]["name"], "CW2");
}

#[test]
fn bounds_profile_for_seven() {
    let out = tq(&["bounds", "profile", "--q", "7"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let w = v["omega_lb_eps1"].as_f64().unwrap();
    assert!((w - 2.1413).abs() < 1e-4, "{w}");
    assert!(v["decimal"]["omega_lb_eps1"].as_str().unwrap().starts_with("2.14135069"));
    assert_eq!(v["config"]["precision"], 50);
}

#[test]
fn precision_comes_from_the_environment_unless_flagged() {
    let run = |flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_tq"));
        c.args(["bounds", "profile", "--q", "3"]).env("TQ_PRECISION", "20");
        if let Some(f) = flag {
            c.args(["--precision", f]);
        }
        json(&c.output().unwrap())
    };
    assert_eq!(run(None)["config"]["precision"], 20);
    assert_eq!(run(Some("30"))["config"]["precision"], 30);
}

#[test]
fn builtin_degenerations_exit_codes() {
    assert_eq!(code(&tq(&["verify", "degeneration", "--builtin", "cw", "--q", "3"])), 0);
    assert_eq!(code(&tq(&["verify", "degeneration", "--builtin", "strassen", "--q", "4"])), 0);
    let bad = tq(&["verify", "degeneration", "--builtin", "strassen-as-printed", "--q", "2"]);
    assert_eq!(code(&bad), 1);
    let v = json(&bad);
    assert_eq!(v["report"]["verified"], false);
    assert!(!v["report"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn degeneration_files_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d.json");
    let d = tq_core::catalog::cw_degeneration(2).unwrap();
    std::fs::write(&file, tq_core::io::degeneration_to_json(&d).to_string()).unwrap();
    assert_eq!(code(&tq(&["verify", "degeneration", path(&file)])), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&tq(&["frobnicate"])), 2);
    assert_eq!(code(&tq(&["bounds", "profile"])), 2);
    assert_eq!(code(&tq(&["catalog", "show", "nonsense"])), 2);
    assert_eq!(code(&tq(&["catalog", "show", "T3", "--format", "csv"])), 2);
    let out = tq(&["verify", "degeneration"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn rank_expressions_verify() {
    for (p, ring) in [("5", "cyclotomic"), ("6", "prime")] {
        let out = tq(&["verify", "rank-expr", "--p", p, "--ring", ring]);
        assert_eq!(code(&out), 0, "{p} {ring}");
        assert_eq!(json(&out)["expansion_equals_tensor"], true);
    }
    // GF(4) is not a prime field
    assert_eq!(code(&tq(&["verify", "rank-expr", "--p", "3", "--ring", "prime"])), 2);
}

#[test]
fn power_output_is_a_tensor_document() {
    let dir = tempfile::tempdir().unwrap();
    let t3 = dir.path().join("t3.json");
    assert_eq!(code(&tq(&["catalog", "show", "T3", "--out", path(&t3)])), 0);
    let out = tq(&["power", "--tensor", path(&t3), "--n", "2"]);
    assert_eq!(code(&out), 0);
    let t = tq_core::io::tensor_from_json(&json(&out)).unwrap();
    assert_eq!(t.len(), 81);
    assert_eq!(code(&tq(&["power", "--tensor", "T3", "--n", "20"])), 2);
}

#[test]
fn construction_is_deterministic_and_records_its_seed() {
    let args = ["construct", "indep", "--q", "2", "--m", "2", "--n", "4", "--seed", "11", "--modulus", "5", "--emit-kills"];
    let (a, b) = (tq(&args), tq(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["config"]["args"]["seed"], "11");
    assert_eq!(v["hash"]["seed"], 11);
    assert_eq!(v["balance"]["l2"], 24);
    let sweep = json(&tq(&["construct", "indep", "--q", "2", "--m", "2", "--n", "4", "--seeds", "10", "--modulus", "5"]));
    assert_eq!(sweep["runs"].as_array().unwrap().len(), 10);
}

#[test]
fn transfer_with_oracle_kills() {
    let out = tq(&["transfer", "--degen", "cw:1", "--n", "2", "--oracle-cap", "36"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["pigeonhole_holds"], true);
    assert_eq!(v["input_count"], 4);
    assert!(v["count"].as_u64().unwrap() >= 1);
}

#[test]
fn sumfree_extract_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let kills = dir.path().join("k.json");
    let set = dir.path().join("s.json");
    std::fs::write(&kills, r#"{"x": ["1"], "y": ["1"], "z": ["1"]}"#).unwrap();
    assert_eq!(code(&tq(&["sumfree", "extract", "--p", "2", "--N", "1", "--kills", path(&kills), "--out", path(&set)])), 0);
    let out = tq(&["sumfree", "check", "--file", path(&set)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["size"], 1);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"q": 3, "n": 1, "triples": [[[0],[0],[0]], [[1],[2],[0]]]}"#).unwrap();
    let out = tq(&["sumfree", "check", "--file", path(&bad)]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["sumfree"], false);

    // T_2 with nothing killed is not independent
    let none = dir.path().join("none.json");
    std::fs::write(&none, "{}").unwrap();
    assert_eq!(code(&tq(&["sumfree", "extract", "--p", "2", "--N", "1", "--kills", path(&none)])), 1);
}

#[test]
fn curve_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let args = ["bounds", "curve", "--qmin", "2", "--qmax", "16", "--eps", "1,0.5", "--format", "csv", "--out", path(&csv)];
    assert_eq!(code(&tq(&args)), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(body[0].starts_with("q,prime_power,rho,gamma,omega_lb_eps1,alpha_ub"));
    assert_eq!(body.len(), 1 + 10, "{text}");
    assert!(text.lines().nth(1).unwrap().contains("\"command\":\"bounds curve\""));
    let v = json(&tq(&["bounds", "curve", "--qmax", "12", "--mode", "general"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 11);
}

#[test]
fn pipeline_verdicts() {
    let v = tq(&["pipeline", "--p", "7", "--N", "1", "--omega", "2.10"]);
    assert_eq!(code(&v), 1);
    assert_eq!(json(&v)["verdict"], "inconsistent");
    assert_eq!(code(&tq(&["pipeline", "--p", "7", "--N", "1", "--omega", "2.15"])), 0);
    let f = json(&tq(&["pipeline", "--p", "2", "--N", "2", "--F", "1", "--G", "2"]));
    assert_eq!(f["verdict"], "consistent");
    let chain = tq(&["pipeline", "--p", "3", "--N", "1", "--degen", "cw:1"]);
    assert_eq!(code(&chain), 0);
    assert_eq!(json(&chain)["chain"]["sumfree_bound"]["within"], true);
    assert_eq!(code(&tq(&["pipeline", "--p", "3", "--N", "1"])), 2);
}

#[test]
fn config_file_presets_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# profile defaults\nq = 5\nprecision = 30\n").unwrap();
    let v = json(&tq(&["bounds", "profile", "--config", path(&cfg)]));
    assert_eq!(v["q"], 5);
    assert_eq!(v["config"]["precision"], 30);
    let v = json(&tq(&["bounds", "profile", "--config", path(&cfg), "--q", "3", "--precision", "40"]));
    assert_eq!(v["q"], 3);
    assert_eq!(v["config"]["precision"], 40);
    // the merged run is the same artifact as the explicit one
    let explicit = tq(&["bounds", "profile", "--q", "5", "--precision", "30"]);
    assert_eq!(tq(&["bounds", "profile", "--config", path(&cfg)]).stdout, explicit.stdout);
    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    assert_eq!(code(&tq(&["bounds", "profile", "--q", "2", "--config", path(&cfg)])), 2);
}

#[test]
fn catalog_list_reports_builtin_status() {
    let v = json(&tq(&["catalog", "list"]));
    let degs = v["degenerations"].as_array().unwrap();
    assert_eq!(degs.len(), 24);
    for d in degs {
        let printed = d["name"].as_str().unwrap().ends_with("as-printed");
        assert_eq!(d["verified"], !printed, "{d}");
    }
}
