use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omegalab")).args(args).env_remove("OMEGALAB_BUDGET_BITS").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn exact_map_h_is_certified_at_one_sixteenth() {
    let out = run(&["ict-check", "--system", &fixture("exact_map.json"), "--set", "H20", "--eps", "1/16"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["boxes"], 512);
    assert!(!v["certificates"].as_array().unwrap().is_empty());
}

#[test]
fn fixed_point_and_cycle_split_at_k2() {
    let out = run(&["ict-check", "--system", &fixture("goldenmean.json"), "--set", "fixed0+cycle01", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "no");
    assert_eq!(v["refuted_below"], "1/4");
}

#[test]
fn sofic_subsystem_passes_at_k4() {
    let out = run(&["ict-check", "--system", &fixture("bridged_loops.json"), "--set", &fixture("unbridged_loops.json"), "--k", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_rational_exits_3_with_empty_stdout() {
    let out = run(&["ict-check", "--system", &fixture("tent2.json"), "--set", "1/3", "--eps", "1/0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/0"));
}

#[test]
fn usage_errors_do_not_collide_with_unknown() {
    let out = run(&["ict-check", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn shadow_nest_example_hits_exactly() {
    let out = run(&["shadow", "--system", &fixture("tent2.json"), "--orbit", &fixture("po_nest.json"), "--eps", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["shadow"]["z"], "1/32");
    assert_eq!(v["verified"], true);
}

#[test]
fn shadowing_a_genuine_orbit_returns_its_start() {
    let out = run(&["shadow", "--system", &fixture("tent2.json"), "--orbit", &fixture("po_orbit.json"), "--eps", "1/16"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["shadow"]["z"], "2/7");
}

#[test]
fn orbit_near_turning_point_is_inconclusive() {
    let out = run(&["shadow", "--system", &fixture("tent2.json"), "--orbit", &fixture("po_orbit.json"), "--eps", "1/8"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["result"], "inconclusive");
}

#[test]
fn shadow_perturbed_orbit() {
    let out = run(&["shadow", "--system", &fixture("tent2.json"), "--orbit", &fixture("po_random.json"), "--eps", "1/8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verified"], true);
}

#[test]
fn overshoot_has_no_h_shadow() {
    let out = run(&["shadow", "--system", &fixture("tent_3_2.json"), "--orbit", &fixture("po_overshoot.json"), "--eps", "1/8"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["certificate"]["verdict"], "impossible");
    assert_eq!(v["certificate"]["range"]["hi"], "3/4");
}

#[test]
fn golden_mean_block_chain_is_spliced() {
    let out = run(&["shadow", "--system", &fixture("goldenmean.json"), "--orbit", &fixture("po_goldenmean.json")]);
    assert_eq!(out.status.code(), Some(0));
    let z = json(&out)["shadow"]["z"].as_str().unwrap().to_string();
    assert!(z.starts_with("010010") && !z.contains("11"));
}

#[test]
fn golden_mean_realization_stream() {
    let out = run(&["realize", "--system", &fixture("goldenmean.json"), "--set", "full", "--k", "4", "--length", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let prefix = v["realization"]["prefix"].as_str().unwrap();
    assert_eq!(prefix.len(), 500);
    assert!(!prefix.contains("11"));
}

#[test]
fn exact_map_h_is_not_realizable() {
    let out = run(&["realize", "--system", &fixture("exact_map.json"), "--set", "H20"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["verdict"], "not_realizable");
}

#[test]
fn sofic_subsystem_is_not_realizable() {
    let out = run(&["realize", "--system", &fixture("bridged_loops.json"), "--set", &fixture("unbridged_loops.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["verdict"], "not_realizable");
}

#[test]
fn fixed_point_nest_contains_the_point() {
    let out = run(&["realize", "--system", "tent2", "--set", "2/3", "--depth", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let last = v["realization"]["intervals"].as_array().unwrap().last().unwrap().clone();
    let lo: omegalab::Scalar = last["lo"].as_str().unwrap().parse().unwrap();
    let hi: omegalab::Scalar = last["hi"].as_str().unwrap().parse().unwrap();
    let p = omegalab::q(2, 3);
    assert!(lo <= p && p <= hi);
}

#[test]
fn all_example_bundles_pass() {
    let out = run(&["examples", "run-all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!((v["passed"].as_u64(), v["total"].as_u64()), (Some(3), Some(3)));
}

#[test]
fn unknown_example_is_input_error() {
    assert_eq!(run(&["examples", "run", "nope"]).status.code(), Some(3));
}

/// Non-fixed singletons are weakly incompressible but not chain transitive,
/// so the oracle reports them and exits 1; nothing else may disagree.
#[test]
fn oracle_mismatches_are_exactly_non_fixed_singletons() {
    let args = ["oracle", "wi-ict", "--n", "10", "--trials", "500", "--seed", "7"];
    let out = run(&args);
    let v = json(&out);
    let mismatches = v["mismatches"].as_u64().unwrap();
    assert_eq!(out.status.code(), Some(if mismatches == 0 { 0 } else { 1 }));
    assert_eq!(v["mismatch_classes"].get("other"), None);
    assert_eq!(v["invariance_failures"], 0);
    for m in v["mismatched_instances"].as_array().unwrap() {
        assert_eq!((m["wi"].as_bool(), m["ict"].as_bool()), (Some(true), Some(false)));
        assert_eq!(m["lambda"].as_array().unwrap().len(), 1);
    }
    assert_eq!(run(&args).stdout, out.stdout, "same seed, same report");
}

#[test]
fn oracle_size_guard() {
    let out = run(&["oracle", "wi-ict", "--n", "25"]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size"));
}

#[test]
fn out_and_dot_are_side_channels() {
    let dir = tempfile::tempdir().unwrap();
    let (out_path, dot_path) = (dir.path().join("r.json"), dir.path().join("g.dot"));
    let out = run(&[
        "--out",
        out_path.to_str().unwrap(),
        "ict-check",
        "--system",
        "tent2",
        "--set",
        "2/7,4/7,6/7",
        "--eps",
        "1/8",
        "--dot",
        dot_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "yes");
    assert!(std::fs::read_to_string(dot_path).unwrap().starts_with("digraph"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let cfg = fixture("run_config.json");
    let out = run(&["--config", &cfg, "ict-check"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["eps"], "1/8");
    let out = run(&["--config", &cfg, "ict-check", "--set", "1/3,2/3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_env_var_is_enforced() {
    let out = Command::new(env!("CARGO_BIN_EXE_omegalab"))
        .args(["ict-check", "--system", "tent2", "--set", "2/3", "--eps", "1/1024"])
        .env("OMEGALAB_BUDGET_BITS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
