use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symsched"))
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symsched-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_instance(name: &str, machines: usize, sizes: &[u64]) -> PathBuf {
    let jobs: Vec<Value> = sizes
        .iter()
        .enumerate()
        .map(|(k, s)| serde_json::json!({ "id": format!("j{k}"), "size": s }))
        .collect();
    let path = scratch_dir().join(name);
    std::fs::write(&path, serde_json::json!({ "machines": machines, "jobs": jobs }).to_string()).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = bin().args(args).output().expect("binary runs");
    let code = out.status.code().expect("exit code");
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, report, out)
}

#[test]
fn lift_reports_feasibility_and_writes_certificates() {
    let inst = write_instance("three.json", 2, &[3, 3, 3]);
    let inst = inst.to_str().unwrap();
    let (code, rep, _) = run(&["lift", "--instance", inst, "--T", "5", "--degree", "1"]);
    assert_eq!(code, 0);
    assert_eq!(rep["status"], "ok");
    assert_eq!(rep["artifacts"]["feasible"], true);

    let cert = scratch_dir().join("three.cert");
    let (code, rep, _) = run(&[
        "lift", "--instance", inst, "--T", "5", "--degree", "6", "--certificate", cert.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert_eq!(rep["status"], "infeasible");
    assert_eq!(rep["artifacts"]["certificate"], "no-integral-point");
    let text = std::fs::read_to_string(cert).unwrap();
    // 2^6 points, one line each, plus the header.
    assert_eq!(text.lines().count(), 65);
}

#[test]
fn lift_accepts_every_formulation() {
    let inst = write_instance("four.json", 2, &[4, 3, 3, 2]);
    for form in ["assign", "clp", "assign-sym", "order"] {
        let (code, rep, out) =
            run(&["lift", "--instance", inst.to_str().unwrap(), "--T", "6", "--degree", "1", "--formulation", form]);
        assert_eq!(code, 0, "{form}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(rep["parameters"]["formulation"], form);
    }
}

#[test]
fn round_surfaces_success_exhaustion_and_infeasibility() {
    let inst = write_instance("round.json", 2, &[3, 3, 3]);
    let inst = inst.to_str().unwrap();
    let (code, rep, _) = run(&["round", "--instance", inst, "--T", "6", "--degree", "6"]);
    assert_eq!(code, 0);
    assert_eq!(rep["artifacts"]["makespan"], 6);
    assert!(rep["artifacts"]["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true));

    let (code, rep, _) = run(&["round", "--instance", inst, "--T", "6", "--degree", "1"]);
    assert_eq!(code, 2);
    assert_eq!(rep["artifacts"]["error"], "DEGREE_EXHAUSTED");

    let (code, rep, _) = run(&["round", "--instance", inst, "--T", "5", "--degree", "6"]);
    assert_eq!(code, 2);
    assert_eq!(rep["artifacts"]["error"], "LIFT_INFEASIBLE");

    let (code, rep, _) = run(&["round", "--instance", inst, "--T", "6", "--degree", "6", "--mode", "order"]);
    assert_eq!(code, 0);
    assert_eq!(rep["parameters"]["mode"], "order");
}

#[test]
fn gap_examples() {
    let inst = write_instance("gap.json", 2, &[3, 3, 3]);
    let inst = inst.to_str().unwrap();
    let (code, rep, _) = run(&["gap", "--instance", inst, "--degree", "6"]);
    assert_eq!(code, 0);
    assert_eq!(rep["artifacts"]["t_star"], 6);
    assert_eq!(rep["artifacts"]["ratio"]["value"], "1");

    let (_, rep, _) = run(&["gap", "--instance", inst, "--degree", "1"]);
    assert_eq!(rep["artifacts"]["t_star"], 5);
    assert_eq!(rep["artifacts"]["ratio"]["value"], "6/5");

    let single = write_instance("single.json", 1, &[2, 5]);
    let (_, rep, _) = run(&["gap", "--instance", single.to_str().unwrap(), "--degree", "1"]);
    assert_eq!(rep["artifacts"]["t_star"], 7);

    let (_, rep, _) = run(&["gap", "--instance", inst, "--degree", "1", "--opt-at-least", "6"]);
    assert_eq!(rep["artifacts"]["ratio"]["relation"], ">=");
}

#[test]
fn gap_budget_exhaustion_exits_two() {
    let inst = write_instance("budget.json", 2, &[3, 3, 2, 2, 2]);
    let (code, rep, _) = run(&["gap", "--instance", inst.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(code, 2);
    assert_eq!(rep["status"], "exhausted");
}

#[test]
fn hard_writes_the_instance() {
    let path = scratch_dir().join("hard3.json");
    let (code, rep, _) = run(&["hard", "--k", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(rep["artifacts"]["machines"], 9);
    assert_eq!(rep["artifacts"]["matchings"].as_array().unwrap().len(), 6);
    let inst: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(inst["machines"], 9);
    assert_eq!(inst["jobs"].as_array().unwrap().len(), 45);
}

#[test]
fn verify_lb_small_checks() {
    let (code, rep, _) = run(&["verify-lb", "--k", "3", "--level", "1", "--checks", "sa,ring", "--samples", "5"]);
    assert_eq!(code, 0);
    assert_eq!(rep["artifacts"]["sa"]["violations"], 0);
    assert_eq!(rep["artifacts"]["ring"]["kill_disagreements"], 0);

    let (code, rep, _) = run(&["verify-lb", "--k", "5", "--checks", "indep", "--max-total", "2"]);
    assert_eq!(code, 0);
    assert!(rep["artifacts"]["indep"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_byte_identical() {
    let inst = write_instance("repeat.json", 2, &[4, 3, 3, 2]);
    let args = ["round", "--instance", inst.to_str().unwrap(), "--T", "6", "--degree", "8", "--seed", "9"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn errors_exit_one() {
    let (code, _, out) = run(&["lift", "--instance", "/nonexistent/x.json", "--T", "3"]);
    assert_eq!(code, 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("reading"));

    let inst = write_instance("err.json", 2, &[1, 2]);
    let (code, _, _) = run(&["lift", "--instance", inst.to_str().unwrap(), "--T", "3", "--formulation", "nope"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["lift", "--instance", inst.to_str().unwrap(), "--T", "3", "--epsilon", "2/3"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["verify-lb", "--k", "3", "--checks", "bogus"]);
    assert_eq!(code, 1);
}
