use assert_cmd::Command;
use mulrep::{MultilinearForm, ProductForm};
use num_bigint::BigInt;
use predicates::prelude::*;
use serde_json::Value;

fn mulrep() -> Command {
    let mut cmd = Command::cargo_bin("mulrep").unwrap();
    cmd.env_remove("MULREP_BUDGET");
    cmd
}

fn json_run(args: &[&str], code: i32) -> Value {
    let out = mulrep()
        .arg("--json")
        .args(args)
        .assert()
        .code(code)
        .get_output()
        .stdout
        .clone();
    serde_json::from_slice(&out).unwrap()
}

fn ints(v: &Value) -> Vec<BigInt> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().parse().unwrap())
        .collect()
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

#[test]
fn solve_reports_a_verified_solution() {
    for (form, b) in [
        ("6*x1*x2 + 10*x1*x3 + 15*x2*x3", "1"),
        ("2*x1*x2 + 3*x3*x4", "-7"),
        ("x1*x2*x3 + 2*x1*x2*x4 + 3*x1*x3*x4 + 5*x2*x3*x4", "11"),
        ("6*x1*x2 + 10*x1*x3 + 15*x2*x3", "-25"),
        ("6*x1 + 10*x2 + 15*x3", "1"),
    ] {
        let v = json_run(&["solve", form, b], 0);
        assert_eq!(v["outcome"], "solved");
        let a = ints(&v["solution"]);
        let f = MultilinearForm::parse_any(form).unwrap();
        assert_eq!(f.evaluate(&a).unwrap().to_string(), b, "{form}");
        assert_eq!(v["evaluation"], b);
    }
}

#[test]
fn solve_picks_the_factored_family() {
    let v = json_run(&["solve", "6*x1*x2+10*x1*x3+15*x2*x3", "-25"], 0);
    assert_eq!(v["method"], "prop2");
}

#[test]
fn solve_rejects_targets_outside_the_gcd_lattice() {
    let v = json_run(&["solve", "2*x1*x2 + 4*x3*x4", "3"], 1);
    assert_eq!(v["outcome"], "unrepresentable");
    assert_eq!(v["gcd"], "2");
}

#[test]
fn solve_with_forced_method_checks_preconditions() {
    mulrep()
        .args(["solve", "2*x1*x2 + 4*x1*x3 + 3*x2*x3", "1", "--method", "thm1a"])
        .assert()
        .code(3)
        .stderr(predicate::str::contains("error"));
    mulrep()
        .args(["solve", "x1*x2", "1", "--method", "nonsense"])
        .assert()
        .code(3);
}

#[test]
fn negative_forms_and_targets_parse_as_values() {
    let v = json_run(&["eval", "x1+x2+x3", "-x1+x2+x3", "--at", "-1,1,1"], 0);
    assert_eq!(v["value"], "3");
    let v = json_run(&["solve", "-x1*x2", "-7"], 0);
    assert_eq!(v["outcome"], "solved");
}

#[test]
fn counterexample_is_obstructed_and_not_found() {
    let v = json_run(&["obstruct", "x1+x2+x3", "-x1+x2+x3", "6", "--modulus", "4"], 1);
    assert_eq!(v["outcome"], "obstructed");
    assert_eq!(v["modulus"], 4);
    let v = json_run(&["search", "x1+x2+x3", "-x1+x2+x3", "6", "--radius", "20"], 2);
    assert_eq!(v["outcome"], "unknown");
    assert_eq!(v["reason"], "not_found");
}

#[test]
fn obstruct_without_a_certificate_is_unknown() {
    let v = json_run(&["obstruct", "x1*x2", "5", "--mmax", "8"], 2);
    assert_eq!(v["reason"], "no_obstruction");
}

#[test]
fn search_finds_the_first_point_of_the_box() {
    let v = json_run(&["search", "x1*x2", "4", "--radius", "2"], 0);
    assert_eq!(ints(&v["solution"]), [big(-2), big(-2)]);
}

#[test]
fn prodsolve_bounded_respects_the_borosh_radius() {
    let v = json_run(&["prodsolve", "x1+x2+x3", "x2-x3", "6", "--bounded"], 0);
    assert_eq!(v["borosh_radius"], "7");
    assert_eq!(v["within_bound"], true);
    let a = ints(&v["solution"]);
    assert!(a.iter().all(|x| x.magnitude() <= &7u32.into()));
    let p = ProductForm::new(
        3,
        vec![
            MultilinearForm::parse_any("x1+x2+x3").unwrap(),
            MultilinearForm::parse_any("x2-x3").unwrap(),
        ],
    )
    .unwrap();
    assert_eq!(p.evaluate(&a).unwrap(), big(6));
}

#[test]
fn detsolve_and_representability() {
    let v = json_run(&["detsolve", "6;10;15", "3", "-4"], 0);
    assert_eq!(v["evaluation"], "-4");
    let v = json_run(&["detsolve", "2;4", "2", "1"], 1);
    assert_eq!(v["outcome"], "unrepresentable");
    let v = json_run(&["detbound", "6;10;15", "3", "1"], 0);
    assert_eq!(v["bound"], "25369470");
}

#[test]
fn snf_output_reconstructs_the_input() {
    let v = json_run(&["snf", "2 4; 6 8"], 0);
    assert_eq!(ints(&v["invariant_factors"]), [big(2), big(4)]);
    assert_eq!(v["rank"], 2);
}

#[test]
fn check_lists_applicable_methods() {
    let v = json_run(&["check", "2*x1*x2 + 3*x3*x4"], 0);
    assert_eq!(v["pairwise_coprime"], true);
    let methods: Vec<&str> = v["methods"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m.as_str().unwrap())
        .collect();
    assert!(methods.contains(&"prop4") && methods.contains(&"thm1a"));
}

#[test]
fn bound_prints_nu_and_the_quadratic_bound() {
    let v = json_run(&["bound", "2*x1*x2 + 3*x3*x4", "5"], 0);
    assert_eq!(v["nu"], "5");
    assert_eq!(v["general_bound"], "38880");
    assert_eq!(v["quadratic_bound"], "32");
}

#[test]
fn minrep_returns_a_least_norm_solution() {
    let v = json_run(&["minrep", "2*x1*x2 + 3*x3*x4", "1", "--radius", "3"], 0);
    assert_eq!(v["sup_norm"], "1");
}

#[test]
fn probe_streams_one_line_per_target() {
    let out = mulrep()
        .args([
            "--json",
            "probe",
            "x1*x2 + x1*x3",
            "--bmin",
            "-2",
            "--bmax",
            "2",
            "--radius",
            "3",
        ])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let lines: Vec<Value> = String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 5);
    for (line, b) in lines.iter().zip(-2..) {
        assert_eq!(line["b"], b.to_string());
        assert_eq!(line["outcome"], "solved");
    }
}

#[test]
fn zero_budget_makes_searches_unknown() {
    let out = mulrep()
        .env("MULREP_BUDGET", "0")
        .args(["probe", "x1*x2", "--bmin", "1", "--bmax", "2"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.matches("unknown (budget)").count(), 2, "{text}");
    mulrep()
        .env("MULREP_BUDGET", "0")
        .args(["search", "x1*x2", "4", "--radius", "2"])
        .assert()
        .code(2)
        .stdout(predicate::str::contains("budget"));
}

#[test]
fn malformed_input_exits_with_code_3() {
    mulrep().args(["solve", "2*x1*x1", "1"]).assert().code(3);
    mulrep().args(["solve", "x1*x2", "one"]).assert().code(3);
    mulrep().args(["solve"]).assert().code(3);
    mulrep().arg("--help").assert().success();
    mulrep()
        .env("MULREP_BUDGET", "lots")
        .args(["check", "x1"])
        .assert()
        .code(3);
    let v = json_run(&["eval", "x1*x2", "--at", "1,2,x"], 3);
    assert_eq!(v["outcome"], "error");
}

#[test]
fn out_file_receives_the_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    mulrep()
        .args(["solve", "x1*x2 + x3*x4", "9", "--out"])
        .arg(&path)
        .assert()
        .success()
        .stdout(predicate::str::contains("outcome: solved"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["outcome"], "solved");
    assert_eq!(v["b"], "9");
}

#[test]
fn forms_can_be_read_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("form.json");
    std::fs::write(&path, r#"{"n": 3, "monomials": [{"vars": [1, 2], "coef": "6"}, {"vars": [1, 3], "coef": "10"}, {"vars": [2, 3], "coef": "15"}]}"#).unwrap();
    let arg = format!("@{}", path.display());
    let v = json_run(&["solve", &arg, "7"], 0);
    assert_eq!(v["evaluation"], "7");
}
