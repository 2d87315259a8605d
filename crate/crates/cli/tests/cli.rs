use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ccm_core::rational::{self, rat};
use serde_json::Value;

fn specs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn ccm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccm-lab")).args(args).output().expect("binary runs")
}

fn spec_path(name: &str) -> String {
    specs_dir().join(name).to_string_lossy().into_owned()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write_spec(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("spec.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn dc_of_s3_is_one_half() {
    let r = json_of(&ccm(&["dc", "--spec", &spec_path("s3.toml")]));
    assert_eq!(r["command"], "dc");
    assert_eq!(r["result"]["dc"], "1/2");
    assert_eq!(r["result"]["order"], 6);
    assert_eq!(r["schema"], 1);
    assert!(r["version"].is_string());
}

#[test]
fn neumann_cover_of_the_integers() {
    let r = json_of(&ccm(&["neumann-check", "--spec", &spec_path("neumann.toml")]));
    assert_eq!(r["result"]["covers"], true);
    assert_eq!(r["result"]["sum"], "1/1");
}

#[test]
fn dihedral_quotient_chain_as_csv() {
    let out = ccm(&["dc-rf", "--spec", &spec_path("dinf_chain.toml"), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("member,order,dc"));
    // D∞ modulo 2^k translations is dihedral with n = 2^k rotations: dc = (n + 6) / 4n.
    for (i, line) in lines.enumerate() {
        let n = 2i64 << i;
        let expected = rational::format(&rat(n + 6, 4 * n));
        assert_eq!(line, format!("{i},{},{expected}", 2 * n));
    }
}

#[test]
fn strata_json_has_sorted_keys_and_exact_measures() {
    let out = ccm(&["strata", "--spec", &spec_path("rot4.toml")]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let r = json_of(&out);
    assert_eq!(r["result"]["dc"], "1/16");
    assert_eq!(r["result"]["infinite_measure"], "3/4");
    let measures: Vec<&str> = r["result"]["strata"].as_array().unwrap().iter().map(|s| s["measure"].as_str().unwrap()).collect();
    assert!(measures.contains(&"1/4"));
    let top: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim()).collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
}

#[test]
fn witness_lists_elements_with_certificate() {
    let r = json_of(&ccm(&["witness", "--spec", &spec_path("z_witness.toml")]));
    let els = r["result"]["elements"].as_array().unwrap();
    assert_eq!(els.len(), 2);
    assert_eq!(els[0]["v"], serde_json::json!([0]));
    assert_eq!(r["result"]["certificate"]["subgroup_deviations"], serde_json::json!(["0/1"]));

    let out = ccm(&["witness", "--spec", &spec_path("z2_disjoint.toml"), "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "element\n[0|0]\n[-2|0]\n[3|0]\n[-5|0]\n");
}

#[test]
fn mean_commands_on_q8() {
    let spec = spec_path("q8_mean.toml");
    let d = json_of(&ccm(&["defect", "--spec", &spec]));
    assert_eq!(d["result"]["left"], "1/1");
    let s = json_of(&ccm(&["smooth", "--spec", &spec]));
    assert_eq!(s["result"]["report"]["holds"], true);
    let total: ccm_core::Rational = s["result"]["weights"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| rational::parse(v.as_str().unwrap()).unwrap())
        .sum();
    assert_eq!(total, rat(1, 1));
    let k = json_of(&ccm(&["kmu", "--spec", &spec]));
    assert_eq!(k["result"]["classes"], 5);
    assert_eq!(k["result"]["k_uniform"], "5/8");
    assert_eq!(k["result"]["checks"].as_array().unwrap().len(), 8);
}

#[test]
fn transversal_and_faf_witness() {
    let t = json_of(&ccm(&["transversal", "--spec", &spec_path("s3_transversal.toml")]));
    assert_eq!(t["result"]["all_found"], true);
    assert_eq!(t["result"]["cosets"].as_array().unwrap().len(), 6);
    let f = json_of(&ccm(&["faf-witness", "--spec", &spec_path("heisenberg.toml")]));
    assert_eq!(f["result"]["faf"], false);
    let f = json_of(&ccm(&["faf-witness", "--spec", &spec_path("rot4.toml")]));
    assert_eq!(f["result"]["faf"], true);
    assert_eq!(f["result"]["h0"]["index"], "4");
}

#[test]
fn folner_set_for_the_heisenberg_group() {
    let r = json_of(&ccm(&["folner", "--spec", &spec_path("heisenberg.toml")]));
    for ratio in r["result"]["ratios"].as_array().unwrap() {
        assert!(rational::parse(ratio.as_str().unwrap()).unwrap() < rat(1, 2));
    }
}

fn without_timing(out: &Output) -> Value {
    let mut v = json_of(out);
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn reports_are_deterministic() {
    for (cmd, spec) in [("strata", "rot4.toml"), ("witness", "z2_disjoint.toml"), ("dc-rf", "dinf_chain.toml"), ("kmu", "q8_mean.toml")] {
        let path = spec_path(spec);
        let a = ccm(&[cmd, "--spec", &path]);
        let b = ccm(&[cmd, "--spec", &path]);
        let c = ccm(&[cmd, "--spec", &path, "--sequential"]);
        assert_eq!(without_timing(&a), without_timing(&b), "{cmd}");
        assert_eq!(without_timing(&a), without_timing(&c), "{cmd}");
        let strip = |o: &Output| {
            String::from_utf8_lossy(&o.stdout).lines().filter(|l| !l.contains("\"timing_ms\"")).collect::<Vec<_>>().join("\n")
        };
        assert_eq!(strip(&a), strip(&b), "{cmd}");
    }
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ccm(&["dc", "--spec", &spec_path("s3.toml"), "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["result"]["dc"], "1/2");
}

#[test]
fn verify_all_runs_selected_criteria() {
    let out = ccm(&["verify-all", "--only", "2,5", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.contains(",PASS,")));
}

#[test]
fn exit_code_two_for_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = ccm(&["dc", "--spec", &write_spec(&dir, "[group\nclass = \"cyclic\"\n")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1, column"));

    let out = ccm(&["dc", "--spec", &write_spec(&dir, "[group]\nclass = \"cyclic\"\nm = 3\n")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));

    let out = ccm(&["dc", "--spec", &spec_path("s3.toml"), "--format", "csv"]);
    assert_eq!(code(&out), 2);

    let out = ccm(&["dc"]);
    assert_eq!(code(&out), 2);

    let out = ccm(&["no-such-command"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exit_code_two_for_semantic_errors() {
    let dir = tempfile::tempdir().unwrap();
    let chain = "[group]\nclass = \"integers\"\n\n[params]\nchain = [[{ v = [2], q = 0 }], [{ v = [3], q = 0 }]]\n";
    let out = ccm(&["dc-rf", "--spec", &write_spec(&dir, chain)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("members 0 and 1 are not nested"));

    let moduli = "[group]\nclass = \"infinite_dihedral\"\n\n[params]\nmoduli = [3, 5]\nnested = true\n";
    let out = ccm(&["dc-rf", "--spec", &write_spec(&dir, moduli)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("moduli 3 and 5"));

    let table = "[group]\nclass = \"finite_cayley\"\nlabels = [\"e\", \"a\"]\ntable = [[0, 1], [1, 1]]\n";
    assert_eq!(code(&ccm(&["dc", "--spec", &write_spec(&dir, table)])), 2);

    let atoms = "[group]\nclass = \"integers\"\n\n[params]\nsize = 4\n\n[[params.atoms]]\ncosets = [{ subgroup = [{ v = [2], q = 0 }], rep = { v = [0], q = 0 } }]\ntarget = \"1/2\"\n";
    let out = ccm(&["witness", "--spec", &write_spec(&dir, atoms)]);
    assert_eq!(code(&out), 2);

    let foreign = "[group]\nclass = \"cyclic\"\nn = 3\n\n[params]\nweights = { \"z\" = \"1/1\" }\n";
    assert_eq!(code(&ccm(&["defect", "--spec", &write_spec(&dir, foreign)])), 2);
}

#[test]
fn exit_code_three_for_unsupported_requests() {
    let out = ccm(&["dc", "--spec", &spec_path("rot4.toml")]);
    assert_eq!(code(&out), 3);
    let out = ccm(&["dc", "--spec", &spec_path("s3.toml"), "--cap", "5"]);
    assert_eq!(code(&out), 3);
    let out = ccm(&["dc-rf", "--spec", &spec_path("dinf_chain.toml"), "--cap", "10"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn exit_code_four_for_io_failures() {
    assert_eq!(code(&ccm(&["dc", "--spec", "/nonexistent/spec.toml"])), 4);
    let out = ccm(&["dc", "--spec", &spec_path("s3.toml"), "--out", "/nonexistent/dir/report.json"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn exit_code_one_for_invariant_violations() {
    use ccm_lab::CliError;
    assert_eq!(CliError::Engine(ccm_core::Error::InvariantViolation("x".into())).exit_code(), 1);
    assert_eq!(CliError::Verification(1).exit_code(), 1);
}
