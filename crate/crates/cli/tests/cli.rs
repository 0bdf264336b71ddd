use std::process::{Command, Output};

use bccsp::term::{enumerate_terms, parse_alphabet};
use bccsp::{decide, Canon, Options, SemanticsId};
use proptest::prelude::*;
use serde_json::Value;

fn bccsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bccsp")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn trace_equivalence_holds_both_ways() {
    let out = bccsp(&["compare", "--semantics", "T", "a.(b.0+c.0)", "a.b.0+a.c.0", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["comparison"], "eq");
    assert_eq!(v["leq"]["holds"], true);
    assert_eq!(v["geq"]["holds"], true);
}

#[test]
fn simulation_fails_with_a_witness() {
    let out = bccsp(&["compare", "--semantics", "S", "a.(b.0+c.0)", "a.b.0+a.c.0", "--json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["comparison"], "geq");
    assert_eq!(v["leq"]["witness"]["kind"], "game");
    let text = stdout(&bccsp(&["compare", "--semantics", "S", "a.(b.0+c.0)", "a.b.0+a.c.0"]));
    assert!(text.contains("fails") && text.contains("no answer"), "{text}");
}

#[test]
fn spectrum_of_equal_terms_is_all_equivalent() {
    let out = bccsp(&["spectrum", "a.b.0", "a.b.0", "--json"]);
    assert_eq!(code(&out), 0);
    let cells = json(&out);
    let cells = cells.as_array().unwrap();
    assert_eq!(cells.len(), SemanticsId::all_supported().len());
    assert!(cells.iter().all(|c| c["comparison"] == "eq"), "{cells:?}");
}

#[test]
fn malformed_input_exits_2_with_position() {
    let out = bccsp(&["compare", "--semantics", "T", "a.(b.0+", "a.0"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("byte 7") && err.contains('^'), "{err}");
    assert_eq!(code(&bccsp(&["compare", "--semantics", "Q", "a.0", "a.0"])), 2);
    assert_eq!(code(&bccsp(&["check-formula", "a.0", "<a>(T &"])), 2);
    assert_eq!(code(&bccsp(&["compare", "a.0"])), 2);
}

#[test]
fn resource_cap_exits_3() {
    let out = bccsp(&["compare", "--semantics", "F", "--engine", "operational", "--cap", "1", "a.b.0+a.c.0", "a.(b.0+c.0)"]);
    assert_eq!(code(&out), 3);
    let out = bccsp(&["observe", "--kind", "bgo", "--max-nodes", "2", "a.b.0+a.c.0"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn json_terms_are_accepted() {
    let p = r#"{"sum":[{"prefix":{"a":"a","p":{"nil":true}}},{"prefix":{"a":"b","p":{"nil":true}}}]}"#;
    assert_eq!(code(&bccsp(&["compare", "--semantics", "B", p, "b.0+a.0"])), 0);
}

#[test]
fn formulas_and_logics() {
    assert_eq!(code(&bccsp(&["check-formula", "a.(b.0+c.0)", "<a>(<b>T & <c>T)"])), 0);
    assert_eq!(code(&bccsp(&["check-formula", "a.b.0+a.c.0", "<a>(<b>T & <c>T)"])), 1);
    assert_eq!(code(&bccsp(&["in-logic", "--semantics", "F", "<a>~<b>T"])), 0);
    assert_eq!(code(&bccsp(&["in-logic", "--semantics", "F", "<a><b>T & <c>T"])), 1);
    let out = bccsp(&["distinguish", "--semantics", "S", "a.(b.0+c.0)", "a.b.0+a.c.0", "--json"]);
    assert_eq!(code(&out), 0);
    let f = json(&out)["formula"].as_str().unwrap().to_string();
    assert_eq!(code(&bccsp(&["check-formula", "a.(b.0+c.0)", &f])), 0);
    assert_eq!(code(&bccsp(&["check-formula", "a.b.0+a.c.0", &f])), 1);
    assert_eq!(code(&bccsp(&["distinguish", "--semantics", "S", "a.b.0+a.c.0", "a.(b.0+c.0)"])), 1);
}

#[test]
fn observations_lts_and_deter() {
    let out = bccsp(&["observe", "--kind", "lgo", "--constraint", "U", "a.b.0", "--json"]);
    assert_eq!(json(&out).as_array().unwrap().len(), 3);
    let out = bccsp(&["observe", "--kind", "pw", "a.b.0+a.c.0", "--json"]);
    assert_eq!(json(&out).as_array().unwrap().len(), 2);
    let dot = stdout(&bccsp(&["lts", "--dot", "a.b.0+a.0"]));
    assert!(dot.starts_with("digraph") && dot.contains("label=\"b\""));
    assert_eq!(stdout(&bccsp(&["deter", "a.(b.0 + b.c.0) + a.d.0"])).trim(), "a.(b.c.0 + d.0)");
}

#[test]
fn axioms_list_and_check() {
    let out = bccsp(&["axioms", "list", "--semantics", "F", "--json"]);
    let names: Vec<String> = json(&out).as_array().unwrap().iter().map(|a| a["name"].as_str().unwrap().to_string()).collect();
    assert!(names.contains(&"ND^F".to_string()), "{names:?}");
    assert_eq!(code(&bccsp(&["axioms", "check", "--semantics", "F", "--depth", "1"])), 0);
    assert_eq!(code(&bccsp(&["axioms", "list", "--semantics", "I:db"])), 2);
}

#[test]
fn corpus_runner() {
    assert_eq!(code(&bccsp(&["corpus"])), 0);
    let dir = std::env::temp_dir().join(format!("bccsp-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.jsonl");
    std::fs::write(&bad, "{\"name\":\"wrong\",\"p\":\"a.b.0\",\"q\":\"a.c.0\",\"semantics\":\"T\",\"expect\":\"eq\",\"note\":\"\"}\n").unwrap();
    assert_eq!(code(&bccsp(&["corpus", bad.to_str().unwrap()])), 1);
    let broken = dir.join("broken.jsonl");
    std::fs::write(&broken, "{not json\n").unwrap();
    assert_eq!(code(&bccsp(&["corpus", broken.to_str().unwrap()])), 2);
    assert_eq!(code(&bccsp(&["corpus", dir.join("missing.jsonl").to_str().unwrap()])), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_output_is_deterministic() {
    let args = ["spectrum", "a.b.0+a.c.0", "a.(b.0+c.0)", "--json"];
    assert_eq!(bccsp(&args).stdout, bccsp(&args).stdout);
}

fn pool() -> Vec<Canon> {
    enumerate_terms(&parse_alphabet("a,b").unwrap(), 2, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exit_code_follows_the_verdict(i in 0usize..1000, j in 0usize..1000, k in 0usize..6) {
        let pool = pool();
        let (p, q) = (&pool[i % pool.len()], &pool[j % pool.len()]);
        let id: SemanticsId = ["B", "RS", "F", "RT", "PW", "I:bf"][k].parse().unwrap();
        let expected = if decide(id, p, q, &Options::default()).unwrap().holds { 0 } else { 1 };
        let out = bccsp(&["compare", "--semantics", &id.to_string(), &p.to_string(), &q.to_string()]);
        prop_assert_eq!(code(&out), expected);
    }
}
