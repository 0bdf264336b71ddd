use bccsp::corpus::{parse_corpus, run_corpus, BUILTIN};
use bccsp::{Engine, Flavor, Options, SemanticsId};

#[test]
fn builtin_corpus_reproduces() {
    let rows = parse_corpus(BUILTIN).unwrap();
    let report = run_corpus(&rows, &Options::default());
    let failures: Vec<_> = report.failures().map(|r| format!("{}: {} {:?}", r.name, r.observed, r.error)).collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn observational_engine_agrees_where_it_fits() {
    let rows = parse_corpus(BUILTIN).unwrap();
    let opts = Options { engine: Engine::Observational, ..Options::default() };
    let report = run_corpus(&rows, &opts);
    for (row, result) in rows.iter().zip(&report.rows) {
        if result.capped {
            let id: SemanticsId = row.semantics.as_deref().unwrap().parse().unwrap();
            assert_eq!(id.flavor, Flavor::B, "{}", row.name);
        } else {
            assert!(result.ok, "{}: {} {:?}", row.name, result.observed, result.error);
        }
    }
}
