//! The ten acceptance criteria. Each prints one PASS/FAIL line; the test
//! fails if any criterion does.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;
use std::time::Instant;

use bccsp::axioms::{axiom_catalog, check_soundness, nd_axiom, verify_hnf_laws, ConditionId, Form, LinearZ};
use bccsp::corpus::{parse_corpus, run_corpus, BUILTIN};
use bccsp::logic::{distinguish, in_sublogic_over, sample_formula, sat, Formula, SublogicId};
use bccsp::lts::{completed_traces, initials, traces};
use bccsp::observations::{closure_apply, lgo_universe, BgoTable, Delta, LinearObs};
use bccsp::preorders::{decide_linear, decide_nsim};
use bccsp::term::enumerate_terms;
use bccsp::{decide, Action, Canon, ConstraintId, Engine, Flavor, Options, SemanticsId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn acts(names: &str) -> Vec<Action> {
    names.chars().map(|c| Action::new(&c.to_string()).unwrap()).collect()
}

/// Every canonical term of depth at most 2 over {a, b}.
fn pool() -> &'static [Canon] {
    static POOL: OnceLock<Vec<Canon>> = OnceLock::new();
    POOL.get_or_init(|| enumerate_terms(&acts("ab"), 2, usize::MAX))
}

fn random_term(rng: &mut ChaCha8Rng, alphabet: &[Action], depth: usize) -> Canon {
    if depth == 0 {
        return Canon::nil();
    }
    let width = rng.gen_range(0..=3);
    Canon::from_summands((0..width).map(|_| {
        let a = alphabet.choose(rng).unwrap().clone();
        let d = rng.gen_range(0..depth);
        (a, random_term(rng, alphabet, d))
    }))
}

/// Mostly unrelated pairs, plus pairs where the right side extends or
/// perturbs the left so that many relations hold.
fn random_pairs(seed: u64, count: usize) -> Vec<(Canon, Canon)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let abc = acts("abc");
    (0..count)
        .map(|i| {
            let p = random_term(&mut rng, &abc, 3);
            let q = match i % 3 {
                0 => random_term(&mut rng, &abc, 3),
                1 => p.plus(&random_term(&mut rng, &abc, 2)),
                _ => {
                    let mut s: Vec<(Action, Canon)> = p.summands().to_vec();
                    if !s.is_empty() {
                        let k = rng.gen_range(0..s.len());
                        s[k].1 = s[k].1.plus(&random_term(&mut rng, &abc, 1));
                    }
                    Canon::from_summands(s)
                }
            };
            (p, q)
        })
        .collect()
}

fn pool_pairs() -> Vec<(&'static Canon, &'static Canon)> {
    let pool = pool();
    pool.iter().flat_map(|p| pool.iter().map(move |q| (p, q))).collect()
}

fn sample_pairs() -> &'static [(Canon, Canon)] {
    static SAMPLES: OnceLock<Vec<(Canon, Canon)>> = OnceLock::new();
    SAMPLES.get_or_init(|| random_pairs(7, 300))
}

/// Collected violations, capped for printing.
#[derive(Default)]
struct Outcome {
    checked: usize,
    violations: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    fn merge(&mut self, other: Outcome) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }
}

fn par_check<T: Sync, F>(items: &[T], f: F) -> Outcome
where
    F: Fn(&T, &mut Outcome) + Sync,
{
    items
        .par_iter()
        .fold(Outcome::default, |mut o, x| {
            f(x, &mut o);
            o
        })
        .reduce(Outcome::default, |mut a, b| {
            a.merge(b);
            a
        })
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::default();
    for n in [ConstraintId::U, ConstraintId::C, ConstraintId::I] {
        let mut table = BgoTable::new();
        let ids: HashMap<&Canon, _> = pool().iter().map(|p| (p, table.bgo_ids(n, p, 20).unwrap())).collect();
        let pairs = pool_pairs();
        out.merge(par_check(&pairs, |(p, q), o| {
            let fast = decide_nsim(n, p, q).unwrap().holds;
            let oracle = ids[p].is_subset(&ids[q]);
            o.check(fast == oracle, || format!("{n}: {p} vs {q}: simulation {fast}, observations {oracle}"));
        }));
        let mut skipped = 0;
        for (p, q) in sample_pairs() {
            match (table.bgo_ids(n, p, 16), table.bgo_ids(n, q, 16)) {
                (Ok(ip), Ok(iq)) => {
                    let fast = decide_nsim(n, p, q).unwrap().holds;
                    out.check(fast == ip.is_subset(&iq), || format!("{n}: {p} vs {q}"));
                }
                _ => skipped += 1,
            }
        }
        if skipped > 0 {
            out.notes.push(format!("{n}: {skipped} sampled pairs too large to enumerate"));
        }
    }
    out
}

fn subsets(alphabet: &[Action]) -> Vec<BTreeSet<Action>> {
    (0..1usize << alphabet.len())
        .map(|m| alphabet.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.clone()).collect())
        .collect()
}

/// Every (trace, state reached) pair.
fn runs(p: &Canon) -> Vec<(Vec<Action>, Canon)> {
    let mut out = vec![(Vec::new(), p.clone())];
    for (a, b) in p.summands() {
        for (mut t, s) in runs(b) {
            t.insert(0, a.clone());
            out.push((t, s));
        }
    }
    out
}

/// Failure pairs: a trace and a set of actions refused after it.
fn failures(p: &Canon, alphabet: &[Action]) -> BTreeSet<(Vec<Action>, BTreeSet<Action>)> {
    let mut out = BTreeSet::new();
    for (t, s) in runs(p) {
        let offered = initials(&s);
        for x in subsets(alphabet) {
            if x.is_disjoint(&offered) {
                out.insert((t.clone(), x));
            }
        }
    }
    out
}

/// Ready pairs: a trace and the exact set offered after it.
fn readies(p: &Canon) -> BTreeSet<(Vec<Action>, BTreeSet<Action>)> {
    runs(p).into_iter().map(|(t, s)| (t, initials(&s))).collect()
}

fn criterion_2() -> Outcome {
    let check_pair = |p: &Canon, q: &Canon, alphabet: &[Action], o: &mut Outcome| {
        let f = decide_linear(ConstraintId::I, Flavor::LfSup, p, q).unwrap().holds;
        o.check(f == failures(p, alphabet).is_subset(&failures(q, alphabet)), || format!("failures: {p} vs {q}"));
        let r = decide_linear(ConstraintId::I, Flavor::Lf, p, q).unwrap().holds;
        o.check(r == readies(p).is_subset(&readies(q)), || format!("readiness: {p} vs {q}"));
    };
    let ab = acts("ab");
    let abc = acts("abc");
    let mut out = par_check(&pool_pairs(), |(p, q), o| check_pair(p, q, &ab, o));
    out.merge(par_check(sample_pairs(), |(p, q), o| check_pair(p, q, &abc, o)));
    out
}

fn criterion_3() -> Outcome {
    let engines = [Engine::Direct, Engine::Observational, Engine::Operational];
    let check_pair = |p: &Canon, q: &Canon, o: &mut Outcome| {
        for z in LinearZ::ALL {
            let verdicts: Vec<bool> = engines
                .iter()
                .map(|&engine| decide(z.semantics(), p, q, &Options { engine, ..Options::default() }).unwrap().holds)
                .collect();
            o.check(verdicts.iter().all(|&v| v == verdicts[0]), || format!("{}: {p} vs {q}: {verdicts:?}", z.semantics()));
        }
    };
    let mut out = par_check(&pool_pairs(), |(p, q), o| check_pair(p, q, o));
    out.merge(par_check(sample_pairs(), |(p, q), o| check_pair(p, q, o)));
    out
}

fn id(s: &str) -> SemanticsId {
    s.parse().unwrap()
}

/// Finer-to-coarser arrows of the spectrum.
fn arrows() -> Vec<(SemanticsId, SemanticsId)> {
    use ConstraintId::*;
    let mut out = Vec::new();
    let layers = [U, C, I, T, S];
    for n in layers {
        let at = |f: &str| id(&format!("{n}:{f}"));
        for (a, b) in [("b", "db"), ("db", "l"), ("l", "l⊇"), ("l", "lf"), ("l⊇", "lf⊇"), ("lf", "lf⊇")] {
            out.push((at(a), at(b)));
        }
        if n != S {
            for (a, b) in [("l", "l⊆"), ("l⊆", "lf⊆"), ("lf", "lf⊆")] {
                out.push((at(a), at(b)));
            }
        }
    }
    for (finer, coarser) in [(S, T), (T, I), (I, C), (C, U)] {
        for f in ["b", "db", "l", "l⊇", "lf", "lf⊇"] {
            out.push((id(&format!("{finer}:{f}")), id(&format!("{coarser}:{f}"))));
        }
        // Partial offers at I do not imply completed traces: 0 ≤ b.0.
        if finer != S && finer != I {
            for f in ["l⊆", "lf⊆"] {
                out.push((id(&format!("{finer}:{f}")), id(&format!("{coarser}:{f}"))));
            }
        }
    }
    out.push((id("B"), id("2S")));
    // The diamond below ready simulation.
    for (a, b) in [
        ("RT", "JOIN"),
        ("JOIN", "FT"),
        ("JOIN", "R"),
        ("FT", "RV"),
        ("R", "RV"),
        ("RV", "F"),
        ("RS", "I:bf"),
        ("I:bf", "I:bf⊇"),
        ("I:bf", "R"),
        ("I:bf⊇", "F"),
        ("RT", "ERT"),
        ("ERT", "ER"),
        ("R", "ER"),
        ("ER", "T"),
        ("RT", "ECRT"),
        ("ECRT", "ECR"),
        ("ECRT", "ERT"),
        ("ECR", "ER"),
        ("R", "ECR"),
        ("ECR", "CT"),
    ] {
        out.push((id(a), id(b)));
    }
    out
}

fn criterion_4() -> Outcome {
    let pairs = random_pairs(4, 1000);
    let arrows = arrows();
    let ids: BTreeSet<SemanticsId> = arrows.iter().flat_map(|&(a, b)| [a, b]).collect();
    let ids: Vec<SemanticsId> = ids.into_iter().collect();
    let mut out = par_check(&pairs, |(p, q), o| {
        let holds: HashMap<SemanticsId, bool> =
            ids.iter().map(|&i| (i, decide(i, p, q, &Options::default()).unwrap().holds)).collect();
        for &(finer, coarser) in &arrows {
            o.check(!holds[&finer] || holds[&coarser], || format!("{finer} → {coarser}: {p} vs {q}"));
        }
    });
    out.notes.push(format!("{} arrows", arrows.len()));
    out
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::default();
    let small = enumerate_terms(&acts("ab"), 2, 2);
    let ab = acts("ab");
    let mut jobs = Vec::new();
    for sid in SemanticsId::all_supported() {
        for form in [Form::Order, Form::Equivalence] {
            if let Ok(catalog) = axiom_catalog(sid, form) {
                for ax in catalog {
                    jobs.push((sid, ax));
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    jobs.retain(|(sid, ax)| seen.insert((*sid, ax.name.clone(), ax.lhs.to_string(), ax.rhs.to_string())));
    out.merge(par_check(&jobs, |(sid, ax), o| {
        let report = check_soundness(ax, *sid, &small, &ab, 1).unwrap();
        o.check(report.is_sound(), || format!("{} under {sid}: {:?}", ax.name, report.violations.first()));
    }));
    out.notes.push(format!("{} axiom/semantics pairs", jobs.len()));
    for (m, target) in [(ConditionId::F, "FT"), (ConditionId::F, "R"), (ConditionId::FT, "RT")] {
        let report = check_soundness(&nd_axiom(m), id(target), &small, &ab, 1).unwrap();
        out.check(!report.is_sound(), || format!("probe ND^{} under {target} found no violation", m.name()));
    }
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::default();
    for z in LinearZ::ALL {
        let report = verify_hnf_laws(z, pool()).unwrap();
        out.check(report.passed(), || format!("{z:?}: {report:?}"));
    }
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::default();
    let rows = parse_corpus(BUILTIN).unwrap();
    for r in run_corpus(&rows, &Options::default()).rows {
        out.check(r.ok, || format!("{}: observed {} {:?}", r.name, r.observed, r.error));
    }
    out
}

fn formula_ids() -> Vec<(SemanticsId, SublogicId)> {
    SemanticsId::all_supported().into_iter().filter_map(|i| SublogicId::for_semantics(i).ok().map(|l| (i, l))).collect()
}

fn criterion_8() -> Outcome {
    let pool = pool();
    let ab = acts("ab");
    let mut out = Outcome::default();
    let ids = formula_ids();
    out.notes.push(format!("{} semantics with a logic", ids.len()));
    for (k, &(sid, logic)) in ids.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
        let formulas: Vec<Formula> =
            (0..200).map(|_| sample_formula(logic, &ab, 3, &mut |n| rng.gen_range(0..n.max(1)))).collect();
        for f in &formulas {
            out.check(in_sublogic_over(f, logic, Some(&ab)), || format!("{sid}: sampled {f} not in {logic}"));
        }
        let truth: Vec<Vec<bool>> = pool.iter().map(|p| formulas.iter().map(|f| sat(p, f)).collect()).collect();
        let index: HashMap<&Canon, usize> = pool.iter().enumerate().map(|(i, p)| (p, i)).collect();
        out.merge(par_check(&pool_pairs(), |(p, q), o| {
            let alphabet: Vec<Action> = p.actions().union(&q.actions()).cloned().collect();
            if decide(sid, p, q, &Options::default()).unwrap().holds {
                let (tp, tq) = (&truth[index[p]], &truth[index[q]]);
                o.check(tp.iter().zip(tq).all(|(&a, &b)| !a || b), || format!("{sid}: {p} ⊑ {q} but a formula is lost"));
            } else {
                match distinguish(sid, p, q) {
                    Ok(Some(f)) => o.check(in_sublogic_over(&f, logic, Some(&alphabet)) && sat(p, &f) && !sat(q, &f), || {
                        format!("{sid}: {p} vs {q}: bad formula {f}")
                    }),
                    other => o.check(false, || format!("{sid}: {p} vs {q}: {other:?}")),
                }
            }
        }));
    }
    out
}

fn criterion_9() -> Outcome {
    let mut out = Outcome::default();
    let universe = lgo_universe(&acts("ab"), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let random_set = |rng: &mut ChaCha8Rng| -> BTreeSet<LinearObs> {
        let k = rng.gen_range(0..6);
        (0..k).map(|_| universe.choose(rng).unwrap().clone()).collect()
    };
    for _ in 0..500 {
        let s = random_set(&mut rng);
        let mut bigger = s.clone();
        bigger.extend(random_set(&mut rng));
        for delta in [Delta::Sup, Delta::Final, Delta::FinalSup] {
            let cl = |x: &BTreeSet<LinearObs>| closure_apply(delta, x, ConstraintId::I).unwrap().materialize(&universe);
            let c = cl(&s);
            out.check(s.is_subset(&c), || format!("{delta:?} not extensive on {s:?}"));
            out.check(cl(&c) == c, || format!("{delta:?} not idempotent on {s:?}"));
            out.check(c.is_subset(&cl(&bigger)), || format!("{delta:?} not monotone on {s:?}"));
        }
    }
    out
}

fn criterion_10() -> Outcome {
    let flavors = [Flavor::L, Flavor::LSup, Flavor::Lf, Flavor::LfSup, Flavor::LSub, Flavor::LfSub];
    let check_pair = |p: &Canon, q: &Canon, o: &mut Outcome| {
        let tr = traces(p).is_subset(&traces(q));
        let ct = tr && completed_traces(p).is_subset(&completed_traces(q));
        for f in flavors {
            let u = decide_linear(ConstraintId::U, f, p, q).unwrap().holds;
            o.check(u == tr, || format!("U:{f}: {p} vs {q}"));
            let c = decide_linear(ConstraintId::C, f, p, q).unwrap().holds;
            o.check(c == ct, || format!("C:{f}: {p} vs {q}"));
        }
    };
    let mut out = par_check(&pool_pairs(), |(p, q), o| check_pair(p, q, o));
    out.merge(par_check(sample_pairs(), |(p, q), o| check_pair(p, q, o)));
    out
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("simulations agree with branching observation inclusion", criterion_1),
        ("failures and readiness agree with textbook pair inclusion", criterion_2),
        ("direct, observational and operational engines agree", criterion_3),
        ("spectrum arrows are respected on random pairs", criterion_4),
        ("axioms are sound and the unsoundness probes fire", criterion_5),
        ("head normal form laws", criterion_6),
        ("regression corpus reproduces", criterion_7),
        ("distinguishing formulas and preservation", criterion_8),
        ("closure laws", criterion_9),
        ("collapse of the linear flavors at U and C", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let status = if out.violations.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2}: {status} {name} ({} checks, {} violations, {:.1}s){}",
            i + 1,
            out.checked,
            out.violations.len(),
            start.elapsed().as_secs_f64(),
            if out.notes.is_empty() { String::new() } else { format!(" [{}]", out.notes.join("; ")) }
        );
        for v in out.violations.iter().take(5) {
            println!("    {v}");
        }
        if !out.violations.is_empty() {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
