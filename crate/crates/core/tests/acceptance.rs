//! Acceptance criteria 1–11 over the fixture library and 100 seeded random
//! instances. Prints one PASS/FAIL line per criterion.

use std::io::Write;
use std::time::{Duration, Instant};

use sheafmod::genfix::{chain3, frame_fixture, run_suite, Area, RunReport, SuiteConfig};
use sheafmod::hilbert::inner_from_support;
use sheafmod::verify_frame;

const SEED: u64 = 20261015;
const RANDOM_INSTANCES: usize = 100;
const MIN_RANDOM_TABLES: usize = 100;
/// Strictly more than this fraction of random tables must be neither homs nor adjointable.
const MIN_FAILING_BOTH: f64 = 0.5;
const TIME_BUDGET: Duration = Duration::from_secs(300);

struct Criterion {
    number: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn area_clean(r: &RunReport, areas: &[Area]) -> (bool, String) {
    let mut checks = 0;
    let mut failures = 0;
    for &a in areas {
        let t = r.area(a);
        checks += t.checks;
        failures += t.failures;
    }
    let mut detail = format!("{checks} checks, {failures} failures");
    if let Some((inst, c)) = r.failures().find(|(_, c)| areas.contains(&c.area)) {
        detail.push_str(&format!("; first: {} {}", inst.name, c.check));
    }
    (checks > 0 && failures == 0, detail)
}

fn instance_check(r: &RunReport, instance: &str, law: &str) -> bool {
    r.instances
        .iter()
        .find(|i| i.name == instance)
        .and_then(|i| i.checks.iter().find(|c| c.check.law == law))
        .is_some_and(|c| c.check.holds)
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig { seed: SEED, count: RANDOM_INSTANCES, ..SuiteConfig::default() };
    assert!(cfg.max_base <= 5 && cfg.max_fiber <= 3);
    let timed = || {
        let t = Instant::now();
        let r = run_suite(&cfg).expect("suite runs");
        (r, t.elapsed())
    };
    let (report, suite_time) = timed();
    let (b, second_time) = timed();
    let random = report.instances.iter().filter(|i| i.seed.is_some()).count();
    let c = &report.totals.counters;
    let mut out = Vec::new();

    // 1
    let m3 = verify_frame(&frame_fixture("M3").unwrap());
    let m3_witness = !m3.passed() && m3.witness().is_some_and(|w| w.indices.len() == 3);
    let (clean, detail) = area_clean(&report, &[Area::Frame]);
    out.push(Criterion {
        number: 1,
        name: "frame laws",
        pass: clean && m3_witness && instance_check(&report, "frames", "M3 fails distributivity with a witness"),
        detail: format!("{detail}; M3 witness {:?}", m3.witness().map(|w| w.indices)),
    });

    // 2
    let (clean, detail) = area_clean(&report, &[Area::LocaleCorrespondence]);
    out.push(Criterion { number: 2, name: "module ↔ projection round trips", pass: clean, detail });

    // 3
    let (clean, detail) = area_clean(&report, &[Area::Openness]);
    let c3 = chain3();
    let chain3_ok = c3.is_open()
        && c3.support().is_ok()
        && matches!(c3.is_etale(), Ok(false))
        && instance_check(&report, "CHAIN3", "judged non-étale");
    out.push(Criterion {
        number: 3,
        name: "open-map characterizations",
        pass: clean && chain3_ok,
        detail: format!("{detail}; CHAIN3 open and non-étale: {chain3_ok}"),
    });

    // 4
    let (clean, detail) = area_clean(&report, &[Area::HilbertBasis]);
    out.push(Criterion { number: 4, name: "Hilbert basis clauses", pass: clean, detail });

    // 5
    let (clean, detail) = area_clean(&report, &[Area::Matrix]);
    out.push(Criterion {
        number: 5,
        name: "matrix equivalence",
        pass: clean && c.projection_matrices >= random,
        detail: format!("{detail}; {} generated projection matrices", c.projection_matrices),
    });

    // 6
    let (clean, detail) = area_clean(&report, &[Area::Adjoint]);
    let frac = c.random_tables_failing_both as f64 / c.random_tables.max(1) as f64;
    out.push(Criterion {
        number: 6,
        name: "adjoints",
        pass: clean
            && c.random_tables >= MIN_RANDOM_TABLES
            && frac > MIN_FAILING_BOTH
            && c.random_tables_disagreeing == 0,
        detail: format!(
            "{detail}; {} random tables, {} fail both ({:.2}), {} disagree",
            c.random_tables, c.random_tables_failing_both, frac, c.random_tables_disagreeing
        ),
    });

    // 7
    let (clean, detail) = area_clean(&report, &[Area::DirectImage]);
    out.push(Criterion {
        number: 7,
        name: "f_! = (f*)† and Frobenius",
        pass: clean && c.maps >= random,
        detail: format!("{detail}; {} maps", c.maps),
    });

    // 8
    let (clean, detail) = area_clean(&report, &[Area::Meets]);
    out.push(Criterion {
        number: 8,
        name: "meet preservation and section lemmas",
        pass: clean && c.sheaf_homs_checked >= random,
        detail: format!("{detail}; {} sheaf homs", c.sheaf_homs_checked),
    });

    // 9
    let (clean, detail) = area_clean(&report, &[Area::Isomorphism]);
    out.push(Criterion {
        number: 9,
        name: "sheaf homs ≅ maps",
        pass: clean && c.iso_pairs >= random && c.non_sheaf_witnesses > 0,
        detail: format!(
            "{detail}; {} pairs ({} with partial search of non-sheaf homs), {} non-sheaf witnesses",
            c.iso_pairs, c.iso_pairs_partial_homs, c.non_sheaf_witnesses
        ),
    });

    // 10
    let h = inner_from_support(&c3).unwrap();
    let degenerate = !h.flags().nondegenerate.holds && h.flags().nondegenerate.witness.is_some();
    let weak = h.flags().weakly_nondegenerate.holds;
    let (clean, detail) = area_clean(&report, &[Area::Degeneracy]);
    out.push(Criterion {
        number: 10,
        name: "CHAIN3 degeneracy",
        pass: clean && degenerate && weak,
        detail: format!("{detail}; degenerate {degenerate}, weakly non-degenerate {weak}"),
    });

    // 11
    let ja = serde_json::to_string(&report).unwrap();
    let jb = serde_json::to_string(&b).unwrap();
    let same = ja == jb && report.to_string() == b.to_string();
    out.push(Criterion {
        number: 11,
        name: "determinism",
        pass: same,
        detail: format!("two runs of seed {SEED}: {} bytes, identical {same}", ja.len()),
    });

    let mut so = std::io::stdout().lock();
    writeln!(
        so,
        "suite: {} instances ({random} random), {} checks, {} failures, {:.1}s and {:.1}s",
        report.totals.instances,
        report.totals.checks,
        report.totals.failures,
        suite_time.as_secs_f64(),
        second_time.as_secs_f64()
    )
    .unwrap();
    for k in &out {
        writeln!(so, "criterion {:>2} {:<38} {}  {}", k.number, k.name, if k.pass { "PASS" } else { "FAIL" }, k.detail).unwrap();
    }
    let other = area_clean(&report, &[Area::Oracle, Area::Presheaf]);
    writeln!(so, "oracle and presheaf checks: {}", other.1).unwrap();
    drop(so);

    assert!(random >= RANDOM_INSTANCES);
    assert!(other.0, "oracle or presheaf checks failed");
    assert!(suite_time < TIME_BUDGET, "suite took {suite_time:?}");
    let failed: Vec<usize> = out.iter().filter(|k| !k.pass).map(|k| k.number).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
    assert!(report.passed);
}
