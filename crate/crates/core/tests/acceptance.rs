//! The ten acceptance criteria, checked on one seeded run of every suite at
//! the default (acceptance) sizes. Each criterion prints one line, and the
//! target exits non-zero if any of them fails. It runs without the libtest
//! harness so the lines always appear.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use rwb::harness::corpus::corpus;
use rwb::harness::{Outcome, SuiteReport, VerifyConfig, Workbench};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn theory_of(id: &str) -> &str {
    id.split('/').next().unwrap()
}

/// Instances where `property` passed, and the total where it was recorded.
fn passes(r: &SuiteReport, property: &str) -> (usize, usize) {
    let mut total = 0;
    let mut pass = 0;
    for p in r.instances.iter().flat_map(|i| &i.properties).filter(|p| p.property == property) {
        total += 1;
        pass += (p.outcome == Outcome::Pass) as usize;
    }
    (pass, total)
}

fn stone(r: &SuiteReport) -> Verdict {
    let mut by_size: BTreeMap<u64, usize> = BTreeMap::new();
    for i in &r.instances {
        let n = i.descriptor["semilattice"]["order"].as_array().unwrap().len() as u64;
        *by_size.entry(n).or_default() += 1;
    }
    // Lattices up to isomorphism with 1..=5 elements.
    let expected: BTreeMap<u64, usize> = [(1, 1), (2, 1), (3, 1), (4, 2), (5, 5)].into();
    let (pass, total) = passes(r, "dj-preserving-equals-continuous");
    let ok = r.passed && by_size == expected && pass == total && r.elapsed < Duration::from_secs(60);
    verdict(ok, format!("{pass}/{total} semilattices of size <= 5 agree, {:.2?}", r.elapsed))
}

fn universal(r: &SuiteReport) -> Verdict {
    let mut per_theory: BTreeMap<&str, usize> = BTreeMap::new();
    for i in &r.instances {
        *per_theory.entry(theory_of(&i.id)).or_default() += 1;
    }
    let (terminated, total) = passes(r, "terminated");
    let (maps, _) = passes(r, "maps-into-every-model");
    let checks: usize = r
        .instances
        .iter()
        .flat_map(|i| &i.properties)
        .filter(|p| p.property == "maps-into-every-model")
        .map(|p| p.checks)
        .sum();
    let ok = r.passed
        && per_theory.len() >= 5
        && per_theory.values().all(|&n| n >= 3)
        && terminated == total
        && maps == total
        && r.elapsed < Duration::from_secs(300);
    verdict(
        ok,
        format!(
            "{} theories, {total} formulas, {checks} extension points mapped into, {:.2?}",
            per_theory.len(),
            r.elapsed
        ),
    )
}

fn genericity(r: &SuiteReport) -> Verdict {
    let (agree, total) = passes(r, "generic-iff-proved");
    let mut verdicts: BTreeMap<String, usize> = BTreeMap::new();
    for i in &r.instances {
        *verdicts.entry(i.descriptor["verdict"].as_str().unwrap().to_string()).or_default() += 1;
    }
    let (refuting, disproved) =
        (r.count("countermodel-refutes", Outcome::Pass), verdicts.get("disproved").copied().unwrap_or(0));
    let ok = r.passed
        && total >= 100
        && agree == total
        && refuting == disproved
        && disproved > 0
        && verdicts.contains_key("proved");
    verdict(ok, format!("{agree}/{total} sampled sequents agree ({verdicts:?}), {refuting} countermodels refute"))
}

fn colimit(r: &SuiteReport, cfg: &VerifyConfig) -> Verdict {
    let mut small = true;
    let mut formulas_per_diagram = usize::MAX;
    for i in &r.instances {
        let stages = i.descriptor["stages"].as_array().unwrap();
        small &= stages.len() <= 5;
        for m in stages {
            small &= m["carriers"].as_object().unwrap().values().all(|c| c.as_array().unwrap().len() <= 5);
        }
        formulas_per_diagram = formulas_per_diagram.min(i.properties.len());
    }
    let bijections = r.instances.iter().filter(|i| i.properties.iter().all(|p| p.outcome == Outcome::Pass)).count();
    let ok = r.passed
        && r.instances.len() >= 200
        && small
        && formulas_per_diagram >= 3
        && bijections == r.instances.len()
        && cfg.stages <= 5
        && cfg.model_size <= 5
        && r.elapsed < Duration::from_secs(300);
    verdict(
        ok,
        format!(
            "{bijections}/{} diagrams preserve all of >= {formulas_per_diagram} formulas, {:.2?}",
            r.instances.len(),
            r.elapsed
        ),
    )
}

fn continuity(r: &SuiteReport) -> Verdict {
    let (exact, total) = passes(r, "preimage-exact");
    let (functional, _) = passes(r, "functional");
    let points: usize = r
        .instances
        .iter()
        .flat_map(|i| &i.properties)
        .filter(|p| p.property == "preimage-exact")
        .map(|p| p.checks)
        .sum();
    let ok = r.passed && total >= 50 && exact == total && functional == total;
    verdict(ok, format!("{exact}/{total} (sigma, open) instances exact on {points} points"))
}

fn action(r: &SuiteReport) -> Verdict {
    let (forward, total) = passes(r, "forward-inclusion");
    let verified = r.count("converse-inclusion", Outcome::Pass);
    let conditional = r.count("converse-inclusion", Outcome::BudgetExhausted);
    let terminated = total - conditional;
    let ok = r.passed && forward == total && verified == terminated && terminated * 5 >= total * 4;
    verdict(ok, format!("forward {forward}/{total}; converse verified {verified}/{terminated} terminating, {conditional} conditional"))
}

fn sections(r: &SuiteReport) -> Verdict {
    let (pass, total) = passes(r, "maps-section-values-to-section-values");
    let theories: BTreeSet<&str> = r.instances.iter().map(|i| theory_of(&i.id)).collect();
    let homs: usize = r.instances.iter().flat_map(|i| &i.properties).map(|p| p.checks).sum();
    let ok = r.passed && pass == total && theories.len() >= 5;
    verdict(ok, format!("{pass}/{total} sections, {homs} fixing homomorphisms checked"))
}

fn convergence(r: &SuiteReport, colimit: &SuiteReport) -> Verdict {
    let ids: BTreeSet<&str> = r.instances.iter().map(|i| i.id.as_str()).collect();
    let same = ids == colimit.instances.iter().map(|i| i.id.as_str()).collect();
    let (models, total) = passes(r, "model-net-has-tails");
    let (homs, _) = passes(r, "hom-net-has-tails");
    let ok = r.passed && same && models == total && homs == total && total >= 200;
    verdict(ok, format!("{models}/{total} model nets and {homs}/{total} hom nets have tails"))
}

fn support(r: &SuiteReport) -> Verdict {
    let (pass, total) = passes(r, "agreeing-homs-act-alike");
    let checks: usize = r.instances.iter().flat_map(|i| &i.properties).map(|p| p.checks).sum();
    verdict(r.passed && pass == total, format!("{pass}/{total} sheaves, {checks} hom actions compared"))
}

fn factorization(r: &SuiteReport) -> Verdict {
    let (pass, total) = passes(r, "iso-then-inclusion-recomposes");
    let injective: usize = r
        .instances
        .iter()
        .flat_map(|i| &i.properties)
        .filter(|p| p.property == "iso-then-inclusion-recomposes")
        .map(|p| p.checks)
        .sum();
    verdict(r.passed && pass == total && injective > 0, format!("{injective} injective homomorphisms recompose"))
}

fn main() {
    let cfg = VerifyConfig { seed: 2024, ..VerifyConfig::default() };
    let wb = Workbench::new(cfg.clone(), corpus());
    let reports = wb.run("all").expect("suites run");
    let by_id: BTreeMap<&str, &SuiteReport> = reports.iter().map(|r| (r.suite.as_str(), r)).collect();
    let results = [
        ("stone duality", stone(by_id["stone"])),
        ("universal models", universal(by_id["universal"])),
        ("genericity and entailment", genericity(by_id["genericity"])),
        ("filtered colimits", colimit(by_id["colimit"], &cfg)),
        ("continuity formulas", continuity(by_id["continuity"])),
        ("action image", action(by_id["action"])),
        ("well-behaved sections", sections(by_id["sections"])),
        ("net convergence", convergence(by_id["convergence"], by_id["colimit"])),
        ("support", support(by_id["support"])),
        ("factorization", factorization(by_id["factorization"])),
    ];
    for (k, (name, v)) in results.iter().enumerate() {
        println!("criterion {:>2} {:<27} {}  {}", k + 1, name, if v.ok { "PASS" } else { "FAIL" }, v.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|(_, v)| !v.ok).map(|(n, _)| *n).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
