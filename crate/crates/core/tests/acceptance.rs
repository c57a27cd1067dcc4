use cohesive_core::acceptance::{selftest, SuiteConfig, BUDGETS};

#[test]
fn acceptance() {
    let (report, times) = selftest(&SuiteConfig::default());
    print!("{report}");
    for ((id, budget), t) in BUDGETS.iter().zip(&times) {
        let within = t.as_secs_f64() <= *budget as f64;
        println!("{} criterion {id} runtime: {:.2}s (budget {budget}s)", if within { "PASS" } else { "SLOW" }, t.as_secs_f64());
    }
    assert!(report.passed(), "{report}");
}

#[test]
fn koszul_flip_breaks_the_axiom_suite() {
    use cohesive_core::acceptance::{run_criteria, Mutation};
    let cfg = SuiteConfig { mutation: Mutation::KoszulFlip, ..SuiteConfig::default() };
    let (report, _) = run_criteria(&cfg);
    let axioms = &report.criteria[0];
    assert!(!axioms.passed, "{}", axioms.detail);
    assert!(axioms.detail.contains("d²φ ≠ 0"), "{}", axioms.detail);
    assert!(report.criteria[1..].iter().all(|c| c.passed));
}
