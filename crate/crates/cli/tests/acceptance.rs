use std::io::Write;

use radflow_cli::acceptance::{run_all, Verdict, DEFAULT_SEED};

#[test]
fn acceptance_criteria() {
    let criteria = run_all(DEFAULT_SEED);
    assert_eq!(criteria.len(), 9);
    // Written to stderr directly so the summary shows without --nocapture.
    let mut err = std::io::stderr().lock();
    for c in &criteria {
        writeln!(err, "{}", c.line()).unwrap();
        for check in c.checks.iter().filter(|k| !k.ok) {
            let tag = if check.literal { "refuted as printed" } else { "FAILED" };
            let value = check.value.map(|v| format!(" = {v:e}")).unwrap_or_default();
            writeln!(err, "    {tag}: {}{value}", check.label).unwrap();
        }
    }
    let failed: Vec<u32> = criteria.iter().filter(|c| !c.acceptable()).map(|c| c.id).collect();
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
    let errata: Vec<u32> = criteria
        .iter()
        .filter(|c| c.verdict == Verdict::Erratum)
        .map(|c| c.id)
        .collect();
    assert_eq!(errata, vec![3, 5, 6]);
}
