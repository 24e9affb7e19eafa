use bunkbed::verify::{run_criterion, CRITERIA};

/// Criteria that cannot pass as published, with the reason.
const KNOWN_UNATTAINABLE: &[(usize, &str)] = &[(
    10,
    "published |V| = 7523 for clone-build(102) disagrees with 7222 + 3 * 101 = 7525; |E| = 15654 matches",
)];

fn main() {
    let results: Vec<_> = (1..=CRITERIA).map(run_criterion).collect();
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("{} of {} criteria pass", CRITERIA - failed.len(), CRITERIA);
    for (id, why) in KNOWN_UNATTAINABLE {
        if failed.contains(id) {
            println!("criterion {id} known unattainable: {why}");
        }
    }
    let unexpected: Vec<_> = failed.iter().filter(|id| !KNOWN_UNATTAINABLE.iter().any(|(k, _)| k == *id)).collect();
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
