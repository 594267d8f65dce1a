//! Score a requirement set: unambiguity across reviewers, the correctness
//! ratio, per-entity completeness, and volatility from the change log.
//!
//! Run with: cargo run --example requirement_quality

use moometrics::ingest::parse_requirements;
use moometrics::requirements::{completeness, qc, qua, volatility};
use moometrics::value::format_rational;

// Three reviewers, four requirements. R2 is unambiguous but still invalid;
// R3 collects contradictory verdicts; R4 has churned twice.
const REVIEW_RECORD: &str = r#"
reviewer ana
reviewer ben
reviewer cho

req R1 "Sessions expire after an idle period" valid
req R2 "Exports include every audit field" notyetvalid
req R3 "Deletion is reversible for a grace period" valid
req R4 "Imports tolerate duplicate keys" valid

verdict R1 ana "ok"
verdict R1 ben "ok"
verdict R1 cho "ok"
verdict R2 ana "needs-schema"
verdict R2 ben "needs-schema"
verdict R2 cho "needs-schema"
verdict R3 ana "ok"
verdict R3 ben "conflicts-with-retention"
verdict R3 cho "ok"
verdict R4 ana "ok"
verdict R4 ben "ok"

change R4 1 clarification
change R4 2 error

entity Session requires open,expire,resume
entity Session provides open,expire
entity Export requires render
entity Export provides render
"#;

fn main() {
    let set = parse_requirements(REVIEW_RECORD, "example.req").expect("record parses");

    // R1 and R2 carry identical labels from all three reviewers; R3
    // disagrees and R4 is missing cho's verdict.
    println!("unambiguity (QUA): {}", format_rational(&qua(&set).unwrap()));

    // Correctness divides the valid count by invalid-count * N.
    let correctness = qc(&set).unwrap();
    match correctness.value() {
        Some(v) => println!("correctness (QC):  {}", format_rational(&v)),
        None => println!(
            "correctness (QC):  n/a (nothing invalid), valid share {}",
            format_rational(&correctness.fallback().unwrap())
        ),
    }

    for entity in set.entity_checklists.keys() {
        println!(
            "completeness[{entity}]: {}",
            format_rational(&completeness(&set, entity).unwrap())
        );
    }

    let (changes, ratio) = volatility(&set);
    println!(
        "volatility: {changes} changes, {} per requirement",
        format_rational(&ratio.unwrap())
    );
}
