//! Score the quality checklist: eight declared yes/no facts plus two
//! checks derived from the model (comment density and modularity), rolled
//! up into per-category ratios.
//!
//! Run with: cargo run --example checklist_scores

use moometrics::coverage::{checklist, Category, ChecklistParams};
use moometrics::frontend::{lower, parse_unit};
use moometrics::ingest::parse_checklist_facts;
use moometrics::value::format_rational;

const SOURCE: &str = r#"
package kit;

class Tool {
  field worn;

  use(times) {
    // wear accumulates on every use
    assign worn;
  }
}

class Bench {
  field slots;

  mount(tool) {
    assign slots;
  }
}
"#;

// Only declarable facts may appear here; the derived ids are rejected.
const FACTS: &str = r#"
testable.logging = true
testable.scriptable_interface = true
testable.runtime_monitoring = false
supportable.error_messages = true
maintainable.reviewability = true
maintainable.accessibility = true
portable.platform_independent = true
portable.deploy_documented = true
"#;

fn main() {
    let unit = parse_unit(SOURCE, "kit.moo").expect("example source parses");
    let model = lower(&[unit]).expect("example source resolves");
    let facts = parse_checklist_facts(FACTS, "example.chk").expect("facts parse");

    let result = checklist(&model, &facts, &ChecklistParams::default()).expect("facts complete");

    for check in &result.checks {
        let origin = if check.derived { "derived" } else { "declared" };
        let state = if check.value { "pass" } else { "FAIL" };
        println!("{:<34} {:<8} {}", check.id, origin, state);
    }
    // One comment line out of seven method lines clears the 10% density
    // floor, but a single package holding both classes exceeds the 50%
    // modularity cap, so the maintainable category drops a point.
    println!();
    for category in Category::ALL {
        let score = &result.categories[&category];
        println!(
            "{:<13} {}/{} = {}",
            category.to_string(),
            score.passed,
            score.total,
            format_rational(&score.score())
        );
    }
}
