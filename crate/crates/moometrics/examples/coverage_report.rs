//! Dynamic coverage from execution traces: sequence points, method
//! entries, and branch arms, unioned over any number of runs.
//!
//! Run with: cargo run --example coverage_report

use moometrics::coverage::{coverage, entry_warnings, uncovered_points, CoverageScope};
use moometrics::frontend::{lower, parse_unit, symbol_listing};
use moometrics::ingest::parse_trace;
use moometrics::model::{CoverageTrace, TraceEvent};
use moometrics::value::format_rational;

const SOURCE: &str = r#"
package till;

class Drawer {
  field cash;

  open(key) {
    access Drawer.cash;
    if (locked) {
      return;
    }
    assign cash;
  }

  close() {
    return;
  }
}

class Till {
  field drawer;

  ring(sale) {
    call Drawer.open(key);
    while (items) {
      assign drawer;
    }
    return;
  }
}
"#;

// Sequence points and branches are numbered model-wide over methods in
// name order: close gets sp1, open sp2..sp5 with br1, ring sp6..sp9
// with br2. A trace is one run; `M` enters a method, `S` executes a
// point, `B` takes one arm of a branch.
const RUN_ONE: &str = r#"
M till.Till.ring
S sp6
S sp7
B br2 taken
S sp8
S sp7
B br2 not_taken
S sp9
M till.Drawer.open
S sp2
S sp3
B br1 not_taken
S sp5
"#;

fn main() {
    let unit = parse_unit(SOURCE, "till.moo").expect("example source parses");
    let units = vec![unit];
    let model = lower(&units).expect("example source resolves");

    // The listing below is where the ids come from; trace writers consult
    // it rather than re-deriving the numbering.
    println!("-- symbol listing --");
    print!("{}", symbol_listing(&model, &units));
    println!();

    let parsed = parse_trace(RUN_ONE, "run_one.trc", "run_one").expect("trace parses");
    // Traces can also be assembled in code — here a run that recorded a
    // point inside `close` but lost the method-entry event.
    let manual = CoverageTrace {
        run_id: "run_two".into(),
        events: vec![TraceEvent::point("sp1")],
    };
    let traces = vec![parsed, manual];

    let result = coverage(&model, &traces, &CoverageScope::Model).expect("ids resolve");
    let show = |label: &str, outcome: moometrics::value::MetricOutcome, executed: u64, total: u64| {
        let value = outcome
            .value()
            .map(|v| format_rational(&v))
            .unwrap_or_else(|| "n/a".into());
        println!("{label:<18} {value}  ({executed}/{total})");
    };
    show("symbol coverage", result.symbol_coverage(), result.points_executed, result.points_total);
    show("method coverage", result.method_coverage(), result.methods_executed, result.methods_total);
    show("branch coverage", result.branch_coverage(), result.branch_arms_executed, result.branch_arms_total);

    println!("never executed:    {:?}", uncovered_points(&model, &traces));
    println!("missing entry for: {:?}", entry_warnings(&model, &traces));
}
