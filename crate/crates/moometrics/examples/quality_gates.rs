//! The whole pipeline: analyze source, evaluate thresholds from a config
//! file, and render the report — once passing, once failing.
//!
//! Run with: cargo run --example quality_gates

use moometrics::frontend::{lower, parse_unit};
use moometrics::report::{
    design_section, evaluate, parse_config, render, AnalysisResults, DesignOptions, ReportFormat,
    Verdict,
};

const SOURCE: &str = r#"
package queue;

class Buffer {
  field items;
  field limit;

  push(item) {
    access Buffer.limit;
    if (full) {
      return;
    }
    assign items;
  }

  drain() {
    while (pending) {
      access Buffer.items;
    }
  }

  reset() {
    assign items;
    assign limit;
  }
}
"#;

// Same config twice, except for the complexity ceiling. Keys mirror the
// report's metric names; unknown keys are rejected, not ignored.
const STRICT_GATES: &str = "max_wmc = 4\nmax_lcom = 1\nrequire_acyclic = true\n";
const RELAXED_GATES: &str = "max_wmc = 6\nmax_lcom = 1\nrequire_acyclic = true\n";

fn main() {
    let unit = parse_unit(SOURCE, "queue.moo").expect("example source parses");
    let model = lower(&[unit]).expect("example source resolves");

    let options = DesignOptions::default();
    let results = AnalysisResults {
        sections: vec![design_section(&model, &options)],
        gated_wmc: options.gated_wmc_metric(),
    };

    for (label, text) in [("strict", STRICT_GATES), ("relaxed", RELAXED_GATES)] {
        let config = parse_config(text, "gates.cfg").expect("config parses");
        let report = evaluate(&results, &config);
        println!("== {label} gates ==");
        for violation in &report.violations {
            println!(
                "violation: {} at {}: observed {}, limit {}",
                violation.metric, violation.scope, violation.observed, violation.threshold
            );
        }
        let verdict = match report.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        };
        println!("verdict: {verdict}");
        println!();
    }

    // Render the passing run as markdown; JSON and CSV are one enum
    // variant away.
    let config = parse_config(RELAXED_GATES, "gates.cfg").expect("config parses");
    let report = evaluate(&results, &config);
    print!("{}", render(&report, ReportFormat::Markdown));
}
