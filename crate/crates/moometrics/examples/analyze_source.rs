//! Parse MiniOO source text and print the class-level design metrics.
//!
//! Run with: cargo run --example analyze_source

use moometrics::design::{cbo, dit, lcom, noc, rfc, wmc, WmcWeighting};
use moometrics::frontend::{lower, parse_unit};
use moometrics::value::MetricOutcome;

const SOURCE: &str = r#"
package store;

interface Catalog {
  lookup(sku);
}

abstract class Item {
  field sku;
  field price;

  reprice(amount) {
    assign price;
  }
}

class Book extends Item implements Catalog {
  field title;

  lookup(sku) {
    access Book.title;
    if (match) {
      return;
    }
    return;
  }

  discount() {
    access Book.title;
    while (seasonal) {
      call Item.reprice(cut);
    }
  }
}
"#;

fn show(outcome: MetricOutcome) -> String {
    match outcome.value() {
        Some(v) => v.to_string(),
        None => "n/a".to_string(),
    }
}

fn main() {
    let unit = parse_unit(SOURCE, "store.moo").expect("example source parses");
    let model = lower(&[unit]).expect("example source resolves");

    println!(
        "{:<14} {:>8} {:>8} {:>4} {:>4} {:>4} {:>4} {:>5}",
        "class", "wmc(cyc)", "wmc(1)", "rfc", "noc", "dit", "cbo", "lcom"
    );
    for (fq, _) in model.classes() {
        println!(
            "{:<14} {:>8} {:>8} {:>4} {:>4} {:>4} {:>4} {:>5}",
            fq,
            show(wmc(&model, &fq, WmcWeighting::Cyclomatic).unwrap()),
            show(wmc(&model, &fq, WmcWeighting::Unit).unwrap()),
            rfc(&model, &fq).unwrap(),
            noc(&model, &fq).unwrap(),
            dit(&model, &fq).unwrap(),
            cbo(&model, &fq, false).unwrap(),
            lcom(&model, &fq).unwrap(),
        );
    }
}
