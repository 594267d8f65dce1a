//! Package-level architecture metrics: efferent/afferent coupling,
//! instability, abstractness, dependency inversion, dependency cycles,
//! and child-package encapsulation.
//!
//! Run with: cargo run --example package_health

use moometrics::design::{abstractness, adp, dip, ep, instability, package_coupling};
use moometrics::frontend::{lower, parse_unit};
use moometrics::value::{format_rational, MetricOutcome};

// Four packages. `app.web` depends on the `Store` abstraction, so its
// dependency-inversion ratio is 1. `util` and `app.data` call each other,
// which the cycle check reports. `util` also reaches into `app.data` from
// outside the `app` subtree, so one of `app`'s two children leaks.
const UNITS: &[(&str, &str)] = &[
    (
        "app.moo",
        "package app;\n\
         import app.web.Controller;\n\
         class Main {\n\
           run() { call Controller.handle(request); }\n\
         }\n",
    ),
    (
        "web.moo",
        "package app.web;\n\
         import app.data.Store;\n\
         class Controller {\n\
           handle(request) { call Store.save(request); }\n\
         }\n",
    ),
    (
        "data.moo",
        "package app.data;\n\
         import util.Log;\n\
         interface Store {\n\
           save(row);\n\
         }\n\
         class DbStore implements Store {\n\
           field rows;\n\
           save(row) { assign rows; call Log.write(row); }\n\
           flush() { return; }\n\
         }\n",
    ),
    (
        "util.moo",
        "package util;\n\
         import app.data.DbStore;\n\
         class Log {\n\
           write(message) { call DbStore.flush(); }\n\
         }\n",
    ),
];

fn percent(outcome: MetricOutcome) -> String {
    match outcome.value() {
        Some(v) => format_rational(&v),
        None => "n/a".to_string(),
    }
}

fn main() {
    let units: Vec<_> = UNITS
        .iter()
        .map(|(path, text)| parse_unit(text, path).expect("example source parses"))
        .collect();
    let model = lower(&units).expect("example source resolves");

    println!(
        "{:<10} {:>3} {:>3} {:>9} {:>9} {:>9} {:>6}",
        "package", "ce", "ca", "I", "A", "dip", "ep%"
    );
    for name in model.packages.keys() {
        let (ce, ca) = package_coupling(&model, name).unwrap();
        println!(
            "{:<10} {:>3} {:>3} {:>9} {:>9} {:>9} {:>6}",
            name,
            ce,
            ca,
            percent(instability(ce, ca)),
            percent(abstractness(&model, name).unwrap()),
            percent(dip(&model, name).unwrap()),
            format_rational(&ep(&model, name).unwrap()),
        );
    }

    let cycles = adp(&model);
    println!();
    if cycles.acyclic {
        println!("package graph is acyclic");
    } else {
        for group in &cycles.cycles {
            println!("dependency cycle: {}", group.join(" <-> "));
        }
    }
}
