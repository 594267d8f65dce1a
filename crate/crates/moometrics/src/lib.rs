//! Quality-metrics engine for MiniOO sources, requirement sets, use-case
//! models, and coverage traces, with configurable CI gates.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`frontend`] parses `.moo` units and lowers them into a resolved
//!    [`model::DesignModel`]; [`ingest`] reads the declarative side files
//!    (`.req`, `.ucm`, `.trc`, `.chk`).
//! 2. [`design`], [`requirements`], and [`coverage`] compute the metrics:
//!    the Chidamber–Kemerer class suite, Robert Martin's package coupling
//!    measures, requirement review scores, trace coverage, and the quality
//!    checklist.
//! 3. [`report`] arranges everything into sections of rows, evaluates them
//!    against a [`report::ThresholdConfig`], and renders JSON, CSV, or
//!    Markdown.
//! 4. [`cli`] wires those stages into the `analyze`, `requirements`,
//!    `coverage`, and `check` subcommands behind the `moometrics` binary.
//!
//! The `examples/` directory is the front door — one runnable program per
//! capability, each self-contained with inline sources:
//!
//! - `analyze_source` — class metrics straight from source text
//! - `package_health` — coupling, instability, cycles, encapsulation
//! - `requirement_quality` — review agreement, correctness, volatility
//! - `use_case_counts` — actors, messages, classes per use case
//! - `coverage_report` — symbol/method/branch coverage from traces
//! - `checklist_scores` — declared plus derived checks by category
//! - `quality_gates` — thresholds, violations, and rendered reports
//!
//! Ratios are exact rationals ([`value::Rational`]) end to end; rendering
//! fixes them to six decimal places only at the edge, so reports are
//! byte-stable across runs and platforms.

pub mod cli;
pub mod coverage;
pub mod design;
pub mod frontend;
pub mod ingest;
pub mod model;
pub mod report;
pub mod requirements;
pub mod value;
