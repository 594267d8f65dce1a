//! Property tests: invariants that must hold for every input, not just
//! the fixtures. Each case is generated, so shrinking gives a minimal
//! counterexample when something breaks.

use std::collections::BTreeMap;

use proptest::collection::{btree_set, vec};
use proptest::option;
use proptest::prelude::*;

use moometrics::frontend::{lower, parse_unit};
use moometrics::ingest::{parse_requirements, parse_usecases, write_requirements, write_usecases};
use moometrics::model::{
    ChangeReason, EntityChecklist, Requirement, RequirementChange, RequirementSet, UseCase,
    UseCaseModel, Validity,
};
use moometrics::report::{
    render, MetricsReport, ReportFormat, Row, RowValue, Section, Verdict,
};
use moometrics::value::{format_rational, parse_decimal, ratio};

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,8}"
}

fn label() -> impl Strategy<Value = String> {
    "[a-z][a-z ]{0,12}"
}

// ---------------------------------------------------------------------------
// Requirement and use-case files survive a write/parse round trip
// ---------------------------------------------------------------------------

fn change_reasons() -> impl Strategy<Value = ChangeReason> {
    prop_oneof![
        Just(ChangeReason::Business),
        Just(ChangeReason::Clarification),
        Just(ChangeReason::Error),
        Just(ChangeReason::Scope),
        Just(ChangeReason::Other),
    ]
}

fn requirement_sets() -> impl Strategy<Value = RequirementSet> {
    let reviewers = btree_set(ident(), 0..4);
    reviewers.prop_flat_map(|reviewers| {
        let reviewer_pool: Vec<String> = reviewers.iter().cloned().collect();
        let verdicts = if reviewer_pool.is_empty() {
            Just(BTreeMap::new()).boxed()
        } else {
            vec(
                (0..reviewer_pool.len(), label()),
                0..=reviewer_pool.len(),
            )
            .prop_map(move |pairs| {
                pairs
                    .into_iter()
                    .map(|(i, l)| (reviewer_pool[i].clone(), l))
                    .collect::<BTreeMap<String, String>>()
            })
            .boxed()
        };
        let requirement = (any::<bool>(), verdicts, vec(change_reasons(), 0..4), label()).prop_map(
            |(valid, reviewer_verdicts, reasons, text)| {
                let changes = reasons
                    .into_iter()
                    .enumerate()
                    .map(|(i, reason)| RequirementChange {
                        seq: i as u64 + 1,
                        reason,
                    })
                    .collect();
                Requirement {
                    id: String::new(), // filled in below with a unique id
                    text,
                    validity: if valid {
                        Validity::Valid
                    } else {
                        Validity::NotYetValid
                    },
                    reviewer_verdicts,
                    changes,
                }
            },
        );
        let entities = proptest::collection::btree_map(
            ident(),
            (btree_set(ident(), 1..4), btree_set(ident(), 0..4)),
            0..3,
        )
        .prop_map(|map| {
            map.into_iter()
                .map(|(name, (required, provided))| {
                    (name, EntityChecklist { required, provided })
                })
                .collect::<BTreeMap<String, EntityChecklist>>()
        });
        (vec(requirement, 0..6), entities).prop_map(move |(mut requirements, entities)| {
            for (i, req) in requirements.iter_mut().enumerate() {
                req.id = format!("r{i}");
            }
            RequirementSet {
                requirements,
                reviewers: reviewers.clone(),
                entity_checklists: entities,
            }
        })
    })
}

proptest! {
    #[test]
    fn requirement_files_round_trip(set in requirement_sets()) {
        let text = write_requirements(&set);
        let reparsed = parse_requirements(&text, "roundtrip.req")
            .expect("written file must parse");
        prop_assert_eq!(reparsed, set);
    }
}

fn use_case_models() -> impl Strategy<Value = UseCaseModel> {
    btree_set(ident(), 0..4).prop_flat_map(|actors| {
        let actor_pool: Vec<String> = actors.iter().cloned().collect();
        let use_case = (
            vec(0..actor_pool.len().max(1), 0..3),
            vec(ident(), 0..4),
            btree_set(ident(), 0..4),
        )
            .prop_map({
                let actor_pool = actor_pool.clone();
                move |(actor_picks, messages, classes)| UseCase {
                    name: String::new(), // filled in below with a unique name
                    actors: actor_picks
                        .into_iter()
                        .filter_map(|i| actor_pool.get(i).cloned())
                        .collect(),
                    messages,
                    classes,
                }
            });
        (Just(actors), vec(use_case, 0..4)).prop_map(|(actors, mut use_cases)| {
            for (i, use_case) in use_cases.iter_mut().enumerate() {
                use_case.name = format!("uc{i}");
            }
            UseCaseModel { actors, use_cases }
        })
    })
}

proptest! {
    #[test]
    fn use_case_files_round_trip(model in use_case_models()) {
        let text = write_usecases(&model);
        let reparsed = parse_usecases(&text, "roundtrip.ucm")
            .expect("written file must parse");
        prop_assert_eq!(reparsed, model);
    }
}

// ---------------------------------------------------------------------------
// Every statement is a sequence point; every header is a branch
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum GenStmt {
    Call,
    Access,
    Assign,
    Return,
    If(Vec<GenStmt>, Option<Vec<GenStmt>>),
    While(Vec<GenStmt>),
}

fn gen_stmts() -> impl Strategy<Value = Vec<GenStmt>> {
    let leaf = prop_oneof![
        Just(GenStmt::Call),
        Just(GenStmt::Access),
        Just(GenStmt::Assign),
        Just(GenStmt::Return),
    ];
    let stmt = leaf.prop_recursive(3, 24, 4, |inner| {
        let block = vec(inner.clone(), 0..4);
        prop_oneof![
            (block.clone(), option::of(vec(inner.clone(), 0..4)))
                .prop_map(|(t, e)| GenStmt::If(t, e)),
            vec(inner, 0..4).prop_map(GenStmt::While),
        ]
    });
    vec(stmt, 0..6)
}

fn statement_count(stmts: &[GenStmt]) -> u64 {
    stmts
        .iter()
        .map(|stmt| match stmt {
            GenStmt::Call | GenStmt::Access | GenStmt::Assign | GenStmt::Return => 1,
            GenStmt::If(then, else_) => {
                1 + statement_count(then)
                    + else_.as_deref().map(statement_count).unwrap_or(0)
            }
            GenStmt::While(body) => 1 + statement_count(body),
        })
        .sum()
}

fn branch_count(stmts: &[GenStmt]) -> u64 {
    stmts
        .iter()
        .map(|stmt| match stmt {
            GenStmt::If(then, else_) => {
                1 + branch_count(then) + else_.as_deref().map(branch_count).unwrap_or(0)
            }
            GenStmt::While(body) => 1 + branch_count(body),
            _ => 0,
        })
        .sum()
}

fn render_stmts(stmts: &[GenStmt], indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    for stmt in stmts {
        match stmt {
            GenStmt::Call => out.push_str(&format!("{pad}call C.helper();\n")),
            GenStmt::Access => out.push_str(&format!("{pad}access C.x;\n")),
            GenStmt::Assign => out.push_str(&format!("{pad}assign x;\n")),
            GenStmt::Return => out.push_str(&format!("{pad}return;\n")),
            GenStmt::If(then, else_) => {
                out.push_str(&format!("{pad}if (cond) {{\n"));
                render_stmts(then, indent + 1, out);
                match else_ {
                    Some(else_) => {
                        out.push_str(&format!("{pad}}} else {{\n"));
                        render_stmts(else_, indent + 1, out);
                        out.push_str(&format!("{pad}}}\n"));
                    }
                    None => out.push_str(&format!("{pad}}}\n")),
                }
            }
            GenStmt::While(body) => {
                out.push_str(&format!("{pad}while (go) {{\n"));
                render_stmts(body, indent + 1, out);
                out.push_str(&format!("{pad}}}\n"));
            }
        }
    }
}

proptest! {
    #[test]
    fn every_statement_is_one_sequence_point(stmts in gen_stmts()) {
        let mut source = String::from("package p;\nclass C {\n  field x;\n  helper() {\n  }\n  m() {\n");
        render_stmts(&stmts, 2, &mut source);
        source.push_str("  }\n}\n");
        let unit = parse_unit(&source, "gen.moo").expect("generated source parses");
        let model = lower(&[unit]).expect("generated source lowers");
        let method = &model.packages["p"].classes["C"].methods["m"];
        prop_assert_eq!(method.facts.sequence_points.len() as u64, statement_count(&stmts));
        prop_assert_eq!(method.facts.branches.len() as u64, branch_count(&stmts));
        prop_assert_eq!(method.facts.decision_points, branch_count(&stmts));
    }
}

// ---------------------------------------------------------------------------
// Rational rendering
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn six_digit_rendering_round_trips_within_half_a_step(n in -1_000_000i64..1_000_000, d in 1i64..10_000) {
        let value = ratio(n, d);
        let text = format_rational(&value);
        // Shape: optional minus, digits, dot, exactly six digits.
        let body = text.strip_prefix('-').unwrap_or(&text);
        let (integral, fraction) = body.split_once('.').expect("decimal point");
        prop_assert!(!integral.is_empty() && integral.chars().all(|c| c.is_ascii_digit()));
        prop_assert_eq!(fraction.len(), 6);
        prop_assert!(fraction.chars().all(|c| c.is_ascii_digit()));
        // Parsing back lands within half of the last rendered digit.
        let reparsed = parse_decimal(&text).expect("rendered value parses");
        let error = if reparsed > value { reparsed - value } else { value - reparsed };
        prop_assert!(error <= ratio(1, 2_000_000), "{} vs {}", text, value);
    }
}

// ---------------------------------------------------------------------------
// Report rendering is total and deterministic
// ---------------------------------------------------------------------------

fn rows() -> impl Strategy<Value = Vec<Row>> {
    let value = prop_oneof![
        (-10_000i64..10_000, 1i64..1_000)
            .prop_map(|(n, d)| RowValue::Number(ratio(n, d))),
        label().prop_map(RowValue::Text),
        Just(RowValue::NotApplicable),
    ];
    vec(
        (ident(), ident(), value).prop_map(|(metric, scope, value)| Row {
            metric,
            scope,
            value,
        }),
        0..12,
    )
}

proptest! {
    #[test]
    fn reports_render_identically_twice_and_csv_has_one_line_per_row(rows in rows()) {
        let row_count = rows.len();
        let report = MetricsReport {
            sections: vec![Section { title: "design", rows }],
            violations: vec![],
            verdict: Verdict::Pass,
        };
        for format in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown] {
            prop_assert_eq!(render(&report, format), render(&report, format));
        }
        let csv = render(&report, ReportFormat::Csv);
        prop_assert_eq!(csv.lines().count(), row_count + 1);
        let json = render(&report, ReportFormat::Json);
        let parsed: serde_json::Value = serde_json::from_str(&json).expect("valid json");
        prop_assert_eq!(parsed["verdict"].as_str(), Some("pass"));
    }
}
