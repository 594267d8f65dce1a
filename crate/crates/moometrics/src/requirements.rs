//! Requirement and use-case metrics.
//!
//! These operate on the declarative models from [`crate::ingest`]: simple
//! counts per use case (actors, messages, system classes) and set-level
//! ratios over the requirement list (review agreement, validity, entity
//! completeness, change volatility). All ratios are exact rationals.

use crate::model::{ChangeReason, RequirementSet, UseCaseModel, Validity};
use crate::value::{ratio, MetricError, MetricOutcome, Rational};

fn lookup_use_case<'a>(
    model: &'a UseCaseModel,
    use_case: &str,
) -> Result<&'a crate::model::UseCase, MetricError> {
    model.use_case(use_case).ok_or_else(|| MetricError::UnknownScope {
        kind: "use case",
        name: use_case.to_string(),
    })
}

/// Number of actors associated with a use case.
pub fn nau(model: &UseCaseModel, use_case: &str) -> Result<u64, MetricError> {
    Ok(lookup_use_case(model, use_case)?.actors.len() as u64)
}

/// Number of messages in a use case. Messages form a list, so a name
/// declared twice counts twice.
pub fn nmu(model: &UseCaseModel, use_case: &str) -> Result<u64, MetricError> {
    Ok(lookup_use_case(model, use_case)?.messages.len() as u64)
}

/// Number of system classes a use case touches (a set — duplicates
/// collapse at parse time).
pub fn nscu(model: &UseCaseModel, use_case: &str) -> Result<u64, MetricError> {
    Ok(lookup_use_case(model, use_case)?.classes.len() as u64)
}

/// Is this requirement reviewed identically by the full reviewer panel?
/// True only when every declared reviewer supplied a verdict and all the
/// labels are pairwise equal; a partially-reviewed requirement never counts.
fn identically_reviewed(req: &crate::model::Requirement, reviewers: &std::collections::BTreeSet<String>) -> bool {
    if !reviewers.iter().all(|r| req.reviewer_verdicts.contains_key(r)) {
        return false;
    }
    let mut labels = req.reviewer_verdicts.values();
    match labels.next() {
        Some(first) => labels.all(|l| l == first),
        None => false, // unreachable while reviewers is non-empty, but keep the guard honest
    }
}

/// Review-agreement ratio: requirements reviewed identically by all
/// declared reviewers, over all requirements.
pub fn qua(reqs: &RequirementSet) -> Result<Rational, MetricError> {
    if reqs.is_empty() {
        return Err(MetricError::Undefined {
            metric: "qua",
            reason: "no requirements",
        });
    }
    if reqs.reviewers.is_empty() {
        return Err(MetricError::Undefined {
            metric: "qua",
            reason: "no reviewers declared",
        });
    }
    let identical = reqs
        .requirements
        .iter()
        .filter(|r| identically_reviewed(r, &reqs.reviewers))
        .count() as i64;
    Ok(ratio(identical, reqs.len() as i64))
}

/// Validity ratio Nv/(Nnv·N). With no not-yet-valid requirements the
/// denominator vanishes, so the metric is not applicable; the fallback
/// Nv/N (then 1) is recorded so a gate can still pass a fully-valid set.
pub fn qc(reqs: &RequirementSet) -> Result<MetricOutcome, MetricError> {
    if reqs.is_empty() {
        return Err(MetricError::Undefined {
            metric: "qc",
            reason: "no requirements",
        });
    }
    let n = reqs.len() as i64;
    let valid = reqs
        .requirements
        .iter()
        .filter(|r| r.validity == Validity::Valid)
        .count() as i64;
    let not_yet = n - valid;
    if not_yet == 0 {
        Ok(MetricOutcome::not_applicable_with(ratio(valid, n)))
    } else {
        Ok(MetricOutcome::defined(ratio(valid, not_yet * n)))
    }
}

/// Fraction of an entity's required services that it actually provides.
/// Extra provided services are ignored.
pub fn completeness(reqs: &RequirementSet, entity: &str) -> Result<Rational, MetricError> {
    let checklist = reqs
        .entity_checklists
        .get(entity)
        .ok_or_else(|| MetricError::UnknownScope {
            kind: "entity",
            name: entity.to_string(),
        })?;
    let required = checklist.required.len() as i64;
    let covered = checklist.required.intersection(&checklist.provided).count() as i64;
    Ok(ratio(covered, required))
}

/// Count of requirement changes made for any reason other than a business
/// change, and that count over N. The count stands alone; only the ratio
/// needs a non-empty set.
pub fn volatility(reqs: &RequirementSet) -> (u64, Result<Rational, MetricError>) {
    let count = reqs
        .requirements
        .iter()
        .flat_map(|r| &r.changes)
        .filter(|c| c.reason != ChangeReason::Business)
        .count() as u64;
    let ratio_result = if reqs.is_empty() {
        Err(MetricError::Undefined {
            metric: "volatility",
            reason: "no requirements",
        })
    } else {
        Ok(ratio(count as i64, reqs.len() as i64))
    };
    (count, ratio_result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_requirements, parse_usecases};

    fn usecase_fixture() -> UseCaseModel {
        parse_usecases(
            "\
actor customer
actor clerk
actor auditor
usecase Checkout
uses Checkout customer
uses Checkout clerk
message Checkout scan
message Checkout scan
message Checkout pay
class Checkout Order
class Checkout Till
usecase Audit
uses Audit auditor
usecase Idle
",
            "fixture.ucm",
        )
        .expect("fixture parses")
    }

    #[test]
    fn actor_counts_per_use_case() {
        let model = usecase_fixture();
        assert_eq!(nau(&model, "Checkout"), Ok(2));
        assert_eq!(nau(&model, "Audit"), Ok(1));
        assert_eq!(nau(&model, "Idle"), Ok(0));
    }

    #[test]
    fn message_count_keeps_duplicates() {
        let model = usecase_fixture();
        // `scan` is listed twice and counts twice.
        assert_eq!(nmu(&model, "Checkout"), Ok(3));
        assert_eq!(nmu(&model, "Idle"), Ok(0));
    }

    #[test]
    fn class_count_is_a_set() {
        let model = usecase_fixture();
        assert_eq!(nscu(&model, "Checkout"), Ok(2));
        assert_eq!(nscu(&model, "Idle"), Ok(0));
    }

    #[test]
    fn unknown_use_case_is_a_lookup_error() {
        let model = usecase_fixture();
        assert_eq!(
            nau(&model, "Ghost"),
            Err(MetricError::UnknownScope {
                kind: "use case",
                name: "Ghost".to_string()
            })
        );
    }

    #[test]
    fn agreement_over_four_requirements() {
        // 2 reviewers; labels agree on R1, R2, R3; disagree on R4 → 3/4.
        let set = parse_requirements(
            "\
reviewer alice
reviewer bob
req R1 \"a\" valid
req R2 \"b\" valid
req R3 \"c\" valid
req R4 \"d\" valid
verdict R1 alice \"ok\"
verdict R1 bob \"ok\"
verdict R2 alice \"ok\"
verdict R2 bob \"ok\"
verdict R3 alice \"fine\"
verdict R3 bob \"fine\"
verdict R4 alice \"ok\"
verdict R4 bob \"vague\"
",
            "qua.req",
        )
        .unwrap();
        assert_eq!(qua(&set), Ok(ratio(3, 4)));
    }

    #[test]
    fn partial_review_and_disagreement_both_disqualify() {
        // 5 requirements: R2 lacks bob's verdict, R4 has differing labels.
        // Hand enumeration: R1 ✓, R2 ✗ (partial), R3 ✓, R4 ✗ (labels), R5 ✓.
        let set = parse_requirements(
            "\
reviewer alice
reviewer bob
req R1 \"a\" valid
req R2 \"b\" valid
req R3 \"c\" valid
req R4 \"d\" valid
req R5 \"e\" valid
verdict R1 alice \"x\"
verdict R1 bob \"x\"
verdict R2 alice \"x\"
verdict R3 alice \"y\"
verdict R3 bob \"y\"
verdict R4 alice \"x\"
verdict R4 bob \"y\"
verdict R5 alice \"z\"
verdict R5 bob \"z\"
",
            "qua5.req",
        )
        .unwrap();
        assert_eq!(qua(&set), Ok(ratio(3, 5)));
    }

    #[test]
    fn full_agreement_is_one() {
        let set = parse_requirements(
            "reviewer a\nreq R1 \"x\" valid\nverdict R1 a \"ok\"\n",
            "one.req",
        )
        .unwrap();
        assert_eq!(qua(&set), Ok(ratio(1, 1)));
    }

    #[test]
    fn agreement_needs_requirements_and_reviewers() {
        let empty = RequirementSet::default();
        assert!(matches!(qua(&empty), Err(MetricError::Undefined { .. })));

        let no_reviewers =
            parse_requirements("req R1 \"x\" valid\n", "norev.req").unwrap();
        assert!(matches!(qua(&no_reviewers), Err(MetricError::Undefined { .. })));
    }

    fn validity_set(valid: usize, not_yet: usize) -> RequirementSet {
        let mut text = String::new();
        for i in 0..valid {
            text.push_str(&format!("req V{i} \"v\" valid\n"));
        }
        for i in 0..not_yet {
            text.push_str(&format!("req N{i} \"n\" notyetvalid\n"));
        }
        parse_requirements(&text, "validity.req").unwrap()
    }

    #[test]
    fn validity_ratio_follows_the_formula() {
        // Nv=8, Nnv=2, N=10 → 8/20.
        assert_eq!(
            qc(&validity_set(8, 2)),
            Ok(MetricOutcome::defined(ratio(8, 20)))
        );
        // Nv=1, Nnv=2, N=3 → 1/6.
        assert_eq!(
            qc(&validity_set(1, 2)),
            Ok(MetricOutcome::defined(ratio(1, 6)))
        );
    }

    #[test]
    fn all_valid_set_is_not_applicable_with_fallback_one() {
        let outcome = qc(&validity_set(10, 0)).unwrap();
        assert!(!outcome.is_defined());
        assert_eq!(outcome.fallback(), Some(ratio(1, 1)));
    }

    #[test]
    fn validity_needs_requirements() {
        assert!(matches!(
            qc(&RequirementSet::default()),
            Err(MetricError::Undefined { .. })
        ));
    }

    #[test]
    fn entity_completeness_is_provided_over_required() {
        let set = parse_requirements(
            "\
entity List requires add,delete,find,size
entity List provides add,delete
entity Full requires a,b
entity Full provides b,a,extra
entity Bare requires a,b
",
            "compl.req",
        )
        .unwrap();
        assert_eq!(completeness(&set, "List"), Ok(ratio(1, 2)));
        // Extras are ignored by the intersection.
        assert_eq!(completeness(&set, "Full"), Ok(ratio(1, 1)));
        assert_eq!(completeness(&set, "Bare"), Ok(ratio(0, 1)));
        assert!(matches!(
            completeness(&set, "Ghost"),
            Err(MetricError::UnknownScope { .. })
        ));
    }

    #[test]
    fn volatility_counts_non_business_changes() {
        let set = parse_requirements(
            "\
req R1 \"a\" valid
req R2 \"b\" valid
req R3 \"c\" valid
change R1 1 business
change R1 2 error
change R2 1 clarification
",
            "vol.req",
        )
        .unwrap();
        let (count, ratio_result) = volatility(&set);
        assert_eq!(count, 2);
        assert_eq!(ratio_result, Ok(ratio(2, 3)));
    }

    #[test]
    fn all_business_changes_count_zero() {
        let set = parse_requirements(
            "req R1 \"a\" valid\nchange R1 1 business\nchange R1 2 business\n",
            "biz.req",
        )
        .unwrap();
        let (count, ratio_result) = volatility(&set);
        assert_eq!(count, 0);
        assert_eq!(ratio_result, Ok(ratio(0, 1)));
    }

    #[test]
    fn volatility_count_survives_an_empty_set() {
        let (count, ratio_result) = volatility(&RequirementSet::default());
        assert_eq!(count, 0);
        assert!(matches!(ratio_result, Err(MetricError::Undefined { .. })));
    }

    #[test]
    fn agreement_moves_incrementally_when_a_reviewed_requirement_arrives() {
        // Recomputing after adding one fully-agreed requirement must equal
        // (old·N + 1) / (N + 1).
        let mut text = String::from(
            "reviewer a\nreviewer b\nreq R1 \"x\" valid\nreq R2 \"y\" valid\nverdict R1 a \"ok\"\nverdict R1 b \"ok\"\n",
        );
        let before = parse_requirements(&text, "inc.req").unwrap();
        let old = qua(&before).unwrap();
        let n = before.len() as i64;

        text.push_str("req R3 \"z\" valid\nverdict R3 a \"ok\"\nverdict R3 b \"ok\"\n");
        let after = parse_requirements(&text, "inc.req").unwrap();
        assert_eq!(
            qua(&after).unwrap(),
            (old * ratio(n, 1) + ratio(1, 1)) / ratio(n + 1, 1)
        );
    }
}
