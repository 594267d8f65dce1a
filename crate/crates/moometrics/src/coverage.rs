//! Coverage ratios and code-base checklist scoring.
//!
//! Coverage joins the static inventory of a design model (bodied methods,
//! sequence points, branch arms) against the union of one or more execution
//! traces. Evaluation is strictly set-based: event order and duplication
//! never change a ratio, and appending events can only move ratios up.
//!
//! The checklist scorer evaluates a fixed registry of yes/no checks split
//! into four categories. Most checks are declared facts supplied by the
//! team; two are derived from the model itself (comment density and class
//! modularity).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{Arm, CoverageTrace, DesignModel, EventKind};
use crate::value::{ratio, MetricOutcome, Rational};

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

/// What part of the model a coverage query ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverageScope {
    Model,
    /// One package, by path (exact match, not the subtree).
    Package(String),
    /// One class, by fully qualified name.
    Class(String),
    /// One method, by fully qualified name.
    Method(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverageError {
    #[error("trace `{trace}` line {line}: unknown id `{id}`")]
    UnresolvedId {
        trace: String,
        line: u32,
        id: String,
    },
    #[error("unknown {kind} `{name}`")]
    UnknownScope { kind: &'static str, name: String },
}

/// Executed/total tallies for one scope. Ratios are derived from the
/// tallies; a dimension with an empty inventory has no ratio.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageResult {
    pub points_executed: u64,
    pub points_total: u64,
    pub methods_executed: u64,
    pub methods_total: u64,
    pub branch_arms_executed: u64,
    pub branch_arms_total: u64,
}

impl CoverageResult {
    fn outcome(executed: u64, total: u64) -> MetricOutcome {
        if total == 0 {
            MetricOutcome::not_applicable()
        } else {
            MetricOutcome::defined(ratio(executed as i64, total as i64))
        }
    }

    /// Fraction of sequence points executed.
    pub fn symbol_coverage(&self) -> MetricOutcome {
        Self::outcome(self.points_executed, self.points_total)
    }

    /// Fraction of bodied methods entered at least once.
    pub fn method_coverage(&self) -> MetricOutcome {
        Self::outcome(self.methods_executed, self.methods_total)
    }

    /// Fraction of branch arms executed (two arms per branch).
    pub fn branch_coverage(&self) -> MetricOutcome {
        Self::outcome(self.branch_arms_executed, self.branch_arms_total)
    }
}

/// Static inventory owner maps: every executable id to the method that owns
/// it, and every bodied method to its class.
struct Inventory<'a> {
    /// fq method → (package, fq class)
    methods: BTreeMap<String, (&'a str, String)>,
    /// point id → fq method
    points: BTreeMap<&'a str, String>,
    /// branch id → fq method
    branches: BTreeMap<&'a str, String>,
}

fn inventory(model: &DesignModel) -> Inventory<'_> {
    let mut methods = BTreeMap::new();
    let mut points = BTreeMap::new();
    let mut branches = BTreeMap::new();
    for (fq, class, method) in model.methods() {
        if method.is_signature {
            continue; // interface signatures have no body to execute
        }
        methods.insert(fq.clone(), (class.package.as_str(), class.qualified_name()));
        for point in &method.facts.sequence_points {
            points.insert(point.id.as_str(), fq.clone());
        }
        for branch in &method.facts.branches {
            branches.insert(branch.id.as_str(), fq.clone());
        }
    }
    Inventory {
        methods,
        points,
        branches,
    }
}

/// Compute coverage for `scope` over the set union of all `traces`.
///
/// Every event id must resolve against the model; entry events may only
/// name bodied methods (an interface signature cannot execute).
pub fn coverage(
    model: &DesignModel,
    traces: &[CoverageTrace],
    scope: &CoverageScope,
) -> Result<CoverageResult, CoverageError> {
    let inv = inventory(model);

    // Scope predicate over the owning method.
    let in_scope: Box<dyn Fn(&str) -> bool> = match scope {
        CoverageScope::Model => Box::new(|_: &str| true),
        CoverageScope::Package(name) => {
            if !model.packages.contains_key(name) {
                return Err(CoverageError::UnknownScope {
                    kind: "package",
                    name: name.clone(),
                });
            }
            let name = name.clone();
            let owners = inv.methods.clone();
            Box::new(move |fq: &str| owners.get(fq).map(|(p, _)| *p == name).unwrap_or(false))
        }
        CoverageScope::Class(name) => {
            if model.class(name).is_none() {
                return Err(CoverageError::UnknownScope {
                    kind: "class",
                    name: name.clone(),
                });
            }
            let name = name.clone();
            let owners = inv.methods.clone();
            Box::new(move |fq: &str| owners.get(fq).map(|(_, c)| *c == name).unwrap_or(false))
        }
        CoverageScope::Method(name) => {
            if !inv.methods.contains_key(name) {
                return Err(CoverageError::UnknownScope {
                    kind: "method",
                    name: name.clone(),
                });
            }
            let name = name.clone();
            Box::new(move |fq: &str| fq == name)
        }
    };

    // Union the traces, validating every id.
    let mut entered: BTreeSet<&str> = BTreeSet::new();
    let mut executed_points: BTreeSet<&str> = BTreeSet::new();
    let mut executed_arms: BTreeSet<(&str, Arm)> = BTreeSet::new();
    for trace in traces {
        for event in &trace.events {
            match &event.kind {
                EventKind::MethodEntry(method) => {
                    if !inv.methods.contains_key(method) {
                        return Err(CoverageError::UnresolvedId {
                            trace: trace.run_id.clone(),
                            line: event.line,
                            id: method.clone(),
                        });
                    }
                    entered.insert(method);
                }
                EventKind::Point(id) => {
                    if !inv.points.contains_key(id.as_str()) {
                        return Err(CoverageError::UnresolvedId {
                            trace: trace.run_id.clone(),
                            line: event.line,
                            id: id.clone(),
                        });
                    }
                    executed_points.insert(id);
                }
                EventKind::BranchArm { branch, arm } => {
                    if !inv.branches.contains_key(branch.as_str()) {
                        return Err(CoverageError::UnresolvedId {
                            trace: trace.run_id.clone(),
                            line: event.line,
                            id: branch.clone(),
                        });
                    }
                    executed_arms.insert((branch, *arm));
                }
            }
        }
    }

    let mut result = CoverageResult::default();
    for fq in inv.methods.keys() {
        if in_scope(fq) {
            result.methods_total += 1;
            if entered.contains(fq.as_str()) {
                result.methods_executed += 1;
            }
        }
    }
    for (id, owner) in &inv.points {
        if in_scope(owner) {
            result.points_total += 1;
            if executed_points.contains(id) {
                result.points_executed += 1;
            }
        }
    }
    for (id, owner) in &inv.branches {
        if in_scope(owner) {
            result.branch_arms_total += 2;
            for arm in [Arm::Taken, Arm::NotTaken] {
                if executed_arms.contains(&(id, arm)) {
                    result.branch_arms_executed += 1;
                }
            }
        }
    }
    Ok(result)
}

/// Sequence points and branch arms that were never executed, for dead-spot
/// review. Sorted by id.
pub fn uncovered_points(model: &DesignModel, traces: &[CoverageTrace]) -> Vec<String> {
    let inv = inventory(model);
    let mut executed: BTreeSet<&str> = BTreeSet::new();
    for trace in traces {
        for event in &trace.events {
            if let EventKind::Point(id) = &event.kind {
                executed.insert(id);
            }
        }
    }
    inv.points
        .keys()
        .filter(|id| !executed.contains(**id))
        .map(|id| id.to_string())
        .collect()
}

/// Methods whose points or branch arms were executed without a matching
/// entry event — usually a hand-authored trace that forgot its `M` line.
/// Returns sorted fully qualified method names.
pub fn entry_warnings(model: &DesignModel, traces: &[CoverageTrace]) -> Vec<String> {
    let inv = inventory(model);
    let mut entered: BTreeSet<&str> = BTreeSet::new();
    let mut touched: BTreeSet<&String> = BTreeSet::new();
    for trace in traces {
        for event in &trace.events {
            match &event.kind {
                EventKind::MethodEntry(method) => {
                    entered.insert(method);
                }
                EventKind::Point(id) => {
                    if let Some(owner) = inv.points.get(id.as_str()) {
                        touched.insert(owner);
                    }
                }
                EventKind::BranchArm { branch, .. } => {
                    if let Some(owner) = inv.branches.get(branch.as_str()) {
                        touched.insert(owner);
                    }
                }
            }
        }
    }
    touched
        .into_iter()
        .filter(|fq| !entered.contains(fq.as_str()))
        .cloned()
        .collect()
}

// ---------------------------------------------------------------------------
// Checklist
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    Testable,
    Supportable,
    Maintainable,
    Portable,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Testable,
        Category::Supportable,
        Category::Maintainable,
        Category::Portable,
    ];
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Testable => "testable",
            Category::Supportable => "supportable",
            Category::Maintainable => "maintainable",
            Category::Portable => "portable",
        })
    }
}

/// One registered check: a stable id, its category, and whether its value
/// is declared by the team or derived from the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckDef {
    pub id: &'static str,
    pub category: Category,
    pub derived: bool,
}

/// The full check registry. Ids are a stable contract: configuration files
/// using any other id are rejected rather than silently ignored.
pub const REGISTRY: [CheckDef; 10] = [
    CheckDef {
        id: "testable.logging",
        category: Category::Testable,
        derived: false,
    },
    CheckDef {
        id: "testable.scriptable_interface",
        category: Category::Testable,
        derived: false,
    },
    CheckDef {
        id: "testable.runtime_monitoring",
        category: Category::Testable,
        derived: false,
    },
    CheckDef {
        id: "supportable.error_messages",
        category: Category::Supportable,
        derived: false,
    },
    CheckDef {
        id: "supportable.comment_density",
        category: Category::Supportable,
        derived: true,
    },
    CheckDef {
        id: "maintainable.modularity",
        category: Category::Maintainable,
        derived: true,
    },
    CheckDef {
        id: "maintainable.reviewability",
        category: Category::Maintainable,
        derived: false,
    },
    CheckDef {
        id: "maintainable.accessibility",
        category: Category::Maintainable,
        derived: false,
    },
    CheckDef {
        id: "portable.platform_independent",
        category: Category::Portable,
        derived: false,
    },
    CheckDef {
        id: "portable.deploy_documented",
        category: Category::Portable,
        derived: false,
    },
];

pub fn is_registered_check(id: &str) -> bool {
    REGISTRY.iter().any(|check| check.id == id)
}

/// Tunable thresholds for the two derived checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChecklistParams {
    /// Minimum comment-line share of total method lines (default 0.10).
    pub comment_density_min: Rational,
    /// Largest share of all classes one package may hold (default 0.5).
    pub modularity_max_fraction: Rational,
}

impl Default for ChecklistParams {
    fn default() -> Self {
        ChecklistParams {
            comment_density_min: ratio(1, 10),
            modularity_max_fraction: ratio(1, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChecklistError {
    #[error("unknown check id `{id}`")]
    UnknownCheck { id: String },
    #[error("check `{id}` is derived from the model and cannot be declared as a fact")]
    DerivedFact { id: String },
    #[error("missing declared check facts: {}", ids.join(", "))]
    MissingFacts { ids: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub category: Category,
    pub derived: bool,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryScore {
    pub passed: u64,
    pub total: u64,
}

impl CategoryScore {
    pub fn score(&self) -> Rational {
        ratio(self.passed as i64, self.total as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChecklistResult {
    /// Every registered check exactly once, in registry order.
    pub checks: Vec<CheckOutcome>,
    pub categories: BTreeMap<Category, CategoryScore>,
}

/// Comment share of all method-body lines; empty models pass vacuously.
fn comment_density_ok(model: &DesignModel, params: &ChecklistParams) -> bool {
    let mut total: u64 = 0;
    let mut comment: u64 = 0;
    for (_, _, method) in model.methods() {
        total += method.facts.loc.total;
        comment += method.facts.loc.comment;
    }
    if total == 0 {
        return true;
    }
    ratio(comment as i64, total as i64) >= params.comment_density_min
}

/// No package may hold more than the configured share of all classes;
/// empty models pass vacuously.
fn modularity_ok(model: &DesignModel, params: &ChecklistParams) -> bool {
    let total = model.classes().count() as i64;
    if total == 0 {
        return true;
    }
    model
        .packages
        .values()
        .all(|p| ratio(p.classes.len() as i64, total) <= params.modularity_max_fraction)
}

/// Score the registry against declared facts plus the two derived checks.
///
/// `facts` must supply exactly the declared (non-derived) check ids: unknown
/// ids, derived ids, and absent ids are all errors, so a CI configuration
/// cannot silently rot.
pub fn checklist(
    model: &DesignModel,
    facts: &BTreeMap<String, bool>,
    params: &ChecklistParams,
) -> Result<ChecklistResult, ChecklistError> {
    for id in facts.keys() {
        let Some(def) = REGISTRY.iter().find(|check| check.id == id) else {
            return Err(ChecklistError::UnknownCheck { id: id.clone() });
        };
        if def.derived {
            return Err(ChecklistError::DerivedFact { id: id.clone() });
        }
    }
    let missing: Vec<String> = REGISTRY
        .iter()
        .filter(|check| !check.derived && !facts.contains_key(check.id))
        .map(|check| check.id.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ChecklistError::MissingFacts { ids: missing });
    }

    let mut checks = Vec::with_capacity(REGISTRY.len());
    for def in &REGISTRY {
        let value = if def.derived {
            match def.id {
                "supportable.comment_density" => comment_density_ok(model, params),
                "maintainable.modularity" => modularity_ok(model, params),
                other => unreachable!("unhandled derived check `{other}`"),
            }
        } else {
            facts[def.id]
        };
        checks.push(CheckOutcome {
            id: def.id,
            category: def.category,
            derived: def.derived,
            value,
        });
    }

    let mut categories: BTreeMap<Category, CategoryScore> = Category::ALL
        .iter()
        .map(|c| (*c, CategoryScore { passed: 0, total: 0 }))
        .collect();
    for check in &checks {
        let entry = categories.get_mut(&check.category).expect("all categories");
        entry.total += 1;
        if check.value {
            entry.passed += 1;
        }
    }

    Ok(ChecklistResult { checks, categories })
}
