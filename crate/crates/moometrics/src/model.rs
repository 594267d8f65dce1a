//! Domain types shared by every analysis stage.
//!
//! All types here are plain immutable data: the frontend and the ingest
//! readers build them, the metric engines read them. Nothing in this module
//! performs I/O. Each aggregate has a `validate_*` function returning the
//! full list of broken invariants (sorted, deterministic) rather than
//! stopping at the first problem.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

// ---------------------------------------------------------------------------
// Design model: packages, classes, methods, and per-method body facts
// ---------------------------------------------------------------------------

/// Whole-program view of the analyzed sources: every package with its
/// classes, every class with its methods and extracted body facts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DesignModel {
    /// Packages keyed by dot-separated path.
    pub packages: BTreeMap<String, Package>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Package {
    /// Dot-separated path, e.g. `shop.core`.
    pub name: String,
    /// Classes and interfaces keyed by simple name.
    pub classes: BTreeMap<String, Class>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassKind {
    Concrete,
    Abstract,
    Interface,
}

impl ClassKind {
    /// Abstract classes and interfaces both count as abstraction targets.
    pub fn is_abstraction(self) -> bool {
        matches!(self, ClassKind::Abstract | ClassKind::Interface)
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            ClassKind::Concrete => "concrete",
            ClassKind::Abstract => "abstract",
            ClassKind::Interface => "interface",
        };
        f.write_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Class {
    /// Simple name, unique within the package.
    pub name: String,
    /// Path of the owning package.
    pub package: String,
    pub kind: ClassKind,
    /// Fully qualified name of the superclass, if any. Single inheritance.
    pub extends: Option<String>,
    /// Fully qualified names of implemented interfaces.
    pub implements: BTreeSet<String>,
    /// Attribute names declared directly on this class.
    pub attributes: BTreeSet<String>,
    /// Methods keyed by name (no overloading).
    pub methods: BTreeMap<String, Method>,
    /// 1-based line of the declaration in its source file.
    pub decl_line: u32,
}

impl Class {
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.package, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Method {
    pub name: String,
    /// Fully qualified name of the declaring class.
    pub owner: String,
    pub params: Vec<String>,
    /// True for interface signatures, which carry no body facts.
    pub is_signature: bool,
    pub facts: MethodFacts,
    /// 1-based line of the declaration.
    pub decl_line: u32,
}

impl Method {
    /// `package.Class.method`, the id used by coverage traces.
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.owner, self.name)
    }
}

/// Everything the metric engines need to know about one method body,
/// extracted once by the frontend so no later stage touches source text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MethodFacts {
    /// Call statements in source order; duplicates are kept.
    pub calls: Vec<CallSite>,
    /// Distinct `(owning class, attribute)` pairs touched by the body.
    /// Both `access C.a` statements and `assign a` statements contribute.
    pub attribute_accesses: BTreeSet<(String, String)>,
    /// Number of `if` and `while` statements in the body.
    pub decision_points: u64,
    /// One marker per statement, in pre-order walk order.
    pub sequence_points: Vec<SequencePoint>,
    /// One marker per `if`/`while` statement, same walk order.
    pub branches: Vec<BranchPoint>,
    pub loc: LocFacts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    /// Fully qualified name of the class whose method is called.
    pub class: String,
    pub method: String,
    pub line: u32,
}

impl CallSite {
    pub fn qualified_method(&self) -> String {
        format!("{}.{}", self.class, self.method)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Call,
    Access,
    Assign,
    If,
    While,
    Return,
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            PointKind::Call => "call",
            PointKind::Access => "access",
            PointKind::Assign => "assign",
            PointKind::If => "if",
            PointKind::While => "while",
            PointKind::Return => "return",
        };
        f.write_str(text)
    }
}

/// Statement-level execution marker; the unit of symbol coverage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePoint {
    /// Model-wide unique id, e.g. `sp17`.
    pub id: String,
    pub kind: PointKind,
    pub line: u32,
}

/// Marker for a two-armed branch (`if` then/else, `while` taken/not-taken).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchPoint {
    /// Model-wide unique id, e.g. `br3`.
    pub id: String,
    pub line: u32,
}

impl BranchPoint {
    /// Every branch has exactly two arms.
    pub const ARM_COUNT: u64 = 2;
}

/// Per-method line tallies over the body extent (opening brace line through
/// closing brace line, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LocFacts {
    pub total: u64,
    pub blank: u64,
    pub comment: u64,
}

impl LocFacts {
    pub fn no_blank(&self) -> u64 {
        self.total - self.blank
    }

    pub fn no_blank_no_comment(&self) -> u64 {
        self.total - self.blank - self.comment
    }

    pub fn add(&mut self, other: &LocFacts) {
        self.total += other.total;
        self.blank += other.blank;
        self.comment += other.comment;
    }
}

impl DesignModel {
    /// All classes with their fully qualified names, in sorted order.
    pub fn classes(&self) -> impl Iterator<Item = (String, &Class)> {
        self.packages.values().flat_map(|package| {
            package
                .classes
                .values()
                .map(|class| (class.qualified_name(), class))
        })
    }

    /// Look up a class by fully qualified name.
    pub fn class(&self, qualified: &str) -> Option<&Class> {
        let (package, name) = qualified.rsplit_once('.')?;
        self.packages.get(package)?.classes.get(name)
    }

    /// All methods with their fully qualified names, in sorted order.
    pub fn methods(&self) -> impl Iterator<Item = (String, &Class, &Method)> {
        self.packages.values().flat_map(|package| {
            package.classes.values().flat_map(|class| {
                class
                    .methods
                    .values()
                    .map(move |method| (method.qualified_name(), class, method))
            })
        })
    }
}

// ---------------------------------------------------------------------------
// Requirement set
// ---------------------------------------------------------------------------

/// Reviewer-assigned validity status of a requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    NotYetValid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ChangeReason {
    Business,
    Clarification,
    Error,
    Scope,
    Other,
}

impl fmt::Display for ChangeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            ChangeReason::Business => "business",
            ChangeReason::Clarification => "clarification",
            ChangeReason::Error => "error",
            ChangeReason::Scope => "scope",
            ChangeReason::Other => "other",
        };
        f.write_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RequirementChange {
    /// Strictly increasing within one requirement.
    pub seq: u64,
    pub reason: ChangeReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub id: String,
    pub text: String,
    pub validity: Validity,
    /// Reviewer id → interpretation label. Labels are opaque strings
    /// compared by exact equality; the tool never judges similarity.
    pub reviewer_verdicts: BTreeMap<String, String>,
    pub changes: Vec<RequirementChange>,
}

/// Required vs. provided services of one analyzed entity, the input to the
/// completeness ratio.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EntityChecklist {
    pub required: BTreeSet<String>,
    pub provided: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RequirementSet {
    pub requirements: Vec<Requirement>,
    pub reviewers: BTreeSet<String>,
    pub entity_checklists: BTreeMap<String, EntityChecklist>,
}

impl RequirementSet {
    /// Total number of requirements (the N of the set-level ratios).
    pub fn len(&self) -> usize {
        self.requirements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requirements.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Use-case model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UseCase {
    pub name: String,
    /// Actors associated with the scenario (a set).
    pub actors: BTreeSet<String>,
    /// Message names in declaration order; duplicates count separately.
    pub messages: Vec<String>,
    /// Participating system classes (a set; duplicates collapse).
    pub classes: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UseCaseModel {
    pub actors: BTreeSet<String>,
    pub use_cases: Vec<UseCase>,
}

impl UseCaseModel {
    pub fn use_case(&self, name: &str) -> Option<&UseCase> {
        self.use_cases.iter().find(|uc| uc.name == name)
    }
}

// ---------------------------------------------------------------------------
// Coverage trace
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arm {
    Taken,
    NotTaken,
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arm::Taken => "taken",
            Arm::NotTaken => "not_taken",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    /// Entry into a method, by fully qualified method name.
    MethodEntry(String),
    /// Execution of a sequence point, by point id.
    Point(String),
    /// Execution of one arm of a branch, by branch id.
    BranchArm { branch: String, arm: Arm },
}

/// One execution event with the trace-file line it came from (0 when the
/// trace was built programmatically).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub line: u32,
}

impl TraceEvent {
    pub fn entry(method: impl Into<String>) -> Self {
        TraceEvent {
            kind: EventKind::MethodEntry(method.into()),
            line: 0,
        }
    }

    pub fn point(id: impl Into<String>) -> Self {
        TraceEvent {
            kind: EventKind::Point(id.into()),
            line: 0,
        }
    }

    pub fn arm(branch: impl Into<String>, arm: Arm) -> Self {
        TraceEvent {
            kind: EventKind::BranchArm {
                branch: branch.into(),
                arm,
            },
            line: 0,
        }
    }
}

/// Ordered execution events from one test run. Duplicates are retained;
/// evaluation uses set semantics.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageTrace {
    pub run_id: String,
    pub events: Vec<TraceEvent>,
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// One broken invariant, naming the offending element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelViolation {
    /// Qualified name of the element at fault.
    pub element: String,
    pub message: String,
}

impl ModelViolation {
    fn new(element: impl Into<String>, message: impl Into<String>) -> Self {
        ModelViolation {
            element: element.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.message)
    }
}

/// Check every design-model invariant; an empty result means the model is
/// well-formed. Violations are data, not errors — callers decide severity.
pub fn validate_model(model: &DesignModel) -> Vec<ModelViolation> {
    let mut violations = Vec::new();

    let class_index: BTreeMap<String, &Class> = model.classes().collect();

    for (package_name, package) in &model.packages {
        if package.name != *package_name {
            violations.push(ModelViolation::new(
                package_name.clone(),
                format!("package keyed as `{package_name}` but named `{}`", package.name),
            ));
        }
        for (class_key, class) in &package.classes {
            if class.name != *class_key || class.package != *package_name {
                violations.push(ModelViolation::new(
                    format!("{package_name}.{class_key}"),
                    "class name/package fields disagree with its position in the model",
                ));
            }
        }
    }

    for (fq, class) in &class_index {
        if let Some(parent) = &class.extends {
            match class_index.get(parent) {
                None => violations.push(ModelViolation::new(
                    fq.clone(),
                    format!("extends unresolved class `{parent}`"),
                )),
                Some(target) if target.kind == ClassKind::Interface => {
                    violations.push(ModelViolation::new(
                        fq.clone(),
                        format!("extends `{parent}`, which is an interface"),
                    ))
                }
                Some(_) => {}
            }
        }
        for iface in &class.implements {
            match class_index.get(iface) {
                None => violations.push(ModelViolation::new(
                    fq.clone(),
                    format!("implements unresolved interface `{iface}`"),
                )),
                Some(target) if target.kind != ClassKind::Interface => {
                    violations.push(ModelViolation::new(
                        fq.clone(),
                        format!("implements `{iface}`, which is not an interface"),
                    ))
                }
                Some(_) => {}
            }
        }
    }

    // Inheritance cycles: walk each class's extends chain and flag every
    // class that reappears in its own ancestor line.
    for (fq, _) in &class_index {
        let mut seen = BTreeSet::new();
        seen.insert(fq.clone());
        let mut cursor = class_index.get(fq).and_then(|c| c.extends.clone());
        while let Some(parent) = cursor {
            if parent == *fq {
                violations.push(ModelViolation::new(
                    fq.clone(),
                    "inheritance cycle through its own extends chain",
                ));
                break;
            }
            if !seen.insert(parent.clone()) {
                break; // cycle exists but does not pass through `fq`
            }
            cursor = class_index.get(&parent).and_then(|c| c.extends.clone());
        }
    }

    // Model-wide uniqueness of sequence-point and branch ids.
    let mut point_owner: BTreeMap<&str, String> = BTreeMap::new();
    let mut branch_owner: BTreeMap<&str, String> = BTreeMap::new();
    for (fq_method, _, method) in model.methods() {
        for point in &method.facts.sequence_points {
            if let Some(first) = point_owner.insert(&point.id, fq_method.clone()) {
                violations.push(ModelViolation::new(
                    point.id.clone(),
                    format!("sequence-point id used by both {first} and {fq_method}"),
                ));
            }
        }
        for branch in &method.facts.branches {
            if let Some(first) = branch_owner.insert(&branch.id, fq_method.clone()) {
                violations.push(ModelViolation::new(
                    branch.id.clone(),
                    format!("branch id used by both {first} and {fq_method}"),
                ));
            }
        }
    }

    for (fq_method, _, method) in model.methods() {
        let loc = &method.facts.loc;
        if loc.blank + loc.comment > loc.total {
            violations.push(ModelViolation::new(
                fq_method.clone(),
                format!(
                    "line tallies inconsistent: blank {} + comment {} > total {}",
                    loc.blank, loc.comment, loc.total
                ),
            ));
        }
        if method.facts.decision_points != method.facts.branches.len() as u64 {
            violations.push(ModelViolation::new(
                fq_method.clone(),
                "decision-point count disagrees with the number of branches",
            ));
        }
        for call in &method.facts.calls {
            match class_index.get(&call.class) {
                None => violations.push(ModelViolation::new(
                    fq_method.clone(),
                    format!("calls unresolved class `{}`", call.class),
                )),
                Some(target) if !target.methods.contains_key(&call.method) => {
                    violations.push(ModelViolation::new(
                        fq_method.clone(),
                        format!("calls `{}`, not declared on `{}`", call.method, call.class),
                    ))
                }
                Some(_) => {}
            }
        }
        for (owner, attribute) in &method.facts.attribute_accesses {
            match class_index.get(owner) {
                None => violations.push(ModelViolation::new(
                    fq_method.clone(),
                    format!("accesses attribute of unresolved class `{owner}`"),
                )),
                Some(target) if !target.attributes.contains(attribute) => {
                    violations.push(ModelViolation::new(
                        fq_method.clone(),
                        format!("accesses `{attribute}`, not declared on `{owner}`"),
                    ))
                }
                Some(_) => {}
            }
        }
    }

    violations.sort();
    violations.dedup();
    violations
}

/// Check every requirement-set invariant.
pub fn validate_requirements(set: &RequirementSet) -> Vec<ModelViolation> {
    let mut violations = Vec::new();
    let mut seen_ids = BTreeSet::new();

    for requirement in &set.requirements {
        if requirement.id.is_empty() {
            violations.push(ModelViolation::new("<requirement>", "empty requirement id"));
            continue;
        }
        if !seen_ids.insert(requirement.id.clone()) {
            violations.push(ModelViolation::new(
                requirement.id.clone(),
                "duplicate requirement id",
            ));
        }
        for reviewer in requirement.reviewer_verdicts.keys() {
            if !set.reviewers.contains(reviewer) {
                violations.push(ModelViolation::new(
                    requirement.id.clone(),
                    format!("verdict from undeclared reviewer `{reviewer}`"),
                ));
            }
        }
        let mut last_seq: Option<u64> = None;
        for change in &requirement.changes {
            if let Some(last) = last_seq {
                if change.seq <= last {
                    violations.push(ModelViolation::new(
                        requirement.id.clone(),
                        format!(
                            "change sequence numbers not strictly increasing ({last} then {})",
                            change.seq
                        ),
                    ));
                }
            }
            last_seq = Some(change.seq);
        }
    }

    for (entity, checklist) in &set.entity_checklists {
        if checklist.required.is_empty() {
            violations.push(ModelViolation::new(
                entity.clone(),
                "entity checklist with no required services",
            ));
        }
    }

    violations.sort();
    violations.dedup();
    violations
}

/// Check every use-case-model invariant.
pub fn validate_usecases(model: &UseCaseModel) -> Vec<ModelViolation> {
    let mut violations = Vec::new();
    let mut seen_names = BTreeSet::new();

    for use_case in &model.use_cases {
        if !seen_names.insert(use_case.name.clone()) {
            violations.push(ModelViolation::new(
                use_case.name.clone(),
                "duplicate use-case name",
            ));
        }
        for actor in &use_case.actors {
            if !model.actors.contains(actor) {
                violations.push(ModelViolation::new(
                    use_case.name.clone(),
                    format!("associated with undeclared actor `{actor}`"),
                ));
            }
        }
    }

    violations.sort();
    violations.dedup();
    violations
}
