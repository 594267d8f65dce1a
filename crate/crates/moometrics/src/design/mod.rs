//! Design metrics over a lowered model: size tallies, the classic
//! Chidamber–Kemerer class metrics, Robert Martin's package coupling
//! metrics, and three principle checks (abstract-dependency ratio,
//! package-cycle detection, child-package encapsulation).
//!
//! Everything here is a pure read; results depend only on the model.

pub mod graph;

use std::collections::BTreeSet;

use crate::model::{Class, DesignModel, Package};
use crate::value::{ratio, MetricError, MetricOutcome, Rational};
use graph::DependencyGraph;

fn lookup_class<'a>(model: &'a DesignModel, fq: &str) -> Result<&'a Class, MetricError> {
    model.class(fq).ok_or_else(|| MetricError::UnknownScope {
        kind: "class",
        name: fq.to_string(),
    })
}

fn lookup_package<'a>(model: &'a DesignModel, name: &str) -> Result<&'a Package, MetricError> {
    model.packages.get(name).ok_or_else(|| MetricError::UnknownScope {
        kind: "package",
        name: name.to_string(),
    })
}

// ---------------------------------------------------------------------------
// Size tallies
// ---------------------------------------------------------------------------

/// Straight counts of every element kind in the model. Call edges count
/// each call site (a list); access edges count distinct attributes per
/// method (the facts are per-method sets).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModelCounts {
    pub packages: u64,
    pub classes: u64,
    pub concrete_classes: u64,
    pub abstract_classes: u64,
    pub interfaces: u64,
    pub subclass_edges: u64,
    pub implements_edges: u64,
    pub call_edges: u64,
    pub access_edges: u64,
    pub methods: u64,
    pub attributes: u64,
}

pub fn model_counts(model: &DesignModel) -> ModelCounts {
    let mut counts = ModelCounts {
        packages: model.packages.len() as u64,
        ..ModelCounts::default()
    };
    for (_, class) in model.classes() {
        counts.classes += 1;
        match class.kind {
            crate::model::ClassKind::Concrete => counts.concrete_classes += 1,
            crate::model::ClassKind::Abstract => counts.abstract_classes += 1,
            crate::model::ClassKind::Interface => counts.interfaces += 1,
        }
        if class.extends.is_some() {
            counts.subclass_edges += 1;
        }
        counts.implements_edges += class.implements.len() as u64;
        counts.attributes += class.attributes.len() as u64;
        for method in class.methods.values() {
            counts.methods += 1;
            counts.call_edges += method.facts.calls.len() as u64;
            counts.access_edges += method.facts.attribute_accesses.len() as u64;
        }
    }
    counts
}

// ---------------------------------------------------------------------------
// Lines of code
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocScope {
    Model,
    Package(String),
    Class(String),
    Method(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocMode {
    Total,
    NoBlank,
    NoBlankNoComment,
}

/// Sum of per-method line facts over a scope. Interface signatures have
/// no bodies and contribute zero.
pub fn loc(model: &DesignModel, scope: &LocScope, mode: LocMode) -> Result<u64, MetricError> {
    let mut facts = crate::model::LocFacts::default();
    match scope {
        LocScope::Model => {
            for (_, _, method) in model.methods() {
                facts.add(&method.facts.loc);
            }
        }
        LocScope::Package(name) => {
            let package = lookup_package(model, name)?;
            for class in package.classes.values() {
                for method in class.methods.values() {
                    facts.add(&method.facts.loc);
                }
            }
        }
        LocScope::Class(fq) => {
            let class = lookup_class(model, fq)?;
            for method in class.methods.values() {
                facts.add(&method.facts.loc);
            }
        }
        LocScope::Method(fq) => {
            let (class_fq, name) = fq.rsplit_once('.').ok_or_else(|| MetricError::UnknownScope {
                kind: "method",
                name: fq.to_string(),
            })?;
            let method = lookup_class(model, class_fq)
                .ok()
                .and_then(|c| c.methods.get(name))
                .ok_or_else(|| MetricError::UnknownScope {
                    kind: "method",
                    name: fq.to_string(),
                })?;
            facts = method.facts.loc;
        }
    }
    Ok(match mode {
        LocMode::Total => facts.total,
        LocMode::NoBlank => facts.no_blank(),
        LocMode::NoBlankNoComment => facts.no_blank_no_comment(),
    })
}

// ---------------------------------------------------------------------------
// Class metrics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WmcWeighting {
    /// Each method weighs 1 + its decision points.
    Cyclomatic,
    /// Each method weighs 1, so WMC is the method count.
    Unit,
}

/// Weighted methods per class: the sum of per-method complexity weights
/// over the class's own (declared, not inherited) methods. Interfaces
/// have no bodies to weigh, so the metric is not applicable there.
pub fn wmc(
    model: &DesignModel,
    class: &str,
    weighting: WmcWeighting,
) -> Result<MetricOutcome, MetricError> {
    let class = lookup_class(model, class)?;
    if class.kind == crate::model::ClassKind::Interface {
        return Ok(MetricOutcome::not_applicable());
    }
    let sum: u64 = class
        .methods
        .values()
        .map(|m| match weighting {
            WmcWeighting::Cyclomatic => 1 + m.facts.decision_points,
            WmcWeighting::Unit => 1,
        })
        .sum();
    Ok(MetricOutcome::defined(ratio(sum as i64, 1)))
}

/// Response for a class: the size of its response set — its own declared
/// methods plus every distinct method they call, one level deep. Self
/// calls collapse into the declared set. For an interface this is just
/// the signature count.
pub fn rfc(model: &DesignModel, class: &str) -> Result<u64, MetricError> {
    let class = lookup_class(model, class)?;
    let mut response_set: BTreeSet<String> = BTreeSet::new();
    for method in class.methods.values() {
        response_set.insert(method.qualified_name());
        for call in &method.facts.calls {
            response_set.insert(call.qualified_method());
        }
    }
    Ok(response_set.len() as u64)
}

/// Number of children: classes whose extends target is this class.
/// Level 1 only, and implementing an interface is not childhood.
pub fn noc(model: &DesignModel, class: &str) -> Result<u64, MetricError> {
    let fq = lookup_class(model, class)?.qualified_name();
    Ok(model
        .classes()
        .filter(|(_, c)| c.extends.as_deref() == Some(fq.as_str()))
        .count() as u64)
}

/// Depth of inheritance tree: extends-chain hops from the class to its
/// root. Root classes and interfaces sit at depth 0.
pub fn dit(model: &DesignModel, class: &str) -> Result<u64, MetricError> {
    let mut current = lookup_class(model, class)?;
    let mut depth = 0u64;
    // Model invariants guarantee the chain resolves and terminates; the
    // bound only protects against an unvalidated model.
    let bound = model.classes().count() as u64;
    while let Some(parent) = current.extends.as_ref().and_then(|p| model.class(p)) {
        depth += 1;
        if depth > bound {
            break;
        }
        current = parent;
    }
    Ok(depth)
}

/// Coupling between objects: how many distinct other classes this class
/// references through method calls or attribute accesses (fan-out). With
/// `include_fan_in`, the count unions in the distinct other classes that
/// reference this one. Bare extends/implements edges do not couple.
pub fn cbo(model: &DesignModel, class: &str, include_fan_in: bool) -> Result<u64, MetricError> {
    let fq = lookup_class(model, class)?.qualified_name();
    let mut partners: BTreeSet<String> = BTreeSet::new();
    for (other_fq, other) in model.classes() {
        for method in other.methods.values() {
            let targets = method
                .facts
                .calls
                .iter()
                .map(|c| c.class.as_str())
                .chain(method.facts.attribute_accesses.iter().map(|(c, _)| c.as_str()));
            for target in targets {
                if other_fq == fq {
                    if target != fq {
                        partners.insert(target.to_string());
                    }
                } else if include_fan_in && target == fq {
                    partners.insert(other_fq.clone());
                }
            }
        }
    }
    Ok(partners.len() as u64)
}

/// Lack of cohesion in methods: the number of unordered pairs of declared
/// methods whose own-attribute access sets are disjoint. A method that
/// touches no own attribute shares with nothing.
pub fn lcom(model: &DesignModel, class: &str) -> Result<u64, MetricError> {
    let class = lookup_class(model, class)?;
    let fq = class.qualified_name();
    let access_sets: Vec<BTreeSet<&str>> = class
        .methods
        .values()
        .map(|m| {
            m.facts
                .attribute_accesses
                .iter()
                .filter(|(owner, _)| *owner == fq)
                .map(|(_, attr)| attr.as_str())
                .collect()
        })
        .collect();
    let mut disjoint_pairs = 0u64;
    for i in 0..access_sets.len() {
        for j in i + 1..access_sets.len() {
            if access_sets[i].is_disjoint(&access_sets[j]) {
                disjoint_pairs += 1;
            }
        }
    }
    Ok(disjoint_pairs)
}

// ---------------------------------------------------------------------------
// Class reference edges (shared by the package metrics)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReferenceKind {
    Call,
    Access,
    Extends,
    Implements,
}

/// Every distinct directed class-to-class reference in the model, as
/// (from, to, kind) over fully-qualified names. Self references are
/// excluded: no metric here counts a class against itself.
pub fn class_references(model: &DesignModel) -> BTreeSet<(String, String, ReferenceKind)> {
    let mut edges = BTreeSet::new();
    for (fq, class) in model.classes() {
        let mut add = |to: &str, kind: ReferenceKind| {
            if to != fq {
                edges.insert((fq.clone(), to.to_string(), kind));
            }
        };
        if let Some(parent) = &class.extends {
            add(parent, ReferenceKind::Extends);
        }
        for interface in &class.implements {
            add(interface, ReferenceKind::Implements);
        }
        for method in class.methods.values() {
            for call in &method.facts.calls {
                add(&call.class, ReferenceKind::Call);
            }
            for (target, _) in &method.facts.attribute_accesses {
                add(target, ReferenceKind::Access);
            }
        }
    }
    edges
}

fn package_of(fq_class: &str) -> &str {
    fq_class.rsplit_once('.').map(|(p, _)| p).unwrap_or("")
}

// ---------------------------------------------------------------------------
// Package metrics
// ---------------------------------------------------------------------------

/// Efferent and afferent coupling of a package: the number of distinct
/// outside classes its classes use, and the number of distinct outside
/// classes that use its classes. Classes are counted, not edges; all four
/// reference kinds participate.
pub fn package_coupling(model: &DesignModel, package: &str) -> Result<(u64, u64), MetricError> {
    lookup_package(model, package)?;
    let mut used_outside: BTreeSet<&str> = BTreeSet::new();
    let mut outside_users: BTreeSet<&str> = BTreeSet::new();
    let edges = class_references(model);
    for (from, to, _) in &edges {
        let from_package = package_of(from);
        let to_package = package_of(to);
        if from_package == to_package {
            continue;
        }
        if from_package == package {
            used_outside.insert(to);
        }
        if to_package == package {
            outside_users.insert(from);
        }
    }
    Ok((used_outside.len() as u64, outside_users.len() as u64))
}

/// Instability I = Ce / (Ca + Ce): 1 is maximally unstable (only
/// outgoing dependencies), 0 is stable (only incoming). An isolated
/// package has no defined value; it falls back to 0, treated as stable.
pub fn instability(ce: u64, ca: u64) -> MetricOutcome {
    if ce + ca == 0 {
        MetricOutcome::not_applicable_with(ratio(0, 1))
    } else {
        MetricOutcome::defined(ratio(ce as i64, (ca + ce) as i64))
    }
}

/// Abstractness A: abstract classes plus interfaces over all classes in
/// the package. An empty package has no ratio to take.
pub fn abstractness(model: &DesignModel, package: &str) -> Result<MetricOutcome, MetricError> {
    let package = lookup_package(model, package)?;
    let total = package.classes.len() as i64;
    if total == 0 {
        return Ok(MetricOutcome::not_applicable());
    }
    let abstractions = package
        .classes
        .values()
        .filter(|c| c.kind.is_abstraction())
        .count() as i64;
    Ok(MetricOutcome::defined(ratio(abstractions, total)))
}

/// Dependency-inversion ratio: of the distinct cross-package class pairs
/// this package's classes reference, the fraction whose target is an
/// abstract class or interface. A package referencing nothing outside
/// itself has no ratio to take.
pub fn dip(model: &DesignModel, package: &str) -> Result<MetricOutcome, MetricError> {
    lookup_package(model, package)?;
    let mut outgoing: BTreeSet<(&str, &str)> = BTreeSet::new();
    let edges = class_references(model);
    for (from, to, _) in &edges {
        if package_of(from) == package && package_of(to) != package {
            outgoing.insert((from, to));
        }
    }
    if outgoing.is_empty() {
        return Ok(MetricOutcome::not_applicable());
    }
    let abstract_targets = outgoing
        .iter()
        .filter(|(_, to)| model.class(to).is_some_and(|c| c.kind.is_abstraction()))
        .count() as i64;
    Ok(MetricOutcome::defined(ratio(
        abstract_targets,
        outgoing.len() as i64,
    )))
}

/// Result of the acyclic-dependencies check over the package graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdpResult {
    pub acyclic: bool,
    /// Cyclic package groups, each sorted by name, the list sorted too.
    pub cycles: Vec<Vec<String>>,
}

/// Build the package dependency graph (edge p→q when any class of p
/// references any class of q, p ≠ q) and look for cycles via strongly
/// connected components.
pub fn adp(model: &DesignModel) -> AdpResult {
    let mut graph = DependencyGraph::new();
    for name in model.packages.keys() {
        graph.add_node(name);
    }
    for (from, to, _) in &class_references(model) {
        let from_package = package_of(from);
        let to_package = package_of(to);
        if from_package != to_package {
            graph.add_edge(from_package, to_package);
        }
    }
    let cycles = graph.cycle_components();
    AdpResult {
        acyclic: cycles.is_empty(),
        cycles,
    }
}

/// Encapsulation percentage of a package's children: 100 when no
/// immediate child package is referenced from outside the parent's
/// subtree, 0 when every child is. A package with no children in the
/// model is fully encapsulated by vacuity.
pub fn ep(model: &DesignModel, package: &str) -> Result<Rational, MetricError> {
    lookup_package(model, package)?;
    let child_prefix = format!("{package}.");
    let children: Vec<&str> = model
        .packages
        .keys()
        .filter_map(|name| {
            name.strip_prefix(&child_prefix)
                .filter(|rest| !rest.contains('.'))
                .map(|_| name.as_str())
        })
        .collect();
    if children.is_empty() {
        return Ok(ratio(100, 1));
    }

    let in_subtree =
        |p: &str, root: &str| p == root || p.strip_prefix(root).is_some_and(|r| r.starts_with('.'));
    let mut used: BTreeSet<&str> = BTreeSet::new();
    let edges = class_references(model);
    for (from, to, _) in &edges {
        if in_subtree(package_of(from), package) {
            continue; // references inside the parent's subtree don't expose anything
        }
        for child in &children {
            if in_subtree(package_of(to), child) {
                used.insert(child);
            }
        }
    }
    let total = children.len() as i64;
    Ok(ratio((total - used.len() as i64) * 100, total))
}
