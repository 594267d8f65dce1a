//! Lowering: join parsed units into one validated design model.
//!
//! Lowering resolves every name (imports, extends/implements targets, call
//! and access targets), rejects anything unresolved — the model must be
//! closed for the coupling metrics to be exact — and extracts per-method
//! body facts: calls, attribute accesses, decision points, sequence points,
//! branches, and line tallies.
//!
//! Sequence-point and branch ids are assigned model-wide: methods sorted by
//! fully qualified name, statements in pre-order within each method. The
//! numbering therefore never depends on the order files arrive in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::{Block, Decl, DeclKind, Member, MethodDecl, NameRef, SourceUnit, Stmt};
use crate::model::{
    BranchPoint, CallSite, Class, ClassKind, DesignModel, LocFacts, Method, MethodFacts, Package,
    PointKind, SequencePoint,
};

/// A resolution or structural problem found while joining units.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LowerError {
    pub path: String,
    /// 1-based line.
    pub line: u32,
    pub message: String,
}

impl LowerError {
    fn new(path: &str, line: u32, message: impl Into<String>) -> Self {
        LowerError {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for LowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: error: {}", self.path, self.line, self.message)
    }
}

/// What pass one knows about each declaration, before bodies are walked.
struct DeclInfo<'a> {
    package: &'a str,
    path: &'a str,
    line: u32,
    kind: ClassKind,
    methods: BTreeSet<&'a str>,
    attributes: BTreeSet<&'a str>,
}

/// Lower parsed units into a design model. All errors across all units are
/// collected before giving up, sorted by position.
pub fn lower(units: &[SourceUnit]) -> Result<DesignModel, Vec<LowerError>> {
    let mut errors: Vec<LowerError> = Vec::new();

    // Pass one: index every declaration by fully qualified name. When a name
    // is declared more than once, the site with the smallest (path, line)
    // wins and the others are reported, so results never depend on the order
    // units were handed to us.
    let mut decl_sites: BTreeMap<String, Vec<(&SourceUnit, &Decl)>> = BTreeMap::new();
    for unit in units {
        for decl in &unit.decls {
            decl_sites
                .entry(format!("{}.{}", unit.package, decl.name))
                .or_default()
                .push((unit, decl));
        }
    }
    for sites in decl_sites.values_mut() {
        sites.sort_by_key(|(unit, decl)| (unit.path.clone(), decl.line));
    }

    let mut index: BTreeMap<String, DeclInfo> = BTreeMap::new();
    for (fq, sites) in &decl_sites {
        let (first_unit, first_decl) = sites[0];
        for (unit, decl) in sites.iter().skip(1) {
            errors.push(LowerError::new(
                &unit.path,
                decl.line,
                format!(
                    "duplicate declaration of `{fq}` (first at {}:{})",
                    first_unit.path, first_decl.line
                ),
            ));
        }
        index.insert(fq.clone(), decl_info(first_unit, first_decl, &mut errors));
    }

    // Per-unit scope: simple name → fully qualified name. Same-package
    // classes are visible directly; imports bring in one class each.
    let mut scopes: Vec<BTreeMap<String, String>> = Vec::with_capacity(units.len());
    for unit in units {
        let mut scope: BTreeMap<String, String> = BTreeMap::new();
        for (fq, info) in &index {
            if info.package == unit.package {
                let simple = fq.rsplit('.').next().expect("non-empty name");
                scope.insert(simple.to_string(), fq.clone());
            }
        }
        for import in &unit.imports {
            if !index.contains_key(&import.path) {
                errors.push(LowerError::new(
                    &unit.path,
                    import.line,
                    format!("import of unknown class `{}`", import.path),
                ));
                continue;
            }
            let simple = import.path.rsplit('.').next().expect("non-empty path");
            match scope.get(simple) {
                Some(existing) if existing != &import.path => {
                    errors.push(LowerError::new(
                        &unit.path,
                        import.line,
                        format!(
                            "import `{}` conflicts with `{existing}` already in scope",
                            import.path
                        ),
                    ));
                }
                _ => {
                    scope.insert(simple.to_string(), import.path.clone());
                }
            }
        }
        scopes.push(scope);
    }
    let scope_of: BTreeMap<&str, usize> = units
        .iter()
        .enumerate()
        .map(|(i, unit)| (unit.path.as_str(), i))
        .collect();

    // Pass two: resolve inheritance clauses and build class skeletons.
    let mut model = DesignModel::default();
    for unit in units {
        model
            .packages
            .entry(unit.package.clone())
            .or_insert_with(|| Package {
                name: unit.package.clone(),
                classes: BTreeMap::new(),
            });
    }

    let mut extends_edges: BTreeMap<String, String> = BTreeMap::new();
    for (fq, sites) in &decl_sites {
        let (unit, decl) = sites[0];
        let scope = &scopes[scope_of[unit.path.as_str()]];
        let mut class = Class {
            name: decl.name.clone(),
            package: unit.package.clone(),
            kind: index[fq].kind,
            extends: None,
            implements: BTreeSet::new(),
            attributes: BTreeSet::new(),
            methods: BTreeMap::new(),
            decl_line: decl.line,
        };
        match &decl.kind {
            DeclKind::Interface { sigs } => {
                for sig in sigs {
                    class.methods.entry(sig.name.clone()).or_insert(Method {
                        name: sig.name.clone(),
                        owner: fq.clone(),
                        params: sig.params.clone(),
                        is_signature: true,
                        facts: MethodFacts::default(),
                        decl_line: sig.line,
                    });
                }
            }
            DeclKind::Class {
                extends,
                implements,
                members,
                ..
            } => {
                if let Some(parent) = extends {
                    if let Some(parent_fq) = resolve_name(parent, scope, &unit.path, &mut errors) {
                        match index[&parent_fq].kind {
                            ClassKind::Interface => errors.push(LowerError::new(
                                &unit.path,
                                parent.line,
                                format!("extends `{parent_fq}`, which is an interface"),
                            )),
                            _ => {
                                extends_edges.insert(fq.clone(), parent_fq.clone());
                                class.extends = Some(parent_fq);
                            }
                        }
                    }
                }
                for iface in implements {
                    if let Some(iface_fq) = resolve_name(iface, scope, &unit.path, &mut errors) {
                        if index[&iface_fq].kind == ClassKind::Interface {
                            class.implements.insert(iface_fq);
                        } else {
                            errors.push(LowerError::new(
                                &unit.path,
                                iface.line,
                                format!("implements `{iface_fq}`, which is not an interface"),
                            ));
                        }
                    }
                }
                for member in members {
                    match member {
                        Member::Field(field) => {
                            class.attributes.insert(field.name.clone());
                        }
                        Member::Method(method) => {
                            class.methods.entry(method.name.clone()).or_insert(Method {
                                name: method.name.clone(),
                                owner: fq.clone(),
                                params: method.params.clone(),
                                is_signature: false,
                                facts: MethodFacts::default(),
                                decl_line: method.line,
                            });
                        }
                    }
                }
            }
        }
        model
            .packages
            .get_mut(&unit.package)
            .expect("package created above")
            .classes
            .insert(decl.name.clone(), class);
    }

    // Inheritance cycles: flag every class that reappears in its own chain.
    for fq in index.keys() {
        let mut chain = vec![fq.clone()];
        let mut seen: BTreeSet<&String> = BTreeSet::new();
        seen.insert(fq);
        let mut cursor = extends_edges.get(fq);
        while let Some(parent) = cursor {
            if parent == fq {
                let info = &index[fq];
                errors.push(LowerError::new(
                    info.path,
                    info.line,
                    format!(
                        "inheritance cycle: {} extends {fq}",
                        chain.join(" extends ")
                    ),
                ));
                break;
            }
            if !seen.insert(parent) {
                break; // a cycle, but not through `fq`
            }
            chain.push(parent.clone());
            cursor = extends_edges.get(parent);
        }
    }

    // Pass three: walk bodies in sorted method order, assigning ids and
    // collecting facts. Only the winning declaration of each class is
    // walked; duplicate methods within one class keep the first body.
    let mut work: Vec<(String, &str, &SourceUnit, &MethodDecl)> = Vec::new();
    for (fq, sites) in &decl_sites {
        let (unit, decl) = sites[0];
        if let DeclKind::Class { members, .. } = &decl.kind {
            let mut seen: BTreeSet<&str> = BTreeSet::new();
            for member in members {
                if let Member::Method(method) = member {
                    if seen.insert(&method.name) {
                        work.push((format!("{fq}.{}", method.name), fq, unit, method));
                    }
                }
            }
        }
    }
    work.sort_by(|a, b| a.0.cmp(&b.0));

    let mut sp_counter: u64 = 0;
    let mut br_counter: u64 = 0;
    for (_, class_fq, unit, method_decl) in &work {
        let mut facts = MethodFacts::default();
        let ctx = BodyContext {
            class_fq,
            own_attrs: &index[*class_fq].attributes,
            scope: &scopes[scope_of[unit.path.as_str()]],
            path: &unit.path,
            index: &index,
        };
        walk_block(
            &method_decl.body,
            &ctx,
            &mut facts,
            &mut sp_counter,
            &mut br_counter,
            &mut errors,
        );
        facts.loc = line_tallies(unit, &method_decl.body);
        let class = model
            .packages
            .get_mut(&unit.package)
            .and_then(|p| p.classes.get_mut(class_fq.rsplit('.').next().unwrap()))
            .expect("class skeleton built in pass two");
        class
            .methods
            .get_mut(&method_decl.name)
            .expect("method skeleton built in pass two")
            .facts = facts;
    }

    if errors.is_empty() {
        debug_assert_eq!(crate::model::validate_model(&model), Vec::new());
        Ok(model)
    } else {
        errors.sort();
        errors.dedup();
        Err(errors)
    }
}

fn decl_info<'a>(
    unit: &'a SourceUnit,
    decl: &'a Decl,
    errors: &mut Vec<LowerError>,
) -> DeclInfo<'a> {
    let mut methods: BTreeSet<&str> = BTreeSet::new();
    let mut attributes: BTreeSet<&str> = BTreeSet::new();
    let kind = match &decl.kind {
        DeclKind::Interface { sigs } => {
            for sig in sigs {
                if !methods.insert(&sig.name) {
                    errors.push(LowerError::new(
                        &unit.path,
                        sig.line,
                        format!("duplicate signature `{}` in `{}`", sig.name, decl.name),
                    ));
                }
            }
            ClassKind::Interface
        }
        DeclKind::Class {
            is_abstract,
            members,
            ..
        } => {
            for member in members {
                match member {
                    Member::Field(field) => {
                        if !attributes.insert(&field.name) {
                            errors.push(LowerError::new(
                                &unit.path,
                                field.line,
                                format!("duplicate field `{}` in `{}`", field.name, decl.name),
                            ));
                        }
                    }
                    Member::Method(method) => {
                        if !methods.insert(&method.name) {
                            errors.push(LowerError::new(
                                &unit.path,
                                method.line,
                                format!("duplicate method `{}` in `{}`", method.name, decl.name),
                            ));
                        }
                    }
                }
            }
            if *is_abstract {
                ClassKind::Abstract
            } else {
                ClassKind::Concrete
            }
        }
    };
    DeclInfo {
        package: &unit.package,
        path: &unit.path,
        line: decl.line,
        kind,
        methods,
        attributes,
    }
}

struct BodyContext<'a> {
    class_fq: &'a str,
    own_attrs: &'a BTreeSet<&'a str>,
    scope: &'a BTreeMap<String, String>,
    path: &'a str,
    index: &'a BTreeMap<String, DeclInfo<'a>>,
}

fn resolve_name(
    name: &NameRef,
    scope: &BTreeMap<String, String>,
    path: &str,
    errors: &mut Vec<LowerError>,
) -> Option<String> {
    match scope.get(&name.name) {
        Some(fq) => Some(fq.clone()),
        None => {
            errors.push(LowerError::new(
                path,
                name.line,
                format!("unresolved name `{}`", name.name),
            ));
            None
        }
    }
}

fn push_point(facts: &mut MethodFacts, sp_counter: &mut u64, kind: PointKind, line: u32) {
    *sp_counter += 1;
    facts.sequence_points.push(SequencePoint {
        id: format!("sp{sp_counter}"),
        kind,
        line,
    });
}

fn push_branch(facts: &mut MethodFacts, br_counter: &mut u64, line: u32) {
    *br_counter += 1;
    facts.branches.push(BranchPoint {
        id: format!("br{br_counter}"),
        line,
    });
    facts.decision_points += 1;
}

fn walk_block(
    block: &Block,
    ctx: &BodyContext,
    facts: &mut MethodFacts,
    sp_counter: &mut u64,
    br_counter: &mut u64,
    errors: &mut Vec<LowerError>,
) {
    for stmt in &block.stmts {
        match stmt {
            Stmt::Call {
                class,
                method,
                line,
                ..
            } => {
                push_point(facts, sp_counter, PointKind::Call, *line);
                if let Some(target) = resolve_name(class, ctx.scope, ctx.path, errors) {
                    if ctx.index[&target].methods.contains(method.as_str()) {
                        facts.calls.push(CallSite {
                            class: target,
                            method: method.clone(),
                            line: *line,
                        });
                    } else {
                        errors.push(LowerError::new(
                            ctx.path,
                            *line,
                            format!("`{target}` has no method `{method}`"),
                        ));
                    }
                }
            }
            Stmt::Access {
                class,
                attribute,
                line,
            } => {
                push_point(facts, sp_counter, PointKind::Access, *line);
                if let Some(target) = resolve_name(class, ctx.scope, ctx.path, errors) {
                    if ctx.index[&target].attributes.contains(attribute.as_str()) {
                        facts.attribute_accesses.insert((target, attribute.clone()));
                    } else {
                        errors.push(LowerError::new(
                            ctx.path,
                            *line,
                            format!("`{target}` has no attribute `{attribute}`"),
                        ));
                    }
                }
            }
            Stmt::Assign { name, line } => {
                push_point(facts, sp_counter, PointKind::Assign, *line);
                if ctx.own_attrs.contains(name.as_str()) {
                    facts
                        .attribute_accesses
                        .insert((ctx.class_fq.to_string(), name.clone()));
                } else {
                    errors.push(LowerError::new(
                        ctx.path,
                        *line,
                        format!("`{name}` is not an attribute of `{}`", ctx.class_fq),
                    ));
                }
            }
            Stmt::If {
                then_block,
                else_block,
                line,
                ..
            } => {
                push_point(facts, sp_counter, PointKind::If, *line);
                push_branch(facts, br_counter, *line);
                walk_block(then_block, ctx, facts, sp_counter, br_counter, errors);
                if let Some(else_block) = else_block {
                    walk_block(else_block, ctx, facts, sp_counter, br_counter, errors);
                }
            }
            Stmt::While { body, line, .. } => {
                push_point(facts, sp_counter, PointKind::While, *line);
                push_branch(facts, br_counter, *line);
                walk_block(body, ctx, facts, sp_counter, br_counter, errors);
            }
            Stmt::Return { line } => push_point(facts, sp_counter, PointKind::Return, *line),
        }
    }
}

/// Classify every line of the body extent (opening through closing brace).
fn line_tallies(unit: &SourceUnit, body: &Block) -> LocFacts {
    let mut loc = LocFacts::default();
    let first = body.open_line.max(1) as usize;
    let last = body.close_line as usize;
    for line_no in first..=last {
        let Some(line) = unit.lines.get(line_no - 1) else {
            break;
        };
        loc.total += 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            loc.blank += 1;
        } else if trimmed.starts_with("//") {
            loc.comment += 1;
        }
    }
    loc
}
