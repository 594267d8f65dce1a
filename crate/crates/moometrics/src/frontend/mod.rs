//! Source-language frontend: lexing, parsing, and lowering to the design
//! model.
//!
//! The language is a deliberately small object-oriented notation — packages,
//! imports, interfaces, classes with single inheritance, attribute and
//! method declarations, and six statement forms — just enough surface to
//! carry every fact the metric engines consume: call and attribute-access
//! edges, branching statements, statement-level sequence points, and line
//! tallies. See the grammar reference in the crate README.
//!
//! Pipeline: [`parser::parse_unit`] per file, then [`lower::lower`] joins
//! all files into one validated [`crate::model::DesignModel`].

pub mod ast;
pub mod lower;
pub mod parser;
pub mod token;

use std::fmt;

pub use ast::SourceUnit;
pub use lower::{lower, LowerError};
pub use parser::parse_unit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned lexical or syntax problem in one source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub path: String,
    /// 1-based line.
    pub line: u32,
    /// 1-based column.
    pub column: u32,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}:{}: {severity}: {}",
            self.path, self.line, self.column, self.message
        )
    }
}

/// Render the id listing that trace authors consult: one line per method,
/// sequence point, and branch, with the source position each id came from.
///
/// Interface signatures are omitted — they have no body, so no trace event
/// can reference them.
pub fn symbol_listing(model: &crate::model::DesignModel, units: &[SourceUnit]) -> String {
    use std::collections::BTreeMap;

    let mut class_paths: BTreeMap<String, &str> = BTreeMap::new();
    for unit in units {
        for decl in &unit.decls {
            class_paths.insert(format!("{}.{}", unit.package, decl.name), &unit.path);
        }
    }

    let mut methods: Vec<(String, &crate::model::Method)> = model
        .methods()
        .filter(|(_, _, method)| !method.is_signature)
        .map(|(fq, _, method)| (fq, method))
        .collect();
    methods.sort_by(|a, b| a.0.cmp(&b.0));

    let mut out = String::new();
    for (fq, method) in methods {
        let path = class_paths.get(&method.owner).copied().unwrap_or("?");
        out.push_str(&format!("method {fq} {path}:{}\n", method.decl_line));
        for point in &method.facts.sequence_points {
            out.push_str(&format!("point {} {fq} {path}:{}\n", point.id, point.line));
        }
        for branch in &method.facts.branches {
            out.push_str(&format!(
                "branch {} {fq} {path}:{}\n",
                branch.id, branch.line
            ));
        }
    }
    out
}
