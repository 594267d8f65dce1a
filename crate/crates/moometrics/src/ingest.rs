//! Readers and writers for the declarative input files.
//!
//! All four formats are line-oriented keyword formats, so every error can
//! carry an exact 1-based line number. Blank lines and `#` comment lines
//! are allowed everywhere. Names must be declared before they are
//! referenced (a reviewer before its verdicts, a use case before its
//! messages), which is also the order the writers emit.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::model::{
    Arm, ChangeReason, CoverageTrace, EventKind, Requirement, RequirementChange, RequirementSet,
    TraceEvent, UseCase, UseCaseModel, Validity,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestErrorKind {
    /// The line does not match the format grammar.
    Format,
    /// The line references something that was never declared.
    Reference,
    /// The line re-declares something that already exists.
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestError {
    pub path: String,
    /// 1-based line number; io failures are pinned to line 1.
    pub line: u32,
    pub message: String,
    pub kind: IngestErrorKind,
}

impl IngestError {
    fn new(path: &str, line: u32, kind: IngestErrorKind, message: impl Into<String>) -> Self {
        IngestError {
            path: path.to_string(),
            line,
            message: message.into(),
            kind,
        }
    }
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: error: {}", self.path, self.line, self.message)
    }
}

impl std::error::Error for IngestError {}

fn read_file(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|e| {
        IngestError::new(
            &path.display().to_string(),
            1,
            IngestErrorKind::Format,
            format!("cannot read file: {e}"),
        )
    })
}

/// Lines worth parsing: skips blanks and `#` comments, keeps numbering.
fn content_lines(text: &str) -> impl Iterator<Item = (u32, &str)> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((idx as u32 + 1, line))
        }
    })
}

/// Split off a double-quoted string from the front of `rest`; returns the
/// string body and what follows the closing quote.
fn take_quoted<'a>(
    rest: &'a str,
    path: &str,
    line: u32,
    what: &str,
) -> Result<(&'a str, &'a str), IngestError> {
    let rest = rest.trim_start();
    let Some(after_open) = rest.strip_prefix('"') else {
        return Err(IngestError::new(
            path,
            line,
            IngestErrorKind::Format,
            format!("expected quoted {what}"),
        ));
    };
    let Some(close) = after_open.find('"') else {
        return Err(IngestError::new(
            path,
            line,
            IngestErrorKind::Format,
            format!("unterminated quoted {what}"),
        ));
    };
    Ok((&after_open[..close], &after_open[close + 1..]))
}

// ---------------------------------------------------------------------------
// Requirements (.req)
// ---------------------------------------------------------------------------

/// Read a requirements file (`.req`).
pub fn read_requirements(path: &Path) -> Result<RequirementSet, IngestError> {
    parse_requirements(&read_file(path)?, &path.display().to_string())
}

/// Parse requirements-file content. `path` only labels errors.
pub fn parse_requirements(text: &str, path: &str) -> Result<RequirementSet, IngestError> {
    let mut set = RequirementSet::default();
    let mut req_index: BTreeMap<String, usize> = BTreeMap::new();
    // entity name → line of its first `provides` (to report orphans)
    let mut provides_seen: BTreeMap<String, u32> = BTreeMap::new();
    let mut requires_seen: BTreeMap<String, u32> = BTreeMap::new();

    for (line_no, line) in content_lines(text) {
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "reviewer" => {
                let id = single_token(rest, path, line_no, "reviewer id")?;
                set.reviewers.insert(id.to_string());
            }
            "req" => {
                let (id, tail) = first_token(rest, path, line_no, "requirement id")?;
                let (text, tail) = take_quoted(tail, path, line_no, "requirement text")?;
                let validity = match tail.trim() {
                    "valid" => Validity::Valid,
                    "notyetvalid" => Validity::NotYetValid,
                    other => {
                        return Err(IngestError::new(
                            path,
                            line_no,
                            IngestErrorKind::Format,
                            format!("expected `valid` or `notyetvalid`, found `{other}`"),
                        ))
                    }
                };
                if req_index.contains_key(id) {
                    return Err(IngestError::new(
                        path,
                        line_no,
                        IngestErrorKind::Duplicate,
                        format!("duplicate requirement id `{id}`"),
                    ));
                }
                req_index.insert(id.to_string(), set.requirements.len());
                set.requirements.push(Requirement {
                    id: id.to_string(),
                    text: text.to_string(),
                    validity,
                    reviewer_verdicts: BTreeMap::new(),
                    changes: Vec::new(),
                });
            }
            "verdict" => {
                let (req_id, tail) = first_token(rest, path, line_no, "requirement id")?;
                let (reviewer, tail) = first_token(tail, path, line_no, "reviewer id")?;
                let (label, tail) = take_quoted(tail, path, line_no, "verdict label")?;
                expect_end(tail, path, line_no)?;
                let Some(&idx) = req_index.get(req_id) else {
                    return Err(unknown(path, line_no, "requirement", req_id));
                };
                if !set.reviewers.contains(reviewer) {
                    return Err(unknown(path, line_no, "reviewer", reviewer));
                }
                let verdicts = &mut set.requirements[idx].reviewer_verdicts;
                if verdicts.contains_key(reviewer) {
                    return Err(IngestError::new(
                        path,
                        line_no,
                        IngestErrorKind::Duplicate,
                        format!("duplicate verdict for `{req_id}` by `{reviewer}`"),
                    ));
                }
                verdicts.insert(reviewer.to_string(), label.to_string());
            }
            "change" => {
                let (req_id, tail) = first_token(rest, path, line_no, "requirement id")?;
                let (seq_text, tail) = first_token(tail, path, line_no, "sequence number")?;
                let reason_text = single_token(tail, path, line_no, "change reason")?;
                let Some(&idx) = req_index.get(req_id) else {
                    return Err(unknown(path, line_no, "requirement", req_id));
                };
                let seq: u64 = seq_text.parse().map_err(|_| {
                    IngestError::new(
                        path,
                        line_no,
                        IngestErrorKind::Format,
                        format!("`{seq_text}` is not a sequence number"),
                    )
                })?;
                let reason = match reason_text {
                    "business" => ChangeReason::Business,
                    "clarification" => ChangeReason::Clarification,
                    "error" => ChangeReason::Error,
                    "scope" => ChangeReason::Scope,
                    "other" => ChangeReason::Other,
                    other => {
                        return Err(IngestError::new(
                            path,
                            line_no,
                            IngestErrorKind::Format,
                            format!("`{other}` is not a change reason"),
                        ))
                    }
                };
                let changes = &mut set.requirements[idx].changes;
                if let Some(last) = changes.last() {
                    if seq <= last.seq {
                        return Err(IngestError::new(
                            path,
                            line_no,
                            IngestErrorKind::Format,
                            format!(
                                "change sequence for `{req_id}` must increase ({} then {seq})",
                                last.seq
                            ),
                        ));
                    }
                }
                changes.push(RequirementChange { seq, reason });
            }
            "entity" => {
                let (name, tail) = first_token(rest, path, line_no, "entity name")?;
                let (which, tail) = first_token(tail, path, line_no, "`requires` or `provides`")?;
                let services = service_list(tail, path, line_no)?;
                let checklist = set.entity_checklists.entry(name.to_string()).or_default();
                match which {
                    "requires" => {
                        if requires_seen.insert(name.to_string(), line_no).is_some() {
                            return Err(IngestError::new(
                                path,
                                line_no,
                                IngestErrorKind::Duplicate,
                                format!("duplicate `requires` for entity `{name}`"),
                            ));
                        }
                        checklist.required = services;
                    }
                    "provides" => {
                        if provides_seen.insert(name.to_string(), line_no).is_some() {
                            return Err(IngestError::new(
                                path,
                                line_no,
                                IngestErrorKind::Duplicate,
                                format!("duplicate `provides` for entity `{name}`"),
                            ));
                        }
                        checklist.provided = services;
                    }
                    other => {
                        return Err(IngestError::new(
                            path,
                            line_no,
                            IngestErrorKind::Format,
                            format!("expected `requires` or `provides`, found `{other}`"),
                        ))
                    }
                }
            }
            other => {
                return Err(IngestError::new(
                    path,
                    line_no,
                    IngestErrorKind::Format,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }

    // An entity with services provided but no required checklist has nothing
    // to be measured against.
    for (name, line) in &provides_seen {
        if !requires_seen.contains_key(name) {
            return Err(IngestError::new(
                path,
                *line,
                IngestErrorKind::Reference,
                format!("entity `{name}` provides services but declares no `requires` checklist"),
            ));
        }
    }

    debug_assert_eq!(crate::model::validate_requirements(&set), Vec::new());
    Ok(set)
}

/// Render a requirement set in `.req` format; re-reading yields an equal
/// value. Ids must be single tokens; texts and labels must not contain `"`.
pub fn write_requirements(set: &RequirementSet) -> String {
    let mut out = String::new();
    for reviewer in &set.reviewers {
        out.push_str(&format!("reviewer {reviewer}\n"));
    }
    for req in &set.requirements {
        let validity = match req.validity {
            Validity::Valid => "valid",
            Validity::NotYetValid => "notyetvalid",
        };
        out.push_str(&format!("req {} \"{}\" {validity}\n", req.id, req.text));
    }
    for req in &set.requirements {
        for (reviewer, label) in &req.reviewer_verdicts {
            out.push_str(&format!("verdict {} {reviewer} \"{label}\"\n", req.id));
        }
        for change in &req.changes {
            out.push_str(&format!("change {} {} {}\n", req.id, change.seq, change.reason));
        }
    }
    for (entity, checklist) in &set.entity_checklists {
        let required: Vec<&str> = checklist.required.iter().map(|s| s.as_str()).collect();
        out.push_str(&format!("entity {entity} requires {}\n", required.join(",")));
        if !checklist.provided.is_empty() {
            let provided: Vec<&str> = checklist.provided.iter().map(|s| s.as_str()).collect();
            out.push_str(&format!("entity {entity} provides {}\n", provided.join(",")));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Use cases (.ucm)
// ---------------------------------------------------------------------------

/// Read a use-case model file (`.ucm`).
pub fn read_usecases(path: &Path) -> Result<UseCaseModel, IngestError> {
    parse_usecases(&read_file(path)?, &path.display().to_string())
}

/// Parse use-case-file content. `path` only labels errors.
pub fn parse_usecases(text: &str, path: &str) -> Result<UseCaseModel, IngestError> {
    let mut model = UseCaseModel::default();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();

    for (line_no, line) in content_lines(text) {
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "actor" => {
                let name = single_token(rest, path, line_no, "actor name")?;
                model.actors.insert(name.to_string());
            }
            "usecase" => {
                let name = single_token(rest, path, line_no, "use-case name")?;
                if index.contains_key(name) {
                    return Err(IngestError::new(
                        path,
                        line_no,
                        IngestErrorKind::Duplicate,
                        format!("duplicate use case `{name}`"),
                    ));
                }
                index.insert(name.to_string(), model.use_cases.len());
                model.use_cases.push(UseCase {
                    name: name.to_string(),
                    actors: Default::default(),
                    messages: Vec::new(),
                    classes: Default::default(),
                });
            }
            "uses" => {
                let (use_case, tail) = first_token(rest, path, line_no, "use-case name")?;
                let actor = single_token(tail, path, line_no, "actor name")?;
                let Some(&idx) = index.get(use_case) else {
                    return Err(unknown(path, line_no, "use case", use_case));
                };
                if !model.actors.contains(actor) {
                    return Err(unknown(path, line_no, "actor", actor));
                }
                model.use_cases[idx].actors.insert(actor.to_string());
            }
            "message" => {
                let (use_case, tail) = first_token(rest, path, line_no, "use-case name")?;
                let message = single_token(tail, path, line_no, "message name")?;
                let Some(&idx) = index.get(use_case) else {
                    return Err(unknown(path, line_no, "use case", use_case));
                };
                model.use_cases[idx].messages.push(message.to_string());
            }
            "class" => {
                let (use_case, tail) = first_token(rest, path, line_no, "use-case name")?;
                let class = single_token(tail, path, line_no, "class name")?;
                let Some(&idx) = index.get(use_case) else {
                    return Err(unknown(path, line_no, "use case", use_case));
                };
                model.use_cases[idx].classes.insert(class.to_string());
            }
            other => {
                return Err(IngestError::new(
                    path,
                    line_no,
                    IngestErrorKind::Format,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }

    debug_assert_eq!(crate::model::validate_usecases(&model), Vec::new());
    Ok(model)
}

/// Render a use-case model in `.ucm` format; re-reading yields an equal
/// value. Names must be single tokens.
pub fn write_usecases(model: &UseCaseModel) -> String {
    let mut out = String::new();
    for actor in &model.actors {
        out.push_str(&format!("actor {actor}\n"));
    }
    for use_case in &model.use_cases {
        out.push_str(&format!("usecase {}\n", use_case.name));
        for actor in &use_case.actors {
            out.push_str(&format!("uses {} {actor}\n", use_case.name));
        }
        for message in &use_case.messages {
            out.push_str(&format!("message {} {message}\n", use_case.name));
        }
        for class in &use_case.classes {
            out.push_str(&format!("class {} {class}\n", use_case.name));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Coverage traces (.trc)
// ---------------------------------------------------------------------------

/// Read a coverage trace (`.trc`). The run id is the file stem.
pub fn read_trace(path: &Path) -> Result<CoverageTrace, IngestError> {
    let run_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    parse_trace(&read_file(path)?, &path.display().to_string(), &run_id)
}

/// Parse trace content. `path` only labels errors; `run_id` names the run.
pub fn parse_trace(text: &str, path: &str, run_id: &str) -> Result<CoverageTrace, IngestError> {
    let mut trace = CoverageTrace {
        run_id: run_id.to_string(),
        events: Vec::new(),
    };
    for (line_no, line) in content_lines(text) {
        let mut parts = line.split_whitespace();
        let tag = parts.next().expect("content lines are non-empty");
        let kind = match (tag, parts.next(), parts.next(), parts.next()) {
            ("M", Some(method), None, None) => EventKind::MethodEntry(method.to_string()),
            ("S", Some(point), None, None) => EventKind::Point(point.to_string()),
            ("B", Some(branch), Some(arm), None) => {
                let arm = match arm {
                    "taken" => Arm::Taken,
                    "not_taken" => Arm::NotTaken,
                    other => {
                        return Err(IngestError::new(
                            path,
                            line_no,
                            IngestErrorKind::Format,
                            format!("branch arm must be `taken` or `not_taken`, found `{other}`"),
                        ))
                    }
                };
                EventKind::BranchArm {
                    branch: branch.to_string(),
                    arm,
                }
            }
            _ => {
                return Err(IngestError::new(
                    path,
                    line_no,
                    IngestErrorKind::Format,
                    format!("malformed event line `{line}`"),
                ))
            }
        };
        trace.events.push(TraceEvent {
            kind,
            line: line_no,
        });
    }
    Ok(trace)
}

// ---------------------------------------------------------------------------
// Checklist facts (.chk)
// ---------------------------------------------------------------------------

/// Read a checklist facts file (`.chk`): `check-id = true|false` per line.
pub fn read_checklist_facts(path: &Path) -> Result<BTreeMap<String, bool>, IngestError> {
    parse_checklist_facts(&read_file(path)?, &path.display().to_string())
}

/// Parse checklist facts. Unknown and derived check ids are rejected here
/// so a stale facts file fails loudly.
pub fn parse_checklist_facts(text: &str, path: &str) -> Result<BTreeMap<String, bool>, IngestError> {
    let mut facts = BTreeMap::new();
    for (line_no, line) in content_lines(text) {
        let Some((key, value)) = line.split_once('=') else {
            return Err(IngestError::new(
                path,
                line_no,
                IngestErrorKind::Format,
                format!("expected `check-id = true|false`, found `{line}`"),
            ));
        };
        let key = key.trim();
        let value = match value.trim() {
            "true" => true,
            "false" => false,
            other => {
                return Err(IngestError::new(
                    path,
                    line_no,
                    IngestErrorKind::Format,
                    format!("check value must be `true` or `false`, found `{other}`"),
                ))
            }
        };
        if !crate::coverage::is_registered_check(key) {
            return Err(IngestError::new(
                path,
                line_no,
                IngestErrorKind::Reference,
                format!("unknown check id `{key}`"),
            ));
        }
        if facts.insert(key.to_string(), value).is_some() {
            return Err(IngestError::new(
                path,
                line_no,
                IngestErrorKind::Duplicate,
                format!("duplicate check id `{key}`"),
            ));
        }
    }
    Ok(facts)
}

// ---------------------------------------------------------------------------
// shared token helpers
// ---------------------------------------------------------------------------

fn unknown(path: &str, line: u32, kind: &str, name: &str) -> IngestError {
    IngestError::new(
        path,
        line,
        IngestErrorKind::Reference,
        format!("unknown {kind} `{name}`"),
    )
}

/// One whitespace-delimited token plus the remainder.
fn first_token<'a>(
    rest: &'a str,
    path: &str,
    line: u32,
    what: &str,
) -> Result<(&'a str, &'a str), IngestError> {
    let rest = rest.trim_start();
    if rest.is_empty() {
        return Err(IngestError::new(
            path,
            line,
            IngestErrorKind::Format,
            format!("missing {what}"),
        ));
    }
    Ok(rest.split_once(char::is_whitespace).unwrap_or((rest, "")))
}

/// Exactly one token and nothing after it.
fn single_token<'a>(
    rest: &'a str,
    path: &str,
    line: u32,
    what: &str,
) -> Result<&'a str, IngestError> {
    let (token, tail) = first_token(rest, path, line, what)?;
    expect_end(tail, path, line)?;
    Ok(token)
}

fn expect_end(tail: &str, path: &str, line: u32) -> Result<(), IngestError> {
    if tail.trim().is_empty() {
        Ok(())
    } else {
        Err(IngestError::new(
            path,
            line,
            IngestErrorKind::Format,
            format!("unexpected trailing input `{}`", tail.trim()),
        ))
    }
}

/// Comma-separated, non-empty service names.
fn service_list(
    rest: &str,
    path: &str,
    line: u32,
) -> Result<std::collections::BTreeSet<String>, IngestError> {
    let rest = rest.trim();
    if rest.is_empty() {
        return Err(IngestError::new(
            path,
            line,
            IngestErrorKind::Format,
            "missing service list",
        ));
    }
    let mut services = std::collections::BTreeSet::new();
    for item in rest.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(IngestError::new(
                path,
                line,
                IngestErrorKind::Format,
                "empty service name in list",
            ));
        }
        services.insert(item.to_string());
    }
    Ok(services)
}
