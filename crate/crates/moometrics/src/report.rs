//! Report assembly, threshold gates, and serialization.
//!
//! The metric modules return typed values; this module flattens them into
//! uniform (metric, scope, value, status) rows, checks configured bounds,
//! and renders the result as JSON, CSV, or Markdown. Rationals stay exact
//! until the very last step, so gate comparisons never suffer float fuzz,
//! and rendering the same report twice yields identical bytes.

use std::collections::BTreeMap;

use crate::coverage::{checklist, coverage, ChecklistError, ChecklistParams, CoverageError, CoverageScope};
use crate::design::{
    abstractness, adp, cbo, dip, dit, ep, instability, lcom, loc, model_counts, noc,
    package_coupling, rfc, wmc, LocMode, LocScope, WmcWeighting,
};
use crate::ingest::{IngestError, IngestErrorKind};
use crate::model::{CoverageTrace, DesignModel, RequirementSet, UseCaseModel};
use crate::requirements::{completeness, nau, nmu, nscu, qc, qua, volatility};
use crate::value::{format_rational, parse_decimal, ratio, MetricError, MetricOutcome, Rational};

// ---------------------------------------------------------------------------
// Rows and sections
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowValue {
    Number(Rational),
    /// Non-numeric results: pass/fail marks, cycle listings.
    Text(String),
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub metric: String,
    /// "model", "set", "package:shop.core", "class:shop.core.Order",
    /// "usecase:Checkout", "entity:List", "category:testable",
    /// "check:testable.logging".
    pub scope: String,
    pub value: RowValue,
}

impl Row {
    fn number(metric: &str, scope: impl Into<String>, value: Rational) -> Self {
        Row {
            metric: metric.to_string(),
            scope: scope.into(),
            value: RowValue::Number(value),
        }
    }

    fn count(metric: &str, scope: impl Into<String>, value: u64) -> Self {
        Self::number(metric, scope, ratio(value as i64, 1))
    }

    fn text(metric: &str, scope: impl Into<String>, value: impl Into<String>) -> Self {
        Row {
            metric: metric.to_string(),
            scope: scope.into(),
            value: RowValue::Text(value.into()),
        }
    }

    fn not_applicable(metric: &str, scope: impl Into<String>) -> Self {
        Row {
            metric: metric.to_string(),
            scope: scope.into(),
            value: RowValue::NotApplicable,
        }
    }

    /// A row for a possibly-not-applicable outcome, plus a companion
    /// `<metric>_fallback` row when a fallback stands in.
    fn outcome(metric: &str, scope: &str, outcome: &MetricOutcome, rows: &mut Vec<Row>) {
        match outcome.value() {
            Some(v) => rows.push(Self::number(metric, scope, v)),
            None => {
                rows.push(Self::not_applicable(metric, scope));
                if let Some(fallback) = outcome.fallback() {
                    rows.push(Self::number(&format!("{metric}_fallback"), scope, fallback));
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    /// "requirements", "design", "coverage", or "checklist".
    pub title: &'static str,
    pub rows: Vec<Row>,
}

/// All computed rows, ready for gating. `gated_wmc` records which of the
/// two reported WMC variants the `max_wmc` bound applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisResults {
    pub sections: Vec<Section>,
    pub gated_wmc: &'static str,
}

impl Default for AnalysisResults {
    fn default() -> Self {
        AnalysisResults {
            sections: Vec::new(),
            gated_wmc: "wmc_cyclomatic",
        }
    }
}

impl AnalysisResults {
    fn rows(&self) -> impl Iterator<Item = &Row> {
        self.sections.iter().flat_map(|s| s.rows.iter())
    }
}

// ---------------------------------------------------------------------------
// Section builders
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct DesignOptions {
    pub wmc_weighting: WmcWeighting,
    pub cbo_fan_in: bool,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            wmc_weighting: WmcWeighting::Cyclomatic,
            cbo_fan_in: false,
        }
    }
}

impl DesignOptions {
    pub fn gated_wmc_metric(&self) -> &'static str {
        match self.wmc_weighting {
            WmcWeighting::Cyclomatic => "wmc_cyclomatic",
            WmcWeighting::Unit => "wmc_unit",
        }
    }
}

fn package_scope(name: &str) -> String {
    format!("package:{name}")
}

fn class_scope(fq: &str) -> String {
    format!("class:{fq}")
}

/// Size counts, LOC aggregates, the class metrics, and the package
/// metrics, grouped by metric with scopes sorted. Scope lookups cannot
/// fail here because every scope comes from the model itself.
pub fn design_section(model: &DesignModel, options: &DesignOptions) -> Section {
    let mut rows = Vec::new();
    let counts = model_counts(model);
    rows.push(Row::count("count_packages", "model", counts.packages));
    rows.push(Row::count("count_classes", "model", counts.classes));
    rows.push(Row::count("count_concrete_classes", "model", counts.concrete_classes));
    rows.push(Row::count("count_abstract_classes", "model", counts.abstract_classes));
    rows.push(Row::count("count_interfaces", "model", counts.interfaces));
    rows.push(Row::count("count_subclass_edges", "model", counts.subclass_edges));
    rows.push(Row::count("count_implements_edges", "model", counts.implements_edges));
    rows.push(Row::count("count_call_edges", "model", counts.call_edges));
    rows.push(Row::count("count_access_edges", "model", counts.access_edges));
    rows.push(Row::count("count_methods", "model", counts.methods));
    rows.push(Row::count("count_attributes", "model", counts.attributes));

    let class_names: Vec<String> = model.classes().map(|(fq, _)| fq).collect();
    let loc_modes = [
        ("loc_total", LocMode::Total),
        ("loc_no_blank", LocMode::NoBlank),
        ("loc_no_blank_no_comment", LocMode::NoBlankNoComment),
    ];
    for (metric, mode) in loc_modes {
        rows.push(Row::count(
            metric,
            "model",
            loc(model, &LocScope::Model, mode).expect("model scope always exists"),
        ));
        for package in model.packages.keys() {
            let value = loc(model, &LocScope::Package(package.clone()), mode)
                .expect("package scope comes from the model");
            rows.push(Row::count(metric, package_scope(package), value));
        }
        for fq in &class_names {
            let value = loc(model, &LocScope::Class(fq.clone()), mode)
                .expect("class scope comes from the model");
            rows.push(Row::count(metric, class_scope(fq), value));
        }
    }

    for (metric, weighting) in [
        ("wmc_cyclomatic", WmcWeighting::Cyclomatic),
        ("wmc_unit", WmcWeighting::Unit),
    ] {
        for fq in &class_names {
            let outcome = wmc(model, fq, weighting).expect("class exists");
            Row::outcome(metric, &class_scope(fq), &outcome, &mut rows);
        }
    }
    for fq in &class_names {
        rows.push(Row::count("rfc", class_scope(fq), rfc(model, fq).expect("class exists")));
    }
    for fq in &class_names {
        rows.push(Row::count("noc", class_scope(fq), noc(model, fq).expect("class exists")));
    }
    for fq in &class_names {
        rows.push(Row::count("dit", class_scope(fq), dit(model, fq).expect("class exists")));
    }
    for fq in &class_names {
        let value = cbo(model, fq, options.cbo_fan_in).expect("class exists");
        rows.push(Row::count("cbo", class_scope(fq), value));
    }
    for fq in &class_names {
        rows.push(Row::count("lcom", class_scope(fq), lcom(model, fq).expect("class exists")));
    }

    let mut coupling: BTreeMap<&String, (u64, u64)> = BTreeMap::new();
    for package in model.packages.keys() {
        coupling.insert(
            package,
            package_coupling(model, package).expect("package exists"),
        );
    }
    for (package, (ce, _)) in &coupling {
        rows.push(Row::count("ce", package_scope(package), *ce));
    }
    for (package, (_, ca)) in &coupling {
        rows.push(Row::count("ca", package_scope(package), *ca));
    }
    for (package, (ce, ca)) in &coupling {
        Row::outcome("instability", &package_scope(package), &instability(*ce, *ca), &mut rows);
    }
    for package in model.packages.keys() {
        let outcome = abstractness(model, package).expect("package exists");
        Row::outcome("abstractness", &package_scope(package), &outcome, &mut rows);
    }
    for package in model.packages.keys() {
        let outcome = dip(model, package).expect("package exists");
        Row::outcome("dip", &package_scope(package), &outcome, &mut rows);
    }
    for package in model.packages.keys() {
        let value = ep(model, package).expect("package exists");
        rows.push(Row::number("ep_percent", package_scope(package), value));
    }

    let adp_result = adp(model);
    rows.push(Row::text(
        "adp_acyclic",
        "model",
        if adp_result.acyclic { "true" } else { "false" },
    ));
    if !adp_result.acyclic {
        let cycles: Vec<String> = adp_result.cycles.iter().map(|c| c.join("+")).collect();
        rows.push(Row::text("adp_cycles", "model", cycles.join(";")));
    }

    Section {
        title: "design",
        rows,
    }
}

/// Requirement-set ratios plus per-use-case counts, each half present
/// only when its model is supplied. Fails when a metric is undefined for
/// the input (an empty set, or no declared reviewers).
pub fn requirements_section(
    reqs: Option<&RequirementSet>,
    usecases: Option<&UseCaseModel>,
) -> Result<Section, MetricError> {
    let mut rows = Vec::new();
    if let Some(reqs) = reqs {
        rows.push(Row::number("qua", "set", qua(reqs)?));
        Row::outcome("qc", "set", &qc(reqs)?, &mut rows);
        for entity in reqs.entity_checklists.keys() {
            let value = completeness(reqs, entity).expect("entity comes from the set");
            rows.push(Row::number("completeness", format!("entity:{entity}"), value));
        }
        let (count, ratio_result) = volatility(reqs);
        rows.push(Row::count("volatility_count", "set", count));
        rows.push(Row::number("volatility_ratio", "set", ratio_result?));
    }

    if let Some(model) = usecases {
        for use_case in &model.use_cases {
            let scope = format!("usecase:{}", use_case.name);
            rows.push(Row::count("nau", &scope, nau(model, &use_case.name)?));
            rows.push(Row::count("nmu", &scope, nmu(model, &use_case.name)?));
            rows.push(Row::count("nscu", &scope, nscu(model, &use_case.name)?));
        }
    }

    Ok(Section {
        title: "requirements",
        rows,
    })
}

/// Coverage ratios at model, package, and class scope, with raw counts at
/// model scope. Fails when a trace event references an unknown id.
pub fn coverage_section(
    model: &DesignModel,
    traces: &[CoverageTrace],
) -> Result<Section, CoverageError> {
    let mut rows = Vec::new();
    let model_result = coverage(model, traces, &CoverageScope::Model)?;
    Row::outcome("symbol_coverage", "model", &model_result.symbol_coverage(), &mut rows);
    Row::outcome("method_coverage", "model", &model_result.method_coverage(), &mut rows);
    Row::outcome("branch_coverage", "model", &model_result.branch_coverage(), &mut rows);
    rows.push(Row::count("points_executed", "model", model_result.points_executed));
    rows.push(Row::count("points_total", "model", model_result.points_total));
    rows.push(Row::count("methods_executed", "model", model_result.methods_executed));
    rows.push(Row::count("methods_total", "model", model_result.methods_total));
    rows.push(Row::count("branch_arms_executed", "model", model_result.branch_arms_executed));
    rows.push(Row::count("branch_arms_total", "model", model_result.branch_arms_total));

    for package in model.packages.keys() {
        let result = coverage(model, traces, &CoverageScope::Package(package.clone()))?;
        let scope = package_scope(package);
        Row::outcome("symbol_coverage", &scope, &result.symbol_coverage(), &mut rows);
        Row::outcome("method_coverage", &scope, &result.method_coverage(), &mut rows);
        Row::outcome("branch_coverage", &scope, &result.branch_coverage(), &mut rows);
    }
    for (fq, _) in model.classes() {
        let result = coverage(model, traces, &CoverageScope::Class(fq.clone()))?;
        let scope = class_scope(&fq);
        Row::outcome("symbol_coverage", &scope, &result.symbol_coverage(), &mut rows);
        Row::outcome("method_coverage", &scope, &result.method_coverage(), &mut rows);
        Row::outcome("branch_coverage", &scope, &result.branch_coverage(), &mut rows);
    }

    Ok(Section {
        title: "coverage",
        rows,
    })
}

/// Category scores followed by per-check outcomes, in registry order.
pub fn checklist_section(
    model: &DesignModel,
    facts: &BTreeMap<String, bool>,
    params: &ChecklistParams,
) -> Result<Section, ChecklistError> {
    let result = checklist(model, facts, params)?;
    let mut rows = Vec::new();
    for (category, score) in &result.categories {
        rows.push(Row::number(
            "checklist_score",
            format!("category:{category}"),
            score.score(),
        ));
    }
    for check in &result.checks {
        rows.push(Row::text(
            "check",
            format!("check:{}", check.id),
            if check.value { "pass" } else { "fail" },
        ));
    }
    Ok(Section {
        title: "checklist",
        rows,
    })
}

// ---------------------------------------------------------------------------
// Threshold configuration
// ---------------------------------------------------------------------------

/// Optional bounds for the quality gates, read from a `.cfg` file. Unset
/// bounds gate nothing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ThresholdConfig {
    pub min_qua: Option<Rational>,
    pub min_qc: Option<Rational>,
    pub min_completeness: Option<Rational>,
    pub max_volatility_ratio: Option<Rational>,
    pub max_wmc: Option<Rational>,
    pub max_rfc: Option<Rational>,
    pub max_dit: Option<Rational>,
    pub max_cbo: Option<Rational>,
    pub max_lcom: Option<Rational>,
    pub max_instability: Option<Rational>,
    pub min_abstractness: Option<Rational>,
    pub min_dip: Option<Rational>,
    pub require_acyclic: bool,
    pub min_ep_percent: Option<Rational>,
    pub min_symbol_coverage: Option<Rational>,
    pub min_method_coverage: Option<Rational>,
    pub min_branch_coverage: Option<Rational>,
    pub min_checklist_score: Option<Rational>,
    /// Strict mode: a gated metric that is not applicable counts as a
    /// violation instead of being skipped.
    pub fail_on_not_applicable: bool,
    /// Tuning for the derived checklist checks.
    pub comment_density_min: Option<Rational>,
    pub modularity_max_fraction: Option<Rational>,
}

impl ThresholdConfig {
    pub fn checklist_params(&self) -> ChecklistParams {
        let mut params = ChecklistParams::default();
        if let Some(min) = self.comment_density_min {
            params.comment_density_min = min;
        }
        if let Some(max) = self.modularity_max_fraction {
            params.modularity_max_fraction = max;
        }
        params
    }
}

/// Read a threshold config file (`key = value` lines).
pub fn read_config(path: &std::path::Path) -> Result<ThresholdConfig, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|e| IngestError {
        path: path.display().to_string(),
        line: 1,
        message: format!("cannot read file: {e}"),
        kind: IngestErrorKind::Format,
    })?;
    parse_config(&text, &path.display().to_string())
}

/// Parse threshold config content; every bound is range-checked here so a
/// bad config fails before any evaluation. `path` only labels errors.
pub fn parse_config(text: &str, path: &str) -> Result<ThresholdConfig, IngestError> {
    enum Range {
        UnitInterval,
        Percent,
        NonNegative,
    }
    let error = |line: u32, kind: IngestErrorKind, message: String| IngestError {
        path: path.to_string(),
        line,
        message,
        kind,
    };

    let mut config = ThresholdConfig::default();
    let mut seen: BTreeMap<String, u32> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(error(
                line_no,
                IngestErrorKind::Format,
                format!("expected `key = value`, found `{line}`"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if seen.insert(key.to_string(), line_no).is_some() {
            return Err(error(
                line_no,
                IngestErrorKind::Duplicate,
                format!("duplicate key `{key}`"),
            ));
        }

        let flag_slot: Option<&mut bool> = match key {
            "require_acyclic" => Some(&mut config.require_acyclic),
            "fail_on_not_applicable" => Some(&mut config.fail_on_not_applicable),
            _ => None,
        };
        if let Some(slot) = flag_slot {
            *slot = match value {
                "true" => true,
                "false" => false,
                other => {
                    return Err(error(
                        line_no,
                        IngestErrorKind::Format,
                        format!("`{key}` must be `true` or `false`, found `{other}`"),
                    ))
                }
            };
            continue;
        }

        let (slot, range): (&mut Option<Rational>, Range) = match key {
            "min_qua" => (&mut config.min_qua, Range::UnitInterval),
            "min_qc" => (&mut config.min_qc, Range::UnitInterval),
            "min_completeness" => (&mut config.min_completeness, Range::UnitInterval),
            "max_volatility_ratio" => (&mut config.max_volatility_ratio, Range::NonNegative),
            "max_wmc" => (&mut config.max_wmc, Range::NonNegative),
            "max_rfc" => (&mut config.max_rfc, Range::NonNegative),
            "max_dit" => (&mut config.max_dit, Range::NonNegative),
            "max_cbo" => (&mut config.max_cbo, Range::NonNegative),
            "max_lcom" => (&mut config.max_lcom, Range::NonNegative),
            "max_instability" => (&mut config.max_instability, Range::UnitInterval),
            "min_abstractness" => (&mut config.min_abstractness, Range::UnitInterval),
            "min_dip" => (&mut config.min_dip, Range::UnitInterval),
            "min_ep_percent" => (&mut config.min_ep_percent, Range::Percent),
            "min_symbol_coverage" => (&mut config.min_symbol_coverage, Range::UnitInterval),
            "min_method_coverage" => (&mut config.min_method_coverage, Range::UnitInterval),
            "min_branch_coverage" => (&mut config.min_branch_coverage, Range::UnitInterval),
            "min_checklist_score" => (&mut config.min_checklist_score, Range::UnitInterval),
            "comment_density_min" => (&mut config.comment_density_min, Range::UnitInterval),
            "modularity_max_fraction" => (&mut config.modularity_max_fraction, Range::UnitInterval),
            other => {
                return Err(error(
                    line_no,
                    IngestErrorKind::Format,
                    format!("unknown config key `{other}`"),
                ))
            }
        };
        let bound = parse_decimal(value).ok_or_else(|| {
            error(
                line_no,
                IngestErrorKind::Format,
                format!("`{value}` is not a decimal number"),
            )
        })?;
        let ok = match range {
            Range::UnitInterval => bound >= ratio(0, 1) && bound <= ratio(1, 1),
            Range::Percent => bound >= ratio(0, 1) && bound <= ratio(100, 1),
            Range::NonNegative => bound >= ratio(0, 1),
        };
        if !ok {
            let expected = match range {
                Range::UnitInterval => "between 0 and 1",
                Range::Percent => "between 0 and 100",
                Range::NonNegative => "non-negative",
            };
            return Err(error(
                line_no,
                IngestErrorKind::Format,
                format!("`{key}` must be {expected}, found `{value}`"),
            ));
        }
        *slot = Some(bound);
    }
    Ok(config)
}

// ---------------------------------------------------------------------------
// Gate evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub metric: String,
    pub scope: String,
    pub observed: String,
    pub threshold: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub sections: Vec<Section>,
    pub violations: Vec<Violation>,
    pub verdict: Verdict,
}

enum Direction {
    Min,
    Max,
}

/// Check every configured bound against every row it applies to. Rows
/// that are not applicable never violate, unless strict mode is on and
/// the metric is gated. The verdict is pass exactly when no violation
/// was found.
pub fn evaluate(results: &AnalysisResults, config: &ThresholdConfig) -> MetricsReport {
    let gates: [(&str, Option<Rational>, Direction); 17] = [
        ("qua", config.min_qua, Direction::Min),
        ("qc", config.min_qc, Direction::Min),
        ("completeness", config.min_completeness, Direction::Min),
        ("volatility_ratio", config.max_volatility_ratio, Direction::Max),
        (results.gated_wmc, config.max_wmc, Direction::Max),
        ("rfc", config.max_rfc, Direction::Max),
        ("dit", config.max_dit, Direction::Max),
        ("cbo", config.max_cbo, Direction::Max),
        ("lcom", config.max_lcom, Direction::Max),
        ("instability", config.max_instability, Direction::Max),
        ("abstractness", config.min_abstractness, Direction::Min),
        ("dip", config.min_dip, Direction::Min),
        ("ep_percent", config.min_ep_percent, Direction::Min),
        ("symbol_coverage", config.min_symbol_coverage, Direction::Min),
        ("method_coverage", config.min_method_coverage, Direction::Min),
        ("branch_coverage", config.min_branch_coverage, Direction::Min),
        ("checklist_score", config.min_checklist_score, Direction::Min),
    ];

    let mut violations = Vec::new();
    for (metric, bound, direction) in &gates {
        let Some(bound) = bound else { continue };
        for row in results.rows().filter(|r| r.metric == *metric) {
            match &row.value {
                RowValue::Number(observed) => {
                    let broken = match direction {
                        Direction::Min => observed < bound,
                        Direction::Max => observed > bound,
                    };
                    if broken {
                        violations.push(Violation {
                            metric: row.metric.clone(),
                            scope: row.scope.clone(),
                            observed: format_rational(observed),
                            threshold: format_rational(bound),
                        });
                    }
                }
                RowValue::NotApplicable if config.fail_on_not_applicable => {
                    violations.push(Violation {
                        metric: row.metric.clone(),
                        scope: row.scope.clone(),
                        observed: "not_applicable".to_string(),
                        threshold: format_rational(bound),
                    });
                }
                _ => {}
            }
        }
    }

    if config.require_acyclic {
        let cyclic = results
            .rows()
            .any(|r| r.metric == "adp_acyclic" && r.value == RowValue::Text("false".to_string()));
        if cyclic {
            let cycles = results
                .rows()
                .find(|r| r.metric == "adp_cycles")
                .and_then(|r| match &r.value {
                    RowValue::Text(t) => Some(t.clone()),
                    _ => None,
                })
                .unwrap_or_default();
            violations.push(Violation {
                metric: "adp_acyclic".to_string(),
                scope: "model".to_string(),
                observed: cycles,
                threshold: "acyclic".to_string(),
            });
        }
    }

    MetricsReport {
        sections: results.sections.clone(),
        verdict: if violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        violations,
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

/// Serialize the report. The same report always renders to identical
/// bytes: keys are sorted, rows keep their assembly order, and rationals
/// are printed with six fractional digits (round half to even).
pub fn render(report: &MetricsReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => render_json(report),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Markdown => render_markdown(report),
    }
}

fn row_status(row: &Row) -> &'static str {
    match row.value {
        RowValue::NotApplicable => "not_applicable",
        _ => "ok",
    }
}

fn row_value_string(row: &Row) -> Option<String> {
    match &row.value {
        RowValue::Number(v) => Some(format_rational(v)),
        RowValue::Text(t) => Some(t.clone()),
        RowValue::NotApplicable => None,
    }
}

fn render_json(report: &MetricsReport) -> String {
    use serde_json::{json, Map, Value};
    let sections: Vec<Value> = report
        .sections
        .iter()
        .map(|section| {
            let rows: Vec<Value> = section
                .rows
                .iter()
                .map(|row| {
                    let mut object = Map::new();
                    object.insert("metric".to_string(), json!(row.metric));
                    object.insert("scope".to_string(), json!(row.scope));
                    object.insert("status".to_string(), json!(row_status(row)));
                    object.insert(
                        "value".to_string(),
                        match row_value_string(row) {
                            Some(v) => json!(v),
                            None => Value::Null,
                        },
                    );
                    Value::Object(object)
                })
                .collect();
            let mut object = Map::new();
            object.insert("rows".to_string(), Value::Array(rows));
            object.insert("title".to_string(), json!(section.title));
            Value::Object(object)
        })
        .collect();
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|violation| {
            let mut object = Map::new();
            object.insert("metric".to_string(), json!(violation.metric));
            object.insert("observed".to_string(), json!(violation.observed));
            object.insert("scope".to_string(), json!(violation.scope));
            object.insert("threshold".to_string(), json!(violation.threshold));
            Value::Object(object)
        })
        .collect();
    let mut root = Map::new();
    root.insert("sections".to_string(), Value::Array(sections));
    root.insert(
        "verdict".to_string(),
        json!(match report.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }),
    );
    root.insert("violations".to_string(), Value::Array(violations));
    let mut out = serde_json::to_string_pretty(&Value::Object(root)).expect("value serializes");
    out.push('\n');
    out
}

fn csv_field(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn render_csv(report: &MetricsReport) -> String {
    let mut out = String::from("metric,scope,value,status\n");
    for section in &report.sections {
        for row in &section.rows {
            let value = row_value_string(row).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&row.metric),
                csv_field(&row.scope),
                csv_field(&value),
                row_status(row)
            ));
        }
    }
    out
}

fn markdown_cell(text: &str) -> String {
    text.replace('|', "\\|")
}

fn render_markdown(report: &MetricsReport) -> String {
    let mut out = String::from("# Quality Report\n\n");
    out.push_str(&format!(
        "Verdict: **{}**\n",
        match report.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    ));
    for section in &report.sections {
        let mut title: Vec<char> = section.title.chars().collect();
        title[0] = title[0].to_ascii_uppercase();
        let title: String = title.into_iter().collect();
        out.push_str(&format!("\n## {title}\n\n"));
        out.push_str("| Metric | Scope | Value | Status |\n");
        out.push_str("|---|---|---|---|\n");
        for row in &section.rows {
            let value = row_value_string(row).unwrap_or_else(|| "—".to_string());
            out.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                markdown_cell(&row.metric),
                markdown_cell(&row.scope),
                markdown_cell(&value),
                row_status(row)
            ));
        }
    }
    if !report.violations.is_empty() {
        out.push_str("\n## Violations\n\n");
        out.push_str("| Metric | Scope | Observed | Threshold |\n");
        out.push_str("|---|---|---|---|\n");
        for violation in &report.violations {
            out.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                markdown_cell(&violation.metric),
                markdown_cell(&violation.scope),
                markdown_cell(&violation.observed),
                markdown_cell(&violation.threshold)
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{lower, parse_unit};
    use crate::ingest::parse_requirements;

    fn model_of(sources: &[&str]) -> DesignModel {
        let units: Vec<_> = sources
            .iter()
            .enumerate()
            .map(|(i, s)| parse_unit(s, &format!("test{i}.moo")).expect("test source parses"))
            .collect();
        lower(&units).expect("test source lowers")
    }

    fn design_results(sources: &[&str]) -> AnalysisResults {
        let model = model_of(sources);
        let options = DesignOptions::default();
        AnalysisResults {
            sections: vec![design_section(&model, &options)],
            gated_wmc: options.gated_wmc_metric(),
        }
    }

    fn row<'a>(results: &'a AnalysisResults, metric: &str, scope: &str) -> &'a Row {
        results
            .rows()
            .find(|r| r.metric == metric && r.scope == scope)
            .unwrap_or_else(|| panic!("row {metric}/{scope} missing"))
    }

    #[test]
    fn config_parses_all_keys_and_defaults_to_empty() {
        assert_eq!(parse_config("", "gates.cfg").unwrap(), ThresholdConfig::default());
        let config = parse_config(
            "\
# quality gates
min_qua = 0.75
max_lcom = 3
require_acyclic = true
min_ep_percent = 50
fail_on_not_applicable = true
comment_density_min = 0.2
",
            "gates.cfg",
        )
        .unwrap();
        assert_eq!(config.min_qua, Some(ratio(3, 4)));
        assert_eq!(config.max_lcom, Some(ratio(3, 1)));
        assert!(config.require_acyclic);
        assert_eq!(config.min_ep_percent, Some(ratio(50, 1)));
        assert!(config.fail_on_not_applicable);
        assert_eq!(config.comment_density_min, Some(ratio(1, 5)));
    }

    #[test]
    fn config_rejects_unknown_keys_bad_values_and_out_of_range_bounds() {
        let err = parse_config("max_loc = 100\n", "gates.cfg").unwrap_err();
        assert!(err.message.contains("unknown config key"));
        assert_eq!(err.line, 1);

        let err = parse_config("min_qua = high\n", "gates.cfg").unwrap_err();
        assert!(err.message.contains("not a decimal"));

        let err = parse_config("min_qua = 1.5\n", "gates.cfg").unwrap_err();
        assert!(err.message.contains("between 0 and 1"));

        let err = parse_config("max_wmc = -1\n", "gates.cfg").unwrap_err();
        assert!(err.message.contains("non-negative"));

        let err = parse_config("min_qua = 0.5\nmin_qua = 0.6\n", "gates.cfg").unwrap_err();
        assert!(err.message.contains("duplicate"));
        assert_eq!(err.line, 2);
    }

    #[test]
    fn empty_config_passes_everything() {
        let results = design_results(&[
            "package p; class A { field x; field y; m() { assign x; } n() { assign y; } }",
        ]);
        let report = evaluate(&results, &ThresholdConfig::default());
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn a_broken_bound_lists_the_offending_scope() {
        // LCOM of p.A is 1 ({x} and {y} are disjoint).
        let results = design_results(&[
            "package p; class A { field x; field y; m() { assign x; } n() { assign y; } }",
        ]);
        let config = ThresholdConfig {
            max_lcom: Some(ratio(0, 1)),
            ..ThresholdConfig::default()
        };
        let report = evaluate(&results, &config);
        assert_eq!(report.verdict, Verdict::Fail);
        assert_eq!(report.violations.len(), 1);
        let violation = &report.violations[0];
        assert_eq!(violation.metric, "lcom");
        assert_eq!(violation.scope, "class:p.A");
        assert_eq!(violation.observed, "1.000000");
        assert_eq!(violation.threshold, "0.000000");
    }

    #[test]
    fn max_wmc_gates_only_the_selected_weighting() {
        // One method with two decision points: cyclomatic 3, unit 1.
        let source =
            "package p; class A { field a; field b; m() { if (a) { return; } if (b) { return; } } }";
        let config = ThresholdConfig {
            max_wmc: Some(ratio(2, 1)),
            ..ThresholdConfig::default()
        };

        let cyclomatic = design_results(&[source]);
        assert_eq!(evaluate(&cyclomatic, &config).verdict, Verdict::Fail);

        let model = model_of(&[source]);
        let options = DesignOptions {
            wmc_weighting: WmcWeighting::Unit,
            cbo_fan_in: false,
        };
        let unit = AnalysisResults {
            sections: vec![design_section(&model, &options)],
            gated_wmc: options.gated_wmc_metric(),
        };
        assert_eq!(evaluate(&unit, &config).verdict, Verdict::Pass);
    }

    #[test]
    fn acyclic_requirement_names_the_cycle_members() {
        let results = design_results(&[
            "package p1; import p2.B; class A { m() { call B.m(); } }",
            "package p2; import p1.A; class B { m() { call A.m(); } }",
        ]);
        let config = ThresholdConfig {
            require_acyclic: true,
            ..ThresholdConfig::default()
        };
        let report = evaluate(&results, &config);
        assert_eq!(report.verdict, Verdict::Fail);
        assert_eq!(report.violations[0].metric, "adp_acyclic");
        assert_eq!(report.violations[0].observed, "p1+p2");
        assert_eq!(report.violations[0].threshold, "acyclic");
    }

    #[test]
    fn not_applicable_rows_never_violate_unless_strict() {
        // An interface's WMC is not applicable.
        let source = "package p; interface I { sig(); }";
        let config = ThresholdConfig {
            max_wmc: Some(ratio(1, 1)),
            ..ThresholdConfig::default()
        };
        let results = design_results(&[source]);
        assert_eq!(evaluate(&results, &config).verdict, Verdict::Pass);

        let strict = ThresholdConfig {
            fail_on_not_applicable: true,
            ..config
        };
        let report = evaluate(&results, &strict);
        assert_eq!(report.verdict, Verdict::Fail);
        assert_eq!(report.violations[0].observed, "not_applicable");
    }

    #[test]
    fn removing_a_bound_never_turns_pass_into_fail() {
        let results = design_results(&[
            "package p; class A { field x; field y; m() { assign x; } n() { assign y; } }",
        ]);
        let tight = ThresholdConfig {
            max_lcom: Some(ratio(0, 1)),
            max_rfc: Some(ratio(1, 1)),
            ..ThresholdConfig::default()
        };
        let looser = ThresholdConfig {
            max_lcom: None,
            ..tight.clone()
        };
        let tight_violations = evaluate(&results, &tight).violations.len();
        let looser_violations = evaluate(&results, &looser).violations.len();
        assert!(looser_violations <= tight_violations);
    }

    #[test]
    fn design_section_reports_both_wmc_variants_and_fallbacks() {
        let results = design_results(&[
            "package p; class A { field a; m() { if (a) { return; } } }",
        ]);
        assert_eq!(
            row(&results, "wmc_cyclomatic", "class:p.A").value,
            RowValue::Number(ratio(2, 1))
        );
        assert_eq!(
            row(&results, "wmc_unit", "class:p.A").value,
            RowValue::Number(ratio(1, 1))
        );
        // An isolated package: instability not applicable, fallback 0.
        assert_eq!(
            row(&results, "instability", "package:p").value,
            RowValue::NotApplicable
        );
        assert_eq!(
            row(&results, "instability_fallback", "package:p").value,
            RowValue::Number(ratio(0, 1))
        );
        assert_eq!(
            row(&results, "adp_acyclic", "model").value,
            RowValue::Text("true".to_string())
        );
    }

    #[test]
    fn requirements_section_rows_cover_set_entities_and_usecases() {
        let reqs = parse_requirements(
            "\
reviewer alice
req R1 \"a\" valid
req R2 \"b\" notyetvalid
verdict R1 alice \"ok\"
change R2 1 error
entity List requires add,delete
entity List provides add
",
            "sample.req",
        )
        .unwrap();
        let usecases = crate::ingest::parse_usecases(
            "actor customer\nusecase Checkout\nuses Checkout customer\nmessage Checkout scan\nclass Checkout Order\n",
            "sample.ucm",
        )
        .unwrap();
        let section = requirements_section(Some(&reqs), Some(&usecases)).unwrap();
        let results = AnalysisResults {
            sections: vec![section],
            ..AnalysisResults::default()
        };
        assert_eq!(row(&results, "qua", "set").value, RowValue::Number(ratio(1, 2)));
        assert_eq!(row(&results, "qc", "set").value, RowValue::Number(ratio(1, 2)));
        assert_eq!(
            row(&results, "completeness", "entity:List").value,
            RowValue::Number(ratio(1, 2))
        );
        assert_eq!(
            row(&results, "volatility_count", "set").value,
            RowValue::Number(ratio(1, 1))
        );
        assert_eq!(row(&results, "nau", "usecase:Checkout").value, RowValue::Number(ratio(1, 1)));
        assert_eq!(row(&results, "nmu", "usecase:Checkout").value, RowValue::Number(ratio(1, 1)));
        assert_eq!(row(&results, "nscu", "usecase:Checkout").value, RowValue::Number(ratio(1, 1)));
    }

    #[test]
    fn requirements_section_propagates_undefined_metrics() {
        let empty = RequirementSet::default();
        assert!(requirements_section(Some(&empty), None).is_err());
    }

    #[test]
    fn rendering_is_deterministic_across_calls() {
        let results = design_results(&[
            "package p; class A { field x; m() { if (x) { assign x; } return; } }",
        ]);
        let report = evaluate(&results, &ThresholdConfig::default());
        for format in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown] {
            assert_eq!(render(&report, format), render(&report, format));
        }
    }

    #[test]
    fn csv_has_header_plus_one_line_per_row() {
        let results = design_results(&["package p; class A { }"]);
        let report = evaluate(&results, &ThresholdConfig::default());
        let row_count: usize = report.sections.iter().map(|s| s.rows.len()).sum();
        let csv = render(&report, ReportFormat::Csv);
        assert_eq!(csv.lines().count(), row_count + 1);
        assert!(csv.starts_with("metric,scope,value,status\n"));
    }

    #[test]
    fn json_renders_two_thirds_to_six_digits() {
        let report = MetricsReport {
            sections: vec![Section {
                title: "design",
                rows: vec![Row::number("dip", "package:p", ratio(2, 3))],
            }],
            violations: vec![],
            verdict: Verdict::Pass,
        };
        let json = render(&report, ReportFormat::Json);
        assert!(json.contains("\"0.666667\""), "got: {json}");
        assert!(json.ends_with('\n'));
    }

    #[test]
    fn markdown_shows_sections_and_a_dash_for_not_applicable() {
        let report = MetricsReport {
            sections: vec![Section {
                title: "design",
                rows: vec![Row::not_applicable("qc", "set")],
            }],
            violations: vec![Violation {
                metric: "lcom".to_string(),
                scope: "class:p.A".to_string(),
                observed: "3.000000".to_string(),
                threshold: "2.000000".to_string(),
            }],
            verdict: Verdict::Fail,
        };
        let markdown = render(&report, ReportFormat::Markdown);
        assert!(markdown.contains("## Design"));
        assert!(markdown.contains("| qc | set | — | not_applicable |"));
        assert!(markdown.contains("## Violations"));
        assert!(markdown.contains("Verdict: **fail**"));
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
