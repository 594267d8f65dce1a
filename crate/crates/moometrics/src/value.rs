//! Exact rational values shared by every metric engine.
//!
//! Metric values are kept as rationals end to end so threshold comparisons
//! are exact; decimal rounding happens only when a report is rendered.

use num::rational::Ratio;

/// Exact rational metric value.
pub type Rational = Ratio<i64>;

/// Build a rational from numerator and denominator.
///
/// Panics if `denom` is zero; callers guard undefined denominators and
/// report [`MetricOutcome::NotApplicable`] instead.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Ratio::new(numer, denom)
}

/// A metric value that may be undefined for the given inputs.
///
/// Some denominators can legitimately be zero (no invalid requirements, an
/// isolated package, an empty scope). Those cases carry no numeric value but
/// may record a fallback that gates can surface separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricOutcome {
    Defined(Rational),
    NotApplicable { fallback: Option<Rational> },
}

impl MetricOutcome {
    pub fn defined(value: Rational) -> Self {
        MetricOutcome::Defined(value)
    }

    pub fn not_applicable() -> Self {
        MetricOutcome::NotApplicable { fallback: None }
    }

    pub fn not_applicable_with(fallback: Rational) -> Self {
        MetricOutcome::NotApplicable {
            fallback: Some(fallback),
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, MetricOutcome::Defined(_))
    }

    /// The defined value, if any.
    pub fn value(&self) -> Option<Rational> {
        match self {
            MetricOutcome::Defined(v) => Some(*v),
            MetricOutcome::NotApplicable { .. } => None,
        }
    }

    /// The fallback recorded for a not-applicable outcome.
    pub fn fallback(&self) -> Option<Rational> {
        match self {
            MetricOutcome::Defined(_) => None,
            MetricOutcome::NotApplicable { fallback } => *fallback,
        }
    }
}

/// Why a metric could not be computed for the requested input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("unknown {kind} `{name}`")]
    UnknownScope { kind: &'static str, name: String },
    #[error("{metric} is undefined: {reason}")]
    Undefined {
        metric: &'static str,
        reason: &'static str,
    },
}

/// Render a rational as a decimal with exactly six fractional digits,
/// rounding half to even.
pub fn format_rational(value: &Rational) -> String {
    const SCALE: i128 = 1_000_000;
    let numer = *value.numer() as i128;
    let denom = *value.denom() as i128; // Ratio keeps denom > 0
    let scaled = numer * SCALE;
    let mut q = scaled.div_euclid(denom);
    let rem = scaled.rem_euclid(denom);
    // round half to even on the remainder fraction rem/denom
    let twice = 2 * rem;
    if twice > denom || (twice == denom && q % 2 != 0) {
        q += 1;
    }
    let (sign, magnitude) = if q < 0 { ("-", -q) } else { ("", q) };
    format!("{}{}.{:06}", sign, magnitude / SCALE, magnitude % SCALE)
}

/// Parse a decimal literal (`"3"`, `"0.5"`, `"-1.25"`) into an exact rational.
///
/// At most nine fractional digits are accepted.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (sign, rest) = match text.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, text),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if frac_part.len() > 9 {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let int_value: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().ok()?
    };
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let frac_value: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().ok()?
    };
    let numer = int_value.checked_mul(denom)?.checked_add(frac_value)?;
    Some(Ratio::new(sign * numer, denom))
}
