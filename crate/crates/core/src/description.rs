//! Conjunctive descriptions over descriptor columns.
//!
//! A [`Description`] is a conjunction of single-column [`Condition`]s kept in
//! canonical order, so two descriptions with the same conditions compare and
//! render identically. The [`Refiner`] holds the pool of admissible
//! conditions and produces one-condition specializations for the search.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::{ColumnKind, ColumnValues, Dataset};
use crate::error::{Error, Result};
use crate::rowset::RowSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operator {
    /// Nominal equality.
    Eq,
    /// Nominal inequality.
    Ne,
    /// Numeric `<=`.
    Leq,
    /// Numeric `>`.
    Gt,
}

impl Operator {
    pub fn kind(self) -> ColumnKind {
        match self {
            Operator::Eq | Operator::Ne => ColumnKind::Nominal,
            Operator::Leq | Operator::Gt => ColumnKind::Numeric,
        }
    }

    pub fn symbol(self, notation: Notation) -> &'static str {
        match (self, notation) {
            (Operator::Eq, _) => "=",
            (Operator::Ne, Notation::Unicode) => "≠",
            (Operator::Ne, Notation::Ascii) => "!=",
            (Operator::Leq, Notation::Unicode) => "≤",
            (Operator::Leq, Notation::Ascii) => "<=",
            (Operator::Gt, _) => ">",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Threshold {
    /// Dictionary code of a nominal value.
    Code(u32),
    Value(f64),
}

impl Threshold {
    fn cmp_total(&self, other: &Threshold) -> Ordering {
        match (self, other) {
            (Threshold::Code(a), Threshold::Code(b)) => a.cmp(b),
            (Threshold::Value(a), Threshold::Value(b)) => a.total_cmp(b),
            (Threshold::Code(_), Threshold::Value(_)) => Ordering::Less,
            (Threshold::Value(_), Threshold::Code(_)) => Ordering::Greater,
        }
    }
}

/// Rendering style for descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Notation {
    /// `a ≤ 2 ∧ b ≠ x`
    #[default]
    Unicode,
    /// `a <= 2 AND b != x`
    Ascii,
}

impl Notation {
    fn conjunction(self) -> &'static str {
        match self {
            Notation::Unicode => " ∧ ",
            Notation::Ascii => " AND ",
        }
    }
}

/// One atomic predicate `column OP threshold`.
#[derive(Debug, Clone, Copy)]
pub struct Condition {
    column: usize,
    op: Operator,
    threshold: Threshold,
}

impl Condition {
    pub fn nominal(column: usize, op: Operator, code: u32) -> Self {
        assert_eq!(op.kind(), ColumnKind::Nominal, "{op:?} is not a nominal operator");
        Condition {
            column,
            op,
            threshold: Threshold::Code(code),
        }
    }

    /// Panics on a non-finite threshold.
    pub fn numeric(column: usize, op: Operator, value: f64) -> Self {
        assert_eq!(op.kind(), ColumnKind::Numeric, "{op:?} is not a numeric operator");
        assert!(value.is_finite(), "numeric thresholds are finite");
        Condition {
            column,
            op,
            threshold: Threshold::Value(value),
        }
    }

    pub fn column(&self) -> usize {
        self.column
    }

    pub fn op(&self) -> Operator {
        self.op
    }

    pub fn threshold(&self) -> Threshold {
        self.threshold
    }

    /// Checks that the column exists, its kind matches the operator and a
    /// nominal code is in range.
    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        let Some(col) = ds.columns().get(self.column) else {
            return Err(Error::Description(format!("unknown column index {}", self.column)));
        };
        if col.kind() != self.op.kind() {
            return Err(Error::Description(format!(
                "operator {:?} does not apply to {:?} column {:?}",
                self.op,
                col.kind(),
                col.name()
            )));
        }
        if let (Threshold::Code(code), Some(dict)) = (self.threshold, col.dictionary()) {
            if code as usize >= dict.len() {
                return Err(Error::Description(format!(
                    "code {code} is not a value of column {:?}",
                    col.name()
                )));
            }
        }
        Ok(())
    }

    /// Rows of `ds` satisfying this condition.
    pub fn evaluate(&self, ds: &Dataset) -> RowSet {
        let m = ds.m();
        match (ds.column(self.column).values(), self.op, self.threshold) {
            (ColumnValues::Nominal { codes, .. }, Operator::Eq, Threshold::Code(c)) => {
                RowSet::from_predicate(m, |i| codes[i] == c)
            }
            (ColumnValues::Nominal { codes, .. }, Operator::Ne, Threshold::Code(c)) => {
                RowSet::from_predicate(m, |i| codes[i] != c)
            }
            (ColumnValues::Numeric(v), Operator::Leq, Threshold::Value(t)) => {
                RowSet::from_predicate(m, |i| v[i] <= t)
            }
            (ColumnValues::Numeric(v), Operator::Gt, Threshold::Value(t)) => {
                RowSet::from_predicate(m, |i| v[i] > t)
            }
            _ => panic!("condition {self:?} does not match its column"),
        }
    }

    pub fn render(&self, ds: &Dataset, notation: Notation) -> String {
        let col = ds.column(self.column);
        let value = match self.threshold {
            Threshold::Code(c) => col
                .dictionary()
                .map(|d| d.label(c).to_owned())
                .unwrap_or_else(|| c.to_string()),
            Threshold::Value(v) => format!("{v}"),
        };
        format!("{} {} {}", col.name(), self.op.symbol(notation), value)
    }
}

impl PartialEq for Condition {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Condition {}

impl PartialOrd for Condition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Condition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.column
            .cmp(&other.column)
            .then(self.op.cmp(&other.op))
            .then_with(|| self.threshold.cmp_total(&other.threshold))
    }
}

impl std::hash::Hash for Condition {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.column.hash(state);
        self.op.hash(state);
        match self.threshold {
            Threshold::Code(c) => c.hash(state),
            Threshold::Value(v) => v.to_bits().hash(state),
        }
    }
}

/// A conjunction of conditions in canonical (sorted, duplicate-free) order.
/// The empty description selects the whole dataset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Description {
    conditions: Vec<Condition>,
}

impl Description {
    pub fn new(conditions: Vec<Condition>) -> Self {
        let mut conditions = conditions;
        conditions.sort();
        conditions.dedup();
        Description { conditions }
    }

    pub fn empty() -> Self {
        Description::default()
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn contains(&self, condition: &Condition) -> bool {
        self.conditions.binary_search(condition).is_ok()
    }

    /// `self ∧ condition`, or `None` when the condition is already present.
    pub fn refined_with(&self, condition: Condition) -> Option<Description> {
        match self.conditions.binary_search(&condition) {
            Ok(_) => None,
            Err(pos) => {
                let mut conditions = Vec::with_capacity(self.conditions.len() + 1);
                conditions.extend_from_slice(&self.conditions[..pos]);
                conditions.push(condition);
                conditions.extend_from_slice(&self.conditions[pos..]);
                Some(Description { conditions })
            }
        }
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        self.conditions.iter().try_for_each(|c| c.validate(ds))
    }

    pub fn evaluate(&self, ds: &Dataset) -> RowSet {
        evaluate(self, ds)
    }

    /// `name op value` terms joined by the notation's conjunction. Numeric
    /// thresholds print with round-trip precision.
    pub fn render(&self, ds: &Dataset, notation: Notation) -> String {
        if self.conditions.is_empty() {
            return String::new();
        }
        let mut out = String::new();
        for (i, c) in self.conditions.iter().enumerate() {
            if i > 0 {
                out.push_str(notation.conjunction());
            }
            let _ = write!(out, "{}", c.render(ds, notation));
        }
        out
    }

    /// Parses a rendering in either notation. Column names and nominal
    /// values are resolved against `ds`; an empty string is the empty
    /// description.
    pub fn parse(text: &str, ds: &Dataset) -> Result<Description> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Description::empty());
        }
        let mut conditions = Vec::new();
        for term in text.split('∧').flat_map(|t| t.split(" AND ")) {
            conditions.push(parse_condition(term.trim(), ds)?);
        }
        Ok(Description::new(conditions))
    }
}

const OPERATOR_TOKENS: [(&str, Operator); 7] = [
    ("!=", Operator::Ne),
    ("≠", Operator::Ne),
    ("<=", Operator::Leq),
    ("≤", Operator::Leq),
    ("=", Operator::Eq),
    (">", Operator::Gt),
    ("==", Operator::Eq),
];

fn parse_condition(term: &str, ds: &Dataset) -> Result<Condition> {
    let mut found = None;
    for (pos, _) in term.char_indices() {
        let rest = &term[pos..];
        if let Some((tok, op)) = OPERATOR_TOKENS
            .iter()
            .filter(|(tok, _)| rest.starts_with(tok))
            .max_by_key(|(tok, _)| tok.len())
        {
            found = Some((pos, tok.len(), *op));
            break;
        }
    }
    let (pos, len, op) =
        found.ok_or_else(|| Error::Description(format!("no operator in {term:?}")))?;
    let name = term[..pos].trim();
    let value = term[pos + len..].trim();
    let column = ds
        .column_index(name)
        .ok_or_else(|| Error::Description(format!("unknown column {name:?}")))?;
    let col = ds.column(column);
    match col.kind() {
        ColumnKind::Nominal => {
            if op.kind() != ColumnKind::Nominal {
                return Err(Error::Description(format!(
                    "column {name:?} is nominal; use = or !="
                )));
            }
            let code = col
                .dictionary()
                .and_then(|d| d.code(value))
                .ok_or_else(|| Error::Description(format!("{value:?} is not a value of {name:?}")))?;
            Ok(Condition::nominal(column, op, code))
        }
        ColumnKind::Numeric => {
            if op.kind() != ColumnKind::Numeric {
                return Err(Error::Description(format!(
                    "column {name:?} is numeric; use <= or >"
                )));
            }
            let v: f64 = value
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Description(format!("bad threshold {value:?}")))?;
            Ok(Condition::numeric(column, op, v))
        }
    }
}

/// Sorts and deduplicates the conditions of `desc`.
pub fn canonicalize(desc: &Description) -> Description {
    Description::new(desc.conditions.clone())
}

/// The subgroup of `ds` selected by `desc`.
pub fn evaluate(desc: &Description, ds: &Dataset) -> RowSet {
    let mut rows = RowSet::full(ds.m());
    for c in &desc.conditions {
        rows = rows.intersection(&c.evaluate(ds));
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    #[default]
    EqualWidth,
    EqualFrequency,
}

/// Split points for a numeric column. Only points strictly below the column
/// maximum are kept, so every `<=`/`>` pair partitions the column
/// non-trivially.
pub fn split_points(values: &[f64], bins: usize, strategy: Binning) -> Vec<f64> {
    if values.is_empty() || bins < 2 {
        return Vec::new();
    }
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let mut points: Vec<f64> = match strategy {
        Binning::EqualWidth => (1..bins)
            .map(|i| min + i as f64 * (max - min) / bins as f64)
            .collect(),
        Binning::EqualFrequency => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let m = sorted.len();
            (1..bins)
                .map(|i| sorted[(i * m / bins).saturating_sub(1)])
                .collect()
        }
    };
    points.retain(|&p| p < max);
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// Pool of all admissible conditions for a dataset, computed once.
#[derive(Debug, Clone)]
pub struct Refiner {
    pool: Vec<Condition>,
}

impl Refiner {
    /// Nominal columns contribute `=` and `!=` per observed value; numeric
    /// columns contribute `<=` and `>` per split point over the full column.
    pub fn new(ds: &Dataset, bins: usize, strategy: Binning) -> Result<Self> {
        if bins < 2 {
            return Err(Error::Config(format!("bins must be at least 2, got {bins}")));
        }
        let mut pool = Vec::new();
        for (j, col) in ds.columns().iter().enumerate() {
            match col.values() {
                ColumnValues::Nominal { dictionary, .. } => {
                    for code in 0..dictionary.len() as u32 {
                        pool.push(Condition::nominal(j, Operator::Eq, code));
                        pool.push(Condition::nominal(j, Operator::Ne, code));
                    }
                }
                ColumnValues::Numeric(values) => {
                    for t in split_points(values, bins, strategy) {
                        pool.push(Condition::numeric(j, Operator::Leq, t));
                        pool.push(Condition::numeric(j, Operator::Gt, t));
                    }
                }
            }
        }
        pool.sort();
        pool.dedup();
        Ok(Refiner { pool })
    }

    /// Every condition, in canonical order.
    pub fn conditions(&self) -> &[Condition] {
        &self.pool
    }

    /// All one-condition specializations of `desc`, skipping conditions it
    /// already contains.
    pub fn refine(&self, desc: &Description) -> Vec<Description> {
        self.pool
            .iter()
            .filter_map(|&c| desc.refined_with(c))
            .collect()
    }
}

/// One-shot form of [`Refiner::refine`].
pub fn refine(desc: &Description, ds: &Dataset, bins: usize, strategy: Binning) -> Result<Vec<Description>> {
    Ok(Refiner::new(ds, bins, strategy)?.refine(desc))
}
