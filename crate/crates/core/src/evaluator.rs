//! Fast subgroup scoring for search.
//!
//! Every measure reduces to counting members of a subgroup inside a handful
//! of precomputed row sets:
//!
//! * row-entropy measures group rows by their entropy value (there are only
//!   as many distinct values as distinct vote tallies) and sum
//!   `value * |sg ∩ level|`;
//! * the consistency measures additionally count `|sg ∩ {M_ij = c}|` for each
//!   classifier `j` and class `c`;
//! * `rasl` counts positives and negatives per vote level.
//!
//! The score is a deterministic function of the subgroup's membership, so
//! search output does not depend on the path that produced a row set.

use std::collections::BTreeMap;

use crate::data::{Dataset, PredictionMatrix};
use crate::error::{Error, Result};
use crate::measures::{
    accordance_matrix, correctness_matrix, entropy_of_counts, resolve_positive, stable_sum, CodeMatrix,
    Measure, QualityValue,
};
use crate::rowset::RowSet;

/// Above this many distinct row values, sums iterate members instead.
const MAX_LEVELS: usize = 64;

/// Scores a subgroup; `None` when the measure is undefined on it.
pub trait Scorer: Sync {
    fn score(&self, sg: &RowSet) -> Option<f64>;
}

#[derive(Debug)]
struct RowValues {
    values: Vec<f64>,
    /// Nonzero distinct values with their rows, when few enough.
    levels: Option<Vec<(f64, RowSet)>>,
}

impl RowValues {
    fn new(values: Vec<f64>) -> Self {
        let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, v) in values.iter().enumerate() {
            if *v != 0.0 {
                groups.entry(v.to_bits()).or_default().push(i);
            }
        }
        let levels = (groups.len() <= MAX_LEVELS).then(|| {
            groups
                .into_iter()
                .map(|(bits, rows)| (f64::from_bits(bits), RowSet::from_indices(values.len(), rows)))
                .collect()
        });
        RowValues { values, levels }
    }

    fn mean(&self, sg: &RowSet) -> f64 {
        let sum: f64 = match &self.levels {
            Some(levels) => levels
                .iter()
                .map(|(v, rows)| v * sg.intersection_count(rows) as f64)
                .sum(),
            None => sg.iter().map(|i| self.values[i]).sum(),
        };
        sum / sg.count() as f64
    }
}

#[derive(Debug)]
struct ColumnIndex {
    classes: usize,
    /// `by_class[j][c]` = rows where classifier `j` outputs `c`, for all
    /// classes but the last (its count is the remainder).
    by_class: Vec<Vec<RowSet>>,
}

impl ColumnIndex {
    fn new<M: CodeMatrix>(matrix: &M) -> Self {
        let classes = matrix.classes();
        let by_class = (0..matrix.cols())
            .map(|j| {
                (0..classes.saturating_sub(1) as u32)
                    .map(|c| RowSet::from_predicate(matrix.rows(), |i| matrix.code(i, j) == c))
                    .collect()
            })
            .collect();
        ColumnIndex { classes, by_class }
    }

    fn mean_entropy(&self, sg: &RowSet) -> f64 {
        let total = sg.count() as u64;
        let mut counts = vec![0u64; self.classes];
        let mut per_column: Vec<f64> = self
            .by_class
            .iter()
            .map(|classes| {
                let mut seen = 0;
                for (c, rows) in classes.iter().enumerate() {
                    counts[c] = sg.intersection_count(rows) as u64;
                    seen += counts[c];
                }
                counts[self.classes - 1] = total - seen;
                entropy_of_counts(&counts)
            })
            .collect();
        stable_sum(&mut per_column) / self.by_class.len() as f64
    }
}

#[derive(Debug)]
struct RankIndex {
    /// Rows per positive-vote count `0..=n`.
    level: Vec<RowSet>,
    /// Positive cases per positive-vote count.
    positive_level: Vec<RowSet>,
}

impl RankIndex {
    fn new(matrix: &PredictionMatrix, truth: &[u32], positive: u32) -> Self {
        let votes: Vec<usize> = matrix
            .rows()
            .map(|r| r.iter().filter(|&&c| c == positive).count())
            .collect();
        let m = matrix.m();
        let level = (0..=matrix.n())
            .map(|l| RowSet::from_predicate(m, |i| votes[i] == l))
            .collect();
        let positive_level = (0..=matrix.n())
            .map(|l| RowSet::from_predicate(m, |i| votes[i] == l && truth[i] == positive))
            .collect();
        RankIndex { level, positive_level }
    }

    fn loss(&self, sg: &RowSet) -> Option<f64> {
        let pos: Vec<u64> = self
            .positive_level
            .iter()
            .map(|rows| sg.intersection_count(rows) as u64)
            .collect();
        let neg: Vec<u64> = self
            .level
            .iter()
            .zip(&pos)
            .map(|(rows, p)| sg.intersection_count(rows) as u64 - p)
            .collect();
        let positives: u64 = pos.iter().sum();
        let negatives: u64 = neg.iter().sum();
        if positives == 0 || negatives == 0 {
            return None;
        }
        // walk from the highest score down, tracking negatives ranked above
        let mut above = 0u64;
        let mut loss = 0.0;
        for l in (0..pos.len()).rev() {
            loss += pos[l] as f64 * (above as f64 + 0.5 * neg[l] as f64);
            above += neg[l];
        }
        Some(loss / positives as f64)
    }
}

#[derive(Debug)]
enum Kernel {
    RowMean(RowValues),
    Consistency(RowValues, ColumnIndex),
    Rank(RankIndex),
}

/// Precomputed scoring state for one measure on one (dataset, matrix) pair.
#[derive(Debug)]
pub struct Evaluator {
    measure: Measure,
    kernel: Kernel,
    baseline: f64,
}

fn row_entropies<M: CodeMatrix>(matrix: &M, truth: Option<(&[u32], usize)>) -> Vec<f64> {
    let classes = matrix.classes();
    let mut counts = vec![0u64; classes];
    (0..matrix.rows())
        .map(|i| {
            counts.iter_mut().for_each(|c| *c = 0);
            for j in 0..matrix.cols() {
                counts[matrix.code(i, j) as usize] += 1;
            }
            if let Some((truth, copies)) = truth {
                counts[truth[i] as usize] += copies as u64;
            }
            entropy_of_counts(&counts)
        })
        .collect()
}

fn consistency_kernel<M: CodeMatrix>(matrix: &M) -> Kernel {
    Kernel::Consistency(RowValues::new(row_entropies(matrix, None)), ColumnIndex::new(matrix))
}

impl Evaluator {
    /// Checks the measure's preconditions and builds its indexes.
    /// `positive` names the positive class for `rasl`.
    pub fn new(measure: Measure, ds: &Dataset, matrix: &PredictionMatrix, positive: Option<&str>) -> Result<Self> {
        if matrix.m() != ds.m() {
            return Err(Error::Dimension {
                expected: ds.m(),
                found: matrix.m(),
            });
        }
        if measure.requires_truth() && ds.truth().is_none() {
            return Err(Error::MissingGroundTruth);
        }
        let truth = ds.truth();
        let kernel = match measure {
            Measure::Row => Kernel::RowMean(RowValues::new(row_entropies(matrix, None))),
            Measure::GtYac => Kernel::RowMean(RowValues::new(row_entropies(matrix, truth.map(|t| (t, 1))))),
            Measure::GtYac2 => Kernel::RowMean(RowValues::new(row_entropies(
                matrix,
                truth.map(|t| (t, matrix.n())),
            ))),
            Measure::Ccl => consistency_kernel(matrix),
            Measure::Cac => consistency_kernel(&accordance_matrix(matrix)),
            Measure::Cco => consistency_kernel(&correctness_matrix(matrix, truth)?),
            Measure::Rasl => {
                if matrix.classes() != 2 {
                    return Err(Error::BinaryOnly {
                        classes: matrix.classes(),
                    });
                }
                let positive = resolve_positive(ds, positive)?;
                Kernel::Rank(RankIndex::new(matrix, truth.expect("checked"), positive))
            }
        };
        let mut evaluator = Evaluator {
            measure,
            kernel,
            baseline: f64::NAN,
        };
        evaluator.baseline = evaluator
            .score(&RowSet::full(ds.m()))
            .ok_or(Error::UndefinedSubgroup("measure is undefined on the whole dataset"))?;
        Ok(evaluator)
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    /// The measure on the whole dataset.
    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn quality(&self, sg: &RowSet) -> Result<QualityValue> {
        let value = self
            .score(sg)
            .ok_or(Error::UndefinedSubgroup("measure preconditions fail on this subgroup"))?;
        Ok(QualityValue {
            value,
            measure: self.measure,
            baseline: self.baseline,
        })
    }
}

impl Scorer for Evaluator {
    fn score(&self, sg: &RowSet) -> Option<f64> {
        if sg.is_empty() {
            return None;
        }
        match &self.kernel {
            Kernel::RowMean(rows) => Some(rows.mean(sg)),
            Kernel::Consistency(rows, columns) => Some(rows.mean(sg) - columns.mean_entropy(sg)),
            Kernel::Rank(rank) => rank.loss(sg),
        }
    }
}
