//! Level-wise beam search over descriptions, plus an exhaustive oracle.
//!
//! Both searches share one ordering: quality in the search direction, then
//! fewer conditions, then the ASCII rendering of the description. The order
//! is total, so results do not depend on evaluation order or thread count.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, PredictionMatrix};
use crate::description::{Binning, Description, Notation, Refiner};
use crate::error::{Error, Result};
use crate::evaluator::{Evaluator, Scorer};
use crate::measures::Measure;
use crate::rowset::RowSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Direction {
    #[default]
    #[serde(rename = "max")]
    Maximize,
    #[serde(rename = "min")]
    Minimize,
}

impl Direction {
    pub fn token(self) -> &'static str {
        match self {
            Direction::Maximize => "max",
            Direction::Minimize => "min",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Direction::Maximize),
            "min" => Ok(Direction::Minimize),
            _ => Err(Error::Config(format!("unknown direction {s:?} (expected max or min)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub measure: Measure,
    pub direction: Direction,
    pub beam_width: usize,
    pub depth: usize,
    /// Minimum subgroup size as a fraction of the number of cases.
    pub min_support: f64,
    pub top_q: usize,
    pub bins: usize,
    pub binning: Binning,
    /// Positive class label for `rasl`.
    pub positive: Option<String>,
    /// Score candidates on the rayon thread pool.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            measure: Measure::Row,
            direction: Direction::Maximize,
            beam_width: 25,
            depth: 3,
            min_support: 0.04,
            top_q: 10,
            bins: 7,
            binning: Binning::EqualWidth,
            positive: None,
            parallel: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_support > 0.0 && self.min_support < 1.0) {
            return Err(Error::Config(format!(
                "min support must lie strictly between 0 and 1, got {}",
                self.min_support
            )));
        }
        for (name, value) in [("beam width", self.beam_width), ("depth", self.depth), ("top", self.top_q)] {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.bins < 2 {
            return Err(Error::Config(format!("bins must be at least 2, got {}", self.bins)));
        }
        Ok(())
    }

    /// Smallest admissible subgroup size: the support fraction of `m`,
    /// rounded up.
    pub fn min_cases(&self, m: usize) -> usize {
        // 1e-9 keeps e.g. 0.04 * 100 = 4.000000000000001 from rounding up to 5
        ((self.min_support * m as f64 - 1e-9).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultEntry {
    pub description: Description,
    /// ASCII rendering, also the final tie-break key.
    pub text: String,
    pub case_count: usize,
    pub quality: f64,
    pub baseline: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultList {
    pub measure: Measure,
    pub direction: Direction,
    pub baseline: f64,
    pub entries: Vec<ResultEntry>,
}

fn rank_order(direction: Direction, a: (f64, usize, &str), b: (f64, usize, &str)) -> Ordering {
    let by_quality = match direction {
        Direction::Maximize => b.0.total_cmp(&a.0),
        Direction::Minimize => a.0.total_cmp(&b.0),
    };
    by_quality.then(a.1.cmp(&b.1)).then_with(|| a.2.cmp(b.2))
}

/// A scored candidate: pool condition ids (ascending = canonical order).
#[derive(Debug, Clone)]
struct Scored {
    ids: Vec<u32>,
    count: usize,
    quality: f64,
    text: String,
    parent: usize,
    added: u32,
}

impl Scored {
    fn key(&self) -> (f64, usize, &str) {
        (self.quality, self.ids.len(), &self.text)
    }
}

struct Space<'a> {
    ds: &'a Dataset,
    refiner: Refiner,
    rows: Vec<RowSet>,
    min_cases: usize,
}

impl<'a> Space<'a> {
    fn new(ds: &'a Dataset, cfg: &SearchConfig) -> Result<Self> {
        cfg.validate()?;
        let refiner = Refiner::new(ds, cfg.bins, cfg.binning)?;
        let conditions = refiner.conditions();
        let rows = if cfg.parallel {
            conditions.par_iter().map(|c| c.evaluate(ds)).collect()
        } else {
            conditions.iter().map(|c| c.evaluate(ds)).collect()
        };
        Ok(Space {
            ds,
            min_cases: cfg.min_cases(ds.m()),
            refiner,
            rows,
        })
    }

    fn description(&self, ids: &[u32]) -> Description {
        let pool = self.refiner.conditions();
        Description::new(ids.iter().map(|&i| pool[i as usize]).collect())
    }

    fn text(&self, ids: &[u32]) -> String {
        self.description(ids).render(self.ds, Notation::Ascii)
    }

    fn entry(&self, s: &Scored, baseline: f64) -> ResultEntry {
        ResultEntry {
            description: self.description(&s.ids),
            text: s.text.clone(),
            case_count: s.count,
            quality: s.quality,
            baseline,
        }
    }
}

fn normalized(q: f64) -> Option<f64> {
    // + 0.0 folds -0.0 into 0.0 so total_cmp sees them as equal
    q.is_finite().then_some(q + 0.0)
}

fn whole_dataset_baseline<S: Scorer>(ds: &Dataset, scorer: &S) -> Result<f64> {
    scorer
        .score(&RowSet::full(ds.m()))
        .and_then(normalized)
        .ok_or(Error::UndefinedSubgroup("measure is undefined on the whole dataset"))
}

/// Beam search with the configured measure.
pub fn beam_search(ds: &Dataset, matrix: &PredictionMatrix, cfg: &SearchConfig) -> Result<ResultList> {
    cfg.validate()?;
    let evaluator = Evaluator::new(cfg.measure, ds, matrix, cfg.positive.as_deref())?;
    beam_search_with(ds, &evaluator, cfg).map(|entries| ResultList {
        measure: cfg.measure,
        direction: cfg.direction,
        baseline: evaluator.baseline(),
        entries,
    })
}

/// Beam search with an arbitrary scorer; `cfg.measure` is ignored.
///
/// Level 0 holds the empty description. Each level refines every beam member
/// by one condition, drops duplicates, candidates under minimum support and
/// candidates the scorer rejects, then keeps the best `beam_width` as the
/// next beam. The best `top_q` over all levels are returned.
pub fn beam_search_with<S: Scorer>(ds: &Dataset, scorer: &S, cfg: &SearchConfig) -> Result<Vec<ResultEntry>> {
    let space = Space::new(ds, cfg)?;
    let baseline = whole_dataset_baseline(ds, scorer)?;
    let pool_len = space.rows.len() as u32;
    let mut beam: Vec<(Vec<u32>, RowSet)> = vec![(Vec::new(), RowSet::full(ds.m()))];
    let mut results: Vec<Scored> = Vec::new();

    for _level in 0..cfg.depth {
        let mut candidates: BTreeMap<Vec<u32>, (usize, u32)> = BTreeMap::new();
        for (b, (ids, _)) in beam.iter().enumerate() {
            for c in 0..pool_len {
                if let Err(pos) = ids.binary_search(&c) {
                    let mut child = ids.clone();
                    child.insert(pos, c);
                    candidates.entry(child).or_insert((b, c));
                }
            }
        }
        let candidates: Vec<(Vec<u32>, (usize, u32))> = candidates.into_iter().collect();
        let score = |(ids, (parent, added)): &(Vec<u32>, (usize, u32))| -> Option<Scored> {
            let count = beam[*parent].1.intersection_count(&space.rows[*added as usize]);
            if count < space.min_cases {
                return None;
            }
            let rows = beam[*parent].1.intersection(&space.rows[*added as usize]);
            let quality = scorer.score(&rows).and_then(normalized)?;
            Some(Scored {
                text: space.text(ids),
                ids: ids.clone(),
                count,
                quality,
                parent: *parent,
                added: *added,
            })
        };
        let mut level: Vec<Scored> = if cfg.parallel {
            candidates.par_iter().filter_map(score).collect()
        } else {
            candidates.iter().filter_map(score).collect()
        };
        level.sort_by(|a, b| rank_order(cfg.direction, a.key(), b.key()));

        results.extend(level.iter().take(cfg.top_q).cloned());
        results.sort_by(|a, b| rank_order(cfg.direction, a.key(), b.key()));
        results.truncate(cfg.top_q);

        level.truncate(cfg.beam_width);
        beam = level
            .into_iter()
            .map(|s| {
                let rows = beam[s.parent].1.intersection(&space.rows[s.added as usize]);
                (s.ids, rows)
            })
            .collect();
        if beam.is_empty() {
            break;
        }
    }
    Ok(results.iter().map(|s| space.entry(s, baseline)).collect())
}

/// Default candidate budget for [`exhaustive_search`].
pub const DEFAULT_ORACLE_BUDGET: u128 = 5_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Scores every canonical description of up to `cfg.depth` conditions.
/// Meant as a test oracle for [`beam_search`].
pub fn exhaustive_search(
    ds: &Dataset,
    matrix: &PredictionMatrix,
    cfg: &SearchConfig,
    budget: u128,
) -> Result<ResultList> {
    cfg.validate()?;
    let evaluator = Evaluator::new(cfg.measure, ds, matrix, cfg.positive.as_deref())?;
    exhaustive_search_with(ds, &evaluator, cfg, budget).map(|entries| ResultList {
        measure: cfg.measure,
        direction: cfg.direction,
        baseline: evaluator.baseline(),
        entries,
    })
}

pub fn exhaustive_search_with<S: Scorer>(
    ds: &Dataset,
    scorer: &S,
    cfg: &SearchConfig,
    budget: u128,
) -> Result<Vec<ResultEntry>> {
    let space = Space::new(ds, cfg)?;
    let baseline = whole_dataset_baseline(ds, scorer)?;
    let pool = space.rows.len() as u128;
    let total: u128 = (1..=cfg.depth as u128).map(|k| binomial(pool, k)).fold(0, u128::saturating_add);
    if total > budget {
        return Err(Error::OracleTooLarge {
            candidates: total,
            budget,
        });
    }
    let mut top = TopQ {
        direction: cfg.direction,
        q: cfg.top_q,
        entries: Vec::new(),
    };
    let mut prefix = Vec::with_capacity(cfg.depth);
    enumerate(&space, scorer, cfg.depth, &RowSet::full(ds.m()), 0, &mut prefix, &mut top);
    Ok(top.entries.iter().map(|s| space.entry(s, baseline)).collect())
}

struct TopQ {
    direction: Direction,
    q: usize,
    entries: Vec<Scored>,
}

impl TopQ {
    fn offer(&mut self, space: &Space<'_>, ids: &[u32], count: usize, quality: f64) {
        if self.entries.len() == self.q {
            let worst = self.entries.last().expect("q >= 1");
            let coarse = match self.direction {
                Direction::Maximize => worst.quality.total_cmp(&quality),
                Direction::Minimize => quality.total_cmp(&worst.quality),
            }
            .then(ids.len().cmp(&worst.ids.len()));
            if coarse == Ordering::Greater {
                return;
            }
        }
        let candidate = Scored {
            ids: ids.to_vec(),
            count,
            quality,
            text: space.text(ids),
            parent: 0,
            added: 0,
        };
        let pos = self
            .entries
            .partition_point(|e| rank_order(self.direction, e.key(), candidate.key()) == Ordering::Less);
        if pos < self.q {
            self.entries.insert(pos, candidate);
            self.entries.truncate(self.q);
        }
    }
}

fn enumerate<S: Scorer>(
    space: &Space<'_>,
    scorer: &S,
    depth: usize,
    rows: &RowSet,
    start: usize,
    prefix: &mut Vec<u32>,
    top: &mut TopQ,
) {
    for c in start..space.rows.len() {
        let child = rows.intersection(&space.rows[c]);
        // support is anti-monotone: nothing below an undersized set qualifies
        if child.count() < space.min_cases {
            continue;
        }
        prefix.push(c as u32);
        if let Some(q) = scorer.score(&child).and_then(normalized) {
            top.offer(space, prefix, child.count(), q);
        }
        if prefix.len() < depth {
            enumerate(space, scorer, depth, &child, c + 1, prefix, top);
        }
        prefix.pop();
    }
}
