//! Fixtures and independent reference implementations shared by the
//! integration and acceptance tests.

#![allow(dead_code)]

use controversy::{AttributeColumn, Dataset, Dictionary, PredictionMatrix, RowSet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TOY_A: [[u32; 4]; 8] = [
    [1, 1, 0, 1],
    [0, 1, 0, 1],
    [1, 0, 1, 1],
    [1, 1, 1, 0],
    [0, 1, 1, 0],
    [0, 0, 0, 0],
    [0, 0, 0, 0],
    [0, 0, 0, 1],
];

pub const TOY_B: [[u32; 4]; 8] = [
    [1, 1, 0, 1],
    [0, 1, 0, 1],
    [1, 1, 0, 1],
    [1, 1, 0, 1],
    [0, 1, 1, 0],
    [0, 0, 0, 0],
    [0, 0, 0, 0],
    [0, 0, 0, 1],
];

pub fn matrix_from_rows(rows: &[Vec<u32>], classes: usize) -> PredictionMatrix {
    let labels = Dictionary::from_labels((0..classes).map(|c| c.to_string())).unwrap();
    let names = (0..rows[0].len()).map(|j| format!("C{}", j + 1)).collect();
    PredictionMatrix::new(names, labels, rows).unwrap()
}

pub fn toy_matrix(table: &[[u32; 4]; 8]) -> PredictionMatrix {
    let rows: Vec<Vec<u32>> = table.iter().map(|r| r.to_vec()).collect();
    matrix_from_rows(&rows, 2)
}

/// Eight binary attributes `r1..r8`, attribute `ri` being 1 on row i only.
pub fn indicator_dataset() -> Dataset {
    let columns = (0..8)
        .map(|i| {
            let values: Vec<&str> = (0..8).map(|r| if r == i { "1" } else { "0" }).collect();
            AttributeColumn::nominal(format!("r{}", i + 1), &values)
        })
        .collect();
    Dataset::new::<&str>(8, columns, None).unwrap()
}

/// 1-based row numbers, as the toy tables are numbered.
pub fn rows1(ids: &[usize]) -> RowSet {
    RowSet::from_indices(8, ids.iter().map(|i| i - 1))
}

// Reference implementations, written straight from the definitions.

pub fn ref_entropy(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.log2();
        }
    }
    h
}

fn tally(values: impl Iterator<Item = u32>, classes: usize) -> Vec<u64> {
    let mut counts = vec![0u64; classes];
    for v in values {
        counts[v as usize] += 1;
    }
    counts
}

pub fn ref_row(rows: &[Vec<u32>], sg: &[usize], classes: usize) -> f64 {
    sg.iter()
        .map(|&i| ref_entropy(&tally(rows[i].iter().copied(), classes)))
        .sum::<f64>()
        / sg.len() as f64
}

pub fn ref_ccl(rows: &[Vec<u32>], sg: &[usize], classes: usize) -> f64 {
    let n = rows[0].len();
    let cols: f64 = (0..n)
        .map(|j| ref_entropy(&tally(sg.iter().map(|&i| rows[i][j]), classes)))
        .sum::<f64>()
        / n as f64;
    ref_row(rows, sg, classes) - cols
}

/// Per positive: negatives ranked above it, plus half the tied negatives;
/// averaged over the positives.
pub fn ref_rasl(prob: &[f64], truth: &[u32], sg: &[usize], positive: u32) -> Option<f64> {
    let pos: Vec<f64> = sg.iter().filter(|&&i| truth[i] == positive).map(|&i| prob[i]).collect();
    let neg: Vec<f64> = sg.iter().filter(|&&i| truth[i] != positive).map(|&i| prob[i]).collect();
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let mut loss = 0.0;
    for &p in &pos {
        for &q in &neg {
            if p < q {
                loss += 1.0;
            } else if p == q {
                loss += 0.5;
            }
        }
    }
    Some(loss / pos.len() as f64)
}

/// A small random dataset: `k` binary nominal descriptors, `n` classifiers
/// over `classes` labels and a ground-truth column.
pub struct Instance {
    pub ds: Dataset,
    pub matrix: PredictionMatrix,
    pub rows: Vec<Vec<u32>>,
}

pub fn random_instance(rng: &mut ChaCha8Rng, m: usize, k: usize, n: usize, classes: usize) -> Instance {
    let columns = (0..k)
        .map(|j| {
            let values: Vec<&str> = (0..m).map(|_| if rng.gen_bool(0.5) { "a" } else { "b" }).collect();
            AttributeColumn::nominal(format!("d{}", j + 1), &values)
        })
        .collect();
    // every class occurs in the truth so the label set is complete
    let mut truth: Vec<String> = (0..m).map(|_| rng.gen_range(0..classes).to_string()).collect();
    for (c, label) in truth.iter_mut().take(classes).enumerate() {
        *label = c.to_string();
    }
    let ds = Dataset::new(m, columns, Some(("y", truth.as_slice()))).unwrap();
    let rows: Vec<Vec<u32>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(0..classes as u32)).collect())
        .collect();
    let labels = ds.labels().clone();
    let names = (0..n).map(|j| format!("C{}", j + 1)).collect();
    let matrix = PredictionMatrix::new(names, labels, &rows).unwrap();
    Instance { ds, matrix, rows }
}

pub fn random_subset(rng: &mut ChaCha8Rng, m: usize) -> RowSet {
    loop {
        let sg = RowSet::from_predicate(m, |_| rng.gen_bool(0.5));
        if !sg.is_empty() {
            return sg;
        }
    }
}
