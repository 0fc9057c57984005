//! Ordered prediction-matrix export: a one-pixel-per-entry PPM raster and
//! an ordering CSV for external plotting.
//!
//! Rows are sorted lexicographically by their tuple of predicted class codes
//! (classifiers in input order), ties kept in original order.

use std::io::Write;

use crate::data::{Dataset, PredictionMatrix};
use crate::error::Result;
use crate::rowset::RowSet;

/// Original row indices in display order.
pub fn prediction_order(matrix: &PredictionMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..matrix.m()).collect();
    order.sort_by(|&a, &b| matrix.row(a).cmp(matrix.row(b)));
    order
}

const PALETTE: [[u8; 3]; 10] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
];
const SEPARATOR: [u8; 3] = [255, 255, 255];
const HIGHLIGHT: [u8; 3] = [0, 0, 0];
const BACKGROUND: [u8; 3] = [235, 235, 235];

/// Color of class `code`; the first ten come from a fixed palette.
pub fn class_color(code: u32) -> [u8; 3] {
    match PALETTE.get(code as usize) {
        Some(c) => *c,
        None => {
            let h = code.wrapping_mul(2_654_435_761);
            [(h >> 24) as u8, (h >> 16) as u8, (h >> 8) as u8]
        }
    }
}

/// Pixel layout of an exported matrix row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub classifiers: usize,
    pub truth: bool,
    pub band: bool,
}

impl Layout {
    /// Classifier pixels, then a separator and the truth pixel, then a
    /// separator and the membership band.
    pub fn width(&self) -> usize {
        self.classifiers + 2 * self.truth as usize + 2 * self.band as usize
    }
}

/// Writes a binary PPM (P6) with one row per case in `order`.
pub fn write_ppm<W: Write>(
    matrix: &PredictionMatrix,
    truth: Option<&[u32]>,
    order: &[usize],
    members: Option<&RowSet>,
    mut out: W,
) -> Result<Layout> {
    let layout = Layout {
        classifiers: matrix.n(),
        truth: truth.is_some(),
        band: members.is_some(),
    };
    write!(out, "P6\n{} {}\n255\n", layout.width(), order.len())?;
    let mut line = Vec::with_capacity(layout.width() * 3);
    for &i in order {
        line.clear();
        for &c in matrix.row(i) {
            line.extend_from_slice(&class_color(c));
        }
        if let Some(truth) = truth {
            line.extend_from_slice(&SEPARATOR);
            line.extend_from_slice(&class_color(truth[i]));
        }
        if let Some(members) = members {
            line.extend_from_slice(&SEPARATOR);
            let band = if members.contains(i) { HIGHLIGHT } else { BACKGROUND };
            line.extend_from_slice(&band);
        }
        out.write_all(&line)?;
    }
    out.flush()?;
    Ok(layout)
}

/// `sorted_pos,original_index,<classifiers...>[,truth],member`. The member
/// column is `1`/`0` when a subgroup is given and empty otherwise.
pub fn write_ordering_csv<W: Write>(
    ds: &Dataset,
    matrix: &PredictionMatrix,
    order: &[usize],
    members: Option<&RowSet>,
    out: W,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["sorted_pos".to_owned(), "original_index".to_owned()];
    header.extend(matrix.classifier_names().iter().cloned());
    if ds.truth().is_some() {
        header.push("truth".to_owned());
    }
    header.push("member".to_owned());
    writer.write_record(&header)?;
    let labels = matrix.labels();
    for (pos, &i) in order.iter().enumerate() {
        let mut record = vec![pos.to_string(), i.to_string()];
        record.extend(matrix.row(i).iter().map(|&c| labels.label(c).to_owned()));
        if let Some(truth) = ds.truth() {
            record.push(ds.labels().label(truth[i]).to_owned());
        }
        record.push(match members {
            Some(m) => (m.contains(i) as u8).to_string(),
            None => String::new(),
        });
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
