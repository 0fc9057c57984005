//! Controversy rules: exceptional model mining over classifier predictions.
//!
//! Given a dataset, ground truth (optional) and the predictions of several
//! classifiers, find conjunctive descriptions of regions where the
//! classifiers disagree (or agree) exceptionally.
//!
//! ```no_run
//! use controversy::{data, search::{beam_search, SearchConfig}, measures::Measure};
//! # fn main() -> controversy::Result<()> {
//! let ds = data::load_dataset_path("titanic.csv".as_ref(), "titanic.schema.json".as_ref())?;
//! let preds = data::load_predictions_path("preds.csv".as_ref(), &ds)?;
//! let cfg = SearchConfig { measure: Measure::Row, ..SearchConfig::default() };
//! let results = beam_search(&ds, &preds, &cfg)?;
//! for entry in &results.entries {
//!     println!("{} | {} | {:.3}", entry.text, entry.case_count, entry.quality);
//! }
//! # Ok(())
//! # }
//! ```

pub mod data;
pub mod description;
pub mod error;
pub mod evaluator;
pub mod export;
pub mod measures;
pub mod report;
pub mod rowset;
pub mod search;

pub use data::{AttributeColumn, Dataset, Dictionary, PredictionMatrix};
pub use description::{Binning, Condition, Description, Notation, Operator};
pub use error::{Error, Result};
pub use evaluator::{Evaluator, Scorer};
pub use measures::{Measure, QualityValue};
pub use rowset::RowSet;
pub use search::{beam_search, exhaustive_search, Direction, ResultEntry, ResultList, SearchConfig};
