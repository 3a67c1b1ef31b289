//! Over- and under-represented substrings of a text, found by a depth-first
//! traversal of the suffix-link tree over the BWT with exact occurrence-count
//! moments under an IID character model.

pub mod analyze;
pub mod bitvec;
pub mod border;
pub mod classes;
pub mod error;
pub mod index;
pub mod oracle;
pub mod report;
pub mod score;
pub mod text;
pub mod traversal;
pub mod verify;
pub mod wavelet;

pub use analyze::{analyze, default_max_len, Analysis, AnalysisConfig, Mode, ScoreRecord};
pub use classes::Class;
pub use error::{Error, Result};
pub use index::BwtIndex;
pub use report::{sort_records, write_tsv, TSV_HEADER};
pub use score::{MarkovModel, ModelSource, ScoreFn, ZScore};
pub use text::{ingest, Format, Text};
