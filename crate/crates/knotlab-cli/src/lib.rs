//! Knot table ingestion, the SU(2)-averseness obstruction classifier, corpus reports
//! and the pieces behind the `knotlab` command line.

pub mod classify;
pub mod report;
pub mod table;

pub use classify::{classify, Classifier, Rule, Status, Verdict};
pub use table::{ingest_table, KnotRecord, TableError};
