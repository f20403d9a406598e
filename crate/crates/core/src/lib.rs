//! Fuzzy co-clustering of document-term matrices (FCC_STF, the single-term
//! fuzzifier variant) and a keyword search index that presents results as
//! five visit-count priority frames plus a frame for zero-visit pages.
//!
//! The crate is organised as:
//!
//! * [`corpus`]: tokenizing, stop-word removal and document-term matrix construction.
//! * [`coclustering`]: the alternating closed-form membership updates, objective and trace export.
//! * [`search_index`]: link registration, visit counting, frame queries and replacement policies.
//! * [`store`]: durable plain-text files for links and matrices.
//! * [`cli`]: the `coclust` command-line front end.

pub mod cli;
pub mod coclustering;
pub mod corpus;
mod grid;
pub mod search_index;
pub mod store;

pub use coclustering::{
    CoClusterResult, DocMembershipMatrix, FccStfConfig, FccStfError, IterationTrace,
    WordMembershipMatrix,
};
pub use corpus::{Analyzer, CorrelationMatrix, Document, StopWords, Vocabulary, Weighting};
pub use search_index::{LinkRecord, QueryFrameSet, ReplacementPolicy, SearchIndex};
