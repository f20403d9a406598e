//! Text normalization and document-term matrix construction.
//!
//! Documents and queries share one pipeline: lowercase, split on whitespace
//! and ASCII punctuation, then drop stop words. The resulting tokens feed both
//! the correlation matrix used by co-clustering and the keyword sets used by
//! the search index.

use crate::grid::{self, GridError};
use ndarray::Array2;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::OnceLock;

static DEFAULT_STOPWORDS_TEXT: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("duplicate document id {0}")]
    DuplicateDocumentId(u64),
    #[error("corpus has no documents")]
    EmptyCorpus,
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("document {doc} contains out-of-vocabulary token `{token}`")]
    OutOfVocabulary { doc: u64, token: String },
    #[error("matrix entry ({row},{col}) = {value} is not a finite nonnegative number")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error(transparent)]
    Format(#[from] GridError),
}

/// Lowercases `text` and splits it on whitespace and ASCII punctuation.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| c.is_whitespace() || c.is_ascii_punctuation())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn remove_stopwords(tokens: &[String], stoplist: &StopWords) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stoplist.contains(t))
        .cloned()
        .collect()
}

/// A set of tokens removed before indexing or matching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses one token per line. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    /// The shipped English list (`data/stopwords_en.txt`).
    pub fn english() -> &'static StopWords {
        static LIST: OnceLock<StopWords> = OnceLock::new();
        LIST.get_or_init(|| StopWords::parse(DEFAULT_STOPWORDS_TEXT))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for StopWords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// Tokenizer plus stop-word filter.
#[derive(Debug, Clone)]
pub struct Analyzer {
    stopwords: StopWords,
}

impl Default for Analyzer {
    fn default() -> Self {
        Self::new(StopWords::english().clone())
    }
}

impl Analyzer {
    pub fn new(stopwords: StopWords) -> Self {
        Self { stopwords }
    }

    pub fn stopwords(&self) -> &StopWords {
        &self.stopwords
    }

    pub fn analyze(&self, text: &str) -> Vec<String> {
        remove_stopwords(&tokenize(text), &self.stopwords)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: u64,
    pub text: String,
}

impl Document {
    pub fn new(id: u64, text: impl Into<String>) -> Self {
        Self {
            id,
            text: text.into(),
        }
    }
}

/// Ordered list of distinct terms with a term -> column index map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Keeps the first occurrence of each term, in input order.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::default();
        for t in terms {
            let t = t.into();
            if !vocab.index.contains_key(&t) {
                vocab.index.insert(t.clone(), vocab.terms.len());
                vocab.terms.push(t);
            }
        }
        vocab
    }

    /// Sorted vocabulary of every token the analyzer keeps from `docs`.
    pub fn build(docs: &[Document], analyzer: &Analyzer) -> Self {
        let terms: BTreeSet<String> = docs.iter().flat_map(|d| analyzer.analyze(&d.text)).collect();
        Self::from_terms(terms)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Raw term count.
    #[default]
    Tf,
    /// `tf * ln(N / df)`.
    TfIdf,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub weighting: Weighting,
    /// Reject documents containing tokens outside the vocabulary instead of ignoring them.
    pub strict: bool,
}

/// N x K nonnegative document-term weights `d_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    values: Array2<f64>,
}

impl CorrelationMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self, CorpusError> {
        for ((row, col), &value) in values.indexed_iter() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(CorpusError::InvalidEntry { row, col, value });
            }
        }
        Ok(Self { values })
    }

    pub fn n_docs(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_terms(&self) -> usize {
        self.values.ncols()
    }

    pub fn get(&self, doc: usize, term: usize) -> f64 {
        self.values[[doc, term]]
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// `N,K` header then N lines of K comma-separated values.
    pub fn to_csv(&self) -> String {
        grid::write_grid(&self.values)
    }

    pub fn from_csv(text: &str) -> Result<Self, CorpusError> {
        Self::new(grid::parse_grid(text)?)
    }
}

pub fn build_correlation_matrix(
    docs: &[Document],
    vocab: &Vocabulary,
    analyzer: &Analyzer,
    options: BuildOptions,
) -> Result<CorrelationMatrix, CorpusError> {
    if docs.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    if vocab.is_empty() {
        return Err(CorpusError::EmptyVocabulary);
    }
    let mut ids = HashSet::with_capacity(docs.len());
    for d in docs {
        if !ids.insert(d.id) {
            return Err(CorpusError::DuplicateDocumentId(d.id));
        }
    }

    let (n, k) = (docs.len(), vocab.len());
    let mut tf = Array2::<f64>::zeros((n, k));
    for (i, doc) in docs.iter().enumerate() {
        for token in analyzer.analyze(&doc.text) {
            match vocab.position(&token) {
                Some(j) => tf[[i, j]] += 1.0,
                None if options.strict => {
                    return Err(CorpusError::OutOfVocabulary { doc: doc.id, token })
                }
                None => {}
            }
        }
    }

    if options.weighting == Weighting::TfIdf {
        let n_f = n as f64;
        for j in 0..k {
            let df = tf.column(j).iter().filter(|&&c| c > 0.0).count();
            let idf = if df == 0 { 0.0 } else { (n_f / df as f64).ln() };
            tf.column_mut(j).mapv_inplace(|c| c * idf);
        }
    }
    CorrelationMatrix::new(tf)
}
