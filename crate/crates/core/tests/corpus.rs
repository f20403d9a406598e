mod common;

use coclust::corpus::{
    build_correlation_matrix, Analyzer, BuildOptions, Document, StopWords, Vocabulary, Weighting,
};
use std::collections::HashMap;

/// Counts terms and document frequencies by hand from whitespace-split text.
fn hand_count_tfidf(texts: &[&str], terms: &[&str]) -> Vec<Vec<f64>> {
    let n = texts.len() as f64;
    let counts: Vec<HashMap<&str, usize>> = texts
        .iter()
        .map(|t| {
            let mut m = HashMap::new();
            for w in t.split(' ') {
                *m.entry(w).or_insert(0) += 1;
            }
            m
        })
        .collect();
    let mut out = vec![vec![0.0; terms.len()]; texts.len()];
    for (j, term) in terms.iter().enumerate() {
        let df = counts.iter().filter(|m| m.contains_key(term)).count();
        for (i, m) in counts.iter().enumerate() {
            let tf = *m.get(term).unwrap_or(&0) as f64;
            out[i][j] = if df == 0 { 0.0 } else { tf * (n / df as f64).ln() };
        }
    }
    out
}

#[test]
fn tfidf_matches_hand_count() {
    let texts = [
        common::docs_text(&["apple", "banana", "apple", "cherry"]),
        common::docs_text(&["banana", "date", "date", "date"]),
        common::docs_text(&["apple", "cherry", "cherry", "banana"]),
    ];
    let terms = ["apple", "banana", "cherry", "date"];
    let docs: Vec<Document> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| Document::new(i as u64, t.clone()))
        .collect();
    let analyzer = Analyzer::new(StopWords::empty());
    let vocab = Vocabulary::from_terms(terms);
    let opts = BuildOptions { weighting: Weighting::TfIdf, strict: true };
    let m = build_correlation_matrix(&docs, &vocab, &analyzer, opts).unwrap();

    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let expected = hand_count_tfidf(&refs, &terms);
    assert_eq!((m.n_docs(), m.n_terms()), (3, 4));
    for i in 0..3 {
        for j in 0..4 {
            assert!(
                (m.get(i, j) - expected[i][j]).abs() < 1e-15,
                "({i},{j}): {} vs {}",
                m.get(i, j),
                expected[i][j]
            );
        }
    }
    // banana is in every document, so its weight vanishes.
    assert!(m.values().column(1).iter().all(|&x| x == 0.0));
    // date: tf 3 in one document of three.
    assert!((m.get(1, 3) - 3.0 * 3f64.ln()).abs() < 1e-15);
}

#[test]
fn default_pipeline_drops_stopwords_before_counting() {
    let docs = [
        Document::new(1, "We deal in all type of Education."),
        Document::new(2, "The education system, and its parameter!"),
    ];
    let analyzer = Analyzer::default();
    let vocab = Vocabulary::build(&docs, &analyzer);
    assert_eq!(vocab.terms(), ["deal", "education", "parameter", "system", "type"]);
    let m = build_correlation_matrix(&docs, &vocab, &analyzer, BuildOptions::default()).unwrap();
    assert_eq!(m.values().row(0).to_vec(), [1.0, 1.0, 0.0, 0.0, 1.0]);
    assert_eq!(m.values().row(1).to_vec(), [0.0, 1.0, 1.0, 1.0, 0.0]);
}

#[test]
fn csv_layout() {
    let docs = [Document::new(1, "a a b")];
    let analyzer = Analyzer::new(StopWords::empty());
    let vocab = Vocabulary::from_terms(["a", "b"]);
    let m = build_correlation_matrix(&docs, &vocab, &analyzer, BuildOptions::default()).unwrap();
    assert_eq!(m.to_csv(), "1,2\n2,1\n");
}
