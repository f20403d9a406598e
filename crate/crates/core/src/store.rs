//! Plain-text persistence for the link index and matrices.
//!
//! Link store layout:
//!
//! ```text
//! coclust-links v1 next_id=<u64> clock=<u64> records=<count>
//! <id> <registered_seq> <last_visit_seq> <visit_count> <len>:<name> <len>:<description> <len>:<keywords>
//! ...
//! ```
//!
//! String fields are prefixed with their UTF-8 byte length, so they may hold
//! commas, spaces or newlines. Every write goes to a temporary file in the
//! target directory which is then renamed over the destination.

use crate::corpus::{Analyzer, CorpusError, CorrelationMatrix};
use crate::grid::GridError;
use crate::search_index::{LinkRecord, SearchError, SearchIndex};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

const MAGIC: &str = "coclust-links";
const VERSION: &str = "v1";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt store at line {line}: {msg}")]
    CorruptStore { line: usize, msg: String },
    #[error("stored link at line {line} violates field limits: {source}")]
    LimitViolation {
        line: usize,
        #[source]
        source: SearchError,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `contents` to `path` via a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), StoreError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| StoreError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String, StoreError> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

pub fn render_store(index: &SearchIndex) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{MAGIC} {VERSION} next_id={} clock={} records={}",
        index.next_id(),
        index.clock(),
        index.len()
    );
    for l in index.links() {
        let _ = writeln!(
            out,
            "{} {} {} {} {}:{} {}:{} {}:{}",
            l.id,
            l.registered_seq,
            l.last_visit_seq,
            l.visit_count,
            l.name.len(),
            l.name,
            l.description.len(),
            l.description,
            l.keywords_raw.len(),
            l.keywords_raw
        );
    }
    out
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn corrupt(&self, msg: impl Into<String>) -> StoreError {
        StoreError::CorruptStore {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn word(&mut self) -> Result<&'a str, StoreError> {
        let rest = &self.text[self.pos..];
        let end = rest.find([' ', '\n']).unwrap_or(rest.len());
        if end == 0 {
            return Err(self.corrupt("unexpected end of record"));
        }
        self.pos += end;
        Ok(&rest[..end])
    }

    fn number(&mut self, what: &str) -> Result<u64, StoreError> {
        let w = self.word()?;
        w.parse().map_err(|_| self.corrupt(format!("invalid {what} `{w}`")))
    }

    fn expect(&mut self, c: char) -> Result<(), StoreError> {
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            if c == '\n' {
                self.line += 1;
            }
            Ok(())
        } else if self.at_end() {
            Err(self.corrupt("file is truncated"))
        } else {
            Err(self.corrupt(format!("expected {c:?}")))
        }
    }

    fn prefixed(&mut self, what: &str) -> Result<&'a str, StoreError> {
        let rest = &self.text[self.pos..];
        let colon = rest
            .find(':')
            .filter(|&i| i > 0 && rest[..i].bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| self.corrupt(format!("missing length prefix for {what}")))?;
        let len: usize = rest[..colon]
            .parse()
            .map_err(|_| self.corrupt(format!("invalid length for {what}")))?;
        let start = colon + 1;
        let value = rest
            .get(start..start + len)
            .ok_or_else(|| self.corrupt(format!("{what} is truncated")))?;
        self.pos += start + len;
        self.line += value.matches('\n').count();
        Ok(value)
    }
}

pub fn parse_store(text: &str, analyzer: Analyzer) -> Result<SearchIndex, StoreError> {
    let mut cur = Cursor { text, pos: 0, line: 1 };
    let header_line = text.lines().next().unwrap_or("");
    let fields: Vec<&str> = header_line.split(' ').collect();
    let kv = |key: &str, raw: &str| -> Option<u64> { raw.strip_prefix(key)?.parse().ok() };
    let (next_id, clock, records) = match fields.as_slice() {
        [MAGIC, VERSION, a, b, c] => match (kv("next_id=", a), kv("clock=", b), kv("records=", c)) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(cur.corrupt("malformed header counters")),
        },
        _ => return Err(cur.corrupt(format!("not a {MAGIC} {VERSION} file"))),
    };
    cur.pos = header_line.len();
    cur.expect('\n')?;

    let mut links = Vec::new();
    let mut record_lines = Vec::new();
    while !cur.at_end() {
        let line = cur.line;
        let id = cur.number("id")?;
        cur.expect(' ')?;
        let registered_seq = cur.number("registered_seq")?;
        cur.expect(' ')?;
        let last_visit_seq = cur.number("last_visit_seq")?;
        cur.expect(' ')?;
        let visit_count = cur.number("visit_count")?;
        cur.expect(' ')?;
        let name = cur.prefixed("name")?;
        cur.expect(' ')?;
        let description = cur.prefixed("description")?;
        cur.expect(' ')?;
        let keywords_raw = cur.prefixed("keywords")?;
        cur.expect('\n')?;
        links.push(LinkRecord {
            id,
            name: name.to_string(),
            description: description.to_string(),
            keywords_raw: keywords_raw.to_string(),
            keywords: Default::default(),
            visit_count,
            registered_seq,
            last_visit_seq,
        });
        record_lines.push(line);
    }
    if links.len() as u64 != records {
        return Err(cur.corrupt(format!(
            "header declares {records} records, found {} (file is truncated)",
            links.len()
        )));
    }

    // Re-validate each record so the failing line can be reported.
    for (rec, &line) in links.iter().zip(&record_lines) {
        crate::search_index::validate_fields(&rec.name, &rec.description, &rec.keywords_raw, &analyzer)
            .map_err(|source| StoreError::LimitViolation { line, source })?;
    }
    SearchIndex::restore(analyzer, links, next_id, clock)
        .map_err(|e| StoreError::CorruptStore { line: 1, msg: e.to_string() })
}

pub fn save_store(path: &Path, index: &SearchIndex) -> Result<(), StoreError> {
    write_atomic(path, render_store(index).as_bytes())
}

pub fn load_store(path: &Path, analyzer: Analyzer) -> Result<SearchIndex, StoreError> {
    parse_store(&read_text(path)?, analyzer)
}

impl From<CorpusError> for StoreError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Format(GridError::DimensionMismatch(m)) => StoreError::DimensionMismatch(m),
            other => StoreError::InvalidMatrix(other.to_string()),
        }
    }
}

pub fn save_matrix(path: &Path, matrix: &CorrelationMatrix) -> Result<(), StoreError> {
    write_atomic(path, matrix.to_csv().as_bytes())
}

pub fn load_matrix(path: &Path) -> Result<CorrelationMatrix, StoreError> {
    Ok(CorrelationMatrix::from_csv(&read_text(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn sample_index() -> SearchIndex {
        let mut idx = SearchIndex::new();
        let a = idx
            .register_link("www.education.ac.in", "we deal in all type of education", "education,system,parameter")
            .unwrap();
        idx.register_link("two words", "commas, spaces\nand a newline", "system").unwrap();
        let c = idx.register_link("ünïcode", "", "parameter, tuning").unwrap();
        idx.record_visit(a).unwrap();
        idx.record_visit(c).unwrap();
        idx.record_visit(a).unwrap();
        idx
    }

    fn same_state(a: &SearchIndex, b: &SearchIndex) {
        assert_eq!(a.next_id(), b.next_id());
        assert_eq!(a.clock(), b.clock());
        assert_eq!(a.links().collect::<Vec<_>>(), b.links().collect::<Vec<_>>());
    }

    #[test]
    fn three_link_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("links.store");
        let idx = sample_index();
        save_store(&path, &idx).unwrap();
        let back = load_store(&path, Analyzer::default()).unwrap();
        same_state(&idx, &back);
        assert_eq!(render_store(&back), render_store(&idx));
    }

    #[test]
    fn empty_store_is_header_only() {
        let text = render_store(&SearchIndex::new());
        assert_eq!(text, "coclust-links v1 next_id=1 clock=0 records=0\n");
        assert!(parse_store(&text, Analyzer::default()).unwrap().is_empty());
    }

    #[test]
    fn truncation_reports_a_line() {
        let text = render_store(&sample_index());
        for cut in [text.len() - 1, text.len() - 10, text.find("2 ").unwrap() + 1] {
            match parse_store(&text[..cut], Analyzer::default()) {
                Err(StoreError::CorruptStore { line, .. }) => assert!(line >= 2, "cut {cut}: line {line}"),
                other => panic!("cut {cut}: expected CorruptStore, got {other:?}"),
            }
        }
        // Cut exactly at a record boundary.
        let boundary = text.match_indices('\n').nth(1).unwrap().0 + 1;
        assert!(matches!(
            parse_store(&text[..boundary], Analyzer::default()),
            Err(StoreError::CorruptStore { .. })
        ));
    }

    #[test]
    fn oversized_fields_fail_on_load() {
        let name = "n".repeat(46);
        let text = format!(
            "coclust-links v1 next_id=2 clock=1 records=1\n1 1 0 0 {}:{} 0: 1:k\n",
            name.len(),
            name
        );
        match parse_store(&text, Analyzer::default()) {
            Err(StoreError::LimitViolation { line: 2, source }) => {
                assert!(source.to_string().contains("45"))
            }
            other => panic!("expected LimitViolation, got {other:?}"),
        }
    }

    #[test]
    fn bad_header_is_corrupt() {
        assert!(matches!(
            parse_store("something else\n", Analyzer::default()),
            Err(StoreError::CorruptStore { line: 1, .. })
        ));
    }

    #[test]
    fn matrix_round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let m = CorrelationMatrix::new(array![[0.1, 2.0], [1.0 / 3.0, 0.0]]).unwrap();
        save_matrix(&path, &m).unwrap();
        let back = load_matrix(&path).unwrap();
        for (a, b) in m.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1e-12);
        }

        std::fs::write(&path, "3,2\n1,2\n3,4\n").unwrap();
        assert!(matches!(load_matrix(&path), Err(StoreError::DimensionMismatch(_))));
        std::fs::write(&path, "1,2\n1,-2\n").unwrap();
        assert!(matches!(load_matrix(&path), Err(StoreError::InvalidMatrix(_))));
        assert!(matches!(
            load_matrix(&dir.path().join("missing.csv")),
            Err(StoreError::Io { .. })
        ));
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        write_atomic(&path, b"first version, longer").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
