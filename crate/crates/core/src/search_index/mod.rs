//! Keyword search over registered links.
//!
//! A query is normalized with the corpus pipeline into a keyword set `Q`.
//! A link matches at level `k` when at least `k` of its keywords are in `Q`;
//! each link keeps its highest level. Matched links with at least one visit
//! are ranked by level and then by the replacement policy's order, and the
//! first five fill the high-priority frames. Matched links that were never
//! visited are collected in a separate zero-priority frame so they are not
//! lost as outliers.

mod replacement;

pub use replacement::{apply_replacement, FrameSlot, FrameState, Replacement};

use crate::corpus::Analyzer;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

pub const NAME_LIMIT: usize = 45;
pub const DESCRIPTION_LIMIT: usize = 450;
pub const KEYWORDS_LIMIT: usize = 400;
/// Number of high-priority frames per result page.
pub const FRAME_CAPACITY: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Name,
    Description,
    Keywords,
}

impl Field {
    pub fn limit(self) -> usize {
        match self {
            Field::Name => NAME_LIMIT,
            Field::Description => DESCRIPTION_LIMIT,
            Field::Keywords => KEYWORDS_LIMIT,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Name => "name",
            Field::Description => "description",
            Field::Keywords => "keywords",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("{field} is {actual} characters, limit is {limit}")]
    FieldTooLong {
        field: Field,
        limit: usize,
        actual: usize,
    },
    #[error("no keyword survives normalization")]
    EmptyKeywords,
    #[error("unknown link {0}")]
    UnknownLink(u64),
    #[error("inconsistent index state: {0}")]
    Inconsistent(String),
}

/// A registered page. `visit_count` is its priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkRecord {
    pub id: u64,
    pub name: String,
    pub description: String,
    /// Keywords as entered, comma separated.
    pub keywords_raw: String,
    /// Normalized keyword set derived from `keywords_raw`.
    pub keywords: BTreeSet<String>,
    pub visit_count: u64,
    pub registered_seq: u64,
    /// Sequence number of the most recent visit, 0 if never visited.
    pub last_visit_seq: u64,
}

fn check_len(field: Field, value: &str) -> Result<(), SearchError> {
    let actual = value.chars().count();
    if actual > field.limit() {
        Err(SearchError::FieldTooLong {
            field,
            limit: field.limit(),
            actual,
        })
    } else {
        Ok(())
    }
}

/// Validates field lengths and normalizes the comma-separated keywords.
pub fn validate_fields(
    name: &str,
    description: &str,
    keywords: &str,
    analyzer: &Analyzer,
) -> Result<BTreeSet<String>, SearchError> {
    check_len(Field::Name, name)?;
    check_len(Field::Description, description)?;
    check_len(Field::Keywords, keywords)?;
    let set: BTreeSet<String> = keywords
        .split(',')
        .flat_map(|kw| analyzer.analyze(kw))
        .collect();
    if set.is_empty() {
        return Err(SearchError::EmptyKeywords);
    }
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReplacementPolicy {
    Fifo,
    Lru,
    #[default]
    Priority,
}

impl ReplacementPolicy {
    /// Display order within one match level; ties fall back to `registered_seq` ascending.
    fn order(self, a: &LinkRecord, b: &LinkRecord) -> Ordering {
        let primary = match self {
            ReplacementPolicy::Priority => b.visit_count.cmp(&a.visit_count),
            ReplacementPolicy::Fifo => Ordering::Equal,
            ReplacementPolicy::Lru => b.last_visit_seq.cmp(&a.last_visit_seq),
        };
        primary.then(a.registered_seq.cmp(&b.registered_seq))
    }
}

impl FromStr for ReplacementPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fifo" => Ok(Self::Fifo),
            "lru" => Ok(Self::Lru),
            "priority" => Ok(Self::Priority),
            other => Err(format!("unknown policy `{other}` (expected priority, fifo or lru)")),
        }
    }
}

impl fmt::Display for ReplacementPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fifo => "fifo",
            Self::Lru => "lru",
            Self::Priority => "priority",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameEntry {
    pub id: u64,
    pub name: String,
    pub description: String,
    pub visit_count: u64,
    pub match_level: usize,
    pub registered_seq: u64,
    pub last_visit_seq: u64,
}

impl FrameEntry {
    fn new(link: &LinkRecord, match_level: usize) -> Self {
        Self {
            id: link.id,
            name: link.name.clone(),
            description: link.description.clone(),
            visit_count: link.visit_count,
            match_level,
            registered_seq: link.registered_seq,
            last_visit_seq: link.last_visit_seq,
        }
    }
}

/// Result of one query: up to five high-priority frames and the zero-priority frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryFrameSet {
    pub query_keywords: Vec<String>,
    pub policy: ReplacementPolicy,
    pub page: usize,
    pub high_frames: Vec<FrameEntry>,
    pub zero_frame: Vec<FrameEntry>,
    pub total_matches: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SearchIndex {
    analyzer: Analyzer,
    links: BTreeMap<u64, LinkRecord>,
    postings: HashMap<String, BTreeSet<u64>>,
    next_id: u64,
    /// Global sequence shared by registrations and visits.
    clock: u64,
}

impl SearchIndex {
    pub fn new() -> Self {
        Self::with_analyzer(Analyzer::default())
    }

    pub fn with_analyzer(analyzer: Analyzer) -> Self {
        Self {
            analyzer,
            links: BTreeMap::new(),
            postings: HashMap::new(),
            next_id: 1,
            clock: 0,
        }
    }

    /// Rebuilds an index from stored records and counters.
    pub fn restore(
        analyzer: Analyzer,
        records: Vec<LinkRecord>,
        next_id: u64,
        clock: u64,
    ) -> Result<Self, SearchError> {
        let mut index = Self::with_analyzer(analyzer);
        index.next_id = next_id;
        index.clock = clock;
        for mut rec in records {
            rec.keywords =
                validate_fields(&rec.name, &rec.description, &rec.keywords_raw, &index.analyzer)?;
            if rec.id >= next_id || rec.registered_seq > clock || rec.last_visit_seq > clock {
                return Err(SearchError::Inconsistent(format!(
                    "link {} is ahead of the stored counters",
                    rec.id
                )));
            }
            if index.links.contains_key(&rec.id) {
                return Err(SearchError::Inconsistent(format!("duplicate link id {}", rec.id)));
            }
            index.insert(rec);
        }
        Ok(index)
    }

    fn insert(&mut self, rec: LinkRecord) {
        for kw in &rec.keywords {
            self.postings.entry(kw.clone()).or_default().insert(rec.id);
        }
        self.links.insert(rec.id, rec);
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&LinkRecord> {
        self.links.get(&id)
    }

    /// Records in id order.
    pub fn links(&self) -> impl Iterator<Item = &LinkRecord> {
        self.links.values()
    }

    pub fn register_link(
        &mut self,
        name: &str,
        description: &str,
        keywords: &str,
    ) -> Result<u64, SearchError> {
        let set = validate_fields(name, description, keywords, &self.analyzer)?;
        let id = self.next_id;
        self.next_id += 1;
        let registered_seq = self.tick();
        self.insert(LinkRecord {
            id,
            name: name.to_string(),
            description: description.to_string(),
            keywords_raw: keywords.to_string(),
            keywords: set,
            visit_count: 0,
            registered_seq,
            last_visit_seq: 0,
        });
        Ok(id)
    }

    /// Increments the visit count and returns the new value.
    pub fn record_visit(&mut self, id: u64) -> Result<u64, SearchError> {
        if !self.links.contains_key(&id) {
            return Err(SearchError::UnknownLink(id));
        }
        let seq = self.tick();
        let link = self.links.get_mut(&id).expect("checked above");
        link.visit_count += 1;
        link.last_visit_seq = seq;
        Ok(link.visit_count)
    }

    pub fn query(&self, text: &str, policy: ReplacementPolicy) -> QueryFrameSet {
        self.query_page(text, policy, 0)
    }

    /// `page` skips the first `page * 5` high-priority matches.
    pub fn query_page(&self, text: &str, policy: ReplacementPolicy, page: usize) -> QueryFrameSet {
        let query: BTreeSet<String> = self.analyzer.analyze(text).into_iter().collect();

        // Highest k such that at least k of the link's keywords are in Q.
        let mut levels: BTreeMap<u64, usize> = BTreeMap::new();
        for kw in &query {
            for &id in self.postings.get(kw).into_iter().flatten() {
                *levels.entry(id).or_default() += 1;
            }
        }

        let (mut ranked, mut zero): (Vec<_>, Vec<_>) = levels
            .iter()
            .map(|(id, &level)| (&self.links[id], level))
            .partition(|(link, _)| link.visit_count > 0);
        ranked.sort_by(|(a, la), (b, lb)| lb.cmp(la).then_with(|| policy.order(a, b)));
        zero.sort_by(|(a, la), (b, lb)| lb.cmp(la).then(a.registered_seq.cmp(&b.registered_seq)));

        QueryFrameSet {
            query_keywords: query.into_iter().collect(),
            policy,
            page,
            high_frames: ranked
                .iter()
                .skip(page.saturating_mul(FRAME_CAPACITY))
                .take(FRAME_CAPACITY)
                .map(|(l, lvl)| FrameEntry::new(l, *lvl))
                .collect(),
            zero_frame: zero.iter().map(|(l, lvl)| FrameEntry::new(l, *lvl)).collect(),
            total_matches: levels.len(),
        }
    }
}

/// Index shared between threads: any number of concurrent queries, one writer.
#[derive(Debug, Clone, Default)]
pub struct SharedIndex(Arc<RwLock<SearchIndex>>);

impl SharedIndex {
    pub fn new(index: SearchIndex) -> Self {
        Self(Arc::new(RwLock::new(index)))
    }

    pub fn read(&self) -> RwLockReadGuard<'_, SearchIndex> {
        self.0.read().unwrap_or_else(|e| e.into_inner())
    }

    pub fn write(&self) -> RwLockWriteGuard<'_, SearchIndex> {
        self.0.write().unwrap_or_else(|e| e.into_inner())
    }

    pub fn query(&self, text: &str, policy: ReplacementPolicy) -> QueryFrameSet {
        self.read().query(text, policy)
    }

    pub fn register_link(&self, name: &str, description: &str, keywords: &str) -> Result<u64, SearchError> {
        self.write().register_link(name, description, keywords)
    }

    pub fn record_visit(&self, id: u64) -> Result<u64, SearchError> {
        self.write().record_visit(id)
    }
}
