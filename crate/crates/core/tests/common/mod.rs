//! Fixtures and brute-force oracles shared by the integration suites.
#![allow(dead_code)]

use coclust::corpus::{tokenize, Analyzer, CorrelationMatrix};
use coclust::search_index::{LinkRecord, ReplacementPolicy, SearchIndex, FRAME_CAPACITY};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, VecDeque};

pub const EDUCATION_QUERY: &str = "education system parameter";

/// (name, description, keywords, visits). 18 of these match the education query.
pub const EDUCATION_LINKS: &[(&str, &str, &str, u64)] = &[
    ("www.education.ac.in", "we deal in all type of education", "education,system,parameter", 12),
    ("www.edusystems.org", "education system reviews and parameter studies", "education,system,parameter,review", 0),
    ("www.schoolboard.gov", "national board of school education", "education,system,board", 7),
    ("www.params.io", "parameter estimation for learning systems", "parameter,system,estimation", 3),
    ("www.cricketlive.com", "live cricket scores", "cricket,sports,live", 40),
    ("www.unilist.net", "list of universities", "education,university", 21),
    ("www.opensys.dev", "operating system internals", "system,kernel", 0),
    ("www.tuning.ai", "hyper parameter tuning guide", "parameter,tuning", 5),
    ("www.kids-learn.in", "early education games", "education,kids,games", 0),
    ("www.weather.org", "daily forecasts", "weather,forecast", 2),
    ("www.edu-policy.in", "policy for the education system", "education,system,policy", 9),
    ("www.controlsys.eu", "control system parameter design", "control,system,parameter", 0),
    ("www.mathparam.edu", "parametric equations", "parameter,math", 1),
    ("www.recipes.com", "cooking recipes", "cooking,food", 15),
    ("www.sys-admin.net", "system administration tips", "system,admin", 4),
    ("www.teachers.org", "teachers and education resources", "education,teachers", 0),
    ("www.finance-sys.com", "finance system tools", "finance,system", 0),
    ("www.edu-stats.in", "education parameter statistics", "education,parameter,statistics", 6),
    ("www.music.fm", "streaming music", "music,streaming", 0),
    ("www.distance-edu.in", "distance education programs", "education,distance", 0),
    ("www.sysparam.org", "system parameter registry", "system,parameter,registry", 8),
    ("www.physics.edu", "physics lectures for education", "physics,education,lectures", 3),
];

pub fn education_index() -> SearchIndex {
    let mut idx = SearchIndex::new();
    for (name, desc, kw, visits) in EDUCATION_LINKS {
        let id = idx.register_link(name, desc, kw).unwrap();
        for _ in 0..*visits {
            idx.record_visit(id).unwrap();
        }
    }
    idx
}

/// Full-scan query: for k = n down to 1, a link whose keyword overlap with
/// the query is at least k is assigned level k the first time it qualifies.
/// Returns (high frame ids, zero frame ids, total matches).
pub fn oracle_query(
    links: &[LinkRecord],
    analyzer: &Analyzer,
    text: &str,
    policy: ReplacementPolicy,
) -> (Vec<u64>, Vec<u64>, usize) {
    let q: BTreeSet<String> = analyzer.analyze(text).into_iter().collect();
    let mut levels: Vec<(&LinkRecord, usize)> = Vec::new();
    for k in (1..=q.len()).rev() {
        for link in links {
            if levels.iter().any(|(l, _)| l.id == link.id) {
                continue;
            }
            let overlap = link.keywords.iter().filter(|kw| q.contains(*kw)).count();
            if overlap >= k {
                levels.push((link, k));
            }
        }
    }
    let total = levels.len();
    let mut high: Vec<_> = levels.iter().filter(|(l, _)| l.visit_count > 0).collect();
    let mut zero: Vec<_> = levels.iter().filter(|(l, _)| l.visit_count == 0).collect();
    high.sort_by_key(|(l, k)| {
        let policy_key: i128 = match policy {
            ReplacementPolicy::Priority => -(l.visit_count as i128),
            ReplacementPolicy::Fifo => 0,
            ReplacementPolicy::Lru => -(l.last_visit_seq as i128),
        };
        (std::cmp::Reverse(*k), policy_key, l.registered_seq)
    });
    zero.sort_by_key(|(l, k)| (std::cmp::Reverse(*k), l.registered_seq));
    (
        high.iter().take(FRAME_CAPACITY).map(|(l, _)| l.id).collect(),
        zero.iter().map(|(l, _)| l.id).collect(),
        total,
    )
}

/// Random TF matrix from a synthetic corpus: each document draws words from
/// a K-word vocabulary, with a random length.
pub fn synthetic_tf(rng: &mut ChaCha8Rng, n: usize, k: usize) -> CorrelationMatrix {
    let mut d = Array2::zeros((n, k));
    for i in 0..n {
        let len = rng.gen_range(1..=3 * k);
        for _ in 0..len {
            d[[i, rng.gen_range(0..k)]] += 1.0;
        }
    }
    CorrelationMatrix::new(d).unwrap()
}

pub fn uniform_matrix(seed: u64, n: usize, k: usize) -> CorrelationMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CorrelationMatrix::new(Array2::from_shape_fn((n, k), |_| rng.gen_range(0.0..1.0))).unwrap()
}

/// Two topic blocks of five documents over disjoint five-word vocabularies.
pub fn block_diagonal() -> CorrelationMatrix {
    CorrelationMatrix::new(Array2::from_shape_fn((10, 10), |(i, j)| {
        if (i < 5) == (j < 5) {
            1.0 + ((i * 7 + j * 3) % 3) as f64
        } else {
            0.0
        }
    }))
    .unwrap()
}

/// Straight triple loop over the objective's two terms.
pub fn brute_force_objective(u: &Array2<f64>, v: &Array2<f64>, d: &Array2<f64>, t: f64) -> f64 {
    let (c_count, n) = u.dim();
    let k = v.ncols();
    let mut j = 0.0;
    for c in 0..c_count {
        for i in 0..n {
            for w in 0..k {
                let (a, b) = (u[[c, i]], v[[c, w]]);
                j += a * b * d[[i, w]] + t * ((a + b) - a * b).powi(2);
            }
        }
    }
    j
}

/// Documents built from tokens so that `tokenize` recovers them exactly.
pub fn docs_text(words: &[&str]) -> String {
    let s = words.join(" ");
    assert_eq!(tokenize(&s).len(), words.len());
    s
}

// Reference page-frame simulators: slots are replaced in place.

pub fn textbook_fifo(refs: &[u64], capacity: usize) -> Vec<Vec<u64>> {
    let mut slots: Vec<u64> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut states = Vec::new();
    for &p in refs {
        if !slots.contains(&p) {
            if slots.len() < capacity {
                queue.push_back(slots.len());
                slots.push(p);
            } else {
                let s = queue.pop_front().unwrap();
                slots[s] = p;
                queue.push_back(s);
            }
        }
        states.push(slots.clone());
    }
    states
}

pub fn textbook_lru(refs: &[u64], capacity: usize) -> Vec<Vec<u64>> {
    let mut slots: Vec<(u64, usize)> = Vec::new();
    let mut states = Vec::new();
    for (t, &p) in refs.iter().enumerate() {
        if let Some(s) = slots.iter_mut().find(|s| s.0 == p) {
            s.1 = t;
        } else if slots.len() < capacity {
            slots.push((p, t));
        } else {
            let victim = (0..slots.len()).min_by_key(|&i| slots[i].1).unwrap();
            slots[victim] = (p, t);
        }
        states.push(slots.iter().map(|s| s.0).collect());
    }
    states
}
