mod common;

use coclust::search_index::{
    FrameState, LinkRecord, Replacement, ReplacementPolicy, SearchIndex, FRAME_CAPACITY,
};
use common::{education_index, oracle_query, textbook_fifo, textbook_lru, EDUCATION_QUERY};
use proptest::prelude::*;

const POLICIES: [ReplacementPolicy; 3] = [
    ReplacementPolicy::Priority,
    ReplacementPolicy::Fifo,
    ReplacementPolicy::Lru,
];

fn links(idx: &SearchIndex) -> Vec<LinkRecord> {
    idx.links().cloned().collect()
}

fn check_against_oracle(idx: &SearchIndex, text: &str, policy: ReplacementPolicy) {
    let r = idx.query(text, policy);
    let (high, zero, total) = oracle_query(&links(idx), idx.analyzer(), text, policy);
    assert_eq!(r.high_frames.iter().map(|e| e.id).collect::<Vec<_>>(), high, "{policy}");
    assert_eq!(r.zero_frame.iter().map(|e| e.id).collect::<Vec<_>>(), zero, "{policy}");
    assert_eq!(r.total_matches, total);
}

#[test]
fn education_fixture_has_eighteen_matches() {
    let idx = education_index();
    for policy in POLICIES {
        let r = idx.query(EDUCATION_QUERY, policy);
        assert_eq!(r.total_matches, 18);
        assert_eq!(r.high_frames.len(), FRAME_CAPACITY);
        assert_eq!(r.zero_frame.len(), 7);
        assert!(r.zero_frame.iter().all(|e| e.visit_count == 0));
        check_against_oracle(&idx, EDUCATION_QUERY, policy);
    }
    let r = idx.query(EDUCATION_QUERY, ReplacementPolicy::Priority);
    let names: Vec<&str> = r.high_frames.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(
        names,
        ["www.education.ac.in", "www.edu-policy.in", "www.sysparam.org", "www.schoolboard.gov", "www.edu-stats.in"]
    );
}

#[test]
fn seven_matches_keep_top_five_by_visits() {
    let mut idx = SearchIndex::new();
    let visits = [4u64, 9, 1, 7, 3, 12, 6];
    let ids: Vec<u64> = visits
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let id = idx.register_link(&format!("p{i}"), "", "alpha").unwrap();
            for _ in 0..n {
                idx.record_visit(id).unwrap();
            }
            id
        })
        .collect();
    idx.register_link("other", "", "beta").unwrap();
    let r = idx.query("alpha", ReplacementPolicy::Priority);
    assert_eq!(r.total_matches, 7);
    let got: Vec<u64> = r.high_frames.iter().map(|e| e.id).collect();
    assert_eq!(got, [ids[5], ids[1], ids[3], ids[6], ids[0]]);
    assert!(r.zero_frame.is_empty());
    check_against_oracle(&idx, "alpha", ReplacementPolicy::Priority);
}

#[test]
fn visits_are_visible_to_the_next_query() {
    let mut idx = education_index();
    let zero_id = idx.query(EDUCATION_QUERY, ReplacementPolicy::Priority).zero_frame[0].id;
    for _ in 0..100 {
        idx.record_visit(zero_id).unwrap();
    }
    let r = idx.query(EDUCATION_QUERY, ReplacementPolicy::Priority);
    assert_eq!(r.high_frames[0].id, zero_id);
    assert_eq!(r.high_frames[0].visit_count, 100);
    assert_eq!(r.zero_frame.len(), 6);
}

fn full_ranking(idx: &SearchIndex, text: &str) -> Vec<u64> {
    (0..)
        .map(|p| idx.query_page(text, ReplacementPolicy::Priority, p).high_frames)
        .take_while(|f| !f.is_empty())
        .flatten()
        .map(|e| e.id)
        .collect()
}

fn replay(refs: &[u64], policy: ReplacementPolicy) -> Vec<Vec<u64>> {
    let mut idx = SearchIndex::new();
    for p in 1..=refs.iter().copied().max().unwrap() {
        assert_eq!(idx.register_link(&format!("page{p}"), "", "k").unwrap(), p);
    }
    let mut frames = FrameState::default();
    refs.iter()
        .map(|&p| {
            idx.record_visit(p).unwrap();
            frames.offer(idx.get(p).unwrap(), policy);
            frames.ids()
        })
        .collect()
}

#[test]
fn fifo_and_lru_follow_reference_simulators() {
    let scripts: [&[u64]; 3] = [
        &[1, 2, 3, 4, 5, 6, 1, 2, 7, 3],
        &[1, 2, 3, 4, 5, 1, 6, 2, 7, 3],
        &[7, 1, 2, 1, 3, 1, 4, 2, 3, 5, 6, 7, 1, 2],
    ];
    for refs in scripts {
        assert_eq!(replay(refs, ReplacementPolicy::Fifo), textbook_fifo(refs, FRAME_CAPACITY), "{refs:?}");
        assert_eq!(replay(refs, ReplacementPolicy::Lru), textbook_lru(refs, FRAME_CAPACITY), "{refs:?}");
    }
}

#[test]
fn replacement_is_deterministic() {
    let refs = [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7];
    for policy in POLICIES {
        assert_eq!(replay(&refs, policy), replay(&refs, policy));
    }
}

#[test]
fn priority_frames_hold_the_most_visited_pages() {
    let mut idx = SearchIndex::new();
    let visits = [3u64, 0, 8, 1, 5, 0, 9, 2, 7];
    let mut frames = FrameState::default();
    for (i, &n) in visits.iter().enumerate() {
        let id = idx.register_link(&format!("p{i}"), "", "k").unwrap();
        for _ in 0..n {
            idx.record_visit(id).unwrap();
        }
        let outcome = frames.offer(idx.get(id).unwrap(), ReplacementPolicy::Priority);
        if n == 0 && i >= FRAME_CAPACITY {
            assert_eq!(outcome, Replacement::Rejected);
        }
    }
    let mut held: Vec<u64> = frames.slots().iter().map(|s| s.visit_count).collect();
    held.sort_unstable();
    assert_eq!(held, [3, 5, 7, 8, 9]);
}

proptest! {
    #[test]
    fn query_matches_full_scan_oracle(
        specs in prop::collection::vec(
            (prop::collection::btree_set(0usize..8, 1..4), 0u64..4),
            0..50,
        ),
        query in prop::collection::btree_set(0usize..8, 0..5),
        visit_order in prop::collection::vec(0usize..50, 0..40),
    ) {
        const WORDS: [&str; 8] = ["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"];
        let mut idx = SearchIndex::new();
        let mut ids = Vec::new();
        for (kw, visits) in &specs {
            let kws: Vec<&str> = kw.iter().map(|&w| WORDS[w]).collect();
            let id = idx.register_link("n", "d", &kws.join(",")).unwrap();
            for _ in 0..*visits {
                idx.record_visit(id).unwrap();
            }
            ids.push(id);
        }
        for &v in &visit_order {
            if let Some(&id) = ids.get(v) {
                idx.record_visit(id).unwrap();
            }
        }
        let text: Vec<&str> = query.iter().map(|&w| WORDS[w]).collect();
        let text = text.join(" ");
        for policy in POLICIES {
            let r = idx.query(&text, policy);
            let (high, zero, total) = oracle_query(&links(&idx), idx.analyzer(), &text, policy);
            prop_assert_eq!(r.high_frames.iter().map(|e| e.id).collect::<Vec<_>>(), high);
            prop_assert_eq!(r.zero_frame.iter().map(|e| e.id).collect::<Vec<_>>(), zero);
            prop_assert_eq!(r.total_matches, total);
            prop_assert!(r.high_frames.len() <= FRAME_CAPACITY);
            prop_assert!(r.high_frames.iter().all(|e| e.visit_count > 0));
            prop_assert!(r.zero_frame.iter().all(|e| e.visit_count == 0));
            prop_assert!(r.high_frames.iter().all(|h| r.zero_frame.iter().all(|z| z.id != h.id)));
        }
    }

    #[test]
    fn more_visits_never_lower_priority_rank(
        visits in prop::collection::vec(0u64..6, 2..15),
        target in 0usize..15,
        extra in 1u64..5,
    ) {
        let target = target % visits.len();
        let mut idx = SearchIndex::new();
        let ids: Vec<u64> = visits.iter().map(|&n| {
            let id = idx.register_link("n", "", "k").unwrap();
            for _ in 0..n {
                idx.record_visit(id).unwrap();
            }
            id
        }).collect();
        let before = full_ranking(&idx, "k");
        for _ in 0..extra {
            idx.record_visit(ids[target]).unwrap();
        }
        let after = full_ranking(&idx, "k");
        let pos_after = after.iter().position(|&x| x == ids[target]).unwrap();
        if let Some(pos_before) = before.iter().position(|&x| x == ids[target]) {
            prop_assert!(pos_after <= pos_before);
        }
    }
}
