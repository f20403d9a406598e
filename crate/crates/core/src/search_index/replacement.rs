//! Fixed-capacity frame set with FIFO, LRU and visit-count priority replacement.

use super::{LinkRecord, ReplacementPolicy, FRAME_CAPACITY};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSlot {
    pub id: u64,
    pub registered_seq: u64,
    pub last_visit_seq: u64,
    pub visit_count: u64,
    /// Order in which the page entered this frame set.
    pub admitted_seq: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replacement {
    /// Already present; its counters were refreshed in place.
    Hit,
    /// Placed in a free frame.
    Inserted,
    /// Replaced the page with this id.
    Evicted(u64),
    /// Not admitted (priority policy, incoming not above the victim).
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameState {
    slots: Vec<FrameSlot>,
    capacity: usize,
    admissions: u64,
}

impl Default for FrameState {
    fn default() -> Self {
        Self::new(FRAME_CAPACITY)
    }
}

impl FrameState {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "frame capacity must be positive");
        Self {
            slots: Vec::with_capacity(capacity),
            capacity,
            admissions: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.slots.len() >= self.capacity
    }

    pub fn slots(&self) -> &[FrameSlot] {
        &self.slots
    }

    /// Page ids in frame order.
    pub fn ids(&self) -> Vec<u64> {
        self.slots.iter().map(|s| s.id).collect()
    }

    fn slot_for(&mut self, link: &LinkRecord) -> FrameSlot {
        self.admissions += 1;
        FrameSlot {
            id: link.id,
            registered_seq: link.registered_seq,
            last_visit_seq: link.last_visit_seq,
            visit_count: link.visit_count,
            admitted_seq: self.admissions,
        }
    }

    fn victim(&self, policy: ReplacementPolicy) -> usize {
        let key = |s: &FrameSlot| match policy {
            ReplacementPolicy::Fifo => (s.admitted_seq, s.registered_seq),
            ReplacementPolicy::Lru => (s.last_visit_seq, s.registered_seq),
            ReplacementPolicy::Priority => (s.visit_count, s.registered_seq),
        };
        (0..self.slots.len())
            .min_by_key(|&i| key(&self.slots[i]))
            .expect("victim requested from an empty frame set")
    }

    /// Offers `incoming` to the frame set under `policy`.
    pub fn offer(&mut self, incoming: &LinkRecord, policy: ReplacementPolicy) -> Replacement {
        if let Some(slot) = self.slots.iter_mut().find(|s| s.id == incoming.id) {
            slot.visit_count = incoming.visit_count;
            slot.last_visit_seq = incoming.last_visit_seq;
            return Replacement::Hit;
        }
        if !self.is_full() {
            let slot = self.slot_for(incoming);
            self.slots.push(slot);
            return Replacement::Inserted;
        }
        let v = self.victim(policy);
        if policy == ReplacementPolicy::Priority && incoming.visit_count <= self.slots[v].visit_count {
            return Replacement::Rejected;
        }
        let evicted = self.slots[v].id;
        self.slots[v] = self.slot_for(incoming);
        Replacement::Evicted(evicted)
    }
}

/// Functional form of [`FrameState::offer`].
pub fn apply_replacement(
    state: &FrameState,
    incoming: &LinkRecord,
    policy: ReplacementPolicy,
) -> FrameState {
    let mut next = state.clone();
    next.offer(incoming, policy);
    next
}
