use std::collections::HashMap;
use std::hash::Hash;

/// An eventually periodic tail of a sequence: for every `i >= start`,
/// element `i` equals element `i + period` in the infinite continuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cycle {
    pub start: usize,
    pub period: usize,
}

impl Cycle {
    /// Detects a repeat of the last element. The period is the distance to
    /// its most recent earlier occurrence.
    pub fn detect<T: Eq>(items: &[T]) -> Option<Cycle> {
        let last = items.last()?;
        let n = items.len() - 1;
        (0..n).rev().find(|&i| items[i] == *last).map(|i| Cycle {
            start: i,
            period: n - i,
        })
    }

    /// Indices of one full period.
    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.period
    }

    /// Checks that `items` is consistent with this cycle wherever both
    /// indices are present.
    pub fn holds_on<T: Eq>(&self, items: &[T]) -> bool {
        self.period > 0
            && self.start + self.period < items.len()
            && (self.start..items.len() - self.period).all(|i| items[i] == items[i + self.period])
    }
}

/// Incremental repeat detector over hashable states.
#[derive(Debug)]
pub(crate) struct RepeatDetector<K> {
    seen: HashMap<K, usize>,
}

impl<K: Eq + Hash> RepeatDetector<K> {
    pub fn new() -> Self {
        RepeatDetector { seen: HashMap::new() }
    }

    /// Records `key` at `index`; returns the cycle if `key` was seen before.
    pub fn observe(&mut self, key: K, index: usize) -> Option<Cycle> {
        match self.seen.get(&key) {
            Some(&first) => Some(Cycle {
                start: first,
                period: index - first,
            }),
            None => {
                self.seen.insert(key, index);
                None
            }
        }
    }
}
