//! Two-class replay memory. Transitions with a positive shaped reward form
//! their own class so they can be drawn at a fixed minimum rate.

use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Priority {
    Positive,
    Ordinary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayEntry {
    pub obs: Vec<u32>,
    pub action: usize,
    pub r_total: f64,
    pub next_obs: Vec<u32>,
    pub done: bool,
}

impl ReplayEntry {
    pub fn priority(&self) -> Priority {
        if self.r_total > 0.0 {
            Priority::Positive
        } else {
            Priority::Ordinary
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    positive: VecDeque<ReplayEntry>,
    ordinary: VecDeque<ReplayEntry>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            capacity,
            positive: VecDeque::new(),
            ordinary: VecDeque::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.ordinary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn class_len(&self, p: Priority) -> usize {
        self.class(p).len()
    }

    pub fn class(&self, p: Priority) -> &VecDeque<ReplayEntry> {
        match p {
            Priority::Positive => &self.positive,
            Priority::Ordinary => &self.ordinary,
        }
    }

    /// Appends to the entry's class, then evicts the oldest entry of the
    /// larger class while over capacity (ties evict ordinary).
    pub fn push(&mut self, entry: ReplayEntry) {
        match entry.priority() {
            Priority::Positive => self.positive.push_back(entry),
            Priority::Ordinary => self.ordinary.push_back(entry),
        }
        while self.len() > self.capacity {
            if self.positive.len() > self.ordinary.len() {
                self.positive.pop_front();
            } else {
                self.ordinary.pop_front();
            }
        }
    }

    /// Draws `batch` entries: `ceil(rho * batch)` from the positive class and
    /// the rest from the ordinary class. A class holding at least its quota
    /// is sampled without replacement, a smaller one with replacement. An
    /// empty class hands its quota to the other.
    pub fn sample<R: Rng + ?Sized>(&self, batch: usize, rho: f64, rng: &mut R) -> Vec<&ReplayEntry> {
        assert!(!self.is_empty(), "sample from empty replay buffer");
        let mut pos_quota = ((rho * batch as f64).ceil() as usize).min(batch);
        if self.positive.is_empty() {
            pos_quota = 0;
        } else if self.ordinary.is_empty() {
            pos_quota = batch;
        }
        let mut out = Vec::with_capacity(batch);
        draw(&self.positive, pos_quota, rng, &mut out);
        draw(&self.ordinary, batch - pos_quota, rng, &mut out);
        out
    }
}

fn draw<'a, R: Rng + ?Sized>(
    class: &'a VecDeque<ReplayEntry>,
    n: usize,
    rng: &mut R,
    out: &mut Vec<&'a ReplayEntry>,
) {
    if n == 0 {
        return;
    }
    if class.len() >= n {
        out.extend(index::sample(rng, class.len(), n).into_iter().map(|i| &class[i]));
    } else {
        out.extend((0..n).map(|_| &class[rng.random_range(0..class.len())]));
    }
}
