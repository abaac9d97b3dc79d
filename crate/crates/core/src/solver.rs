//! Exact offline 0/1 knapsack.
//!
//! Sizes are rationals with unbounded denominators, so the solver is a
//! depth-first branch-and-bound over items sorted by density, bounded by the
//! fractional (Dantzig) relaxation. Among optimal sets the one whose sorted
//! arrival indices are lexicographically smallest wins, in both the search
//! and the brute-force oracle.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::Item;
use crate::rat::Rat;

pub const BRUTE_FORCE_MAX: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// Chosen items in arrival order.
    pub chosen: Vec<Item>,
    pub total_value: Rat,
    pub total_size: Rat,
}

impl Solution {
    fn from_items(mut chosen: Vec<Item>) -> Solution {
        chosen.sort_by_key(|x| x.arrival);
        let total_value = chosen.iter().map(|x| &x.value).sum();
        let total_size = chosen.iter().map(|x| &x.size).sum();
        Solution { chosen, total_value, total_size }
    }

    pub fn arrivals(&self) -> Vec<usize> {
        self.chosen.iter().map(|x| x.arrival).collect()
    }
}

struct Candidate {
    item: Item,
    density: Rat,
}

fn sorted_candidates(items: &[Item], capacity: &Rat) -> Vec<Candidate> {
    let mut cands: Vec<Candidate> = items
        .iter()
        .filter(|x| &x.size <= capacity)
        .map(|x| Candidate { density: x.density(), item: x.clone() })
        .collect();
    cands.sort_by(|a, b| b.density.cmp(&a.density).then(a.item.arrival.cmp(&b.item.arrival)));
    cands
}

fn fractional_fill(cands: &[Candidate], room: &Rat) -> Rat {
    let mut room = room.clone();
    let mut acc = Rat::zero();
    for c in cands {
        if room.is_zero() {
            break;
        }
        if c.item.size <= room {
            acc += &c.item.value;
            room -= &c.item.size;
        } else {
            acc += &c.density * &room;
            break;
        }
    }
    acc
}

/// Value of the fractional relaxation: whole items by decreasing density,
/// then a fraction of the first item that does not fit.
pub fn fractional_bound(items: &[Item], capacity: &Rat) -> Rat {
    fractional_fill(&sorted_candidates(items, capacity), capacity)
}

struct Search {
    cands: Vec<Candidate>,
    suffix_min: Vec<Rat>,
    residual: Rat,
    value: Rat,
    taken: Vec<usize>,
    best_value: Rat,
    best_set: Vec<usize>,
}

impl Search {
    fn leaf(&mut self) {
        match self.value.cmp(&self.best_value) {
            Ordering::Less => {}
            Ordering::Greater => {
                self.best_value = self.value.clone();
                self.best_set = self.current_arrivals();
            }
            Ordering::Equal => {
                let set = self.current_arrivals();
                if set < self.best_set {
                    self.best_set = set;
                }
            }
        }
    }

    fn current_arrivals(&self) -> Vec<usize> {
        let mut set: Vec<usize> = self.taken.iter().map(|&p| self.cands[p].item.arrival).collect();
        set.sort_unstable();
        set
    }

    fn dfs(&mut self, mut pos: usize) {
        let n = self.cands.len();
        loop {
            if pos == n || self.suffix_min[pos] > self.residual {
                self.leaf();
                return;
            }
            while self.cands[pos].item.size > self.residual {
                pos += 1;
            }
            let bound = &self.value + fractional_fill(&self.cands[pos..], &self.residual);
            // Equal bounds are explored: they may hold a lexicographically smaller optimum.
            if bound < self.best_value {
                return;
            }
            self.residual -= &self.cands[pos].item.size;
            self.value += &self.cands[pos].item.value;
            self.taken.push(pos);
            self.dfs(pos + 1);
            self.taken.pop();
            self.residual += &self.cands[pos].item.size;
            self.value -= &self.cands[pos].item.value;
            pos += 1;
        }
    }
}

/// Maximum-value subset of `items` with total size at most `capacity`.
///
/// Arrival indices are assumed distinct; they drive the tie-break.
pub fn optimal_packing(items: &[Item], capacity: &Rat) -> Solution {
    if capacity.is_negative() {
        return Solution::from_items(Vec::new());
    }
    let cands = sorted_candidates(items, capacity);
    let mut suffix_min = vec![Rat::zero(); cands.len()];
    for i in (0..cands.len()).rev() {
        suffix_min[i] = match suffix_min.get(i + 1) {
            Some(next) if i + 1 < cands.len() => next.clone().min(cands[i].item.size.clone()),
            _ => cands[i].item.size.clone(),
        };
    }
    let mut search = Search {
        cands,
        suffix_min,
        residual: capacity.clone(),
        value: Rat::zero(),
        taken: Vec::new(),
        best_value: Rat::zero(),
        best_set: Vec::new(),
    };
    search.dfs(0);
    let chosen = search
        .best_set
        .iter()
        .map(|&a| {
            search
                .cands
                .iter()
                .find(|c| c.item.arrival == a)
                .map(|c| c.item.clone())
                .expect("chosen arrival is a candidate")
        })
        .collect();
    Solution::from_items(chosen)
}

/// `a` precedes `b` when their sorted index sequences compare lexicographically
/// smaller (a proper prefix is smaller). Bit `i` stands for the `i`-th item in
/// arrival order.
fn mask_lex_less(a: u32, b: u32) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let low = diff.trailing_zeros();
    let above = if low >= 31 { 0 } else { u32::MAX << (low + 1) };
    if a & (1 << low) != 0 {
        // `a` has the smaller element at the first difference unless `b` ended there.
        b & above != 0
    } else {
        a & above == 0
    }
}

/// Exhaustive enumeration of every subset, for `items.len() <= 20`.
pub fn brute_force(items: &[Item], capacity: &Rat) -> Result<Solution> {
    let n = items.len();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge { n, max: BRUTE_FORCE_MAX });
    }
    let mut sorted: Vec<&Item> = items.iter().collect();
    sorted.sort_by_key(|x| x.arrival);

    let mut mask: u32 = 0;
    let mut size = Rat::zero();
    let mut value = Rat::zero();
    let mut best_mask: u32 = 0;
    let mut best_value = Rat::zero();
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros();
        let x = sorted[bit as usize];
        if mask & (1 << bit) == 0 {
            size += &x.size;
            value += &x.value;
        } else {
            size -= &x.size;
            value -= &x.value;
        }
        mask ^= 1 << bit;
        if &size > capacity {
            continue;
        }
        match value.cmp(&best_value) {
            Ordering::Greater => {
                best_value = value.clone();
                best_mask = mask;
            }
            Ordering::Equal if mask_lex_less(mask, best_mask) => best_mask = mask,
            _ => {}
        }
    }
    let chosen = (0..n).filter(|i| best_mask & (1 << i) != 0).map(|i| sorted[i].clone()).collect();
    Ok(Solution::from_items(chosen))
}
