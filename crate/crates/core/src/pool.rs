//! The densest reserved set `R_s` with its least-dense marker.
//!
//! Entries are kept sorted by density (descending), then arrival (ascending),
//! so the last entry is always the least dense one. Among equal densities the
//! later arrival counts as less dense and is evicted first.

use std::cmp::Ordering;

use crate::model::Item;
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Entry {
    density: Rat,
    item: Item,
}

fn order(a: &Entry, b: &Entry) -> Ordering {
    b.density.cmp(&a.density).then(a.item.arrival.cmp(&b.item.arrival))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pool {
    entries: Vec<Entry>,
    total_size: Rat,
    evicted: Vec<Item>,
}

impl Pool {
    pub fn new() -> Pool {
        Pool::default()
    }

    /// Adds `item`, then evicts least-dense entries one at a time while the
    /// remainder without the least-dense entry still has size at least 1.
    pub fn insert(&mut self, item: Item) {
        let entry = Entry { density: item.density(), item };
        let pos = self
            .entries
            .binary_search_by(|probe| order(probe, &entry))
            .unwrap_or_else(|p| p);
        self.total_size += &entry.item.size;
        self.entries.insert(pos, entry);

        let one = Rat::one();
        while let Some(least) = self.entries.last() {
            if &self.total_size - &least.item.size >= one {
                let gone = self.entries.pop().expect("nonempty");
                self.total_size -= &gone.item.size;
                self.evicted.push(gone.item);
            } else {
                break;
            }
        }
    }

    /// Density of the least dense entry, 0 for an empty pool.
    pub fn d_delta(&self) -> Rat {
        self.entries.last().map(|e| e.density.clone()).unwrap_or_else(Rat::zero)
    }

    pub fn least_dense(&self) -> Option<&Item> {
        self.entries.last().map(|e| &e.item)
    }

    pub fn size(&self) -> &Rat {
        &self.total_size
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries from densest to least dense.
    pub fn entries(&self) -> impl Iterator<Item = &Item> + '_ {
        self.entries.iter().map(|e| &e.item)
    }

    /// Entries paired with their cached densities.
    pub fn entries_with_density(&self) -> impl Iterator<Item = (&Item, &Rat)> + '_ {
        self.entries.iter().map(|e| (&e.item, &e.density))
    }

    /// Items trimmed out of the pool, in eviction order. They stay reserved.
    pub fn evicted(&self) -> &[Item] {
        &self.evicted
    }

    /// Everything ever inserted: entries followed by evicted items.
    pub fn all_reserved(&self) -> Vec<Item> {
        self.entries().chain(self.evicted.iter()).cloned().collect()
    }

    pub fn value(&self) -> Rat {
        self.entries().map(|x| &x.value).sum()
    }
}

pub fn d_delta(pool: &Pool) -> Rat {
    pool.d_delta()
}

pub fn pool_size(pool: &Pool) -> Rat {
    pool.size().clone()
}
