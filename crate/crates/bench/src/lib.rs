//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use beauville_core::{search, BeauvilleStructure, Group, GroupDescription, SearchOptions};

pub fn group(d: GroupDescription) -> Arc<Group> {
    Arc::new(Group::new(d).expect("valid group"))
}

pub fn metacyclic(p: u64, m: u32, n: u32, lambda: u64) -> Arc<Group> {
    group(GroupDescription::metacyclic(p, m, n, lambda))
}

/// The first structure found on `(Z/p)^2`, the base of every lift.
pub fn base_structure(p: u64) -> BeauvilleStructure {
    search(&metacyclic(p, 1, 1, 1), &SearchOptions::first_found())
        .expect("search runs")
        .first
        .expect("(Z/p)^2 admits a structure for p >= 5")
}
