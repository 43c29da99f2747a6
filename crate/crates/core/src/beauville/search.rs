//! Exhaustive and first-found search.
//!
//! Condition 3 fails for a pair of triples exactly when some nontrivial power `x^i` is
//! conjugate to a power `b^j`. Raising both to a suitable further power produces conjugate
//! elements of prime order, so the pair fails exactly when the two triples share a
//! conjugacy class of subgroups of prime order. Each generating triple is therefore reduced
//! to a *key*: the labels of the prime-order subgroups of `⟨x⟩`, `⟨y⟩`, `⟨z⟩` up to
//! conjugacy, where a subgroup's label is the least class id among its nontrivial elements.
//! Two conjugate subgroups share every class and hence the label; two non-conjugate ones of
//! prime order share no class at all. Pairs of triples are then counted on pairs of keys.
//!
//! Every structure the search reports is re-checked by [`verify`](super::verify).

use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::arith::{mul_mod, pow_mod, prime_divisors};
use crate::error::{Error, Result};
use crate::group::{ClassId, Element, Group};

use super::{verify, BeauvilleStructure, Triple};

type Key = SmallVec<[ClassId; 4]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Count every structure and list the first `limit` of them.
    Exhaustive,
    /// Report only the lexicographically least structure.
    FirstFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Work units: pairs `(x, y)` examined plus sub-keys visited while counting.
    pub candidates: u64,
    pub wall_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            candidates: 1_000_000_000,
            wall_time: Duration::from_secs(600),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub mode: SearchMode,
    pub budget: Budget,
    /// How many structures an exhaustive search materializes.
    pub limit: usize,
    /// `1` runs the serial reference path; anything else uses the current rayon pool.
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            mode: SearchMode::Exhaustive,
            budget: Budget::default(),
            limit: 0,
            threads: 0,
        }
    }
}

impl SearchOptions {
    pub fn exhaustive() -> Self {
        SearchOptions::default()
    }

    pub fn first_found() -> Self {
        SearchOptions {
            mode: SearchMode::FirstFound,
            ..SearchOptions::default()
        }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub mode: SearchMode,
    /// Whether the whole space was scanned. When false the count is a lower bound.
    pub exhaustive: bool,
    /// Ordered pairs of ordered generating triples satisfying condition 3.
    pub count: u64,
    pub generating_triples: u64,
    /// The lexicographically least structure (least among the scanned part otherwise).
    pub first: Option<BeauvilleStructure>,
    /// Exhaustive mode: the first `limit` structures in lexicographic order.
    pub structures: Vec<BeauvilleStructure>,
    pub candidates: u64,
    pub elapsed: Duration,
    pub stop_reason: Option<String>,
}

impl SearchOutcome {
    /// `Some(true)` or `Some(false)` when the answer is certain, `None` otherwise.
    pub fn exists(&self) -> Option<bool> {
        if self.count > 0 {
            Some(true)
        } else if self.exhaustive {
            Some(false)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
struct KeyStats {
    key: Key,
    count: u64,
    first: Triple,
}

/// Per-element data the scan needs: inverses, Frattini lines and prime-subgroup labels.
struct ElementData {
    labels: Vec<SmallVec<[ClassId; 2]>>,
    inverse: Vec<Element>,
    generation: Generation,
}

/// Marks elements lying in the Frattini subgroup.
const IN_FRATTINI: u32 = u32::MAX;

enum Generation {
    /// For each element, the line of `G/Φ(G)` through its image when that quotient has
    /// rank at most two. Two elements generate exactly when their lines are distinct, or
    /// in rank one when either line exists.
    Frattini { rank: usize, line: Vec<u32> },
    /// `⟨x, y⟩` only depends on `⟨y⟩`, so closures are shared by elements with the same
    /// least generator of their cyclic subgroup.
    Closure { cyclic: Vec<Element> },
    /// `G/Φ(G)` has rank above two, so no pair generates.
    Never,
}

/// Index of the line through `(u, v)` in `F_p²`: `0` for `(0, *)`, `1 + v/u` otherwise.
fn projective_line(p: u64, [u, v]: [u64; 2]) -> u32 {
    if u == 0 && v == 0 {
        IN_FRATTINI
    } else if u == 0 {
        0
    } else {
        (1 + mul_mod(v, pow_mod(u, p - 2, p), p)) as u32
    }
}

impl ElementData {
    fn new(group: &Group) -> ElementData {
        let labels = group
            .elements()
            .map(|g| prime_subgroup_labels(group, g))
            .collect();
        let inverse = group.elements().map(|g| group.inv(g)).collect();
        let generation = match (group.prime(), group.frattini_rank()) {
            (Some(p), Ok(rank)) if rank <= 2 => Generation::Frattini {
                rank,
                line: group
                    .elements()
                    .map(|g| {
                        let c = group.frattini_coords(g).expect("frattini data");
                        let u = [
                            c.first().copied().unwrap_or(0),
                            c.get(1).copied().unwrap_or(0),
                        ];
                        projective_line(p, u)
                    })
                    .collect(),
            },
            (Some(_), Ok(_)) => Generation::Never,
            _ => Generation::Closure {
                cyclic: group
                    .elements()
                    .map(|g| least_generator(group, g))
                    .collect(),
            },
        };
        ElementData {
            labels,
            inverse,
            generation,
        }
    }

    /// Generation test for a pair. `memo` caches closures for the current `x` and must be
    /// reset between rows.
    fn generates(&self, group: &Group, x: Element, y: Element, memo: &mut RowMemo) -> bool {
        match &self.generation {
            Generation::Frattini { rank, line } => {
                let (u, v) = (line[x.0 as usize], line[y.0 as usize]);
                match rank {
                    0 => true,
                    1 => u != IN_FRATTINI || v != IN_FRATTINI,
                    _ => u != IN_FRATTINI && v != IN_FRATTINI && u != v,
                }
            }
            Generation::Closure { cyclic } => {
                let c = cyclic[y.0 as usize];
                let slot = &mut memo.0[c.0 as usize];
                if *slot == 0 {
                    *slot = 1 + u8::from(group.generates(&[x, c]));
                }
                *slot == 2
            }
            Generation::Never => false,
        }
    }

    fn key(&self, t: &Triple) -> Key {
        let mut key: Key = t
            .elements()
            .iter()
            .flat_map(|g| self.labels[g.0 as usize].iter().copied())
            .collect();
        key.sort_unstable();
        key.dedup();
        key
    }
}

/// Closure results for one row, `0` meaning not yet computed.
struct RowMemo(Vec<u8>);

impl RowMemo {
    fn new(data: &ElementData, order: u64) -> RowMemo {
        match data.generation {
            Generation::Closure { .. } => RowMemo(vec![0; order as usize]),
            _ => RowMemo(Vec::new()),
        }
    }
}

/// Least element generating the same cyclic subgroup as `g`.
fn least_generator(group: &Group, g: Element) -> Element {
    let order = group.element_order(g);
    let mut best = g;
    let mut power = g;
    for k in 2..order {
        power = group.mul(power, g);
        if num_integer::gcd(k, order) == 1 {
            best = best.min(power);
        }
    }
    best
}

/// Labels of the subgroups of prime order inside `⟨g⟩`.
fn prime_subgroup_labels(group: &Group, g: Element) -> SmallVec<[ClassId; 2]> {
    let order = group.element_order(g);
    prime_divisors(order)
        .into_iter()
        .map(|q| {
            let s = group.pow(g, order / q);
            let mut power = s;
            let mut label = group.class_id(s);
            for _ in 2..q {
                power = group.mul(power, s);
                label = label.min(group.class_id(power));
            }
            label
        })
        .collect()
}

// An empty key only arises in the trivial group, where condition 3 is taken to fail.
fn disjoint(a: &[ClassId], b: &[ClassId]) -> bool {
    !a.is_empty() && !b.is_empty() && !a.iter().any(|c| b.contains(c))
}

/// Nonempty sub-keys of a sorted key, with the parity of their size.
fn subkeys(key: &[ClassId]) -> impl Iterator<Item = (Key, bool)> + '_ {
    (1u32..1 << key.len()).map(move |mask| {
        let sub: Key = key
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        (sub, mask.count_ones() % 2 == 1)
    })
}

/// Generating triples `(x, y, (xy)^{-1})` grouped by key.
pub struct TripleCatalog {
    group: Arc<Group>,
    data: ElementData,
    keys: Vec<KeyStats>,
    /// `partner_weight[i]` is the number of generating triples whose key is disjoint from
    /// key `i`. Only meaningful when `counted` is set.
    partner_weight: Vec<u64>,
    counted: bool,
    rows_scanned: u64,
    complete: bool,
    stop_reason: Option<String>,
    candidates: u64,
}

impl TripleCatalog {
    /// Scans all pairs `(x, y)` within the budget.
    pub fn build(group: &Arc<Group>, budget: &Budget, threads: usize) -> TripleCatalog {
        let start = Instant::now();
        let deadline = start + budget.wall_time;
        let n = group.order();
        let data = ElementData::new(group);

        let row_cap = (budget.candidates / n.max(1)).min(n);
        let scan_row = |x: u64| -> Option<Vec<KeyStats>> {
            if Instant::now() > deadline {
                return None;
            }
            let x = Element(x);
            let row = group.left_row(x);
            let mut local: FxHashMap<Key, usize> = FxHashMap::default();
            let mut stats: Vec<KeyStats> = Vec::new();
            let mut memo = RowMemo::new(&data, n);
            for (y, xy) in group.elements().zip(row) {
                if !data.generates(group, x, y, &mut memo) {
                    continue;
                }
                let t = Triple::new(x, y, data.inverse[xy.0 as usize]);
                let key = data.key(&t);
                match local.get(&key) {
                    Some(&i) => stats[i].count += 1,
                    None => {
                        local.insert(key.clone(), stats.len());
                        stats.push(KeyStats {
                            key,
                            count: 1,
                            first: t,
                        });
                    }
                }
            }
            Some(stats)
        };
        let rows: Vec<Option<Vec<KeyStats>>> = if threads == 1 {
            (0..row_cap).map(scan_row).collect()
        } else {
            (0..row_cap).into_par_iter().map(scan_row).collect()
        };

        // rows arrive in order, so the first triple recorded for a key is its least
        let mut index: FxHashMap<Key, usize> = FxHashMap::default();
        let mut keys: Vec<KeyStats> = Vec::new();
        let mut scanned = 0u64;
        for row in rows.into_iter().map_while(|r| r) {
            scanned += 1;
            for s in row {
                match index.get(&s.key) {
                    Some(&i) => keys[i].count += s.count,
                    None => {
                        index.insert(s.key.clone(), keys.len());
                        keys.push(s);
                    }
                }
            }
        }
        let mut candidates = scanned * n;
        let timed_out = scanned < row_cap;

        // Inclusion-exclusion over shared labels: with W(S) the number of triples whose key
        // contains S, the triples meeting key L number sum over nonempty S ⊆ L of
        // (-1)^(|S|+1) W(S).
        let subset_work: u64 = keys.iter().map(|k| 2u64 << k.key.len()).sum();
        let counted = !timed_out && candidates + subset_work <= budget.candidates;
        let mut partner_weight = vec![0u64; keys.len()];
        if counted {
            let total: u64 = keys.iter().map(|k| k.count).sum();
            let mut containing: FxHashMap<Key, u64> = FxHashMap::default();
            for k in &keys {
                for (sub, _) in subkeys(&k.key) {
                    *containing.entry(sub).or_default() += k.count;
                }
            }
            for (w, k) in partner_weight.iter_mut().zip(&keys) {
                let meeting: i128 = subkeys(&k.key)
                    .map(|(sub, odd)| {
                        let c = containing[&sub] as i128;
                        if odd {
                            c
                        } else {
                            -c
                        }
                    })
                    .sum();
                if !k.key.is_empty() {
                    *w = (total as i128 - meeting) as u64;
                }
            }
            candidates += subset_work;
        }
        let stop_reason = if timed_out || Instant::now() > deadline {
            Some(format!(
                "wall-time budget of {:?} exhausted",
                budget.wall_time
            ))
        } else if row_cap < n || !counted {
            Some(format!(
                "candidate budget of {} exhausted",
                budget.candidates
            ))
        } else {
            None
        };
        TripleCatalog {
            group: Arc::clone(group),
            data,
            keys,
            partner_weight,
            counted,
            rows_scanned: scanned,
            complete: stop_reason.is_none(),
            stop_reason,
            candidates,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn rows_scanned(&self) -> u64 {
        self.rows_scanned
    }

    pub fn generating_triples(&self) -> u64 {
        self.keys.iter().map(|k| k.count).sum()
    }

    /// Number of distinct keys.
    pub fn key_count(&self) -> usize {
        self.keys.len()
    }

    /// Pairs satisfying all three conditions among the triples scanned. Zero when the
    /// budget ran out before pairs could be counted.
    pub fn structure_count(&self) -> u64 {
        self.keys
            .iter()
            .zip(&self.partner_weight)
            .map(|(k, w)| k.count * w)
            .sum()
    }

    fn has_partner(&self, i: usize) -> bool {
        if self.counted {
            self.partner_weight[i] > 0
        } else {
            self.keys
                .iter()
                .any(|k| disjoint(&self.keys[i].key, &k.key))
        }
    }

    /// The lexicographically least pair `(T1, T2)` satisfying all three conditions.
    pub fn first_pair(&self) -> Option<(Triple, Triple)> {
        let mut order: Vec<usize> = (0..self.keys.len()).collect();
        order.sort_unstable_by_key(|&i| self.keys[i].first);
        let i = order.into_iter().find(|&i| self.has_partner(i))?;
        let j = (0..self.keys.len())
            .filter(|&j| disjoint(&self.keys[i].key, &self.keys[j].key))
            .min_by_key(|&j| self.keys[j].first)?;
        Some((self.keys[i].first, self.keys[j].first))
    }

    /// All generating triples in lexicographic order, with the index of their key.
    fn keyed_triples(&self) -> Vec<(Triple, usize)> {
        let index: FxHashMap<&Key, usize> = self
            .keys
            .iter()
            .enumerate()
            .map(|(i, k)| (&k.key, i))
            .collect();
        let g = &self.group;
        let mut out = Vec::new();
        for x in g.elements().take(self.rows_scanned as usize) {
            let mut memo = RowMemo::new(&self.data, g.order());
            for y in g.elements() {
                if self.data.generates(g, x, y, &mut memo) {
                    let t = Triple::completing(g, x, y);
                    if let Some(&k) = index.get(&self.data.key(&t)) {
                        out.push((t, k));
                    }
                }
            }
        }
        out
    }

    /// Generating triples in lexicographic order.
    pub fn triples(&self) -> Vec<Triple> {
        self.keyed_triples().into_iter().map(|(t, _)| t).collect()
    }

    /// The first `limit` pairs satisfying all three conditions, in lexicographic order.
    pub fn pairs(&self, limit: usize) -> Vec<(Triple, Triple)> {
        if limit == 0 || !(0..self.keys.len()).any(|i| self.has_partner(i)) {
            return Vec::new();
        }
        let triples = self.keyed_triples();
        let mut out = Vec::new();
        for &(t1, k1) in &triples {
            if !self.has_partner(k1) {
                continue;
            }
            let key = &self.keys[k1].key;
            for &(t2, k2) in &triples {
                if disjoint(key, &self.keys[k2].key) {
                    out.push((t1, t2));
                    if out.len() == limit {
                        return out;
                    }
                }
            }
        }
        out
    }
}

fn checked(group: &Arc<Group>, (t1, t2): (Triple, Triple)) -> Result<BeauvilleStructure> {
    let s = verify(group, t1, t2)?;
    if !s.verified {
        return Err(Error::VerificationFailed(format!(
            "search produced an unverified pair: {:?}",
            s.refutation
        )));
    }
    Ok(s)
}

pub fn search(group: &Arc<Group>, options: &SearchOptions) -> Result<SearchOutcome> {
    let start = Instant::now();
    let catalog = TripleCatalog::build(group, &options.budget, options.threads);
    let first = catalog
        .first_pair()
        .map(|p| checked(group, p))
        .transpose()?;
    let structures = match options.mode {
        SearchMode::Exhaustive => catalog
            .pairs(options.limit)
            .into_iter()
            .map(|p| checked(group, p))
            .collect::<Result<Vec<_>>>()?,
        SearchMode::FirstFound => Vec::new(),
    };
    Ok(SearchOutcome {
        mode: options.mode,
        exhaustive: catalog.is_complete(),
        count: catalog.structure_count(),
        generating_triples: catalog.generating_triples(),
        first,
        structures,
        candidates: catalog.candidates,
        elapsed: start.elapsed(),
        stop_reason: catalog.stop_reason.clone(),
    })
}
