//! A uniform finite-group engine over three realizations: structured metacyclic groups,
//! explicit Cayley tables and closures of matrix generators over `F_p`.
//!
//! Every element is an [`Element`] handle. Handles are dense indices in `[0, order)` whose
//! numeric order is the lexicographic order of the underlying data (pairs `(a, x)`,
//! table indices, row-major matrices). Group handles are immutable once built; the lazily
//! filled caches sit behind [`OnceLock`] and are safe to share between threads.

mod cayley;
mod description;
mod frattini;
mod matrix;
mod metacyclic;

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::arith::prime_power;
use crate::error::{Error, Result};

pub use cayley::CayleyTable;
pub use description::{CayleyFile, GroupDescription};
pub use frattini::{frattini_quotient, FrattiniQuotientMap};
pub use matrix::{MatrixGroup, DEFAULT_CLOSURE_CAP};
pub use metacyclic::Metacyclic;

use frattini::FrattiniData;

/// Largest group exported as an explicit Cayley table.
pub const CAYLEY_EXPORT_LIMIT: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element(pub u64);

/// Canonical conjugacy-class identifier: the least element of the class.
pub type ClassId = Element;

#[derive(Debug, Clone)]
pub enum Realization {
    Metacyclic(Metacyclic),
    Cayley(CayleyTable),
    Matrix(MatrixGroup),
}

#[derive(Debug)]
struct PowerCache {
    inverse: Vec<u64>,
    order: Vec<u64>,
}

#[derive(Debug)]
pub struct Group {
    description: GroupDescription,
    realization: Realization,
    order: u64,
    /// `(p, k)` when the order is `p^k`.
    prime_power: Option<(u64, u32)>,
    generators: Vec<Element>,
    classes: OnceLock<Vec<u64>>,
    powers: OnceLock<PowerCache>,
    frattini: OnceLock<Result<FrattiniData>>,
}

impl Group {
    /// Validates a description and builds the group.
    pub fn new(description: GroupDescription) -> Result<Group> {
        let (description, realization) = match description {
            GroupDescription::Metacyclic { p, m, n, lambda } => {
                let mc = Metacyclic::new(p, m, n, lambda)?;
                let normalized = GroupDescription::Metacyclic {
                    p,
                    m,
                    n,
                    lambda: mc.lambda(),
                };
                (normalized, Realization::Metacyclic(mc))
            }
            GroupDescription::CayleyTable { label, table } => {
                let (ct, _) = CayleyTable::new(&table)?;
                let normalized = GroupDescription::CayleyTable {
                    label,
                    table: ct.rows(),
                };
                (normalized, Realization::Cayley(ct))
            }
            GroupDescription::MatrixClosure {
                p,
                dim,
                generators,
                cap,
            } => {
                let mg = MatrixGroup::new(p, dim, &generators, cap)?;
                let d = GroupDescription::MatrixClosure {
                    p,
                    dim,
                    generators,
                    cap,
                };
                (d, Realization::Matrix(mg))
            }
        };
        let order = match &realization {
            Realization::Metacyclic(mc) => mc.order(),
            Realization::Cayley(ct) => ct.order() as u64,
            Realization::Matrix(mg) => mg.order() as u64,
        };
        let mut group = Group {
            description,
            realization,
            order,
            prime_power: prime_power(order),
            generators: Vec::new(),
            classes: OnceLock::new(),
            powers: OnceLock::new(),
            frattini: OnceLock::new(),
        };
        group.generators = match &group.realization {
            Realization::Metacyclic(mc) => vec![mc.element(1, 0), mc.element(0, 1)],
            Realization::Matrix(mg) => {
                let mut gens: Vec<Element> = mg
                    .generators()
                    .iter()
                    .copied()
                    .filter(|&g| g != mg.identity())
                    .collect();
                gens.sort();
                gens.dedup();
                gens
            }
            Realization::Cayley(_) => group.greedy_generators(),
        };
        Ok(group)
    }

    fn greedy_generators(&self) -> Vec<Element> {
        let mut sub = SubgroupBuilder::new(self);
        let mut gens = Vec::new();
        for g in self.elements() {
            if sub.len() as u64 == self.order {
                break;
            }
            if !sub.contains(g) {
                gens.push(g);
                sub.add(g);
            }
        }
        gens
    }

    pub fn description(&self) -> &GroupDescription {
        &self.description
    }

    /// The canonical group-spec string.
    pub fn spec(&self) -> String {
        self.description.to_string()
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn metacyclic(&self) -> Option<&Metacyclic> {
        match &self.realization {
            Realization::Metacyclic(mc) => Some(mc),
            _ => None,
        }
    }

    pub fn matrix_group(&self) -> Option<&MatrixGroup> {
        match &self.realization {
            Realization::Matrix(mg) => Some(mg),
            _ => None,
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The prime `p` if this is a nontrivial p-group.
    pub fn prime(&self) -> Option<u64> {
        self.prime_power.map(|(p, _)| p)
    }

    pub fn prime_power(&self) -> Option<(u64, u32)> {
        self.prime_power
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn identity(&self) -> Element {
        match &self.realization {
            Realization::Matrix(mg) => mg.identity(),
            _ => Element(0),
        }
    }

    pub fn contains(&self, g: Element) -> bool {
        g.0 < self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order).map(Element)
    }

    #[inline]
    pub fn mul(&self, g: Element, h: Element) -> Element {
        match &self.realization {
            Realization::Metacyclic(mc) => mc.mul(g, h),
            Realization::Cayley(ct) => ct.mul(g, h),
            Realization::Matrix(mg) => mg.mul(g, h),
        }
    }

    /// `g·h` for every element `h`, in handle order.
    pub fn left_row(&self, g: Element) -> Vec<Element> {
        match &self.realization {
            Realization::Metacyclic(mc) => mc.left_row(g),
            _ => self.elements().map(|h| self.mul(g, h)).collect(),
        }
    }

    #[inline]
    pub fn inv(&self, g: Element) -> Element {
        match &self.realization {
            Realization::Metacyclic(mc) => mc.inv(g),
            Realization::Cayley(ct) => ct.inv(g),
            Realization::Matrix(_) => Element(self.power_cache().inverse[g.0 as usize]),
        }
    }

    pub fn pow(&self, g: Element, mut k: u64) -> Element {
        let mut acc = self.identity();
        let mut base = g;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// `g h g^{-1}`.
    pub fn conjugate(&self, h: Element, by: Element) -> Element {
        self.mul(self.mul(by, h), self.inv(by))
    }

    pub fn commutator(&self, g: Element, h: Element) -> Element {
        self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))
    }

    /// Least `k ≥ 1` with `g^k = 1`, by iterated multiplication.
    pub fn element_order(&self, g: Element) -> u64 {
        match &self.realization {
            Realization::Metacyclic(_) => {
                let e = self.identity();
                let mut acc = g;
                let mut k = 1;
                while acc != e {
                    acc = self.mul(acc, g);
                    k += 1;
                    debug_assert!(k <= self.order);
                }
                k
            }
            _ => self.power_cache().order[g.0 as usize],
        }
    }

    /// Fills inverse and order tables by walking each cyclic subgroup once.
    fn power_cache(&self) -> &PowerCache {
        self.powers.get_or_init(|| {
            let n = self.order as usize;
            let mut inverse = vec![u64::MAX; n];
            let mut order = vec![0u64; n];
            let e = self.identity();
            for start in 0..n {
                if order[start] != 0 {
                    continue;
                }
                let g = Element(start as u64);
                let mut cycle = vec![e, g];
                let mut acc = g;
                while acc != e {
                    acc = self.mul(acc, g);
                    cycle.push(acc);
                }
                cycle.pop();
                let k = cycle.len() as u64;
                for (i, h) in cycle.iter().enumerate() {
                    let i = i as u64;
                    order[h.0 as usize] = k / num_integer::gcd(i, k);
                    inverse[h.0 as usize] = cycle[((k - i) % k) as usize].0;
                }
            }
            PowerCache { inverse, order }
        })
    }

    /// Canonical conjugacy-class identifier (least element of the class).
    pub fn class_id(&self, g: Element) -> ClassId {
        match &self.realization {
            Realization::Metacyclic(mc) => mc.class_id(g),
            _ => Element(self.class_table()[g.0 as usize]),
        }
    }

    /// Orbit enumeration under conjugation by the generators.
    fn class_table(&self) -> &[u64] {
        self.classes.get_or_init(|| {
            let n = self.order as usize;
            let mut class = vec![u64::MAX; n];
            let gen_invs: Vec<(Element, Element)> =
                self.generators.iter().map(|&s| (s, self.inv(s))).collect();
            for start in 0..n {
                if class[start] != u64::MAX {
                    continue;
                }
                class[start] = start as u64;
                let mut queue = VecDeque::from([Element(start as u64)]);
                while let Some(h) = queue.pop_front() {
                    for &(s, s_inv) in &gen_invs {
                        let c = self.mul(self.mul(s, h), s_inv);
                        if class[c.0 as usize] == u64::MAX {
                            class[c.0 as usize] = start as u64;
                            queue.push_back(c);
                        }
                    }
                }
            }
            class
        })
    }

    /// All elements of the conjugacy class of `g`, sorted.
    pub fn conjugacy_class(&self, g: Element) -> Vec<Element> {
        let mut seen = std::collections::BTreeSet::from([g]);
        let mut queue = VecDeque::from([g]);
        while let Some(h) = queue.pop_front() {
            for &s in &self.generators {
                let c = self.conjugate(h, s);
                if seen.insert(c) {
                    queue.push_back(c);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Elements of the subgroup generated by `set`, sorted.
    pub fn closure(&self, set: &[Element]) -> Vec<Element> {
        let mut sub = SubgroupBuilder::new(self);
        for &g in set {
            sub.add(g);
        }
        let mut out = sub.into_elements();
        out.sort();
        out
    }

    /// Whether `set` generates the whole group. p-groups use the Frattini criterion,
    /// everything else a breadth-first closure.
    pub fn generates(&self, set: &[Element]) -> bool {
        if self.is_trivial() {
            return true;
        }
        if self.prime_power.is_some() {
            if let Ok(rank) = self.frattini_rank() {
                return self.frattini_span_rank(set) == rank;
            }
        }
        let mut sub = SubgroupBuilder::new(self);
        for &g in set {
            sub.add(g);
        }
        sub.len() as u64 == self.order
    }

    /// Whether all pairs commute.
    pub fn is_abelian(&self) -> bool {
        if let Some(mc) = self.metacyclic() {
            return mc.is_abelian();
        }
        let gens = &self.generators;
        gens.iter()
            .all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Re-encodes the group as an explicit table with the identity at index 0.
    /// Returns the description and, for each original handle, its table index.
    pub fn to_cayley(&self) -> Result<(GroupDescription, Vec<u64>)> {
        if self.order > CAYLEY_EXPORT_LIMIT {
            return Err(Error::PreconditionViolated(format!(
                "order {} exceeds the Cayley export limit {CAYLEY_EXPORT_LIMIT}",
                self.order
            )));
        }
        let n = self.order;
        let e = self.identity().0;
        let relabel = |g: u64| {
            if g == e {
                0
            } else if g == 0 {
                e
            } else {
                g
            }
        };
        let mut table = vec![vec![0u64; n as usize]; n as usize];
        for g in 0..n {
            for h in 0..n {
                table[relabel(g) as usize][relabel(h) as usize] =
                    relabel(self.mul(Element(g), Element(h)).0);
            }
        }
        let desc = GroupDescription::CayleyTable {
            label: format!("inline:from:{}", self.spec()),
            table,
        };
        Ok((desc, (0..n).map(relabel).collect()))
    }

    /// Parses one element from its JSON form: `[a, x]` for metacyclic groups, an index
    /// for Cayley tables, a flat row-major list for matrix groups.
    pub fn element_from_json(&self, v: &serde_json::Value) -> Result<Element> {
        let bad = || Error::InvalidElement(format!("{v} is not an element of {}", self.spec()));
        let as_u64 = |x: &serde_json::Value| x.as_u64().ok_or_else(bad);
        match &self.realization {
            Realization::Metacyclic(mc) => {
                let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                let (a, x) = (as_u64(&arr[0])?, as_u64(&arr[1])?);
                if a >= mc.pm() || x >= mc.pn() {
                    return Err(bad());
                }
                Ok(mc.element(a, x))
            }
            Realization::Cayley(_) => {
                let g = as_u64(v)?;
                if g >= self.order {
                    return Err(bad());
                }
                Ok(Element(g))
            }
            Realization::Matrix(mg) => {
                let entries = v
                    .as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(as_u64)
                    .collect::<Result<Vec<u64>>>()?;
                if entries.iter().any(|&x| x >= mg.p()) {
                    return Err(bad());
                }
                mg.lookup(&entries).ok_or_else(bad)
            }
        }
    }

    pub fn element_to_json(&self, g: Element) -> serde_json::Value {
        match &self.realization {
            Realization::Metacyclic(mc) => {
                let (a, x) = mc.pair(g);
                serde_json::json!([a, x])
            }
            Realization::Cayley(_) => serde_json::json!(g.0),
            Realization::Matrix(mg) => serde_json::json!(mg.matrix(g)),
        }
    }

    pub(crate) fn frattini_data(&self) -> Result<&FrattiniData> {
        self.frattini
            .get_or_init(|| FrattiniData::compute(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `dim_{F_p} G/Φ(G)` for a p-group.
    pub fn frattini_rank(&self) -> Result<usize> {
        match self.metacyclic() {
            Some(_) => Ok(2),
            None => Ok(self.frattini_data()?.rank),
        }
    }

    /// Coordinates of the image of `g` in `G/Φ(G) ≅ F_p^rank`.
    pub fn frattini_coords(&self, g: Element) -> Result<Vec<u64>> {
        match self.metacyclic() {
            Some(mc) => {
                let (a, x) = mc.pair(g);
                Ok(vec![a % mc.p(), x % mc.p()])
            }
            None => Ok(self.frattini_data()?.coords(g)),
        }
    }

    fn frattini_span_rank(&self, set: &[Element]) -> usize {
        let p = self.prime().expect("p-group");
        let rows: Vec<Vec<u64>> = set
            .iter()
            .map(|&g| self.frattini_coords(g).expect("frattini data"))
            .collect();
        crate::arith::rank_mod_p(&rows, p)
    }
}

/// Incrementally grown subgroup.
pub(crate) struct SubgroupBuilder<'g> {
    group: &'g Group,
    member: HashMap<Element, ()>,
    elements: Vec<Element>,
    gens: Vec<Element>,
}

impl<'g> SubgroupBuilder<'g> {
    pub(crate) fn new(group: &'g Group) -> Self {
        let e = group.identity();
        SubgroupBuilder {
            group,
            member: HashMap::from([(e, ())]),
            elements: vec![e],
            gens: Vec::new(),
        }
    }

    pub(crate) fn contains(&self, g: Element) -> bool {
        self.member.contains_key(&g)
    }

    pub(crate) fn len(&self) -> usize {
        self.elements.len()
    }

    pub(crate) fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub(crate) fn into_elements(self) -> Vec<Element> {
        self.elements
    }

    /// Adds `g` and closes up. Returns whether the subgroup grew.
    pub(crate) fn add(&mut self, g: Element) -> bool {
        if self.contains(g) {
            return false;
        }
        self.gens.push(g);
        let mut queue: VecDeque<Element> = self.elements.iter().copied().collect();
        while let Some(h) = queue.pop_front() {
            for &s in &self.gens {
                let v = self.group.mul(h, s);
                if self.member.insert(v, ()).is_none() {
                    self.elements.push(v);
                    queue.push_back(v);
                }
            }
        }
        true
    }
}
