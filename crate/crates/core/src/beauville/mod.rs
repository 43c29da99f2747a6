//! Unmixed Beauville structures: data model, conjugate power sets, verification, search.
//!
//! A structure on `G` is an ordered pair of triples `(x, y, z)`, `(a, b, c)` such that
//!
//! 1. `xyz = 1 = abc`,
//! 2. each triple generates `G`,
//! 3. no nontrivial power of `x`, `y` or `z` is conjugate to a power of `a`, `b` or `c`.
//!
//! Condition 3 is tested on [`ConjugatePowerSet`]s: the class identifiers of all nontrivial
//! powers `t^k`, `1 ≤ k < ord(t)`. The zeroth power is left out on both sides; it is the
//! identity, which is conjugate only to itself.

mod search;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ClassId, Element, Group};

pub use search::{search, Budget, SearchMode, SearchOptions, SearchOutcome, TripleCatalog};

/// An ordered triple of elements of one group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub x: Element,
    pub y: Element,
    pub z: Element,
}

impl Triple {
    pub fn new(x: Element, y: Element, z: Element) -> Self {
        Triple { x, y, z }
    }

    /// `(x, y, (xy)^{-1})`, which has product one by construction.
    pub fn completing(group: &Group, x: Element, y: Element) -> Self {
        Triple {
            x,
            y,
            z: group.inv(group.mul(x, y)),
        }
    }

    pub fn elements(&self) -> [Element; 3] {
        [self.x, self.y, self.z]
    }

    pub fn map(&self, mut f: impl FnMut(Element) -> Element) -> Triple {
        Triple::new(f(self.x), f(self.y), f(self.z))
    }

    /// Elementwise conjugate `g t g^{-1}`.
    pub fn conjugate(&self, group: &Group, by: Element) -> Triple {
        self.map(|t| group.conjugate(t, by))
    }

    pub fn product(&self, group: &Group) -> Element {
        group.mul(group.mul(self.x, self.y), self.z)
    }
}

/// Orders of `x, y, z, a, b, c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub first: [u64; 3],
    pub second: [u64; 3],
}

impl Signature {
    pub fn entries(&self) -> [u64; 6] {
        let [a, b, c] = self.first;
        let [d, e, f] = self.second;
        [a, b, c, d, e, f]
    }

    pub fn is_balanced(&self) -> bool {
        let e = self.entries();
        e.iter().all(|&v| v == e[0])
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.entries();
        write!(
            f,
            "({}, {}, {}; {}, {}, {})",
            e[0], e[1], e[2], e[3], e[4], e[5]
        )
    }
}

/// Class identifiers of every nontrivial power of the entries of a triple, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugatePowerSet {
    owner: Triple,
    classes: Vec<ClassId>,
}

impl ConjugatePowerSet {
    pub fn owner(&self) -> Triple {
        self.owner
    }

    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, class: ClassId) -> bool {
        self.classes.binary_search(&class).is_ok()
    }

    pub fn is_disjoint(&self, other: &ConjugatePowerSet) -> bool {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.classes, &other.classes);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

pub fn conjugate_power_set(group: &Group, triple: &Triple) -> ConjugatePowerSet {
    let e = group.identity();
    let mut classes = Vec::new();
    for t in triple.elements() {
        let mut power = t;
        while power != e {
            classes.push(group.class_id(power));
            power = group.mul(power, t);
        }
    }
    classes.sort_unstable();
    classes.dedup();
    ConjugatePowerSet {
        owner: *triple,
        classes,
    }
}

/// Which defining condition a pair of triples violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    ProductOne = 1,
    Generation = 2,
    DisjointPowers = 3,
}

impl Condition {
    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub condition: Condition,
    /// 1 or 2 for conditions 1 and 2: the offending triple.
    pub triple: Option<u8>,
    /// For condition 3: a class shared by both conjugate power sets.
    pub witness: Option<ClassId>,
    pub reason: String,
}

/// A checked pair of triples. `verified` is set only after all three conditions held.
#[derive(Debug, Clone)]
pub struct BeauvilleStructure {
    pub group: Arc<Group>,
    pub first: Triple,
    pub second: Triple,
    pub signature: Signature,
    pub verified: bool,
    pub refutation: Option<Refutation>,
}

impl PartialEq for BeauvilleStructure {
    fn eq(&self, other: &Self) -> bool {
        self.group.description() == other.group.description()
            && self.first == other.first
            && self.second == other.second
            && self.verified == other.verified
            && self.refutation == other.refutation
    }
}

impl BeauvilleStructure {
    pub fn elements(&self) -> [Element; 6] {
        let [x, y, z] = self.first.elements();
        let [a, b, c] = self.second.elements();
        [x, y, z, a, b, c]
    }
}

/// Everything about one triple that verification needs, computed once.
#[derive(Debug, Clone)]
pub struct PreparedTriple {
    pub triple: Triple,
    pub product_is_one: bool,
    pub generates: bool,
    pub powers: ConjugatePowerSet,
}

impl PreparedTriple {
    pub fn new(group: &Group, triple: Triple) -> Self {
        PreparedTriple {
            triple,
            product_is_one: triple.product(group) == group.identity(),
            generates: group.generates(&triple.elements()),
            powers: conjugate_power_set(group, &triple),
        }
    }
}

/// First violated condition for a prepared pair, or `None` when all three hold.
pub fn first_violation(
    group: &Group,
    first: &PreparedTriple,
    second: &PreparedTriple,
) -> Option<Condition> {
    if !first.product_is_one || !second.product_is_one {
        Some(Condition::ProductOne)
    } else if !first.generates || !second.generates {
        Some(Condition::Generation)
    } else if group.is_trivial() || !first.powers.is_disjoint(&second.powers) {
        Some(Condition::DisjointPowers)
    } else {
        None
    }
}

fn check_membership(group: &Group, triple: &Triple, which: &str) -> Result<()> {
    match triple.elements().iter().find(|&&t| !group.contains(t)) {
        Some(t) => Err(Error::MismatchedGroups(format!(
            "{which} triple has element {} outside {} (order {})",
            t.0,
            group.spec(),
            group.order()
        ))),
        None => Ok(()),
    }
}

pub fn signature_of(group: &Group, first: &Triple, second: &Triple) -> Signature {
    let ord = |t: &Triple| t.elements().map(|e| group.element_order(e));
    Signature {
        first: ord(first),
        second: ord(second),
    }
}

/// Checks the three defining conditions. The returned record is `verified` exactly when
/// they all hold; otherwise it carries the first failed condition and, for condition 3,
/// the class of the first power of `x, y, z` (in that order, by increasing exponent) that
/// also occurs among the powers of `a, b, c`.
pub fn verify(group: &Arc<Group>, first: Triple, second: Triple) -> Result<BeauvilleStructure> {
    check_membership(group, &first, "first")?;
    check_membership(group, &second, "second")?;
    let p1 = PreparedTriple::new(group, first);
    let p2 = PreparedTriple::new(group, second);
    let refutation = match first_violation(group, &p1, &p2) {
        None => None,
        Some(Condition::ProductOne) => {
            let which = if p1.product_is_one { 2 } else { 1 };
            Some(Refutation {
                condition: Condition::ProductOne,
                triple: Some(which),
                witness: None,
                reason: format!("product of triple {which} is not the identity"),
            })
        }
        Some(Condition::Generation) => {
            let which = if p1.generates { 2 } else { 1 };
            Some(Refutation {
                condition: Condition::Generation,
                triple: Some(which),
                witness: None,
                reason: format!("triple {which} does not generate the group"),
            })
        }
        Some(Condition::DisjointPowers) if group.is_trivial() => Some(Refutation {
            condition: Condition::DisjointPowers,
            triple: None,
            witness: None,
            reason: "the trivial group admits no Beauville structure".to_string(),
        }),
        Some(Condition::DisjointPowers) => {
            let witness = first_common_power(group, &first, &p2.powers);
            Some(Refutation {
                condition: Condition::DisjointPowers,
                triple: None,
                witness,
                reason:
                    "a nontrivial power of the first triple is conjugate to a power of the second"
                        .to_string(),
            })
        }
    };
    Ok(BeauvilleStructure {
        group: Arc::clone(group),
        first,
        second,
        signature: signature_of(group, &first, &second),
        verified: refutation.is_none(),
        refutation,
    })
}

fn first_common_power(
    group: &Group,
    triple: &Triple,
    other: &ConjugatePowerSet,
) -> Option<ClassId> {
    let e = group.identity();
    for t in triple.elements() {
        let mut power = t;
        while power != e {
            let c = group.class_id(power);
            if other.contains(c) {
                return Some(c);
            }
            power = group.mul(power, t);
        }
    }
    None
}

#[cfg(test)]
mod tests;
