//! Frattini quotients of p-groups. For a p-group `Φ(G) = G^p·[G,G]` and a subset
//! generates `G` exactly when its image spans `G/Φ(G)` over `F_p`.

use std::sync::Arc;

use crate::error::{Error, Result};

use super::{Element, Group, GroupDescription, SubgroupBuilder};

/// Generic Frattini data for table and matrix groups.
#[derive(Debug, Clone)]
pub(crate) struct FrattiniData {
    pub(crate) p: u64,
    pub(crate) rank: usize,
    /// Elements of `Φ(G)`, sorted.
    pub(crate) kernel: Vec<Element>,
    /// Base-p encoded coordinates `c_0 + c_1·p + …` of every element.
    pub(crate) codes: Vec<u64>,
}

impl FrattiniData {
    pub(crate) fn compute(group: &Group) -> Result<FrattiniData> {
        let (p, _) = group.prime_power().ok_or(Error::NotAPGroup {
            order: group.order(),
        })?;
        let gens = group.generators().to_vec();

        // normal closure of all p-th powers and the commutators of generators
        let mut phi = SubgroupBuilder::new(group);
        for g in group.elements() {
            phi.add(group.pow(g, p));
        }
        for &s in &gens {
            for &t in &gens {
                phi.add(group.commutator(s, t));
            }
        }
        loop {
            let mut grew = false;
            let phi_gens = phi.gens.clone();
            for h in phi_gens {
                for &s in &gens {
                    grew |= phi.add(group.conjugate(h, s));
                }
            }
            if !grew {
                break;
            }
        }
        let mut kernel = phi.elements().to_vec();
        kernel.sort();

        // basis of the quotient, chosen greedily in handle order
        let mut span = SubgroupBuilder::new(group);
        for &k in &kernel {
            span.add(k);
        }
        let mut basis = Vec::new();
        for g in group.elements() {
            if span.len() as u64 == group.order() {
                break;
            }
            if span.add(g) {
                basis.push(g);
            }
        }
        let rank = basis.len();
        let quotient = p.pow(rank as u32);
        if quotient * kernel.len() as u64 != group.order() {
            return Err(Error::VerificationFailed(format!(
                "Frattini quotient of order {quotient} does not divide evenly"
            )));
        }

        let mut codes = vec![u64::MAX; group.order() as usize];
        for code in 0..quotient {
            let mut rep = group.identity();
            let mut c = code;
            for &b in &basis {
                rep = group.mul(rep, group.pow(b, c % p));
                c /= p;
            }
            for &k in &kernel {
                let g = group.mul(rep, k);
                if codes[g.0 as usize] != u64::MAX {
                    return Err(Error::VerificationFailed(
                        "Frattini cosets overlap".to_string(),
                    ));
                }
                codes[g.0 as usize] = code;
            }
        }
        Ok(FrattiniData {
            p,
            rank,
            kernel,
            codes,
        })
    }

    pub(crate) fn coords(&self, g: Element) -> Vec<u64> {
        let mut c = self.codes[g.0 as usize];
        (0..self.rank)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }
}

/// `F_p^rank` as a Cayley table, element index = base-p digits.
fn elementary_abelian(p: u64, rank: usize) -> Result<GroupDescription> {
    let order = p
        .checked_pow(rank as u32)
        .filter(|&o| o <= super::CAYLEY_EXPORT_LIMIT)
        .ok_or_else(|| {
            Error::PreconditionViolated(format!("elementary abelian group {p}^{rank} is too large"))
        })?;
    let digits = |mut v: u64| -> Vec<u64> {
        (0..rank)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    };
    let table = (0..order)
        .map(|g| {
            let dg = digits(g);
            (0..order)
                .map(|h| {
                    digits(h)
                        .iter()
                        .zip(&dg)
                        .rev()
                        .fold(0, |acc, (a, b)| acc * p + (a + b) % p)
                })
                .collect()
        })
        .collect();
    Ok(GroupDescription::CayleyTable {
        label: format!("inline:elementary-abelian:{p}^{rank}"),
        table,
    })
}

/// The quotient map `G → G/Φ(G)`. For rank 2 the target is `Metacyclic(p,1,1,1)`,
/// otherwise an elementary abelian Cayley table.
#[derive(Debug, Clone)]
pub struct FrattiniQuotientMap {
    source: Arc<Group>,
    target: Arc<Group>,
    rank: usize,
}

impl FrattiniQuotientMap {
    pub fn source(&self) -> &Arc<Group> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Group> {
        &self.target
    }

    /// Dimension of the target over `F_p`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn image(&self, g: Element) -> Element {
        let p = self.source.prime().expect("p-group");
        let c = self.source.frattini_coords(g).expect("frattini data");
        if self.rank == 2 {
            Element(c[0] * p + c[1])
        } else {
            Element(c.iter().rev().fold(0, |acc, d| acc * p + d))
        }
    }

    /// Elements of `Φ(G)`, sorted. Only materialized for groups that can be enumerated.
    pub fn kernel(&self) -> Vec<Element> {
        if self.source.metacyclic().is_none() {
            if let Ok(data) = self.source.frattini_data() {
                return data.kernel.clone();
            }
        }
        let e = self.target.identity();
        self.source
            .elements()
            .filter(|&g| self.image(g) == e)
            .collect()
    }
}

/// Builds `G → G/Φ(G)`. Metacyclic groups use the closed form `(a, x) ↦ (a mod p, x mod p)`.
pub fn frattini_quotient(group: &Arc<Group>) -> Result<FrattiniQuotientMap> {
    let (p, _) = group.prime_power().ok_or(Error::NotAPGroup {
        order: group.order(),
    })?;
    let rank = group.frattini_rank()?;
    let target = if rank == 2 {
        GroupDescription::metacyclic(p, 1, 1, 1)
    } else {
        elementary_abelian(p, rank)?
    };
    Ok(FrattiniQuotientMap {
        source: Arc::clone(group),
        target: Arc::new(Group::new(target)?),
        rank,
    })
}
