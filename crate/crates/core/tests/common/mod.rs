//! Brute-force reference implementation over an explicit multiplication table.
//! Nothing here uses class ids, Frattini quotients or closed-form powers.
#![allow(dead_code)]

use std::collections::VecDeque;

use beauville_core::{Element, Group, Triple};

pub struct Oracle {
    pub n: usize,
    table: Vec<Vec<u32>>,
    identity: usize,
    inverse: Vec<usize>,
}

/// `(a, x)` with `0 ≤ a < p^m`, `0 ≤ x < p^n` stored at index `a·p^n + x`, multiplied by
/// `(a, x)(b, y) = (a + λ^x b, x + y)`. Written out here independently of the library.
pub fn metacyclic_table(p: u64, m: u32, n: u32, lambda: u64) -> Vec<Vec<u32>> {
    let (pm, pn) = (p.pow(m), p.pow(n));
    let mut lam_pow = vec![1u64; pn as usize];
    for x in 1..pn as usize {
        lam_pow[x] = lam_pow[x - 1] * lambda % pm;
    }
    let size = (pm * pn) as usize;
    let mut table = vec![vec![0u32; size]; size];
    for g in 0..size as u64 {
        let (a, x) = (g / pn, g % pn);
        for h in 0..size as u64 {
            let (b, y) = (h / pn, h % pn);
            let c = (a + lam_pow[x as usize] * b) % pm;
            let z = (x + y) % pn;
            table[g as usize][h as usize] = (c * pn + z) as u32;
        }
    }
    table
}

/// Table read off the library's multiplication, for groups with no independent formula.
pub fn table_of(g: &Group) -> Vec<Vec<u32>> {
    g.elements()
        .map(|a| g.elements().map(|b| g.mul(a, b).0 as u32).collect())
        .collect()
}

impl Oracle {
    pub fn new(table: Vec<Vec<u32>>) -> Oracle {
        let n = table.len();
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] as usize == g && table[g][e] as usize == g))
            .expect("table has an identity");
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table[g][h] as usize == identity)
                    .expect("every element is invertible")
            })
            .collect();
        Oracle {
            n,
            table,
            identity,
            inverse,
        }
    }

    pub fn metacyclic(p: u64, m: u32, n: u32, lambda: u64) -> Oracle {
        Oracle::new(metacyclic_table(p, m, n, lambda))
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h] as usize
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// `g, g², …` up to and excluding the identity.
    pub fn nontrivial_powers(&self, g: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut h = g;
        while h != self.identity {
            out.push(h);
            h = self.mul(h, g);
        }
        out
    }

    pub fn order(&self, g: usize) -> u64 {
        self.nontrivial_powers(g).len() as u64 + 1
    }

    pub fn conjugate(&self, h: usize, by: usize) -> usize {
        self.mul(self.mul(by, h), self.inv(by))
    }

    pub fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                let h = self.mul(g, s);
                if !seen[h] {
                    seen[h] = true;
                    queue.push_back(h);
                }
            }
        }
        seen
    }

    pub fn generates(&self, gens: &[usize]) -> bool {
        self.closure(gens).iter().all(|&b| b)
    }

    /// Every conjugate of every nontrivial power of the three elements.
    pub fn conjugated_powers(&self, t: [usize; 3]) -> Vec<bool> {
        let mut set = vec![false; self.n];
        for g in t {
            for h in self.nontrivial_powers(g) {
                for c in 0..self.n {
                    set[self.conjugate(h, c)] = true;
                }
            }
        }
        set
    }

    pub fn product_is_one(&self, t: [usize; 3]) -> bool {
        self.mul(self.mul(t[0], t[1]), t[2]) == self.identity
    }

    /// Condition 3 by double loops: no nontrivial power of `t2` lies in a conjugate of a
    /// nontrivial power of `t1`.
    pub fn disjoint(&self, t1: [usize; 3], t2: [usize; 3]) -> bool {
        let m = self.conjugated_powers(t1);
        t2.iter()
            .all(|&g| self.nontrivial_powers(g).iter().all(|&h| !m[h]))
    }

    pub fn verify(&self, t1: [usize; 3], t2: [usize; 3]) -> bool {
        self.n > 1
            && self.product_is_one(t1)
            && self.product_is_one(t2)
            && self.generates(&t1)
            && self.generates(&t2)
            && self.disjoint(t1, t2)
    }

    /// `(x, y, (xy)^{-1})`.
    pub fn completing(&self, x: usize, y: usize) -> [usize; 3] {
        [x, y, self.inv(self.mul(x, y))]
    }
}

pub fn idx(t: &Triple) -> [usize; 3] {
    t.elements().map(|e| e.0 as usize)
}

pub fn triple(t: [usize; 3]) -> Triple {
    Triple::new(
        Element(t[0] as u64),
        Element(t[1] as u64),
        Element(t[2] as u64),
    )
}

/// Every `(p, m, n, λ)` with `m, n ≥ 1`, `λ` a unit mod `p^m` with `λ^(p^n) ≡ 1`, and
/// `p^(m+n) ≤ max_order`.
pub fn metacyclic_tuples(max_order: u64) -> Vec<(u64, u32, u32, u64)> {
    let primes = (2..=max_order).filter(|&q| (2..q).all(|d| q % d != 0));
    let mut out = Vec::new();
    for p in primes {
        for m in 1.. {
            if p.pow(m + 1) > max_order {
                break;
            }
            for n in 1.. {
                if p.pow(m + n) > max_order {
                    break;
                }
                let pm = p.pow(m);
                for lambda in 1..pm {
                    let mut l = lambda;
                    for _ in 0..n {
                        l = (0..p).fold(1, |acc, _| acc * l % pm);
                    }
                    if lambda % p != 0 && l == 1 {
                        out.push((p, m, n, lambda));
                    }
                }
            }
        }
    }
    out
}
