//! Groups given by an explicit multiplication table.

use crate::error::{Error, Result};

use super::Element;

#[derive(Debug, Clone)]
pub struct CayleyTable {
    order: usize,
    table: Vec<u32>,
    inverses: Vec<u32>,
}

impl CayleyTable {
    /// Validates `table` (row `i`, column `j` holds `i·j`) and relabels so the identity
    /// sits at index 0. Returns the table together with the relabeling `old -> new`.
    pub fn new(table: &[Vec<u64>]) -> Result<(Self, Vec<usize>)> {
        let order = table.len();
        if order == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if order > u32::MAX as usize {
            return Err(Error::NotAGroup("table too large".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::NotAGroup(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|&&v| v as usize >= order) {
                return Err(Error::NotAGroup(format!(
                    "entry {bad} out of range in row {i}"
                )));
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| table[e][g] as usize == g && table[g][e] as usize == g))
            .ok_or_else(|| Error::NotAGroup("no two-sided identity".into()))?;

        let mut relabel: Vec<usize> = (0..order).collect();
        relabel.swap(0, identity);
        // relabel is an involution, so it is its own inverse
        let mut flat = vec![0u32; order * order];
        for i in 0..order {
            for j in 0..order {
                let v = table[relabel[i]][relabel[j]] as usize;
                flat[i * order + j] = relabel[v] as u32;
            }
        }
        let mut inverses = vec![0u32; order];
        for g in 0..order {
            let row = &flat[g * order..(g + 1) * order];
            let h = row
                .iter()
                .position(|&v| v == 0)
                .ok_or_else(|| Error::NotAGroup(format!("element {g} has no right inverse")))?;
            if flat[h * order + g] != 0 {
                return Err(Error::NotAGroup(format!("inverse of {g} is not two-sided")));
            }
            inverses[g] = h as u32;
        }
        let ct = CayleyTable {
            order,
            table: flat,
            inverses,
        };
        ct.check_associative()?;
        Ok((ct, relabel))
    }

    /// Light's test: associativity only needs checking against a set that generates
    /// the table as a magma.
    fn check_associative(&self) -> Result<()> {
        let n = self.order;
        let mut reached = vec![false; n];
        let mut gens: Vec<usize> = Vec::new();
        for g in 0..n {
            if reached[g] {
                continue;
            }
            gens.push(g);
            reached.iter_mut().for_each(|r| *r = false);
            let mut stack = gens.clone();
            for &s in &gens {
                reached[s] = true;
            }
            while let Some(h) = stack.pop() {
                for &s in &gens {
                    for v in [self.table[h * n + s], self.table[s * n + h]] {
                        let v = v as usize;
                        if !reached[v] {
                            reached[v] = true;
                            stack.push(v);
                        }
                    }
                }
            }
        }
        for &g in &gens {
            for a in 0..n {
                let ag = self.table[a * n + g] as usize;
                for b in 0..n {
                    let lhs = self.table[ag * n + b];
                    let rhs = self.table[a * n + self.table[g * n + b] as usize];
                    if lhs != rhs {
                        return Err(Error::NotAGroup(format!(
                            "not associative: ({a}·{g})·{b} != {a}·({g}·{b})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, g: Element, h: Element) -> Element {
        Element(self.table[g.0 as usize * self.order + h.0 as usize] as u64)
    }

    #[inline]
    pub fn inv(&self, g: Element) -> Element {
        Element(self.inverses[g.0 as usize] as u64)
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.table
            .chunks(self.order)
            .map(|r| r.iter().map(|&v| v as u64).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> Vec<Vec<u64>> {
        (0..n)
            .map(|i| (0..n).map(|j| ((i + j) % n) as u64).collect())
            .collect()
    }

    #[test]
    fn accepts_cyclic() {
        let (ct, relabel) = CayleyTable::new(&cyclic(6)).unwrap();
        assert_eq!(ct.order(), 6);
        assert_eq!(relabel, (0..6).collect::<Vec<_>>());
        assert_eq!(ct.inv(Element(2)), Element(4));
    }

    #[test]
    fn relabels_identity_to_zero() {
        // Z/3 with the identity stored at index 2
        let t = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let (ct, relabel) = CayleyTable::new(&t).unwrap();
        assert_eq!(relabel[0], 2);
        for g in 0..3 {
            assert_eq!(ct.mul(Element(0), Element(g)), Element(g));
        }
    }

    #[test]
    fn rejects_non_associative_loop() {
        // a Latin square with identity 0 that is not associative (order-5 loop)
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(CayleyTable::new(&t), Err(Error::NotAGroup(_))));
    }

    #[test]
    fn rejects_missing_identity_and_bad_entries() {
        assert!(CayleyTable::new(&[vec![0, 0], vec![0, 0]]).is_err());
        assert!(CayleyTable::new(&[vec![0, 5], vec![1, 0]]).is_err());
        assert!(CayleyTable::new(&[]).is_err());
    }
}
