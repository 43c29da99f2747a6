//! Finite subgroups of `GL_d(F_p)` realized by closing a generator list.

use std::collections::{HashMap, VecDeque};

use crate::arith::{is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};

use super::Element;

pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// Row-major matrix entries reduced mod p.
pub type Matrix = Box<[u32]>;

#[derive(Debug, Clone)]
pub struct MatrixGroup {
    p: u64,
    dim: usize,
    /// Lexicographically sorted, so handles follow matrix order.
    elements: Vec<Matrix>,
    index: HashMap<Matrix, u64>,
    identity: Element,
    generators: Vec<Element>,
}

pub(crate) fn mat_mul(p: u64, dim: usize, a: &[u32], b: &[u32]) -> Matrix {
    let mut out = vec![0u32; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k] as u64;
            if aik == 0 {
                continue;
            }
            for j in 0..dim {
                let v = out[i * dim + j] as u64 + mul_mod(aik, b[k * dim + j] as u64, p);
                out[i * dim + j] = (v % p) as u32;
            }
        }
    }
    out.into_boxed_slice()
}

fn determinant(p: u64, dim: usize, m: &[u32]) -> u64 {
    let mut a: Vec<u64> = m.iter().map(|&v| v as u64).collect();
    let mut det = 1u64;
    for col in 0..dim {
        let Some(pivot) = (col..dim).find(|&r| a[r * dim + col] != 0) else {
            return 0;
        };
        if pivot != col {
            for j in 0..dim {
                a.swap(pivot * dim + j, col * dim + j);
            }
            det = (p - det) % p;
        }
        let pv = a[col * dim + col];
        det = mul_mod(det, pv, p);
        let inv = pow_mod(pv, p - 2, p);
        for r in col + 1..dim {
            let f = mul_mod(a[r * dim + col], inv, p);
            if f == 0 {
                continue;
            }
            for j in col..dim {
                let sub = mul_mod(f, a[col * dim + j], p);
                a[r * dim + j] = (a[r * dim + j] + p - sub) % p;
            }
        }
    }
    det
}

impl MatrixGroup {
    pub fn new(p: u64, dim: usize, generators: &[Vec<u64>], cap: usize) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidSpec(format!("p={p} is not a usable prime")));
        }
        if dim == 0 {
            return Err(Error::InvalidSpec(
                "matrix dimension must be positive".into(),
            ));
        }
        let mut gens: Vec<Matrix> = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            if g.len() != dim * dim {
                return Err(Error::InvalidSpec(format!(
                    "generator {i} has {} entries, expected {}",
                    g.len(),
                    dim * dim
                )));
            }
            let m: Matrix = g.iter().map(|&v| (v % p) as u32).collect();
            if determinant(p, dim, &m) == 0 {
                return Err(Error::InvalidSpec(format!(
                    "generator {i} is singular mod {p}"
                )));
            }
            gens.push(m);
        }
        let identity: Matrix = (0..dim * dim)
            .map(|k| u32::from(k / dim == k % dim))
            .collect();

        let mut seen: HashMap<Matrix, ()> = HashMap::new();
        seen.insert(identity.clone(), ());
        let mut queue = VecDeque::from([identity.clone()]);
        while let Some(h) = queue.pop_front() {
            for g in &gens {
                let prod = mat_mul(p, dim, &h, g);
                if !seen.contains_key(&prod) {
                    if seen.len() >= cap {
                        return Err(Error::ClosureCapExceeded { cap });
                    }
                    seen.insert(prod.clone(), ());
                    queue.push_back(prod);
                }
            }
        }
        let mut elements: Vec<Matrix> = seen.into_keys().collect();
        elements.sort();
        let index: HashMap<Matrix, u64> = elements
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u64))
            .collect();
        let identity_el = Element(index[&identity]);
        let generators = gens.iter().map(|g| Element(index[g])).collect();
        Ok(MatrixGroup {
            p,
            dim,
            elements,
            index,
            identity: identity_el,
            generators,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn identity(&self) -> Element {
        self.identity
    }
    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn matrix(&self, g: Element) -> &[u32] {
        &self.elements[g.0 as usize]
    }

    /// Handle of a matrix, if it belongs to the group. Equal matrices share a handle.
    pub fn lookup(&self, entries: &[u64]) -> Option<Element> {
        if entries.len() != self.dim * self.dim {
            return None;
        }
        let m: Matrix = entries.iter().map(|&v| (v % self.p) as u32).collect();
        self.index.get(&m).map(|&i| Element(i))
    }

    #[inline]
    pub fn mul(&self, g: Element, h: Element) -> Element {
        let prod = mat_mul(self.p, self.dim, self.matrix(g), self.matrix(h));
        Element(self.index[&prod])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_mod_5_has_125_elements() {
        let x = vec![1, 1, 0, 0, 1, 0, 0, 0, 1];
        let y = vec![1, 0, 0, 0, 1, 1, 0, 0, 1];
        let g = MatrixGroup::new(5, 3, &[x, y], DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(g.order(), 125);
        // the identity is the lexicographically least unitriangular matrix
        assert_eq!(g.identity(), Element(0));
        assert_eq!(g.lookup(&[1, 0, 0, 0, 1, 0, 0, 0, 1]), Some(Element(0)));
        assert_eq!(g.lookup(&[2, 0, 0, 0, 1, 0, 0, 0, 1]), None);
    }

    #[test]
    fn cap_is_an_error() {
        let x = vec![1, 1, 0, 0, 1, 0, 0, 0, 1];
        let y = vec![1, 0, 0, 0, 1, 1, 0, 0, 1];
        assert_eq!(
            MatrixGroup::new(5, 3, &[x, y], 100).unwrap_err(),
            Error::ClosureCapExceeded { cap: 100 }
        );
    }

    #[test]
    fn singular_generator_rejected() {
        assert!(MatrixGroup::new(5, 2, &[vec![1, 2, 2, 4]], 10).is_err());
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(5, 2, &[1, 2, 3, 4]), 3); // -2 mod 5
        assert_eq!(determinant(7, 3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]), 6);
    }
}
