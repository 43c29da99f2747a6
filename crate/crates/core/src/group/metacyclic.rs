//! The split metacyclic groups `Z/p^m ⋊_λ Z/p^n`.
//!
//! Elements are pairs `(a, x)` with `a` mod `p^m` and `x` mod `p^n`, multiplied as
//! `(a, x)(b, y) = (a + λ^x·b, x + y)`. With this convention the `p`-th power is
//! `(a, x)^p = (a·(1 + λ^x + … + λ^{(p-1)x}), p·x)`. The handle of `(a, x)` is
//! `a·p^n + x`, so handle order is lexicographic order on pairs.

use crate::arith::{is_prime, mul_mod, multiplicative_order, pow_mod, valuation};
use crate::error::{Error, Result};

use super::Element;

#[derive(Debug, Clone)]
pub struct Metacyclic {
    p: u64,
    m: u32,
    n: u32,
    lambda: u64,
    pm: u64,
    pn: u64,
    /// `λ^0, λ^1, …` over one period of `λ` mod `p^m`.
    lambda_pows: Vec<u64>,
    /// `min(v_p(1 - λ^x), m)` indexed by `x` mod the period of `λ`.
    conj_valuation: Vec<u32>,
}

impl Metacyclic {
    pub fn new(p: u64, m: u32, n: u32, lambda: u64) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidLambda {
            p,
            m,
            n,
            lambda,
            reason: reason.to_string(),
        };
        if !is_prime(p) {
            return Err(Error::InvalidSpec(format!("p={p} is not prime")));
        }
        if m == 0 || n == 0 {
            return Err(Error::InvalidSpec(format!(
                "exponents must be at least 1 (m={m}, n={n})"
            )));
        }
        let pm = p
            .checked_pow(m)
            .ok_or_else(|| Error::InvalidSpec("p^m overflows".into()))?;
        let pn = p
            .checked_pow(n)
            .ok_or_else(|| Error::InvalidSpec("p^n overflows".into()))?;
        pm.checked_mul(pn)
            .ok_or_else(|| Error::InvalidSpec("group order overflows".into()))?;
        let lambda = lambda % pm;
        let period = multiplicative_order(lambda, pm).ok_or_else(|| invalid("not a unit"))?;
        if pow_mod(lambda, pn, pm) != 1 {
            return Err(invalid(&format!(
                "order {period} of lambda does not divide p^n = {pn}"
            )));
        }
        let mut lambda_pows = Vec::with_capacity(period as usize);
        let mut acc = 1u64;
        for _ in 0..period {
            lambda_pows.push(acc);
            acc = mul_mod(acc, lambda, pm);
        }
        let conj_valuation = lambda_pows
            .iter()
            .map(|&l| {
                let diff = (1 + pm - l) % pm;
                valuation(diff, p).map_or(m, |v| v.min(m))
            })
            .collect();
        Ok(Metacyclic {
            p,
            m,
            n,
            lambda,
            pm,
            pn,
            lambda_pows,
            conj_valuation,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn lambda(&self) -> u64 {
        self.lambda
    }
    /// `p^m`, the modulus of the first coordinate.
    pub fn pm(&self) -> u64 {
        self.pm
    }
    /// `p^n`, the modulus of the second coordinate.
    pub fn pn(&self) -> u64 {
        self.pn
    }
    pub fn order(&self) -> u64 {
        self.pm * self.pn
    }
    pub fn is_abelian(&self) -> bool {
        self.lambda == 1 % self.pm
    }
    /// Order of `λ` in `(Z/p^m)^×`.
    pub fn lambda_period(&self) -> u64 {
        self.lambda_pows.len() as u64
    }

    #[inline]
    pub fn lambda_pow(&self, x: u64) -> u64 {
        self.lambda_pows[(x % self.lambda_pows.len() as u64) as usize]
    }

    #[inline]
    pub fn element(&self, a: u64, x: u64) -> Element {
        Element((a % self.pm) * self.pn + x % self.pn)
    }

    #[inline]
    pub fn pair(&self, g: Element) -> (u64, u64) {
        (g.0 / self.pn, g.0 % self.pn)
    }

    #[inline]
    pub fn mul(&self, g: Element, h: Element) -> Element {
        let (a, x) = self.pair(g);
        let (b, y) = self.pair(h);
        let a2 = (a + mul_mod(self.lambda_pow(x), b, self.pm)) % self.pm;
        Element(a2 * self.pn + (x + y) % self.pn)
    }

    /// `g·h` for every `h` in handle order, by running sums instead of reductions.
    pub fn left_row(&self, g: Element) -> Vec<Element> {
        let (a, x) = self.pair(g);
        let step = self.lambda_pow(x);
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut c = a;
        for _ in 0..self.pm {
            let mut z = x;
            for _ in 0..self.pn {
                out.push(Element(c * self.pn + z));
                z += 1;
                if z == self.pn {
                    z = 0;
                }
            }
            c += step;
            if c >= self.pm {
                c -= self.pm;
            }
        }
        out
    }

    #[inline]
    pub fn inv(&self, g: Element) -> Element {
        let (a, x) = self.pair(g);
        let neg_x = (self.pn - x) % self.pn;
        let b = mul_mod(self.lambda_pow(neg_x), a, self.pm);
        Element(((self.pm - b) % self.pm) * self.pn + neg_x)
    }

    /// Least element of the conjugacy class of `(a, x)`.
    ///
    /// Conjugating `(a, x)` by `(b, y)` gives `(λ^y·a + (1 - λ^x)·b, x)`, so the class
    /// is `{(c, x) : c ≡ λ^y·a mod p^v}` with `v = min(v_p(1 - λ^x), m)`.
    pub fn class_id(&self, g: Element) -> Element {
        let (a, x) = self.pair(g);
        let period = self.lambda_pows.len() as u64;
        let v = self.conj_valuation[(x % period) as usize];
        let q = self.p.pow(v);
        let base = a % q;
        let mut least = base;
        if base != 0 {
            for &mu in &self.lambda_pows {
                let c = mul_mod(mu, base, q);
                if c < least {
                    least = c;
                    if least == 0 {
                        break;
                    }
                }
            }
        }
        Element(least * self.pn + x)
    }
}
