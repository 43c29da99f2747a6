//! Branch-signature arithmetic for triangle covers: hyperbolicity and Riemann–Hurwitz.
//! Everything is exact; no floating point.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::beauville::Signature;
use crate::error::{Error, Result};

/// Branch orders `(ℓ1, ℓ2, ℓ3)`, each at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriangleSignature([u64; 3]);

impl TriangleSignature {
    pub fn new(l1: u64, l2: u64, l3: u64) -> Result<Self> {
        let orders = [l1, l2, l3];
        if orders.iter().any(|&l| l < 2) {
            return Err(Error::InvalidSignature(format!(
                "branch orders must be at least 2, got {orders:?}"
            )));
        }
        Ok(TriangleSignature(orders))
    }

    pub fn orders(&self) -> [u64; 3] {
        self.0
    }

    /// The two halves of a structure's signature.
    pub fn halves(sig: &Signature) -> Result<(TriangleSignature, TriangleSignature)> {
        let [a, b, c] = sig.first;
        let [d, e, f] = sig.second;
        Ok((Self::new(a, b, c)?, Self::new(d, e, f)?))
    }

    /// `1 − 1/ℓ1 − 1/ℓ2 − 1/ℓ3`.
    pub fn defect(&self) -> BigRational {
        self.0.iter().fold(BigRational::one(), |acc, &l| {
            acc - BigRational::new(BigInt::one(), BigInt::from(l))
        })
    }
}

impl fmt::Display for TriangleSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "({a}, {b}, {c})")
    }
}

pub fn is_hyperbolic(sig: &TriangleSignature) -> bool {
    sig.defect().is_positive()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverData {
    pub order: u64,
    pub signature: TriangleSignature,
    pub genus: u64,
}

/// `g = 1 + |G|·(1 − Σ 1/ℓ)/2`, rejected unless `2g − 2` comes out an integer `≥ −2`.
pub fn genus(order: u64, sig: &TriangleSignature) -> Result<u64> {
    if order == 0 {
        return Err(Error::InconsistentCover(
            "group order must be positive".into(),
        ));
    }
    let two_g_minus_two = sig.defect() * BigRational::from_integer(BigInt::from(order));
    if !two_g_minus_two.is_integer() {
        return Err(Error::InconsistentCover(format!(
            "{order}·(1 − Σ1/ℓ) = {two_g_minus_two} is not an integer for {sig}"
        )));
    }
    let v = two_g_minus_two.to_integer();
    if v.clone() % 2 != BigInt::zero() || v < BigInt::from(-2) {
        return Err(Error::InconsistentCover(format!(
            "2g − 2 = {v} is odd or below −2 for order {order} and {sig}"
        )));
    }
    (v / BigInt::from(2) + BigInt::one())
        .to_u64()
        .ok_or_else(|| Error::InconsistentCover("genus does not fit in 64 bits".into()))
}

pub fn cover_data(order: u64, sig: &TriangleSignature) -> Result<CoverData> {
    Ok(CoverData {
        order,
        signature: *sig,
        genus: genus(order, sig)?,
    })
}
