//! The metacyclic family `Z/p^m ⋊_λ Z/p^n`: the correction factor `ε_λ`, the `p`-power
//! map, the filtration `G_r = {(a, x) : p^r | a, p^r | x}`, the existence criterion
//! (`p ≥ 5` and `n = m`) and the classification of the `m = n` groups for odd `p`.

use std::sync::Arc;

use serde::Serialize;

use crate::arith::{checked_pow, mul_mod, pow_mod, valuation};
use crate::beauville::{search, SearchOptions};
use crate::error::{Error, Result};
use crate::group::{Element, Group, GroupDescription, Metacyclic};

/// Largest group order on which audits run over all pairs.
pub const FULL_AUDIT_LIMIT: u64 = 10_000;
/// Largest group order on which `admits_beauville` can be cross-checked by search.
pub const SEARCH_AUDIT_LIMIT: u64 = 4096;

fn metacyclic(group: &Group) -> Result<&Metacyclic> {
    group.metacyclic().ok_or_else(|| {
        Error::PreconditionViolated(format!("{} is not a metacyclic group", group.spec()))
    })
}

fn modulus(p: u64, k: u32) -> Result<u64> {
    checked_pow(p, k).ok_or_else(|| Error::PreconditionViolated(format!("{p}^{k} overflows")))
}

/// `ε_λ(x) = (1/p)·Σ_{i<p} λ^{ix}` modulo `p^m`, with `λ` and `x` read as their least
/// non-negative representatives. The sum is taken modulo `p^{m+1}`, one guard digit, so the
/// division by `p` is exact.
pub fn epsilon_lambda(p: u64, m: u32, lambda: u64, x: u64) -> Result<u64> {
    if lambda % p != 1 % p {
        return Err(Error::PreconditionViolated(format!(
            "epsilon needs lambda ≡ 1 mod p, got lambda={lambda}, p={p}"
        )));
    }
    let pm = modulus(p, m)?;
    let guard = modulus(p, m + 1)?;
    let lambda = lambda % pm;
    let step = pow_mod(lambda, x, guard);
    let (mut sum, mut term) = (0u64, 1u64);
    for _ in 0..p {
        sum = (sum + term) % guard;
        term = mul_mod(term, step, guard);
    }
    if sum % p != 0 {
        return Err(Error::NotDivisible { p, lambda, x });
    }
    Ok((sum / p) % pm)
}

/// One `p`-th power by the closed form `(a, x) ↦ (p·a·ε_λ(x), p·x)`.
fn pth_power(mc: &Metacyclic, g: Element) -> Element {
    let (a, x) = mc.pair(g);
    let eps = epsilon_lambda(mc.p(), mc.m(), mc.lambda(), x).expect("lambda ≡ 1 mod p");
    let a = mul_mod(mul_mod(mc.p(), a, mc.pm()), eps, mc.pm());
    mc.element(a, mul_mod(mc.p(), x, mc.pn()))
}

/// `g^(p^s)` by iterating the closed form. Debug builds compare against direct powering.
pub fn power_map(group: &Group, s: u32, g: Element) -> Result<Element> {
    let mc = metacyclic(group)?;
    let mut h = g;
    for _ in 0..s {
        h = pth_power(mc, h);
    }
    debug_assert_eq!(
        h,
        (0..s).fold(g, |acc, _| group.pow(acc, mc.p())),
        "closed-form power disagrees with repeated multiplication"
    );
    Ok(h)
}

/// The subgroup `G_r` of pairs with both coordinates divisible by `p^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationLevel {
    pub r: u32,
    pub members: Vec<Element>,
}

pub fn filtration_level(group: &Group, r: u32) -> Result<FiltrationLevel> {
    let mc = metacyclic(group)?;
    let step = |k: u32| checked_pow(mc.p(), r.min(k)).expect("fits");
    let (sa, sx) = (step(mc.m()), step(mc.n()));
    let mut members = Vec::new();
    for a in (0..mc.pm()).step_by(sa as usize) {
        for x in (0..mc.pn()).step_by(sx as usize) {
            members.push(mc.element(a, x));
        }
    }
    Ok(FiltrationLevel { r, members })
}

/// Outcome of checking that `P_s` induces an isomorphism `G_r/G_{r+1} → G_{r+s}/G_{r+s+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiltrationReport {
    pub group: String,
    pub r: u32,
    pub s: u32,
    /// Size of `G_r`, every element of which was raised to the `p^s`-th power.
    pub members: u64,
    /// Every power landed in `G_{r+s}`.
    pub lands_in_target: bool,
    /// The coset of the power depends only on the coset of the element.
    pub well_defined: bool,
    pub bijective: bool,
    pub homomorphism: bool,
    /// Image coset of each source coset `(i, j)`, listed at index `i·p + j`.
    pub images: Vec<[u64; 2]>,
}

impl FiltrationReport {
    pub fn is_isomorphism(&self) -> bool {
        self.lands_in_target && self.well_defined && self.bijective && self.homomorphism
    }
}

/// `(r, s)` pairs for which the isomorphism is claimed on this group.
pub fn legal_filtration_pairs(group: &Group) -> Result<Vec<(u32, u32)>> {
    let mc = metacyclic(group)?;
    let top = mc.m().min(mc.n());
    let r0 = u32::from(minus_one_mod_four(mc));
    Ok((r0..top)
        .flat_map(|r| (0..top - r).map(move |s| (r, s)))
        .collect())
}

fn minus_one_mod_four(mc: &Metacyclic) -> bool {
    mc.p() == 2 && mc.lambda() % 4 == 3
}

pub fn filtration_iso_check(group: &Group, r: u32, s: u32) -> Result<FiltrationReport> {
    let mc = metacyclic(group)?;
    let p = mc.p();
    let top = mc.m().min(mc.n());
    if minus_one_mod_four(mc) && r == 0 {
        return Err(Error::PreconditionViolated(
            "for p = 2 and lambda ≡ −1 mod 4 the isomorphism is only claimed for r ≥ 1".into(),
        ));
    }
    if r + s + 1 > top {
        return Err(Error::PreconditionViolated(format!(
            "need r + s < min(m, n) = {top} for both quotients to have order p², got r={r}, s={s}"
        )));
    }
    let label = |g: Element, level: u32| -> Option<[u64; 2]> {
        let (a, x) = mc.pair(g);
        let q = p.pow(level);
        (a % q == 0 && x % q == 0).then(|| [(a / q) % p, (x / q) % p])
    };
    let code = |l: [u64; 2]| (l[0] * p + l[1]) as usize;

    let level = filtration_level(group, r)?;
    let cells = (p * p) as usize;
    let mut images: Vec<Option<[u64; 2]>> = vec![None; cells];
    let (mut lands, mut well_defined) = (true, true);
    for &g in &level.members {
        let src = label(g, r).expect("member of G_r");
        match label(power_map(group, s, g)?, r + s) {
            None => lands = false,
            Some(img) => match images[code(src)] {
                None => images[code(src)] = Some(img),
                Some(prev) if prev != img => well_defined = false,
                Some(_) => {}
            },
        }
    }
    let images: Vec<[u64; 2]> = images.into_iter().map(|i| i.unwrap_or([p, p])).collect();
    let mut hit = vec![false; cells];
    for img in &images {
        if img[0] < p {
            hit[code(*img)] = true;
        }
    }
    let bijective = hit.iter().all(|&h| h);
    let add = |u: [u64; 2], v: [u64; 2]| [(u[0] + v[0]) % p, (u[1] + v[1]) % p];
    let cell = |c: usize| [c as u64 / p, c as u64 % p];
    let homomorphism = (0..cells).all(|i| {
        (0..cells).all(|j| images[code(add(cell(i), cell(j)))] == add(images[i], images[j]))
    });
    Ok(FiltrationReport {
        group: group.spec(),
        r,
        s,
        members: level.members.len() as u64,
        lands_in_target: lands,
        well_defined,
        bijective,
        homomorphism,
        images,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmitsAudit {
    pub count: u64,
    pub exhaustive: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmitsVerdict {
    pub group: String,
    pub admits: bool,
    pub reason: String,
    pub audit: Option<AdmitsAudit>,
}

/// Existence of a structure on `Z/p^m ⋊_λ Z/p^n`: exactly when `p ≥ 5` and `n = m`.
pub fn admits_beauville(p: u64, m: u32, n: u32, lambda: u64) -> Result<AdmitsVerdict> {
    let group = Group::new(GroupDescription::metacyclic(p, m, n, lambda))?;
    let reason = match (p >= 5, n == m) {
        (true, true) => "p ≥ 5 and n = m",
        (false, true) => "p < 5",
        (true, false) => "n ≠ m",
        (false, false) => "p < 5 and n ≠ m",
    };
    Ok(AdmitsVerdict {
        group: group.spec(),
        admits: p >= 5 && n == m,
        reason: reason.to_string(),
        audit: None,
    })
}

/// As [`admits_beauville`], cross-checked by exhaustive search when the order allows.
pub fn admits_beauville_audited(
    p: u64,
    m: u32,
    n: u32,
    lambda: u64,
    options: &SearchOptions,
) -> Result<AdmitsVerdict> {
    let mut verdict = admits_beauville(p, m, n, lambda)?;
    let group = Arc::new(Group::new(GroupDescription::metacyclic(p, m, n, lambda))?);
    if group.order() <= SEARCH_AUDIT_LIMIT {
        let out = search(&group, options)?;
        let agrees = match out.exists() {
            Some(found) => found == verdict.admits,
            None => false,
        };
        verdict.audit = Some(AdmitsAudit {
            count: out.count,
            exhaustive: out.exhaustive,
            agrees,
        });
    }
    Ok(verdict)
}

/// `(p, n, r)` with `r = n − v_p(λ − 1)` for non-abelian groups and `r = 0` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ClassificationInvariant {
    pub p: u64,
    pub n: u32,
    pub r: u32,
    pub abelian: bool,
}

pub fn classify(p: u64, n: u32, lambda: u64) -> Result<ClassificationInvariant> {
    if p == 2 {
        return Err(Error::OddPrimeOnly(p));
    }
    let mc = Metacyclic::new(p, n, n, lambda)?;
    let lambda = mc.lambda();
    if lambda == 1 {
        return Ok(ClassificationInvariant {
            p,
            n,
            r: 0,
            abelian: true,
        });
    }
    let s = valuation(lambda - 1, p).expect("lambda ≠ 1");
    Ok(ClassificationInvariant {
        p,
        n,
        r: n - s,
        abelian: false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsomorphismWitness {
    pub p: u64,
    pub n: u32,
    pub lambda: u64,
    pub lambda_prime: u64,
    /// The isomorphism is `(a, x) ↦ (a, u·x)`.
    pub u: u64,
    pub audited_pairs: u64,
}

impl IsomorphismWitness {
    pub fn apply(&self, source: &Metacyclic, target: &Metacyclic, g: Element) -> Element {
        let (a, x) = source.pair(g);
        target.element(a, mul_mod(self.u, x, target.pn()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Isomorphism(IsomorphismWitness),
    Refuted {
        left: ClassificationInvariant,
        right: ClassificationInvariant,
    },
}

/// An explicit isomorphism `Z/p^n ⋊_λ Z/p^n → Z/p^n ⋊_λ' Z/p^n` of the shape `(id, ·u)`,
/// found by enumerating units `u` with `λ'^u ≡ λ`, or a refutation by invariants.
pub fn isomorphism_witness(
    p: u64,
    n: u32,
    lambda: u64,
    lambda_prime: u64,
) -> Result<WitnessOutcome> {
    let left = classify(p, n, lambda)?;
    let right = classify(p, n, lambda_prime)?;
    if left != right {
        return Ok(WitnessOutcome::Refuted { left, right });
    }
    let g = Group::new(GroupDescription::metacyclic(p, n, n, lambda))?;
    let h = Group::new(GroupDescription::metacyclic(p, n, n, lambda_prime))?;
    let (src, dst) = (metacyclic(&g)?, metacyclic(&h)?);
    let pn = src.pn();
    let u = (1..pn)
        .filter(|u| u % p != 0)
        .find(|&u| dst.lambda_pow(u) == src.lambda())
        .ok_or(Error::WitnessSearchFailed {
            lambda,
            lambda_prime,
        })?;
    let mut witness = IsomorphismWitness {
        p,
        n,
        lambda: src.lambda(),
        lambda_prime: dst.lambda(),
        u,
        audited_pairs: 0,
    };
    witness.audited_pairs = audit_witness(&witness, src, dst)?;
    Ok(WitnessOutcome::Isomorphism(witness))
}

fn audit_witness(w: &IsomorphismWitness, src: &Metacyclic, dst: &Metacyclic) -> Result<u64> {
    let order = src.order();
    let phi = |g: Element| w.apply(src, dst, g);
    let mut seen = vec![false; order as usize];
    for g in 0..order {
        let img = phi(Element(g));
        if std::mem::replace(&mut seen[img.0 as usize], true) {
            return Err(Error::VerificationFailed(format!(
                "witness u={} is not injective",
                w.u
            )));
        }
    }
    let pairs: Box<dyn Iterator<Item = (u64, u64)>> = if order <= FULL_AUDIT_LIMIT {
        Box::new((0..order).flat_map(move |g| (0..order).map(move |h| (g, h))))
    } else {
        Box::new(
            (0..FULL_AUDIT_LIMIT).map(move |i| ((i * 7919) % order, (i * 104_729 + 1) % order)),
        )
    };
    let mut count = 0;
    for (g, h) in pairs {
        let (g, h) = (Element(g), Element(h));
        if phi(src.mul(g, h)) != dst.mul(phi(g), phi(h)) {
            return Err(Error::VerificationFailed(format!(
                "witness u={} is not a homomorphism",
                w.u
            )));
        }
        count += 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests;
