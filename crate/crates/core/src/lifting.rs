//! Surjections between realized groups, lifting structures along them, and finite towers of
//! compatible structures on the metacyclic family.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::arith::pow_mod;
use crate::beauville::{search, verify, BeauvilleStructure, SearchOptions, Triple};
use crate::error::{Error, Result};
use crate::group::{frattini_quotient, Element, FrattiniQuotientMap, Group, GroupDescription};

/// Largest source order on which [`Surjection::audit`] checks every pair.
pub const FULL_AUDIT_LIMIT: u64 = 10_000;

#[derive(Debug, Clone)]
enum Kind {
    Identity,
    /// `(a, x) ↦ (a mod p^m, x mod p^n)` between metacyclic groups.
    Reduction,
    Trivial,
    Frattini(FrattiniQuotientMap),
}

/// A surjective homomorphism `source → target` with access to fibers.
#[derive(Debug, Clone)]
pub struct Surjection {
    source: Arc<Group>,
    target: Arc<Group>,
    kind: Kind,
    fibers: OnceLock<Vec<Vec<Element>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurjectionAudit {
    pub pairs_checked: u64,
    /// Every pair was checked rather than generator-element pairs.
    pub full: bool,
}

fn no_surjection(source: &Group, target: &Group) -> Error {
    Error::NoSurjection {
        source_spec: source.spec(),
        target_spec: target.spec(),
    }
}

impl Surjection {
    fn with_kind(source: &Arc<Group>, target: &Arc<Group>, kind: Kind) -> Self {
        Surjection {
            source: Arc::clone(source),
            target: Arc::clone(target),
            kind,
            fibers: OnceLock::new(),
        }
    }

    pub fn identity(group: &Arc<Group>) -> Self {
        Self::with_kind(group, group, Kind::Identity)
    }

    /// The coordinatewise reduction between metacyclic groups of the same prime.
    pub fn reduction(source: &Arc<Group>, target: &Arc<Group>) -> Result<Self> {
        let (Some(s), Some(t)) = (source.metacyclic(), target.metacyclic()) else {
            return Err(no_surjection(source, target));
        };
        if s.p() != t.p() || t.m() > s.m() || t.n() > s.n() || s.lambda() % t.pm() != t.lambda() {
            return Err(no_surjection(source, target));
        }
        Ok(Self::with_kind(source, target, Kind::Reduction))
    }

    pub fn to_trivial(source: &Arc<Group>) -> Result<Self> {
        let target = Arc::new(Group::new(GroupDescription::cyclic(1))?);
        Ok(Self::with_kind(source, &target, Kind::Trivial))
    }

    /// `G → G/Φ(G)`. On metacyclic groups this is the reduction onto `(Z/p)²`.
    pub fn frattini(source: &Arc<Group>) -> Result<Self> {
        let f = frattini_quotient(source)?;
        let target = Arc::clone(f.target());
        if source.metacyclic().is_some() {
            return Self::reduction(source, &target);
        }
        Ok(Self::with_kind(source, &target, Kind::Frattini(f)))
    }

    /// Picks the canonical map between two groups: identity, metacyclic reduction, the map
    /// to the trivial group, or the Frattini quotient.
    pub fn between(source: &Arc<Group>, target: &Arc<Group>) -> Result<Self> {
        if source.description() == target.description() {
            return Ok(Self::identity(source));
        }
        if target.is_trivial() {
            return Self::to_trivial(source);
        }
        if source.metacyclic().is_some() && target.metacyclic().is_some() {
            return Self::reduction(source, target);
        }
        let f = Self::frattini(source).map_err(|_| no_surjection(source, target))?;
        if f.target.description() == target.description() {
            Ok(f)
        } else {
            Err(no_surjection(source, target))
        }
    }

    pub fn source(&self) -> &Arc<Group> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Group> {
        &self.target
    }

    pub fn map(&self, g: Element) -> Element {
        match &self.kind {
            Kind::Identity => g,
            Kind::Trivial => self.target.identity(),
            Kind::Frattini(f) => f.image(g),
            Kind::Reduction => {
                let (s, t) = (
                    self.source.metacyclic().unwrap(),
                    self.target.metacyclic().unwrap(),
                );
                let (a, x) = s.pair(g);
                t.element(a % t.pm(), x % t.pn())
            }
        }
    }

    pub fn map_triple(&self, t: &Triple) -> Triple {
        t.map(|e| self.map(e))
    }

    /// `|source| / |target|`.
    pub fn fiber_size(&self) -> u64 {
        self.source.order() / self.target.order()
    }

    /// All preimages of `t`, ascending.
    pub fn fiber(&self, t: Element) -> Vec<Element> {
        match &self.kind {
            Kind::Identity => vec![t],
            Kind::Reduction => {
                let (s, tg) = (
                    self.source.metacyclic().unwrap(),
                    self.target.metacyclic().unwrap(),
                );
                let (a, x) = tg.pair(t);
                let mut out = Vec::with_capacity(self.fiber_size() as usize);
                for a2 in (a..s.pm()).step_by(tg.pm() as usize) {
                    for x2 in (x..s.pn()).step_by(tg.pn() as usize) {
                        out.push(s.element(a2, x2));
                    }
                }
                out
            }
            Kind::Trivial => self.source.elements().collect(),
            Kind::Frattini(_) => self.fiber_table()[t.0 as usize].clone(),
        }
    }

    /// The `index`-th preimage of `t` in ascending order.
    pub fn fiber_element(&self, t: Element, index: usize) -> Option<Element> {
        match &self.kind {
            Kind::Reduction => {
                let (s, tg) = (
                    self.source.metacyclic().unwrap(),
                    self.target.metacyclic().unwrap(),
                );
                let (a, x) = tg.pair(t);
                let cols = s.pn() / tg.pn();
                let (i, j) = (index as u64 / cols, index as u64 % cols);
                (i < s.pm() / tg.pm()).then(|| s.element(a + i * tg.pm(), x + j * tg.pn()))
            }
            _ => self.fiber(t).get(index).copied(),
        }
    }

    /// Least preimage.
    pub fn least_lift(&self, t: Element) -> Element {
        self.fiber_element(t, 0)
            .expect("surjection has nonempty fibers")
    }

    fn fiber_table(&self) -> &Vec<Vec<Element>> {
        self.fibers.get_or_init(|| {
            let mut table = vec![Vec::new(); self.target.order() as usize];
            for g in self.source.elements() {
                table[self.map(g).0 as usize].push(g);
            }
            table
        })
    }

    /// Checks the homomorphism property and that all fibers have equal size. Sources up to
    /// [`FULL_AUDIT_LIMIT`] are checked on all pairs; larger ones on every pair
    /// `(generator, element)`, which suffices because each element is a word in generators.
    pub fn audit(&self) -> Result<SurjectionAudit> {
        let src = &self.source;
        let tgt = &self.target;
        let full = src.order() <= FULL_AUDIT_LIMIT;
        let mut pairs = 0u64;
        let fail = |g: Element, h: Element| {
            Error::VerificationFailed(format!(
                "map {} → {} is not multiplicative at ({}, {})",
                src.spec(),
                tgt.spec(),
                g.0,
                h.0
            ))
        };
        if self.map(src.identity()) != tgt.identity() {
            return Err(fail(src.identity(), src.identity()));
        }
        let lefts: Vec<Element> = if full {
            src.elements().collect()
        } else {
            src.generators().to_vec()
        };
        for &g in &lefts {
            let mg = self.map(g);
            for h in src.elements() {
                if self.map(src.mul(g, h)) != tgt.mul(mg, self.map(h)) {
                    return Err(fail(g, h));
                }
                pairs += 1;
            }
        }
        let mut sizes = vec![0u64; tgt.order() as usize];
        for g in src.elements() {
            sizes[self.map(g).0 as usize] += 1;
        }
        if sizes.iter().any(|&c| c != self.fiber_size()) {
            return Err(Error::VerificationFailed(format!(
                "fibers of {} → {} are not all of size {}",
                src.spec(),
                tgt.spec(),
                self.fiber_size()
            )));
        }
        Ok(SurjectionAudit {
            pairs_checked: pairs,
            full,
        })
    }
}

fn require_group(s: &BeauvilleStructure, group: &Group, role: &str) -> Result<()> {
    if s.group.description() != group.description() {
        return Err(Error::MismatchedGroups(format!(
            "structure lives on {} but the surjection's {role} is {}",
            s.group.spec(),
            group.spec()
        )));
    }
    Ok(())
}

fn require_verified(s: BeauvilleStructure, what: &str) -> Result<BeauvilleStructure> {
    match &s.refutation {
        None => Ok(s),
        Some(r) => Err(Error::VerificationFailed(format!(
            "{what} failed condition {}: {}",
            r.condition.number(),
            r.reason
        ))),
    }
}

/// Lifts a structure on the target to the source. The first triple is lifted preserving the
/// orders of `x`, `y` and `z` (searching the fibers of `x` and `y` in ascending order); the
/// second takes least lifts of `a` and `b`, falling back to the first generating pair.
pub fn lift_structure(phi: &Surjection, s: &BeauvilleStructure) -> Result<BeauvilleStructure> {
    require_group(s, phi.target(), "target")?;
    let src = phi.source();
    let tgt = phi.target();
    let orders = s.first.elements().map(|e| tgt.element_order(e));
    let (fx, fy) = (phi.fiber(s.first.x), phi.fiber(s.first.y));

    let mut order_preserving = false;
    let mut first = None;
    'outer: for &x in &fx {
        if src.element_order(x) != orders[0] {
            continue;
        }
        for &y in &fy {
            let t = Triple::completing(src, x, y);
            if t.elements().map(|e| src.element_order(e)) == orders {
                order_preserving = true;
                if src.generates(&[x, y]) {
                    first = Some(t);
                    break 'outer;
                }
            }
        }
    }
    let first = match first {
        Some(t) => t,
        None if order_preserving => return Err(Error::GeneratingLiftNotFound),
        None => return Err(Error::OrderPreservingLiftNotFound),
    };

    let (a, b) = (phi.least_lift(s.second.x), phi.least_lift(s.second.y));
    let second = if src.generates(&[a, b]) {
        Triple::completing(src, a, b)
    } else {
        let fb = phi.fiber(s.second.y);
        phi.fiber(s.second.x)
            .iter()
            .flat_map(|&a| fb.iter().map(move |&b| (a, b)))
            .find(|&(a, b)| src.generates(&[a, b]))
            .map(|(a, b)| Triple::completing(src, a, b))
            .ok_or(Error::GeneratingLiftNotFound)?
    };
    require_verified(verify(src, first, second)?, "lifted structure")
}

/// Which groups the Frattini-lift construction is proven for.
fn check_frattini_family(group: &Group) -> Result<()> {
    if let Some(mc) = group.metacyclic() {
        if mc.p() >= 5 && mc.m() == mc.n() {
            return Ok(());
        }
        return Err(Error::UnsupportedFamily(format!(
            "{} needs p ≥ 5 and n = m",
            group.spec()
        )));
    }
    if let Some(mg) = group.matrix_group() {
        let p = mg.p();
        if p >= 5 && mg.dim() as u64 <= p && group.prime() == Some(p) && group.frattini_rank()? == 2
        {
            return Ok(());
        }
        return Err(Error::UnsupportedFamily(format!(
            "{} needs p ≥ 5, dimension ≤ p, a p-group and a two-dimensional Frattini quotient",
            group.spec()
        )));
    }
    Err(Error::UnsupportedFamily(format!(
        "{} is neither metacyclic nor a matrix group",
        group.spec()
    )))
}

/// Lifts a structure on `G/Φ(G)` to `G` by least lifts of `x, y, a, b`.
pub fn frattini_lift(group: &Arc<Group>, s0: &BeauvilleStructure) -> Result<BeauvilleStructure> {
    frattini_lift_with_choices(group, s0, [0; 4])
}

/// A structure on `group` built from the least structure on `G/Φ(G)` by least lifts.
pub fn construct(group: &Arc<Group>) -> Result<BeauvilleStructure> {
    check_frattini_family(group)?;
    let quotient = Arc::clone(Surjection::frattini(group)?.target());
    let s0 = search(&quotient, &SearchOptions::first_found())?
        .first
        .ok_or_else(|| Error::NoStructure(format!("{} admits none", quotient.spec())))?;
    frattini_lift(group, &s0)
}

/// As [`frattini_lift`] with `x, y, a, b` lifted to the given positions in their fibers.
pub fn frattini_lift_with_choices(
    group: &Arc<Group>,
    s0: &BeauvilleStructure,
    choices: [usize; 4],
) -> Result<BeauvilleStructure> {
    check_frattini_family(group)?;
    let phi = Surjection::frattini(group)?;
    require_group(s0, phi.target(), "target")?;
    let [x, y, a, b] = [s0.first.x, s0.first.y, s0.second.x, s0.second.y];
    let lift = |t: Element, i: usize| {
        phi.fiber_element(t, i).ok_or_else(|| {
            Error::PreconditionViolated(format!(
                "fiber index {i} out of range (fibers have {} elements)",
                phi.fiber_size()
            ))
        })
    };
    let first = Triple::completing(group, lift(x, choices[0])?, lift(y, choices[1])?);
    let second = Triple::completing(group, lift(a, choices[2])?, lift(b, choices[3])?);
    require_verified(verify(group, first, second)?, "Frattini lift")
}

/// How the residues `λ_k` of a tower are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
#[derive(Default)]
pub enum LambdaRule {
    /// `λ_k = 1 + p mod p^k`.
    #[default]
    OnePlusP,
    /// `λ_k = c mod p^k`.
    Constant(u64),
    /// `λ_k` is the `k`-th entry (1-based).
    Explicit(Vec<u64>),
}


impl LambdaRule {
    pub fn lambda(&self, p: u64, level: u32) -> Result<u64> {
        let pk = p.pow(level);
        match self {
            LambdaRule::OnePlusP => Ok((1 + p) % pk),
            LambdaRule::Constant(c) => Ok(c % pk),
            LambdaRule::Explicit(list) => {
                list.get(level as usize - 1)
                    .map(|l| l % pk)
                    .ok_or(Error::IncompatibleLambda {
                        level,
                        reason: format!("explicit rule lists only {} levels", list.len()),
                    })
            }
        }
    }
}

impl fmt::Display for LambdaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaRule::OnePlusP => write!(f, "1+p"),
            LambdaRule::Constant(c) => write!(f, "constant:{c}"),
            LambdaRule::Explicit(list) => {
                let parts: Vec<String> = list.iter().map(u64::to_string).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for LambdaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("unknown lambda rule '{s}'"));
        if s == "1+p" {
            return Ok(LambdaRule::OnePlusP);
        }
        match s.split_once(':') {
            Some(("constant", c)) => c
                .trim()
                .parse()
                .map(LambdaRule::Constant)
                .map_err(|_| bad()),
            Some(("explicit", list)) => list
                .split(',')
                .map(|v| v.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(LambdaRule::Explicit),
            _ => Err(bad()),
        }
    }
}

fn family_group(p: u64, level: u32, rule: &LambdaRule) -> Result<Arc<Group>> {
    let lambda = rule.lambda(p, level)?;
    Group::new(GroupDescription::metacyclic(p, level, level, lambda))
        .map(Arc::new)
        .map_err(|e| match e {
            Error::InvalidLambda { reason, .. } => Error::IncompatibleLambda {
                level,
                reason: format!("lambda_{level} = {lambda}: {reason}"),
            },
            other => other,
        })
}

/// The reduction `Z/p^{k+1} ⋊ Z/p^{k+1} → Z/p^k ⋊ Z/p^k` for the residues given by `rule`.
pub fn family_surjection(p: u64, k: u32, rule: &LambdaRule) -> Result<Surjection> {
    if k == 0 {
        return Err(Error::PreconditionViolated("levels start at 1".into()));
    }
    let upper = family_group(p, k + 1, rule)?;
    let lower = family_group(p, k, rule)?;
    let (lu, ll) = (
        upper.metacyclic().unwrap().lambda(),
        lower.metacyclic().unwrap().lambda(),
    );
    if lu % p.pow(k) != ll {
        return Err(Error::IncompatibleLambda {
            level: k + 1,
            reason: format!(
                "lambda_{} = {lu} does not reduce to lambda_{k} = {ll}",
                k + 1
            ),
        });
    }
    debug_assert_eq!(pow_mod(lu, p.pow(k + 1), p.pow(k + 1)), 1);
    Surjection::reduction(&upper, &lower)
}

/// Groups `levels[k]`, maps `maps[k]: levels[k+1] → levels[k]` and one structure per level.
#[derive(Debug, Clone)]
pub struct Tower {
    pub p: u64,
    pub rule: LambdaRule,
    pub levels: Vec<Arc<Group>>,
    pub maps: Vec<Surjection>,
    pub structures: Vec<BeauvilleStructure>,
    pub compatible: bool,
}

impl Tower {
    /// Re-checks that every map carries the structure above onto the one below.
    pub fn check_compatibility(&self) -> bool {
        self.maps.iter().enumerate().all(|(k, phi)| {
            let (upper, lower) = (&self.structures[k + 1], &self.structures[k]);
            upper
                .elements()
                .iter()
                .zip(lower.elements())
                .all(|(&u, l)| phi.map(u) == l)
        })
    }
}

pub fn build_tower(p: u64, depth: u32, rule: &LambdaRule) -> Result<Tower> {
    build_tower_streaming(p, depth, rule, |_, _| {})
}

/// As [`build_tower`], reporting each level as soon as it is verified.
pub fn build_tower_streaming(
    p: u64,
    depth: u32,
    rule: &LambdaRule,
    mut on_level: impl FnMut(u32, &BeauvilleStructure),
) -> Result<Tower> {
    if depth == 0 {
        return Err(Error::PreconditionViolated(
            "tower depth must be at least 1".into(),
        ));
    }
    let base = family_group(p, 1, rule)?;
    let found = search(&base, &SearchOptions::first_found())?;
    let s1 = found.first.ok_or_else(|| Error::NoStructure(base.spec()))?;
    on_level(1, &s1);
    let mut levels = vec![base];
    let mut maps = Vec::new();
    let mut structures = vec![s1];
    for k in 1..depth {
        let phi = family_surjection(p, k, rule)?;
        phi.audit()?;
        let below = structures.last().unwrap();
        let up =
            |t: &Triple| Triple::completing(phi.source(), phi.least_lift(t.x), phi.least_lift(t.y));
        let lifted = verify(phi.source(), up(&below.first), up(&below.second))?;
        let lifted = require_verified(lifted, &format!("tower level {}", k + 1))?;
        on_level(k + 1, &lifted);
        levels.push(Arc::clone(phi.source()));
        structures.push(lifted);
        maps.push(phi);
    }
    let mut tower = Tower {
        p,
        rule: rule.clone(),
        levels,
        maps,
        structures,
        compatible: false,
    };
    tower.compatible = tower.check_compatibility();
    if !tower.compatible {
        return Err(Error::VerificationFailed(
            "tower levels are not compatible".into(),
        ));
    }
    Ok(tower)
}

/// Maps both triples through `phi` and re-verifies on the target. The result may be refuted.
pub fn push_forward(phi: &Surjection, s: &BeauvilleStructure) -> Result<BeauvilleStructure> {
    require_group(s, phi.source(), "source")?;
    verify(
        phi.target(),
        phi.map_triple(&s.first),
        phi.map_triple(&s.second),
    )
}
