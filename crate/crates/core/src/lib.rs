//! Unmixed Beauville structures on finite p-groups.
//!
//! The crate is organized around a small group engine ([`group`]) with three realizations,
//! and the layers built on it: structure verification and search ([`beauville`]), lifting
//! along surjections and finite towers ([`lifting`]), the metacyclic uniform family
//! ([`uniform`]) and Riemann–Hurwitz arithmetic ([`geometry`]).

pub mod arith;
pub mod beauville;
pub mod error;
pub mod geometry;
pub mod group;
pub mod json;
pub mod lifting;
pub mod uniform;

pub use beauville::{
    conjugate_power_set, search, signature_of, verify, BeauvilleStructure, Budget, Condition,
    ConjugatePowerSet, PreparedTriple, Refutation, SearchMode, SearchOptions, SearchOutcome,
    Signature, Triple,
};
pub use error::{Error, Result};
pub use geometry::{cover_data, genus, is_hyperbolic, CoverData, TriangleSignature};
pub use group::{
    frattini_quotient, ClassId, Element, FrattiniQuotientMap, Group, GroupDescription,
};
pub use lifting::{
    build_tower, build_tower_streaming, construct, family_surjection, frattini_lift,
    frattini_lift_with_choices, lift_structure, push_forward, LambdaRule, Surjection, Tower,
};
pub use uniform::{
    admits_beauville, admits_beauville_audited, classify, epsilon_lambda, filtration_iso_check,
    isomorphism_witness, power_map, AdmitsVerdict, ClassificationInvariant, FiltrationReport,
    IsomorphismWitness, WitnessOutcome,
};
