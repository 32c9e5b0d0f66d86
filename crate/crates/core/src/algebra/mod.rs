//! Concrete Banach *-algebras paired with their C*-envelopes.

pub mod decay;
pub mod instance;
pub mod trig;
pub mod triple;

pub use decay::{beurling_norm, bgs_norm, groschur_norm};
pub use instance::{
    hilbert_algebra_norm, parse_group, registry, section_cstar_norm, AlgebraElement, AlgebraInstance, AlgebraKind,
    Carrier, ElementJson,
};
pub use trig::{deriv_domain_norm, TrigJson, TrigPolynomial};
pub use triple::{fell_triple, shin_sun_exponent, DiffTriple, DiffTripleJson, Rational};
