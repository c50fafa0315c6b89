//! Regular polytopes from string C-group presentations: words, coset
//! enumeration, permutation groups, the tight-quotient families and their
//! certification, and face lattices.

pub mod atlas;
pub mod constructions;
pub mod coset;
pub mod error;
pub mod perm;
pub mod polytope;
pub mod sggi;
pub mod words;

pub use atlas::{verify, Atlas, AtlasRow, CertificateRecord, Family, Instance, VerifyOptions};
pub use constructions::FamilyParams;
pub use coset::{enumerate, CosetTable, EnumerationLimits, EnumerationOptions, Strategy};
pub use error::{EnumError, ParamError, PermError, PolytopeError, SggiError, VerifyError, WordError};
pub use perm::{Permutation, PermutationGroup, StabilizerChain};
pub use polytope::{FaceLattice, FlagGraph, GraphFormat};
pub use sggi::{certify, GroupContext, IntersectionMode, SggiCertificate, SggiSpec, Subset};
pub use words::{commutator, evaluate, power, reduce, GeneratorIndex, Letter, Presentation, Word};
