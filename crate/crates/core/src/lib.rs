//! Finite universal algebra: clones, congruences and the commutator,
//! Mal'cev terms, group expansions of nilpotent algebras, clones of
//! polynomials over finite fields, and supernilpotency bounds.

pub mod algebra;
pub mod clone;
pub mod congruence;
pub mod error;
pub mod expansion;
pub mod field;
pub mod fixtures;
pub mod function;
pub mod group;
pub mod linalg;
pub mod malcev;
pub mod poly;
pub mod polyclone;
pub mod supernil;
pub mod term;

pub use algebra::{Elem, FiniteAlgebra, Operation};
pub use clone::{clo, closure, free_spectrum, pol, CloneOptions, FunctionClone};
pub use congruence::{commutator, CentralSeries, Congruence, CongruenceLattice};
pub use error::{Error, Result};
pub use expansion::{expand_algebra, expand_with_group, verify_expansion, ExpandedAlgebra};
pub use function::FiniteFunction;
pub use malcev::{find_malcev_term, MalcevSearch, MalcevWitness};
pub use supernil::{bound_s, check_supernilpotent, supernil_report, SupernilReport, SupernilVerdict};
pub use term::Term;
