//! Exact quadratic modules over the integers, the hyperbolic reduction
//! algorithm for unimodular vectors, orthogonality flag complexes of
//! hyperbolic summands, and a finite simplicial homology engine.

pub mod chain;
pub mod cm;
pub mod error;
pub mod form;
pub mod io;
pub mod ka;
pub mod maps;
pub mod matrix;
pub mod pi1;
pub mod quadratic;
pub mod reduction;
pub mod report;
pub mod semisimplicial;
pub mod simplicial;
pub mod suite;
mod search;

pub use error::{Error, Result};
pub use form::{FormParameter, LambdaSub, MuValue, Sign};
pub use ka::{build_ka, cancellation_witness, prop43_connect, swap_automorphism, theorem32_evidence, transitivity_witness, KaComplex, KaVertex};
pub use matrix::IntMatrix;
pub use quadratic::{int_vector, is_morphism, orthogonal_complement, Complement, IntVector, QModMorphism, QuadraticModule, Violation};
pub use reduction::{kernel_restriction, orbit_search, primitive_part, reduce_to_first_block, ElementaryMove, HVector, KernelRestriction, Reduction, ShearDir};
