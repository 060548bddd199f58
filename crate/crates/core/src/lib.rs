//! Numerical exterior calculus on periodic grids with pseudo-Riemannian diagonal
//! metrics: Hodge star and coderivative for any signature, representative
//! cohomology forms and their duality matrices, the Hodge decomposition with a
//! cohomology term and residue, the quantized norm budget, the β = 2 solution
//! taxonomy, and the electromagnetic application on a Minkowskian 4-torus.

pub mod calculus;
pub mod cohomology;
pub mod decompose;
pub mod em;
pub mod error;
pub mod mesh;
pub mod taxonomy;

pub use error::{Error, Result};
