//! Discrete exterior calculus for abelian Yang-Mills boundary data.
//!
//! Regions are oriented simplicial complexes with a piecewise-flat metric and
//! labelled boundary faces ([`mesh`]). On top of the cochain calculus
//! ([`dec`]) sit the four-way Hodge decomposition ([`hodge`]), boundary data
//! and gauge fixing ([`boundary`]), the boundary symplectic structure
//! ([`symplectic`]), solution spaces and the Lagrangian embedding
//! ([`dynamics`]), the two-dimensional example ([`ym2d`]) and the axiom
//! suites ([`axioms`]).

pub mod axioms;
pub mod boundary;
pub mod dec;
pub mod dynamics;
pub mod error;
pub mod hodge;
pub mod linalg;
pub mod mesh;
pub mod symplectic;
pub mod tolerances;
pub mod ym2d;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
