//! Exact perfect-matching counts and dimer entropies for plane graphs.
//!
//! Counting routes: exhaustive search ([`plane_graph::count_bruteforce`]),
//! Pfaffian orientations ([`fkt::count_fkt`]), the determinant product for
//! rotation-symmetric graphs ([`symmetry::count_product`]), and explicit
//! formulas ([`closed_forms`]). [`methods::MethodRegistry`] runs them side by
//! side.

pub mod closed_forms;
pub mod entropy;
pub mod error;
pub mod fkt;
pub mod lattices;
pub mod methods;
pub mod numeric;
pub mod plane_graph;
pub mod quadrature;
pub mod symmetry;

pub use error::{Error, Result};
pub use lattices::{LatticeFamily, LatticeSpec};
pub use methods::{CountTarget, CountingMethod, MethodRegistry};
pub use numeric::Precision;
pub use plane_graph::{MatchCount, PlaneGraph};
pub use quadrature::{Estimate, QuadratureSpec};
pub use symmetry::SymmetricQuotient;
