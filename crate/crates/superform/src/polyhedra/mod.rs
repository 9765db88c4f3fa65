//! Exact convex polyhedra, polyhedral complexes with explicit face posets,
//! polyhedral stars and the symbolic open domains forms live on.

mod complex;
mod domain;
pub(crate) mod fourier_motzkin;
mod polyhedron;

pub use complex::{PolyhedralComplex, ValidationReport, Violation};
pub use domain::{CellFrame, Domain, DomainCell};
pub use polyhedron::{compute_h_representation, AffineRow, HRep, Polyhedron, PolyhedraError};
