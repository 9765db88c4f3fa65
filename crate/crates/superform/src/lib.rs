//! Exact calculus of bigraded differential forms on polyhedral complexes.
//!
//! Everything in this crate is computed over the rational numbers: polyhedra
//! carry exact H-representations, forms carry sparse polynomial coefficients,
//! and every identity (`d'` squaring to zero, the chain homotopy equation,
//! the homotopy formula on polyhedral stars) is checked by exact equality,
//! never by a tolerance.
//!
//! The main entry points are:
//!
//! * [`polyalg`] — rational scalars, sparse multivariate polynomials and
//!   exact linear algebra,
//! * [`polyhedra`] — convex polyhedra, polyhedral complexes, polyhedral
//!   stars and symbolic open domains,
//! * [`superforms`] — the bigraded algebra with the operators `d'`, `d''`,
//!   `d`, the wedge product and the factor swap `J`,
//! * [`pullback`] — pullbacks of forms along pairs of a polynomial map and a
//!   linear map,
//! * [`homotopy`] — the chain homotopy operator on cylinders and the
//!   constructive primitives it yields on star-shaped domains,
//! * [`cohomology`] — good covers by stars, Cech complexes and Betti tables
//!   with a simplicial oracle,
//! * [`io`] — the document formats consumed and produced by the CLI.

pub mod checks;
pub mod cohomology;
pub mod fixtures;
pub mod homotopy;
pub mod io;
pub mod polyalg;
pub mod polyhedra;
pub mod pullback;
pub mod superforms;

pub use cohomology::{betti_table, build_cech, euler_check, local_h0q, simplicial_betti};
pub use homotopy::{
    chain_homotopy_check, contraction_pair, d_double_prime_primitive, d_prime_primitive,
    d_primitive_reduction, homotopy_formula_verify, CylinderForm,
};
pub use polyalg::{Mat, Polynomial, Rat};
pub use polyhedra::{Domain, PolyhedralComplex, Polyhedron};
pub use pullback::{naive_pullback, MapPair, PullbackVerdict};
pub use superforms::{MixedForm, Superform};


