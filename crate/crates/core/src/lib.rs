//! Exact polytope combinatorics for wedge and perturbed-wedge constructions.
//!
//! Polytopes live in the canonical embedding: facet normals `[-1, h]`,
//! vertices `[1, x]`, the origin strictly inside, and `h . v <= 0` with
//! equality exactly on incidences. All arithmetic is over arbitrary-precision
//! rationals.

pub mod analysis;
pub mod constructions;
pub mod enumeration;
pub mod fixtures;
pub mod incidence;
pub mod io;
pub mod linalg;
pub mod polytope;
pub mod verification;

pub use analysis::{graph, PathRecord, PolytopeGraph, SpindleCertificate};
pub use constructions::{
    perturb_facet, perturbed_wedge, two_point_suspension, wedge, Epsilon, PerturbationReport,
    PerturbationSpec, WedgeResult,
};
pub use enumeration::{facets_from_v, remove_redundant, vertices_from_h, EnumerationError};
pub use incidence::IncidenceMatrix;
pub use linalg::{parse_rational, Rational};
pub use polytope::{HRep, Polytope, PolytopeError, VRep};
