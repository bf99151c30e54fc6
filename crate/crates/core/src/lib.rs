//! Construction of general-position piecewise-linear maps of finite simplicial
//! complexes into `R^m`, and exact certification of the secant lines through an
//! external point.
//!
//! The pipeline is: build or load a complex ([`complex`]), subdivide it until its
//! simplices are small, move vertex images into verified general position
//! ([`perturb`]), then enumerate and certify the secant lines through any probe
//! point ([`secant`], built on the affine-flat machinery in [`flats`]). Point
//! clouds enter through [`nerve`]; families of complexes indexed by a finite base
//! are handled fiber by fiber in [`fiber`]. Every incidence decision is made over
//! exact rationals ([`exact`]).

#![allow(clippy::result_large_err)]

pub mod complex;
pub mod exact;
pub mod fiber;
pub mod flats;
pub mod nerve;
pub mod perturb;
pub mod secant;
pub mod seed;

pub use complex::{BarycentricPoint, Marks, PLMap, Simplex, SimplicialComplex, VertexId};
pub use exact::{Matrix, Point, Rational};
pub use flats::{AffineFlat, CanonicalLine};
pub use perturb::{GeneralPositionCertificate, GeneralPositionMap, PerturbationReport};
pub use secant::{CoverCertificate, ProbePoint, SecantRecord};
