//! Mass centers in Euclidean, spherical and hyperbolic space.
//!
//! Points with mass are ambient vectors `m p` in `R^{n+1}`, and the mass
//! center of a finite family is simply their sum. On top of that kernel the
//! crate provides centered masses of balls, spheres and regular polygons,
//! continuous mass centers by quadrature, and volumes of solids swept by a
//! family of hyperplanar leaves (torus, cones), each cross-checked by
//! independent full-dimensional quadrature and Monte Carlo estimates.

pub mod ambient;
pub mod error;
pub mod manifolds;
pub mod masscenter;
pub mod montecarlo;
pub mod onedim;
pub mod pappus;
pub mod quadrature;
pub mod verify;

pub use ambient::{
    apply_isometry, bilinear_form, cosx, decompose, distance, random_isometry, sinx, AmbientVector,
    Geometry, GeometryKind, Isometry, MaterialVector,
};
pub use error::{Error, Result};
pub use manifolds::ManifoldPatch;
pub use masscenter::{PointSet, TwoPointSolution};
pub use onedim::{FkSystem, SplitMergeTrace};
pub use pappus::{OracleReport, PappusProfile, SolidSpec};
pub use quadrature::{QuadratureConfig, QuadratureMethod};
