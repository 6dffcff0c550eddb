//! Gromov–Hausdorff distances between finite metric spaces.
//!
//! - [`metric`]: finite metric spaces and constructions (line subsets,
//!   scaling, ℓ¹ products, constant shifts, isometry checks)
//! - [`correspondence`]: relations, distortion, products of correspondences,
//!   Hausdorff distance, minimal-correspondence enumeration
//! - [`solver`]: exact `d_GH` by branch and bound, closed forms and bounds
//! - [`lattice`]: exact ball counts in `Zⁿ` and the counting witness
//! - [`geodesy`]: sampling curves of spaces and measuring geodesic deviation
//! - [`io`], [`random`]: text formats and the seeded generator

pub mod correspondence;
pub mod error;
pub mod geodesy;
pub mod io;
pub mod lattice;
pub mod metric;
pub mod random;
pub mod solver;

pub use correspondence::{
    enumerate_minimal_correspondences, hausdorff_distance, Correspondence, GridCap, Relation,
};
pub use error::{Error, Result};
pub use geodesy::{geodesic_deviation, sample_curve, CurveFamily, DeviationMode, DeviationReport};
pub use lattice::{ball_count, ratio_series, witness_radius, zn_window, LatticeReport, Rational};
pub use metric::{from_reals, FiniteMetricSpace, IsometryCheck, PointSet1D, EPS};
pub use solver::{
    gh_exact, gh_lower_diam, gh_scaling_value, product_bound_constraint, truncation_lower_series,
    GhCertificate, LowerProof, SolverOptions,
};
