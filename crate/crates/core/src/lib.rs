//! A persistent-homology toolkit: point clouds, graphs, and images in;
//! persistence diagrams, feature vectors, distances, and kernels out.
//!
//! The pipeline runs in four stages, each its own module:
//!
//! 1. [`geometry`] ingests point clouds (CSV dumps, PDB alpha-carbon
//!    traces, seeded synthetic shapes) and builds distance matrices.
//! 2. [`complex`] constructs filtered complexes: Vietoris-Rips, alpha
//!    (2D/3D Delaunay with Gabriel propagation), clique, and sublevel-set
//!    cubical.
//! 3. [`persistence`] reduces the Z2 boundary matrix (left-to-right with
//!    the clearing optimization) into persistence diagrams, with a dense
//!    GF(2) rank oracle for cross-checking.
//! 4. Downstream consumers turn diagrams into learning inputs:
//!    [`functions`] (Betti curves, landscapes, persistence images,
//!    entropy), [`vectorize`] (barcode statistics, algebraic/tropical
//!    coordinates, binned features, codebooks, Fisher vectors, the
//!    signature layer, preprocessing, PCA), [`metrics`] (bottleneck,
//!    Wasserstein, sliced Wasserstein, Fisher information), and
//!    [`kernels`] (scale-space, weighted Gaussian, geodesic, Fisher, and
//!    landscape kernels with Gram assembly). [`learn`] closes the loop
//!    with an SMO kernel SVM, one-vs-rest multiclass, cross-validated
//!    grid search, and the evaluation report.
//!
//! Everything randomized takes an explicit 64-bit seed and runs on the
//! portable ChaCha8 generator, so identical inputs give identical
//! outputs across runs and platforms.

pub mod complex;
pub mod error;
pub(crate) mod hashutil;
pub mod functions;
pub mod geometry;
pub mod kernels;
pub mod learn;
pub mod metrics;
pub mod numfmt;
pub mod persistence;
pub mod vectorize;

pub(crate) mod linalg;

pub use error::{Error, Result};
