//! Entropic subadditivity and strong subadditivity for states of a single
//! qudit.
//!
//! A probability `N`-vector or `N x N` density matrix is placed into a padded
//! `n1 x n2 (x n3)` lattice ([`placements`]); the lattice's marginals or
//! partial traces then obey the usual bipartite and tripartite entropy
//! inequalities, which become inequalities for the original, indivisible
//! system ([`inequalities`]). Spin tomograms ([`tomography`]) inherit the
//! classical forms.

pub mod cli;
pub mod error;
pub mod inequalities;
pub mod numerics;
pub mod placements;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
pub use inequalities::{GroupingSpec, InequalityVerdict};
pub use placements::IndexPlacement;
pub use states::{DensityMatrix, ProbabilityVector, RandomSource};
