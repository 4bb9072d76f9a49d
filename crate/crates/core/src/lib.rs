//! Symbolic and numerical tools for radial compressible flow in `n > 1`
//! dimensions: a jet-space algebra kernel, the equation-of-state catalog,
//! point and Hamiltonian symmetries, Casimirs, advected hierarchies and a
//! finite-volume solver with conserved-integral diagnostics.

pub mod advected;
pub mod casimir;
pub mod expr;
pub mod hamiltonian;
pub mod model;
pub mod numeric;
pub mod solver;
pub mod symmetry;
