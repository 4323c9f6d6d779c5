//! Scattering theory for quantum graphs with leads.
//!
//! The crate evaluates scattering matrices of open metric graphs, compact
//! spectra through the secular equation, resonance poles, scattering matrices
//! of symmetry quotients, and numerical evidence for or against
//! transplantability between two graphs.

pub mod cli;
pub mod graph;
pub mod io;
pub mod isoscattering;
pub mod linalg;
pub mod resonances;
pub mod scattering;
pub mod symmetry;
pub mod vertex;
