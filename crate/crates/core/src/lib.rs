//! Substructured two-level and multilevel Schwarz methods for two-subdomain
//! decompositions of elliptic problems on rectangles.
//!
//! The interface unknowns of a parallel Schwarz method are iterated with a
//! coarse correction computed on the interfaces only (spectral or geometric
//! coarse spaces), and the resulting iteration matrices can be assembled
//! densely and compared with closed-form convergence factors.

pub mod config;
pub mod decomposition;
pub mod error;
pub mod linalg;
pub mod output;
pub mod problem;
pub mod runner;
pub mod solvers;
pub mod spectral;
pub mod substructured;
pub mod theory;
pub mod transfer;

pub use error::{Error, Result};
