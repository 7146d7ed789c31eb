//! Ultracontractive spectral decay of finite self-adjoint operators.
//!
//! The spectral decay `F(λ) = ‖Π_λ‖_{1,∞}` of a positive operator controls a
//! family of functional inequalities (Sobolev–Orlicz, Nash, Faber–Krahn, an
//! uncertainty principle). This crate computes `F` on finite instances (graph
//! Laplacians, Hodge operators on abelian covers), derives the Orlicz profiles
//! `G, H, L̂, M̂, N`, and evaluates each inequality on concrete states.

pub mod certify;
pub mod complexes;
pub mod continuum;
pub mod csv_io;
pub mod error;
pub mod monocalc;
pub mod report;
pub mod seeds;
pub mod spectral_ops;

pub use error::{Error, Result};
