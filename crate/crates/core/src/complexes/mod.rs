//! Simplicial complexes, their abelian covers, and Hodge spectral densities.

mod complex;
mod cover;
mod sobolev;

pub use complex::{build_complex, parse_complex, Cell, Coboundary, ComplexFile, Face, SimplicialComplex};
pub use cover::{
    characters, hodge_density, hodge_operator, lattice_cover, quotient_complex, triangulated_plane_cover,
    twisted_blocks, AbelianCoverSpec,
};
pub use sobolev::{sobolev_ratio, SobolevBracket};
