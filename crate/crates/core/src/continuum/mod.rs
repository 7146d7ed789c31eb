//! Reference profiles on `ℝⁿ` and Monte-Carlo densities of polynomial symbols.

mod rn;
mod symbol;

pub use rn::{ball_volume, rn_profile, sphere_area, RnProfile};
pub use symbol::{exponent_readoff, symbol_density, PolynomialSymbol, SamplingDomain, SymbolDensity, MIN_BUDGET};
