//! Atomic monotone functions and the transforms derived from them.

mod compare;
mod fit;
mod minorant;
mod profile;
mod step;

pub use compare::{growth_sandwich, laplace_comparison, GrowthReport, MeasuredHeat};
pub use fit::{asymptotic_fit, AsymptoticFit, MIN_FIT_ATOMS};
pub use minorant::{convex_minorant, nash_minorant, nash_target, ConvexMinorant};
pub use profile::{h_profile, heat_profiles, n_profile, OrliczProfile};
pub use step::{cluster_atoms, g_transform, right_inverse_increasing, step_from_atoms, ExtReal, StepFunction};

/// Default log-exponent candidates for [`asymptotic_fit`].
pub const DEFAULT_K_CANDIDATES: [u32; 3] = [0, 1, 2];
