//! Evaluation of the functional inequalities on concrete states.

mod checks;
mod suite;

pub use checks::{
    check_faber_krahn, check_h_sobolev, check_n_sobolev, check_nash, check_uncertainty, uncertainty_constant,
    validate_minorant, TestState, SUPPORT_CUT,
};
pub use suite::{
    certify_operator, certify_state, generate_states, run_suite, time_grid, CertInstance, CheckSet, SuiteOptions,
};
