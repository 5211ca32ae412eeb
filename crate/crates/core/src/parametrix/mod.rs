//! Boundary-layer parametrix recursions in the translation-invariant model.
//!
//! All boundary data (`n_k`, `R_k`, `q_k`, ψ) are x'-independent formal
//! constants, so every tangential gradient of a computed coefficient vanishes
//! and only `∇φ_0 = −ξ'` survives, inside the contractions `r_k` and `qf_k`.
//! The eikonal and transport recursions then reduce to exact algebra in ρ.

mod tables;
mod verify;

pub use tables::{
    dn_symbol, parametrix_tables, phi_delta, tilde_tables, EikonalTable, ParametrixTables, TransportTable, Variant,
};
pub use verify::{
    amplitude_n_derivative, c_constant, c_constant_checked, c_constant_value, degree_report, eikonal_residual,
    leading_eikonal_defect, phase_n_derivative, transport_residual, verify_n_dependence, DegreeEntry, DegreeReport,
    IdentityCheck, NDependenceReport,
};

use crate::exactarith::ArithError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParametrixError {
    #[error("{what} must be at least {min}, got {got}")]
    InvalidOrder { what: &'static str, got: usize, min: usize },
    #[error("table underflow: {what} index {index} requested, {available} available")]
    TableUnderflow { what: &'static str, index: usize, available: usize },
    #[error("recursion bug: {what} nonzero at k={k}")]
    RecursionBug { what: String, k: usize },
    #[error("identity `{identity}` fails at k={k}, j={j:?}, l={ell}")]
    IdentityFailure { identity: &'static str, k: usize, j: Option<usize>, ell: usize },
    #[error("Laurent order of {entry} is {min_exponent}, below the bound {bound}")]
    DegreeViolation { entry: String, min_exponent: i32, bound: i32 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}
