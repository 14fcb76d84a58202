//! L-functions of the level-1 objects: Euler factors, Dirichlet
//! coefficients, numerical values with error envelopes, and the exact
//! ratio identities for triple products.

pub mod alg;
pub mod coeffs;
pub mod euler;
pub mod eval;
pub mod spec;

use alloc::string::String;
use core::fmt;

use num_rational::BigRational;

pub use alg::{alg_ratio_identity, appendix_tables, critical_point, fixtures, gamma_quotient, AppendixTable};
pub use coeffs::{coefficient_bound, dirichlet_coefficients, Coeff};
pub use euler::{elliptic_euler, spinor_euler, triple_euler, zeta_euler, EulerFactor};
pub use eval::{auto_cutoff, coeffs_required, evaluate, evaluate_capped, fe_residual, ratio, EvalResult, Evaluator};
pub use spec::{build_lspec, spinor_lspec, spinor_space, LKind, LSpec};

use crate::forms::FormsError;

#[derive(Clone, Debug, PartialEq)]
pub enum LError {
    Unsupported(String),
    /// s sits on a pole of the gamma factor or of Λ.
    Divergent(BigRational),
    MissingFactor(u64),
    /// The envelope leaves fewer than three significant digits.
    Insufficient { value: f64, envelope: f64 },
    DigitsCap { digits: u32, cap: u32 },
    /// λ_p² − λ_(p²) is odd.
    Parity(u64),
    ZeroDenominator(BigRational),
    Range(String),
    Forms(FormsError),
}

impl From<FormsError> for LError {
    fn from(e: FormsError) -> LError {
        LError::Forms(e)
    }
}

impl fmt::Display for LError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LError::Unsupported(s) => write!(f, "unsupported L-function {:?}", s),
            LError::Divergent(s) => write!(f, "s = {} is a pole", s),
            LError::MissingFactor(p) => write!(f, "no Euler factor at p = {}", p),
            LError::Insufficient { value, envelope } => write!(
                f,
                "insufficient coefficients: value {:e} with envelope {:e} has fewer than 3 significant digits",
                value, envelope
            ),
            LError::DigitsCap { digits, cap } => write!(f, "{} digits requested, cap is {}", digits, cap),
            LError::Parity(p) => write!(f, "λ_p² − λ_(p²) is odd at p = {}", p),
            LError::ZeroDenominator(s) => write!(f, "denominator at {} is zero or unresolved", s),
            LError::Range(s) => f.write_str(s),
            LError::Forms(e) => write!(f, "{}", e),
        }
    }
}
