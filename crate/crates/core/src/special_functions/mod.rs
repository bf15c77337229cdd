//! Bessel functions of the first kind `J_n(x)` for integer order and the
//! one-parameter generalized Bessel functions
//! `J_n(x, y; s) = Σ_k s^k J_{n-2k}(x) J_k(y)`.

mod bessel;
mod gbessel;

pub(crate) use bessel::signed_lookup;
pub use bessel::{bessel_j, bessel_row, MAX_ORDER};
pub use gbessel::{
    gbessel_generating_lhs, gbessel_j, GBesselParams, GBesselRow, GBesselValue, K_CAP, MIN_TOL,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFunctionError {
    #[error("non-finite argument {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("order {order} exceeds the supported bound {max}")]
    OrderTooLarge { order: i64, max: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bilateral sum did not reach tolerance {tol:e} within K = {cap}")]
    NoConvergence { tol: f64, cap: usize },
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<(), SpecialFunctionError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(SpecialFunctionError::NonFinite { name, value })
    }
}
