//! Legendre elliptic integrals of the first kind and Jacobi elliptic functions.
//!
//! Two modulus regimes matter for the level sets of the Boltzmann system:
//! negative `k²` (written `k = iℓ`, rhombic period lattice) and `0 < k² < 1`
//! (rectangular lattice). Negative `k²` is handled with real arithmetic
//! throughout, through the imaginary-modulus transformation.
//!
//! Complete integrals come from the arithmetic-geometric mean, incomplete ones
//! from Carlson's symmetric integral `R_F`, and the Jacobi functions from the
//! descending Landen transformation.

mod carlson;
mod complete;
mod jacobi;

pub use carlson::{
    carlson_rf, incomplete_f, legendre_f_amplitude, rotation_integral, RotationPath,
};
pub use complete::{complete_k, complete_kp, complete_kpp, LatticeData, LatticeShape};
pub use jacobi::{jacobi_on_line, jacobi_real, jacobi_sn_cn_dn, JacobiLine, JacobiTriple};

use serde::Serialize;
use thiserror::Error;

/// Distance to a singular modulus (`k² → 0` for `K′`, `K″`; `k² → 1` for `K`)
/// below which complete integrals are reported instead of computed.
pub const SINGULAR_FLOOR: f64 = 1e-14;

/// Distance to a singular endpoint of an incomplete integral below which the
/// rotation integrals refuse to evaluate.
pub const ENDPOINT_FLOOR: f64 = 1e-10;

/// `|cn|` threshold inside which ratio-valued Jacobi evaluations are poles.
pub const POLE_FLOOR: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("modulus k² = {0} is outside the supported range")]
    InvalidModulus(f64),
    #[error("{what} requires {requirement}, got k² = {k2}")]
    Regime {
        what: &'static str,
        requirement: &'static str,
        k2: f64,
    },
    #[error("{what} diverges: value {value:e} is within the singular floor")]
    NearSingular { what: &'static str, value: f64 },
    #[error("argument {0} lies outside the real integration segment")]
    Domain(f64),
    #[error("pole: |cn| = {0:e} near a zero of the transformed cn")]
    Pole(f64),
    #[error("argument {re}+{im}i is not on a supported line (ℝ, iℝ, iℝ+2K)")]
    UnsupportedLine { re: f64, im: f64 },
}

/// Legendre modulus, stored by its square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Modulus {
    k2: f64,
}

impl Modulus {
    pub fn new(k2: f64) -> Result<Self, EllipticError> {
        if !k2.is_finite() || k2 >= 1.0 {
            return Err(EllipticError::InvalidModulus(k2));
        }
        Ok(Modulus { k2 })
    }

    pub fn k2(self) -> f64 {
        self.k2
    }

    /// `1 − k²`.
    pub fn complementary(self) -> f64 {
        1.0 - self.k2
    }

    /// `ℓ = sqrt(−k²)` when `k²` is negative.
    pub fn ell(self) -> Option<f64> {
        (self.k2 < 0.0).then(|| (-self.k2).sqrt())
    }

    /// Positive `k` when `0 < k² < 1`.
    pub fn k(self) -> Option<f64> {
        (self.k2 > 0.0).then(|| self.k2.sqrt())
    }
}
