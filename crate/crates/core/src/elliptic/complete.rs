use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{EllipticError, Modulus, SINGULAR_FLOOR};

const AGM_TOL: f64 = 1e-16;
const AGM_MAX_ITER: usize = 64;

/// Arithmetic-geometric mean of two positive numbers.
pub(crate) fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        if next == a {
            break;
        }
        a = next;
    }
    0.5 * (a + b)
}

/// `K = ∫₀¹ ds / sqrt((1−s²)(1−k²s²))` for any `k² < 1`, including negative `k²`.
pub fn complete_k(m: Modulus) -> Result<f64, EllipticError> {
    let mc = m.complementary();
    if mc < SINGULAR_FLOOR {
        return Err(EllipticError::NearSingular {
            what: "K",
            value: mc,
        });
    }
    Ok(PI / (2.0 * agm(1.0, mc.sqrt())))
}

/// `K′ = K(1 − k²)` for `0 < k² < 1`.
pub fn complete_kp(m: Modulus) -> Result<f64, EllipticError> {
    let k2 = m.k2();
    if k2 <= 0.0 {
        return Err(EllipticError::Regime {
            what: "K'",
            requirement: "0 < k² < 1 (use K'' for k² < 0)",
            k2,
        });
    }
    if k2 < SINGULAR_FLOOR {
        return Err(EllipticError::NearSingular {
            what: "K'",
            value: k2,
        });
    }
    Ok(PI / (2.0 * agm(1.0, k2.sqrt())))
}

/// `K″ = ∫₀^{1/ℓ} dv / sqrt((1+v²)(1−ℓ²v²))` for `k² = −ℓ² < 0`.
///
/// Equals `K(1/(1+ℓ²)) / sqrt(1+ℓ²)`, i.e. `π / (2·AGM(sqrt(1+ℓ²), ℓ))`.
pub fn complete_kpp(m: Modulus) -> Result<f64, EllipticError> {
    let k2 = m.k2();
    if k2 >= 0.0 {
        return Err(EllipticError::Regime {
            what: "K''",
            requirement: "k² < 0",
            k2,
        });
    }
    let ell2 = -k2;
    if ell2 < SINGULAR_FLOOR {
        return Err(EllipticError::NearSingular {
            what: "K''",
            value: ell2,
        });
    }
    Ok(PI / (2.0 * agm((1.0 + ell2).sqrt(), ell2.sqrt())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LatticeShape {
    /// Spanned by `ω = 2K + 2iK″` and `−ω̄ = −2K + 2iK″` (`k² < 0`).
    Rhombic,
    /// Spanned by `4K` and `2iK′` (`0 < k² < 1`).
    Rectangular,
}

/// Complete integrals and generators of the period lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeData {
    pub shape: LatticeShape,
    pub k: f64,
    pub kp: Option<f64>,
    pub kpp: Option<f64>,
    pub generators: [Complex64; 2],
}

impl LatticeData {
    pub fn for_modulus(m: Modulus) -> Result<Self, EllipticError> {
        let k = complete_k(m)?;
        if m.k2() < 0.0 {
            let kpp = complete_kpp(m)?;
            let omega = Complex64::new(2.0 * k, 2.0 * kpp);
            Ok(LatticeData {
                shape: LatticeShape::Rhombic,
                k,
                kp: None,
                kpp: Some(kpp),
                generators: [omega, -omega.conj()],
            })
        } else {
            let kp = complete_kp(m)?;
            Ok(LatticeData {
                shape: LatticeShape::Rectangular,
                k,
                kp: Some(kp),
                kpp: None,
                generators: [Complex64::new(4.0 * k, 0.0), Complex64::new(0.0, 2.0 * kp)],
            })
        }
    }

    /// Length of the real-locus circle along the imaginary direction:
    /// `4K″` (rhombic) or `2K′` (rectangular).
    pub fn vertical_period(&self) -> f64 {
        match self.shape {
            LatticeShape::Rhombic => 4.0 * self.kpp.unwrap_or(f64::NAN),
            LatticeShape::Rectangular => 2.0 * self.kp.unwrap_or(f64::NAN),
        }
    }
}
