use std::f64::consts::PI;

use super::{complete_k, EllipticError, Modulus, ENDPOINT_FLOOR};

const RF_ERRTOL: f64 = 8e-4;

/// Carlson's symmetric integral `R_F(x, y, z) = ½∫₀^∞ dt / sqrt((t+x)(t+y)(t+z))`
/// by duplication. Arguments must be non-negative with at most one zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        let ave = (x + y + z) / 3.0;
        let dx = (ave - x) / ave;
        let dy = (ave - y) / ave;
        let dz = (ave - z) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < RF_ERRTOL {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / ave.sqrt();
        }
    }
}

/// Legendre integral `F(x) = ∫₀^x ds / sqrt((1−s²)(1−k²s²))` on the real
/// segment `|x| ≤ 1`. The endpoints `±1` are regular in this form.
pub fn incomplete_f(x: f64, m: Modulus) -> Result<f64, EllipticError> {
    if !(x.abs() <= 1.0) {
        return Err(EllipticError::Domain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let x2 = x * x;
    Ok(x * carlson_rf(1.0 - x2, 1.0 - m.k2() * x2, 1.0))
}

/// `F(φ | k²)` in amplitude form for any real `φ`, using
/// `F(φ + jπ) = 2jK + F(φ)`.
pub fn legendre_f_amplitude(phi: f64, m: Modulus) -> Result<f64, EllipticError> {
    let j = (phi / PI).round();
    let psi = phi - j * PI;
    let (s, c) = psi.sin_cos();
    let base = s * carlson_rf(c * c, 1.0 - m.k2() * s * s, 1.0);
    if j == 0.0 {
        Ok(base)
    } else {
        Ok(2.0 * j * complete_k(m)? + base)
    }
}

/// The three real integration paths of the rotation-number integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotationPath {
    /// `∫_{−1}^{1/s₀} ds / sqrt((1−s²)(ℓ²+s²))`, `k² = −ℓ² < 0`, `|s₀| > 1`.
    Unipartite { s0_inv: f64 },
    /// `∫_1^{s₀} ds / sqrt((s²−1)(1−k²s²))`, `1 < s₀ < 1/k`.
    BipartitePlus { s0: f64 },
    /// `∫_{s₀}^{−1} ds / sqrt((s²−1)(1−k²s²))`, `−1/k < s₀ < −1`.
    BipartiteMinus { s0: f64 },
}

/// Positive value of the selected path integral.
pub fn rotation_integral(path: RotationPath, m: Modulus) -> Result<f64, EllipticError> {
    match path {
        RotationPath::Unipartite { s0_inv: t } => {
            let ell2 = match m.ell() {
                Some(l) => l * l,
                None => {
                    return Err(EllipticError::Regime {
                        what: "unipartite rotation integral",
                        requirement: "k² < 0",
                        k2: m.k2(),
                    })
                }
            };
            if !(t.abs() < 1.0 - ENDPOINT_FLOOR) {
                return Err(EllipticError::NearSingular {
                    what: "unipartite rotation integral",
                    value: 1.0 - t.abs(),
                });
            }
            // ∫₀^t ds/sqrt((1−s²)(ℓ²+s²)) = t·R_F(ℓ²(1−t²), ℓ²+t², ℓ²)
            let full = carlson_rf(0.0, 1.0 + ell2, ell2);
            let partial = t * carlson_rf(ell2 * (1.0 - t * t), ell2 + t * t, ell2);
            Ok(full + partial)
        }
        RotationPath::BipartitePlus { s0 } | RotationPath::BipartiteMinus { s0 } => {
            let s = match path {
                RotationPath::BipartitePlus { .. } => s0,
                _ => -s0,
            };
            let k2 = m.k2();
            if !(k2 > 0.0) {
                return Err(EllipticError::Regime {
                    what: "bipartite rotation integral",
                    requirement: "0 < k² < 1",
                    k2,
                });
            }
            // s = 1/sqrt(1 − k′²t²) maps the path onto F(t₁ | k′²)
            let inv2 = 1.0 / (s * s);
            let mc = 1.0 - k2;
            let gap_low = 1.0 - inv2;
            let gap_high = inv2 - k2;
            if !(s > 1.0) || gap_low < ENDPOINT_FLOOR || gap_high < ENDPOINT_FLOOR * k2 {
                return Err(EllipticError::NearSingular {
                    what: "bipartite rotation integral",
                    value: gap_low.min(gap_high),
                });
            }
            let t1 = (gap_low / mc).sqrt();
            Ok(t1 * carlson_rf(gap_high / mc, inv2, 1.0))
        }
    }
}
