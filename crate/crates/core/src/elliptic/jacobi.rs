use std::f64::consts::PI;

use num_complex::Complex64;

use super::{complete_k, EllipticError, Modulus, POLE_FLOOR};

const LANDEN_TOL: f64 = 1e-16;
const LANDEN_MAX: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple<T> {
    pub sn: T,
    pub cn: T,
    pub dn: T,
}

/// The lines of the `u`-plane on which complex arguments are supported.
/// Under the uniformization these are the lines that map to the real locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobiLine {
    /// `u = t`
    Real,
    /// `u = i·t`
    Imaginary,
    /// `u = 2K + i·t`
    ShiftedImaginary,
}

/// Descending Landen (AGM) scheme for `0 ≤ m < 1`, with `mc = 1 − m` passed
/// separately so that `dn² = mc + m·cn²` keeps full precision near `m → 1`.
fn landen(u: f64, m: f64, mc: f64) -> (f64, f64, f64) {
    if m == 0.0 {
        let (s, c) = u.sin_cos();
        return (s, c, 1.0);
    }
    let mut a = [0.0f64; LANDEN_MAX + 1];
    let mut c = [0.0f64; LANDEN_MAX + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = mc.sqrt();
    let mut n = 0;
    while n < LANDEN_MAX && (c[n] / a[n]).abs() > LANDEN_TOL {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    // reduce modulo the real period 4K = 2π / a_n
    let quarter = PI / (2.0 * a[n]);
    let period = 4.0 * quarter;
    let u = u - period * (u / period).round();
    let mut phi = a[n] * u * f64::powi(2.0, n as i32);
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (mc + m * cn * cn).sqrt();
    (sn, cn, dn)
}

/// Real-argument Jacobi functions for an arbitrary real parameter `m = k²`.
/// `mc` must equal `1 − m` (supplied by callers that know it exactly).
pub(crate) fn sncndn(u: f64, m: f64, mc: f64) -> (f64, f64, f64) {
    if m < 0.0 {
        // imaginary modulus: sn(u|−ℓ²) = sd(v|μ)/sqrt(1+ℓ²), v = u·sqrt(1+ℓ²)
        let scale = mc.sqrt();
        let mu = -m / mc;
        let muc = 1.0 / mc;
        let (s, c, d) = landen(u * scale, mu, muc);
        (s / (d * scale), c / d, 1.0 / d)
    } else if m < 1.0 {
        landen(u, m, mc)
    } else if m == 1.0 {
        let sech = 1.0 / u.cosh();
        (u.tanh(), sech, sech)
    } else {
        // reciprocal modulus
        let root = m.sqrt();
        let (s, c, d) = landen(u * root, 1.0 / m, -mc / m);
        (s / root, d, c)
    }
}

/// `(sn, cn, dn)(u | k²)` for real `u`.
pub fn jacobi_real(u: f64, m: Modulus) -> JacobiTriple<f64> {
    let (sn, cn, dn) = sncndn(u, m.k2(), m.complementary());
    JacobiTriple { sn, cn, dn }
}

/// Jacobi functions at `u` on one of the supported lines, parametrized by the
/// real coordinate `t` along the line.
pub fn jacobi_on_line(
    line: JacobiLine,
    t: f64,
    m: Modulus,
) -> Result<JacobiTriple<Complex64>, EllipticError> {
    match line {
        JacobiLine::Real => {
            let r = jacobi_real(t, m);
            Ok(JacobiTriple {
                sn: r.sn.into(),
                cn: r.cn.into(),
                dn: r.dn.into(),
            })
        }
        JacobiLine::Imaginary | JacobiLine::ShiftedImaginary => {
            // Jacobi imaginary transformation onto the complementary parameter
            let (s, c, d) = sncndn(t, m.complementary(), m.k2());
            if c.abs() < POLE_FLOOR {
                return Err(EllipticError::Pole(c.abs()));
            }
            let sn = Complex64::new(0.0, s / c);
            let cn = Complex64::new(1.0 / c, 0.0);
            let dn = Complex64::new(d / c, 0.0);
            if line == JacobiLine::Imaginary {
                Ok(JacobiTriple { sn, cn, dn })
            } else {
                Ok(JacobiTriple {
                    sn: -sn,
                    cn: -cn,
                    dn,
                })
            }
        }
    }
}

/// Complex-argument entry point; `u` must lie on `ℝ`, `iℝ`, or `iℝ + 2K`.
pub fn jacobi_sn_cn_dn(u: Complex64, m: Modulus) -> Result<JacobiTriple<Complex64>, EllipticError> {
    if u.im == 0.0 {
        return jacobi_on_line(JacobiLine::Real, u.re, m);
    }
    if u.re == 0.0 {
        return jacobi_on_line(JacobiLine::Imaginary, u.im, m);
    }
    let two_k = 2.0 * complete_k(m)?;
    if (u.re - two_k).abs() <= 1e-12 * two_k {
        return jacobi_on_line(JacobiLine::ShiftedImaginary, u.im, m);
    }
    Err(EllipticError::UnsupportedLine { re: u.re, im: u.im })
}
