//! Test-only reference computations that share no code with the library:
//! adaptive Gauss–Legendre quadrature of the defining integrals, Jacobi
//! functions by inverting the amplitude integral, and elementary level-set
//! constructions.
#![allow(dead_code)]

use std::f64::consts::PI;

use boltzmann_core::{ConfigPoint, LevelSetParams};

const GL_ORDER: usize = 20;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, from Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn gl_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    h * rule.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>()
}

fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    rule: &[(f64, f64)],
) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl_panel(f, a, m, rule);
    let right = gl_panel(f, m, b, rule);
    let halves = left + right;
    if depth == 0 || (halves - whole).abs() <= tol * halves.abs().max(1e-300) {
        return halves;
    }
    adapt(f, a, m, left, tol, depth - 1, rule) + adapt(f, m, b, right, tol, depth - 1, rule)
}

/// `∫_a^b f` to relative tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let rule = gauss_legendre(GL_ORDER);
    let whole = gl_panel(&f, a, b, &rule);
    adapt(&f, a, b, whole, tol, 24, &rule)
}

const QTOL: f64 = 1e-14;

/// `K(m) = ∫₀^{π/2} dφ / sqrt(1 − m sin²φ)`, any `m < 1`.
pub fn k_quad(m: f64) -> f64 {
    integrate(
        |p: f64| 1.0 / (1.0 - m * p.sin().powi(2)).sqrt(),
        0.0,
        PI / 2.0,
        QTOL,
    )
}

/// `K′ = K(1 − k²)`.
pub fn kp_quad(k2: f64) -> f64 {
    k_quad(1.0 - k2)
}

/// `K″ = ∫₀^{π/2} dφ / sqrt(ℓ² + sin²φ)` for `k² = −ℓ²`.
pub fn kpp_quad(ell2: f64) -> f64 {
    integrate(
        |p: f64| 1.0 / (ell2 + p.sin().powi(2)).sqrt(),
        0.0,
        PI / 2.0,
        QTOL,
    )
}

/// `∫_{−1}^{t} ds / sqrt((1−s²)(ℓ²+s²))` via `s = sin φ`.
pub fn unipartite_integral_quad(ell2: f64, t: f64) -> f64 {
    integrate(
        |p: f64| 1.0 / (ell2 + p.sin().powi(2)).sqrt(),
        -PI / 2.0,
        t.asin(),
        QTOL,
    )
}

/// `∫_1^{s₀} ds / sqrt((s²−1)(1−k²s²))` via `s = cosh τ`, `1 < s₀ < 1/k`.
pub fn bipartite_integral_quad(k2: f64, s0: f64) -> f64 {
    integrate(
        |t: f64| 1.0 / (1.0 - k2 * t.cosh().powi(2)).sqrt(),
        0.0,
        s0.acosh(),
        QTOL,
    )
}

/// `F(φ | m)` by quadrature.
pub fn f_quad(phi: f64, m: f64) -> f64 {
    integrate(
        |p: f64| 1.0 / (1.0 - m * p.sin().powi(2)).sqrt(),
        0.0,
        phi,
        QTOL,
    )
}

/// `(sn, cn, dn)(u | m)` for `m < 1` by Newton inversion of the amplitude
/// integral.
pub fn jacobi_quad(u: f64, m: f64) -> (f64, f64, f64) {
    let k = k_quad(m);
    let mut phi = PI / 2.0 * u / k;
    for _ in 0..60 {
        let g = f_quad(phi, m) - u;
        let step = g * (1.0 - m * phi.sin().powi(2)).sqrt();
        phi -= step;
        if step.abs() < 1e-15 * (1.0 + phi.abs()) {
            break;
        }
    }
    (phi.sin(), phi.cos(), (1.0 - m * phi.sin().powi(2)).sqrt())
}

/// Points of the level set built directly from the circle parametrization:
/// `A = (2E, 0) + R(sin ψ, cos ψ)` rotated, then both wall roots.
pub fn circle_points(params: &LevelSetParams, n: usize) -> Vec<ConfigPoint> {
    let (d, e, r) = (params.d, params.e, params.r);
    let mut out = Vec::new();
    for k in 0..n {
        let psi = 2.0 * PI * (k as f64 + 0.37) / n as f64;
        let a1 = r * psi.sin();
        let a2 = 2.0 * e + r * psi.cos();
        let a = 1.0 - a1 * a1;
        let b = a1 * (a2 + d);
        let c = 1.0 - (a2 + d) * (a2 + d);
        let disc = b * b - a * c;
        if disc < 0.0 || a.abs() < 1e-6 {
            continue;
        }
        for x in [(-b + disc.sqrt()) / a, (-b - disc.sqrt()) / a] {
            if x.abs() < 1e3 {
                out.push(ConfigPoint::new(x, a1, a2));
            }
        }
    }
    out
}

/// Elementary winding number of a map along `n` steps, from the lifted
/// angle of `(−A₁, z)` (single oval) with a plain Cesàro average; used only
/// as a coarse independent check.
pub fn plain_winding(start: ConfigPoint, params: &LevelSetParams, n: usize) -> f64 {
    let z = |c: &ConfigPoint| (1.0 - c.a1 * c.a1) * c.x + c.a1 * (c.a2 + params.d);
    let angle = |c: &ConfigPoint| (-c.a1).atan2(z(c)) / (2.0 * PI);
    let mut c = start;
    let mut total = 0.0;
    let mut prev = angle(&c);
    for _ in 0..n {
        c = boltzmann_core::map_t(c, params).unwrap().point;
        let next = angle(&c);
        total += (next - prev).rem_euclid(1.0);
        prev = next;
    }
    total / n as f64
}
