//! The level set `X(D, E)` in wall coordinates `(x, A₁, A₂)`, its two
//! involutions and the collision map `t = j ∘ i`.
//!
//! A point couples the wall point `P = (x, 1)` with a Kepler conic through it,
//! described by its Laplace–Runge–Lenz vector. The defining equations are
//!
//! ```text
//! A₁² + A₂² − 4E·A₂ = 1 + 2DE
//! x² + 1 = (A₂ + D − A₁x)²
//! ```
//!
//! `i` exchanges the two intersections of the conic with the wall, `j`
//! replaces the conic by its reflection at the wall point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::{uniformize, AngleCoord, LevelSetParams, Regime};
use crate::error::{Error, Result};

/// Relative discriminant below which `i` treats its point as a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-12;

/// `|1 − A₁²|` below which the conic is treated as nearly parabolic along the
/// wall direction.
pub const NEAR_PARABOLIC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfigPoint {
    pub x: f64,
    pub a1: f64,
    pub a2: f64,
}

impl ConfigPoint {
    pub fn new(x: f64, a1: f64, a2: f64) -> Self {
        ConfigPoint { x, a1, a2 }
    }

    /// `z = (1 − A₁²)x + A₁(A₂ + D)`, with `z² = A₁² + (A₂ + D)² − 1` on the
    /// level set.
    pub fn z(&self, params: &LevelSetParams) -> f64 {
        (1.0 - self.a1 * self.a1) * self.x + self.a1 * (self.a2 + params.d)
    }

    /// Squared angular momentum `L² = D + 2A₂`.
    pub fn angular_momentum_sq(&self, params: &LevelSetParams) -> f64 {
        params.d + 2.0 * self.a2
    }

    /// Angular momentum of the outgoing state at the wall point, `z/√(D+2E)`.
    /// NaN on the mirrored side, where `L²` is negative.
    pub fn angular_momentum(&self, params: &LevelSetParams) -> f64 {
        let s = params.d + 2.0 * params.e;
        if s > 0.0 {
            self.z(params) / s.sqrt()
        } else {
            f64::NAN
        }
    }

    /// Scaled defects of the two defining equations.
    pub fn residuals(&self, params: &LevelSetParams) -> (f64, f64) {
        let (d, e) = (params.d, params.e);
        let (a1, a2, x) = (self.a1, self.a2, self.x);
        let f1 = a1 * a1 + a2 * a2 - 4.0 * e * a2 - 1.0 - 2.0 * d * e;
        let g = a2 + d - a1 * x;
        let f2 = x * x + 1.0 - g * g;
        (
            f1.abs() / (1.0 + a1 * a1 + a2 * a2),
            f2.abs() / (x * x + 1.0),
        )
    }

    pub fn max_residual(&self, params: &LevelSetParams) -> f64 {
        let (a, b) = self.residuals(params);
        a.max(b)
    }

    /// `D` recomputed from the wall equation on the branch of the sign of
    /// `A₂ + D − A₁x`.
    pub fn measured_d(&self, params: &LevelSetParams) -> f64 {
        let g = self.a2 + params.d - self.a1 * self.x;
        let sigma = if g < 0.0 { -1.0 } else { 1.0 };
        sigma * (self.x * self.x + 1.0).sqrt() + self.a1 * self.x - self.a2
    }

    /// Defect of the classical relation `2EL² = |A|² − 1`, with `L²` from
    /// [`ConfigPoint::measured_d`]. Solving it for `E` instead would divide by
    /// `L²`, which is tiny on nearly radial conics.
    pub fn energy_defect(&self, params: &LevelSetParams) -> f64 {
        let l2 = self.measured_d(params) + 2.0 * self.a2;
        2.0 * params.e * l2 - (self.a1 * self.a1 + self.a2 * self.a2 - 1.0)
    }

    /// `(x/(1+|x|), A₁, A₂)`: bounded chart used for distances.
    pub fn bounded(&self) -> [f64; 3] {
        [self.x / (1.0 + self.x.abs()), self.a1, self.a2]
    }

    pub fn distance(&self, other: &ConfigPoint) -> f64 {
        let a = self.bounded();
        let b = other.bounded();
        a.iter()
            .zip(b.iter())
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    }
}

/// How `i` produced its result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootExchange {
    Exchanged,
    /// The wall is tangent to the conic; the point is fixed by `i`.
    DoubleRoot,
    /// `|1 − A₁²|` is tiny; the other root was taken from the product form.
    NearParabolic,
}

/// Other intersection of the conic with the wall.
///
/// The roots of `(1−A₁²)x² + 2A₁(A₂+D)x + 1 − (A₂+D)² = 0` are exchanged by the
/// sum form when `x` is the smaller root and by the product form otherwise,
/// which avoids cancellation; the product form is the only one used when the
/// leading coefficient nearly vanishes.
pub fn involution_i(
    c: ConfigPoint,
    params: &LevelSetParams,
) -> Result<(ConfigPoint, RootExchange)> {
    let g = c.a2 + params.d;
    let a = 1.0 - c.a1 * c.a1;
    let b = c.a1 * g;
    let q = 1.0 - g * g;
    let disc = c.a1 * c.a1 + g * g - 1.0;
    if disc <= DOUBLE_ROOT_TOL * g * g {
        return Ok((c, RootExchange::DoubleRoot));
    }
    if a == 0.0 {
        return Err(Error::PointAtInfinity);
    }
    let near = a.abs() < NEAR_PARABOLIC_TOL;
    let sum = -2.0 * b / a;
    let x = if near || c.x.abs() >= (sum - c.x).abs() {
        if c.x == 0.0 {
            sum
        } else {
            q / (a * c.x)
        }
    } else {
        sum - c.x
    };
    if !x.is_finite() {
        return Err(Error::PointAtInfinity);
    }
    let tag = if near {
        RootExchange::NearParabolic
    } else {
        RootExchange::Exchanged
    };
    Ok((ConfigPoint::new(x, c.a1, c.a2), tag))
}

/// Reflected conic through the same wall point.
pub fn involution_j(c: ConfigPoint, params: &LevelSetParams) -> ConfigPoint {
    let e = params.e;
    let (a1, a2) = (c.a1, c.a2);
    // for |x| > 1 divide through by x² so that nothing overflows
    let (n1, n2) = if c.x.abs() <= 1.0 {
        let x = c.x;
        let s = x * x + 1.0;
        (
            ((x * x - 1.0) * a1 - 2.0 * x * a2 + 4.0 * x * e) / s,
            (-2.0 * x * a1 - (x * x - 1.0) * a2 + 4.0 * x * x * e) / s,
        )
    } else {
        let w = 1.0 / c.x;
        let s = 1.0 + w * w;
        (
            ((1.0 - w * w) * a1 - 2.0 * w * a2 + 4.0 * w * e) / s,
            (-2.0 * w * a1 - (1.0 - w * w) * a2 + 4.0 * e) / s,
        )
    };
    ConfigPoint::new(c.x, n1, n2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapStep {
    pub point: ConfigPoint,
    pub exchange: RootExchange,
}

/// One collision: `t = j ∘ i`.
pub fn map_t(c: ConfigPoint, params: &LevelSetParams) -> Result<MapStep> {
    let (p, exchange) = involution_i(c, params)?;
    Ok(MapStep {
        point: involution_j(p, params),
        exchange,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterateOptions {
    /// Project each iterate back onto the level set with one Gauss–Newton step.
    pub renormalize: bool,
    /// Scaled residual above which the orbit is aborted.
    pub residual_ceiling: f64,
    /// `|x|` above which the orbit is aborted as running off to infinity.
    pub max_abs_x: f64,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions {
            renormalize: false,
            residual_ceiling: 1e-6,
            max_abs_x: 1e12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub points: Vec<ConfigPoint>,
    pub params: LevelSetParams,
    /// `residuals[n]` is the max scaled defect of `points[n]`.
    pub residuals: Vec<f64>,
}

/// Minimum-norm Gauss–Newton step onto both defining equations.
fn renormalize(c: ConfigPoint, params: &LevelSetParams) -> ConfigPoint {
    let (d, e) = (params.d, params.e);
    let (x, a1, a2) = (c.x, c.a1, c.a2);
    let f1 = a1 * a1 + a2 * a2 - 4.0 * e * a2 - 1.0 - 2.0 * d * e;
    let g = a2 + d - a1 * x;
    let f2 = x * x + 1.0 - g * g;
    // gradients in (x, A1, A2)
    let j1 = [0.0, 2.0 * a1, 2.0 * a2 - 4.0 * e];
    let j2 = [2.0 * x + 2.0 * g * a1, 2.0 * g * x, -2.0 * g];
    let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let (m11, m12, m22) = (dot(&j1, &j1), dot(&j1, &j2), dot(&j2, &j2));
    let det = m11 * m22 - m12 * m12;
    if det.abs() <= f64::EPSILON * m11 * m22 || !det.is_finite() {
        return c;
    }
    let l1 = (m22 * f1 - m12 * f2) / det;
    let l2 = (m11 * f2 - m12 * f1) / det;
    ConfigPoint::new(
        x - l1 * j1[0] - l2 * j2[0],
        a1 - l1 * j1[1] - l2 * j2[1],
        a2 - l1 * j1[2] - l2 * j2[2],
    )
}

/// `n` steps of `t` from `c0`, with per-point residuals.
pub fn iterate_orbit(
    c0: ConfigPoint,
    params: &LevelSetParams,
    n: usize,
    opts: &IterateOptions,
) -> Result<Orbit> {
    let mut orbit = Orbit {
        points: Vec::with_capacity(n + 1),
        params: *params,
        residuals: Vec::with_capacity(n + 1),
    };
    orbit.points.push(c0);
    orbit.residuals.push(c0.max_residual(params));
    let mut c = c0;
    for step in 1..=n {
        let next = match map_t(c, params) {
            Ok(s) => s.point,
            Err(err) => {
                return Err(Error::OrbitAbort {
                    step,
                    reason: err.to_string(),
                    partial: Box::new(orbit),
                })
            }
        };
        let next = if opts.renormalize {
            renormalize(next, params)
        } else {
            next
        };
        let res = next.max_residual(params);
        let reason = if next.x.abs() > opts.max_abs_x || !next.x.is_finite() {
            Some(format!(
                "|x| = {:e} exceeds {:e}",
                next.x.abs(),
                opts.max_abs_x
            ))
        } else if !(res <= opts.residual_ceiling) {
            Some(format!(
                "residual {res:e} exceeds {:e}",
                opts.residual_ceiling
            ))
        } else {
            None
        };
        if let Some(reason) = reason {
            log::warn!("orbit abort at step {step}: {reason}");
            return Err(Error::OrbitAbort {
                step,
                reason,
                partial: Box::new(orbit),
            });
        }
        orbit.points.push(next);
        orbit.residuals.push(res);
        c = next;
    }
    Ok(orbit)
}

/// `m` points on the real locus, uniform in the angle coordinate and
/// alternating between the components of a bipartite locus.
pub fn sample_level_set(params: &LevelSetParams, m: usize, seed: u64) -> Result<Vec<ConfigPoint>> {
    let regime = params.regime()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(m);
    let mut attempts = 0usize;
    while out.len() < m {
        attempts += 1;
        if attempts > 100 * m + 100 {
            return Err(Error::Invalid(format!(
                "could not sample {m} points (got {})",
                out.len()
            )));
        }
        let theta: f64 = rng.gen();
        let eps = if regime == Regime::Unipartite {
            0
        } else {
            (out.len() % 2) as u8
        };
        match uniformize(AngleCoord::new(theta, eps), params) {
            Ok(c) if c.max_residual(params) <= 1e-12 => out.push(c),
            Ok(_) | Err(Error::Pole(_)) => continue,
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::derive_params;
    use approx::assert_relative_eq;

    #[test]
    fn symmetric_conic_roots_are_opposite() {
        let p = derive_params(1.5, -0.2);
        let a2 = -0.2 * 2.0 + p.r;
        let g = a2 + p.d;
        let x = (g * g - 1.0).sqrt();
        let c = ConfigPoint::new(x, 0.0, a2);
        assert!(c.max_residual(&p) < 1e-15);
        let (ci, tag) = involution_i(c, &p).unwrap();
        assert_eq!(tag, RootExchange::Exchanged);
        assert_relative_eq!(ci.x, -x, epsilon = 1e-15);
    }

    #[test]
    fn j_at_origin_flips_a1() {
        let p = derive_params(1.5, -0.2);
        let c = involution_j(ConfigPoint::new(0.0, 0.3, 0.1), &p);
        assert_eq!((c.x, c.a1, c.a2), (0.0, -0.3, 0.1));
    }

    #[test]
    fn fixed_points_of_i_sit_at_a2_minus_half_d() {
        let p = derive_params(1.5, -0.2);
        let s = sample_level_set(&p, 200, 3).unwrap();
        for c in s {
            let z = c.z(&p);
            let expected = (p.d + 2.0 * p.e) * (p.d + 2.0 * c.a2);
            assert_relative_eq!(z * z, expected, epsilon = 1e-10);
        }
        // at A2 = −D/2 the discriminant is zero and i returns its argument
        let a2 = -p.d / 2.0;
        let a1 = (1.0 + 2.0 * p.d * p.e + 4.0 * p.e * a2 - a2 * a2).sqrt();
        let x = -a1 * (a2 + p.d) / (1.0 - a1 * a1);
        let c = ConfigPoint::new(x, a1, a2);
        assert!(c.max_residual(&p) < 1e-14);
        let (ci, tag) = involution_i(c, &p).unwrap();
        assert_eq!(tag, RootExchange::DoubleRoot);
        assert_eq!(ci, c);
    }

    #[test]
    fn fixed_points_of_j() {
        let p = derive_params(1.5, -0.2);
        let mut fixed = 0;
        for sign in [1.0, -1.0] {
            let a2 = 2.0 * p.e / (1.0 + sign * p.r);
            let a1sq = p.r2 - (a2 - 2.0 * p.e).powi(2);
            if a1sq < 0.0 {
                continue;
            }
            for a1 in [a1sq.sqrt(), -a1sq.sqrt()] {
                for x in solve_wall(a1, a2, p.d) {
                    let c = ConfigPoint::new(x, a1, a2);
                    if c.distance(&involution_j(c, &p)) < 1e-12 {
                        fixed += 1;
                    }
                }
            }
        }
        assert!(fixed >= 2, "{fixed}");
    }

    fn solve_wall(a1: f64, a2: f64, d: f64) -> Vec<f64> {
        let a = 1.0 - a1 * a1;
        let b = a1 * (a2 + d);
        let c = 1.0 - (a2 + d) * (a2 + d);
        let disc = b * b - a * c;
        if disc < 0.0 {
            return vec![];
        }
        vec![(-b + disc.sqrt()) / a, (-b - disc.sqrt()) / a]
    }

    #[test]
    fn near_parabolic_uses_product_form() {
        // choose A1 = 1 − 1e−10 on a positive-energy level set
        let p = derive_params(0.5, 0.3);
        let a1: f64 = 1.0 - 1e-10;
        let a2 = 2.0 * p.e - (p.r2 - a1 * a1).sqrt();
        let roots = solve_wall(a1, a2, p.d);
        let small = roots
            .iter()
            .copied()
            .min_by(|u, v| u.abs().total_cmp(&v.abs()))
            .unwrap();
        let c = ConfigPoint::new(small, a1, a2);
        let (ci, tag) = involution_i(c, &p).unwrap();
        assert_eq!(tag, RootExchange::NearParabolic);
        assert!(ci.max_residual(&p) < 1e-9, "{}", ci.max_residual(&p));
        let (back, _) = involution_i(ci, &p).unwrap();
        assert_relative_eq!(back.x, small, max_relative = 1e-9);
    }

    #[test]
    fn renormalization_reduces_defect() {
        let p = derive_params(1.5, -0.2);
        let c = sample_level_set(&p, 1, 9).unwrap()[0];
        let off = ConfigPoint::new(c.x + 1e-7, c.a1 - 2e-7, c.a2 + 1e-7);
        let fixed = renormalize(off, &p);
        assert!(fixed.max_residual(&p) < 1e-12);
        assert!(off.max_residual(&p) > 1e-8);
    }

    #[test]
    fn iterate_zero_steps() {
        let p = derive_params(1.75, -5.0 / 24.0);
        let c = sample_level_set(&p, 1, 1).unwrap()[0];
        let o = iterate_orbit(c, &p, 0, &IterateOptions::default()).unwrap();
        assert_eq!(o.points, vec![c]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = derive_params(2.5, -0.1);
        assert_eq!(
            sample_level_set(&p, 20, 42).unwrap(),
            sample_level_set(&p, 20, 42).unwrap()
        );
    }
}
