//! Periods of the collision map: prediction from the rotation number, direct
//! detection by iteration, the start-point independence check, and loci of
//! periodic parameters.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{derive_params, rotation_number, LevelSetParams, Regime, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::poincare::{map_t, sample_level_set, ConfigPoint};

/// Default rationality tolerance on `dist(p·α, ℤ)`.
pub const RATIONAL_TOL: f64 = 1e-9;

/// Default largest period considered.
pub const DEFAULT_P_MAX: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodReport {
    pub predicted: Option<usize>,
    /// Unanimous detected period; `None` if no sample closed or samples disagree.
    pub detected: Option<usize>,
    pub alpha: f64,
    pub method_agreement: bool,
    /// Largest closing defect `‖tᵖ(c) − c‖` over the samples (at the detected
    /// period, or at `p_max` if none was found).
    pub residual: f64,
    /// Detected period of each sample, in sample order.
    pub per_sample: Vec<Option<usize>>,
}

fn dist_to_integer(v: f64) -> f64 {
    (v - v.round()).abs()
}

/// Smallest admissible period for a rotation by `alpha`; with `flips` the
/// component index must also return, so only even periods count.
pub fn period_from_alpha(alpha: f64, flips: bool, p_max: usize, tol: f64) -> Option<usize> {
    (1..=p_max)
        .filter(|p| !flips || p % 2 == 0)
        .find(|&p| dist_to_integer(p as f64 * alpha) < tol)
}

pub fn predict_period(params: &LevelSetParams, p_max: usize, tol: f64) -> Result<Option<usize>> {
    let rot = rotation_number(params)?;
    Ok(period_from_alpha(
        rot.alpha,
        rot.flips_component,
        p_max,
        tol,
    ))
}

/// Smallest `p ≤ p_max` with `‖tᵖ(c₀) − c₀‖ < tol` in the bounded chart.
pub fn detect_period_direct(
    c0: ConfigPoint,
    params: &LevelSetParams,
    p_max: usize,
    tol: f64,
) -> Result<Option<usize>> {
    Ok(closing(c0, params, p_max, tol)?.0)
}

fn closing(
    c0: ConfigPoint,
    params: &LevelSetParams,
    p_max: usize,
    tol: f64,
) -> Result<(Option<usize>, f64)> {
    let mut c = c0;
    let mut last = f64::INFINITY;
    for p in 1..=p_max {
        c = map_t(c, params)
            .map_err(|err| Error::OrbitAbort {
                step: p,
                reason: err.to_string(),
                partial: Box::new(crate::poincare::Orbit {
                    points: vec![c0],
                    params: *params,
                    residuals: vec![c0.max_residual(params)],
                }),
            })?
            .point;
        last = c.distance(&c0);
        if last < tol {
            return Ok((Some(p), last));
        }
    }
    Ok((None, last))
}

/// Runs direct detection from `n_samples` seeded points and compares the
/// outcome with the rotation-number prediction.
pub fn poncelet_check(
    params: &LevelSetParams,
    n_samples: usize,
    p_max: usize,
    tol: f64,
    seed: u64,
) -> Result<PeriodReport> {
    let rot = rotation_number(params)?;
    let predicted = period_from_alpha(rot.alpha, rot.flips_component, p_max, tol);
    let starts = sample_level_set(params, n_samples, seed)?;
    let results: Vec<(Option<usize>, f64)> = starts
        .par_iter()
        .map(|&c| closing(c, params, p_max, tol))
        .collect::<Result<_>>()?;
    let per_sample: Vec<Option<usize>> = results.iter().map(|r| r.0).collect();
    let unanimous = per_sample.windows(2).all(|w| w[0] == w[1]);
    let detected = if unanimous {
        per_sample.first().copied().flatten()
    } else {
        None
    };
    let residual = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(PeriodReport {
        predicted,
        detected,
        alpha: rot.alpha,
        method_agreement: unanimous && predicted == detected,
        residual,
        per_sample,
    })
}

/// `4(D²−4)E² + 4D(D²−3)E + D⁴ − 2D² − 3`, whose zero set is the locus of
/// period three.
pub fn period3_residual(d: f64, e: f64) -> f64 {
    let d2 = d * d;
    4.0 * (d2 - 4.0) * e * e + 4.0 * d * (d2 - 3.0) * e + d2 * d2 - 2.0 * d2 - 3.0
}

/// Sum of the absolute values of the monomials of [`period3_residual`], used
/// to judge a residual relatively.
pub fn period3_scale(d: f64, e: f64) -> f64 {
    let d2 = d * d;
    4.0 * d2 * e * e
        + 16.0 * e * e
        + 4.0 * (d * d2 * e).abs()
        + 12.0 * (d * e).abs()
        + d2 * d2
        + 2.0 * d2
        + 3.0
}

/// Signed distance of `p·α` to the nearest integer, or `None` where the class
/// does not admit period `p` (degenerate, empty, or odd `p` in II₊).
fn locus_function(d: f64, e: f64, p: usize) -> Option<(f64, LevelSetParams)> {
    let params = derive_params(d, e);
    let regime = params.regime().ok()?;
    if regime == Regime::BipartitePlus && p % 2 == 1 {
        return None;
    }
    let alpha = rotation_number(&params).ok()?.alpha;
    let v = p as f64 * alpha;
    Some((v - v.round(), params))
}

/// Number of scan cells used by [`find_periodic_locus`].
pub const LOCUS_SCAN_CELLS: usize = 800;

/// Values of `D` in `d_range` at fixed `E` where `dist(p·α(D, E), ℤ) = 0`.
///
/// Sign changes are bracketed on a uniform scan, refined by bisection to
/// `tol`, then polished by three secant-derivative Newton steps. Jumps of the
/// reduced function by about one (where `p·α` crosses a half-integer) are not
/// roots, nor are brackets straddling a class boundary. The `p = 1`
/// degeneration at `D = −2E` lies in the tangent band and is never returned.
pub fn find_periodic_locus(e: f64, p: usize, d_range: (f64, f64), tol: f64) -> Vec<f64> {
    if p == 0 {
        return Vec::new();
    }
    let (lo, hi) = d_range;
    let n = LOCUS_SCAN_CELLS;
    let grid: Vec<f64> = (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect();
    let values: Vec<Option<(f64, LevelSetParams)>> =
        grid.par_iter().map(|&d| locus_function(d, e, p)).collect();
    let f = |d: f64| locus_function(d, e, p).map(|v| v.0);
    let mut roots = Vec::new();
    for k in 0..n {
        let (Some((fa, pa)), Some((fb, pb))) = (values[k], values[k + 1]) else {
            continue;
        };
        if pa.class != pb.class || pa.canonical_class != pb.canonical_class {
            continue;
        }
        if fa == 0.0 {
            roots.push(grid[k]);
            continue;
        }
        if fa * fb > 0.0 || (fa - fb).abs() > 0.5 {
            continue;
        }
        let (mut a, mut b, mut ga) = (grid[k], grid[k + 1], fa);
        let mut failed = false;
        while b - a > tol {
            let m = 0.5 * (a + b);
            let Some(gm) = f(m) else {
                failed = true;
                break;
            };
            if (gm - ga).abs() > 0.5 {
                failed = true;
                break;
            }
            if gm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if gm * ga < 0.0 {
                b = m;
            } else {
                a = m;
                ga = gm;
            }
        }
        if failed {
            continue;
        }
        let mut root = 0.5 * (a + b);
        let (bracket_lo, bracket_hi) = (grid[k], grid[k + 1]);
        for _ in 0..3 {
            let h = 1e-6 * (bracket_hi - bracket_lo).max(1e-9);
            let (Some(g0), Some(gp), Some(gm)) = (f(root), f(root + h), f(root - h)) else {
                break;
            };
            let slope = (gp - gm) / (2.0 * h);
            if slope == 0.0 || !slope.is_finite() {
                break;
            }
            let next = root - g0 / slope;
            match f(next) {
                Some(gn) if gn.abs() <= g0.abs() && next > bracket_lo && next < bracket_hi => {
                    root = next
                }
                _ => break,
            }
        }
        let near_tangent = (root + 2.0 * e).abs() <= 10.0 * BOUNDARY_TOL.max(tol);
        if !near_tangent {
            roots.push(root);
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= 10.0 * tol);
    roots
}
