//! Kepler motion in units `m = κ = 1`: conserved quantities, reflection at the
//! wall `x₂ = 1`, and the passage between phase-space wall states and level-set
//! coordinates.

use serde::Serialize;

use crate::curve::LevelSetParams;
use crate::error::{Error, Result};
use crate::poincare::{involution_i, ConfigPoint, RootExchange};

/// Default floor on `|L|` below which the conic is a radial double line.
pub const ANGULAR_MOMENTUM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseState {
    pub x1: f64,
    pub x2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl PhaseState {
    pub fn new(x1: f64, x2: f64, p1: f64, p2: f64) -> Self {
        PhaseState { x1, x2, p1, p2 }
    }

    pub fn radius(&self) -> f64 {
        self.x1.hypot(self.x2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservedSet {
    pub e: f64,
    pub l: f64,
    pub a1: f64,
    pub a2: f64,
    pub d: f64,
}

impl ConservedSet {
    /// `2EL² − (A₁² + A₂² − 1)`, which vanishes identically.
    pub fn classical_defect(&self) -> f64 {
        2.0 * self.e * self.l * self.l - (self.a1 * self.a1 + self.a2 * self.a2 - 1.0)
    }
}

pub fn conserved_quantities(s: PhaseState) -> Result<ConservedSet> {
    let r = s.radius();
    if !(r > 0.0) {
        return Err(Error::AtCentre);
    }
    let e = 0.5 * (s.p1 * s.p1 + s.p2 * s.p2) - 1.0 / r;
    let l = s.x1 * s.p2 - s.x2 * s.p1;
    let a1 = s.p2 * l - s.x1 / r;
    let a2 = -s.p1 * l - s.x2 / r;
    Ok(ConservedSet {
        e,
        l,
        a1,
        a2,
        d: l * l - 2.0 * a2,
    })
}

/// Elastic reflection: `p₂ ↦ −p₂` at a wall state.
pub fn reflect_at_wall(s: PhaseState) -> Result<PhaseState> {
    if s.x2 != 1.0 {
        return Err(Error::NotOnWall(s.x2));
    }
    let out = PhaseState::new(s.x1, 1.0, s.p1, -s.p2);
    #[cfg(debug_assertions)]
    if let (Ok(before), Ok(after)) = (conserved_quantities(s), conserved_quantities(out)) {
        let scale = 1.0 + before.l.abs() + s.p1.abs();
        debug_assert!((after.l - (-before.l - 2.0 * s.p1)).abs() <= 1e-12 * scale * scale);
        let a2 = before.a2 + 2.0 * s.p1 * before.l + 2.0 * s.p1 * s.p1;
        debug_assert!((after.a2 - a2).abs() <= 1e-12 * scale * scale * (1.0 + s.x1.abs()));
    }
    Ok(out)
}

/// Which of the two momenta at a wall point is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `p₂ ≥ 0`: leaving the wall, the state right after a collision.
    Outgoing,
    /// `p₂ ≤ 0`: arriving at the wall, the state right before it.
    Incoming,
}

/// Wall state at `(x, 1)` on the conic of `c`, with the default `|L|` floor.
pub fn phase_from_config(
    c: ConfigPoint,
    params: &LevelSetParams,
    branch: Branch,
) -> Result<PhaseState> {
    phase_from_config_with(c, params, branch, ANGULAR_MOMENTUM_FLOOR)
}

pub fn phase_from_config_with(
    c: ConfigPoint,
    params: &LevelSetParams,
    branch: Branch,
    l_floor: f64,
) -> Result<PhaseState> {
    let l2 = params.d + 2.0 * c.a2;
    if l2 < 0.0 {
        return Err(Error::NonRealAngularMomentum(l2));
    }
    let l_abs = l2.sqrt();
    if l_abs < l_floor {
        return Err(Error::RadialConic(l_abs));
    }
    let r = (c.x * c.x + 1.0).sqrt();
    let g = c.a2 + params.d - c.a1 * c.x;
    if g < -1e-9 * r {
        return Err(Error::NonPhysicalBranch(g));
    }
    let q2 = c.a1 + c.x / r;
    let want = match branch {
        Branch::Outgoing => 1.0,
        Branch::Incoming => -1.0,
    };
    let l = if q2 * want >= 0.0 { l_abs } else { -l_abs };
    Ok(PhaseState::new(c.x, 1.0, -(c.a2 + 1.0 / r) / l, q2 / l))
}

/// Polyline of the Kepler arc from the wall point of `c` to the wall point of
/// `i(c)`, sampled uniformly in the true anomaly, `n ≥ 2` points.
pub fn trajectory_arc(
    c: ConfigPoint,
    params: &LevelSetParams,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    params.regime()?;
    if params.mirrored {
        return Err(Error::NonRealAngularMomentum(params.d + 2.0 * c.a2));
    }
    if n < 2 {
        return Err(Error::Invalid("an arc needs at least two samples".into()));
    }
    let l2 = params.d + 2.0 * c.a2;
    if l2 < 0.0 {
        return Err(Error::NonRealAngularMomentum(l2));
    }
    let (other, tag) = involution_i(c, params)?;
    for p in [c, other] {
        let g = p.a2 + params.d - p.a1 * p.x;
        if g < -1e-9 * (p.x * p.x + 1.0).sqrt() {
            return Err(if p == other {
                Error::ArcThroughInfinity
            } else {
                Error::NonPhysicalBranch(g)
            });
        }
    }
    let phi0 = 1f64.atan2(c.x);
    let phi1 = 1f64.atan2(other.x);
    let denom = |phi: f64| 1.0 + c.a1 * phi.cos() + c.a2 * phi.sin();
    // scan for a vanishing denominator, which would send the arc to infinity
    let checks = 64.max(n);
    for k in 0..=checks {
        let phi = phi0 + (phi1 - phi0) * k as f64 / checks as f64;
        if denom(phi) <= 0.0 {
            return Err(Error::ArcThroughInfinity);
        }
    }
    if tag != RootExchange::DoubleRoot {
        let mid = 0.5 * (phi0 + phi1);
        if l2 / denom(mid) * mid.sin() < 1.0 - 1e-9 {
            return Err(Error::ArcBelowWall);
        }
    }
    let mut pts = Vec::with_capacity(n);
    pts.push((c.x, 1.0));
    for k in 1..n - 1 {
        let phi = phi0 + (phi1 - phi0) * k as f64 / (n - 1) as f64;
        let r = l2 / denom(phi);
        pts.push((r * phi.cos(), r * phi.sin()));
    }
    pts.push((other.x, 1.0));
    Ok(pts)
}
