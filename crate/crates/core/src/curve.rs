//! Level-set parameters, real-locus classification, the Jacobi-function
//! uniformization of the real locus and the rotation number of the collision
//! map.
//!
//! Everything is evaluated for the canonical representative with `D + 2E > 0`.
//! Parameters with `D + 2E < 0` are carried to `(−D, −E)` by the bijection
//! `(x, A₁, A₂) ↦ (x, −A₁, −A₂)`, which commutes with both involutions; the
//! flag [`LevelSetParams::mirrored`] records it.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::elliptic::{
    complete_k, jacobi_real, legendre_f_amplitude, rotation_integral, LatticeData, Modulus,
    RotationPath,
};
use crate::error::{Error, Result};
use crate::poincare::{map_t, ConfigPoint};

/// Absolute band on `D² − 4`, `R²`, `D + 2E` and `D + 4E + 2R` inside which a
/// parameter pair is assigned the corresponding degenerate class.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// `|x|` beyond which a uniformized point is reported as a pole.
pub const POLE_X_LIMIT: f64 = 1e12;

/// Orientation of the analytic integral relative to the `θ` direction of
/// [`uniformize`], per regime (I, II₊, II₋). Anchored against the empirical
/// winding of the collision map; see the `orientation_anchor` tests.
pub const ROTATION_ORIENTATION: [f64; 3] = [1.0, 1.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RealLocusClass {
    I,
    IIplus,
    IIminus,
    Empty,
    /// `D + 2E = 0`: every Kepler conic is tangent to the wall.
    DegenerateTangent,
    /// `D² = 4`: nodal curve.
    NodalD,
    /// `1 + 2DE + 4E² = 0`: two components meeting at two nodes.
    NodalR,
    /// `D + 2E < 0`, handled through the sign symmetry.
    NegativeAngularMomentumSide,
}

impl RealLocusClass {
    pub fn name(self) -> &'static str {
        match self {
            RealLocusClass::I => "I",
            RealLocusClass::IIplus => "IIplus",
            RealLocusClass::IIminus => "IIminus",
            RealLocusClass::Empty => "Empty",
            RealLocusClass::DegenerateTangent => "DegenerateTangent",
            RealLocusClass::NodalD => "NodalD",
            RealLocusClass::NodalR => "NodalR",
            RealLocusClass::NegativeAngularMomentumSide => "NegativeAngularMomentumSide",
        }
    }
}

impl fmt::Display for RealLocusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three smooth, non-empty regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// One component, rhombic lattice, `k² < 0`.
    Unipartite,
    /// Two components, `t` exchanges them.
    BipartitePlus,
    /// Two components, `t` preserves them.
    BipartiteMinus,
}

impl Regime {
    pub fn index(self) -> usize {
        match self {
            Regime::Unipartite => 0,
            Regime::BipartitePlus => 1,
            Regime::BipartiteMinus => 2,
        }
    }

    pub fn is_bipartite(self) -> bool {
        self != Regime::Unipartite
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSetParams {
    pub d: f64,
    pub e: f64,
    /// Derived quantities below refer to `(−d, −e)`.
    pub mirrored: bool,
    pub r2: f64,
    /// Non-negative root of `r2` (NaN when `r2 < 0`).
    pub r: f64,
    pub k2: f64,
    pub s0: f64,
    pub s0_inv: f64,
    pub c2: f64,
    /// Positive root of `c2` (NaN when `c2 ≤ 0`).
    pub c: f64,
    /// Class of `(d, e)` as given.
    pub class: RealLocusClass,
    /// Class of the canonical representative.
    pub canonical_class: RealLocusClass,
    pub lattice: Option<LatticeData>,
}

impl LevelSetParams {
    /// `(D, E)` of the canonical representative.
    pub fn canonical(&self) -> (f64, f64) {
        if self.mirrored {
            (-self.d, -self.e)
        } else {
            (self.d, self.e)
        }
    }

    pub fn regime(&self) -> Result<Regime> {
        match self.canonical_class {
            RealLocusClass::I => Ok(Regime::Unipartite),
            RealLocusClass::IIplus => Ok(Regime::BipartitePlus),
            RealLocusClass::IIminus => Ok(Regime::BipartiteMinus),
            RealLocusClass::Empty => Err(Error::EmptyLevelSet),
            other => Err(Error::Degenerate(other)),
        }
    }

    pub fn modulus(&self) -> Result<Modulus> {
        Ok(Modulus::new(self.k2)?)
    }

    /// Maps a point between `(d, e)` coordinates and canonical ones (an involution).
    pub fn to_canonical(&self, c: ConfigPoint) -> ConfigPoint {
        if self.mirrored {
            ConfigPoint::new(c.x, -c.a1, -c.a2)
        } else {
            c
        }
    }
}

/// Derives `R, k², s₀, C` and the real-locus class for `(d, e)`.
pub fn derive_params(d: f64, e: f64) -> LevelSetParams {
    let sum = d + 2.0 * e;
    let mirrored = sum < -BOUNDARY_TOL;
    let (cd, ce) = if mirrored { (-d, -e) } else { (d, e) };
    let r2 = 1.0 + 2.0 * cd * ce + 4.0 * ce * ce;
    let r = if r2 >= 0.0 { r2.sqrt() } else { f64::NAN };
    let cs = cd + 2.0 * ce;
    let den = cd + 4.0 * ce + 2.0 * r;
    let k2 = (cd + 4.0 * ce - 2.0 * r) / den;
    let s0 = (cs + r) / (cs - r);
    let s0_inv = (cs - r) / (cs + r);
    let c2 = cs * den;
    let c = if c2 > 0.0 { c2.sqrt() } else { f64::NAN };

    let mut canonical_class = if !d.is_finite() || !e.is_finite() {
        RealLocusClass::Empty
    } else if sum.abs() <= BOUNDARY_TOL {
        RealLocusClass::DegenerateTangent
    } else if r2.abs() <= BOUNDARY_TOL {
        RealLocusClass::NodalR
    } else if r2 < 0.0 {
        RealLocusClass::Empty
    } else if (cd * cd - 4.0).abs() <= BOUNDARY_TOL {
        RealLocusClass::NodalD
    } else if den <= BOUNDARY_TOL {
        RealLocusClass::Empty
    } else if cd.abs() < 2.0 {
        RealLocusClass::I
    } else if cd > 2.0 {
        RealLocusClass::IIplus
    } else {
        RealLocusClass::IIminus
    };

    let lattice = match canonical_class {
        RealLocusClass::I | RealLocusClass::IIplus | RealLocusClass::IIminus => {
            match Modulus::new(k2).and_then(LatticeData::for_modulus) {
                Ok(l) => Some(l),
                Err(_) => {
                    canonical_class = RealLocusClass::NodalD;
                    None
                }
            }
        }
        _ => None,
    };
    let class = if mirrored {
        RealLocusClass::NegativeAngularMomentumSide
    } else {
        canonical_class
    };
    LevelSetParams {
        d,
        e,
        mirrored,
        r2,
        r,
        k2,
        s0,
        s0_inv,
        c2,
        c,
        class,
        canonical_class,
        lattice,
    }
}

/// Non-emptiness of the real locus: `D + 4E + 2R > 0`, given `R > 0` and
/// `D + 2E > 0` for the canonical representative.
pub fn is_nonempty(params: &LevelSetParams) -> bool {
    let (d, e) = params.canonical();
    params.r2 > 0.0 && d + 2.0 * e > 0.0 && d + 4.0 * e + 2.0 * params.r > 0.0
}

/// Angle coordinate on the real locus: `θ ∈ [0, 1)` and the component index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleCoord {
    pub theta: f64,
    pub eps: u8,
}

impl AngleCoord {
    pub fn new(theta: f64, eps: u8) -> Self {
        AngleCoord {
            theta: wrap_unit(theta),
            eps: eps & 1,
        }
    }
}

fn wrap_unit(t: f64) -> f64 {
    let w = t.rem_euclid(1.0);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Parameter of the real Jacobi functions used on the real locus, with its
/// complement: `m = 1/(1−k²)` (unipartite) or `m = 1 − k²` (bipartite).
fn line_parameter(params: &LevelSetParams, regime: Regime) -> (f64, f64) {
    match regime {
        Regime::Unipartite => {
            let den = 1.0 - params.k2;
            (1.0 / den, -params.k2 / den)
        }
        _ => (1.0 - params.k2, params.k2),
    }
}

fn line_quarter_period(params: &LevelSetParams, regime: Regime) -> Result<f64> {
    let (m, _) = line_parameter(params, regime);
    Ok(complete_k(Modulus::new(m)?)?)
}

/// Recovers `x` from `(A₁, A₂, z)` with `z = (1−A₁²)x + A₁(A₂+D)`, choosing
/// the cancellation-free form of the quadratic root.
fn wall_abscissa(a1: f64, a2: f64, z: f64, d: f64) -> f64 {
    let b = a1 * (a2 + d);
    let a = 1.0 - a1 * a1;
    let c = 1.0 - (a2 + d) * (a2 + d);
    if z * b > 0.0 {
        -c / (z + b)
    } else {
        (z - b) / a
    }
}

/// The uniformization `φ`: angle coordinate to configuration point.
///
/// Unipartite case, `u = 4iK″θ`: with `w = 4K(m)θ`, `m = 1/(1−k²)`,
/// `A₁ = −2R√m·sn·dn`, `A₂ = 2E − R + 2R dn²`, `z = C cn`.
/// Bipartite case, `u = 2iK′θ + 2Kε`: with `v = 2K′θ`, parameter `1 − k²`,
/// `A₁ = ∓2R sn·cn`, `A₂ = 2E − R + 2R cn²`, `z = ±C dn`.
pub fn uniformize(a: AngleCoord, params: &LevelSetParams) -> Result<ConfigPoint> {
    let regime = params.regime()?;
    let (d, e) = params.canonical();
    let (r, c) = (params.r, params.c);
    let (m, mc) = line_parameter(params, regime);
    let quarter = line_quarter_period(params, regime)?;
    let line_mod = Modulus::new(m)?;
    debug_assert!((line_mod.complementary() - mc).abs() < 1e-12);
    let (a1, a2, z) = match regime {
        Regime::Unipartite => {
            let j = jacobi_real(4.0 * quarter * a.theta, line_mod);
            (
                -2.0 * r * m.sqrt() * j.sn * j.dn,
                2.0 * e - r + 2.0 * r * j.dn * j.dn,
                c * j.cn,
            )
        }
        _ => {
            let j = jacobi_real(2.0 * quarter * a.theta, line_mod);
            let sign = if a.eps == 1 { -1.0 } else { 1.0 };
            (
                -2.0 * sign * r * j.sn * j.cn,
                2.0 * e - r + 2.0 * r * j.cn * j.cn,
                sign * c * j.dn,
            )
        }
    };
    let x = wall_abscissa(a1, a2, z, d);
    if !x.is_finite() || x.abs() > POLE_X_LIMIT {
        return Err(Error::Pole(a.theta));
    }
    Ok(params.to_canonical(ConfigPoint::new(x, a1, a2)))
}

/// Inverse of [`uniformize`]: the Jacobi amplitude is read off the
/// coordinates and converted to `θ` by the incomplete integral.
pub fn angle_of(c: ConfigPoint, params: &LevelSetParams) -> Result<AngleCoord> {
    let regime = params.regime()?;
    let (d, e) = params.canonical();
    let p = params.to_canonical(c);
    let z = (1.0 - p.a1 * p.a1) * p.x + p.a1 * (p.a2 + d);
    let r = params.r;
    let (m, _) = line_parameter(params, regime);
    let line_mod = Modulus::new(m)?;
    let quarter = complete_k(line_mod)?;
    match regime {
        Regime::Unipartite => {
            let dn = ((p.a2 - 2.0 * e + r) / (2.0 * r)).max(0.0).sqrt();
            let sn = -p.a1 / (2.0 * r * m.sqrt() * dn);
            let cn = z / params.c;
            let amp = sn.atan2(cn).rem_euclid(2.0 * PI);
            let w = legendre_f_amplitude(amp, line_mod)?;
            Ok(AngleCoord::new(w / (4.0 * quarter), 0))
        }
        _ => {
            let eps = u8::from(z < 0.0);
            let sign = if eps == 1 { -1.0 } else { 1.0 };
            let amp = 0.5 * (-sign * p.a1).atan2(p.a2 - 2.0 * e).rem_euclid(2.0 * PI);
            let v = legendre_f_amplitude(amp, line_mod)?;
            Ok(AngleCoord::new(v / (2.0 * quarter), eps))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationData {
    /// Rotation number in `[0, 1)`.
    pub alpha: f64,
    /// `t` exchanges the two components (regime II₊).
    pub flips_component: bool,
    /// Shift `T` in the `u`-plane, modulo the lattice.
    pub shift: Complex64,
}

/// Analytic rotation number from the complete and incomplete integrals.
pub fn rotation_number(params: &LevelSetParams) -> Result<RotationData> {
    let regime = params.regime()?;
    let modulus = params.modulus()?;
    let lattice = params
        .lattice
        .ok_or(Error::Degenerate(params.canonical_class))?;
    let sign = ROTATION_ORIENTATION[regime.index()];
    let (signed, shift) = match regime {
        Regime::Unipartite => {
            let kpp = lattice
                .kpp
                .ok_or(Error::Degenerate(params.canonical_class))?;
            let integral = rotation_integral(
                RotationPath::Unipartite {
                    s0_inv: params.s0_inv,
                },
                modulus,
            )?;
            let a = -sign * integral / (4.0 * kpp);
            (a, Complex64::new(0.0, 4.0 * kpp * a))
        }
        Regime::BipartitePlus | Regime::BipartiteMinus => {
            let kp = lattice
                .kp
                .ok_or(Error::Degenerate(params.canonical_class))?;
            let (path, direction, offset) = if regime == Regime::BipartitePlus {
                (
                    RotationPath::BipartitePlus { s0: params.s0 },
                    1.0,
                    2.0 * lattice.k,
                )
            } else {
                (RotationPath::BipartiteMinus { s0: params.s0 }, -1.0, 0.0)
            };
            let integral = rotation_integral(path, modulus)?;
            let a = sign * direction * integral / (2.0 * kp);
            (a, Complex64::new(offset, 2.0 * kp * a))
        }
    };
    Ok(RotationData {
        alpha: wrap_unit(signed),
        flips_component: regime == Regime::BipartitePlus,
        shift,
    })
}

/// Central finite difference of `α` in `D`.
pub fn dalpha_dd(params: &LevelSetParams, h: f64) -> Result<f64> {
    params.regime()?;
    let lo = derive_params(params.d - h, params.e);
    let hi = derive_params(params.d + h, params.e);
    if lo.class != params.class
        || hi.class != params.class
        || lo.canonical_class != params.canonical_class
        || hi.canonical_class != params.canonical_class
    {
        return Err(Error::ClassChange);
    }
    let diff = rotation_number(&hi)?.alpha - rotation_number(&lo)?.alpha;
    let diff = diff - diff.round();
    Ok(diff / (2.0 * h))
}

/// Elementary circle coordinate on each real component, independent of the
/// elliptic functions: `atan2(−A₁, z)` on the single oval, the angle of
/// `(∓A₁, A₂ − 2E)` on the two bipartite components. Orientation matches `θ`.
pub fn winding_coordinate(c: ConfigPoint, params: &LevelSetParams) -> Result<(f64, u8)> {
    let regime = params.regime()?;
    let (d, e) = params.canonical();
    let p = params.to_canonical(c);
    let z = (1.0 - p.a1 * p.a1) * p.x + p.a1 * (p.a2 + d);
    match regime {
        Regime::Unipartite => Ok((wrap_unit((-p.a1).atan2(z) / (2.0 * PI)), 0)),
        _ => {
            let eps = u8::from(z < 0.0);
            let sign = if eps == 1 { -1.0 } else { 1.0 };
            Ok((
                wrap_unit((-sign * p.a1).atan2(p.a2 - 2.0 * e) / (2.0 * PI)),
                eps,
            ))
        }
    }
}

/// Rotation number measured along an orbit of `steps` collisions using the
/// elementary [`winding_coordinate`] and a smooth-weighted Birkhoff average
/// of the per-step angle increments.
pub fn empirical_rotation_number(
    params: &LevelSetParams,
    start: ConfigPoint,
    steps: usize,
) -> Result<f64> {
    if steps < 2 {
        return Err(Error::Invalid(
            "empirical winding needs at least 2 steps".into(),
        ));
    }
    let mut increments = Vec::with_capacity(steps);
    let mut point = start;
    let (mut prev, _) = winding_coordinate(point, params)?;
    for _ in 0..steps {
        point = map_t(point, params)?.point;
        let (next, _) = winding_coordinate(point, params)?;
        increments.push((next - prev).rem_euclid(1.0));
        prev = next;
    }
    // the winding coordinate is monotone in θ on both components, so each
    // increment reduced to [0, 1) is already the lifted one
    let n = steps as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, d) in increments.iter().enumerate() {
        let t = (i as f64 + 0.5) / n;
        let w = (-1.0 / (t * (1.0 - t))).exp();
        num += w * d;
        den += w;
    }
    Ok(wrap_unit(num / den))
}
