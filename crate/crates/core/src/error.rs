use thiserror::Error;

use crate::curve::RealLocusClass;
use crate::elliptic::EllipticError;
use crate::poincare::Orbit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error("particle at the force centre (r = 0)")]
    AtCentre,
    #[error("state is not on the wall: x2 = {0}")]
    NotOnWall(f64),
    #[error("non-real angular momentum: D + 2A2 = {0}")]
    NonRealAngularMomentum(f64),
    #[error("|L| = {0:e} is below the floor: radial (double line) conic")]
    RadialConic(f64),
    #[error("point lies on the repulsive sheet of the focal conic (A2 + D - A1 x = {0})")]
    NonPhysicalBranch(f64),
    #[error("conic arc between the wall points passes through infinity")]
    ArcThroughInfinity,
    #[error("conic arc between the wall points lies on the centre side of the wall")]
    ArcBelowWall,
    #[error("level set of class {0} does not support this operation")]
    Degenerate(RealLocusClass),
    #[error("real locus is empty")]
    EmptyLevelSet,
    #[error("root exchange sends the wall point to infinity")]
    PointAtInfinity,
    #[error("uniformization pole at theta = {0}")]
    Pole(f64),
    #[error("orbit aborted at step {step}: {reason}")]
    OrbitAbort {
        step: usize,
        reason: String,
        partial: Box<Orbit>,
    },
    #[error("class changes inside the finite-difference stencil")]
    ClassChange,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
