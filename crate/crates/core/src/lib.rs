//! Integrable Boltzmann system: a Kepler particle elastically reflected at the
//! wall `x₂ = 1`, studied as the discrete collision map on the level sets of
//! the energy `E` and the second integral `D = L² − 2A₂`.
//!
//! Units are `m = κ = h = 1` throughout.

// `!(x > 0.0)` is used on purpose so that NaN takes the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod curve;
pub mod elliptic;
pub mod error;
pub mod kepler;
pub mod periodicity;
pub mod poincare;

pub use curve::{
    angle_of, dalpha_dd, derive_params, empirical_rotation_number, is_nonempty, rotation_number,
    uniformize, winding_coordinate, AngleCoord, LevelSetParams, RealLocusClass, Regime,
    RotationData, ROTATION_ORIENTATION,
};
pub use error::{Error, Result};
pub use kepler::{
    conserved_quantities, phase_from_config, reflect_at_wall, trajectory_arc, Branch, ConservedSet,
    PhaseState,
};
pub use periodicity::{
    detect_period_direct, find_periodic_locus, period3_residual, poncelet_check, predict_period,
    PeriodReport,
};
pub use poincare::{
    involution_i, involution_j, iterate_orbit, map_t, sample_level_set, ConfigPoint,
    IterateOptions, MapStep, Orbit, RootExchange,
};
