//! Shooting for the heteroclinic connection between `P0` (the state `f = 0`)
//! and `P2` (the state `f ≡ 1`), and everything that is read off it: the
//! first return to the X axis, the monotone/oscillatory classification, the
//! wave profile in the travelling coordinate, and finite propagation.
//!
//! The connection is the unique trajectory leaving `P0` into `X > 0`; `P2`
//! attracts everything nearby, so the connection is computed forward from `P0`
//! and then read in reverse. Shooting backward from `P2` is supported as well,
//! but such a shot only brushes past `P0` because `P0` repels transversally
//! in reversed time.

mod classify;
mod profile;
mod propagation;
mod shoot;

pub use classify::{
    classify_connection, classify_connection_with, first_x_axis_intersection, gamma1_first_crossing,
    is_non_increasing, sweep, x0_monotonicity_check, x0_seed_sensitivity, Classification, ConnectionReport, Extremum,
    SweepRow,
};
pub use profile::{reconstruct_profile, wave_profile, weak_form_residual, ProfileSample, WaveProfile};
pub use propagation::{
    detect_finite_propagation, finite_propagation_report, FinitePropagationReport, Thresholds,
};
pub use shoot::{
    integrate_orbit, shoot_from, shoot_with, Direction, EventKind, Seed, ShootOptions, Termination,
    Trajectory, TrajectoryEvent, TrajectorySample,
};
