//! Discretized forward chordal Loewner evolution.
//!
//! The driving function is held constant on each capacity-time step and the
//! flow over one step is solved exactly: in the recentred coordinate
//! `Z_t = g_t − U_t` a step is the shift `Z ↦ Z − ΔU` followed by the slit map
//! `w ↦ √(w² + 2aδ)`. Every step is therefore an exact conformal map and only
//! the driving path is approximated.

mod driving;
mod slit;
mod trace;
mod tracked;

pub use driving::{sample_driving, DrivingPath};
pub use slit::{inverse_slit_step, slit_step, slit_step_factor, solve_constant_driving, upper_sqrt};
pub use trace::{
    distance_to_curve, farfield_check, forward_map, tip_at, tips_range, trace_curve, walk_tips, CurveTrace,
};
pub use tracked::{evolve_tracked_point, TrackedPoint, TrajectorySample, SWALLOW_REL_THRESHOLD};
