//! Growing convex sets of fixed volume that hold many points of a given set,
//! by two routes (the ε-schedule iteration and the volume-target induction),
//! and the ε-net stress test built on the first.

mod grow;
mod proof2;
mod schedule;
mod stress;
mod trace;

pub use grow::{grow_witness, working_scale, GOLDEN_ANGLE};
pub use proof2::{grow_witness_proof2, induction_targets, Proof2Step, Proof2Trace};
pub use schedule::{
    alpha, alpha_ln, diameter_bound, diameter_bound_ln, make_schedule, select_n, Schedule,
    MAX_SCHEDULE_EXPONENT,
};
pub use stress::{net_stress, StressResult};
pub use trace::{DirectionPolicy, GrowOptions, Outcome, StepRecord, WitnessTrace};
