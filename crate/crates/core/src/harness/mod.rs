//! Configuration, seeding, experiment drivers and result output shared by the
//! command-line tool and the acceptance suite.

mod config;
mod drivers;
mod output;
mod seeds;

pub use config::{Experiment, ExperimentConfig, Format, OutputSpec, Params};
pub use drivers::{
    alignedbox_summary, cf_closed_form, lattice_line_ellipse, linebuild_properties, metric_suite,
    random_unit_box, run, run_alignedbox, run_linebuild, run_loglog_sweep, run_metric,
    run_proof2, run_schedule, run_stress, run_witness, sweep_net, BoxSummary, PropertyResult,
    SweepRow, Verification, EXIT_ERROR, EXIT_GAP, EXIT_OK,
};
pub use output::{fmt_f64, write_atomic, Report, Table};
pub use seeds::sub_seed;
