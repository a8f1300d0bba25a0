//! Closed subsets of R^d seen through a finite window: the Chabauty–Fell
//! distance, the affine action, the line-building procedure and a Monte Carlo
//! check of the Danzer property for a fixed radius.

mod danzer;
mod group;
mod line;
mod metric;
mod windowed;

pub use danzer::{danzer_param_check, Counterexample, DanzerCheck, DanzerCheckOptions};
pub use group::{projection, random_element, random_log_diagonal, random_rotation, GroupElement};
pub use line::{line_build, LineBuild, LineBuildParams, TargetRecord};
pub use metric::{act, cf_distance, cf_distance_with, CF_TOLERANCE};
pub use windowed::{WindowedSet, DUPLICATE_TOL};
