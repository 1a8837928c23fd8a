//! Instrumented tree-walking interpreter for tests against subject units.

mod distance;
mod fitness;
mod interp;
mod observe;
mod value;

pub use distance::{branch_distance, normalize, K};
pub use fitness::{fitness, fitness_from};
pub use interp::{execute_test, focal_window, run, ExecTrace, Execution, InspectorResult, Limits, Outcome, MAX_DEPTH};
pub use observe::{harvest_observations, observe, ObsKind, ObsRef, Observation, Observed};
pub use value::Value;
