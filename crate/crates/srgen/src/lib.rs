//! File formats, run layout and the command line around `srgen-core`.

pub mod cli;
pub mod io;
pub mod report;
