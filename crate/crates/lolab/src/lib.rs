//! File formats, report records and the command line for `lolab-core`.

pub mod cli;
pub mod format;
pub mod record;
