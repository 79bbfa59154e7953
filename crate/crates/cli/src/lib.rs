//! File formats, run reports and the experiment pipelines behind the
//! `spclust` command-line tool.

pub mod cli;
pub mod io;
pub mod pipeline;
pub mod report;

pub use io::DataError;
