//! Game-file format, result reports and the command-line front end for
//! `qg-core`.

pub mod check;
pub mod cli;
pub mod gamefile;
pub mod report;
