//! Command-line front end for `seqmads-core`: problem files, on-disk
//! formats, SVG data profiles and the `seqmads` subcommands.

pub mod app;
pub mod expr;
pub mod io;
pub mod problem_file;
pub mod svg;
