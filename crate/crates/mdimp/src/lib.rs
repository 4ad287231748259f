//! File formats, experiment runner and command-line front end for `mdimp-core`.

pub mod cli;
pub mod config;
pub mod graph_doc;
pub mod io;
pub mod model_doc;
pub mod run;
