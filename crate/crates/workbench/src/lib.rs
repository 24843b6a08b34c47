//! IO, file formats and the command line for the forcing-poset workbench.

pub mod cli;
pub mod dot;
pub mod json;
pub mod trace;
