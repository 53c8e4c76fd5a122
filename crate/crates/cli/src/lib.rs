//! Command-line front end: state files in, rendered reports out.

mod app;
pub mod render;
pub mod statefile;

pub use app::{run, RunConfig, TOL_ENV};
