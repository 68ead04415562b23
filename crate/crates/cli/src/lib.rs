//! The `lchpm` command line: spec files, barcodes, bounds, scenarios and SVG output.

pub mod app;
pub mod error;
pub mod generators;
pub mod manifest;
pub mod scenario;
pub mod svg;

pub use app::{run, Outcome};
pub use error::CliError;
