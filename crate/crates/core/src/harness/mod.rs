//! Command-line harness: JSON body files, seeded random bodies, the
//! verification suites and 2-D plots.

mod json;
mod random;
mod suites;
mod svg;

pub use json::{body_json, decomposition_json, ellipsoid_json, kball_json, object, rows, vector, vectors, number, parse_body, parse_document, read_body, to_string, BodyFile, Document};
pub use random::{random_john_body, Generator, JohnBody};
pub use suites::{all_pass, difference_body, run_suite, split_seed, write_csv, Row, Suite, SuiteConfig, SUITES};
pub use svg::plot2d;

use crate::error::GeomError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// Malformed input; `field` is a path such as `vertices[2][1]`.
    #[error("{field}: {message}")]
    Format { field: String, message: String },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("i/o: {0}")]
    Io(String),
}
