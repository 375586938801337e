//! File formats, reports, and the fit and benchmark entry points used by the
//! command-line tool.

mod bench;
mod images;
mod matches;
mod report;
mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use bench::{
    run_benchmark, BenchReport, BenchRow, BenchSuite, Sweep, OUTLIER_SWEEP, SUPERPIXEL_SWEEP, TIMING_REPEATS,
};
pub use images::{load_image, save_rgb};
pub use matches::{
    labels_sidecar, load_labels, load_matches, parse_labels, parse_matches, save_labels, save_matches, write_labels,
    write_matches, MATCHES_HEADER,
};
pub use report::{InstanceReport, RunReport, StageReport, REPORT_SCHEMA};
pub use run::{run_fit, FitArgs, Method, OutputFormat, RunError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: unsupported format version `{found}`")]
    Version { path: PathBuf, found: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Image { path: PathBuf, message: String },
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }
}
