//! Verification suites and figure-data writers behind the `pagegeo` binary.

pub mod figures;
pub mod suites;

use std::time::{SystemTime, UNIX_EPOCH};

use page_geometry::report::Metadata;
use page_geometry::PageMetric;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn metadata(metric: &PageMetric) -> Metadata {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Metadata::new(metric, VERSION, format!("unix:{secs}"))
}
