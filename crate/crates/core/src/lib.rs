//! Numerical differential geometry of the Page metric on CP² # -CP².

// tensor code reads best with explicit indices
#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` is used on purpose to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connection;
pub mod functionals;
pub mod geometry;
pub mod moduli;
pub mod numerics;
pub mod profiles;
pub mod report;
pub mod submanifolds;

pub use geometry::{ChartPoint, Normalization, PageMetric};
pub use profiles::ProfileSet;
