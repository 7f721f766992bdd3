//! Numerical Finsler geometry on a single chart.
//!
//! Every pointwise object (fundamental tensor, spray, moving frame, Chern and
//! Cartan connections, curvature, Cartan endomorphism) is computed from
//! truncated Taylor jets of a closed-form metric `F(x, y)`, so derivatives are
//! exact up to rounding. Finite differences appear only as test oracles.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod chern_simons;
pub mod connections;
pub mod error;
pub mod fd;
pub mod forms;
pub mod frame;
pub mod jet;
pub mod local;
pub mod metric;
pub mod oracle;
pub mod point;
pub mod report;
pub mod sasaki;
pub mod sigma;
pub mod spray;
pub mod tensors;

pub use error::{GeomError, Result};
pub use jet::Jet;
pub use local::LocalGeometry;
pub use metric::FinslerMetric;
pub use point::ChartPoint;
pub use sigma::SigmaSpec;
