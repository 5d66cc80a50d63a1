//! Symmetrization inequalities on finite metric measure spaces.
//!
//! Points carry masses and a distance table; functions are plain `Vec<f64>` indexed
//! like the points. [`rearrange`] handles decreasing rearrangements and
//! rearrangement-invariant norms, [`maximal`] the maximal operators, [`verify`] the
//! inequality scanners, and [`carnot`] builds spaces from Hörmander vector fields.

pub mod carnot;
pub mod cli;
pub mod error;
pub mod functions;
pub mod maximal;
pub mod quad;
pub mod rearrange;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
pub use rearrange::{RISpaceSpec, StepFunction};
pub use space::{BallIndexSet, Grid, MetricMeasureSpace};
pub use verify::{InequalityReport, SobolevPair};
