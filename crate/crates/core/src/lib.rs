//! Discrete topology and metric invariants of finite and windowed locally
//! finite metric spaces.

pub mod digital;
pub mod distance;
pub mod distortion;
pub mod doc;
pub mod error;
pub mod fixtures;
pub mod homotopy;
pub mod iso;
pub mod npp;
pub mod space;

pub use distance::{Distance, Rational};
pub use error::{Error, Result};
pub use space::{ChainRule, Coords, MetricSpace, PointId, PointMetric, Window};
