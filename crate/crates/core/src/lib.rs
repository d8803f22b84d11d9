pub mod axis;
pub mod candidates;
pub mod error;
pub mod experiments;
pub mod free_group;
pub mod graph;
pub mod metric;
pub mod points;
pub mod scalar;
pub mod train_track;
pub mod whitehead;

pub use error::{Error, Result};
pub use free_group::{Automorphism, CyclicWord, Letter, Word, WhiteheadMove};
pub use scalar::Scalar;

/// Double-precision marked metric graph, the default point type.
pub type Point = graph::MarkedGraph<f64>;
pub type Graph = graph::MetricGraph<f64>;
pub type TrainTrack = train_track::TrainTrackMap<f64>;
pub type SelfMap = train_track::GraphSelfMap<f64>;
pub type AxisF64 = axis::Axis<f64>;
pub type Distance = metric::DistanceResult<f64>;

pub type PointF32 = graph::MarkedGraph<f32>;
pub type GraphF32 = graph::MetricGraph<f32>;
pub type TrainTrackF32 = train_track::TrainTrackMap<f32>;
pub type AxisF32 = axis::Axis<f32>;
