//! Multi-vehicle Dubins routing over sampled task neighborhoods.
//!
//! A fleet of heterogeneous forward-only vehicles leaves fixed depots and
//! must cover every task, either by visiting a sample pose inside the task
//! neighborhood or by passing a pose whose turning circles necessarily cross
//! it. Tours minimize `α·mean + (1 − α)·max` of the per-vehicle costs.
//!
//! * [`geometry`]: Dubins paths and the turning-circle predicate, generic
//!   over [`Scalar`].
//! * [`instance`], [`tsplib`]: problem data.
//! * [`roadmap`]: sample nodes, edge costs, NIN tables.
//! * [`memetic`]: chromosome encoding, operators and the generational loop.
//! * [`refine`]: continuous post-optimization of the visited poses.
//! * [`exact`]: MILP export, subtour separation and a brute-force oracle.
//! * [`solve`], [`report`], [`svg`], [`bench`]: pipelines and artifacts used
//!   by the command line.

pub mod bench;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod instance;
pub mod memetic;
pub mod nelder_mead;
pub mod refine;
pub mod report;
pub mod roadmap;
pub mod scalar;
pub mod solve;
pub mod svg;
pub mod tsplib;

pub use error::Error;
pub use scalar::Scalar;

/// `f64` pose.
pub type Config = geometry::Config<f64>;
/// `f64` point.
pub type Point2 = geometry::Point2<f64>;
/// `f64` disk.
pub type Disk = geometry::Disk<f64>;
/// `f64` Dubins path.
pub type DubinsPath = geometry::DubinsPath<f64>;

pub use instance::{Instance, VehicleSpec};
pub use memetic::{Chromosome, MaParams, TourSet};
pub use roadmap::Roadmap;
pub use solve::Method;
