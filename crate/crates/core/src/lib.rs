//! Synthetic link streams with planted temporal communities ("mosaics"),
//! snapshot aggregation, dynamic community detection and scoring.
//!
//! The pipeline is: build a [`MosaicPartition`] with one of the scenario
//! generators, draw temporal edges for it with [`edgegen::generate`], cut the
//! stream into windows with [`snapshot::aggregate`], run a detector from
//! [`detect`] and compare it with the projected ground truth using
//! [`metrics`]. [`experiment`] wires these steps together.

pub mod config;
pub mod detect;
pub mod edgegen;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod partition;
pub mod rng;
pub mod scenario;
pub mod snapshot;
pub mod stream;

pub use config::RunConfig;
pub use detect::{detect, DetectorConfig, Method};
pub use edgegen::EdgeGenParams;
pub use error::{Error, Result};
pub use partition::{Community, Mosaic, MosaicId, MosaicPartition};
pub use scenario::ScenarioParams;
pub use snapshot::{DynamicPartition, SnapshotSequence};
pub use stream::{LinkStream, NodeId, TemporalEdge, TimeInterval};

/// Library version, recorded in manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
