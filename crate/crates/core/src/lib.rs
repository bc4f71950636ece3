//! Budget-constrained, diversity-based active-learning sample selection for
//! driving datasets.
//!
//! Frames carry a location, a stream id and timestamp, a box count, and
//! optionally a feature vector and an uncertainty score. Selection runs the
//! greedy k-Center loop over a weighted sum of normalized spatial (shortest
//! path on a KNN graph of locations), temporal and feature distances, under an
//! annotation cost of `c_f` per frame plus `c_b` per box. Random and
//! uncertainty baselines are included, along with a synthetic trajectory
//! generator for evaluating strategies.

pub mod cli;
pub mod config;
pub mod error;
pub mod geo_graph;
pub mod manifest;
pub mod metric;
pub mod selector;
pub mod simharness;

pub use config::{InitMode, RunConfig, SpatialMode, Strategy};
pub use error::{Error, ErrorClass, Result};
pub use manifest::{load_manifest, validate_for_strategy, write_manifest, DatasetManifest, ManifestFormat, SampleRecord};
pub use selector::{annotation_cost, run_schedule, CostModel, SelectionReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
