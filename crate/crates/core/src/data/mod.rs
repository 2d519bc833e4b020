//! Dataset ingestion, statistics, and the synthetic generator.

pub mod benchmarks;
pub mod manifest;
pub mod stats;
pub mod synth;

pub use benchmarks::{Benchmark, ExpectedStats, RelationStat};
pub use manifest::{load_dataset, load_manifest, DatasetManifest, FeatureFile, FeatureFormat, LoadedDataset, RelationFile};
pub use stats::{dataset_stats, edge_convention, validate_stats, DatasetStats, EdgeConvention, RelationEdges};
pub use synth::{generate_synthetic, write_synthetic, SyntheticCounts, SyntheticDataset, SyntheticSpec};
