//! Compression-based estimates of Kolmogorov complexity, checks of the
//! projection decomposition inequality on tuple datasets, and a light-cone
//! complexity study with low-pass/high-pass complexity filters.
//!
//! The pipeline is: [`codec`] turns a [`TupleDataset`] into a self-delimited
//! text blob, [`estimator`] compresses it, [`decomposition`] compares a
//! dataset's estimate against the estimates of its column projections, and
//! [`lightcone`] applies the same machinery to regions of a spacetime cloud.

pub mod cli;
pub mod codec;
pub mod datasets;
pub mod decomposition;
pub mod estimator;
pub mod lightcone;
pub mod manifest;
pub mod plot;

pub use codec::{encode, CodecError, CompressorBackend, EncodedBlob, QuantizedScalar, TupleDataset};
pub use decomposition::{
    canonical_family, project, verify_decomposition, DecompositionConfig, DecompositionReport, ProjectionSpec,
};
pub use estimator::{estimate, estimate_bytes, estimate_joint, ComplexityEstimate};
pub use lightcone::{CausalRegion, LightconeReport, ProbeCloud, RegionTag};
