//! High-pass graph convolution for node anomaly detection.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: CSR adjacency, the symmetric normalized Laplacian
//!   `L = I − D^{-1/2} W D^{-1/2}`, connected components and the
//!   isolated/connected node partition.
//! * [`spectral`]: dense eigendecomposition, graph Fourier transform and
//!   polynomial filters evaluated both spectrally and by repeated `L·x`.
//! * [`tensor`]: dense matrices, a reverse-mode tape, Adam, a
//!   finite-difference gradient checker and the checkpoint format.
//! * [`model`]: the detector. Connected nodes pass through a learnable
//!   polynomial filter `Σ θ_k L^k`; isolated nodes bypass it through an MLP.
//! * [`train`] and [`metrics`]: stratified splits, the training loop,
//!   F1-macro and ROC AUC.
//! * [`data`]: manifests, file formats, dataset statistics and the
//!   planted-anomaly generator.
//!
//! ```
//! use hpgcn::data::{generate_synthetic, SyntheticSpec};
//! use hpgcn::model::HpGcnConfig;
//! use hpgcn::train::{train, TrainConfig};
//!
//! let spec = SyntheticSpec { n_nodes: 200, n_features: 4, p_in: 0.05, p_out: 0.01, seed: 1, ..Default::default() };
//! let ds = generate_synthetic(&spec)?;
//! let model = HpGcnConfig { hidden_dim: 8, ..Default::default() };
//! let run = train(&ds.graph, &model, &TrainConfig { epochs: 5, ..Default::default() })?;
//! assert_eq!(run.report.epochs.len(), 5);
//! # Ok::<(), hpgcn::Error>(())
//! ```

pub mod data;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod spectral;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
